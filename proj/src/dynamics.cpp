#include "sforge/dynamics.hpp"

#include <cmath>

#include "sforge/quadrature.hpp"

namespace sforge {

Matrix step_unitary(const Matrix& h, double dt) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success) throw NumericalError("dynamics", "eigen-decomposition failed");
    const double s = dt / hbar();
    Vector phases(h.rows());
    for (Index k = 0; k < h.rows(); ++k) phases(k) = std::exp(cplx(0.0, -es.eigenvalues()(k) * s));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

namespace {
// exp(-i H dt/hbar) psi without forming the full propagator.
Vector apply_step(const Matrix& h, double dt, const Vector& psi) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success) throw NumericalError("dynamics", "eigen-decomposition failed");
    const double s = dt / hbar();
    Vector c = es.eigenvectors().adjoint() * psi;
    for (Index k = 0; k < c.size(); ++k) c(k) *= std::exp(cplx(0.0, -es.eigenvalues()(k) * s));
    return es.eigenvectors() * c;
}
}  // namespace

StateTrajectory evolve(const HamiltonianPath& h, const Ket& psi0, const std::vector<double>& grid, int steps_per_interval) {
    if (grid.empty()) throw InvalidArgument("dynamics", "empty grid");
    if (steps_per_interval < 1) throw InvalidArgument("dynamics", "steps_per_interval must be positive");
    require_increasing(grid, "dynamics");
    if (psi0.dim() != h.dim) throw DimensionMismatch("dynamics", "initial state and Hamiltonian dimensions differ");
    StateTrajectory out;
    out.grid = grid;
    out.method = "midpoint-exponential";
    out.steps_per_interval = steps_per_interval;
    out.hbar = hbar();
    Vector psi = psi0.vector();
    out.states.push_back(psi);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double t0 = grid[i - 1];
        const double dt = (grid[i] - t0) / steps_per_interval;
        for (int k = 0; k < steps_per_interval; ++k) psi = apply_step(h(t0 + (k + 0.5) * dt), dt, psi);
        out.states.push_back(psi);
    }
    return out;
}

Matrix propagator(const HamiltonianPath& h, double t0, double t1, int steps) {
    if (steps < 1) throw InvalidArgument("dynamics", "steps must be positive");
    const double dt = (t1 - t0) / steps;
    Matrix u = Matrix::Identity(h.dim, h.dim);
    for (int k = 0; k < steps; ++k) u = step_unitary(h(t0 + (k + 0.5) * dt), dt) * u;
    return u;
}

std::vector<Vector> adiabatic_coefficients(const StateTrajectory& traj, const EigenPath& path) {
    if (traj.grid != path.grid) throw InvalidArgument("dynamics", "trajectory and eigenpath grids differ");
    const std::vector<RealVector> phase = cumulative_integral(path.grid, path.energies);
    std::vector<Vector> out;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        Vector c = path.vectors[i].adjoint() * traj.states[i];
        for (Index n = 0; n < c.size(); ++n) c(n) *= std::exp(cplx(0.0, phase[i](n) / traj.hbar));
        out.push_back(c);
    }
    return out;
}

cplx overlap(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw DimensionMismatch("dynamics", "state dimensions differ");
    return a.dot(b);
}

double fidelity(const Vector& a, const Vector& b) { return std::norm(overlap(a, b)); }

double phase_insensitive_distance(const Vector& a, const Vector& b) {
    const cplx o = overlap(a, b);
    const cplx phase = std::abs(o) > 0 ? o / std::abs(o) : cplx(1.0);
    return (a * phase - b).norm();
}

}  // namespace sforge
