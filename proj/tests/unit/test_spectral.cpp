#include "doctest.h"
#include "helpers.hpp"

#include "sforge/dynamics.hpp"
#include "sforge/models.hpp"
#include "sforge/spectral.hpp"

using namespace sforge;
using namespace testing_helpers;

namespace {
// Closed-form Landau-Zener quantities for H = lam sz + delta sx.
Matrix lz_cd_oracle(double lam, double delta, double rate) {
    return (-rate * delta / (2.0 * (lam * lam + delta * delta))) * pauli_y();
}

HamiltonianPath random_path(Index d, std::uint64_t seed) {
    const Matrix a = models::random_hermitian(d, seed), b = models::random_hermitian(d, seed + 1),
                 c = models::random_hermitian(d, seed + 2);
    HamiltonianPath p;
    p.dim = d;
    p.value = [=](double t) -> Matrix { return a + std::sin(t) * b + t * t * c; };
    p.rate = [=](double t) -> Matrix { return std::cos(t) * b + 2.0 * t * c; };
    return p;
}
}  // namespace

TEST_CASE("eigenpath of a constant Hamiltonian") {
    const EigenPath p = eigenpath(constant_path(pauli_z()), uniform_grid(0, 1, 5));
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(std::abs(p.energies[i](0) + 1.0) < 1e-15);
        CHECK(std::abs(p.energies[i](1) - 1.0) < 1e-15);
        CHECK(max_abs(p.vectors[i] - p.vectors[0]) == 0.0);
    }
}

TEST_CASE("eigenpath invariants along a Landau-Zener sweep") {
    const auto lz = models::landau_zener(1.0);
    const auto path = along(lz, ParamSchedule::linear(-5, 5, 1.0));
    const EigenPath p = eigenpath(path, uniform_grid(0, 1, 201));
    double min_gap = 1e9;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Matrix& v = p.vectors[i];
        CHECK(max_abs(v.adjoint() * v - Matrix::Identity(2, 2)) < 1e-10);
        const Matrix h = path(p.grid[i]);
        CHECK(max_abs(h * v - v * p.energies[i].asDiagonal()) < 1e-9 * spectral_norm_hermitian(h));
        if (i > 0) {
            for (Index n = 0; n < 2; ++n) {
                const cplx o = p.vectors[i - 1].col(n).dot(v.col(n));
                CHECK(o.real() > 0.0);
                CHECK(std::abs(o.imag()) < 1e-12);
            }
        }
        min_gap = std::min(min_gap, p.energies[i](1) - p.energies[i](0));
    }
    CHECK(std::abs(min_gap - 2.0) < 1e-12);
}

TEST_CASE("levels keep their identity through an exact crossing") {
    // Two decoupled levels cross at t = 0.5; a third stays apart.
    HamiltonianPath h;
    h.dim = 3;
    h.value = [](double t) -> Matrix {
        Matrix m = Matrix::Zero(3, 3);
        m(0, 0) = t - 0.5;
        m(1, 1) = 0.5 - t;
        m(2, 2) = 3.0;
        return m;
    };
    const EigenPath p = eigenpath(h, uniform_grid(0, 1, 10));
    CHECK(p.energies.front()(0) < p.energies.front()(1));
    CHECK(p.energies.back()(0) > p.energies.back()(1));
    CHECK(std::abs(p.vectors.back()(0, 0)) > 0.999);
}

TEST_CASE("exact CD against closed forms") {
    CHECK(max_abs(exact_cd(pauli_z() + pauli_x(), Matrix::Zero(2, 2)).matrix()) == 0.0);

    const Matrix cd = exact_cd(0.0 * pauli_z() + 1.0 * pauli_x(), 1.0 * pauli_z()).matrix();
    CHECK(max_abs(cd + 0.5 * pauli_y()) < 1e-14);
    for (double lam : {-3.0, -0.4, 0.9, 4.0}) {
        const double rate = 1.7, delta = 0.6;
        const Matrix c = exact_cd(lam * pauli_z() + delta * pauli_x(), rate * pauli_z()).matrix();
        CHECK(max_abs(c - lz_cd_oracle(lam, delta, rate)) < 1e-14);
        // Commutator of oracle-built matrices.
        const Matrix comm = commutator(lam * pauli_z() + delta * pauli_x(), lz_cd_oracle(lam, delta, rate));
        const Matrix expect = (-rate * delta / (2.0 * (lam * lam + delta * delta))) *
                              (-lam * 2.0 * I * pauli_x() + delta * 2.0 * I * pauli_z());
        CHECK(max_abs(comm - expect) < 1e-14);
    }
    {
        ScopedHbar units(2.0);
        const Matrix c = exact_cd(pauli_x(), pauli_z()).matrix();
        CHECK(max_abs(c + pauli_y()) < 1e-14);
    }

    std::mt19937_64 rng(17);
    const Matrix h = random_hermitian(3, rng), dh = random_hermitian(3, rng);
    const EigenFrame f = eigen_frame(h);
    const Matrix c = f.vectors.adjoint() * exact_cd(h, dh).matrix() * f.vectors;
    for (Index n = 0; n < 3; ++n) CHECK(std::abs(c(n, n)) < 1e-12);

    CHECK_THROWS_AS(exact_cd(Matrix::Identity(2, 2), pauli_x()), DegeneracyError);
}

TEST_CASE("derivative couplings: finite differences against the dH formula") {
    const HamiltonianPath h = random_path(3, 41);
    const std::vector<double> grid = uniform_grid(0.3, 0.3 + 2e-4, 3);
    const EigenPath p = eigenpath(h, grid);
    const Matrix w = derivative_couplings_fd(p, 1);
    const Matrix m = p.vectors[1].adjoint() * h.derivative(grid[1]) * p.vectors[1];
    for (Index n = 0; n < 3; ++n)
        for (Index k = 0; k < 3; ++k) {
            if (n == k) continue;
            const cplx formula = m(n, k) / (p.energies[1](k) - p.energies[1](n));
            CHECK(std::abs(w(n, k) - formula) < 1e-6);
        }
    // Geometric-phase integrand is imaginary.
    const Vector a = berry_connection(p, 1);
    CHECK(a.real().cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("exact CD equals the off-diagonal term built from finite-difference couplings") {
    const HamiltonianPath h = random_path(4, 77);
    const std::vector<double> grid = uniform_grid(0.8, 0.8 + 2e-4, 3);
    const EigenPath p = eigenpath(h, grid);
    const Matrix w = derivative_couplings_fd(p, 1);
    Matrix off = Matrix::Zero(4, 4);
    for (Index n = 0; n < 4; ++n)
        for (Index m = 0; m < 4; ++m)
            if (n != m) off += I * w(n, m) * p.vectors[1].col(n) * p.vectors[1].col(m).adjoint();
    CHECK(max_abs(off - exact_cd(h, grid[1]).matrix()) < 1e-6);
}

TEST_CASE("adiabatic gauge potential") {
    const auto lz = models::landau_zener(0.8);
    for (double lam : {-2.0, 0.0, 1.5}) {
        RealVector l(1);
        l << lam;
        const Matrix a = adiabatic_gauge_potential(lz, l, 0).matrix();
        CHECK(max_abs(a - (-0.8 / (2.0 * (lam * lam + 0.64))) * pauli_y()) < 1e-14);
    }
    const auto sched = ParamSchedule::smooth(-3, 2, 1.7);
    const HamiltonianPath path = along(lz, sched);
    for (double t : {0.2, 0.9, 1.4}) {
        const Matrix cd = exact_cd(path, t).matrix();
        const Matrix ag = sched.dlambda(t)(0) * adiabatic_gauge_potential(lz, sched.lambda(t), 0).matrix();
        CHECK(max_abs(cd - ag) < 1e-10);
    }
    ParametricHamiltonian flat;
    flat.dim = 2;
    flat.value = [](const RealVector&) -> Matrix { return pauli_x() + 0.3 * pauli_z(); };
    flat.partial = [](const RealVector&, Index) -> Matrix { return Matrix::Zero(2, 2); };
    CHECK(max_abs(adiabatic_gauge_potential(flat, RealVector::Zero(1), 0).matrix()) == 0.0);
}

TEST_CASE("adiabatic state of a constant Hamiltonian") {
    const Matrix h = 0.5 * pauli_z();
    const auto grid = uniform_grid(0, 2, 21);
    const EigenPath p = eigenpath(constant_path(h), grid);
    Vector c0 = Vector::Zero(2);
    c0(1) = 1.0;
    const AdiabaticState s = adiabatic_state(p, c0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        Vector expect = p.vectors[0].col(1) * std::exp(cplx(0, -0.5 * grid[i]));
        CHECK((s.trajectory.states[i] - expect).norm() < 1e-12);
    }
}

TEST_CASE("adiabatic state keeps populations") {
    const auto path = along(models::random_linear_path(4, 9), ParamSchedule::smooth(-1, 1, 3.0));
    const EigenPath p = eigenpath(path, uniform_grid(0, 3, 301));
    Vector c0(4);
    c0 << 0.5, cplx(0, 0.5), -0.5, 0.5;
    const AdiabaticState s = adiabatic_state(p, c0);
    for (std::size_t i = 0; i < p.size(); i += 10)
        for (Index n = 0; n < 4; ++n)
            CHECK(std::abs(std::norm(p.vectors[i].col(n).dot(s.trajectory.states[i])) - std::norm(c0(n))) < 1e-10);
}

TEST_CASE("Berry phase of a loop equals half the solid angle") {
    const double bz = 0.6, r = 1.0;
    const auto model = models::spin_in_plane_field(bz);
    const double T = 1.0;
    const ParamSchedule loop(
        T,
        [=](double t) {
            RealVector l(2);
            l << r * std::cos(2 * pi * t / T), r * std::sin(2 * pi * t / T);
            return l;
        },
        [=](double t) {
            RealVector l(2);
            l << -r * 2 * pi / T * std::sin(2 * pi * t / T), r * 2 * pi / T * std::cos(2 * pi * t / T);
            return l;
        });
    const EigenPath p = eigenpath(along(model, loop), uniform_grid(0, T, 2001));
    const double cos_theta = bz / std::sqrt(bz * bz + r * r);
    const double half_solid = pi * (1.0 - cos_theta);
    auto wrap = [](double x) { return std::remainder(x, 2 * pi); };
    // Ground state is anti-aligned with the field: +Omega/2; excited: -Omega/2.
    CHECK(std::abs(wrap(berry_phase(p, 0) - half_solid)) < 1e-4);
    CHECK(std::abs(wrap(berry_phase(p, 1) + half_solid)) < 1e-4);

    // Transported state picks up the same phase on top of the dynamical phase.
    Vector c0 = Vector::Zero(2);
    c0(0) = 1.0;
    const AdiabaticState s = adiabatic_state(p, c0);
    const cplx ret = p.vectors.front().col(0).dot(s.trajectory.states.back()) * std::exp(cplx(0, s.dynamical_phases.back()(0)));
    CHECK(std::abs(wrap(std::arg(ret) - half_solid)) < 1e-4);

    // Reparameterization t -> 2t leaves the geometric phase unchanged.
    const ParamSchedule slow(
        2 * T, [&](double t) { return loop.lambda(t / 2); }, [&](double t) { return RealVector(loop.dlambda(t / 2) / 2.0); });
    const EigenPath q = eigenpath(along(model, slow), uniform_grid(0, 2 * T, 2001));
    CHECK(std::abs(berry_phase(q, 0) - berry_phase(p, 0)) < 1e-8);
}

TEST_CASE("adiabaticity metric") {
    CHECK(adiabaticity_metric(pauli_x(), Matrix::Zero(2, 2), 0, 1) == 0.0);
    CHECK(std::abs(adiabaticity_metric(pauli_x(), pauli_z(), 0, 1) - 0.25) < 1e-14);
    std::mt19937_64 rng(2);
    const Matrix h = random_hermitian(4, rng), dh = random_hermitian(4, rng);
    CHECK(std::abs(adiabaticity_metric(h, dh, 1, 3) - adiabaticity_metric(h, dh, 3, 1)) < 1e-14);
}

TEST_CASE("quantum geometric tensor") {
    const auto lz = models::landau_zener(1.0);
    for (double lam : {-2.0, -0.3, 0.0, 0.7, 3.0}) {
        RealVector l(1);
        l << lam;
        const double expect = 1.0 / (4.0 * std::pow(lam * lam + 1.0, 2));
        for (Index n = 0; n < 2; ++n) CHECK(std::abs(quantum_geometric_tensor(lz, l, n)(0, 0) - expect) < 1e-9);
    }
    const auto model = models::spin_in_plane_field(0.4);
    RealVector l(2);
    l << 0.3, -0.8;
    const RealMatrix g = quantum_geometric_tensor(model, l, 0);
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(g);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);

    ParametricHamiltonian flat;
    flat.dim = 2;
    flat.value = [](const RealVector& x) -> Matrix { return (1.0 + x(0) * x(0)) * pauli_z(); };
    flat.partial = [](const RealVector& x, Index) -> Matrix { return 2.0 * x(0) * pauli_z(); };
    CHECK(std::abs(quantum_geometric_tensor(flat, RealVector::Ones(1), 0)(0, 0)) < 1e-14);
}

TEST_CASE("driving with exact CD freezes populations at any speed") {
    const auto lz = models::landau_zener(1.0);
    for (double T : {0.05, 0.5}) {
        const HamiltonianPath h = along(lz, ParamSchedule::linear(-5, 5, T));
        const auto grid = uniform_grid(0, T, 101);
        const EigenPath p = eigenpath(h, grid);
        const StateTrajectory traj = evolve(h + exact_cd_path(h), Ket(p.vectors[0].col(0)), grid, 20);
        for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::norm(p.vectors[i].col(0).dot(traj.states[i])) > 1 - 1e-7);
    }
}
