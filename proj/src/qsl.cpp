#include "sforge/qsl.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sforge/dynamics.hpp"
#include "sforge/quadrature.hpp"

namespace sforge {

double BoundReport::worst_violation() const {
    if (observed.size() == 0) return -1.0;
    return (bound - observed).maxCoeff();
}

double standard_deviation(const Matrix& x, const Vector& psi) {
    if (x.rows() != psi.size()) throw DimensionMismatch("qsl", "operator and state dimensions differ");
    const Vector xpsi = x * psi;
    long double mean_re = 0.0L;
    long double norm2 = 0.0L;
    for (Index i = 0; i < psi.size(); ++i) {
        mean_re += static_cast<long double>((std::conj(psi(i)) * xpsi(i)).real());
        norm2 += static_cast<long double>(std::norm(psi(i)));
    }
    const long double mean = mean_re / norm2;
    // |(X - <X>) psi| is non-negative by construction, unlike <X^2> - <X>^2.
    long double acc = 0.0L;
    for (Index i = 0; i < psi.size(); ++i) {
        const long double re = static_cast<long double>(xpsi(i).real()) - mean * static_cast<long double>(psi(i).real());
        const long double im = static_cast<long double>(xpsi(i).imag()) - mean * static_cast<long double>(psi(i).imag());
        acc += re * re + im * im;
    }
    return static_cast<double>(std::sqrt(acc / norm2));
}

namespace {
void close_report(BoundReport& r) {
    const Index n = r.angle.size();
    r.bound.resize(n);
    for (Index i = 0; i < n; ++i) {
        if (r.angle(i) > pi / 2) {
            r.vacuous = true;
            r.bound(i) = 0.0;
        } else {
            r.bound(i) = std::cos(r.angle(i));
        }
    }
    if (r.vacuous) r.warnings.push_back("accumulated angle exceeds pi/2; the bound is vacuous from there on");
}
}  // namespace

BoundReport qsl_continuous(const HamiltonianPath& h1, const HamiltonianPath& h2, const StateTrajectory& reference,
                           const StateTrajectory* other) {
    if (h1.dim != h2.dim) throw DimensionMismatch("qsl", "Hamiltonians act on different spaces");
    require_increasing(reference.grid, "qsl");
    if (reference.states.size() != reference.grid.size()) throw DimensionMismatch("qsl", "trajectory grid and states differ in length");
    if (other && other->grid != reference.grid) throw InvalidArgument("qsl", "trajectories must share a time grid");

    BoundReport r;
    r.grid = reference.grid;
    const std::size_t n = r.grid.size();
    std::vector<double> l(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = r.grid[i];
        l[i] = standard_deviation(h1(t) - h2(t), reference.states[i]);
    }
    const std::vector<double> a = cumulative_integral(r.grid, l);
    r.integrand = Eigen::Map<const RealVector>(l.data(), static_cast<Index>(n));
    r.angle = Eigen::Map<const RealVector>(a.data(), static_cast<Index>(n)) / hbar();
    close_report(r);
    if (other) {
        r.observed.resize(static_cast<Index>(n));
        for (std::size_t i = 0; i < n; ++i) r.observed(static_cast<Index>(i)) = std::abs(overlap(reference.states[i], other->states[i]));
    }
    return r;
}

BoundReport qsl_discrete(const std::vector<Matrix>& u_ref, const std::vector<Matrix>& u_other, const StateTrajectory& reference,
                         const TrotterPlan& plan) {
    plan.validate();
    const auto m = static_cast<std::size_t>(plan.M);
    if (u_ref.size() != m || u_other.size() != m) throw DimensionMismatch("qsl", "need one unitary per slice for both sequences");
    if (reference.states.size() != m + 1) throw DimensionMismatch("qsl", "reference trajectory must hold M + 1 states");

    BoundReport r;
    r.grid.resize(m + 1);
    r.integrand = RealVector::Zero(static_cast<Index>(m + 1));
    r.angle = RealVector::Zero(static_cast<Index>(m + 1));
    r.observed = RealVector::Ones(static_cast<Index>(m + 1));
    r.grid[0] = 0.0;
    Vector other = reference.states[0];
    double worst_excess = 0.0;
    for (std::size_t n = 1; n <= m; ++n) {
        const Vector& psi = reference.states[n];
        const cplx amp = overlap(psi, u_other[n - 1] * u_ref[n - 1].adjoint() * psi);
        double c = std::abs(amp);
        if (c > 1.0) {
            worst_excess = std::max(worst_excess, c - 1.0);
            c = 1.0;
        }
        const auto k = static_cast<Index>(n);
        r.grid[n] = static_cast<double>(n) * plan.dt();
        r.integrand(k) = std::acos(c);
        r.angle(k) = r.angle(k - 1) + r.integrand(k);
        other = u_other[n - 1] * other;
        r.observed(k) = std::abs(overlap(psi, other));
    }
    if (worst_excess > 1e-9) {
        std::ostringstream msg;
        msg << "overlap modulus exceeded 1 by " << worst_excess << " before clamping";
        r.warnings.push_back(msg.str());
    }
    close_report(r);
    return r;
}

}  // namespace sforge
