#include "sforge/fastforward.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sforge/operator.hpp"
#include "sforge/spectral.hpp"

namespace sforge {

TimeRescaling TimeRescaling::identity(double duration) { return uniform(1.0, duration); }

TimeRescaling TimeRescaling::uniform(double rate, double duration) {
    if (!(rate > 0.0) || !(duration > 0.0)) throw InvalidArgument("fast-forward", "uniform rescaling needs positive rate and duration");
    TimeRescaling r;
    r.duration = duration;
    r.s = [rate](double t) { return rate * t; };
    r.rate = [rate](double) { return rate; };
    r.accel = [](double) { return 0.0; };
    return r;
}

TimeRescaling TimeRescaling::modulated(double s_end, double duration, double amplitude) {
    if (!(s_end > 0.0) || !(duration > 0.0)) throw InvalidArgument("fast-forward", "rescaling needs positive end time and duration");
    if (std::abs(amplitude) >= 1.0) throw InvalidArgument("fast-forward", "modulation amplitude must stay below 1 for monotonicity");
    TimeRescaling r;
    r.duration = duration;
    const double k = s_end / duration;
    r.s = [=](double t) {
        const double u = t / duration;
        return s_end * (u + amplitude * std::sin(2 * pi * u) / (2 * pi));
    };
    r.rate = [=](double t) { return k * (1.0 + amplitude * std::cos(2 * pi * t / duration)); };
    r.accel = [=](double t) { return -k * amplitude * 2 * pi / duration * std::sin(2 * pi * t / duration); };
    r.validate();
    return r;
}

void TimeRescaling::validate(int samples) const {
    if (!s || !rate || !accel) throw InvalidArgument("fast-forward", "time rescaling needs s, ds/dt and d^2s/dt^2");
    if (std::abs(s(0.0)) > 1e-12) throw InvalidArgument("fast-forward", "time rescaling must start at s(0) = 0");
    for (int k = 1; k < samples; ++k) {
        const double t = duration * k / samples;
        if (!(rate(t) > 0.0)) {
            std::ostringstream msg;
            msg << "time rescaling is not monotone (ds/dt = " << rate(t) << " at t=" << t << ")";
            throw InvalidArgument("fast-forward", msg.str());
        }
    }
}

FFGauge FFGauge::computational(Index dim, std::function<RealVector(double)> phases) {
    FFGauge g;
    g.basis = [dim](double) { return Matrix(Matrix::Identity(dim, dim)); };
    g.phases = std::move(phases);
    return g;
}

Matrix FFGauge::unitary(double t) const {
    const Matrix v = basis(t);
    const RealVector f = phases(t);
    if (f.size() != v.cols()) throw DimensionMismatch("fast-forward", "one phase per projector required");
    Vector d(f.size());
    for (Index k = 0; k < f.size(); ++k) d(k) = std::exp(cplx(0.0, -f(k)));
    // Projectors that do not sum to one leave the complement untouched.
    return Matrix::Identity(v.rows(), v.rows()) + v * (d.array() - 1.0).matrix().asDiagonal() * v.adjoint();
}

namespace {
void require_resolution_of_identity(const Matrix& v) {
    if ((v * v.adjoint() - Matrix::Identity(v.rows(), v.rows())).cwiseAbs().maxCoeff() > 1e-10)
        throw InvalidArgument("fast-forward", "gauge projectors must be orthonormal and sum to the identity");
}
}  // namespace

HermitianOperator ff_hamiltonian(const HamiltonianPath& h_of_s, const FFGauge& gauge, const TimeRescaling& r, double t) {
    require_resolution_of_identity(gauge.basis(t));
    const Matrix u = gauge.unitary(t);
    const double e = gauge.fd_step;
    const Matrix du = (gauge.unitary(t - 2 * e) - 8.0 * gauge.unitary(t - e) + 8.0 * gauge.unitary(t + e) - gauge.unitary(t + 2 * e)) / (12.0 * e);
    const Matrix h = r.rate(t) * u * h_of_s(r.s(t)) * u.adjoint() + I * hbar() * du * u.adjoint();
    return HermitianOperator(0.5 * (h + h.adjoint()));
}

HamiltonianPath ff_hamiltonian_path(const HamiltonianPath& h_of_s, const FFGauge& gauge, const TimeRescaling& r) {
    r.validate();
    HamiltonianPath out;
    out.dim = h_of_s.dim;
    out.value = [h_of_s, gauge, r](double t) { return ff_hamiltonian(h_of_s, gauge, r, t).matrix(); };
    return out;
}

HamiltonianPath ff_of_cd(const HamiltonianPath& h_of_s, const TimeRescaling& r, HamiltonianPath cd_of_s) {
    r.validate();
    if (!cd_of_s.value) cd_of_s = exact_cd_path(h_of_s);
    HamiltonianPath out;
    out.dim = h_of_s.dim;
    out.value = [h_of_s, cd_of_s, r](double t) {
        const double s = r.s(t);
        return Matrix(h_of_s(s) + r.rate(t) * cd_of_s(s));
    };
    return out;
}

namespace {
constexpr double gl_nodes[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640};
constexpr double gl_weights[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665, 0.2369268850561891};
}  // namespace

AdiabaticPhaseTable::AdiabaticPhaseTable(const HamiltonianPath& h_of_s, const TimeRescaling& r, std::size_t intervals)
    : h_(h_of_s), r_(r) {
    if (intervals < 1) throw InvalidArgument("fast-forward", "phase table needs at least one interval");
    const double w = r.duration / static_cast<double>(intervals);
    RealVector acc = RealVector::Zero(h_of_s.dim);
    for (std::size_t k = 0; k <= intervals; ++k) {
        const double t = w * static_cast<double>(k);
        if (k > 0) {
            const double mid = t - 0.5 * w;
            for (int q = 0; q < 5; ++q) acc += (0.5 * w * gl_weights[q]) * rate(mid + 0.5 * w * gl_nodes[q]);
        }
        nodes_.push_back(t);
        values_.push_back(acc);
        rates_.push_back(rate(t));
    }
}

RealVector AdiabaticPhaseTable::rate(double t) const {
    const EigenFrame f = eigen_frame(h_(r_.s(t)));
    return (1.0 - r_.rate(t)) * f.energies / hbar();
}

RealVector AdiabaticPhaseTable::operator()(double t) const {
    const std::size_t n = nodes_.size() - 1;
    const double w = nodes_[1] - nodes_[0];
    const std::size_t k = std::min<std::size_t>(n - 1, static_cast<std::size_t>(std::max(0.0, std::floor(t / w))));
    const double u = (t - nodes_[k]) / w;
    // Cubic Hermite basis on [t_k, t_{k+1}].
    const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
    const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
    return h00 * values_[k] + (h10 * w) * rates_[k] + h01 * values_[k + 1] + (h11 * w) * rates_[k + 1];
}

HermitianOperator ff_nonadiabatic_term(const Matrix& h_s, const Matrix& dh_ds, const RealVector& phases, double eps_gap_rel) {
    require_same_dim(h_s, dh_ds, "fast-forward");
    const EigenFrame f = eigen_frame(h_s);
    if (phases.size() != f.energies.size()) throw DimensionMismatch("fast-forward", "one phase per level required");
    require_gaps(f.energies, eps_gap_rel, "fast-forward");
    const Matrix m = f.vectors.adjoint() * dh_ds * f.vectors;
    const double hb = hbar();
    const Index d = f.energies.size();
    Matrix c = Matrix::Zero(d, d);
    for (Index a = 0; a < d; ++a)
        for (Index b = a + 1; b < d; ++b) {
            // <a|d_s b> = <a|dH|b>/(E_b - E_a)
            c(a, b) = -I * hb * std::exp(cplx(0.0, -(phases(a) - phases(b)))) * m(a, b) / (f.energies(b) - f.energies(a));
            c(b, a) = std::conj(c(a, b));
        }
    const Matrix out = f.vectors * c * f.vectors.adjoint();
    return HermitianOperator(0.5 * (out + out.adjoint()));
}

HamiltonianPath ff_nonadiabatic_path(const HamiltonianPath& h_of_s, const TimeRescaling& r, bool include_nad, std::size_t table_intervals) {
    r.validate();
    std::shared_ptr<const AdiabaticPhaseTable> table;
    if (include_nad) table = std::make_shared<AdiabaticPhaseTable>(h_of_s, r, table_intervals);
    HamiltonianPath out;
    out.dim = h_of_s.dim;
    out.value = [h_of_s, r, table](double t) {
        const double s = r.s(t);
        const Matrix h = h_of_s(s), dh = h_of_s.derivative(s);
        Matrix extra = exact_cd(h, dh).matrix();
        if (table) extra += ff_nonadiabatic_term(h, dh, (*table)(t)).matrix();
        return Matrix(h + r.rate(t) * extra);
    };
    return out;
}

HamiltonianPath regularized_hamiltonian(const ParametricHamiltonian& h, const RealVector& lambda0, const RealVector& epsilon) {
    return ff_regularized(h, lambda0, epsilon, TimeRescaling::identity(1.0));
}

HamiltonianPath ff_regularized(const ParametricHamiltonian& h, const RealVector& lambda0, const RealVector& epsilon, const TimeRescaling& r) {
    if (lambda0.size() != h.n_params || epsilon.size() != h.n_params)
        throw DimensionMismatch("fast-forward", "lambda0 and epsilon must have one entry per parameter");
    HamiltonianPath out;
    out.dim = h.dim;
    out.value = [h, lambda0, epsilon, r](double t) {
        const RealVector lam = lambda0 + epsilon * r.s(t);
        Matrix m = h.value(lam);
        for (Index i = 0; i < h.n_params; ++i)
            if (epsilon(i) != 0.0) m += r.rate(t) * epsilon(i) * adiabatic_gauge_potential(h, lam, i).matrix();
        return m;
    };
    return out;
}

}  // namespace sforge
