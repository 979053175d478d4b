#include "sforge/grid1d.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/FFT>

#include "sforge/quadrature.hpp"

namespace sforge {

RealVector Grid1D::points() const {
    RealVector x(n);
    for (Index i = 0; i < n; ++i) x(i) = x_min + dx() * static_cast<double>(i);
    return x;
}

RealVector Grid1D::wavenumbers() const {
    RealVector k(n);
    const double base = 2 * pi / length;
    for (Index i = 0; i < n; ++i) k(i) = base * static_cast<double>(i < (n + 1) / 2 ? i : i - n);
    return k;
}

RealVector GridSystem::r(double t) const {
    RealVector v = amplitude(t);
    if (v.size() != grid.n) throw DimensionMismatch("fast-forward", "amplitude samples do not match the grid");
    if (v.minCoeff() < 0.0) throw InvalidArgument("fast-forward", "amplitude must be non-negative");
    return v;
}

RealVector GridSystem::r_dot(double t) const {
    if (amplitude_rate) return amplitude_rate(t);
    const double h = fd_step;
    return (amplitude(t - 2 * h) - 8.0 * amplitude(t - h) + 8.0 * amplitude(t + h) - amplitude(t + 2 * h)) / (12.0 * h);
}

namespace {

using CVec = std::vector<cplx>;

CVec forward(const RealVector& f) {
    Eigen::FFT<double> fft;
    CVec in(f.data(), f.data() + f.size()), out;
    fft.fwd(out, in);
    return out;
}

RealVector inverse_real(const CVec& spec) {
    Eigen::FFT<double> fft;
    CVec out;
    fft.inv(out, spec);
    RealVector r(static_cast<Index>(out.size()));
    for (std::size_t i = 0; i < out.size(); ++i) r(static_cast<Index>(i)) = out[i].real();
    return r;
}

// Zero-mean part integrated spectrally, pinned to zero at x_min.
RealVector periodic_antiderivative(const Grid1D& g, const RealVector& f) {
    CVec s = forward(f);
    const RealVector k = g.wavenumbers();
    s[0] = 0.0;
    for (Index i = 1; i < g.n; ++i) s[static_cast<std::size_t>(i)] /= cplx(0.0, k(i));
    if (g.n % 2 == 0) s[static_cast<std::size_t>(g.n / 2)] = 0.0;
    RealVector a = inverse_real(s);
    return a.array() - a(0);
}

// Values outside `trusted` are filled from the nearest trusted neighbours:
// linear interpolation across interior gaps, linear or constant extrapolation in the tails.
RealVector fill_untrusted(const RealVector& v, const Eigen::Array<bool, Eigen::Dynamic, 1>& trusted, bool linear_tails) {
    const Index n = v.size();
    std::vector<Index> left(static_cast<std::size_t>(n), -1), right(static_cast<std::size_t>(n), -1);
    for (Index i = 0, last = -1; i < n; ++i) {
        if (trusted(i)) last = i;
        left[static_cast<std::size_t>(i)] = last;
    }
    for (Index i = n - 1, last = -1; i >= 0; --i) {
        if (trusted(i)) last = i;
        right[static_cast<std::size_t>(i)] = last;
    }
    RealVector out = v;
    for (Index i = 0; i < n; ++i) {
        if (trusted(i)) continue;
        const Index a = left[static_cast<std::size_t>(i)], b = right[static_cast<std::size_t>(i)];
        if (a < 0 && b < 0) throw NumericalError("fast-forward", "amplitude is below r_floor everywhere");
        if (a >= 0 && b >= 0) {
            const double w = static_cast<double>(i - a) / static_cast<double>(b - a);
            out(i) = (1 - w) * v(a) + w * v(b);
        } else if (a >= 0) {
            const double slope = (linear_tails && a > 0 && trusted(a - 1)) ? v(a) - v(a - 1) : 0.0;
            out(i) = v(a) + slope * static_cast<double>(i - a);
        } else {
            const double slope = (linear_tails && b + 1 < n && trusted(b + 1)) ? v(b + 1) - v(b) : 0.0;
            out(i) = v(b) - slope * static_cast<double>(b - i);
        }
    }
    return out;
}

struct Fields {
    PhaseProfile phase;
    RealVector r, r_dot, rho;
    Eigen::Array<bool, Eigen::Dynamic, 1> trusted;
};

// Division by r is trusted only well above the spectral round-off of r.
constexpr double trust_rel = 1e-5;

Fields fields_at(const GridSystem& sys, double t) {
    Fields f;
    f.r = sys.r(t);
    f.r_dot = sys.r_dot(t);
    f.rho = f.r.array().square();
    const double hb = hbar();
    const double rmax = f.r.maxCoeff();
    f.trusted = f.r.array() >= std::max(sys.r_floor, trust_rel * rmax);

    PhaseProfile& p = f.phase;
    const RealVector rho_dot = 2.0 * f.r.cwiseProduct(f.r_dot);
    p.flux = -(sys.mass / hb) * periodic_antiderivative(sys.grid, rho_dot);
    const double jmax = p.flux.cwiseAbs().maxCoeff();
    double stray = 0.0;
    for (Index i = 0; i < f.r.size(); ++i)
        if (f.r(i) < sys.r_floor) stray = std::max(stray, std::abs(p.flux(i)));
    p.stray_flux = jmax > 0.0 ? stray / jmax : 0.0;
    p.ill_conditioned = p.stray_flux > 1e-8;

    RealVector grad = RealVector::Zero(f.r.size());
    for (Index i = 0; i < f.r.size(); ++i)
        if (f.trusted(i)) grad(i) = p.flux(i) / f.rho(i);
    p.gradient = fill_untrusted(grad, f.trusted, true);
    const RealVector x = sys.grid.points();
    const std::vector<double> xs(x.data(), x.data() + x.size());
    const std::vector<double> gs(p.gradient.data(), p.gradient.data() + p.gradient.size());
    const std::vector<double> th = cumulative_integral(xs, gs);
    p.theta = Eigen::Map<const RealVector>(th.data(), static_cast<Index>(th.size()));
    return f;
}

RealVector theta_rate(const GridSystem& sys, double t) {
    const double h = 10.0 * sys.fd_step;
    auto th = [&](double tt) { return fields_at(sys, tt).phase.theta; };
    return (th(t - 2 * h) - 8.0 * th(t - h) + 8.0 * th(t + h) - th(t + 2 * h)) / (12.0 * h);
}

}  // namespace

RealVector spectral_derivative(const Grid1D& grid, const RealVector& f, int order) {
    if (f.size() != grid.n) throw DimensionMismatch("fast-forward", "samples do not match the grid");
    CVec s = forward(f);
    const RealVector k = grid.wavenumbers();
    for (Index i = 0; i < grid.n; ++i) s[static_cast<std::size_t>(i)] *= std::pow(cplx(0.0, k(i)), order);
    if (order % 2 == 1 && grid.n % 2 == 0) s[static_cast<std::size_t>(grid.n / 2)] = 0.0;
    return inverse_real(s);
}

PhaseProfile phase_from_continuity(const GridSystem& system, double t) { return fields_at(system, t).phase; }

namespace {
Potentials potentials(const GridSystem& sys, const Fields& f, const RealVector& th_t) {
    const double hb = hbar(), m = sys.mass;
    const RealVector q = spectral_derivative(sys.grid, f.r, 2);
    const RealVector dj = spectral_derivative(sys.grid, f.rho.cwiseProduct(f.phase.gradient), 1);
    Potentials out;
    out.support = f.trusted;
    out.re = RealVector::Zero(f.r.size());
    out.im = RealVector::Zero(f.r.size());
    for (Index i = 0; i < f.r.size(); ++i) {
        if (!f.trusted(i)) continue;
        const double g = f.phase.gradient(i);
        out.re(i) = -hb * th_t(i) + hb * hb / (2 * m) * (q(i) / f.r(i) - g * g);
        out.im(i) = hb * f.r_dot(i) / f.r(i) + hb * hb / (2 * m) * dj(i) / f.rho(i);
    }
    out.re = fill_untrusted(out.re, f.trusted, false);
    return out;
}
}  // namespace

Potentials potentials_from_wavefunction(const GridSystem& system, double t) {
    const Fields f = fields_at(system, t);
    return potentials(system, f, theta_rate(system, t));
}

RealVector ff_potential(const GridSystem& system, const TimeRescaling& rescale, double t) {
    const double s = rescale.s(t), rate = rescale.rate(t), acc = rescale.accel(t);
    const Fields f = fields_at(system, s);
    const RealVector th_s = theta_rate(system, s);
    const Potentials p = potentials(system, f, th_s);
    const double hb = hbar();
    const double k2 = rate * rate - 1.0;
    RealVector v = p.re - hb * acc * f.phase.theta - hb * k2 * th_s -
                   (hb * hb / (2 * system.mass) * k2) * f.phase.gradient.cwiseAbs2();
    for (Index i = 0; i < v.size(); ++i)
        if (!f.trusted(i)) v(i) = 0.0;
    return fill_untrusted(v, f.trusted, false);
}

Vector ff_initial_state(const GridSystem& system, const TimeRescaling& rescale) {
    const double s0 = rescale.s(0.0);
    const Fields f = fields_at(system, s0);
    const double k = rescale.rate(0.0);
    Vector psi(f.r.size());
    for (Index i = 0; i < psi.size(); ++i) psi(i) = f.r(i) * std::exp(cplx(0.0, k * f.phase.theta(i)));
    return psi;
}

Vector split_step_evolve(const Grid1D& grid, double mass, const std::function<RealVector(double)>& potential, Vector psi, double t0,
                         double t1, int steps) {
    if (steps < 1) throw InvalidArgument("fast-forward", "split-step needs at least one step");
    if (psi.size() != grid.n) throw DimensionMismatch("fast-forward", "state does not match the grid");
    const double hb = hbar();
    const double dt = (t1 - t0) / steps;
    const RealVector k = grid.wavenumbers();
    CVec kinetic(static_cast<std::size_t>(grid.n));
    for (Index i = 0; i < grid.n; ++i) kinetic[static_cast<std::size_t>(i)] = std::exp(cplx(0.0, -hb * k(i) * k(i) * dt / (2 * mass)));
    Eigen::FFT<double> fft;
    CVec buf(psi.data(), psi.data() + psi.size()), spec;
    for (int n = 0; n < steps; ++n) {
        const RealVector v = potential(t0 + (n + 0.5) * dt);
        if (v.size() != grid.n) throw DimensionMismatch("fast-forward", "potential samples do not match the grid");
        for (Index i = 0; i < grid.n; ++i) buf[static_cast<std::size_t>(i)] *= std::exp(cplx(0.0, -0.5 * v(i) * dt / hb));
        fft.fwd(spec, buf);
        for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= kinetic[i];
        fft.inv(buf, spec);
        for (Index i = 0; i < grid.n; ++i) buf[static_cast<std::size_t>(i)] *= std::exp(cplx(0.0, -0.5 * v(i) * dt / hb));
    }
    return Eigen::Map<const Vector>(buf.data(), grid.n);
}

double density_l2_distance(const Grid1D& grid, const Vector& psi, const RealVector& rho) {
    if (psi.size() != grid.n || rho.size() != grid.n) throw DimensionMismatch("fast-forward", "samples do not match the grid");
    return std::sqrt((psi.cwiseAbs2() - rho).squaredNorm() * grid.dx());
}

}  // namespace sforge
