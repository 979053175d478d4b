#include "sforge/core.hpp"

#include <atomic>
#include <cmath>
#include <sstream>

namespace sforge {

namespace {
std::atomic<double> g_hbar{1.0};
}

double hbar() { return g_hbar.load(std::memory_order_relaxed); }

void set_hbar(double value) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw InvalidArgument("core", "hbar must be positive and finite");
    }
    g_hbar.store(value, std::memory_order_relaxed);
}

void require_same_dim(const Matrix& a, const Matrix& b, const char* module) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
        std::ostringstream msg;
        msg << "dimension mismatch (" << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x" << b.cols() << ")";
        throw DimensionMismatch(module, msg.str());
    }
}

HermitianOperator::HermitianOperator(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw DimensionMismatch("operator-core", "operator must be square");
    if (m_.rows() < 2) throw InvalidArgument("operator-core", "operator dimension must be at least 2");
    const double scale = m_.cwiseAbs().maxCoeff();
    const double defect = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
    if (defect > 1e-12 * scale) {
        std::ostringstream msg;
        msg << "matrix is not Hermitian (max |H - H^dagger| = " << defect << ", max |entry| = " << scale << ")";
        throw InvalidArgument("operator-core", msg.str());
    }
}

Ket::Ket(Vector v) : v_(std::move(v)) {
    if (v_.size() < 1) throw InvalidArgument("operator-core", "empty ket");
    if (std::abs(v_.norm() - 1.0) > norm_tolerance) {
        std::ostringstream msg;
        msg << "ket is not normalized (norm = " << v_.norm() << ")";
        throw InvalidArgument("operator-core", msg.str());
    }
}

Ket Ket::normalized(Vector v) {
    const double n = v.norm();
    if (n == 0.0) throw InvalidArgument("operator-core", "cannot normalize the zero vector");
    return Ket(v / n);
}

Matrix pauli_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}
Matrix pauli_y() {
    Matrix m(2, 2);
    m << 0, -I, I, 0;
    return m;
}
Matrix pauli_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

Matrix HamiltonianPath::derivative(double t) const {
    if (rate) return rate(t);
    const double h = fd_step * std::max(1.0, std::abs(t));
    return (value(t - 2 * h) - 8.0 * value(t - h) + 8.0 * value(t + h) - value(t + 2 * h)) / (12.0 * h);
}

HamiltonianPath operator+(const HamiltonianPath& a, const HamiltonianPath& b) {
    if (a.dim != b.dim) throw DimensionMismatch("core", "cannot add Hamiltonian paths of different dimension");
    HamiltonianPath out;
    out.dim = a.dim;
    out.fd_step = std::min(a.fd_step, b.fd_step);
    out.value = [a, b](double t) -> Matrix { return a.value(t) + b.value(t); };
    out.rate = [a, b](double t) -> Matrix { return a.derivative(t) + b.derivative(t); };
    return out;
}

HamiltonianPath scaled(const HamiltonianPath& a, double factor) {
    HamiltonianPath out;
    out.dim = a.dim;
    out.fd_step = a.fd_step;
    out.value = [a, factor](double t) -> Matrix { return factor * a.value(t); };
    out.rate = [a, factor](double t) -> Matrix { return factor * a.derivative(t); };
    return out;
}

HamiltonianPath constant_path(const Matrix& h) {
    HamiltonianPath out;
    out.dim = h.rows();
    out.value = [h](double) { return h; };
    out.rate = [h](double) -> Matrix { return Matrix::Zero(h.rows(), h.cols()); };
    return out;
}

ParamSchedule::ParamSchedule(double duration, Fn lambda, Fn dlambda)
    : duration_(duration), lambda_(std::move(lambda)), dlambda_(std::move(dlambda)) {
    if (!(duration > 0.0)) throw InvalidArgument("core", "schedule duration must be positive");
    if (!lambda_) throw InvalidArgument("core", "schedule needs a lambda function");
}

RealVector ParamSchedule::dlambda(double t) const {
    if (dlambda_) return dlambda_(t);
    const double h = 1e-5 * std::max(1.0, duration_);
    return (lambda_(t - 2 * h) - 8.0 * lambda_(t - h) + 8.0 * lambda_(t + h) - lambda_(t + 2 * h)) / (12.0 * h);
}

namespace {
RealVector scalar(double v) {
    RealVector r(1);
    r(0) = v;
    return r;
}
}  // namespace

ParamSchedule ParamSchedule::linear(double from, double to, double duration) {
    const double rate = (to - from) / duration;
    return ParamSchedule(
        duration, [=](double t) { return scalar(from + rate * t); }, [=](double) { return scalar(rate); });
}

ParamSchedule ParamSchedule::smooth(double from, double to, double duration) {
    const double span = to - from;
    return ParamSchedule(
        duration,
        [=](double t) {
            const double tau = t / duration;
            return scalar(from + span * (tau - std::sin(2 * pi * tau) / (2 * pi)));
        },
        [=](double t) {
            const double tau = t / duration;
            return scalar(span * (1.0 - std::cos(2 * pi * tau)) / duration);
        });
}

ParamSchedule ParamSchedule::smoothstep(double from, double to, double duration) {
    const double span = to - from;
    return ParamSchedule(
        duration,
        [=](double t) {
            const double u = t / duration;
            return scalar(from + span * u * u * u * (10.0 - 15.0 * u + 6.0 * u * u));
        },
        [=](double t) {
            const double u = t / duration;
            return scalar(span * 30.0 * u * u * (1.0 - u) * (1.0 - u) / duration);
        });
}

ParamSchedule ParamSchedule::cubic(double from, double to, double duration) {
    const double span = to - from;
    return ParamSchedule(
        duration,
        [=](double t) {
            const double u = t / duration;
            return scalar(from + span * u * u * (3.0 - 2.0 * u));
        },
        [=](double t) {
            const double u = t / duration;
            return scalar(span * 6.0 * u * (1.0 - u) / duration);
        });
}

HamiltonianPath along(const ParametricHamiltonian& h, const ParamSchedule& schedule) {
    HamiltonianPath out;
    out.dim = h.dim;
    out.value = [h, schedule](double t) { return h.value(schedule.lambda(t)); };
    out.rate = [h, schedule](double t) {
        const RealVector lam = schedule.lambda(t);
        const RealVector rate = schedule.dlambda(t);
        Matrix d = Matrix::Zero(h.dim, h.dim);
        for (Index i = 0; i < h.n_params; ++i) {
            if (rate(i) != 0.0) d += rate(i) * h.partial(lam, i);
        }
        return d;
    };
    return out;
}

std::vector<double> uniform_grid(double t0, double t1, std::size_t points) {
    if (points < 2) throw InvalidArgument("core", "grid needs at least two points");
    std::vector<double> g(points);
    const double n = static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) g[i] = t0 + (t1 - t0) * (static_cast<double>(i) / n);
    g.back() = t1;
    return g;
}

void require_increasing(const std::vector<double>& grid, const char* module) {
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw InvalidArgument(module, "time grid must be strictly increasing");
    }
}

double spectral_norm_hermitian(const Matrix& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace sforge
