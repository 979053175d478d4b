// Variational nested-commutator route in selectable precision. The Hankel
// matrix B_kl = |O_{k+l}|^2 loses roughly four decimal digits per unit of
// K_tr, so orders beyond two are solved in binary floating point with 50 to
// 250 digits and only the assembled operator is rounded back to double.

#include <cmath>
#include <limits>
#include <sstream>
#include <variant>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "sforge/agp.hpp"

namespace bmp = boost::multiprecision;

namespace Eigen {
template <unsigned Digits>
struct NumTraits<bmp::number<bmp::cpp_bin_float<Digits>, bmp::et_off>>
    : GenericNumTraits<bmp::number<bmp::cpp_bin_float<Digits>, bmp::et_off>> {
    using Self = bmp::number<bmp::cpp_bin_float<Digits>, bmp::et_off>;
    using Real = Self;
    using NonInteger = Self;
    using Literal = Self;
    using Nested = Self;
    enum { IsComplex = 0, IsInteger = 0, IsSigned = 1, RequireInitialization = 1, ReadCost = 8, AddCost = 32, MulCost = 64 };
    static Self epsilon() { return std::numeric_limits<Self>::epsilon(); }
    static Self dummy_precision() { return 1000 * epsilon(); }
    static int digits10() { return std::numeric_limits<Self>::digits10; }
};
}  // namespace Eigen

namespace sforge {

using f50 = bmp::number<bmp::cpp_bin_float<50>, bmp::et_off>;
using f100 = bmp::number<bmp::cpp_bin_float<100>, bmp::et_off>;
using f250 = bmp::number<bmp::cpp_bin_float<250>, bmp::et_off>;

namespace {

template <class R>
using MatR = Eigen::Matrix<R, Eigen::Dynamic, Eigen::Dynamic>;
template <class R>
using VecR = Eigen::Matrix<R, Eigen::Dynamic, 1>;

template <class R>
struct CMat {
    MatR<R> re, im;
};

template <class R>
int digits10() {
    return std::numeric_limits<R>::digits10;
}

template <class R>
R rank_tolerance() {
    if constexpr (std::is_same_v<R, double>) return R(1e-12);
    else return bmp::pow(R(10), -(digits10<R>() - 10));
}

template <class R>
CMat<R> lift(const Matrix& m) {
    CMat<R> out{MatR<R>(m.rows(), m.cols()), MatR<R>(m.rows(), m.cols())};
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i) {
            out.re(i, j) = R(m(i, j).real());
            out.im(i, j) = R(m(i, j).imag());
        }
    return out;
}

template <class R>
Matrix lower(const CMat<R>& m, R factor_re, R factor_im) {
    // (factor_re + i factor_im) * m rounded to double.
    Matrix out(m.re.rows(), m.re.cols());
    for (Index j = 0; j < m.re.cols(); ++j)
        for (Index i = 0; i < m.re.rows(); ++i) {
            const R re = factor_re * m.re(i, j) - factor_im * m.im(i, j);
            const R im = factor_re * m.im(i, j) + factor_im * m.re(i, j);
            out(i, j) = cplx(static_cast<double>(re), static_cast<double>(im));
        }
    return out;
}

template <class R>
CMat<R> comm(const CMat<R>& a, const CMat<R>& b) {
    CMat<R> out;
    out.re = a.re * b.re - a.im * b.im - (b.re * a.re - b.im * a.im);
    out.im = a.re * b.im + a.im * b.re - (b.re * a.im + b.im * a.re);
    return out;
}

template <class R>
R fnorm(const CMat<R>& a) {
    using std::sqrt;
    return sqrt((a.re.squaredNorm() + a.im.squaredNorm()) / R(static_cast<double>(a.re.rows())));
}

template <class R>
struct VarData {
    std::vector<CMat<R>> odd;  // normalized O_{2k-1}
    std::vector<bool> odd_zero;
    MatR<R> B;
    VecR<R> u;
};

template <class R>
struct VarSolution {
    VecR<R> a;
};

template <class R>
VarData<R> build(const Matrix& h_d, const Matrix& dh_d, int k_tr, std::vector<double>& log_norms) {
    using std::exp;
    using std::log;
    const CMat<R> h = lift<R>(h_d);
    const int top = 2 * k_tr;
    std::vector<CMat<R>> ops(static_cast<std::size_t>(top + 1));
    std::vector<R> ell(static_cast<std::size_t>(top + 1));
    std::vector<bool> zero(static_cast<std::size_t>(top + 1), false);
    const R ninf = -std::numeric_limits<R>::infinity();

    CMat<R> o = lift<R>(dh_d);
    const R n0 = fnorm(o);
    const R hscale = fnorm(h) + R(1e-300);
    const R vanish = (std::is_same_v<R, double> ? R(1e-13) : rank_tolerance<R>()) * hscale;
    if (n0 == R(0)) {
        for (int k = 0; k <= top; ++k) zero[static_cast<std::size_t>(k)] = true;
    } else {
        ops[0] = {o.re / n0, o.im / n0};
        ell[0] = log(n0);
        for (int k = 1; k <= top; ++k) {
            if (zero[static_cast<std::size_t>(k - 1)]) {
                zero[static_cast<std::size_t>(k)] = true;
                continue;
            }
            CMat<R> x = comm(h, ops[static_cast<std::size_t>(k - 1)]);
            const R r = fnorm(x);
            if (r <= vanish) {
                zero[static_cast<std::size_t>(k)] = true;
                continue;
            }
            ops[static_cast<std::size_t>(k)] = {x.re / r, x.im / r};
            ell[static_cast<std::size_t>(k)] = ell[static_cast<std::size_t>(k - 1)] + log(r);
        }
    }
    log_norms.assign(static_cast<std::size_t>(top + 1), -std::numeric_limits<double>::infinity());
    for (int k = 0; k <= top; ++k) {
        if (zero[static_cast<std::size_t>(k)]) ell[static_cast<std::size_t>(k)] = ninf;
        else log_norms[static_cast<std::size_t>(k)] = static_cast<double>(ell[static_cast<std::size_t>(k)]);
    }

    VarData<R> out;
    out.B = MatR<R>::Zero(k_tr, k_tr);
    out.u = VecR<R>::Zero(k_tr);
    for (int k = 1; k <= k_tr; ++k) {
        const std::size_t bk = static_cast<std::size_t>(2 * k - 1);
        out.odd.push_back(ops[bk]);
        out.odd_zero.push_back(zero[bk]);
        if (zero[bk]) continue;
        if (!zero[static_cast<std::size_t>(k)])
            out.u(k - 1) = -exp(R(2) * ell[static_cast<std::size_t>(k)] - ell[bk]);
        for (int l = 1; l <= k_tr; ++l) {
            const std::size_t bl = static_cast<std::size_t>(2 * l - 1);
            const std::size_t kl = static_cast<std::size_t>(k + l);
            if (zero[bl] || zero[kl]) continue;
            out.B(k - 1, l - 1) = exp(R(2) * ell[kl] - ell[bk] - ell[bl]);
        }
    }
    return out;
}

template <class R>
VecR<R> pinv_solve(const MatR<R>& b, const VecR<R>& u, Index& rank) {
    using std::abs;
    Eigen::SelfAdjointEigenSolver<MatR<R>> es(b);
    const VecR<R> lam = es.eigenvalues();
    R top(0);
    for (Index i = 0; i < lam.size(); ++i) top = std::max<R>(top, abs(lam(i)));
    const R thr = rank_tolerance<R>() * top;
    VecR<R> proj = es.eigenvectors().transpose() * u;
    rank = 0;
    for (Index i = 0; i < lam.size(); ++i) {
        if (lam(i) > thr && top > R(0)) {
            proj(i) /= lam(i);
            ++rank;
        } else {
            proj(i) = R(0);
        }
    }
    return es.eigenvectors() * proj;
}

Precision resolve(Precision p, int k_tr) {
    if (p != Precision::automatic) return p;
    if (k_tr <= 2) return Precision::double_precision;
    const int needed = 5 * k_tr + 10;
    if (needed <= 50) return Precision::digits50;
    if (needed <= 100) return Precision::digits100;
    return Precision::digits250;
}

}  // namespace

struct ExtendedSystem {
    std::variant<VarData<double>, VarData<f50>, VarData<f100>, VarData<f250>> data;
};

struct ExtendedSolution {
    std::variant<VarSolution<double>, VarSolution<f50>, VarSolution<f100>, VarSolution<f250>> data;
};

namespace {
template <class R>
LinearCDSystem finish(VarData<R> d, const std::vector<double>& log_norms, int k_tr) {
    LinearCDSystem sys;
    sys.method = CDMethod::variational_nc;
    sys.B.resize(k_tr, k_tr);
    sys.u.resize(k_tr);
    sys.scale.resize(k_tr);
    for (int k = 0; k < k_tr; ++k) {
        sys.u(k) = static_cast<double>(d.u(k));
        for (int l = 0; l < k_tr; ++l) sys.B(k, l) = static_cast<double>(d.B(k, l));
        const double ln = log_norms[static_cast<std::size_t>(2 * k + 1)];
        sys.scale(k) = std::isfinite(ln) ? std::exp(ln) : 0.0;
        const std::size_t ks = static_cast<std::size_t>(k);
        if (d.odd_zero[ks]) sys.basis_ops.push_back(Matrix());
        else sys.basis_ops.push_back(lower(d.odd[ks], R(0), R(hbar())));
    }
    auto ext = std::make_shared<ExtendedSystem>();
    ext->data = std::move(d);
    sys.extended = std::move(ext);
    return sys;
}
}  // namespace

LinearCDSystem variational_system(const Matrix& h, const Matrix& dh, int k_tr, const VariationalOptions& options) {
    require_same_dim(h, dh, "agp-solvers");
    if (k_tr < 1) throw InvalidArgument("agp-solvers", "K_tr must be at least 1");
    std::vector<double> log_norms;
    LinearCDSystem sys;
    switch (resolve(options.precision, k_tr)) {
    case Precision::double_precision: sys = finish(build<double>(h, dh, k_tr, log_norms), log_norms, k_tr); break;
    case Precision::digits50: sys = finish(build<f50>(h, dh, k_tr, log_norms), log_norms, k_tr); break;
    case Precision::digits100: sys = finish(build<f100>(h, dh, k_tr, log_norms), log_norms, k_tr); break;
    default: sys = finish(build<f250>(h, dh, k_tr, log_norms), log_norms, k_tr); break;
    }
    for (std::size_t k = 0; k < log_norms.size(); ++k) {
        if (log_norms[k] > std::log(1e150)) {
            std::ostringstream msg;
            msg << "nested commutator norm exceeds 1e150 at order " << k
                << "; rescale energy and time units so that the spectral width of H is O(1)";
            throw NumericalError("agp-solvers", msg.str());
        }
    }
    // Zero placeholders carry the right shape.
    for (auto& op : sys.basis_ops)
        if (op.size() == 0) op = Matrix::Zero(h.rows(), h.cols());
    return sys;
}

RealVector unscaled_coefficients(const LinearCDSystem& system, const CDCoefficients& coeffs) {
    RealVector a = coeffs.a;
    if (system.scale.size() != a.size()) return a;
    for (Index k = 0; k < a.size(); ++k) a(k) = system.scale(k) > 0.0 ? a(k) / system.scale(k) : 0.0;
    return a;
}

namespace detail {

bool solve_extended(const LinearCDSystem& system, CDCoefficients& out) {
    if (!system.extended) return false;
    std::visit(
        [&](const auto& d) {
            using R = typename std::decay_t<decltype(d.B)>::Scalar;
            Index rank = 0;
            VarSolution<R> sol{pinv_solve<R>(d.B, d.u, rank)};
            out.a.resize(sol.a.size());
            for (Index k = 0; k < sol.a.size(); ++k) out.a(k) = static_cast<double>(sol.a(k));
            out.rank = rank;
            out.rank_deficient = rank < sol.a.size();
            auto ext = std::make_shared<ExtendedSolution>();
            ext->data = std::move(sol);
            out.extended = std::move(ext);
        },
        system.extended->data);
    return true;
}

bool assemble_extended(const LinearCDSystem& system, const CDCoefficients& coeffs, Matrix& out) {
    if (!system.extended || !coeffs.extended) return false;
    bool ok = false;
    std::visit(
        [&](const auto& d) {
            using R = typename std::decay_t<decltype(d.B)>::Scalar;
            const auto* sol = std::get_if<VarSolution<R>>(&coeffs.extended->data);
            if (!sol || sol->a.size() != static_cast<Index>(d.odd.size())) return;
            const Index dim = system.basis_ops.empty() ? 0 : system.basis_ops.front().rows();
            CMat<R> acc{MatR<R>::Zero(dim, dim), MatR<R>::Zero(dim, dim)};
            for (std::size_t k = 0; k < d.odd.size(); ++k) {
                if (d.odd_zero[k]) continue;
                acc.re += sol->a(static_cast<Index>(k)) * d.odd[k].re;
                acc.im += sol->a(static_cast<Index>(k)) * d.odd[k].im;
            }
            out = lower(acc, R(0), R(hbar()));
            ok = true;
        },
        system.extended->data);
    return ok;
}

}  // namespace detail

}  // namespace sforge
