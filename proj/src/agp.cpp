#include "sforge/agp.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "sforge/spectral.hpp"

namespace sforge {

namespace detail {
bool solve_extended(const LinearCDSystem& system, CDCoefficients& out);
bool assemble_extended(const LinearCDSystem& system, const CDCoefficients& coeffs, Matrix& out);
}  // namespace detail

std::string to_string(CDMethod m) {
    switch (m) {
    case CDMethod::variational_nc: return "variational_nc";
    case CDMethod::algebraic: return "algebraic";
    case CDMethod::krylov: return "krylov";
    }
    return "unknown";
}

LinearCDSystem algebraic_system(const Matrix& h, const Matrix& dh, const OperatorBasis& trial) {
    require_same_dim(h, dh, "agp-solvers");
    if (trial.size() == 0) throw InvalidArgument("agp-solvers", "empty trial basis");
    if (trial.dim() != h.rows()) throw DimensionMismatch("agp-solvers", "trial basis dimension differs from H");
    const Index k = static_cast<Index>(trial.size());
    const double hb = hbar();
    // With H_cd = hbar sum c_k L_k the residual is dH - sum c_k Y_k, Y_k = i[H, L_k].
    std::vector<Matrix> y;
    LinearCDSystem sys;
    sys.method = CDMethod::algebraic;
    sys.u.resize(k);
    sys.scale = RealVector::Ones(k);
    for (Index i = 0; i < k; ++i) {
        const Matrix l = trial.element(static_cast<std::size_t>(i));
        y.push_back(I * commutator(h, l));
        sys.basis_ops.push_back(hb * l);
        sys.u(i) = frobenius_inner(y.back(), dh).real();
    }
    sys.B.resize(k, k);
    for (Index i = 0; i < k; ++i)
        for (Index j = i; j < k; ++j) sys.B(i, j) = sys.B(j, i) = frobenius_inner(y[static_cast<std::size_t>(i)], y[static_cast<std::size_t>(j)]).real();
    return sys;
}

OperatorBasis odd_commutator_closure(const Matrix& h, const Matrix& dh, const OperatorBasis& basis, double support_tol) {
    require_same_dim(h, dh, "agp-solvers");
    auto support = [&](const Matrix& x, std::set<std::size_t>& into, std::vector<std::size_t>& fresh) {
        const double scale = frobenius_norm(x);
        if (scale == 0.0) return;
        for (std::size_t mu = 0; mu < basis.size(); ++mu) {
            if (std::abs(frobenius_inner(basis.element(mu), x)) > support_tol * scale && into.insert(mu).second) fresh.push_back(mu);
        }
    };
    std::set<std::size_t> found;
    std::vector<std::size_t> frontier;
    support(commutator(h, dh), found, frontier);
    while (!frontier.empty()) {
        std::vector<std::size_t> next;
        for (std::size_t mu : frontier) support(commutator(h, commutator(h, basis.element(mu))), found, next);
        frontier = std::move(next);
    }
    return basis.subset(std::vector<std::size_t>(found.begin(), found.end()));
}

namespace {
using LMatrix = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;

long double lnorm(const LMatrix& x) { return std::sqrt(x.squaredNorm() / static_cast<long double>(x.rows())); }

std::complex<long double> linner(const LMatrix& x, const LMatrix& y) {
    return (x.array().conjugate() * y.array()).sum() / static_cast<long double>(x.rows());
}
}  // namespace

KrylovChain krylov_chain(const Matrix& h_d, const Matrix& dh_d, Index k_max, double term_tol_rel) {
    require_same_dim(h_d, dh_d, "agp-solvers");
    const Index d = h_d.rows();
    const Index cap = d * d - d + 1;
    if (k_max <= 0 || k_max > cap) k_max = cap;
    const LMatrix h = h_d.cast<std::complex<long double>>();
    const LMatrix dh = dh_d.cast<std::complex<long double>>();
    const long double b0 = lnorm(dh);
    if (b0 == 0.0L) throw InvalidArgument("agp-solvers", "dH = 0 generates no Krylov chain");
    const long double tol = static_cast<long double>(term_tol_rel) * b0;

    KrylovChain chain;
    std::vector<LMatrix> ops{dh / b0};
    chain.b.push_back(static_cast<double>(b0));
    std::vector<long double> b{b0};
    while (true) {
        const std::size_t k = ops.size();
        LMatrix r = h * ops[k - 1] - ops[k - 1] * h;
        if (k >= 2) r -= b[k - 1] * ops[k - 2];
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& o : ops) r -= linner(o, r) * o;
        const long double bk = lnorm(r);
        if (bk < tol || static_cast<Index>(k) >= k_max) {
            chain.b_next = static_cast<double>(bk);
            chain.terminated = bk < tol;
            break;
        }
        ops.push_back(r / bk);
        b.push_back(bk);
        chain.b.push_back(static_cast<double>(bk));
    }
    for (const auto& o : ops) chain.basis.push_back(o.cast<cplx>());
    return chain;
}

LinearCDSystem krylov_system(const KrylovChain& chain) {
    const Index kdim = chain.K();
    LinearCDSystem sys;
    sys.method = CDMethod::krylov;
    sys.tridiagonal = true;
    if (kdim < 2) {
        sys.identically_zero = true;
        sys.B.resize(0, 0);
        sys.u.resize(0);
        return sys;
    }
    const Index n = kdim / 2;
    auto b = [&](Index j) -> double {
        if (j < kdim) return chain.b[static_cast<std::size_t>(j)];
        return chain.terminated ? 0.0 : chain.b_next;
    };
    sys.B = RealMatrix::Zero(n, n);
    sys.u = RealVector::Zero(n);
    sys.scale = RealVector::Ones(n);
    for (Index k = 1; k <= n; ++k) {
        sys.B(k - 1, k - 1) = b(2 * k - 1) * b(2 * k - 1) + b(2 * k) * b(2 * k);
        if (k < n) sys.B(k - 1, k) = sys.B(k, k - 1) = b(2 * k) * b(2 * k + 1);
        sys.basis_ops.push_back(I * hbar() * chain.basis[static_cast<std::size_t>(2 * k - 1)]);
    }
    sys.u(0) = -b(0) * b(1);
    return sys;
}

namespace {
RealVector min_norm_solve(const RealMatrix& b, const RealVector& u, Index& rank) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(b);
    const RealVector lam = es.eigenvalues();
    const double top = lam.cwiseAbs().maxCoeff();
    RealVector proj = es.eigenvectors().transpose() * u;
    rank = 0;
    for (Index i = 0; i < lam.size(); ++i) {
        if (top > 0.0 && lam(i) > 1e-12 * top) {
            proj(i) /= lam(i);
            ++rank;
        } else {
            proj(i) = 0.0;
        }
    }
    return es.eigenvectors() * proj;
}

// Thomas elimination; false when a pivot collapses.
bool thomas(const RealMatrix& b, const RealVector& u, RealVector& x) {
    const Index n = u.size();
    const double scale = b.cwiseAbs().maxCoeff();
    RealVector c(n), d(n);
    double diag = b(0, 0);
    if (std::abs(diag) <= 1e-14 * scale) return false;
    c(0) = n > 1 ? b(0, 1) / diag : 0.0;
    d(0) = u(0) / diag;
    for (Index i = 1; i < n; ++i) {
        diag = b(i, i) - b(i, i - 1) * c(i - 1);
        if (std::abs(diag) <= 1e-14 * scale) return false;
        c(i) = i + 1 < n ? b(i, i + 1) / diag : 0.0;
        d(i) = (u(i) - b(i, i - 1) * d(i - 1)) / diag;
    }
    x.resize(n);
    x(n - 1) = d(n - 1);
    for (Index i = n - 2; i >= 0; --i) x(i) = d(i) - c(i) * x(i + 1);
    return true;
}
}  // namespace

CDCoefficients solve_cd(const LinearCDSystem& system) {
    CDCoefficients out;
    if (system.identically_zero || system.size() == 0) {
        out.a.resize(0);
        return out;
    }
    if (detail::solve_extended(system, out)) return out;
    if (system.u.isZero(0.0)) {
        out.a = RealVector::Zero(system.size());
        out.rank = system.size();
        return out;
    }
    if (system.tridiagonal && thomas(system.B, system.u, out.a)) {
        out.rank = system.size();
        return out;
    }
    out.a = min_norm_solve(system.B, system.u, out.rank);
    out.rank_deficient = out.rank < system.size();
    return out;
}

HermitianOperator assemble_cd(const LinearCDSystem& system, const CDCoefficients& coeffs) {
    if (coeffs.a.size() != system.size()) throw DimensionMismatch("agp-solvers", "coefficient count differs from system size");
    if (system.basis_ops.empty()) throw InvalidArgument("agp-solvers", "cannot assemble an empty system without a dimension");
    Matrix out;
    if (!detail::assemble_extended(system, coeffs, out)) {
        const Index d = system.basis_ops.front().rows();
        out = Matrix::Zero(d, d);
        for (Index k = 0; k < system.size(); ++k) out += coeffs.a(k) * system.basis_ops[static_cast<std::size_t>(k)];
    }
    // Each term is Hermitian by construction; drop the rounding residue.
    return HermitianOperator(0.5 * (out + out.adjoint().eval()));
}

int full_order(const Matrix& h, const Matrix& dh) { return static_cast<int>(krylov_chain(h, dh).K() / 2); }

double action_value(const Matrix& h, const Matrix& dh, const Matrix& h_cd) {
    const Matrix g = dh - (I / hbar()) * commutator(h, h_cd);
    const double n = frobenius_norm(g);
    return n * n;
}

RealVector action_gradient(const Matrix& h, const Matrix& dh, const Matrix& h_cd, const std::vector<Matrix>& directions) {
    const Matrix g = dh - (I / hbar()) * commutator(h, h_cd);
    RealVector grad(static_cast<Index>(directions.size()));
    for (std::size_t k = 0; k < directions.size(); ++k) {
        const Matrix dg = -(I / hbar()) * commutator(h, directions[k]);
        grad(static_cast<Index>(k)) = 2.0 * frobenius_inner(g, dg).real();
    }
    return grad;
}

Matrix cd_integral_identity(const Matrix& h, const Matrix& dh, const std::vector<double>& etas) {
    require_same_dim(h, dh, "agp-solvers");
    if (etas.size() < 2) throw InvalidArgument("agp-solvers", "Richardson extrapolation needs at least two eta values");
    const EigenFrame f = eigen_frame(h);
    require_gaps(f.energies, 1e-10, "agp-solvers");
    const Matrix m = f.vectors.adjoint() * dh * f.vectors;
    const Index d = h.rows();
    const double hb = hbar();
    // -1/2 int sgn(u) e^{-eta|u|} e^{i w u} du = -i w / (w^2 + eta^2), w = (E_m - E_n)/hbar.
    std::vector<Matrix> estimates;
    for (double eta : etas) {
        Matrix c = Matrix::Zero(d, d);
        for (Index r = 0; r < d; ++r)
            for (Index s = 0; s < d; ++s) {
                if (r == s) continue;
                const double w = (f.energies(r) - f.energies(s)) / hb;
                c(r, s) = -I * m(r, s) * w / (w * w + eta * eta);
            }
        estimates.push_back(c);
    }
    // Errors are even in eta; the tableau assumes a geometric eta sequence.
    for (std::size_t level = 1; level < estimates.size(); ++level) {
        std::vector<Matrix> next;
        for (std::size_t i = 0; i + 1 < estimates.size(); ++i) {
            const double ratio = etas[i] / etas[i + 1];
            const double r2 = std::pow(ratio, 2.0 * static_cast<double>(level));
            next.push_back((r2 * estimates[i + 1] - estimates[i]) / (r2 - 1.0));
        }
        estimates = std::move(next);
        if (estimates.size() == 1) break;
    }
    const Matrix c = estimates.front();
    return f.vectors * c * f.vectors.adjoint();
}

}  // namespace sforge
