#include "sforge/invariant.hpp"

#include <cmath>
#include <memory>
#include <sstream>

#include "sforge/quadrature.hpp"

namespace sforge {

DynamicalInvariant dynamical_invariant(const HamiltonianPath& f, const std::vector<double>& grid) {
    DynamicalInvariant inv;
    inv.eigen = eigenpath(f, grid);
    for (double t : grid) inv.operators.push_back(f(t));
    return inv;
}

HamiltonianPath cd_invariant(const HamiltonianPath& h, RealVector fbar) {
    if (fbar.size() == 0) fbar = RealVector::LinSpaced(h.dim, 1.0, static_cast<double>(h.dim));
    if (fbar.size() != h.dim) throw DimensionMismatch("lewis-riesenfeld", "one invariant eigenvalue per level required");
    HamiltonianPath f;
    f.dim = h.dim;
    f.fd_step = h.fd_step;
    f.value = [h, fbar](double t) {
        const EigenFrame fr = eigen_frame(h(t));
        require_gaps(fr.energies, 1e-10, "lewis-riesenfeld");
        return Matrix(fr.vectors * fbar.cast<cplx>().asDiagonal() * fr.vectors.adjoint());
    };
    return f;
}

double eigenvalue_drift(const DynamicalInvariant& inv) {
    const auto& e = inv.eigen.energies;
    if (e.empty()) return 0.0;
    const double scale = std::max(e.front().cwiseAbs().maxCoeff(), 1e-300);
    double drift = 0.0;
    for (const auto& ei : e) drift = std::max(drift, (ei - e.front()).cwiseAbs().maxCoeff());
    return drift / scale;
}

RealVector invariant_residual(const HamiltonianPath& h, const std::vector<Matrix>& f, const std::vector<double>& grid) {
    if (grid.size() < 3) throw InvalidArgument("lewis-riesenfeld", "invariant residual needs at least three grid points");
    if (f.size() != grid.size()) throw DimensionMismatch("lewis-riesenfeld", "one invariant sample per grid point required");
    require_increasing(grid, "lewis-riesenfeld");
    const std::vector<Matrix> df = differentiate(grid, f);
    const double hb = hbar();
    RealVector r(static_cast<Index>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i)
        r(static_cast<Index>(i)) = frobenius_norm(I * hb * df[i] - commutator(h(grid[i]), f[i]));
    return r;
}

RealVector invariant_residual(const HamiltonianPath& h, const HamiltonianPath& f, const std::vector<double>& grid) {
    std::vector<Matrix> samples;
    for (double t : grid) samples.push_back(f(t));
    return invariant_residual(h, samples, grid);
}

double invariant_residual_scale(const HamiltonianPath& h, const std::vector<Matrix>& f, const std::vector<double>& grid) {
    double fmax = 0.0, hmax = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        fmax = std::max(fmax, frobenius_norm(f.at(i)));
        hmax = std::max(hmax, frobenius_norm(h(grid[i])));
    }
    return fmax * hmax / hbar();
}

namespace {
void require_smooth_modes(const std::vector<Vector>& phi, const std::vector<double>& grid) {
    for (std::size_t i = 1; i < phi.size(); ++i) {
        const double o = phi[i - 1].dot(phi[i]).real();
        if (o < 0.9) {
            std::ostringstream msg;
            msg << "mode overlap " << o << " between t=" << grid[i - 1] << " and t=" << grid[i] << " signals a gauge jump";
            throw GaugeDiscontinuity("lewis-riesenfeld", msg.str());
        }
    }
}
}  // namespace

LRPhase lr_phase(const HamiltonianPath& h, const std::vector<Vector>& phi, const std::vector<double>& grid) {
    if (phi.size() != grid.size()) throw DimensionMismatch("lewis-riesenfeld", "one mode sample per grid point required");
    require_increasing(grid, "lewis-riesenfeld");
    require_smooth_modes(phi, grid);
    const std::vector<Vector> dphi = differentiate(grid, phi);
    const double hb = hbar();
    std::vector<double> rate(grid.size());
    LRPhase out;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const cplx a = phi[i].dot(dphi[i]);
        const cplx e = phi[i].dot(h(grid[i]) * phi[i]);
        rate[i] = -a.imag() - e.real() / hb;
        out.imaginary_residue = std::max(out.imaginary_residue, std::abs(a.real()));
    }
    const std::vector<double> alpha = cumulative_integral(grid, rate);
    out.alpha = Eigen::Map<const RealVector>(alpha.data(), static_cast<Index>(alpha.size()));
    return out;
}

namespace {
void require_orthonormal(const Matrix& modes) {
    const Index r = modes.cols();
    if ((modes.adjoint() * modes - Matrix::Identity(r, r)).cwiseAbs().maxCoeff() > 1e-9)
        throw InvalidArgument("lewis-riesenfeld", "modes are not orthonormal");
}
}  // namespace

std::vector<Matrix> hamiltonian_from_modes(const std::vector<Matrix>& modes, const std::vector<RealVector>& alpha_rates,
                                           const std::vector<double>& grid, const std::vector<Matrix>& mode_rates) {
    if (modes.size() != grid.size() || alpha_rates.size() != grid.size())
        throw DimensionMismatch("lewis-riesenfeld", "modes and phase rates must be sampled on the grid");
    for (const Matrix& phi : modes) {
        require_orthonormal(phi);
        if (phi.cols() != phi.rows()) throw InvalidArgument("lewis-riesenfeld", "modes must form a complete basis");
    }
    const std::vector<Matrix> dm = mode_rates.empty() ? differentiate(grid, modes) : mode_rates;
    if (dm.size() != grid.size()) throw DimensionMismatch("lewis-riesenfeld", "mode derivatives must be sampled on the grid");
    const double hb = hbar();
    std::vector<Matrix> out;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Matrix& phi = modes[i];
        const Matrix w = dm[i] * phi.adjoint();
        // d/dt (Phi Phi^dagger) = 0 makes W anti-Hermitian.
        const double asym = frobenius_norm(w + w.adjoint());
        if (asym > 1e-6 * std::max(1.0, frobenius_norm(w))) {
            std::ostringstream msg;
            msg << "mode derivatives inconsistent with orthonormality at t=" << grid[i] << " (|W + W^dagger| = " << asym << ")";
            throw NumericalError("lewis-riesenfeld", msg.str());
        }
        const Matrix h = -hb * phi * alpha_rates[i].cast<cplx>().asDiagonal() * phi.adjoint() + I * hb * 0.5 * (w - w.adjoint());
        out.push_back(0.5 * (h + h.adjoint()));
    }
    return out;
}

InvariantDecomposition decompose_in_invariant_basis(const Matrix& h, const Matrix& modes, const Matrix& mode_rates) {
    require_orthonormal(modes);
    if (modes.rows() != h.rows() || modes.cols() != h.rows()) throw DimensionMismatch("lewis-riesenfeld", "modes must form a complete basis of H");
    const Matrix hd = modes.adjoint() * h * modes;
    Matrix c = modes.adjoint() * mode_rates;
    c.diagonal().setZero();
    InvariantDecomposition out;
    out.diagonal = modes * hd.diagonal().asDiagonal() * modes.adjoint();
    const Matrix cd = I * hbar() * modes * c * modes.adjoint();
    out.cd_like = 0.5 * (cd + cd.adjoint());
    return out;
}

InvariantDecomposition decompose_in_invariant_basis(const Matrix& h, const std::vector<Matrix>& modes, const std::vector<double>& grid,
                                                    std::size_t index) {
    if (modes.size() != grid.size()) throw DimensionMismatch("lewis-riesenfeld", "modes must be sampled on the grid");
    for (std::size_t i = 1; i < modes.size(); ++i)
        if ((modes[i - 1].adjoint() * modes[i]).diagonal().real().minCoeff() < 0.9)
            throw GaugeDiscontinuity("lewis-riesenfeld", "consecutive invariant modes overlap below 0.9");
    const std::vector<Matrix> dm = differentiate(grid, modes);
    return decompose_in_invariant_basis(h, modes.at(index), dm.at(index));
}

AlgebraSpec make_algebra(const OperatorBasis& generators, std::vector<std::size_t> hamiltonian_span,
                         std::vector<std::size_t> invariant_span, double tol) {
    const std::size_t n = generators.size();
    if (n == 0 || hamiltonian_span.empty() || invariant_span.empty())
        throw InvalidArgument("lewis-riesenfeld", "algebra needs generators and non-empty spans");
    for (auto idx : hamiltonian_span)
        if (idx >= n) throw InvalidArgument("lewis-riesenfeld", "hamiltonian span index out of range");
    for (auto idx : invariant_span)
        if (idx >= n) throw InvalidArgument("lewis-riesenfeld", "invariant span index out of range");
    AlgebraSpec a;
    a.labels = generators.labels();
    for (std::size_t i = 0; i < n; ++i) a.generators.push_back(generators.element(i));
    a.hamiltonian_span = std::move(hamiltonian_span);
    a.invariant_span = std::move(invariant_span);
    a.structure.assign(n * n * n, 0.0);
    std::vector<bool> in_b(n, false);
    for (auto l : a.invariant_span) in_b[l] = true;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k) {
            const Matrix c = commutator(a.generators[j], a.generators[k]);
            Matrix recon = Matrix::Zero(c.rows(), c.cols());
            for (std::size_t l = 0; l < n; ++l) {
                const double t = frobenius_inner(a.generators[l], -I * c).real();
                a.structure[(j * n + k) * n + l] = t;
                a.structure[(k * n + j) * n + l] = -t;
                recon += I * t * a.generators[l];
            }
            const double scale = std::max(1.0, frobenius_norm(c));
            if (frobenius_norm(c - recon) > tol * scale) {
                std::ostringstream msg;
                msg << "commutator [" << a.labels[j] << ", " << a.labels[k] << "] leaves the generator span";
                throw SpanningFailure("lewis-riesenfeld", msg.str());
            }
        }
    for (auto k : a.hamiltonian_span)
        for (auto l : a.invariant_span)
            for (std::size_t m = 0; m < n; ++m)
                if (!in_b[m] && std::abs(a.T(k, l, m)) > tol) {
                    std::ostringstream msg;
                    msg << "[" << a.labels[k] << ", " << a.labels[l] << "] has a component on " << a.labels[m] << " outside the invariant span";
                    throw SpanningFailure("lewis-riesenfeld", msg.str());
                }
    return a;
}

Matrix invariant_operator(const AlgebraSpec& algebra, const RealVector& f) {
    if (f.size() != static_cast<Index>(algebra.invariant_span.size()))
        throw DimensionMismatch("lewis-riesenfeld", "one coefficient per invariant generator required");
    Matrix out = Matrix::Zero(algebra.generators.front().rows(), algebra.generators.front().cols());
    for (std::size_t l = 0; l < algebra.invariant_span.size(); ++l) out += f(static_cast<Index>(l)) * algebra.generators[algebra.invariant_span[l]];
    return out;
}

namespace {

struct PointSolve {
    RealVector h;
    double residual;
    double scale;
};

RealVector central_difference(const std::function<RealVector(double)>& f, double t, double step) {
    return (f(t - 2 * step) - 8.0 * f(t - step) + 8.0 * f(t + step) - f(t + 2 * step)) / (12.0 * step);
}

PointSolve solve_point(const AlgebraSpec& a, const RealVector& f, const RealVector& df, const RealVector* extra) {
    const auto& A = a.hamiltonian_span;
    const auto& B = a.invariant_span;
    if (f.size() != static_cast<Index>(B.size()) || df.size() != f.size())
        throw DimensionMismatch("lewis-riesenfeld", "invariant coefficients must match the invariant span");
    RealMatrix m = RealMatrix::Zero(static_cast<Index>(B.size()), static_cast<Index>(A.size()));
    for (std::size_t j = 0; j < B.size(); ++j)
        for (std::size_t k = 0; k < A.size(); ++k)
            for (std::size_t l = 0; l < B.size(); ++l)
                m(static_cast<Index>(j), static_cast<Index>(k)) += a.T(A[k], B[l], B[j]) * f(static_cast<Index>(l));
    const RealVector rhs = hbar() * df;
    Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod(m);
    cod.setThreshold(1e-12);
    RealVector h = cod.solve(rhs);
    if (extra) {
        if (extra->size() != h.size()) throw DimensionMismatch("lewis-riesenfeld", "null component must match the hamiltonian span");
        h += *extra - cod.solve(m * *extra);
    }
    return {h, (m * h - rhs).norm(), rhs.norm() + m.norm() * h.norm()};
}

}  // namespace

InverseSolution inverse_engineer_schedule(const AlgebraSpec& algebra, std::function<RealVector(double)> f,
                                          std::function<RealVector(double)> df, const std::vector<double>& grid,
                                          const InverseOptions& options) {
    if (grid.size() < 2) throw InvalidArgument("lewis-riesenfeld", "inverse engineering needs at least two grid points");
    require_increasing(grid, "lewis-riesenfeld");
    const double step = 1e-4 * std::max(1.0, grid.back() - grid.front());
    auto rate = std::make_shared<std::function<RealVector(double)>>(
        df ? df : [f, step](double t) { return central_difference(f, t, step); });
    auto spec = std::make_shared<AlgebraSpec>(algebra);
    auto solve_at = [spec, f, rate, extra = options.null_component](double t) {
        if (extra) {
            const RealVector e = extra(t);
            return solve_point(*spec, f(t), (*rate)(t), &e);
        }
        return solve_point(*spec, f(t), (*rate)(t), nullptr);
    };

    InverseSolution out;
    out.grid = grid;
    out.residual.resize(static_cast<Index>(grid.size()));
    double worst = -1.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const PointSolve p = solve_at(grid[i]);
        out.h.push_back(p.h);
        out.residual(static_cast<Index>(i)) = p.residual;
        const double rel = p.residual / std::max(p.scale, 1e-300);
        if (rel > worst) {
            worst = rel;
            out.worst_index = i;
        }
    }
    if (worst > options.residual_tol) {
        std::ostringstream msg;
        msg << "no Hamiltonian in the given span drives the target invariant; worst relative residual " << worst << " at t="
            << grid[out.worst_index];
        throw NumericalError("lewis-riesenfeld", msg.str());
    }
    out.path.dim = algebra.generators.front().rows();
    out.path.value = [spec, solve_at](double t) {
        const RealVector h = solve_at(t).h;
        Matrix m = Matrix::Zero(spec->generators.front().rows(), spec->generators.front().cols());
        for (std::size_t k = 0; k < spec->hamiltonian_span.size(); ++k) m += h(static_cast<Index>(k)) * spec->generators[spec->hamiltonian_span[k]];
        return m;
    };
    return out;
}

}  // namespace sforge
