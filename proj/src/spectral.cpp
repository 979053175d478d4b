#include "sforge/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "sforge/quadrature.hpp"

namespace sforge {

EigenFrame eigen_frame(const Matrix& h) {
    if (h.rows() != h.cols()) throw DimensionMismatch("spectral", "Hamiltonian must be square");
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success) throw NumericalError("spectral", "eigen-decomposition failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

namespace {

double energy_scale(const RealVector& e) { return std::max(e.cwiseAbs().maxCoeff(), 1e-300); }

// Relabels and rephases `next` to follow `prev`. Clusters of nearly equal
// energies are rotated as a block onto the previous vectors.
bool align_frame(const Matrix& prev, const EigenFrame& next, double cluster_rel, double min_overlap, EigenFrame& out) {
    const Index d = prev.cols();
    const Matrix ov = prev.adjoint() * next.vectors;
    const double tol = cluster_rel * energy_scale(next.energies);
    out.energies.resize(d);
    out.vectors.resize(d, d);
    std::vector<bool> taken(static_cast<std::size_t>(d), false);
    Index start = 0;
    while (start < d) {
        Index stop = start + 1;
        while (stop < d && next.energies(stop) - next.energies(stop - 1) < tol) ++stop;
        const Index c = stop - start;
        std::vector<std::pair<double, Index>> weight(static_cast<std::size_t>(d));
        for (Index i = 0; i < d; ++i) weight[static_cast<std::size_t>(i)] = {ov.row(i).segment(start, c).squaredNorm(), i};
        std::stable_sort(weight.begin(), weight.end(), [](auto& a, auto& b) { return a.first > b.first; });
        std::vector<Index> targets;
        for (Index k = 0; k < c; ++k) {
            const auto [w, i] = weight[static_cast<std::size_t>(k)];
            if (w < min_overlap * min_overlap || taken[static_cast<std::size_t>(i)]) return false;
            targets.push_back(i);
        }
        std::sort(targets.begin(), targets.end());
        Matrix block_prev(d, c);
        for (Index k = 0; k < c; ++k) block_prev.col(k) = prev.col(targets[static_cast<std::size_t>(k)]);
        const Matrix block_next = next.vectors.middleCols(start, c);
        const Matrix w = block_next.adjoint() * block_prev;
        Eigen::JacobiSVD<Matrix> svd(w, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Matrix aligned = block_next * (svd.matrixU() * svd.matrixV().adjoint());
        for (Index k = 0; k < c; ++k) {
            const Index i = targets[static_cast<std::size_t>(k)];
            const cplx o = prev.col(i).dot(aligned.col(k));
            if (std::abs(o) < min_overlap) return false;
            out.vectors.col(i) = aligned.col(k);
            out.energies(i) = next.energies(start + k);
            taken[static_cast<std::size_t>(i)] = true;
        }
        start = stop;
    }
    return true;
}

struct Tracker {
    const HamiltonianPath& h;
    const EigenPathOptions& opt;

    EigenFrame advance(const EigenFrame& prev, double t_prev, double t_next, int depth) const {
        const EigenFrame fresh = eigen_frame(h(t_next));
        EigenFrame out;
        if (align_frame(prev.vectors, fresh, 1e2 * opt.eps_gap_rel, opt.min_overlap, out)) return out;
        if (depth >= opt.max_refinement) {
            std::ostringstream msg;
            msg << "eigenvector overlap below " << opt.min_overlap << " between t=" << t_prev << " and t=" << t_next
                << " after " << depth << " refinements";
            throw GridTooCoarse("spectral", msg.str());
        }
        const double mid = 0.5 * (t_prev + t_next);
        const EigenFrame half = advance(prev, t_prev, mid, depth + 1);
        return advance(half, mid, t_next, depth + 1);
    }
};

}  // namespace

EigenPath eigenpath(const HamiltonianPath& h, const std::vector<double>& grid, const EigenPathOptions& options) {
    if (grid.empty()) throw InvalidArgument("spectral", "empty grid");
    require_increasing(grid, "spectral");
    EigenPath path;
    path.grid = grid;
    Tracker tracker{h, options};
    EigenFrame frame = eigen_frame(h(grid[0]));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (i > 0) frame = tracker.advance(frame, grid[i - 1], grid[i], 0);
        path.energies.push_back(frame.energies);
        path.vectors.push_back(frame.vectors);
        const double eps = options.eps_gap_rel * energy_scale(frame.energies);
        const Index d = frame.energies.size();
        for (Index m = 0; m < d; ++m)
            for (Index n = m + 1; n < d; ++n) {
                const double gap = std::abs(frame.energies(m) - frame.energies(n));
                if (gap < eps) path.degeneracies.push_back({i, m, n, gap});
            }
    }
    return path;
}

void require_gaps(const RealVector& energies, double eps_gap_rel, const char* module) {
    const double eps = eps_gap_rel * energy_scale(energies);
    std::vector<double> e(energies.data(), energies.data() + energies.size());
    std::sort(e.begin(), e.end());
    for (std::size_t k = 1; k < e.size(); ++k) {
        if (e[k] - e[k - 1] < eps) {
            std::ostringstream msg;
            msg << "degenerate levels (gap " << e[k] - e[k - 1] << " below " << eps << ")";
            throw DegeneracyError(module, msg.str());
        }
    }
}

Matrix exact_cd_in_frame(const EigenFrame& frame, const Matrix& dh, double eps_gap_rel) {
    require_gaps(frame.energies, eps_gap_rel, "spectral");
    const Index d = frame.energies.size();
    const Matrix m = frame.vectors.adjoint() * dh * frame.vectors;
    const double hb = hbar();
    Matrix c = Matrix::Zero(d, d);
    for (Index n = 0; n < d; ++n)
        for (Index k = n + 1; k < d; ++k) {
            c(n, k) = I * hb * m(n, k) / (frame.energies(k) - frame.energies(n));
            c(k, n) = std::conj(c(n, k));
        }
    Matrix out = frame.vectors * c * frame.vectors.adjoint();
    // Restore exact Hermiticity lost in the basis change.
    return 0.5 * (out + out.adjoint().eval());
}

HermitianOperator exact_cd(const Matrix& h, const Matrix& dh, double eps_gap_rel) {
    require_same_dim(h, dh, "spectral");
    return HermitianOperator(exact_cd_in_frame(eigen_frame(h), dh, eps_gap_rel));
}

HermitianOperator exact_cd(const HamiltonianPath& h, double t, double eps_gap_rel) {
    return exact_cd(h(t), h.derivative(t), eps_gap_rel);
}

HermitianOperator adiabatic_gauge_potential(const ParametricHamiltonian& h, const RealVector& lambda, Index index,
                                            double eps_gap_rel) {
    if (index < 0 || index >= h.n_params) throw InvalidArgument("spectral", "parameter index out of range");
    return exact_cd(h.value(lambda), h.partial(lambda, index), eps_gap_rel);
}

HamiltonianPath exact_cd_path(const HamiltonianPath& h, double eps_gap_rel) {
    HamiltonianPath out;
    out.dim = h.dim;
    out.value = [h, eps_gap_rel](double t) -> Matrix { return exact_cd(h, t, eps_gap_rel).matrix(); };
    return out;
}

AdiabaticState adiabatic_state(const EigenPath& path, const Vector& c0) {
    const Index d = path.dim();
    if (c0.size() != d) throw DimensionMismatch("spectral", "initial coefficients do not match the path dimension");
    if (std::abs(c0.norm() - 1.0) > 1e-10) throw InvalidArgument("spectral", "initial coefficients must be normalized");
    const std::size_t n_t = path.size();
    const double hb = hbar();

    std::vector<RealVector> energies(path.energies);
    const std::vector<RealVector> integral = cumulative_integral(path.grid, energies);
    AdiabaticState out;
    out.c0 = c0;
    out.trajectory.grid = path.grid;
    out.trajectory.method = "adiabatic";
    out.trajectory.hbar = hb;
    RealVector geometric = RealVector::Zero(d);
    for (std::size_t i = 0; i < n_t; ++i) {
        if (i > 0) {
            for (Index n = 0; n < d; ++n) {
                const cplx link = path.vectors[i - 1].col(n).dot(path.vectors[i].col(n));
                geometric(n) -= std::arg(link);
            }
        }
        const RealVector dyn = integral[i] / hb;
        Vector psi = Vector::Zero(d);
        for (Index n = 0; n < d; ++n) psi += c0(n) * std::exp(cplx(0.0, geometric(n) - dyn(n))) * path.vectors[i].col(n);
        out.trajectory.states.push_back(psi);
        out.dynamical_phases.push_back(dyn);
        out.geometric_phases.push_back(geometric);
    }
    return out;
}

namespace {
// Three-point derivative weights at grid point i; one-sided at the ends.
void stencil(const std::vector<double>& g, std::size_t i, std::size_t& a, std::size_t& b, double& wa, double& w0, double& wb) {
    if (g.size() < 3) throw InvalidArgument("spectral", "finite differences need at least three grid points");
    const std::size_t c = std::clamp<std::size_t>(i, 1, g.size() - 2);
    a = c - 1;
    b = c + 1;
    const double x0 = g[a], x1 = g[c], x2 = g[b], x = g[i];
    wa = (2 * x - x1 - x2) / ((x0 - x1) * (x0 - x2));
    w0 = (2 * x - x0 - x2) / ((x1 - x0) * (x1 - x2));
    wb = (2 * x - x0 - x1) / ((x2 - x0) * (x2 - x1));
}

Matrix vectors_derivative(const EigenPath& path, std::size_t i) {
    std::size_t a, b;
    double wa, w0, wb;
    stencil(path.grid, i, a, b, wa, w0, wb);
    const std::size_t c = a + 1;
    return wa * path.vectors[a] + w0 * path.vectors[c] + wb * path.vectors[b];
}
}  // namespace

Vector berry_connection(const EigenPath& path, std::size_t index) {
    const Matrix dv = vectors_derivative(path, index);
    return (path.vectors[index].adjoint() * dv).diagonal();
}

Matrix derivative_couplings_fd(const EigenPath& path, std::size_t index) {
    return path.vectors[index].adjoint() * vectors_derivative(path, index);
}

double berry_phase(const EigenPath& path, Index n) {
    if (path.size() < 2) throw InvalidArgument("spectral", "Berry phase needs a closed path");
    cplx prod = 1.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const cplx link = path.vectors[i].col(n).dot(path.vectors[i + 1].col(n));
        prod *= link / std::abs(link);
    }
    const cplx closing = path.vectors.back().col(n).dot(path.vectors.front().col(n));
    prod *= closing / std::abs(closing);
    return -std::arg(prod);
}

double adiabaticity_metric(const Matrix& h, const Matrix& dh, Index m, Index n, double eps_gap_rel) {
    require_same_dim(h, dh, "spectral");
    if (m == n) throw InvalidArgument("spectral", "adiabaticity metric needs two distinct levels");
    const EigenFrame f = eigen_frame(h);
    const Index d = f.energies.size();
    if (m < 0 || n < 0 || m >= d || n >= d) throw InvalidArgument("spectral", "level index out of range");
    const double gap = f.energies(m) - f.energies(n);
    if (std::abs(gap) < eps_gap_rel * energy_scale(f.energies)) throw DegeneracyError("spectral", "levels are degenerate");
    const cplx elem = f.vectors.col(n).dot(dh * f.vectors.col(m));
    return hbar() * std::abs(elem) / (gap * gap);
}

RealMatrix quantum_geometric_tensor(const ParametricHamiltonian& h, const RealVector& lambda, Index n, double rel_step,
                                    double eps_gap_rel) {
    const EigenFrame centre = eigen_frame(h.value(lambda));
    require_gaps(centre.energies, eps_gap_rel, "spectral");
    const Index p = h.n_params;
    const Vector ref = centre.vectors.col(n);
    auto displaced = [&](Index i, double delta) {
        RealVector l = lambda;
        l(i) += delta;
        const EigenFrame f = eigen_frame(h.value(l));
        Index best = 0;
        double best_ov = -1.0;
        for (Index k = 0; k < f.vectors.cols(); ++k) {
            const double o = std::abs(ref.dot(f.vectors.col(k)));
            if (o > best_ov) {
                best_ov = o;
                best = k;
            }
        }
        const cplx o = ref.dot(f.vectors.col(best));
        return Vector(f.vectors.col(best) * (std::conj(o) / std::abs(o)));
    };
    std::vector<Vector> dn;
    for (Index i = 0; i < p; ++i) {
        const double step = rel_step * std::max(1.0, std::abs(lambda(i)));
        dn.push_back((displaced(i, -2 * step) - 8.0 * displaced(i, -step) + 8.0 * displaced(i, step) - displaced(i, 2 * step)) /
                     (12.0 * step));
    }
    RealMatrix g(p, p);
    for (Index i = 0; i < p; ++i) {
        const Vector pi_ = dn[static_cast<std::size_t>(i)] - ref * ref.dot(dn[static_cast<std::size_t>(i)]);
        for (Index j = 0; j < p; ++j) {
            const Vector pj = dn[static_cast<std::size_t>(j)] - ref * ref.dot(dn[static_cast<std::size_t>(j)]);
            g(i, j) = std::real(pi_.dot(pj));
        }
    }
    return 0.5 * (g + g.transpose());
}

}  // namespace sforge
