#pragma once

#include <functional>
#include <vector>

#include "sforge/core.hpp"
#include "sforge/operator.hpp"
#include "sforge/spectral.hpp"

namespace sforge {

// F(t) sampled on a grid together with its gauge-smoothed eigen-decomposition.
struct DynamicalInvariant {
    std::vector<Matrix> operators;
    EigenPath eigen;

    const std::vector<double>& grid() const { return eigen.grid; }
};

DynamicalInvariant dynamical_invariant(const HamiltonianPath& f, const std::vector<double>& grid);

// F(t) = sum_n fbar_n |n(t)><n(t)| over the instantaneous eigenbasis of H,
// the invariant of H + H_cd. An empty fbar means fbar_n = n.
HamiltonianPath cd_invariant(const HamiltonianPath& h, RealVector fbar = {});

// max_n max_t |f_n(t) - f_n(t_0)| / max_n |f_n(t_0)|
double eigenvalue_drift(const DynamicalInvariant& inv);

// |i hbar dF/dt - [H, F]| per grid point, dF/dt by finite differences on the grid.
RealVector invariant_residual(const HamiltonianPath& h, const std::vector<Matrix>& f, const std::vector<double>& grid);
RealVector invariant_residual(const HamiltonianPath& h, const HamiltonianPath& f, const std::vector<double>& grid);
// |F| max_t |H(t)| / hbar, the natural unit of the residual.
double invariant_residual_scale(const HamiltonianPath& h, const std::vector<Matrix>& f, const std::vector<double>& grid);

struct LRPhase {
    RealVector alpha;             // alpha_n(t) on the grid
    double imaginary_residue = 0.0;  // largest |Re<phi|d_t phi>| seen
};

// alpha_n(t) = (1/hbar) int <phi_n|(i hbar d_t - H)|phi_n> dt for one mode path.
LRPhase lr_phase(const HamiltonianPath& h, const std::vector<Vector>& phi, const std::vector<double>& grid);

// H = -hbar sum_n alpha_n' |phi_n><phi_n| + i hbar sum_n |d_t phi_n><phi_n|.
// modes[i] holds the orthonormal columns phi_n(t_i); mode derivatives come
// from finite differences unless supplied.
std::vector<Matrix> hamiltonian_from_modes(const std::vector<Matrix>& modes, const std::vector<RealVector>& alpha_rates,
                                           const std::vector<double>& grid, const std::vector<Matrix>& mode_rates = {});

struct InvariantDecomposition {
    Matrix diagonal;  // sum_n <phi_n|H|phi_n> |phi_n><phi_n|
    Matrix cd_like;   // i hbar sum_{m != n} |phi_n><phi_n|d_t phi_m><phi_m|
};

InvariantDecomposition decompose_in_invariant_basis(const Matrix& h, const Matrix& modes, const Matrix& mode_rates);
InvariantDecomposition decompose_in_invariant_basis(const Matrix& h, const std::vector<Matrix>& modes, const std::vector<double>& grid,
                                                    std::size_t index);

// Generators X_j with [X_j, X_k] = i sum_l T_jkl X_l; H lives in span(A) and
// the invariant in span(B).
struct AlgebraSpec {
    std::vector<Matrix> generators;
    std::vector<std::string> labels;
    std::vector<std::size_t> hamiltonian_span;
    std::vector<std::size_t> invariant_span;
    std::vector<double> structure;  // T_jkl flattened as (j * n + k) * n + l

    std::size_t size() const { return generators.size(); }
    double T(std::size_t j, std::size_t k, std::size_t l) const { return structure[(j * size() + k) * size() + l]; }
};

// Builds the structure constants and verifies closure of [A, B] in span(B).
AlgebraSpec make_algebra(const OperatorBasis& generators, std::vector<std::size_t> hamiltonian_span,
                         std::vector<std::size_t> invariant_span, double tol = 1e-10);

struct InverseOptions {
    // Extra h(t) projected on the null space of the per-time system; the
    // min-norm solution alone is used when empty.
    std::function<RealVector(double)> null_component;
    double residual_tol = 1e-8;  // relative to |hbar df/dt| + |M||h|
};

struct InverseSolution {
    std::vector<double> grid;
    std::vector<RealVector> h;  // coefficients over hamiltonian_span
    RealVector residual;
    std::size_t worst_index = 0;
    HamiltonianPath path;       // H(t) = sum_k h_k(t) X_k at any t
};

// Solves hbar df_j/dt = sum_{k in A, l in B} T_klj h_k f_l per time.
// f returns coefficients over invariant_span; df may be empty (finite differences).
InverseSolution inverse_engineer_schedule(const AlgebraSpec& algebra, std::function<RealVector(double)> f,
                                          std::function<RealVector(double)> df, const std::vector<double>& grid,
                                          const InverseOptions& options = {});

Matrix invariant_operator(const AlgebraSpec& algebra, const RealVector& f);

}  // namespace sforge
