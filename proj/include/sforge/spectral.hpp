#pragma once

#include <string>
#include <vector>

#include "sforge/core.hpp"

namespace sforge {

struct EigenFrame {
    RealVector energies;  // ascending
    Matrix vectors;       // columns |n>
};

EigenFrame eigen_frame(const Matrix& h);

struct EigenPathOptions {
    double eps_gap_rel = 1e-10;   // degeneracy threshold relative to |H|
    double min_overlap = 0.9;     // per-mode overlap required between neighbours
    int max_refinement = 12;      // bisection depth when the overlap test fails
};

struct Degeneracy {
    std::size_t grid_index;
    Index m, n;
    double gap;
};

// Eigen-decomposition along a grid with maximal-overlap gauge: labels follow
// states by overlap and <n(t_i)|n(t_{i+1})> is real positive.
struct EigenPath {
    std::vector<double> grid;
    std::vector<RealVector> energies;
    std::vector<Matrix> vectors;
    std::vector<Degeneracy> degeneracies;
    std::string gauge = "smooth-overlap";

    Index dim() const { return vectors.empty() ? 0 : vectors.front().rows(); }
    std::size_t size() const { return grid.size(); }
};

EigenPath eigenpath(const HamiltonianPath& h, const std::vector<double>& grid, const EigenPathOptions& options = {});

// Throws DegeneracyError when two levels are closer than eps_gap_rel * |H|.
void require_gaps(const RealVector& energies, double eps_gap_rel, const char* module);

// i hbar sum_{m != n} |n><n|dH|m>/(E_m - E_n) <m|
HermitianOperator exact_cd(const Matrix& h, const Matrix& dh, double eps_gap_rel = 1e-10);
HermitianOperator exact_cd(const HamiltonianPath& h, double t, double eps_gap_rel = 1e-10);
// CD operator in the eigenbasis of a precomputed frame (same formula).
Matrix exact_cd_in_frame(const EigenFrame& frame, const Matrix& dh, double eps_gap_rel = 1e-10);

// A_i(lambda) with exact_cd = sum_i dlambda_i A_i.
HermitianOperator adiabatic_gauge_potential(const ParametricHamiltonian& h, const RealVector& lambda, Index index,
                                            double eps_gap_rel = 1e-10);

HamiltonianPath exact_cd_path(const HamiltonianPath& h, double eps_gap_rel = 1e-10);

struct AdiabaticState {
    StateTrajectory trajectory;
    std::vector<RealVector> dynamical_phases;  // (1/hbar) int_0^t E_n
    std::vector<RealVector> geometric_phases;  // -sum arg<n_j|n_{j+1}>; zero in the smooth gauge
    Vector c0;
};

AdiabaticState adiabatic_state(const EigenPath& path, const Vector& c0);

// <n|d_t n> per mode at a grid point by centered differences of the gauge-smoothed vectors.
Vector berry_connection(const EigenPath& path, std::size_t index);
// W_nm = <n|d_t m> at a grid point from centered differences.
Matrix derivative_couplings_fd(const EigenPath& path, std::size_t index);

// gamma_n = -arg prod <n_i|n_{i+1}> over a path whose last Hamiltonian equals the first.
double berry_phase(const EigenPath& path, Index n);

// hbar |<n|dH|m>| / (E_m - E_n)^2
double adiabaticity_metric(const Matrix& h, const Matrix& dh, Index m, Index n, double eps_gap_rel = 1e-10);

// g_ij = Re <d_i n|(1 - |n><n|)|d_j n>, five-point differences in lambda.
RealMatrix quantum_geometric_tensor(const ParametricHamiltonian& h, const RealVector& lambda, Index n,
                                    double rel_step = 1e-3, double eps_gap_rel = 1e-10);

}  // namespace sforge
