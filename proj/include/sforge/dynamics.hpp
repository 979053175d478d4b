#pragma once

#include <vector>

#include "sforge/core.hpp"
#include "sforge/spectral.hpp"

namespace sforge {

// exp(-i H dt / hbar) for Hermitian H via eigen-decomposition.
Matrix step_unitary(const Matrix& h, double dt);

// Midpoint-exponential propagation; states are reported on the grid.
StateTrajectory evolve(const HamiltonianPath& h, const Ket& psi0, const std::vector<double>& grid, int steps_per_interval);

// Time-ordered propagator from t0 to t1 with `steps` midpoint slices.
Matrix propagator(const HamiltonianPath& h, double t0, double t1, int steps);

// c_n(t) = exp(+(i/hbar) int E_n) <n(t)|Psi(t)>
std::vector<Vector> adiabatic_coefficients(const StateTrajectory& traj, const EigenPath& path);

cplx overlap(const Vector& a, const Vector& b);
double fidelity(const Vector& a, const Vector& b);

// Distance between two states after removing the relative global phase.
double phase_insensitive_distance(const Vector& a, const Vector& b);

}  // namespace sforge
