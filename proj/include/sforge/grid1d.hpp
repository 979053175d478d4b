#pragma once

#include <functional>
#include <vector>

#include "sforge/core.hpp"
#include "sforge/fastforward.hpp"

namespace sforge {

// Uniform periodic grid x_i = x_min + i dx on [x_min, x_min + length).
struct Grid1D {
    double x_min = -10.0;
    double length = 20.0;
    Index n = 1024;

    double dx() const { return length / static_cast<double>(n); }
    RealVector points() const;
    RealVector wavenumbers() const;
};

// Target amplitude r(x, t) >= 0 of Psi = r e^{i theta} on a grid.
struct GridSystem {
    Grid1D grid;
    double mass = 1.0;
    std::function<RealVector(double)> amplitude;
    std::function<RealVector(double)> amplitude_rate;  // finite differences when empty
    double fd_step = 1e-4;
    double r_floor = 1e-8;

    RealVector r(double t) const;
    RealVector r_dot(double t) const;
};

struct PhaseProfile {
    RealVector theta;      // theta(x_min) = 0
    RealVector gradient;   // d theta / dx
    RealVector flux;       // rho d theta/dx = -(m/hbar) int d_t rho
    bool ill_conditioned = false;
    double stray_flux = 0.0;  // max |flux| where r < r_floor, relative to max |flux|
};

// Solves d_x(r^2 d_x theta) = -(m/hbar) d_t(r^2) with zero gradient at x_min.
PhaseProfile phase_from_continuity(const GridSystem& system, double t);

struct Potentials {
    RealVector re;
    RealVector im;
    Eigen::Array<bool, Eigen::Dynamic, 1> support;  // where the division by r is trusted
};

// Re V and Im V for Psi = r e^{i theta}; theta from the continuity equation.
Potentials potentials_from_wavefunction(const GridSystem& system, double t);

// Re V_FF at time t for phase f = (ds/dt - 1) theta(x, s).
RealVector ff_potential(const GridSystem& system, const TimeRescaling& rescale, double t);

// Initial fast-forward state r(x, 0) e^{i ds/dt(0) theta(x, 0)}.
Vector ff_initial_state(const GridSystem& system, const TimeRescaling& rescale);

// Strang split-step Fourier integration of i hbar d_t Psi = -(hbar^2/2m) Psi'' + V Psi.
Vector split_step_evolve(const Grid1D& grid, double mass, const std::function<RealVector(double)>& potential, Vector psi,
                         double t0, double t1, int steps);

// sqrt(int (|psi|^2 - rho)^2 dx)
double density_l2_distance(const Grid1D& grid, const Vector& psi, const RealVector& rho);

// Spectral derivatives of periodic samples.
RealVector spectral_derivative(const Grid1D& grid, const RealVector& f, int order = 1);

}  // namespace sforge
