#pragma once

#include <cstdint>

#include "sforge/core.hpp"

namespace sforge::models {

// H(lambda) = lambda sigma_z + delta sigma_x
ParametricHamiltonian landau_zener(double delta);

// H(b) = b_x sigma_x + b_y sigma_y + b_z sigma_z with lambda = (b_x, b_y) and fixed b_z.
ParametricHamiltonian spin_in_plane_field(double bz);

struct IsingChain {
    int n_sites = 4;
    double coupling = 1.0;     // J
    double transverse = 1.0;   // g
    double disorder = 0.0;     // relative spread of J_i and static longitudinal offsets
    std::uint64_t seed = 0;
};

// H(lambda) = -sum J_i Z_i Z_{i+1} - g sum X_i - sum (lambda + h_i) Z_i, open chain.
ParametricHamiltonian ising_chain(const IsingChain& chain);

// GUE-like Hermitian matrix with unit normalized Frobenius norm.
Matrix random_hermitian(Index dim, std::uint64_t seed);

// H(lambda) = H0 + lambda V with independent random H0 and V.
ParametricHamiltonian random_linear_path(Index dim, std::uint64_t seed);

}  // namespace sforge::models
