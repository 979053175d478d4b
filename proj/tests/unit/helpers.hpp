#pragma once

#include <random>

#include "sforge/core.hpp"
#include "sforge/operator.hpp"

namespace testing_helpers {

using namespace sforge;

inline Matrix random_matrix(Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix m(d, d);
    for (Index j = 0; j < d; ++j)
        for (Index i = 0; i < d; ++i) m(i, j) = cplx(n(rng), n(rng));
    return m;
}

inline Matrix random_hermitian(Index d, std::mt19937_64& rng) {
    const Matrix a = random_matrix(d, rng);
    return (a + a.adjoint()) / 2.0;
}

inline Matrix random_traceless_hermitian(Index d, std::mt19937_64& rng) {
    Matrix h = random_hermitian(d, rng);
    h -= (h.trace() / static_cast<double>(d)) * Matrix::Identity(d, d);
    return h;
}

inline double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace testing_helpers
