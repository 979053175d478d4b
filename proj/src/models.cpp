#include "sforge/models.hpp"

#include <random>

#include "sforge/operator.hpp"

namespace sforge::models {

ParametricHamiltonian landau_zener(double delta) {
    ParametricHamiltonian h;
    h.dim = 2;
    h.n_params = 1;
    const Matrix sx = pauli_x(), sz = pauli_z();
    h.value = [=](const RealVector& lam) -> Matrix { return lam(0) * sz + delta * sx; };
    h.partial = [=](const RealVector&, Index) -> Matrix { return sz; };
    return h;
}

ParametricHamiltonian spin_in_plane_field(double bz) {
    ParametricHamiltonian h;
    h.dim = 2;
    h.n_params = 2;
    const Matrix sx = pauli_x(), sy = pauli_y(), sz = pauli_z();
    h.value = [=](const RealVector& lam) -> Matrix { return lam(0) * sx + lam(1) * sy + bz * sz; };
    h.partial = [=](const RealVector&, Index i) -> Matrix { return i == 0 ? sx : sy; };
    return h;
}

namespace {
std::string site_label(int n, int site, char a, int site2 = -1, char b = 'I') {
    std::string s(static_cast<std::size_t>(n), 'I');
    s[static_cast<std::size_t>(site)] = a;
    if (site2 >= 0) s[static_cast<std::size_t>(site2)] = b;
    return s;
}
}  // namespace

ParametricHamiltonian ising_chain(const IsingChain& chain) {
    const int n = chain.n_sites;
    if (n < 2 || n > max_pauli_qubits) throw InvalidArgument("models", "Ising chain length must be in [2, 10]");
    std::mt19937_64 rng(chain.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<double> couplings(static_cast<std::size_t>(n - 1));
    std::vector<double> offsets(static_cast<std::size_t>(n));
    for (auto& j : couplings) j = chain.coupling * (1.0 + chain.disorder * unit(rng));
    for (auto& h : offsets) h = chain.disorder * unit(rng);

    const Index dim = Index{1} << n;
    Matrix fixed = Matrix::Zero(dim, dim);
    Matrix zsum = Matrix::Zero(dim, dim);
    for (int i = 0; i + 1 < n; ++i) fixed -= couplings[static_cast<std::size_t>(i)] * pauli_string(site_label(n, i, 'Z', i + 1, 'Z'));
    for (int i = 0; i < n; ++i) {
        const Matrix z = pauli_string(site_label(n, i, 'Z'));
        fixed -= chain.transverse * pauli_string(site_label(n, i, 'X'));
        fixed -= offsets[static_cast<std::size_t>(i)] * z;
        zsum += z;
    }
    ParametricHamiltonian h;
    h.dim = dim;
    h.n_params = 1;
    h.value = [fixed, zsum](const RealVector& lam) -> Matrix { return fixed - lam(0) * zsum; };
    h.partial = [zsum](const RealVector&, Index) -> Matrix { return -zsum; };
    return h;
}

Matrix random_hermitian(Index dim, std::uint64_t seed) {
    if (dim < 2) throw InvalidArgument("models", "random Hermitian matrix needs dim >= 2");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix a(dim, dim);
    for (Index j = 0; j < dim; ++j)
        for (Index i = 0; i < dim; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            a(i, j) = cplx(re, im);
        }
    Matrix h = (a + a.adjoint()) / 2.0;
    return h / frobenius_norm(h);
}

ParametricHamiltonian random_linear_path(Index dim, std::uint64_t seed) {
    const Matrix h0 = random_hermitian(dim, seed);
    const Matrix v = random_hermitian(dim, seed ^ 0x9e3779b97f4a7c15ULL);
    ParametricHamiltonian h;
    h.dim = dim;
    h.n_params = 1;
    h.value = [h0, v](const RealVector& lam) -> Matrix { return h0 + lam(0) * v; };
    h.partial = [v](const RealVector&, Index) -> Matrix { return v; };
    return h;
}

}  // namespace sforge::models
