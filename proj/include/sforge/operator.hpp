#pragma once

#include <string>
#include <vector>

#include "sforge/core.hpp"

namespace sforge {

// (X|Y) = Tr(X^dagger Y) / D
cplx frobenius_inner(const Matrix& x, const Matrix& y);
double frobenius_norm(const Matrix& x);

Matrix commutator(const Matrix& x, const Matrix& y);
Matrix liouvillian_apply(const Matrix& h, const Matrix& x);

inline constexpr int default_k_max = 12;
// O_k = L_H^k dH; Hermitian for even k, anti-Hermitian for odd k.
Matrix nested_commutator(const Matrix& h, const Matrix& dh, int k, int k_max = default_k_max);

// Ordered traceless orthonormal operators with labels. Pauli bases are
// generated on demand from their labels so that large registers stay cheap.
class OperatorBasis {
public:
    OperatorBasis() = default;
    OperatorBasis(Index dim, std::vector<std::string> labels, std::vector<Matrix> elements);

    Index dim() const { return dim_; }
    std::size_t size() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& label(std::size_t i) const { return labels_.at(i); }
    Matrix element(std::size_t i) const;
    OperatorBasis subset(const std::vector<std::size_t>& indices) const;

    friend OperatorBasis pauli_basis(int n_qubits);

private:
    Index dim_ = 0;
    int pauli_qubits_ = 0;
    std::vector<std::string> labels_;
    std::vector<Matrix> elements_;
};

inline constexpr int max_pauli_qubits = 10;
OperatorBasis pauli_basis(int n_qubits);
// Generalized Gell-Mann matrices scaled to unit Frobenius norm; any D >= 2.
OperatorBasis gell_mann_basis(Index dim);
// Pauli basis for powers of two, Gell-Mann otherwise.
OperatorBasis standard_basis(Index dim);

Matrix pauli_string(const std::string& label);

struct Expansion {
    Vector coefficients;
    double residual = 0.0;
};

// c_mu = (L_mu|X). Throws SpanningFailure when the reconstruction residual
// exceeds spanning_tolerance relative to max(1, |X|).
Expansion expand_in_basis(const Matrix& x, const OperatorBasis& basis, double spanning_tolerance = 1e-8);
Matrix reconstruct(const Vector& coefficients, const OperatorBasis& basis);

}  // namespace sforge
