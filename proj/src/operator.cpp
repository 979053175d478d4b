#include "sforge/operator.hpp"

#include <cmath>
#include <sstream>

namespace sforge {

cplx frobenius_inner(const Matrix& x, const Matrix& y) {
    require_same_dim(x, y, "operator-core");
    // Tr(X^dagger Y) = sum conj(x_ij) y_ij
    return (x.array().conjugate() * y.array()).sum() / static_cast<double>(x.rows());
}

double frobenius_norm(const Matrix& x) {
    if (x.rows() == 0) return 0.0;
    return x.norm() / std::sqrt(static_cast<double>(x.rows()));
}

Matrix commutator(const Matrix& x, const Matrix& y) {
    require_same_dim(x, y, "operator-core");
    return x * y - y * x;
}

Matrix liouvillian_apply(const Matrix& h, const Matrix& x) { return commutator(h, x); }

Matrix nested_commutator(const Matrix& h, const Matrix& dh, int k, int k_max) {
    require_same_dim(h, dh, "operator-core");
    if (k < 0 || k > k_max) {
        std::ostringstream msg;
        msg << "nested commutator order " << k << " outside [0, " << k_max << "]";
        throw InvalidArgument("operator-core", msg.str());
    }
    Matrix o = dh;
    for (int i = 0; i < k; ++i) o = commutator(h, o);
    return o;
}

OperatorBasis::OperatorBasis(Index dim, std::vector<std::string> labels, std::vector<Matrix> elements)
    : dim_(dim), labels_(std::move(labels)), elements_(std::move(elements)) {
    if (labels_.size() != elements_.size()) throw InvalidArgument("operator-core", "one label per basis element");
    for (const auto& e : elements_) {
        if (e.rows() != dim_ || e.cols() != dim_) throw DimensionMismatch("operator-core", "basis element dimension");
    }
}

Matrix OperatorBasis::element(std::size_t i) const {
    if (pauli_qubits_ > 0) return pauli_string(labels_.at(i));
    return elements_.at(i);
}

OperatorBasis OperatorBasis::subset(const std::vector<std::size_t>& indices) const {
    std::vector<std::string> labels;
    std::vector<Matrix> elements;
    for (std::size_t i : indices) {
        labels.push_back(labels_.at(i));
        elements.push_back(element(i));
    }
    return OperatorBasis(dim_, std::move(labels), std::move(elements));
}

Matrix pauli_string(const std::string& label) {
    const int n = static_cast<int>(label.size());
    if (n < 1 || n > max_pauli_qubits) throw InvalidArgument("operator-core", "Pauli string length out of range");
    const Index dim = Index{1} << n;
    // Site 0 is the most significant bit of the computational index.
    Index flip = 0;
    Index zmask = 0;
    int n_y = 0;
    for (int s = 0; s < n; ++s) {
        const Index bit = Index{1} << (n - 1 - s);
        switch (label[s]) {
        case 'I': break;
        case 'X': flip |= bit; break;
        case 'Y': flip |= bit; zmask |= bit; ++n_y; break;
        case 'Z': zmask |= bit; break;
        default: throw InvalidArgument("operator-core", "Pauli label must use I, X, Y, Z");
        }
    }
    // Y = i X Z acting on one site, so a string is i^{n_y} X^flip Z^zmask.
    static const cplx ipow[4] = {cplx{1, 0}, cplx{0, 1}, cplx{-1, 0}, cplx{0, -1}};
    const cplx global = ipow[n_y % 4];
    Matrix m = Matrix::Zero(dim, dim);
    for (Index col = 0; col < dim; ++col) {
        const bool odd = __builtin_popcountll(static_cast<unsigned long long>(col & zmask)) & 1;
        m(col ^ flip, col) = odd ? -global : global;
    }
    return m;
}

OperatorBasis pauli_basis(int n_qubits) {
    if (n_qubits < 1 || n_qubits > max_pauli_qubits) {
        throw InvalidArgument("operator-core", "pauli_basis needs 1 <= n_qubits <= 10");
    }
    static const char letters[4] = {'I', 'X', 'Y', 'Z'};
    const long long count = 1LL << (2 * n_qubits);
    OperatorBasis basis;
    basis.dim_ = Index{1} << n_qubits;
    basis.pauli_qubits_ = n_qubits;
    basis.labels_.reserve(static_cast<std::size_t>(count - 1));
    for (long long code = 1; code < count; ++code) {
        std::string label(static_cast<std::size_t>(n_qubits), 'I');
        for (int s = 0; s < n_qubits; ++s) label[s] = letters[(code >> (2 * (n_qubits - 1 - s))) & 3];
        basis.labels_.push_back(std::move(label));
    }
    return basis;
}

OperatorBasis gell_mann_basis(Index dim) {
    if (dim < 2) throw InvalidArgument("operator-core", "Gell-Mann basis needs dim >= 2");
    const double scale = std::sqrt(static_cast<double>(dim) / 2.0);
    std::vector<std::string> labels;
    std::vector<Matrix> elements;
    for (Index j = 0; j < dim; ++j) {
        for (Index k = j + 1; k < dim; ++k) {
            Matrix s = Matrix::Zero(dim, dim);
            s(j, k) = s(k, j) = scale;
            labels.push_back("S" + std::to_string(j) + "_" + std::to_string(k));
            elements.push_back(s);
            Matrix a = Matrix::Zero(dim, dim);
            a(j, k) = -I * scale;
            a(k, j) = I * scale;
            labels.push_back("A" + std::to_string(j) + "_" + std::to_string(k));
            elements.push_back(a);
        }
    }
    for (Index l = 1; l < dim; ++l) {
        Matrix d = Matrix::Zero(dim, dim);
        const double c = scale * std::sqrt(2.0 / static_cast<double>(l * (l + 1)));
        for (Index j = 0; j < l; ++j) d(j, j) = c;
        d(l, l) = -c * static_cast<double>(l);
        labels.push_back("D" + std::to_string(l));
        elements.push_back(d);
    }
    return OperatorBasis(dim, std::move(labels), std::move(elements));
}

OperatorBasis standard_basis(Index dim) {
    if (dim >= 2 && (dim & (dim - 1)) == 0) {
        int n = 0;
        while ((Index{1} << n) < dim) ++n;
        if (n <= max_pauli_qubits) return pauli_basis(n);
    }
    return gell_mann_basis(dim);
}

Expansion expand_in_basis(const Matrix& x, const OperatorBasis& basis, double spanning_tolerance) {
    if (x.rows() != basis.dim() || x.cols() != basis.dim()) {
        throw DimensionMismatch("operator-core", "operator and basis dimensions differ");
    }
    Expansion out;
    out.coefficients.resize(static_cast<Index>(basis.size()));
    Matrix rebuilt = Matrix::Zero(x.rows(), x.cols());
    for (std::size_t mu = 0; mu < basis.size(); ++mu) {
        const Matrix l = basis.element(mu);
        const cplx c = frobenius_inner(l, x);
        out.coefficients(static_cast<Index>(mu)) = c;
        rebuilt += c * l;
    }
    out.residual = frobenius_norm(x - rebuilt);
    if (out.residual > spanning_tolerance * std::max(1.0, frobenius_norm(x))) {
        std::ostringstream msg;
        msg << "basis does not span the operator (residual " << out.residual << ")";
        throw SpanningFailure("operator-core", msg.str());
    }
    return out;
}

Matrix reconstruct(const Vector& coefficients, const OperatorBasis& basis) {
    if (static_cast<std::size_t>(coefficients.size()) != basis.size()) {
        throw DimensionMismatch("operator-core", "coefficient count differs from basis size");
    }
    Matrix out = Matrix::Zero(basis.dim(), basis.dim());
    for (std::size_t mu = 0; mu < basis.size(); ++mu) out += coefficients(static_cast<Index>(mu)) * basis.element(mu);
    return out;
}

}  // namespace sforge
