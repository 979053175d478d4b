#pragma once

#include <memory>
#include <string>
#include <vector>

#include "sforge/core.hpp"
#include "sforge/operator.hpp"

namespace sforge {

enum class CDMethod { variational_nc, algebraic, krylov };
std::string to_string(CDMethod m);

struct ExtendedSystem;    // high-precision copy of a variational system
struct ExtendedSolution;  // high-precision solution of such a system

// B a = u with H_cd = sum_k a_k basis_ops[k].
//
// Variational systems are stored in the norm-rescaled basis
// basis_ops[k] = i hbar O_{2k-1} / |O_{2k-1}|; scale[k] = |O_{2k-1}| maps the
// coefficients back to the unscaled nested-commutator ansatz.
// Algebraic systems use the Hermitian trial operators as basis_ops = hbar L_k,
// which keeps both a and u real.
struct LinearCDSystem {
    RealMatrix B;
    RealVector u;
    CDMethod method = CDMethod::variational_nc;
    std::vector<Matrix> basis_ops;
    RealVector scale;
    bool tridiagonal = false;
    bool identically_zero = false;  // Krylov chain with K < 2
    std::shared_ptr<const ExtendedSystem> extended;

    Index size() const { return u.size(); }
};

struct CDCoefficients {
    RealVector a;
    Index rank = 0;
    bool rank_deficient = false;
    std::shared_ptr<const ExtendedSolution> extended;
};

// Arithmetic used for the variational route. `automatic` picks plain double
// for K_tr <= 2 and otherwise enough binary-float digits for the Hankel
// system, whose condition number grows geometrically with K_tr.
enum class Precision { automatic, double_precision, digits50, digits100, digits250 };

struct VariationalOptions {
    Precision precision = Precision::automatic;
};

LinearCDSystem variational_system(const Matrix& h, const Matrix& dh, int k_tr, const VariationalOptions& options = {});
// Coefficients of the ansatz sum_k a_k i hbar O_{2k-1} in unscaled form.
RealVector unscaled_coefficients(const LinearCDSystem& system, const CDCoefficients& coeffs);

LinearCDSystem algebraic_system(const Matrix& h, const Matrix& dh, const OperatorBasis& trial);

// Basis elements reachable from L_H dH by repeated application of L_H^2.
OperatorBasis odd_commutator_closure(const Matrix& h, const Matrix& dh, const OperatorBasis& basis, double support_tol = 1e-10);

struct KrylovChain {
    std::vector<Matrix> basis;  // O_0 .. O_{K-1}, orthonormal
    std::vector<double> b;      // b_0 .. b_{K-1}
    double b_next = 0.0;        // b_K; below the termination threshold when terminated
    bool terminated = false;
    Index K() const { return static_cast<Index>(basis.size()); }
};

// Lanczos recursion O_k = (L_H O_{k-1} - b_{k-1} O_{k-2}) / b_k with full
// re-orthogonalization, accumulated in long double. k_max = 0 means D^2 - D + 1.
KrylovChain krylov_chain(const Matrix& h, const Matrix& dh, Index k_max = 0, double term_tol_rel = 1e-10);
LinearCDSystem krylov_system(const KrylovChain& chain);

CDCoefficients solve_cd(const LinearCDSystem& system);
HermitianOperator assemble_cd(const LinearCDSystem& system, const CDCoefficients& coeffs);
// Full-order truncation floor(K/2) from the Krylov dimension.
int full_order(const Matrix& h, const Matrix& dh);

// |dH - (i/hbar)[H, H_cd]|^2
double action_value(const Matrix& h, const Matrix& dh, const Matrix& h_cd);
// d/d eps of action_value(H_cd + eps P) for each direction P.
RealVector action_gradient(const Matrix& h, const Matrix& dh, const Matrix& h_cd, const std::vector<Matrix>& directions);

// Regularized u-integral of the fictitious Heisenberg evolution evaluated per
// Bohr frequency for each eta, then Richardson-extrapolated to eta -> 0.
// Validation only; production CD always goes through B a = u.
Matrix cd_integral_identity(const Matrix& h, const Matrix& dh, const std::vector<double>& etas = {1e-2, 1e-3, 1e-4});

}  // namespace sforge
