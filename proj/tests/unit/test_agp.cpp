#include "doctest.h"
#include "helpers.hpp"

#include "sforge/agp.hpp"
#include "sforge/models.hpp"
#include "sforge/spectral.hpp"

using namespace sforge;
using namespace testing_helpers;

namespace {
struct Instance {
    Matrix h, dh;
};
Instance random_instance(Index d, std::uint64_t seed) {
    return {models::random_hermitian(d, seed), models::random_hermitian(d, seed + 1000)};
}
double dist(const Matrix& a, const Matrix& b) { return frobenius_norm(a - b); }
}  // namespace

TEST_CASE("variational system on the Landau-Zener model") {
    const double lam = 0.8, delta = 1.2, rate = 0.5;
    const Matrix h = lam * pauli_z() + delta * pauli_x(), dh = rate * pauli_z();
    const LinearCDSystem sys = variational_system(h, dh, 1);
    REQUIRE(sys.size() == 1);
    const CDCoefficients a = solve_cd(sys);
    CHECK(std::abs(unscaled_coefficients(sys, a)(0) + 1.0 / (4.0 * (lam * lam + delta * delta))) < 1e-14);
    const Matrix cd = assemble_cd(sys, a).matrix();
    CHECK(max_abs(cd - (-rate * delta / (2.0 * (lam * lam + delta * delta))) * pauli_y()) < 1e-14);
    CHECK(max_abs(cd - exact_cd(h, dh).matrix()) < 1e-14);
}

TEST_CASE("commuting family needs no CD") {
    const Matrix h = pauli_z(), dh = 0.3 * pauli_z();
    const LinearCDSystem sys = variational_system(h, dh, 3);
    CHECK(sys.u.isZero(0.0));
    const CDCoefficients a = solve_cd(sys);
    CHECK(a.a.isZero(0.0));
    CHECK(max_abs(assemble_cd(sys, a).matrix()) == 0.0);
}

TEST_CASE("full-order variational CD matches exact CD") {
    for (Index d : {2, 3, 4}) {
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            const Instance in = random_instance(d, seed);
            const int k = full_order(in.h, in.dh);
            const LinearCDSystem sys = variational_system(in.h, in.dh, k);
            const Matrix cd = assemble_cd(sys, solve_cd(sys)).matrix();
            CHECK(dist(cd, exact_cd(in.h, in.dh).matrix()) < 1e-7);
        }
    }
}

TEST_CASE("variational system matrix invariants") {
    const Instance in = random_instance(4, 5);
    for (int k : {1, 2, 4}) {
        const LinearCDSystem sys = variational_system(in.h, in.dh, k);
        CHECK((sys.B - sys.B.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * sys.B.cwiseAbs().maxCoeff());
        Eigen::SelfAdjointEigenSolver<RealMatrix> es(sys.B);
        CHECK(es.eigenvalues().minCoeff() >= -1e-10 * es.eigenvalues().cwiseAbs().maxCoeff());
    }
}

TEST_CASE("algebraic system") {
    const double lam = -0.4, delta = 0.9, rate = 1.3;
    const Matrix h = lam * pauli_z() + delta * pauli_x(), dh = rate * pauli_z();
    const OperatorBasis b = pauli_basis(1);
    const LinearCDSystem sys = algebraic_system(h, dh, b.subset({1}));
    CHECK(max_abs(assemble_cd(sys, solve_cd(sys)).matrix() - exact_cd(h, dh).matrix()) < 1e-14);
    CHECK_THROWS_AS(algebraic_system(h, dh, OperatorBasis(2, {}, {})), InvalidArgument);

    // A trial operator commuting with H and dH decouples with zero coefficient.
    const Matrix h2 = lam * pauli_string("ZI") + delta * pauli_string("XI"), dh2 = rate * pauli_string("ZI");
    const OperatorBasis b2 = pauli_basis(2);
    std::vector<std::size_t> pick;
    for (std::size_t i = 0; i < b2.size(); ++i)
        if (b2.label(i) == "YI" || b2.label(i) == "IZ") pick.push_back(i);
    const LinearCDSystem sys2 = algebraic_system(h2, dh2, b2.subset(pick));
    const CDCoefficients a2 = solve_cd(sys2);
    for (std::size_t i = 0; i < pick.size(); ++i)
        if (b2.label(pick[i]) == "IZ") CHECK(std::abs(a2.a(static_cast<Index>(i))) < 1e-10);
    // H2 is degenerate, so the spectral route is unavailable; the answer is the single-qubit term on YI.
    const Matrix expect2 = (-rate * delta / (2.0 * (lam * lam + delta * delta))) * pauli_string("YI");
    CHECK(max_abs(assemble_cd(sys2, a2).matrix() - expect2) < 1e-13);
}

TEST_CASE("algebraic closure reproduces the variational construction") {
    const OperatorBasis b = pauli_basis(2);
    for (std::uint64_t seed = 20; seed < 23; ++seed) {
        const Instance in = random_instance(4, seed);
        const OperatorBasis closure = odd_commutator_closure(in.h, in.dh, b);
        const LinearCDSystem alg = algebraic_system(in.h, in.dh, closure);
        const LinearCDSystem var = variational_system(in.h, in.dh, full_order(in.h, in.dh));
        const Vector ca = expand_in_basis(assemble_cd(alg, solve_cd(alg)).matrix(), b).coefficients;
        const Vector cv = expand_in_basis(assemble_cd(var, solve_cd(var)).matrix(), b).coefficients;
        CHECK((ca - cv).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("Krylov chain on the Landau-Zener model") {
    const double lam = 0.7, delta = 1.1, rate = -0.6;
    const KrylovChain c = krylov_chain(lam * pauli_z() + delta * pauli_x(), rate * pauli_z());
    REQUIRE(c.K() == 3);
    CHECK(c.terminated);
    CHECK(std::abs(c.b[0] - std::abs(rate)) < 1e-14);
    CHECK(std::abs(c.b[1] - 2 * delta) < 1e-13);
    CHECK(std::abs(c.b[2] - 2 * std::abs(lam)) < 1e-13);
    CHECK(c.b_next < 1e-10 * c.b[0]);

    const LinearCDSystem sys = krylov_system(c);
    REQUIRE(sys.size() == 1);
    CHECK(std::abs(sys.B(0, 0) - 4 * (delta * delta + lam * lam)) < 1e-12);
    CHECK(std::abs(sys.u(0) + 2 * std::abs(rate) * delta) < 1e-13);
    CHECK(max_abs(assemble_cd(sys, solve_cd(sys)).matrix() - exact_cd(lam * pauli_z() + delta * pauli_x(), rate * pauli_z()).matrix()) < 1e-13);

    const KrylovChain c0 = krylov_chain(delta * pauli_x(), rate * pauli_z());
    CHECK(c0.K() == 2);
    CHECK_THROWS_AS(krylov_chain(pauli_x(), Matrix::Zero(2, 2)), InvalidArgument);
    const LinearCDSystem empty = krylov_system(krylov_chain(pauli_z(), pauli_z()));
    CHECK(empty.identically_zero);
    CHECK(solve_cd(empty).a.size() == 0);
}

TEST_CASE("Krylov chain invariants") {
    for (std::uint64_t seed = 30; seed < 34; ++seed) {
        const Instance in = random_instance(4, seed);
        const KrylovChain c = krylov_chain(in.h, in.dh);
        CHECK(c.K() <= 13);
        for (Index j = 0; j < c.K(); ++j) {
            CHECK(c.b[static_cast<std::size_t>(j)] > 0.0);
            const Matrix& oj = c.basis[static_cast<std::size_t>(j)];
            CHECK(std::abs(frobenius_inner(oj, oj) - 1.0) < 1e-10);
            // Alternating Hermitian / anti-Hermitian.
            const double sign = j % 2 == 0 ? 1.0 : -1.0;
            CHECK(max_abs(oj - sign * oj.adjoint()) < 1e-10);
            for (Index k = 0; k < j; ++k) CHECK(std::abs(frobenius_inner(c.basis[static_cast<std::size_t>(k)], oj)) < 1e-8);
        }
        const LinearCDSystem sys = krylov_system(c);
        const double bn = sys.B.norm();
        for (Index k = 0; k < sys.size(); ++k)
            for (Index l = 0; l < sys.size(); ++l)
                if (std::abs(k - l) > 1) CHECK(std::abs(sys.B(k, l)) <= 1e-10 * bn);
        CHECK(dist(assemble_cd(sys, solve_cd(sys)).matrix(), exact_cd(in.h, in.dh).matrix()) < 1e-7);
    }
}

TEST_CASE("truncated Krylov chain matches the variational system at the same order") {
    const Instance in = random_instance(4, 41);
    for (int order : {1, 2, 3}) {
        const LinearCDSystem kr = krylov_system(krylov_chain(in.h, in.dh, 2 * order));
        REQUIRE(kr.size() == order);
        const LinearCDSystem var = variational_system(in.h, in.dh, order);
        CHECK(dist(assemble_cd(kr, solve_cd(kr)).matrix(), assemble_cd(var, solve_cd(var)).matrix()) < 1e-7);
    }
}

TEST_CASE("dense solve residual") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n(0.0, 1.0);
    for (Index k : {3, 6, 10}) {
        RealMatrix m(k, k);
        RealVector u(k);
        for (Index i = 0; i < k; ++i) {
            u(i) = n(rng);
            for (Index j = 0; j < k; ++j) m(i, j) = n(rng);
        }
        LinearCDSystem sys;
        sys.B = m.transpose() * m;
        sys.u = u;
        sys.method = CDMethod::algebraic;
        const CDCoefficients a = solve_cd(sys);
        CHECK((sys.B * a.a - u).norm() <= 1e-9 * (sys.B.norm() * a.a.norm() + u.norm()));
        CHECK_FALSE(a.rank_deficient);
    }
    // Rank deficiency is resolved by the minimum-norm solution.
    LinearCDSystem sing;
    sing.B = RealMatrix::Ones(2, 2);
    sing.u = RealVector::Ones(2);
    const CDCoefficients a = solve_cd(sing);
    CHECK(a.rank_deficient);
    CHECK(std::abs(a.a(0) - 0.5) < 1e-14);
    CHECK(std::abs(a.a(1) - 0.5) < 1e-14);
}

TEST_CASE("action is minimized by the solved coefficients") {
    const Instance in = random_instance(3, 51);
    CHECK(std::abs(action_value(in.h, in.dh, Matrix::Zero(3, 3)) - std::pow(frobenius_norm(in.dh), 2)) < 1e-14);

    // Exact CD removes the off-diagonal part of dH in the eigenbasis.
    const EigenFrame f = eigen_frame(in.h);
    const Matrix m = f.vectors.adjoint() * in.dh * f.vectors;
    const double diag = m.diagonal().squaredNorm() / 3.0;
    CHECK(std::abs(action_value(in.h, in.dh, exact_cd(in.h, in.dh).matrix()) - diag) < 1e-12);

    double previous = action_value(in.h, in.dh, Matrix::Zero(3, 3));
    for (int k = 1; k <= full_order(in.h, in.dh); ++k) {
        const LinearCDSystem sys = variational_system(in.h, in.dh, k);
        const CDCoefficients a = solve_cd(sys);
        const Matrix cd = assemble_cd(sys, a).matrix();
        const double s = action_value(in.h, in.dh, cd);
        CHECK(s <= previous + 1e-12);
        previous = s;
        const RealVector g = action_gradient(in.h, in.dh, cd, sys.basis_ops);
        CHECK(g.cwiseAbs().maxCoeff() < 1e-7 * std::max(1.0, std::pow(frobenius_norm(in.dh), 2)));
        for (Index i = 0; i < sys.size(); ++i)
            for (double delta : {1e-4, -1e-4}) {
                const Matrix moved = cd + delta * sys.basis_ops[static_cast<std::size_t>(i)];
                CHECK(action_value(in.h, in.dh, moved) > s);
            }
    }
}

TEST_CASE("first-order Ising counterdiabatic term is a sum of single-site Y") {
    const ParametricHamiltonian chain = models::ising_chain({3, 1.0, 0.7, 0.0, 0});
    RealVector lam(1);
    lam << 0.4;
    const Matrix h = chain.value(lam), dh = 0.8 * chain.partial(lam, 0);
    const LinearCDSystem sys = variational_system(h, dh, 1);
    const Matrix cd = assemble_cd(sys, solve_cd(sys)).matrix();
    const OperatorBasis b = pauli_basis(3);
    const Vector c = expand_in_basis(cd, b).coefficients;
    double on_y = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        const std::string& l = b.label(i);
        const bool single_y = std::count(l.begin(), l.end(), 'Y') == 1 && std::count(l.begin(), l.end(), 'I') == 2;
        if (single_y) on_y += std::abs(c(static_cast<Index>(i)));
        else CHECK(std::abs(c(static_cast<Index>(i))) < 1e-12);
    }
    CHECK(on_y > 0.1);
}

TEST_CASE("regularized integral identity agrees with the linear system") {
    for (std::uint64_t seed = 60; seed < 63; ++seed) {
        const Instance in = random_instance(3, seed);
        CHECK(max_abs(cd_integral_identity(in.h, in.dh) - exact_cd(in.h, in.dh).matrix()) < 1e-7);
    }
}

TEST_CASE("hbar scaling of the approximate CD") {
    const ScopedHbar scope(2.0);
    const Instance in = random_instance(3, 71);
    const LinearCDSystem sys = variational_system(in.h, in.dh, full_order(in.h, in.dh));
    CHECK(dist(assemble_cd(sys, solve_cd(sys)).matrix(), exact_cd(in.h, in.dh).matrix()) < 1e-7);
}
