#include "doctest.h"
#include "helpers.hpp"

#include "sforge/digitized.hpp"
#include "sforge/dynamics.hpp"
#include "sforge/models.hpp"
#include "sforge/qsl.hpp"
#include "sforge/spectral.hpp"

using namespace sforge;
using namespace testing_helpers;

namespace {

// Instantaneous ground states along a grid as a trajectory.
StateTrajectory ground_trajectory(const HamiltonianPath& h, const std::vector<double>& grid) {
    const EigenPath p = eigenpath(h, grid);
    StateTrajectory t;
    t.grid = grid;
    for (const auto& v : p.vectors) t.states.push_back(v.col(0));
    return t;
}

}  // namespace

TEST_CASE("standard deviation") {
    Vector plus(2);
    plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    CHECK(standard_deviation(pauli_z(), plus) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(standard_deviation(pauli_x(), plus) < 1e-15);
    CHECK_THROWS_AS(standard_deviation(pauli_z(), Vector::Zero(3)), DimensionMismatch);
}

TEST_CASE("continuous bound holds for bare versus CD-driven LZ") {
    const HamiltonianPath h = along(models::landau_zener(1.0), ParamSchedule::smooth(-3, 3, 3.0));
    const HamiltonianPath driven = h + exact_cd_path(h);
    const auto grid = uniform_grid(0, 3, 601);
    const Ket g0(eigen_frame(h(0)).vectors.col(0));
    const StateTrajectory ref = evolve(driven, g0, grid, 10);
    const StateTrajectory other = evolve(h, g0, grid, 10);
    const BoundReport r = qsl_continuous(driven, h, ref, &other);
    CHECK(r.worst_violation() < 1e-8);
    CHECK(r.angle(r.angle.size() - 1) > 0.0);
    CHECK_FALSE(r.vacuous);
}

TEST_CASE("single-eigenstate integrand is the quantum geometric tensor") {
    const ParametricHamiltonian lz = models::landau_zener(1.0);
    const ParamSchedule sched = ParamSchedule::smooth(-2, 2, 2.0);
    const HamiltonianPath h = along(lz, sched);
    const HamiltonianPath cd = exact_cd_path(h);
    for (double t : {0.3, 1.0, 1.6}) {
        const Vector n = eigen_frame(h(t)).vectors.col(0);
        const double lhs = standard_deviation(cd(t), n);
        const RealMatrix g = quantum_geometric_tensor(lz, sched.lambda(t), 0);
        const double rhs = hbar() * std::abs(sched.dlambda(t)(0)) * std::sqrt(g(0, 0));
        CHECK(std::abs(lhs - rhs) < 1e-8);
    }
}

TEST_CASE("angle depends only on the path for eigenstate references") {
    const ParametricHamiltonian lz = models::landau_zener(1.0);
    auto angle = [&](const ParamSchedule& s) {
        const HamiltonianPath h = along(lz, s);
        const auto grid = uniform_grid(0, s.duration(), 4001);
        const BoundReport r = qsl_continuous(h + exact_cd_path(h), h, ground_trajectory(h, grid));
        return r.angle(r.angle.size() - 1);
    };
    const double a = angle(ParamSchedule::linear(-2, 2, 1.0));
    const double b = angle(ParamSchedule::smooth(-2, 2, 5.0));
    // int |dlambda| sqrt(g) = arctan(2) for lambda sigma_z + sigma_x.
    CHECK(std::abs(a - std::atan(2.0)) < 1e-8);
    CHECK(std::abs(a - b) < 1e-8);
}

TEST_CASE("discrete bound holds for digitized against exact CD driving") {
    const double T = 1.0;
    const HamiltonianPath h = along(models::landau_zener(1.0), ParamSchedule::linear(-5, 5, T));
    const HamiltonianPath cd = exact_cd_path(h);
    const Ket g0(eigen_frame(h(0)).vectors.col(0));
    for (int m : {8, 32, 128}) {
        const TrotterPlan plan{m, T};
        std::vector<Matrix> exact;
        for (int n = 1; n <= m; ++n) exact.push_back(propagator(h + cd, (n - 1) * plan.dt(), n * plan.dt(), 40));
        const std::vector<Matrix> digital = trotter_steps(h, cd, plan);
        StateTrajectory ref;
        Vector psi = g0.vector();
        ref.states.push_back(psi);
        for (const auto& u : exact) ref.states.push_back(psi = u * psi);
        const BoundReport r = qsl_discrete(exact, digital, ref, plan);
        CHECK(r.worst_violation() < 1e-8);
        CHECK(r.grid.size() == static_cast<std::size_t>(m + 1));
    }
}

TEST_CASE("large angles mark the bound vacuous") {
    const HamiltonianPath a = constant_path(pauli_z()), b = constant_path(Matrix(Matrix::Zero(2, 2)));
    Vector plus(2);
    plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    const auto grid = uniform_grid(0, 3, 31);
    const StateTrajectory ref = evolve(a, Ket(plus), grid, 4);
    const StateTrajectory other = evolve(b, Ket(plus), grid, 4);
    const BoundReport r = qsl_continuous(a, b, ref, &other);
    CHECK(r.vacuous);
    CHECK_FALSE(r.warnings.empty());
    CHECK(r.bound(30) == 0.0);
    CHECK(r.worst_violation() < 1e-8);
}
