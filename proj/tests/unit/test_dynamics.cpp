#include "doctest.h"
#include "helpers.hpp"

#include "sforge/dynamics.hpp"
#include "sforge/models.hpp"

using namespace sforge;
using namespace testing_helpers;

TEST_CASE("Larmor precession") {
    Vector plus_x(2), plus_y(2);
    plus_x << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    plus_y << 1.0 / std::sqrt(2.0), cplx(0, 1.0 / std::sqrt(2.0));
    const StateTrajectory traj = evolve(constant_path(pauli_z()), Ket(plus_x), {0.0, pi / 4}, 7);
    CHECK(fidelity(traj.states.back(), plus_y) > 1 - 1e-14);
}

TEST_CASE("norm is conserved per step") {
    const auto path = along(models::random_linear_path(5, 3), ParamSchedule::smooth(-1, 2, 4.0));
    Vector v = Vector::Zero(5);
    v(2) = 1.0;
    const StateTrajectory traj = evolve(path, Ket(v), uniform_grid(0, 4, 41), 5);
    for (const auto& s : traj.states) CHECK(std::abs(s.norm() - 1.0) < 1e-12 * 41 * 5);
    CHECK(traj.method == "midpoint-exponential");
    CHECK(traj.steps_per_interval == 5);
}

TEST_CASE("midpoint propagation converges at second order") {
    const auto path = along(models::landau_zener(1.0), ParamSchedule::linear(-3, 3, 2.0));
    Vector g(2);
    g << 1.0, 0.0;
    const Ket psi0(g);
    auto final_state = [&](int steps) { return evolve(path, psi0, {0.0, 2.0}, steps).states.back(); };
    const Vector coarse = final_state(100), fine = final_state(200), finer = final_state(400);
    // Richardson reference from the two finest runs.
    const Vector ref = (4.0 * finer - fine) / 3.0;
    const double e1 = phase_insensitive_distance(coarse, ref), e2 = phase_insensitive_distance(fine, ref);
    CHECK(e1 / e2 > 3.5);
    CHECK(e1 / e2 < 4.5);
}

TEST_CASE("propagator matches evolution") {
    const auto path = along(models::random_linear_path(3, 8), ParamSchedule::linear(0, 1, 1.0));
    const Matrix u = propagator(path, 0.0, 1.0, 50);
    CHECK(max_abs(u.adjoint() * u - Matrix::Identity(3, 3)) < 1e-13);
    Vector v = Vector::Zero(3);
    v(0) = 1.0;
    const Vector by_evolve = evolve(path, Ket(v), {0.0, 1.0}, 50).states.back();
    CHECK((u * v - by_evolve).norm() < 1e-13);
}

TEST_CASE("adiabatic coefficients are constant under a constant Hamiltonian") {
    const Matrix h = models::random_hermitian(3, 4);
    const auto grid = uniform_grid(0, 3, 31);
    const EigenPath p = eigenpath(constant_path(h), grid);
    Vector v(3);
    v << 0.6, cplx(0, 0.8), 0.0;
    const StateTrajectory traj = evolve(constant_path(h), Ket(v), grid, 3);
    const auto c = adiabatic_coefficients(traj, p);
    for (const auto& ci : c) CHECK((ci - c.front()).norm() < 1e-12);
}

TEST_CASE("overlap and fidelity") {
    Vector a(2), b(2);
    a << 1.0, 0.0;
    b << cplx(0, 1), 0.0;
    CHECK(std::abs(overlap(a, b) - cplx(0, 1)) < 1e-15);
    CHECK(fidelity(a, b) == doctest::Approx(1.0));
    CHECK(phase_insensitive_distance(a, b) < 1e-15);
}
