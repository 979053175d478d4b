#pragma once

#include <string>
#include <vector>

#include "sforge/core.hpp"
#include "sforge/digitized.hpp"

namespace sforge {

// cos of an accumulated angle bounding |<Psi_1|Psi_2>| from below.
struct BoundReport {
    std::vector<double> grid;
    RealVector integrand;  // L(t), or L_n per slice with integrand(0) = 0
    RealVector angle;
    RealVector bound;      // cos(angle); zero once angle > pi/2
    RealVector observed;   // |<Psi_1|Psi_2>| when both trajectories are known, else empty
    bool vacuous = false;  // the angle passed pi/2 somewhere
    std::vector<std::string> warnings;

    // Largest bound - observed; negative or tiny when the inequality holds.
    double worst_violation() const;
};

// sigma[X, psi] = |(X - <X>) psi| accumulated in long double.
double standard_deviation(const Matrix& x, const Vector& psi);

// L(t) = sigma[H1 - H2, Psi_ref(t)]; `other` supplies the second trajectory for observed overlaps.
BoundReport qsl_continuous(const HamiltonianPath& h1, const HamiltonianPath& h2, const StateTrajectory& reference,
                           const StateTrajectory* other = nullptr);

// L_n = arccos |<Psi_i(nT/M)| U_other U_ref^dagger |Psi_i(nT/M)>| with the reference
// trajectory i driven by u_ref. The other trajectory is rebuilt from u_other.
BoundReport qsl_discrete(const std::vector<Matrix>& u_ref, const std::vector<Matrix>& u_other, const StateTrajectory& reference,
                         const TrotterPlan& plan);

}  // namespace sforge
