#pragma once

#include <string>
#include <vector>

#include "sforge/core.hpp"

namespace sforge {

// Operator order within one slice as written in the product
// prod_n e^{-i dt H(t_n)/hbar} e^{-i dt H_cd(t_n)/hbar}: for h_then_cd the
// CD factor stands on the right and acts first.
enum class SliceOrder { h_then_cd, cd_then_h };
enum class SampleRule { right_endpoint, midpoint };

std::string to_string(SliceOrder o);
std::string to_string(SampleRule s);

struct TrotterPlan {
    int M = 1;
    double T = 1.0;
    SliceOrder order = SliceOrder::h_then_cd;
    SampleRule sample = SampleRule::right_endpoint;

    void validate() const;
    double dt() const { return T / M; }
    // Time at which slice n = 1..M samples both Hamiltonians.
    double sample_time(int n) const;
};

// Unitary of slice n = 1..M.
Matrix trotter_step(const HamiltonianPath& h, const HamiltonianPath& cd, const TrotterPlan& plan, int n);
std::vector<Matrix> trotter_steps(const HamiltonianPath& h, const HamiltonianPath& cd, const TrotterPlan& plan);

// States at n T/M for n = 0..M.
StateTrajectory trotter_trajectory(const HamiltonianPath& h, const HamiltonianPath& cd, const TrotterPlan& plan, const Ket& psi0);
Vector trotter_cd_evolve(const HamiltonianPath& h, const HamiltonianPath& cd, const TrotterPlan& plan, const Ket& psi0);

// Ordinary least squares of log y on log x with a 95% Student-t interval.
struct SlopeFit {
    bool skipped = true;
    std::string note;
    double slope = 0.0;
    double intercept = 0.0;
    double standard_error = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t points = 0;
};

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct DigitizationPoint {
    int M = 0;
    double error = 0.0;
    bool excluded = false;
    std::string reason;
};

struct DigitizationReport {
    std::string metric;
    std::vector<DigitizationPoint> points;
    SlopeFit fit;
    double floor = 1e-12;
};

inline constexpr double digitization_floor = 1e-12;

// 1 - |<target|psi_M(T)>|^2 for each M; points below 10x the floor are
// excluded from the fit and reported.
DigitizationReport digitization_error(const HamiltonianPath& h, const HamiltonianPath& cd, double T, const std::vector<int>& m_list,
                                      const Ket& psi0, const Vector& target, SliceOrder order = SliceOrder::h_then_cd,
                                      SampleRule sample = SampleRule::right_endpoint, double floor = digitization_floor);

// |(e^{-i dt A} e^{-i dt B})^M - e^{-i T (A + B)}| in operator norm for constant A, B.
DigitizationReport trotter_baseline(const Matrix& a, const Matrix& b, double T, const std::vector<int>& m_list,
                                    double floor = digitization_floor);

}  // namespace sforge
