#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "sforge/core.hpp"

namespace sforge {

// Monotone map s(t) from [0, T_FF] onto reference time.
struct TimeRescaling {
    double duration = 1.0;
    std::function<double(double)> s;
    std::function<double(double)> rate;   // ds/dt
    std::function<double(double)> accel;  // d^2s/dt^2

    static TimeRescaling identity(double duration);
    // s = rate * t
    static TimeRescaling uniform(double rate, double duration);
    // Reaches s_end at t = duration with zero acceleration at both ends of
    // the correction: s = s_end (u + a sin(2 pi u)/(2 pi)), |a| < 1.
    static TimeRescaling modulated(double s_end, double duration, double amplitude);

    // s(0) = 0 and ds/dt > 0 on samples of the open interval.
    void validate(int samples = 257) const;
};

// U_f(t) = exp(-i sum_sigma f_sigma(t) P_sigma) with P_sigma = |sigma><sigma|.
// The sign makes the nonadiabatic term below take its standard form with
// hbar df_n/dt = (1 - ds/dt) E_n.
struct FFGauge {
    std::function<Matrix(double)> basis;        // columns |sigma(t)>
    std::function<RealVector(double)> phases;   // f_sigma(t)
    double fd_step = 1e-5;

    static FFGauge computational(Index dim, std::function<RealVector(double)> phases);
    Matrix unitary(double t) const;
};

// H_FF = (ds/dt) U_f H(s) U_f^dagger + i hbar (d_t U_f) U_f^dagger
HermitianOperator ff_hamiltonian(const HamiltonianPath& h_of_s, const FFGauge& gauge, const TimeRescaling& r, double t);
HamiltonianPath ff_hamiltonian_path(const HamiltonianPath& h_of_s, const FFGauge& gauge, const TimeRescaling& r);

// H(s) + (ds/dt) H_cd(s); the exact CD is used when cd_of_s is empty.
HamiltonianPath ff_of_cd(const HamiltonianPath& h_of_s, const TimeRescaling& r, HamiltonianPath cd_of_s = {});

// f_n(t) = (1/hbar) int_0^t (1 - ds/dt') E_n(s(t')) dt' tabulated with
// Gauss-Legendre panels and read back by cubic Hermite interpolation.
class AdiabaticPhaseTable {
public:
    AdiabaticPhaseTable(const HamiltonianPath& h_of_s, const TimeRescaling& r, std::size_t intervals = 2048);
    RealVector operator()(double t) const;
    RealVector rate(double t) const;

private:
    HamiltonianPath h_;
    TimeRescaling r_;
    std::vector<double> nodes_;
    std::vector<RealVector> values_;
    std::vector<RealVector> rates_;
};

// -i hbar sum_{m != n} e^{-i(f_m - f_n)} |m(s)><m|d_s n(s)><n(s)|
HermitianOperator ff_nonadiabatic_term(const Matrix& h_s, const Matrix& dh_ds, const RealVector& phases, double eps_gap_rel = 1e-10);

// H(s) + (ds/dt)(H_cd(s) + H_nad(t)); H_nad is dropped when include_nad is false.
HamiltonianPath ff_nonadiabatic_path(const HamiltonianPath& h_of_s, const TimeRescaling& r, bool include_nad = true,
                                     std::size_t table_intervals = 2048);

// H(lambda0 + eps t) + eps . A(lambda0 + eps t)
HamiltonianPath regularized_hamiltonian(const ParametricHamiltonian& h, const RealVector& lambda0, const RealVector& epsilon);
// H(lambda(s)) + (ds/dt) eps . A(lambda(s)) with lambda(s) = lambda0 + eps s.
HamiltonianPath ff_regularized(const ParametricHamiltonian& h, const RealVector& lambda0, const RealVector& epsilon,
                               const TimeRescaling& r);

}  // namespace sforge
