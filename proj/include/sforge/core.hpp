#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sforge {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr cplx I{0.0, 1.0};

// Reduced Planck constant shared by every module. Natural units by default.
double hbar();
void set_hbar(double value);

// Restores the previous value of hbar on scope exit.
class ScopedHbar {
public:
    explicit ScopedHbar(double value) : previous_(hbar()) { set_hbar(value); }
    ~ScopedHbar() { set_hbar(previous_); }
    ScopedHbar(const ScopedHbar&) = delete;
    ScopedHbar& operator=(const ScopedHbar&) = delete;

private:
    double previous_;
};

// Every error carries a "module: message" string.
class Error : public std::runtime_error {
public:
    Error(const std::string& module, const std::string& message)
        : std::runtime_error(module + ": " + message), module_(module) {}
    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};
class InvalidArgument : public Error {
public:
    using Error::Error;
};
// Numerical failures: degeneracy, ill-conditioning, gauge jumps, spanning failures.
class NumericalError : public Error {
public:
    using Error::Error;
};
class DegeneracyError : public NumericalError {
public:
    using NumericalError::NumericalError;
};
class GridTooCoarse : public NumericalError {
public:
    using NumericalError::NumericalError;
};
class SpanningFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};
class GaugeDiscontinuity : public NumericalError {
public:
    using NumericalError::NumericalError;
};

void require_same_dim(const Matrix& a, const Matrix& b, const char* module);

class HermitianOperator {
public:
    explicit HermitianOperator(Matrix m);
    Index dim() const { return m_.rows(); }
    const Matrix& matrix() const { return m_; }
    operator const Matrix&() const { return m_; }

private:
    Matrix m_;
};

class Ket {
public:
    static constexpr double norm_tolerance = 1e-10;
    explicit Ket(Vector v);
    static Ket normalized(Vector v);
    Index dim() const { return v_.size(); }
    const Vector& vector() const { return v_; }
    operator const Vector&() const { return v_; }

private:
    Vector v_;
};

Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

// Time-dependent operator with its time derivative. A missing derivative
// falls back to a fourth-order centered difference of step fd_step.
struct HamiltonianPath {
    Index dim = 0;
    std::function<Matrix(double)> value;
    std::function<Matrix(double)> rate;
    double fd_step = 1e-5;

    Matrix operator()(double t) const { return value(t); }
    Matrix derivative(double t) const;
};

HamiltonianPath operator+(const HamiltonianPath& a, const HamiltonianPath& b);
HamiltonianPath scaled(const HamiltonianPath& a, double factor);
HamiltonianPath constant_path(const Matrix& h);

// H(lambda) with partial derivatives along each parameter.
struct ParametricHamiltonian {
    Index dim = 0;
    Index n_params = 1;
    std::function<Matrix(const RealVector&)> value;
    std::function<Matrix(const RealVector&, Index)> partial;
};

class ParamSchedule {
public:
    using Fn = std::function<RealVector(double)>;
    ParamSchedule(double duration, Fn lambda, Fn dlambda);

    static ParamSchedule linear(double from, double to, double duration);
    // lambda = from + (to - from)(tau - sin(2 pi tau)/(2 pi)); zero rate at both ends.
    static ParamSchedule smooth(double from, double to, double duration);
    // Quintic smoothstep; zero rate and acceleration at both ends.
    static ParamSchedule smoothstep(double from, double to, double duration);
    static ParamSchedule cubic(double from, double to, double duration);

    double duration() const { return duration_; }
    RealVector lambda(double t) const { return lambda_(t); }
    RealVector dlambda(double t) const;
    bool has_analytic_rate() const { return static_cast<bool>(dlambda_); }

private:
    double duration_;
    Fn lambda_;
    Fn dlambda_;
};

HamiltonianPath along(const ParametricHamiltonian& h, const ParamSchedule& schedule);

std::vector<double> uniform_grid(double t0, double t1, std::size_t points);
void require_increasing(const std::vector<double>& grid, const char* module);

// Normalized states on a time grid.
struct StateTrajectory {
    std::vector<double> grid;
    std::vector<Vector> states;
    std::string method;
    int steps_per_interval = 0;
    double hbar = 1.0;

    Ket ket(std::size_t i) const { return Ket(states.at(i)); }
    std::size_t size() const { return grid.size(); }
};

// Spectral norm of a Hermitian matrix.
double spectral_norm_hermitian(const Matrix& h);

}  // namespace sforge
