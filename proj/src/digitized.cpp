#include "sforge/digitized.hpp"

#include <cmath>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "sforge/dynamics.hpp"

namespace sforge {

std::string to_string(SliceOrder o) { return o == SliceOrder::h_then_cd ? "h_then_cd" : "cd_then_h"; }
std::string to_string(SampleRule s) { return s == SampleRule::right_endpoint ? "right_endpoint" : "midpoint"; }

void TrotterPlan::validate() const {
    if (M < 1) throw InvalidArgument("digitized", "Trotter plan needs M >= 1");
    if (!(T > 0.0)) throw InvalidArgument("digitized", "Trotter plan needs T > 0");
}

double TrotterPlan::sample_time(int n) const {
    return sample == SampleRule::right_endpoint ? n * dt() : (n - 0.5) * dt();
}

Matrix trotter_step(const HamiltonianPath& h, const HamiltonianPath& cd, const TrotterPlan& plan, int n) {
    plan.validate();
    if (n < 1 || n > plan.M) throw InvalidArgument("digitized", "slice index out of range");
    const double t = plan.sample_time(n);
    const Matrix uh = step_unitary(h(t), plan.dt());
    const Matrix ucd = step_unitary(cd(t), plan.dt());
    return plan.order == SliceOrder::h_then_cd ? Matrix(uh * ucd) : Matrix(ucd * uh);
}

std::vector<Matrix> trotter_steps(const HamiltonianPath& h, const HamiltonianPath& cd, const TrotterPlan& plan) {
    plan.validate();
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(plan.M));
    for (int n = 1; n <= plan.M; ++n) out.push_back(trotter_step(h, cd, plan, n));
    return out;
}

StateTrajectory trotter_trajectory(const HamiltonianPath& h, const HamiltonianPath& cd, const TrotterPlan& plan, const Ket& psi0) {
    plan.validate();
    if (psi0.dim() != h.dim) throw DimensionMismatch("digitized", "initial state and Hamiltonian dimensions differ");
    StateTrajectory out;
    out.method = "trotter-" + to_string(plan.order) + "-" + to_string(plan.sample);
    out.steps_per_interval = 1;
    out.hbar = hbar();
    Vector psi = psi0.vector();
    out.grid.push_back(0.0);
    out.states.push_back(psi);
    for (int n = 1; n <= plan.M; ++n) {
        psi = trotter_step(h, cd, plan, n) * psi;
        out.grid.push_back(n * plan.dt());
        out.states.push_back(psi);
    }
    return out;
}

Vector trotter_cd_evolve(const HamiltonianPath& h, const HamiltonianPath& cd, const TrotterPlan& plan, const Ket& psi0) {
    return trotter_trajectory(h, cd, plan, psi0).states.back();
}

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    SlopeFit fit;
    const std::size_t n = x.size();
    fit.points = n;
    if (n != y.size()) throw DimensionMismatch("digitized", "fit needs paired samples");
    if (n < 3) {
        fit.note = "fewer than three usable points";
        return fit;
    }
    double mx = 0, my = 0;
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0.0) {
        fit.note = "all abscissae coincide";
        return fit;
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - fit.intercept - fit.slope * lx[i];
        ssr += r * r;
    }
    const double dof = static_cast<double>(n - 2);
    fit.standard_error = std::sqrt(ssr / dof / sxx);
    const double q = boost::math::quantile(boost::math::students_t(dof), 0.975);
    fit.ci_low = fit.slope - q * fit.standard_error;
    fit.ci_high = fit.slope + q * fit.standard_error;
    fit.skipped = false;
    return fit;
}

namespace {
void finish_report(DigitizationReport& r) {
    std::vector<double> xs, ys;
    for (auto& p : r.points) {
        if (!(p.error >= 10.0 * r.floor)) {
            p.excluded = true;
            std::ostringstream msg;
            msg << "error " << p.error << " within 10x of the floor " << r.floor;
            p.reason = msg.str();
            continue;
        }
        xs.push_back(p.M);
        ys.push_back(p.error);
    }
    r.fit = fit_loglog(xs, ys);
    if (r.fit.skipped && xs.size() < r.points.size()) r.fit.note = "errors at the numerical floor; fit skipped";
}

void require_sweep(const std::vector<int>& m_list) {
    if (m_list.empty()) throw InvalidArgument("digitized", "empty M list");
    for (int m : m_list)
        if (m < 1) throw InvalidArgument("digitized", "M values must be positive");
}
}  // namespace

DigitizationReport digitization_error(const HamiltonianPath& h, const HamiltonianPath& cd, double T, const std::vector<int>& m_list,
                                      const Ket& psi0, const Vector& target, SliceOrder order, SampleRule sample, double floor) {
    require_sweep(m_list);
    DigitizationReport r;
    r.metric = "infidelity";
    r.floor = floor;
    for (int m : m_list) {
        const TrotterPlan plan{m, T, order, sample};
        const Vector psi = trotter_cd_evolve(h, cd, plan, psi0);
        r.points.push_back({m, std::max(0.0, 1.0 - fidelity(target, psi)), false, {}});
    }
    finish_report(r);
    return r;
}

DigitizationReport trotter_baseline(const Matrix& a, const Matrix& b, double T, const std::vector<int>& m_list, double floor) {
    require_same_dim(a, b, "digitized");
    require_sweep(m_list);
    const Matrix exact = step_unitary(a + b, T);
    DigitizationReport r;
    r.metric = "propagator_error";
    r.floor = floor;
    for (int m : m_list) {
        const double dt = T / m;
        const Matrix slice = step_unitary(a, dt) * step_unitary(b, dt);
        Matrix u = Matrix::Identity(a.rows(), a.cols());
        for (int k = 0; k < m; ++k) u = slice * u;
        Eigen::JacobiSVD<Matrix> svd(u - exact);
        r.points.push_back({m, svd.singularValues()(0), false, {}});
    }
    finish_report(r);
    return r;
}

}  // namespace sforge
