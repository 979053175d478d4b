#include "sforge/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "sforge/agp.hpp"
#include "sforge/dynamics.hpp"
#include "sforge/fastforward.hpp"
#include "sforge/grid1d.hpp"
#include "sforge/invariant.hpp"
#include "sforge/models.hpp"
#include "sforge/operator.hpp"
#include "sforge/qsl.hpp"
#include "sforge/spectral.hpp"

namespace sforge::scenario {

namespace fs = std::filesystem;

namespace {

const std::vector<std::pair<System, std::string>> system_names{
    {System::landau_zener, "landau_zener"},
    {System::tfim_chain, "tfim_chain"},
    {System::random_hermitian, "random_hermitian"},
    {System::grid_1d, "grid_1d"},
};

const std::vector<std::pair<Method, std::string>> method_names{
    {Method::exact_cd, "exact_cd"}, {Method::variational, "variational"}, {Method::algebraic, "algebraic"},
    {Method::krylov, "krylov"},     {Method::trotter, "trotter"},         {Method::ff, "ff"},
    {Method::qsl, "qsl"},           {Method::invariant, "invariant"},
};

template <typename E>
E parse_enum(const json& v, const std::vector<std::pair<E, std::string>>& names, const std::string& where) {
    if (!v.is_string()) throw ConfigError(where + " must be a string");
    const auto s = v.get<std::string>();
    for (const auto& [e, name] : names)
        if (name == s) return e;
    std::string allowed;
    for (const auto& [e, name] : names) allowed += (allowed.empty() ? "" : ", ") + name;
    throw ConfigError(where + " has invalid value \"" + s + "\" (allowed: " + allowed + ")");
}

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& item : obj.items())
        if (!allowed.count(item.key())) throw ConfigError("unknown key \"" + item.key() + "\" in " + where);
}

double number(const json& obj, const std::string& key, const std::string& where, std::optional<double> fallback = {}) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError(where + "." + key + " is required");
    }
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(where + "." + key + " must be finite");
    return x;
}

long long integer(const json& obj, const std::string& key, const std::string& where, std::optional<long long> fallback = {}) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError(where + "." + key + " is required");
    }
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
    return v.get<long long>();
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

const std::vector<std::pair<std::string, std::string>> schedule_kinds{
    {"linear", "linear"}, {"smooth", "smooth"}, {"smoothstep", "smoothstep"}, {"cubic", "cubic"}};

ParamSchedule make_schedule(const ScheduleSpec& s) {
    if (s.kind == "linear") return ParamSchedule::linear(s.from, s.to, s.duration);
    if (s.kind == "smooth") return ParamSchedule::smooth(s.from, s.to, s.duration);
    if (s.kind == "smoothstep") return ParamSchedule::smoothstep(s.from, s.to, s.duration);
    return ParamSchedule::cubic(s.from, s.to, s.duration);
}

}  // namespace

std::string to_string(System s) {
    for (const auto& [e, name] : system_names)
        if (e == s) return name;
    return "?";
}

std::string to_string(Method m) {
    for (const auto& [e, name] : method_names)
        if (e == m) return name;
    return "?";
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ScenarioConfig ScenarioConfig::from_json(const json& j) {
    check_keys(j, "config", {"system", "method", "hbar", "units", "seed", "parameters", "schedule", "order", "grid", "trotter", "ff",
                             "output"});
    ScenarioConfig c;
    if (!j.contains("system")) throw ConfigError("config.system is required");
    if (!j.contains("method")) throw ConfigError("config.method is required");
    c.system = parse_enum(j.at("system"), system_names, "config.system");
    c.method = parse_enum(j.at("method"), method_names, "config.method");
    c.hbar = number(j, "hbar", "config");
    require(c.hbar > 0.0, "config.hbar must be positive");
    if (j.contains("units")) {
        require(j.at("units").is_string(), "config.units must be a string");
        c.units = j.at("units").get<std::string>();
    }
    if (j.contains("seed")) {
        const json& s = j.at("seed");
        require(s.is_number_unsigned() || (s.is_number_integer() && s.get<long long>() >= 0), "config.seed must be a non-negative integer");
        c.seed = s.get<std::uint64_t>();
    }

    const json params = j.value("parameters", json::object());
    switch (c.system) {
        case System::landau_zener:
            check_keys(params, "parameters", {"delta"});
            c.delta = number(params, "delta", "parameters");
            require(c.delta != 0.0, "parameters.delta must be nonzero; the crossing is otherwise degenerate");
            break;
        case System::tfim_chain:
            check_keys(params, "parameters", {"n", "coupling", "transverse", "disorder"});
            c.n_sites = static_cast<int>(integer(params, "n", "parameters"));
            require(c.n_sites >= 2 && c.n_sites <= 10, "parameters.n must be in [2, 10]");
            c.coupling = number(params, "coupling", "parameters");
            c.transverse = number(params, "transverse", "parameters");
            c.disorder = number(params, "disorder", "parameters", 0.0);
            require(c.disorder == 0.0 || c.seed.has_value(), "config.seed is required for a disordered chain");
            break;
        case System::random_hermitian:
            check_keys(params, "parameters", {"dim"});
            c.dim = static_cast<Index>(integer(params, "dim", "parameters"));
            require(c.dim >= 2 && c.dim <= 64, "parameters.dim must be in [2, 64]");
            require(c.seed.has_value(), "config.seed is required for random_hermitian");
            break;
        case System::grid_1d: {
            check_keys(params, "parameters", {"mass", "x_min", "length", "points", "center", "steps"});
            Grid1DSpec& g = c.grid1d;
            g.mass = number(params, "mass", "parameters");
            g.x_min = number(params, "x_min", "parameters", g.x_min);
            g.length = number(params, "length", "parameters", g.length);
            g.points = static_cast<Index>(integer(params, "points", "parameters", g.points));
            g.center = number(params, "center", "parameters", g.center);
            g.steps = static_cast<int>(integer(params, "steps", "parameters", g.steps));
            require(g.mass > 0.0 && g.length > 0.0, "parameters.mass and parameters.length must be positive");
            require(g.points >= 16, "parameters.points must be at least 16");
            require(g.steps >= 1, "parameters.steps must be positive");
            require(c.method == Method::ff, "grid_1d only supports method ff");
            break;
        }
    }

    if (!j.contains("schedule")) throw ConfigError("config.schedule is required");
    const json& sch = j.at("schedule");
    check_keys(sch, "schedule", {"kind", "from", "to", "duration"});
    c.schedule.kind = sch.contains("kind") ? parse_enum(sch.at("kind"), schedule_kinds, "schedule.kind") : std::string("linear");
    c.schedule.from = number(sch, "from", "schedule");
    c.schedule.to = number(sch, "to", "schedule");
    c.schedule.duration = number(sch, "duration", "schedule");
    require(c.schedule.duration > 0.0, "schedule.duration must be positive");
    if (c.system == System::grid_1d) require(c.schedule.from > 0.0 && c.schedule.to > 0.0, "grid_1d widths must be positive");

    if (j.contains("order")) {
        c.order = static_cast<int>(integer(j, "order", "config"));
        require(*c.order >= 1, "config.order must be at least 1");
    }

    const json grid = j.value("grid", json::object());
    check_keys(grid, "grid", {"points", "steps_per_interval"});
    c.grid.points = static_cast<std::size_t>(integer(grid, "points", "grid", static_cast<long long>(c.grid.points)));
    c.grid.steps_per_interval = static_cast<int>(integer(grid, "steps_per_interval", "grid", c.grid.steps_per_interval));
    require(c.grid.points >= 5, "grid.points must be at least 5");
    require(c.grid.steps_per_interval >= 1, "grid.steps_per_interval must be positive");

    const json trot = j.value("trotter", json::object());
    check_keys(trot, "trotter", {"m_values", "slice_order", "sampling"});
    if (trot.contains("m_values")) {
        const json& mv = trot.at("m_values");
        require(mv.is_array() && !mv.empty(), "trotter.m_values must be a non-empty array");
        c.trotter.m_values.clear();
        for (const auto& m : mv) {
            require(m.is_number_integer() && m.get<long long>() >= 1, "trotter.m_values entries must be positive integers");
            c.trotter.m_values.push_back(m.get<int>());
        }
    }
    if (trot.contains("slice_order"))
        c.trotter.slice_order = parse_enum(trot.at("slice_order"),
                                           std::vector<std::pair<SliceOrder, std::string>>{{SliceOrder::h_then_cd, "h_then_cd"},
                                                                                            {SliceOrder::cd_then_h, "cd_then_h"}},
                                           "trotter.slice_order");
    if (trot.contains("sampling"))
        c.trotter.sampling = parse_enum(trot.at("sampling"),
                                        std::vector<std::pair<SampleRule, std::string>>{{SampleRule::right_endpoint, "right_endpoint"},
                                                                                         {SampleRule::midpoint, "midpoint"}},
                                        "trotter.sampling");

    const json ff = j.value("ff", json::object());
    check_keys(ff, "ff", {"rate", "route", "include_nad"});
    c.ff.rate = number(ff, "rate", "ff", c.ff.rate);
    require(c.ff.rate > 0.0, "ff.rate must be positive");
    if (ff.contains("route"))
        c.ff.route = parse_enum(ff.at("route"),
                                std::vector<std::pair<std::string, std::string>>{{"cd", "cd"}, {"nonadiabatic", "nonadiabatic"}},
                                "ff.route");
    if (ff.contains("include_nad")) {
        require(ff.at("include_nad").is_boolean(), "ff.include_nad must be a boolean");
        c.ff.include_nad = ff.at("include_nad").get<bool>();
    }

    const json out = j.value("output", json::object());
    check_keys(out, "output", {"directory", "tolerances"});
    if (out.contains("directory")) {
        require(out.at("directory").is_string(), "output.directory must be a string");
        c.output_directory = out.at("directory").get<std::string>();
    }
    if (out.contains("tolerances")) {
        const json& tol = out.at("tolerances");
        require(tol.is_object(), "output.tolerances must be an object");
        for (const auto& item : tol.items()) {
            require(item.value().is_number() && item.value().get<double>() >= 0.0, "output.tolerances entries must be non-negative numbers");
            c.tolerances[item.key()] = item.value().get<double>();
        }
    }

    // Canonical form: every default made explicit, keys sorted by the json map.
    json& k = c.canonical;
    k["system"] = to_string(c.system);
    k["method"] = to_string(c.method);
    k["hbar"] = c.hbar;
    k["units"] = c.units;
    if (c.seed) k["seed"] = *c.seed;
    switch (c.system) {
        case System::landau_zener: k["parameters"] = {{"delta", c.delta}}; break;
        case System::tfim_chain:
            k["parameters"] = {{"n", c.n_sites}, {"coupling", c.coupling}, {"transverse", c.transverse}, {"disorder", c.disorder}};
            break;
        case System::random_hermitian: k["parameters"] = {{"dim", c.dim}}; break;
        case System::grid_1d:
            k["parameters"] = {{"mass", c.grid1d.mass},     {"x_min", c.grid1d.x_min},   {"length", c.grid1d.length},
                               {"points", c.grid1d.points}, {"center", c.grid1d.center}, {"steps", c.grid1d.steps}};
            break;
    }
    k["schedule"] = {{"kind", c.schedule.kind}, {"from", c.schedule.from}, {"to", c.schedule.to}, {"duration", c.schedule.duration}};
    if (c.order) k["order"] = *c.order;
    k["grid"] = {{"points", c.grid.points}, {"steps_per_interval", c.grid.steps_per_interval}};
    k["trotter"] = {{"m_values", c.trotter.m_values},
                    {"slice_order", sforge::to_string(c.trotter.slice_order)},
                    {"sampling", sforge::to_string(c.trotter.sampling)}};
    k["ff"] = {{"rate", c.ff.rate}, {"route", c.ff.route}, {"include_nad", c.ff.include_nad}};
    k["output"] = {{"tolerances", c.tolerances}};
    return c;
}

ScenarioConfig ScenarioConfig::load(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open " + file.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    return from_json(j);
}

std::string ScenarioConfig::scenario_hash() const {
    json physics;
    for (const char* key : {"system", "hbar", "units", "seed", "parameters", "schedule"})
        if (canonical.contains(key)) physics[key] = canonical.at(key);
    return fnv1a_hex(physics.dump());
}

std::string ScenarioConfig::config_hash() const { return fnv1a_hex(canonical.dump()); }

// ---------------------------------------------------------------------------
// Runs

namespace {

ParametricHamiltonian family(const ScenarioConfig& c) {
    switch (c.system) {
        case System::landau_zener: return models::landau_zener(c.delta);
        case System::tfim_chain: {
            models::IsingChain chain;
            chain.n_sites = c.n_sites;
            chain.coupling = c.coupling;
            chain.transverse = c.transverse;
            chain.disorder = c.disorder;
            chain.seed = c.seed.value_or(0);
            return models::ising_chain(chain);
        }
        case System::random_hermitian: return models::random_linear_path(c.dim, *c.seed);
        case System::grid_1d: break;
    }
    throw ConfigError("system has no finite-dimensional Hamiltonian");
}

Matrix cd_operator(Method method, const Matrix& h, const Matrix& dh, std::optional<int> order) {
    // Schedules with zero endpoint rate have no CD term there.
    if (frobenius_norm(dh) <= 1e-14 * std::max(1.0, frobenius_norm(h))) return Matrix::Zero(h.rows(), h.cols());
    switch (method) {
        case Method::variational: {
            const int k = order ? *order : std::max(1, full_order(h, dh));
            const LinearCDSystem sys = variational_system(h, dh, k);
            return assemble_cd(sys, solve_cd(sys)).matrix();
        }
        case Method::algebraic: {
            const OperatorBasis trial = odd_commutator_closure(h, dh, standard_basis(h.rows()));
            if (trial.size() == 0) return Matrix::Zero(h.rows(), h.cols());
            const LinearCDSystem sys = algebraic_system(h, dh, trial);
            return assemble_cd(sys, solve_cd(sys)).matrix();
        }
        case Method::krylov: {
            const LinearCDSystem sys = krylov_system(krylov_chain(h, dh));
            if (sys.identically_zero) return Matrix::Zero(h.rows(), h.cols());
            return assemble_cd(sys, solve_cd(sys)).matrix();
        }
        default: return exact_cd(h, dh).matrix();
    }
}

HamiltonianPath cd_path(Method method, const HamiltonianPath& h, std::optional<int> order) {
    if (method == Method::exact_cd) return exact_cd_path(h);
    HamiltonianPath out;
    out.dim = h.dim;
    out.value = [h, method, order](double t) { return cd_operator(method, h(t), h.derivative(t), order); };
    return out;
}

std::string column_label(const std::string& label) {
    std::string s = "cd_";
    for (char ch : label) s += std::isalnum(static_cast<unsigned char>(ch)) ? static_cast<char>(std::tolower(ch)) : '_';
    return s;
}

RealVector populations(const Matrix& h, const Vector& psi) { return (eigen_frame(h).vectors.adjoint() * psi).cwiseAbs2(); }

double min_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end()); }

void add_population_columns(Table& t, Index dim) {
    for (Index n = 0; n < dim; ++n) t.columns.push_back("population_" + std::to_string(n));
}

RunArtifacts run_cd(const ScenarioConfig& c, const HamiltonianPath& h, const ParamSchedule& sched) {
    const std::vector<double> grid = uniform_grid(0.0, c.schedule.duration, c.grid.points);
    const HamiltonianPath cd = cd_path(c.method, h, c.order);
    const Vector psi0 = eigen_frame(h(0.0)).vectors.col(0);
    const StateTrajectory traj = evolve(h + cd, Ket::normalized(psi0), grid, c.grid.steps_per_interval);

    const Index dim = h.dim;
    const bool resolved = dim <= 8;
    const OperatorBasis basis = resolved ? standard_basis(dim) : OperatorBasis{};
    Table t;
    t.columns = {"time", "lambda", "fidelity"};
    add_population_columns(t, dim);
    if (resolved)
        for (const auto& l : basis.labels()) t.columns.push_back(column_label(l));
    else
        t.columns.push_back("cd_norm");

    std::vector<double> fid;
    double max_cd = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double time = grid[i];
        const RealVector pops = populations(h(time), traj.states[i]);
        const Matrix op = cd(time);
        std::vector<double> row{time, sched.lambda(time)(0), pops(0)};
        for (Index n = 0; n < dim; ++n) row.push_back(pops(n));
        if (resolved) {
            const Vector coeffs = expand_in_basis(op, basis).coefficients;
            for (Index k = 0; k < coeffs.size(); ++k) row.push_back(coeffs(k).real());
        } else {
            row.push_back(frobenius_norm(op));
        }
        max_cd = std::max(max_cd, frobenius_norm(op));
        fid.push_back(pops(0));
        t.rows.push_back(std::move(row));
    }
    RunArtifacts a;
    a.tables["timeseries.csv"] = std::move(t);
    a.summary["final_fidelity"] = fid.back();
    a.summary["min_fidelity"] = min_of(fid);
    a.summary["max_cd_norm"] = max_cd;
    if (c.method == Method::variational && c.order) a.summary["order"] = *c.order;
    return a;
}

RunArtifacts run_trotter(const ScenarioConfig& c, const HamiltonianPath& h) {
    const double T = c.schedule.duration;
    const HamiltonianPath cd = exact_cd_path(h);
    const Ket psi0 = Ket::normalized(eigen_frame(h(0.0)).vectors.col(0));
    const Vector target = eigen_frame(h(T)).vectors.col(0);
    const DigitizationReport rep =
        digitization_error(h, cd, T, c.trotter.m_values, psi0, target, c.trotter.slice_order, c.trotter.sampling);

    Table sweep;
    sweep.columns = {"m", "infidelity", "excluded"};
    for (const auto& p : rep.points) sweep.rows.push_back({static_cast<double>(p.M), p.error, p.excluded ? 1.0 : 0.0});

    const int m_max = *std::max_element(c.trotter.m_values.begin(), c.trotter.m_values.end());
    const TrotterPlan plan{m_max, T, c.trotter.slice_order, c.trotter.sampling};
    const StateTrajectory traj = trotter_trajectory(h, cd, plan, psi0);
    Table ts;
    ts.columns = {"time", "fidelity"};
    add_population_columns(ts, h.dim);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const RealVector pops = populations(h(traj.grid[i]), traj.states[i]);
        std::vector<double> row{traj.grid[i], pops(0)};
        for (Index n = 0; n < pops.size(); ++n) row.push_back(pops(n));
        ts.rows.push_back(std::move(row));
    }

    RunArtifacts a;
    a.tables["m_sweep.csv"] = std::move(sweep);
    a.tables["timeseries.csv"] = std::move(ts);
    a.summary["fit_skipped"] = rep.fit.skipped;
    if (rep.fit.skipped) {
        a.summary["fit_note"] = rep.fit.note;
    } else {
        a.summary["slope"] = rep.fit.slope;
        a.summary["slope_ci_low"] = rep.fit.ci_low;
        a.summary["slope_ci_high"] = rep.fit.ci_high;
        a.summary["fit_points"] = rep.fit.points;
    }
    a.summary["final_fidelity"] = 1.0 - rep.points.back().error;
    return a;
}

RunArtifacts run_ff(const ScenarioConfig& c, const HamiltonianPath& h) {
    const double t_ff = c.schedule.duration / c.ff.rate;
    const TimeRescaling r = TimeRescaling::uniform(c.ff.rate, t_ff);
    const HamiltonianPath hff = c.ff.route == "cd" ? ff_of_cd(h, r) : ff_nonadiabatic_path(h, r, c.ff.include_nad);
    const std::vector<double> grid = uniform_grid(0.0, t_ff, c.grid.points);
    const Vector psi0 = eigen_frame(h(0.0)).vectors.col(0);
    const StateTrajectory traj = evolve(hff, Ket::normalized(psi0), grid, c.grid.steps_per_interval);
    Table t;
    t.columns = {"time", "s", "fidelity"};
    add_population_columns(t, h.dim);
    std::vector<double> fid;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double s = r.s(grid[i]);
        const RealVector pops = populations(h(s), traj.states[i]);
        std::vector<double> row{grid[i], s, pops(0)};
        for (Index n = 0; n < pops.size(); ++n) row.push_back(pops(n));
        fid.push_back(pops(0));
        t.rows.push_back(std::move(row));
    }
    RunArtifacts a;
    a.tables["timeseries.csv"] = std::move(t);
    a.summary["final_fidelity"] = fid.back();
    a.summary["min_fidelity"] = min_of(fid);
    a.summary["ff_duration"] = t_ff;
    return a;
}

RunArtifacts run_ff_grid(const ScenarioConfig& c) {
    const Grid1DSpec& g = c.grid1d;
    const ParamSchedule width = make_schedule(c.schedule);
    GridSystem sys;
    sys.grid = Grid1D{g.x_min, g.length, g.points};
    sys.mass = g.mass;
    const RealVector x = sys.grid.points();
    const double center = g.center;
    sys.amplitude = [x, center, width](double t) -> RealVector {
        const double s = width.lambda(t)(0);
        const double norm = std::pow(2 * pi * s * s, -0.25);
        return norm * (-(x.array() - center).square() / (4 * s * s)).exp();
    };
    sys.amplitude_rate = [x, center, width](double t) -> RealVector {
        const double s = width.lambda(t)(0), ds = width.dlambda(t)(0);
        const double norm = std::pow(2 * pi * s * s, -0.25);
        const Eigen::ArrayXd d2 = (x.array() - center).square();
        const Eigen::ArrayXd r = norm * (-d2 / (4 * s * s)).exp();
        return (r * ds * (d2 / (2 * s * s * s) - 1.0 / (2 * s))).matrix();
    };

    const double t_ff = c.schedule.duration / c.ff.rate;
    const TimeRescaling resc = TimeRescaling::uniform(c.ff.rate, t_ff);
    const std::vector<double> grid = uniform_grid(0.0, t_ff, c.grid.points);
    const int per_interval = std::max(1, g.steps / static_cast<int>(grid.size() - 1));
    auto potential = [&](double t) { return ff_potential(sys, resc, t); };

    Vector psi = ff_initial_state(sys, resc);
    Table tab;
    tab.columns = {"time", "s", "density_l2", "norm"};
    double worst = 0.0;
    bool ill = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (i > 0) psi = split_step_evolve(sys.grid, sys.mass, potential, psi, grid[i - 1], grid[i], per_interval);
        const double s = resc.s(grid[i]);
        const RealVector rho = sys.r(s).cwiseAbs2();
        const double d = density_l2_distance(sys.grid, psi, rho);
        worst = std::max(worst, d);
        ill = ill || phase_from_continuity(sys, s).ill_conditioned;
        tab.rows.push_back({grid[i], s, d, std::sqrt(psi.squaredNorm() * sys.grid.dx())});
    }
    RunArtifacts a;
    a.summary["final_density_l2"] = tab.rows.back()[2];
    a.summary["max_density_l2"] = worst;
    a.summary["ill_conditioned"] = ill;
    a.summary["ff_duration"] = t_ff;
    a.tables["timeseries.csv"] = std::move(tab);
    return a;
}

RunArtifacts run_qsl(const ScenarioConfig& c, const HamiltonianPath& h) {
    const std::vector<double> grid = uniform_grid(0.0, c.schedule.duration, c.grid.points);
    const HamiltonianPath h1 = h + exact_cd_path(h);
    const HamiltonianPath h2 = h + cd_path(Method::variational, h, c.order.value_or(1));
    const Ket psi0 = Ket::normalized(eigen_frame(h(0.0)).vectors.col(0));
    const StateTrajectory ref = evolve(h1, psi0, grid, c.grid.steps_per_interval);
    const StateTrajectory other = evolve(h2, psi0, grid, c.grid.steps_per_interval);
    const BoundReport rep = qsl_continuous(h1, h2, ref, &other);
    Table t;
    t.columns = {"time", "integrand", "angle", "bound", "observed"};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto k = static_cast<Index>(i);
        t.rows.push_back({grid[i], rep.integrand(k), rep.angle(k), rep.bound(k), rep.observed(k)});
    }
    RunArtifacts a;
    a.tables["timeseries.csv"] = std::move(t);
    a.summary["final_bound"] = rep.bound(rep.bound.size() - 1);
    a.summary["final_overlap"] = rep.observed(rep.observed.size() - 1);
    a.summary["worst_violation"] = rep.worst_violation();
    a.summary["vacuous"] = rep.vacuous;
    a.summary["order"] = c.order.value_or(1);
    return a;
}

RunArtifacts run_invariant(const ScenarioConfig& c, const HamiltonianPath& h) {
    const std::vector<double> grid = uniform_grid(0.0, c.schedule.duration, c.grid.points);
    const DynamicalInvariant inv = dynamical_invariant(cd_invariant(h), grid);
    const HamiltonianPath driven = h + exact_cd_path(h);
    const RealVector res = invariant_residual(driven, inv.operators, grid);
    const double scale = invariant_residual_scale(driven, inv.operators, grid);
    Table t;
    t.columns = {"time"};
    for (Index n = 0; n < h.dim; ++n) t.columns.push_back("invariant_eigenvalue_" + std::to_string(n));
    t.columns.push_back("residual");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<double> row{grid[i]};
        for (Index n = 0; n < h.dim; ++n) row.push_back(inv.eigen.energies[i](n));
        row.push_back(res(static_cast<Index>(i)));
        t.rows.push_back(std::move(row));
    }
    RunArtifacts a;
    a.tables["timeseries.csv"] = std::move(t);
    a.summary["eigenvalue_drift"] = eigenvalue_drift(inv);
    a.summary["max_residual"] = res.maxCoeff();
    a.summary["residual_scale"] = scale;
    return a;
}

}  // namespace

RunArtifacts run(const ScenarioConfig& c) {
    const ScopedHbar units(c.hbar);
    RunArtifacts a;
    if (c.system == System::grid_1d) {
        a = run_ff_grid(c);
    } else {
        const ParamSchedule sched = make_schedule(c.schedule);
        const HamiltonianPath h = along(family(c), sched);
        switch (c.method) {
            case Method::exact_cd:
            case Method::variational:
            case Method::algebraic:
            case Method::krylov: a = run_cd(c, h, sched); break;
            case Method::trotter: a = run_trotter(c, h); break;
            case Method::ff: a = run_ff(c, h); break;
            case Method::qsl: a = run_qsl(c, h); break;
            case Method::invariant: a = run_invariant(c, h); break;
        }
    }
    json& s = a.summary;
    s["tool"] = "shortcut-forge";
    s["version"] = SFORGE_VERSION;
    s["system"] = to_string(c.system);
    s["method"] = to_string(c.method);
    s["scenario_hash"] = c.scenario_hash();
    s["config_hash"] = c.config_hash();
    s["tolerances"] = c.tolerances;
    json tables = json::object();
    for (const auto& [name, table] : a.tables) tables[name] = table.columns;
    s["tables"] = tables;
    return a;
}

// ---------------------------------------------------------------------------
// Artifacts

std::string format_csv(const Table& table) {
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) out += (i ? "," : "") + table.columns[i];
    out += '\n';
    char buf[32];
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", row[i]);
            if (i) out += ',';
            out += buf;
        }
        out += '\n';
    }
    return out;
}

Table parse_csv(const std::string& text) {
    Table t;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty CSV");
    {
        std::istringstream hdr(line);
        std::string cell;
        while (std::getline(hdr, cell, ',')) t.columns.push_back(cell);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        if (row.size() != t.columns.size()) throw ConfigError("CSV row width differs from its header");
        t.rows.push_back(std::move(row));
    }
    return t;
}

namespace {
void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cli", "cannot write " + p.string());
    out << content;
    if (!out) throw Error("cli", "failed writing " + p.string());
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
}  // namespace

void write_artifacts(const RunArtifacts& artifacts, const fs::path& directory) {
    const fs::path target = fs::absolute(directory).lexically_normal();
    fs::path staging = target;
    staging += ".partial";
    fs::remove_all(staging);
    fs::create_directories(staging);
    try {
        for (const auto& [name, table] : artifacts.tables) write_file(staging / name, format_csv(table));
        write_file(staging / "summary.json", artifacts.summary.dump(2) + "\n");
        fs::remove_all(target);
        fs::rename(staging, target);
    } catch (...) {
        fs::remove_all(staging);
        throw;
    }
}

CompareReport compare(const fs::path& a, const fs::path& b) {
    CompareReport out;
    json& rep = out.report;
    json sa, sb;
    try {
        sa = json::parse(read_file(a / "summary.json"));
        sb = json::parse(read_file(b / "summary.json"));
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed summary: ") + e.what());
    }
    const bool same_scenario = sa.value("scenario_hash", "") == sb.value("scenario_hash", "");
    rep["scenario_hash_a"] = sa.value("scenario_hash", "");
    rep["scenario_hash_b"] = sb.value("scenario_hash", "");
    rep["scenario_mismatch"] = !same_scenario;
    const bool same_schema = sa.value("tables", json::object()) == sb.value("tables", json::object());
    rep["schema_mismatch"] = !same_schema;
    if (!same_schema) {
        out.exit_code = 2;
        return out;
    }

    std::map<std::string, double> tol = sa.value("tolerances", std::map<std::string, double>{});
    auto tolerance = [&](const std::string& col) {
        if (auto it = tol.find(col); it != tol.end()) return it->second;
        if (auto it = tol.find("default"); it != tol.end()) return it->second;
        return 0.0;
    };

    bool exceeded = false;
    json columns = json::object();
    for (const auto& item : sa.at("tables").items()) {
        const Table ta = parse_csv(read_file(a / item.key()));
        const Table tb = parse_csv(read_file(b / item.key()));
        if (ta.columns != tb.columns || ta.rows.size() != tb.rows.size()) {
            rep["schema_mismatch"] = true;
            out.exit_code = 2;
            return out;
        }
        json cols = json::object();
        for (std::size_t k = 0; k < ta.columns.size(); ++k) {
            double diff = 0.0;
            for (std::size_t r = 0; r < ta.rows.size(); ++r) {
                const double x = ta.rows[r][k], y = tb.rows[r][k];
                if (std::isnan(x) && std::isnan(y)) continue;
                const double d = std::abs(x - y);
                diff = std::isnan(d) ? std::numeric_limits<double>::infinity() : std::max(diff, d);
            }
            const double t = tolerance(ta.columns[k]);
            const bool bad = diff > t;
            exceeded = exceeded || bad;
            cols[ta.columns[k]] = {{"max_abs_diff", diff}, {"tolerance", t}, {"exceeded", bad}};
        }
        columns[item.key()] = cols;
    }
    rep["columns"] = columns;
    rep["exceeded"] = exceeded;
    out.exit_code = (exceeded || !same_scenario) ? 1 : 0;
    return out;
}

}  // namespace sforge::scenario
