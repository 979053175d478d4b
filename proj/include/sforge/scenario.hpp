#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sforge/core.hpp"
#include "sforge/digitized.hpp"

namespace sforge::scenario {

using json = nlohmann::json;

enum class System { landau_zener, tfim_chain, random_hermitian, grid_1d };
enum class Method { exact_cd, variational, algebraic, krylov, trotter, ff, qsl, invariant };

std::string to_string(System s);
std::string to_string(Method m);

// Raised for anything wrong with a config before any physics runs.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error("config", message) {}
};

struct ScheduleSpec {
    std::string kind = "linear";  // linear, smooth, smoothstep, cubic
    double from = 0.0;
    double to = 1.0;
    double duration = 1.0;
};

struct GridSpec {
    std::size_t points = 201;
    int steps_per_interval = 20;
};

struct TrotterSpec {
    std::vector<int> m_values{8, 16, 32, 64, 128, 256};
    SliceOrder slice_order = SliceOrder::h_then_cd;
    SampleRule sampling = SampleRule::right_endpoint;
};

struct FFSpec {
    double rate = 2.0;  // ds/dt; the run lasts duration / rate
    std::string route = "cd";  // cd: H + (ds/dt) H_cd; nonadiabatic: the same with the phase-gauge term
    bool include_nad = true;   // nonadiabatic route only
};

struct Grid1DSpec {
    double mass = 1.0;
    double x_min = -10.0;
    double length = 20.0;
    Index points = 1024;
    double center = 0.0;
    int steps = 1000;  // split-step steps over the fast-forward run
};

// A validated scenario. `canonical` holds the config with defaults filled in.
struct ScenarioConfig {
    System system = System::landau_zener;
    Method method = Method::exact_cd;
    double hbar = 1.0;
    std::string units = "natural";
    std::optional<std::uint64_t> seed;

    double delta = 1.0;                                 // landau_zener
    int n_sites = 4;                                    // tfim_chain
    double coupling = 1.0, transverse = 1.0, disorder = 0.0;
    Index dim = 2;                                      // random_hermitian
    Grid1DSpec grid1d;                                  // grid_1d

    ScheduleSpec schedule;
    std::optional<int> order;  // K_tr; full order when absent
    GridSpec grid;
    TrotterSpec trotter;
    FFSpec ff;
    std::string output_directory;
    std::map<std::string, double> tolerances;  // per column, "default" for the rest

    json canonical;

    static ScenarioConfig from_json(const json& j);
    static ScenarioConfig load(const std::filesystem::path& file);

    // FNV-1a of the physics part only (system, constants, parameters, schedule).
    std::string scenario_hash() const;
    std::string config_hash() const;
};

std::string fnv1a_hex(const std::string& bytes);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct RunArtifacts {
    std::map<std::string, Table> tables;  // file name -> table
    json summary;
};

RunArtifacts run(const ScenarioConfig& config);

// Writes into a sibling temporary directory and renames it into place, so a
// failed run never leaves partial artifacts behind.
void write_artifacts(const RunArtifacts& artifacts, const std::filesystem::path& directory);

std::string format_csv(const Table& table);
Table parse_csv(const std::string& text);

struct CompareReport {
    int exit_code = 0;  // 0 agree, 1 tolerance exceeded or scenario mismatch, 2 schema mismatch
    json report;
};

CompareReport compare(const std::filesystem::path& a, const std::filesystem::path& b);

}  // namespace sforge::scenario
