#include "doctest.h"

#include <algorithm>
#include <fstream>

#include "sforge/scenario.hpp"

using namespace sforge;
using namespace sforge::scenario;
namespace fs = std::filesystem;

namespace {

json lz_config() {
    return json::parse(R"({
        "system": "landau_zener", "method": "exact_cd", "hbar": 1.0,
        "parameters": {"delta": 1.0},
        "schedule": {"kind": "linear", "from": -5.0, "to": 5.0, "duration": 1.0},
        "grid": {"points": 51, "steps_per_interval": 10}
    })");
}

json random_config(std::uint64_t seed, const std::string& method) {
    json j = json::parse(R"({
        "system": "random_hermitian", "hbar": 1.0,
        "parameters": {"dim": 3},
        "schedule": {"kind": "linear", "from": -1.0, "to": 1.0, "duration": 1.0},
        "grid": {"points": 11, "steps_per_interval": 10},
        "output": {"tolerances": {"default": 1e-7}}
    })");
    j["seed"] = seed;
    j["method"] = method;
    return j;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("sforge_scenario_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("config validation") {
    CHECK_NOTHROW(ScenarioConfig::from_json(lz_config()));
    json j = lz_config();
    j["colour"] = "blue";
    CHECK_THROWS_AS(ScenarioConfig::from_json(j), ConfigError);
    j = lz_config();
    j["method"] = "magic";
    CHECK_THROWS_AS(ScenarioConfig::from_json(j), ConfigError);
    j = lz_config();
    j.erase("hbar");
    CHECK_THROWS_AS(ScenarioConfig::from_json(j), ConfigError);
    j = lz_config();
    j["parameters"]["width"] = 2;
    CHECK_THROWS_AS(ScenarioConfig::from_json(j), ConfigError);
    j = random_config(1, "exact_cd");
    j.erase("seed");
    CHECK_THROWS_AS(ScenarioConfig::from_json(j), ConfigError);
    j = lz_config();
    j["system"] = "grid_1d";
    CHECK_THROWS_AS(ScenarioConfig::from_json(j), ConfigError);
    j = lz_config();
    j["trotter"] = {{"slice_order", "sideways"}};
    CHECK_THROWS_AS(ScenarioConfig::from_json(j), ConfigError);
}

TEST_CASE("hashes") {
    const ScenarioConfig a = ScenarioConfig::from_json(random_config(1, "variational"));
    const ScenarioConfig b = ScenarioConfig::from_json(random_config(1, "krylov"));
    const ScenarioConfig c = ScenarioConfig::from_json(random_config(2, "krylov"));
    CHECK(a.scenario_hash() == b.scenario_hash());
    CHECK(a.config_hash() != b.config_hash());
    CHECK(b.scenario_hash() != c.scenario_hash());
    CHECK(a.config_hash() == ScenarioConfig::from_json(random_config(1, "variational")).config_hash());
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("CSV round trip keeps every bit") {
    Table t;
    t.columns = {"time", "value"};
    t.rows = {{0.1, 1.0 / 3.0}, {2e-300, -7.125}};
    const Table back = parse_csv(format_csv(t));
    CHECK(back.columns == t.columns);
    CHECK(back.rows == t.rows);
    CHECK(format_csv(t).rfind("time,value\n", 0) == 0);
}

TEST_CASE("exact CD run on LZ") {
    const RunArtifacts a = run(ScenarioConfig::from_json(lz_config()));
    CHECK(a.summary.at("final_fidelity").get<double>() >= 1 - 1e-6);
    const Table& t = a.tables.at("timeseries.csv");
    CHECK(t.columns.front() == "time");
    CHECK(std::find(t.columns.begin(), t.columns.end(), "cd_y") != t.columns.end());
    CHECK(t.rows.size() == 51);
    CHECK(a.summary.at("version").get<std::string>() == SFORGE_VERSION);
}

TEST_CASE("trotter run reports the fitted slope") {
    json j = lz_config();
    j["method"] = "trotter";
    const RunArtifacts a = run(ScenarioConfig::from_json(j));
    const double slope = a.summary.at("slope").get<double>();
    CHECK(slope > -2.3);
    CHECK(slope < -1.7);
    CHECK(a.tables.count("m_sweep.csv") == 1);
}

TEST_CASE("compare") {
    const fs::path va = scratch("var"), kr = scratch("kry"), other = scratch("seed2"), trot = scratch("trot");
    write_artifacts(run(ScenarioConfig::from_json(random_config(1, "variational"))), va);
    write_artifacts(run(ScenarioConfig::from_json(random_config(1, "krylov"))), kr);
    write_artifacts(run(ScenarioConfig::from_json(random_config(2, "krylov"))), other);
    CHECK_FALSE(fs::exists(fs::path(va.string() + ".partial")));

    SUBCASE("a run against itself is all zeros") {
        const CompareReport r = compare(va, va);
        CHECK(r.exit_code == 0);
        for (const auto& col : r.report.at("columns").at("timeseries.csv").items())
            CHECK(col.value().at("max_abs_diff").get<double>() == 0.0);
    }
    SUBCASE("full-order variational and Krylov agree") {
        const CompareReport r = compare(va, kr);
        CHECK(r.exit_code == 0);
        CHECK(r.report.at("columns").at("timeseries.csv").at("cd_s0_1").at("max_abs_diff").get<double>() < 1e-7);
    }
    SUBCASE("different seeds are a scenario mismatch") {
        const CompareReport r = compare(kr, other);
        CHECK(r.exit_code == 1);
        CHECK(r.report.at("scenario_mismatch").get<bool>());
    }
    SUBCASE("different tables are a schema mismatch") {
        json j = random_config(1, "trotter");
        j["trotter"] = {{"m_values", {4, 8, 16}}};
        write_artifacts(run(ScenarioConfig::from_json(j)), trot);
        CHECK(compare(va, trot).exit_code == 2);
    }
}
