// shortcut-forge: run, compare and sweep scenario configs.
//
// Exit codes: 0 success, 1 compare found differences, 2 config or usage
// error, 3 numerical failure.

#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "sforge/scenario.hpp"

extern char** environ;

namespace fs = std::filesystem;
using namespace sforge;
using scenario::json;

namespace {

constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

fs::path resolve_output(const scenario::ScenarioConfig& cfg, const fs::path& config_file, const std::string& override_dir) {
    if (!override_dir.empty()) return override_dir;
    if (!cfg.output_directory.empty()) {
        const fs::path p(cfg.output_directory);
        return p.is_absolute() ? p : config_file.parent_path() / p;
    }
    return config_file.stem().string() + "_run";
}

int cmd_run(const fs::path& config_file, const std::string& out_dir) {
    scenario::ScenarioConfig cfg;
    try {
        cfg = scenario::ScenarioConfig::load(config_file);
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return exit_config;
    }
    try {
        const scenario::RunArtifacts art = scenario::run(cfg);
        const fs::path dir = resolve_output(cfg, config_file, out_dir);
        scenario::write_artifacts(art, dir);
        std::cout << dir.string() << '\n';
        return 0;
    } catch (const NumericalError& e) {
        std::cerr << e.what() << '\n';
        return exit_numerical;
    } catch (const InvalidArgument& e) {
        std::cerr << e.what() << '\n';
        return exit_config;
    } catch (const DimensionMismatch& e) {
        std::cerr << e.what() << '\n';
        return exit_config;
    }
}

int cmd_compare(const fs::path& a, const fs::path& b, const std::string& report_file) {
    try {
        const scenario::CompareReport rep = scenario::compare(a, b);
        const std::string text = rep.report.dump(2);
        std::cout << text << '\n';
        if (!report_file.empty()) std::ofstream(report_file) << text << '\n';
        return rep.exit_code;
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return exit_config;
    }
}

// Sets a dotted key such as "schedule.duration" inside a config.
void set_dotted(json& j, const std::string& dotted, const json& value) {
    json* node = &j;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = dotted.find('.', start);
        const std::string key = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty()) throw scenario::ConfigError("malformed parameter name \"" + dotted + "\"");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        if (!node->contains(key)) (*node)[key] = json::object();
        node = &(*node)[key];
        start = dot + 1;
    }
}

std::string dir_name(const std::string& param, const std::string& value) {
    std::string s = param + "=" + value;
    for (char& ch : s)
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '=' || ch == '-' || ch == '_')) ch = '_';
    return s;
}

std::size_t thread_cap() {
    if (const char* env = std::getenv("SHORTCUT_FORGE_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

pid_t spawn_run(const fs::path& config, const fs::path& out) {
    const std::string self = fs::read_symlink("/proc/self/exe").string();
    std::vector<std::string> args{self, "run", config.string(), "--out", out.string()};
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);
    pid_t pid = 0;
    if (posix_spawn(&pid, self.c_str(), nullptr, nullptr, argv.data(), environ) != 0) return -1;
    return pid;
}

int cmd_sweep(const fs::path& config_file, const std::string& param, const std::vector<std::string>& values, const std::string& out_dir) {
    json base;
    try {
        std::ifstream in(config_file);
        if (!in) throw scenario::ConfigError("cannot open " + config_file.string());
        base = json::parse(in);
    } catch (const json::parse_error& e) {
        std::cerr << "config: malformed JSON: " << e.what() << '\n';
        return exit_config;
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return exit_config;
    }

    struct Job {
        std::string value;
        fs::path config, out;
        int status = -1;
    };
    std::vector<Job> jobs;
    std::vector<json> patched;
    // Every variant is validated before anything is written.
    for (const auto& v : values) {
        json value;
        try {
            value = json::parse(v);
        } catch (const json::parse_error&) {
            value = v;
        }
        json cfg = base;
        try {
            set_dotted(cfg, param, value);
            (void)scenario::ScenarioConfig::from_json(cfg);
        } catch (const Error& e) {
            std::cerr << e.what() << " (" << param << " = " << v << ")\n";
            return exit_config;
        }
        patched.push_back(std::move(cfg));
        jobs.push_back({v, {}, {}});
    }

    const fs::path root = out_dir.empty() ? fs::path(config_file.stem().string() + "_sweep") : fs::path(out_dir);
    fs::create_directories(root);
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const std::string name = dir_name(param, jobs[i].value);
        jobs[i].config = root / (name + ".json");
        jobs[i].out = root / name;
        std::ofstream(jobs[i].config) << patched[i].dump(2) << '\n';
    }

    // Runs are separate processes, so each owns its global state and output directory.
    const std::size_t cap = thread_cap();
    std::deque<std::size_t> pending;
    for (std::size_t i = 0; i < jobs.size(); ++i) pending.push_back(i);
    std::vector<std::pair<pid_t, std::size_t>> active;
    while (!pending.empty() || !active.empty()) {
        while (!pending.empty() && active.size() < cap) {
            const std::size_t i = pending.front();
            pending.pop_front();
            const pid_t pid = spawn_run(jobs[i].config, jobs[i].out);
            if (pid < 0) {
                jobs[i].status = exit_numerical;
                continue;
            }
            active.emplace_back(pid, i);
        }
        if (active.empty()) continue;
        int status = 0;
        const pid_t done = waitpid(-1, &status, 0);
        auto it = std::find_if(active.begin(), active.end(), [&](const auto& p) { return p.first == done; });
        if (it == active.end()) continue;
        jobs[it->second].status = WIFEXITED(status) ? WEXITSTATUS(status) : exit_numerical;
        active.erase(it);
    }

    json index = json::array();
    int worst = 0;
    for (const auto& j : jobs) {
        index.push_back({{"value", j.value}, {"directory", j.out.filename().string()}, {"exit_code", j.status}});
        worst = std::max(worst, j.status);
    }
    std::ofstream(root / "sweep.json") << json{{"param", param}, {"runs", index}}.dump(2) << '\n';
    std::cout << root.string() << '\n';
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shortcuts to adiabaticity: scenario runner"};
    app.set_version_flag("--version", SFORGE_VERSION);
    app.require_subcommand(1);

    std::string config, out, a, b, report, param;
    std::vector<std::string> values;

    auto* run = app.add_subcommand("run", "Run a scenario config and write CSV and JSON artifacts");
    run->add_option("config", config, "Scenario config (JSON)")->required();
    run->add_option("--out", out, "Output directory; overrides output.directory");

    auto* cmp = app.add_subcommand("compare", "Compare two run directories column by column");
    cmp->add_option("a", a, "First run directory")->required();
    cmp->add_option("b", b, "Second run directory")->required();
    cmp->add_option("--report", report, "Also write the report to this file");

    auto* sweep = app.add_subcommand("sweep", "Run one config over a list of values for one parameter");
    sweep->add_option("config", config, "Scenario config (JSON)")->required();
    sweep->add_option("--param", param, "Dotted key, for example schedule.duration")->required();
    sweep->add_option("--values", values, "Comma-separated values")->required()->delimiter(',');
    sweep->add_option("--out", out, "Sweep root directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    if (*run) return cmd_run(config, out);
    if (*cmp) return cmd_compare(a, b, report);
    return cmd_sweep(config, param, values, out);
}
