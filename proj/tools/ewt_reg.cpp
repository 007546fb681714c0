// ewt-reg: command-line front end for the EWT regulation experiments.
//
// Subcommands mirror the three experiment families: a single regulation run
// (simulate), a sweep over constant targets (sweep-target), a piecewise
// time-varying target (time-varying) and a lookahead-depth sweep
// (sweep-lookahead). Curves go to CSV, summaries to JSON.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ewtreg/json_io.hpp"
#include "ewtreg/scenario.hpp"
#include "ewtreg/solver.hpp"

namespace fs = std::filesystem;
using namespace ewtreg;

namespace {

constexpr double kCurveStep = 0.25; // minutes

struct SolverChoice {
    bool exact = true;
    int lookahead = 0;
};

struct CommonOptions {
    std::string config_file;
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

ScenarioConfig load_config(const CommonOptions& opts) {
    ScenarioConfig config;
    if (!opts.config_file.empty()) {
        std::ifstream in(opts.config_file);
        if (!in) throw ConfigError("cannot open config file: " + opts.config_file);
        json j;
        try {
            in >> j;
            config = config_from_json(j);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("bad config file: ") + e.what());
        }
    }
    if (opts.seed) config.seed = *opts.seed;
    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
    return config;
}

SolverChoice parse_solver(const std::string& spec) {
    if (spec == "edp") return {true, 0};
    if (spec.rfind("hdp:", 0) == 0) {
        try {
            return {false, std::stoi(spec.substr(4))};
        } catch (const std::exception&) {
        }
    }
    throw ConfigError("bad --solver value (expected edp or hdp:K): " + spec);
}

std::vector<double> parse_targets(const std::string& spec) {
    std::vector<double> targets;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            targets.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("bad --target value: " + item);
        }
    }
    if (targets.empty()) throw ConfigError("--target requires at least one value");
    for (double t : targets)
        if (t <= 0.0) throw ConfigError("targets must be > 0");
    return targets;
}

std::pair<double, double> parse_switch(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw ConfigError("bad --switch value (expected T:MIN)");
    try {
        return {std::stod(spec.substr(0, colon)), std::stod(spec.substr(colon + 1))};
    } catch (const std::exception&) {
        throw ConfigError("bad --switch value (expected T:MIN): " + spec);
    }
}

std::pair<int, int> parse_range(const std::string& spec) {
    const auto dots = spec.find("..");
    if (dots == std::string::npos) throw ConfigError("bad --lookahead value (expected A..B)");
    try {
        return {std::stoi(spec.substr(0, dots)), std::stoi(spec.substr(dots + 2))};
    } catch (const std::exception&) {
        throw ConfigError("bad --lookahead value (expected A..B): " + spec);
    }
}

std::string fmt9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

struct RunResult {
    TimeSeries regulation;
    TimeSeries baseline;
    std::vector<double> target_values;
    AcceptanceRates rates;
    double deviation = 0.0;
    double baseline_dev = 0.0;
    json policy_export;
};

RunResult run_experiment(const Scenario& sc, const TargetProfile& profile,
                         const SolverChoice& solver) {
    EpisodeTree tree = traverse(sc, profile);
    Policy policy;
    if (solver.exact) {
        policy = backward_induction(tree).first;
    } else {
        backward_induction(tree); // fill values for the export path
        policy = h_dp(sc, solver.lookahead, profile);
    }
    RunResult res;
    res.regulation = expected_ewt_curve(tree, policy, kCurveStep);
    res.baseline = baseline_ewt_curve(tree, kCurveStep);
    for (double t : res.regulation.times) res.target_values.push_back(profile.value_at(t));
    res.rates = expected_acceptance_rates(tree, policy);
    res.deviation = average_deviation(tree, policy);
    res.baseline_dev = baseline_deviation(tree);
    res.policy_export = policy_to_json(tree, policy);
    return res;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << '\n';
}

void write_curve_csv(const fs::path& path, const RunResult& res) {
    std::ofstream out(path, std::ios::binary);
    out << "t,expected_ewt,baseline_ewt,target\n";
    for (std::size_t i = 0; i < res.regulation.times.size(); ++i) {
        out << fmt9(res.regulation.times[i]) << ',' << fmt9(res.regulation.values[i]) << ','
            << fmt9(res.baseline.values[i]) << ',' << fmt9(res.target_values[i]) << '\n';
    }
}

void write_summary_json(const fs::path& path, const std::string& command,
                        const ScenarioConfig& config, const TargetProfile& profile,
                        const std::string& solver, const RunResult& res) {
    json rates = json::array();
    for (double r : res.rates.per_passenger) rates.push_back(round9(r));
    json j{{"schema_version", kSchemaVersion},
           {"code_version", kCodeVersion},
           {"command", command},
           {"solver", solver},
           {"config", config_to_json(config)},
           {"target_profile", target_to_json(profile)},
           {"average_deviation", round9(res.deviation)},
           {"baseline_deviation", round9(res.baseline_dev)},
           {"acceptance_rates", rates},
           {"mean_acceptance", round9(res.rates.mean)}};
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << '\n';
}

int cmd_simulate(const CommonOptions& opts, const std::string& target_spec,
                 const std::string& solver_spec) {
    const ScenarioConfig config = load_config(opts);
    const std::vector<double> targets = parse_targets(target_spec);
    if (targets.size() != 1) throw ConfigError("simulate takes exactly one --target value");
    const SolverChoice solver = parse_solver(solver_spec);
    const Scenario sc = generate_scenario(config);
    const TargetProfile profile = TargetProfile::constant(targets.front());
    const RunResult res = run_experiment(sc, profile, solver);

    fs::create_directories(opts.out_dir);
    write_curve_csv(fs::path(opts.out_dir) / "simulate_curve.csv", res);
    write_summary_json(fs::path(opts.out_dir) / "simulate_summary.json", "simulate", config,
                       profile, solver_spec, res);
    write_json(fs::path(opts.out_dir) / "simulate_policy.json", res.policy_export);
    std::cout << "deviation=" << fmt9(res.deviation)
              << " baseline=" << fmt9(res.baseline_dev)
              << " mean_acceptance=" << fmt9(res.rates.mean) << '\n';
    return 0;
}

int cmd_sweep_target(const CommonOptions& opts, const std::string& target_spec) {
    const ScenarioConfig config = load_config(opts);
    const std::vector<double> targets = parse_targets(target_spec);
    if (targets.size() < 2) throw ConfigError("sweep-target requires at least two --target values");
    const Scenario sc = generate_scenario(config);

    fs::create_directories(opts.out_dir);
    std::ofstream sweep(fs::path(opts.out_dir) / "sweep_target.csv", std::ios::binary);
    sweep << "target,mean_acceptance,deviation,baseline_deviation\n";
    for (double target : targets) {
        const TargetProfile profile = TargetProfile::constant(target);
        const RunResult res = run_experiment(sc, profile, SolverChoice{true, 0});
        const std::string tag = fmt9(target);
        write_curve_csv(fs::path(opts.out_dir) / ("target_" + tag + "_curve.csv"), res);
        write_summary_json(fs::path(opts.out_dir) / ("target_" + tag + "_summary.json"),
                           "sweep-target", config, profile, "edp", res);
        sweep << tag << ',' << fmt9(res.rates.mean) << ',' << fmt9(res.deviation) << ','
              << fmt9(res.baseline_dev) << '\n';
        std::cout << "target=" << tag << " deviation=" << fmt9(res.deviation)
                  << " mean_acceptance=" << fmt9(res.rates.mean) << '\n';
    }
    return 0;
}

int cmd_time_varying(const CommonOptions& opts, const std::string& target_spec,
                     const std::vector<std::string>& switch_specs) {
    const ScenarioConfig config = load_config(opts);
    const std::vector<double> targets = parse_targets(target_spec);
    if (targets.size() != 1) throw ConfigError("time-varying takes exactly one initial --target");
    TargetProfile profile = TargetProfile::constant(targets.front());
    for (const std::string& s : switch_specs) {
        const auto [at, value] = parse_switch(s);
        if (value <= 0.0) throw ConfigError("switch target must be > 0");
        if (at <= profile.segments.back().first)
            throw ConfigError("switch times must be strictly increasing");
        profile.segments.emplace_back(at, value);
    }
    if (profile.segments.size() < 2)
        throw ConfigError("time-varying requires at least one --switch T:MIN");

    const Scenario sc = generate_scenario(config);
    const RunResult res = run_experiment(sc, profile, SolverChoice{true, 0});
    fs::create_directories(opts.out_dir);
    write_curve_csv(fs::path(opts.out_dir) / "time_varying_curve.csv", res);
    write_summary_json(fs::path(opts.out_dir) / "time_varying_summary.json", "time-varying",
                       config, profile, "edp", res);
    std::cout << "deviation=" << fmt9(res.deviation)
              << " baseline=" << fmt9(res.baseline_dev) << '\n';
    return 0;
}

int cmd_sweep_lookahead(const CommonOptions& opts, const std::string& target_spec,
                        const std::string& range_spec) {
    const ScenarioConfig config = load_config(opts);
    const std::vector<double> targets = parse_targets(target_spec);
    if (targets.size() != 1) throw ConfigError("sweep-lookahead takes exactly one --target");
    const auto [lo, hi] = parse_range(range_spec);
    if (lo < 0 || hi > config.n_sequential || lo > hi)
        throw ConfigError("--lookahead range must satisfy 0 <= A <= B <= N");

    const Scenario sc = generate_scenario(config);
    const TargetProfile profile = TargetProfile::constant(targets.front());
    const EpisodeTree tree = traverse(sc, profile);

    fs::create_directories(opts.out_dir);
    write_json(fs::path(opts.out_dir) / "sweep_lookahead_summary.json",
               json{{"schema_version", kSchemaVersion},
                    {"code_version", kCodeVersion},
                    {"command", "sweep-lookahead"},
                    {"config", config_to_json(config)},
                    {"target_profile", target_to_json(profile)},
                    {"lookahead_min", lo},
                    {"lookahead_max", hi}});
    std::ofstream out(fs::path(opts.out_dir) / "sweep_lookahead.csv", std::ios::binary);
    out << "lookahead,deviation,wall_time_s\n";
    for (int n = lo; n <= hi; ++n) {
        const auto start = std::chrono::steady_clock::now();
        const Policy policy = h_dp(sc, n, profile);
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        const double deviation = average_deviation(tree, policy);
        out << n << ',' << fmt9(deviation) << ',' << fmt9(elapsed.count()) << '\n';
        std::cout << "lookahead=" << n << " deviation=" << fmt9(deviation) << " wall_time_s="
                  << fmt9(elapsed.count()) << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"EWT regulation: offline MDP solver for shared-mobility dispatch"};
    app.require_subcommand(1);

    CommonOptions opts;
    std::string target_spec = "5";
    std::string solver_spec = "edp";
    std::vector<std::string> switch_specs;
    std::string lookahead_spec = "0..8";

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", opts.config_file, "Scenario config JSON file");
        cmd->add_option("--seed", [&opts](const std::vector<std::string>& v) {
            opts.seed = std::stoull(v.front());
            return true;
        }, "Override the scenario seed");
        cmd->add_option("--out", opts.out_dir, "Output directory (default: out)");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "Solve and emit regulation curves");
    add_common(simulate);
    simulate->add_option("--target", target_spec, "Constant EWT target in minutes");
    simulate->add_option("--solver", solver_spec, "edp or hdp:K");

    CLI::App* sweep_target = app.add_subcommand("sweep-target", "Sweep constant EWT targets");
    add_common(sweep_target);
    sweep_target->add_option("--target", target_spec, "Comma-separated target list (>= 2)");

    CLI::App* time_varying =
        app.add_subcommand("time-varying", "Regulate against a piecewise-constant target");
    add_common(time_varying);
    time_varying->add_option("--target", target_spec, "Initial EWT target in minutes");
    time_varying->add_option("--switch", switch_specs, "Switch point T:MIN (repeatable)");

    CLI::App* sweep_lookahead =
        app.add_subcommand("sweep-lookahead", "Sweep H-DP lookahead depths");
    add_common(sweep_lookahead);
    sweep_lookahead->add_option("--target", target_spec, "Constant EWT target in minutes");
    sweep_lookahead->add_option("--lookahead", lookahead_spec, "Lookahead range A..B");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(opts, target_spec, solver_spec);
        if (sweep_target->parsed()) return cmd_sweep_target(opts, target_spec);
        if (time_varying->parsed()) return cmd_time_varying(opts, target_spec, switch_specs);
        if (sweep_lookahead->parsed()) return cmd_sweep_lookahead(opts, target_spec, lookahead_spec);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return 3;
    }
    return 2;
}
