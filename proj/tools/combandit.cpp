// combandit: run, check, gen and sweep commands over the simulation library.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli_config.hpp"

namespace fs = std::filesystem;
using namespace combandit;
using combandit::cli::ExperimentConfig;

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kEnvironmentError = 3, kDiagnosticFailure = 4 };

struct StageError {
    int code;
    std::string message;
};

int fail(int code, const std::string& message) {
    std::cerr << "error: exit=" << code << " " << message << '\n';
    return code;
}

// Runs f, tagging any library error with the exit code of the current stage.
template <typename F>
auto stage(int code, F&& f) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError{code, e.what()};
    }
}

void add_run_flags(CLI::App* cmd, cli::ConfigOverrides& o, std::string& config_path) {
    cmd->add_option("--config", config_path, "JSON config file; flags override its fields");
    cmd->add_option("--env", o.environment, "builtin name, lb:M2:n:k:eps:i, gen:n:k:seed, or tabular file");
    cmd->add_option("--policy", o.policies, "ucb, uniform or greedy (repeatable)");
    cmd->add_option("--horizon", o.horizon, "number of steps T");
    cmd->add_option("--seeds", o.seeds, "seed list: 1..5 or 1,2,3");
    cmd->add_option("--base-seed", o.base_seed, "first seed of a consecutive block");
    cmd->add_option("--seed-count", o.seed_count, "number of consecutive seeds");
    cmd->add_option("--alpha", o.alpha, "exploration parameter");
    cmd->add_option("--reward-bound", o.reward_bound, "reward bound B");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--checkpoints", o.checkpoints, "stored checkpoints per trace");
    cmd->add_flag("--full-trace", o.full_trace, "store every step");
    cmd->add_option("--enum-cap", o.enum_cap, "maximum number of sets to enumerate");
}

ExperimentConfig resolve_config(const std::string& config_path, const cli::ConfigOverrides& o) {
    return stage(kConfigError, [&] {
        ExperimentConfig c = config_path.empty() ? ExperimentConfig{} : cli::load_config_file(config_path);
        cli::apply_overrides(c, o);
        cli::validate(c);
        return c;
    });
}

RewardModel load_environment(const ExperimentConfig& c) {
    return stage(kEnvironmentError, [&] {
        RewardModel m = cli::resolve_environment(c.environment, c.enum_cap);
        if (c.reward_bound) m = m.with_reward_bound(*c.reward_bound);
        return m;
    });
}

EpisodeOptions episode_options(const ExperimentConfig& c, double alpha) {
    EpisodeOptions o;
    o.alpha = alpha;
    o.checkpoints = c.checkpoints;
    o.full_trace = c.full_trace;
    return o;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(Errc::IoError, "cannot create " + dir + ": " + ec.message());
}

int cmd_run(const std::string& config_path, const cli::ConfigOverrides& overrides) {
    const ExperimentConfig config = resolve_config(config_path, overrides);
    const RewardModel model = load_environment(config);
    const std::string config_text = cli::to_json(config).dump();
    const Provenance extra{{"config", config_text}};

    return stage(kEnvironmentError, [&] {
        const PreparedEnvironment env(model, config.enum_cap);
        const EnvironmentReport env_report = analyze_environment(model, config.horizon, config.alpha, config.enum_cap);
        ensure_dir(config.out);

        std::vector<AggregateCurve> curves;
        std::vector<EpisodeTrace> all_traces;
        for (const auto& name : config.policies) {
            const Policy policy = parse_policy(name);
            auto traces = run_seeds(env, policy, config.horizon, config.seeds, episode_options(config, config.alpha));
            for (const auto& tr : traces) {
                write_text_file(config.out + "/trace_" + name + "_seed" + std::to_string(tr.seed) + ".csv",
                                trace_to_string(tr, extra));
            }
            curves.push_back(aggregate_runs(traces, config.checkpoints));
            write_text_file(config.out + "/curve_" + name + ".csv", curve_to_string(curves.back(), extra));
            for (auto& tr : traces) {
                tr.records.clear();
                all_traces.push_back(std::move(tr));
            }
        }

        PlotOptions plot;
        plot.title = model.name() + ", T=" + std::to_string(config.horizon) + ", " +
                     std::to_string(config.seeds.size()) + " seeds";
        plot.provenance = {"env_hash: " + env.fingerprint, "config: " + config_text};
        write_text_file(config.out + "/regret.svg", render_regret_svg(curves, plot));

        bool diagnostics_ok = true;
        for (const auto& tr : all_traces) {
            if (tr.dynamics && !tr.dynamics->pass) diagnostics_ok = false;
        }
        std::string report = "# combandit run report v1\nconfig: " + config_text + '\n' +
                             render_environment_report(env_report) +
                             render_episode_diagnostics(all_traces, env_report.bounds);
        for (const auto& c : curves) {
            report += "mean_terminal_regret[" + c.policy + "]: " + fmt::num(c.mean_regret.back()) + '\n';
        }
        report += std::string("rho_dynamics: ") + (diagnostics_ok ? "pass" : "fail") + '\n';
        write_text_file(config.out + "/report.txt", report);
        write_text_file(config.out + "/config.json", cli::to_json(config).dump(2) + '\n');

        std::cout << verdict_line(env_report) << '\n';
        for (const auto& cyc : env_report.order.cycles) {
            std::cout << "cycle ";
            for (std::size_t j = 0; j < cyc.size(); ++j) std::cout << (j ? "→" : "") << model.arm_name(cyc[j]);
            std::cout << '\n';
        }
        for (const auto& c : curves) {
            std::cout << c.policy << ": mean R(T) = " << fmt::num(c.mean_regret.back())
                      << ", std = " << fmt::num(c.std_regret.back()) << '\n';
        }
        std::cout << "wrote " << config.out << '\n';
        if (!diagnostics_ok) return fail(kDiagnosticFailure, "DiagnosticFailure: rho dynamics violated, see report.txt");
        return static_cast<int>(kOk);
    });
}

int cmd_check(const std::string& env_source, std::uint64_t horizon, double alpha, std::uint64_t cap,
              const std::string& out, bool strict) {
    const RewardModel model = stage(kEnvironmentError, [&] { return cli::resolve_environment(env_source, cap); });
    const EnvironmentReport r = stage(kEnvironmentError, [&] { return analyze_environment(model, horizon, alpha, cap); });
    const std::string text = "# combandit check report v1\n" + render_environment_report(r);
    std::cout << text;
    if (!out.empty()) stage(kEnvironmentError, [&] { write_text_file(out, text); return 0; });
    if (strict && !r.consistency.pass) return fail(kDiagnosticFailure, "DiagnosticFailure: weak consistency violated");
    return kOk;
}

int cmd_gen(std::uint32_t n, std::uint32_t k, std::uint64_t seed, const std::string& out, std::uint64_t retries,
            std::uint64_t cap) {
    const RewardModel model = stage(kEnvironmentError, [&] {
        return generate_consistent_env(n, k, RngStream(seed, 0), retries, cap);
    });
    return stage(kEnvironmentError, [&] {
        save_tabular(model, out, cap);
        const GapProfile g = gap_profile(model, cap);
        std::cout << "wrote " << out << '\n';
        std::cout << "env: " << model.name() << '\n';
        std::cout << "env_hash: " << model_fingerprint(model) << '\n';
        std::cout << "optimal_set: " << fmt::join_subset(g.optimal, ',') << '\n';
        std::cout << "optimal_value: " << fmt::num(g.optimal_value) << '\n';
        std::cout << "epsilon: " << fmt::num(g.epsilon) << '\n';
        std::cout << "runner_up: " << fmt::join_subset(g.runner_up, ',') << '\n';
        std::cout << "sorted_optimal_probs:";
        for (double p : g.sorted_optimal_probs) std::cout << ' ' << fmt::num(p);
        std::cout << '\n';
        return static_cast<int>(kOk);
    });
}

int cmd_sweep(const std::string& config_path, const cli::ConfigOverrides& overrides, const std::string& param,
              const std::string& values_text) {
    const ExperimentConfig base = resolve_config(config_path, overrides);
    const std::vector<double> values = stage(kConfigError, [&] {
        if (param != "alpha" && param != "horizon" && param != "reward-bound") {
            throw Error(Errc::InvalidParams, "sweep parameter must be alpha, horizon or reward-bound");
        }
        std::vector<double> v;
        for (auto part : fmt::split(values_text, ',')) {
            const auto x = fmt::parse_double(fmt::trim(part));
            if (!x || !(*x > 0.0)) throw Error(Errc::InvalidParams, "bad sweep value '" + std::string(part) + "'");
            if (param == "horizon" && *x != std::floor(*x)) throw Error(Errc::InvalidParams, "horizon must be integral");
            v.push_back(*x);
        }
        return v;
    });
    const RewardModel model = load_environment(base);

    return stage(kEnvironmentError, [&] {
        ensure_dir(base.out);
        std::string csv = "# combandit sweep v1\n# env: " + model.name() + "\n# env_hash: " + model_fingerprint(model) +
                          "\n# config: " + cli::to_json(base).dump() + "\n# param: " + param + '\n' +
                          "value,policy,mean_terminal_regret,std_terminal_regret\n";
        for (double value : values) {
            ExperimentConfig c = base;
            RewardModel m = model;
            if (param == "alpha") c.alpha = value;
            if (param == "horizon") c.horizon = static_cast<std::uint64_t>(value);
            if (param == "reward-bound") m = m.with_reward_bound(value);
            cli::validate(c);
            const PreparedEnvironment env(m, c.enum_cap);
            EpisodeOptions opts = episode_options(c, c.alpha);
            opts.allow_small_alpha = true;  // sweeps may probe below the analyzed range
            for (const auto& name : c.policies) {
                const auto traces = run_seeds(env, parse_policy(name), c.horizon, c.seeds, opts);
                const AggregateCurve curve = aggregate_runs(traces, 1);
                csv += fmt::num(value) + ',' + name + ',' + fmt::num(curve.mean_regret.back()) + ',' +
                       fmt::num(curve.std_regret.back()) + '\n';
                std::cout << param << '=' << fmt::num(value) << ' ' << name
                          << ": mean R(T) = " << fmt::num(curve.mean_regret.back()) << '\n';
            }
        }
        write_text_file(base.out + "/sweep.csv", csv);
        std::cout << "wrote " << base.out << "/sweep.csv\n";
        return static_cast<int>(kOk);
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Top-k UCB simulation for combinatorial semi-bandits"};
    app.require_subcommand(1);

    cli::ConfigOverrides run_opts;
    std::string run_config;
    auto* run = app.add_subcommand("run", "run policies over seeds and write traces, curves, plot and report");
    add_run_flags(run, run_opts, run_config);

    std::string check_env = "camera6", check_out;
    std::uint64_t check_horizon = 100000, check_cap = kDefaultEnumerationCap;
    double check_alpha = 2.0;
    bool check_strict = false;
    auto* check = app.add_subcommand("check", "assumption, order and gap diagnostics for one environment");
    check->add_option("--env", check_env, "environment")->required();
    check->add_option("--horizon", check_horizon, "T used for the bound values");
    check->add_option("--alpha", check_alpha, "alpha used for the bound values");
    check->add_option("--enum-cap", check_cap, "maximum number of sets to enumerate");
    check->add_option("--out", check_out, "also write the report to this file");
    check->add_flag("--strict", check_strict, "exit 4 when weak consistency fails");

    std::uint32_t gen_n = 10, gen_k = 5;
    std::uint64_t gen_seed = 1, gen_retries = 1'000'000, gen_cap = kDefaultEnumerationCap;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "generate an environment satisfying weak consistency");
    gen->add_option("--n", gen_n, "number of arms");
    gen->add_option("--k", gen_k, "set size");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--out", gen_out, "output tabular file")->required();
    gen->add_option("--max-retries", gen_retries, "rejection budget per set");
    gen->add_option("--enum-cap", gen_cap, "maximum number of sets to enumerate");

    cli::ConfigOverrides sweep_opts;
    std::string sweep_config, sweep_param, sweep_values;
    auto* sweep = app.add_subcommand("sweep", "terminal regret across values of one parameter");
    add_run_flags(sweep, sweep_opts, sweep_config);
    sweep->add_option("--param", sweep_param, "alpha, horizon or reward-bound")->required();
    sweep->add_option("--values", sweep_values, "comma-separated values")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(kConfigError, std::string("InvalidParams: ") + e.what());
    }

    try {
        if (*run) return cmd_run(run_config, run_opts);
        if (*check) return cmd_check(check_env, check_horizon, check_alpha, check_cap, check_out, check_strict);
        if (*gen) return cmd_gen(gen_n, gen_k, gen_seed, gen_out, gen_retries, gen_cap);
        if (*sweep) return cmd_sweep(sweep_config, sweep_opts, sweep_param, sweep_values);
    } catch (const StageError& e) {
        return fail(e.code, e.message);
    } catch (const std::exception& e) {
        return fail(kEnvironmentError, e.what());
    }
    return kOk;
}
