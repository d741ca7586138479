#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "combandit/assumptions.hpp"
#include "combandit/bounds.hpp"
#include "combandit/episode.hpp"
#include "combandit/format.hpp"
#include "combandit/oracle.hpp"
#include "combandit/tabular_io.hpp"

namespace combandit {

/// Static diagnostics of one environment: optimum, gaps, assumption and order checks, bound values.
struct EnvironmentReport {
    std::string environment;
    std::string environment_hash;
    std::uint32_t n = 0;
    std::uint32_t k = 0;
    FeedbackMode mode = FeedbackMode::Exclusive;
    double reward_bound = 1.0;
    std::optional<GapProfile> gaps;
    std::string gap_error;  // set when the optimum is not unique
    OptimalSet optimum;
    ConsistencyReport consistency;
    OrderReport order;
    std::uint64_t bound_horizon = 0;
    double bound_alpha = 2.0;
    std::optional<RegretBounds> bounds;
    std::vector<std::string> arm_names;
};

inline EnvironmentReport analyze_environment(const RewardModel& model, std::uint64_t bound_horizon, double alpha = 2.0,
                                             std::uint64_t cap = kDefaultEnumerationCap) {
    const RewardModel scan = scan_model(model, cap);
    EnvironmentReport r;
    r.environment = model.name();
    r.environment_hash = model_fingerprint(model);
    r.n = model.n();
    r.k = model.k();
    r.mode = model.mode();
    r.reward_bound = model.reward_bound();
    for (std::uint32_t a = 0; a < model.n(); ++a) r.arm_names.push_back(model.arm_name(ArmId{a}));
    r.optimum = optimal_set_bruteforce(scan, cap);
    try {
        r.gaps = gap_profile(scan, cap);
    } catch (const Error& e) {
        if (e.code() != Errc::NonUniqueOptimum) throw;
        r.gap_error = e.what();
    }
    r.consistency = check_weak_consistency(scan, kCheckerTolerance, cap);
    r.order = check_total_order(scan, kCheckerTolerance, cap);
    r.bound_horizon = bound_horizon;
    r.bound_alpha = alpha;
    if (r.gaps && r.gaps->epsilon > 0.0 && alpha >= 2.0 && bound_horizon >= 1) {
        r.bounds = evaluate_regret_bounds(r.n, r.k, static_cast<double>(bound_horizon), alpha, r.gaps->epsilon,
                                          r.reward_bound);
    }
    return r;
}

namespace detail {

inline std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + fmt::num(v[i]);
    return out;
}

inline std::string named_set(const Subset& s, const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + names[s[i].index];
    return out;
}

}  // namespace detail

/// One-line verdict, e.g. "weak consistency: pass; total order: fail".
inline std::string verdict_line(const EnvironmentReport& r) {
    return std::string("weak consistency: ") + (r.consistency.pass ? "pass" : "fail") +
           "; total order: " + (r.order.has_total_order ? "pass" : "fail");
}

/// key: value lines; list-valued facts repeat their key.
inline std::string render_environment_report(const EnvironmentReport& r, std::size_t max_listed = 20) {
    std::ostringstream out;
    out << "env: " << r.environment << '\n';
    out << "env_hash: " << r.environment_hash << '\n';
    out << "n: " << r.n << '\n' << "k: " << r.k << '\n';
    out << "mode: " << to_string(r.mode) << '\n';
    out << "reward_bound: " << fmt::num(r.reward_bound) << '\n';
    out << "optimal_set: " << fmt::join_subset(r.optimum.set, ',') << " (" << detail::named_set(r.optimum.set, r.arm_names)
        << ")\n";
    out << "optimal_value: " << fmt::num(r.optimum.value) << '\n';
    if (r.gaps) {
        out << "epsilon: " << fmt::num(r.gaps->epsilon) << '\n';
        if (r.gaps->runner_up.size() > 0) out << "runner_up: " << fmt::join_subset(r.gaps->runner_up, ',') << '\n';
        out << "sorted_optimal_probs: " << detail::join_doubles(r.gaps->sorted_optimal_probs) << '\n';
        out << "big_delta: " << detail::join_doubles(r.gaps->big_delta) << '\n';
    } else {
        out << "epsilon: n/a\n" << "gap_error: " << r.gap_error << '\n';
    }
    out << "weak_consistency: " << (r.consistency.pass ? "pass" : "fail") << '\n';
    out << "weak_consistency_pairs_checked: " << r.consistency.pairs_checked << '\n';
    out << "weak_consistency_violations: " << r.consistency.violation_count << '\n';
    for (std::size_t i = 0; i < r.consistency.violations.size() && i < max_listed; ++i) {
        const auto& v = r.consistency.violations[i];
        out << "violation: " << r.arm_names[v.arm.index] << " in {" << fmt::join_subset(v.set, ',')
            << "} p=" << fmt::num(v.prob_in_set) << " < p*=" << fmt::num(v.prob_in_optimal) << '\n';
    }
    out << "total_order: " << (r.order.has_total_order ? "pass" : "fail") << '\n';
    out << "incomparable_pairs: " << r.order.incomparable_pairs.size() << '\n';
    for (std::size_t i = 0; i < r.order.incomparable_pairs.size() && i < max_listed; ++i) {
        const auto& [a, b] = r.order.incomparable_pairs[i];
        out << "incomparable: " << r.arm_names[a.index] << " ~ " << r.arm_names[b.index] << '\n';
    }
    out << "cycles: " << r.order.cycles.size() << '\n';
    for (std::size_t i = 0; i < r.order.cycles.size() && i < max_listed; ++i) {
        out << "cycle: ";
        for (std::size_t j = 0; j < r.order.cycles[i].size(); ++j) {
            out << (j ? "→" : "") << r.arm_names[r.order.cycles[i][j].index];
        }
        out << '\n';
    }
    out << "bound_horizon: " << r.bound_horizon << '\n';
    out << "bound_alpha: " << fmt::num(r.bound_alpha) << '\n';
    if (r.bounds) {
        out << "gap_dependent_bound: " << fmt::num(r.bounds->gap_dependent) << '\n';
        out << "gap_independent_bound: " << fmt::num(r.bounds->gap_independent) << '\n';
    } else {
        out << "gap_dependent_bound: n/a\n" << "gap_independent_bound: n/a\n";
    }
    out << "summary: " << verdict_line(r) << '\n';
    return out.str();
}

/// Per-episode runtime diagnostics, one block per (policy, seed).
inline std::string render_episode_diagnostics(const std::vector<EpisodeTrace>& traces,
                                              const std::optional<RegretBounds>& bounds) {
    std::ostringstream out;
    for (const auto& tr : traces) {
        const std::string tag = tr.policy + " seed " + std::to_string(tr.seed);
        out << "terminal_regret[" << tag << "]: " << fmt::num(tr.terminal_regret()) << '\n';
        if (bounds) {
            out << "within_gap_independent_bound[" << tag << "]: "
                << (tr.terminal_regret() <= bounds->gap_independent ? "yes" : "no") << '\n';
        }
        if (tr.dynamics) {
            const auto& d = *tr.dynamics;
            out << "rho_dynamics[" << tag << "]: " << (d.pass ? "pass" : "fail") << " steps_checked=" << d.steps_checked
                << " first_checked_step=" << d.first_checked_step
                << " horizon_form_arms_below=" << d.horizon_form_arms_below;
            if (d.first_violation) {
                out << " first_violation_step=" << d.first_violation->step << " arm=" << d.first_violation->arm.index + 1
                    << " inequality=" << to_string(d.first_violation->which);
            }
            out << '\n';
        }
        if (tr.confidence) {
            out << "confidence[" << tag << "]: events=" << tr.confidence->violation_events
                << " arm_steps=" << tr.confidence->arm_steps << " rate=" << fmt::num(tr.confidence->rate()) << '\n';
        }
    }
    return out.str();
}

}  // namespace combandit
