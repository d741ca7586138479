#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "combandit/dynamics.hpp"
#include "combandit/model.hpp"
#include "combandit/oracle.hpp"
#include "combandit/rng.hpp"
#include "combandit/tabular_io.hpp"
#include "combandit/ucb.hpp"

namespace combandit {

/// A model bundled with its brute-force optimum and content hash; built once
/// per environment and shared read-only across seeds.
struct PreparedEnvironment {
    RewardModel model;
    OptimalSet optimum;
    std::string fingerprint;
    double optimal_utility = 0.0;  // only used by the utility-surrogate regret

    explicit PreparedEnvironment(RewardModel m, std::uint64_t cap = kDefaultEnumerationCap)
        : model(std::move(m)), optimum(optimal_set_bruteforce(model, cap)), fingerprint(model_fingerprint(model)) {
        optimal_utility = utility_sum(optimum.set.arms());
    }

    double utility_sum(std::span<const ArmId> s) const {
        if (model.regret_kind() != RegretKind::UtilitySurrogate) return 0.0;
        const auto* rum = std::get_if<RumParams>(&model.params());
        if (!rum) throw Error(Errc::UnsupportedKind, "utility-surrogate regret needs a RUM model");
        double total = 0.0;
        for (auto a : s) total += rum->means[a.index];
        return total;
    }

    /// Per-step pseudo-regret of playing s, given the set's arm probabilities.
    double regret(std::span<const ArmId> s, std::span<const double> probs) const {
        if (model.regret_kind() == RegretKind::UtilitySurrogate) return optimal_utility - utility_sum(s);
        double total = 0.0;
        for (double p : probs) total += p;
        return optimum.value - model.reward_bound() * total;
    }
};

/// Memoizes set probabilities for models where they are costly (RUM);
/// other kinds are evaluated directly.
class ProbabilitySource {
public:
    explicit ProbabilitySource(const RewardModel& model) : model_(model) {}

    void fill(const Subset& s, std::span<double> out) {
        if (model_.kind() != ModelKind::RumGaussian) {
            set_probabilities(model_, s.arms(), out);
            return;
        }
        const std::uint64_t key = subset_rank(s.arms());
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            std::vector<double> probs(s.size());
            set_probabilities(model_, s.arms(), probs);
            it = cache_.emplace(key, std::move(probs)).first;
        }
        std::copy(it->second.begin(), it->second.end(), out.begin());
    }

private:
    const RewardModel& model_;
    std::unordered_map<std::uint64_t, std::vector<double>> cache_;
};

struct StepRecord {
    std::uint64_t t = 0;
    Subset selected;
    std::vector<double> rewards;  // aligned with selected; empty in checkpoint-only traces read from disk
    double regret = 0.0;
    double cumulative_regret = 0.0;
    double rho_prime = 0.0;  // +inf while a selected arm is unplayed
    double rho = 0.0;
};

/// Index state seen at selection time of one step.
struct IndexSnapshot {
    std::vector<double> index;
    std::vector<std::uint8_t> played;
    std::vector<std::uint64_t> plays;
};

struct EpisodeTrace {
    std::string environment;
    std::string environment_hash;
    std::string policy;
    std::uint64_t seed = 0;
    std::uint64_t horizon = 0;
    double alpha = 2.0;
    double reward_bound = 1.0;
    RegretKind regret_kind = RegretKind::ExpectedReward;
    bool full_resolution = false;
    std::vector<StepRecord> records;
    std::vector<IndexSnapshot> snapshots;  // one per step when requested
    std::vector<std::uint64_t> final_plays;
    std::vector<double> final_rewards;
    std::optional<DynamicsResult> dynamics;
    std::optional<ConfidenceSummary> confidence;

    double terminal_regret() const { return records.empty() ? 0.0 : records.back().cumulative_regret; }
};

struct EpisodeOptions {
    double alpha = 2.0;
    bool allow_small_alpha = false;
    std::uint64_t checkpoints = 1000;
    bool full_trace = false;
    bool record_indices = false;
    bool monitor_dynamics = true;  // UCB runs only
    bool monitor_confidence = true;
};

/// Geometrically spaced steps in [1, T], always containing 1 and T.
inline std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t horizon, std::uint64_t count) {
    std::vector<std::uint64_t> out;
    if (horizon == 0) return out;
    if (count >= horizon) {
        for (std::uint64_t t = 1; t <= horizon; ++t) out.push_back(t);
        return out;
    }
    const double log_t = std::log(static_cast<double>(horizon));
    const std::uint64_t m = std::max<std::uint64_t>(count, 2);
    for (std::uint64_t j = 0; j < m; ++j) {
        const double x = std::exp(log_t * static_cast<double>(j) / static_cast<double>(m - 1));
        auto t = static_cast<std::uint64_t>(std::llround(x));
        t = std::clamp<std::uint64_t>(t, 1, horizon);
        if (out.empty() || t > out.back()) out.push_back(t);
    }
    if (out.back() != horizon) out.push_back(horizon);
    return out;
}

// Stream ids under the episode seed.
inline constexpr std::uint64_t kPolicyStream = 0;
inline constexpr std::uint64_t kFeedbackStream = 1;

/// Runs select -> feedback -> update for T steps from an initial state.
/// The state's horizon must equal T.
inline EpisodeTrace run_episode(const PreparedEnvironment& env, Policy policy, UcbState state, std::uint64_t horizon,
                                std::uint64_t seed, const EpisodeOptions& options = {}) {
    const RewardModel& model = env.model;
    if (state.horizon() != horizon) {
        throw Error(Errc::HorizonMismatch, "policy initialized for T=" + std::to_string(state.horizon()) +
                                               ", episode runs T=" + std::to_string(horizon));
    }
    if (state.n() != model.n() || state.k() != model.k()) {
        throw Error(Errc::InvalidParams, "policy and model dimensions differ");
    }

    EpisodeTrace trace;
    trace.environment = model.name();
    trace.environment_hash = env.fingerprint;
    trace.policy = std::string(to_string(policy));
    trace.seed = seed;
    trace.horizon = horizon;
    trace.alpha = state.alpha();
    trace.reward_bound = state.reward_bound();
    trace.regret_kind = model.regret_kind();
    trace.full_resolution = options.full_trace;

    const auto checkpoints = geometric_checkpoints(horizon, options.checkpoints);
    std::size_t next_checkpoint = 0;
    if (options.full_trace) trace.records.reserve(horizon);
    else trace.records.reserve(checkpoints.size());
    if (options.record_indices) trace.snapshots.reserve(horizon);

    RngStream policy_rng(seed, kPolicyStream);
    RngStream feedback_rng(seed, kFeedbackStream);
    ProbabilitySource source(model);
    std::optional<RhoDynamicsChecker> dynamics;
    if (options.monitor_dynamics && policy == Policy::Ucb) dynamics.emplace(model.n());
    std::optional<ConfidenceMonitor> confidence;
    if (options.monitor_confidence) confidence.emplace(model.n(), state.alpha(), horizon, state.reward_bound());

    std::vector<double> probs(model.k());
    std::vector<double> rewards(model.k());
    double rho = std::numeric_limits<double>::infinity();
    double cumulative = 0.0;

    for (std::uint64_t t = 1; t <= horizon; ++t) {
        const Subset s = select_arms(policy, state, policy_rng);
        double rho_prime = std::numeric_limits<double>::infinity();
        bool any_unplayed = false;
        for (auto a : s) {
            if (state.played(a.index)) rho_prime = std::min(rho_prime, state.indices()[a.index]);
            else any_unplayed = true;
        }
        if (any_unplayed) rho_prime = std::numeric_limits<double>::infinity();
        rho = std::min(rho, rho_prime);
        if (dynamics) dynamics->observe(t, state.indices(), state.played_flags(), state.plays(), s);
        if (options.record_indices) {
            trace.snapshots.push_back({std::vector<double>(state.indices().begin(), state.indices().end()),
                                       std::vector<std::uint8_t>(state.played_flags().begin(), state.played_flags().end()),
                                       std::vector<std::uint64_t>(state.plays().begin(), state.plays().end())});
        }

        source.fill(s, probs);
        sample_rewards(model.mode(), model.reward_bound(), probs, feedback_rng, rewards);
        state.update(s, rewards);
        if (confidence) confidence->observe(s, probs, state.plays(), state.cumulative_rewards());

        const double reg = env.regret(s.arms(), probs);
        cumulative += reg;
        const bool at_checkpoint = next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] == t;
        if (at_checkpoint) ++next_checkpoint;
        if (options.full_trace || at_checkpoint) {
            trace.records.push_back({t, s, rewards, reg, cumulative, rho_prime, rho});
        }
    }

    trace.final_plays.assign(state.plays().begin(), state.plays().end());
    trace.final_rewards.assign(state.cumulative_rewards().begin(), state.cumulative_rewards().end());
    if (dynamics) trace.dynamics = dynamics->finish(trace.final_plays);
    if (confidence) trace.confidence = confidence->summary();
    return trace;
}

inline EpisodeTrace run_episode(const PreparedEnvironment& env, Policy policy, std::uint64_t horizon, std::uint64_t seed,
                                const EpisodeOptions& options = {}) {
    UcbConfig config{env.model.n(), env.model.k(), horizon, options.alpha, env.model.reward_bound(),
                     options.allow_small_alpha};
    return run_episode(env, policy, UcbState(config), horizon, seed, options);
}

/// Worker count: COMBANDIT_THREADS if set and positive, else hardware concurrency.
inline unsigned worker_threads() {
    if (const char* env = std::getenv("COMBANDIT_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// One episode per seed, spread over worker threads. Results keep seed order,
/// so aggregation is independent of scheduling.
inline std::vector<EpisodeTrace> run_seeds(const PreparedEnvironment& env, Policy policy, std::uint64_t horizon,
                                           std::span<const std::uint64_t> seeds, const EpisodeOptions& options = {},
                                           unsigned threads = worker_threads()) {
    std::vector<EpisodeTrace> out(seeds.size());
    std::vector<std::exception_ptr> errors(seeds.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < seeds.size(); i = next++) {
            try {
                out[i] = run_episode(env, policy, horizon, seeds[i], options);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned count = std::min<unsigned>(threads, static_cast<unsigned>(seeds.size()));
    if (count <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < count; ++i) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

}  // namespace combandit
