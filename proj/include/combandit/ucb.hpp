#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "combandit/error.hpp"
#include "combandit/rng.hpp"
#include "combandit/subset.hpp"

namespace combandit {

enum class Policy {
    Ucb,            ///< top-k by C_i/N_i + B*sqrt(alpha ln T / N_i)
    UniformRandom,  ///< uniformly random k-subset every step
    Greedy,         ///< top-k by empirical mean C_i/N_i (no bonus)
};

constexpr std::string_view to_string(Policy p) {
    switch (p) {
        case Policy::Ucb: return "ucb";
        case Policy::UniformRandom: return "uniform";
        case Policy::Greedy: return "greedy";
    }
    return "unknown";
}

inline Policy parse_policy(std::string_view name) {
    if (name == "ucb") return Policy::Ucb;
    if (name == "uniform") return Policy::UniformRandom;
    if (name == "greedy") return Policy::Greedy;
    throw Error(Errc::InvalidParams, "unknown policy '" + std::string(name) + "'");
}

struct UcbConfig {
    std::uint32_t n = 0;
    std::uint32_t k = 0;
    std::uint64_t horizon = 0;
    double alpha = 2.0;
    double reward_bound = 1.0;
    /// Permits alpha < 2, outside the range the regret guarantees cover.
    bool allow_small_alpha = false;
};

/// The index formula, kept in one place so stored and recomputed values agree bit for bit.
inline double ucb_index(double cumulative, std::uint64_t plays, double alpha, double log_horizon, double bound) {
    const auto count = static_cast<double>(plays);
    return cumulative / count + bound * std::sqrt(alpha * log_horizon / count);
}

/// Per-arm counters and indices. Unplayed arms carry an explicit infinite
/// sentinel flag rather than a floating-point infinity.
class UcbState {
public:
    explicit UcbState(const UcbConfig& config)
        : config_(config),
          log_horizon_(0.0),
          plays_(config.n, 0),
          rewards_(config.n, 0.0),
          index_(config.n, 0.0),
          played_(config.n, 0) {
        if (config.k < 1 || config.k > config.n) throw Error(Errc::InvalidParams, "need n >= k >= 1");
        if (config.n > kMaxArms) throw Error(Errc::InvalidParams, "at most 64 arms are supported");
        if (config.horizon < 1) throw Error(Errc::InvalidParams, "horizon must be >= 1");
        if (!(config.alpha > 0.0) || !std::isfinite(config.alpha)) throw Error(Errc::InvalidParams, "alpha must be positive");
        if (config.alpha < 2.0 && !config.allow_small_alpha) {
            throw Error(Errc::InvalidParams, "alpha < 2 requires allow_small_alpha");
        }
        if (!(config.reward_bound > 0.0) || !std::isfinite(config.reward_bound)) {
            throw Error(Errc::InvalidParams, "reward bound must be positive");
        }
        log_horizon_ = std::log(static_cast<double>(config.horizon));
    }

    std::uint32_t n() const noexcept { return config_.n; }
    std::uint32_t k() const noexcept { return config_.k; }
    std::uint64_t horizon() const noexcept { return config_.horizon; }
    double alpha() const noexcept { return config_.alpha; }
    double reward_bound() const noexcept { return config_.reward_bound; }
    double log_horizon() const noexcept { return log_horizon_; }
    /// 1-based step about to be played.
    std::uint64_t step() const noexcept { return step_; }

    std::span<const std::uint64_t> plays() const noexcept { return plays_; }
    std::span<const double> cumulative_rewards() const noexcept { return rewards_; }
    /// Valid only where played(i); unplayed arms hold the sentinel.
    std::span<const double> indices() const noexcept { return index_; }
    std::span<const std::uint8_t> played_flags() const noexcept { return played_; }
    bool played(std::uint32_t arm) const { return played_[arm] != 0; }

    /// Index value with the sentinel mapped to +inf, for reporting only.
    double index_or_inf(std::uint32_t arm) const {
        return played_[arm] ? index_[arm] : std::numeric_limits<double>::infinity();
    }

    double recompute_index(std::uint32_t arm) const {
        return ucb_index(rewards_[arm], plays_[arm], config_.alpha, log_horizon_, config_.reward_bound);
    }

    /// Records the feedback for s; only the arms of s change.
    void update(const Subset& s, std::span<const double> rewards) {
        if (rewards.size() != s.size() || s.size() != config_.k) {
            throw Error(Errc::MisalignedRewards, "expected " + std::to_string(config_.k) + " rewards aligned with the set");
        }
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i].index >= config_.n) throw Error(Errc::InvalidSize, "arm index out of range");
            if (!(rewards[i] >= 0.0 && rewards[i] <= config_.reward_bound)) {
                throw Error(Errc::RewardOutOfRange, "reward " + std::to_string(rewards[i]) + " outside [0, B]");
            }
        }
        for (std::size_t i = 0; i < s.size(); ++i) {
            const std::uint32_t a = s[i].index;
            plays_[a] += 1;
            rewards_[a] += rewards[i];
            index_[a] = recompute_index(a);
            played_[a] = 1;
        }
        ++step_;
    }

private:
    UcbConfig config_;
    double log_horizon_;
    std::vector<std::uint64_t> plays_;
    std::vector<double> rewards_;
    std::vector<double> index_;
    std::vector<std::uint8_t> played_;
    std::uint64_t step_ = 1;
};

namespace detail {

struct RankKey {
    bool infinite;
    double value;
    friend bool operator==(const RankKey& a, const RankKey& b) {
        return a.infinite == b.infinite && (a.infinite || a.value == b.value);
    }
    friend bool operator>(const RankKey& a, const RankKey& b) {
        if (a.infinite != b.infinite) return a.infinite;
        return !a.infinite && a.value > b.value;
    }
};

/// Top-k arms by key; the tie group straddling position k is resolved by a
/// uniform draw without replacement. rng is consumed only when such a tie exists.
inline Subset top_k(std::span<const RankKey> keys, std::uint32_t k, RngStream& rng) {
    const auto n = static_cast<std::uint32_t>(keys.size());
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    if (k == n) {
        std::vector<ArmId> all(n);
        for (std::uint32_t i = 0; i < n; ++i) all[i] = ArmId{i};
        return Subset(std::move(all));
    }
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return keys[a] > keys[b]; });
    const RankKey boundary = keys[order[k - 1]];
    std::vector<ArmId> chosen;
    chosen.reserve(k);
    std::vector<std::uint32_t> tied;
    for (std::uint32_t a : order) {
        if (keys[a] > boundary) chosen.push_back(ArmId{a});
        else if (keys[a] == boundary) tied.push_back(a);
    }
    const std::size_t need = k - chosen.size();
    if (tied.size() > need) {
        for (std::size_t i = 0; i < need; ++i) {
            const std::size_t j = i + rng.below(tied.size() - i);
            std::swap(tied[i], tied[j]);
        }
    }
    for (std::size_t i = 0; i < need; ++i) chosen.push_back(ArmId{tied[i]});
    return Subset(std::move(chosen));
}

}  // namespace detail

/// Arms with the top-k indices; ties (including unplayed sentinels) break uniformly at random.
inline Subset ucb_select(const UcbState& state, RngStream& rng) {
    std::vector<detail::RankKey> keys(state.n());
    for (std::uint32_t i = 0; i < state.n(); ++i) keys[i] = {!state.played(i), state.indices()[i]};
    return detail::top_k(keys, state.k(), rng);
}

inline Subset select_arms(Policy policy, const UcbState& state, RngStream& rng) {
    switch (policy) {
        case Policy::Ucb:
            return ucb_select(state, rng);
        case Policy::Greedy: {
            std::vector<detail::RankKey> keys(state.n());
            for (std::uint32_t i = 0; i < state.n(); ++i) {
                const bool fresh = !state.played(i);
                keys[i] = {fresh, fresh ? 0.0 : state.cumulative_rewards()[i] / static_cast<double>(state.plays()[i])};
            }
            return detail::top_k(keys, state.k(), rng);
        }
        case Policy::UniformRandom: {
            std::vector<detail::RankKey> keys(state.n(), detail::RankKey{true, 0.0});
            return detail::top_k(keys, state.k(), rng);
        }
    }
    throw Error(Errc::InvalidParams, "unknown policy");
}

}  // namespace combandit
