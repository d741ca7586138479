#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "combandit/oracle.hpp"
#include "combandit/subset.hpp"

namespace combandit {

enum class RhoInequality {
    UpperBound,    ///< rho(t) >= UCB_i(t) for arms outside s(t)
    LowerBound,    ///< UCB_i(t) >= rho(t) (1 - 1/N_i(t)) for arms outside s(t)
    Monotonicity,  ///< rho(t) <= rho(t-1)
};

constexpr std::string_view to_string(RhoInequality w) {
    switch (w) {
        case RhoInequality::UpperBound: return "upper";
        case RhoInequality::LowerBound: return "lower";
        case RhoInequality::Monotonicity: return "monotonicity";
    }
    return "unknown";
}

struct RhoViolation {
    std::uint64_t step = 0;
    ArmId arm;
    RhoInequality which = RhoInequality::UpperBound;
    double rho = 0.0;
    double index = 0.0;
};

struct DynamicsResult {
    bool pass = true;
    std::optional<RhoViolation> first_violation;
    std::uint64_t violations = 0;
    /// First step at which every arm had been played; 0 if never reached.
    std::uint64_t first_checked_step = 0;
    std::uint64_t steps_checked = 0;
    /// Arms whose indices dipped below rho(t) (1 - 1/N_i(T)) with the final
    /// count N_i(T). Informational: only the N_i(t) form is asserted.
    std::uint64_t horizon_form_arms_below = 0;
};

/// Streaming check of the rho(t) sandwich on the arms left out of s(t).
/// Feed every step in order with the index values seen at selection time.
class RhoDynamicsChecker {
public:
    explicit RhoDynamicsChecker(std::uint32_t n, double relative_slack = 1e-9)
        : slack_(relative_slack), min_ratio_(n, std::numeric_limits<double>::infinity()) {}

    /// Returns rho(t) after folding in this step.
    double observe(std::uint64_t t, std::span<const double> index, std::span<const std::uint8_t> played,
                   std::span<const std::uint64_t> plays, const Subset& selected) {
        double rho_prime = std::numeric_limits<double>::infinity();
        bool selected_unplayed = false;
        for (auto a : selected) {
            if (played[a.index]) rho_prime = std::min(rho_prime, index[a.index]);
            else selected_unplayed = true;
        }
        if (selected_unplayed) rho_prime = std::numeric_limits<double>::infinity();
        const bool all_played = std::all_of(played.begin(), played.end(), [](std::uint8_t p) { return p != 0; });

        const double previous = rho_;
        rho_ = std::min(rho_, rho_prime);
        if (rho_ > previous) flag({t, ArmId{}, RhoInequality::Monotonicity, rho_, previous});
        if (!all_played) return rho_;
        if (result_.first_checked_step == 0) result_.first_checked_step = t;
        ++result_.steps_checked;

        const double tol = slack_ * std::abs(rho_);
        const std::uint64_t mask = subset_mask(selected.arms());
        for (std::uint32_t i = 0; i < index.size(); ++i) {
            if (mask >> i & 1u) continue;
            const double u = index[i];
            if (!(rho_ >= u - tol)) flag({t, ArmId{i}, RhoInequality::UpperBound, rho_, u});
            const double floor = rho_ * (1.0 - 1.0 / static_cast<double>(plays[i]));
            if (!(u >= floor - tol)) flag({t, ArmId{i}, RhoInequality::LowerBound, rho_, u});
            if (rho_ > 0.0) min_ratio_[i] = std::min(min_ratio_[i], u / rho_);
        }
        return rho_;
    }

    double rho() const noexcept { return rho_; }

    DynamicsResult finish(std::span<const std::uint64_t> final_plays) {
        DynamicsResult r = result_;
        for (std::size_t i = 0; i < min_ratio_.size() && i < final_plays.size(); ++i) {
            if (final_plays[i] == 0 || !std::isfinite(min_ratio_[i])) continue;
            if (min_ratio_[i] < 1.0 - 1.0 / static_cast<double>(final_plays[i])) ++r.horizon_form_arms_below;
        }
        return r;
    }

private:
    void flag(const RhoViolation& v) {
        result_.pass = false;
        ++result_.violations;
        if (!result_.first_violation) result_.first_violation = v;
    }

    double slack_;
    double rho_ = std::numeric_limits<double>::infinity();
    std::vector<double> min_ratio_;
    DynamicsResult result_;
};

struct ConfidenceSummary {
    std::uint64_t violation_events = 0;
    std::uint64_t arm_steps = 0;
    std::vector<std::uint64_t> per_arm_events;

    double rate() const {
        return arm_steps == 0 ? 0.0 : static_cast<double>(violation_events) / static_cast<double>(arm_steps);
    }
};

/// Counts (arm, step) pairs where |C_i(t) - sum_c B P(a_i|s(c))| >= B sqrt(alpha N_i(t) ln T),
/// the sum running over steps c <= t whose set contained a_i. Arms with N_i = 0 are skipped.
class ConfidenceMonitor {
public:
    ConfidenceMonitor(std::uint32_t n, double alpha, std::uint64_t horizon, double reward_bound)
        : alpha_log_(alpha * std::log(static_cast<double>(horizon))),
          bound_(reward_bound),
          expected_(n, 0.0) {
        summary_.per_arm_events.assign(n, 0);
    }

    /// Call after the state update of each step.
    void observe(const Subset& selected, std::span<const double> probs, std::span<const std::uint64_t> plays,
                 std::span<const double> cumulative) {
        for (std::size_t i = 0; i < selected.size(); ++i) expected_[selected[i].index] += bound_ * probs[i];
        for (std::size_t a = 0; a < expected_.size(); ++a) {
            if (plays[a] == 0) continue;
            ++summary_.arm_steps;
            const double radius = bound_ * std::sqrt(alpha_log_ * static_cast<double>(plays[a]));
            if (std::abs(cumulative[a] - expected_[a]) >= radius) {
                ++summary_.violation_events;
                ++summary_.per_arm_events[a];
            }
        }
    }

    const ConfidenceSummary& summary() const noexcept { return summary_; }

private:
    double alpha_log_;
    double bound_;
    std::vector<double> expected_;
    ConfidenceSummary summary_;
};

struct LockInResult {
    bool pass = true;
    /// t_l for l = 1..k: last step with rho(t) >= P(a_l|s*), 0 when none.
    std::vector<std::uint64_t> lock_times;
    /// First (l, step) where a step after t_l missed one of a_1..a_l (l is 1-based).
    std::optional<std::pair<std::size_t, std::uint64_t>> first_failure;
};

/// After t_l, every selected set must contain the l best arms of s*.
/// rho and masks are per step, index 0 holding step 1.
inline LockInResult check_arm_lock_in(std::span<const double> rho, std::span<const std::uint64_t> masks,
                                      const GapProfile& gaps) {
    LockInResult r;
    const std::size_t k = gaps.sorted_optimal_probs.size();
    std::uint64_t required = 0;
    for (std::size_t l = 0; l < k; ++l) {
        required |= std::uint64_t{1} << gaps.sorted_optimal_arms[l].index;
        const double p = gaps.sorted_optimal_probs[l];
        std::uint64_t t_l = 0;
        for (std::size_t t = rho.size(); t-- > 0;) {
            if (rho[t] >= p) {
                t_l = t + 1;
                break;
            }
        }
        r.lock_times.push_back(t_l);
        for (std::size_t t = t_l; t < masks.size(); ++t) {
            if ((masks[t] & required) != required) {
                r.pass = false;
                if (!r.first_failure) r.first_failure = std::make_pair(l + 1, static_cast<std::uint64_t>(t + 1));
                break;
            }
        }
    }
    return r;
}

}  // namespace combandit
