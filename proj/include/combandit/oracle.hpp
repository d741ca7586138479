#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "combandit/environments.hpp"
#include "combandit/error.hpp"
#include "combandit/model.hpp"
#include "combandit/subset.hpp"

namespace combandit {

/// RUM probabilities cost a quadrature each; exhaustive scans run on a
/// materialized table instead. Other kinds are returned unchanged.
inline RewardModel scan_model(const RewardModel& model, std::uint64_t cap = kDefaultEnumerationCap) {
    return model.kind() == ModelKind::RumGaussian ? to_tabular(model, cap) : model;
}

struct OptimalSet {
    Subset set;
    double value = 0.0;
};

/// Exhaustive argmax of E[Q(s)]; the lexicographically first set wins exact ties.
inline OptimalSet optimal_set_bruteforce(const RewardModel& input, std::uint64_t cap = kDefaultEnumerationCap) {
    const RewardModel model = scan_model(input, cap);
    OptimalSet best;
    best.value = -std::numeric_limits<double>::infinity();
    std::vector<ArmId> best_arms;
    for_each_subset(model.n(), model.k(), [&](std::span<const ArmId> s) {
        const double v = expected_reward(model, s);
        if (v > best.value) {
            best.value = v;
            best_arms.assign(s.begin(), s.end());
        }
    }, cap);
    best.set = Subset(std::move(best_arms));
    return best;
}

/// Quantities derived from the optimum that feed the regret bounds.
struct GapProfile {
    Subset optimal;
    double optimal_value = 0.0;
    /// min over s != s* of E[Q(s*)] - E[Q(s)]
    double epsilon = 0.0;
    Subset runner_up;
    /// Arms of s* ordered by P(a|s*) descending (stable on ties).
    std::vector<ArmId> sorted_optimal_arms;
    std::vector<double> sorted_optimal_probs;
    /// delta[i][j] = P(a_i|s*) - P(a_j|s*) over the sorted order, row-major k*k.
    std::vector<double> delta;
    /// Delta_l = sum_{i=l..k} delta[l][i]
    std::vector<double> big_delta;

    double delta_at(std::size_t i, std::size_t j) const { return delta[i * sorted_optimal_probs.size() + j]; }
};

inline constexpr double kOptimumTieTolerance = 1e-12;

/// Throws NonUniqueOptimum listing every set within tie_tol of the maximum.
inline GapProfile gap_profile(const RewardModel& input, std::uint64_t cap = kDefaultEnumerationCap,
                              double tie_tol = kOptimumTieTolerance) {
    const RewardModel model = scan_model(input, cap);
    const OptimalSet opt = optimal_set_bruteforce(model, cap);
    GapProfile g;
    g.optimal = opt.set;
    g.optimal_value = opt.value;
    g.epsilon = std::numeric_limits<double>::infinity();
    std::vector<Subset> tied;
    std::vector<ArmId> runner_up;
    for_each_subset(model.n(), model.k(), [&](std::span<const ArmId> s) {
        if (std::equal(s.begin(), s.end(), opt.set.begin(), opt.set.end())) return;
        const double gap = opt.value - expected_reward(model, s);
        if (gap <= tie_tol) tied.push_back(Subset::from_span(s));
        if (gap < g.epsilon) {
            g.epsilon = gap;
            runner_up.assign(s.begin(), s.end());
        }
    }, cap);
    if (!tied.empty()) {
        std::string list = opt.set.to_string();
        for (const auto& s : tied) list += " | " + s.to_string();
        throw Error(Errc::NonUniqueOptimum, "sets tied for the optimum: " + list);
    }
    if (!runner_up.empty()) g.runner_up = Subset(std::move(runner_up));
    else g.epsilon = 0.0;  // k == n: no suboptimal set exists

    const std::size_t k = model.k();
    const auto probs = set_probabilities(model, opt.set);
    std::vector<std::size_t> order(k);
    for (std::size_t i = 0; i < k; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });
    for (auto i : order) {
        g.sorted_optimal_arms.push_back(opt.set[i]);
        g.sorted_optimal_probs.push_back(probs[i]);
    }
    g.delta.assign(k * k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) g.delta[i * k + j] = g.sorted_optimal_probs[i] - g.sorted_optimal_probs[j];
    }
    g.big_delta.assign(k, 0.0);
    for (std::size_t l = 0; l < k; ++l) {
        for (std::size_t i = l; i < k; ++i) g.big_delta[l] += g.delta[l * k + i];
    }
    return g;
}

}  // namespace combandit
