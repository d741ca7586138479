#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "combandit/model.hpp"
#include "combandit/oracle.hpp"
#include "combandit/subset.hpp"

namespace combandit {

inline constexpr double kCheckerTolerance = 1e-10;

struct ConsistencyViolation {
    ArmId arm;
    Subset set;
    double prob_in_set = 0.0;
    double prob_in_optimal = 0.0;
};

struct ConsistencyReport {
    bool pass = true;
    Subset optimal;
    std::uint64_t pairs_checked = 0;
    std::uint64_t violation_count = 0;
    std::vector<ConsistencyViolation> violations;  // first max_listed only
};

/// Weak optimal set consistency: for every s != s* and every shared arm a,
/// E[X_{a,s}] >= E[X_{a,s*}] - tol. Expectations include the reward bound B,
/// which covers the bounded-reward form of the assumption.
inline ConsistencyReport check_weak_consistency(const RewardModel& input, double tol = kCheckerTolerance,
                                                std::uint64_t cap = kDefaultEnumerationCap,
                                                std::size_t max_listed = 1000) {
    const RewardModel model = scan_model(input, cap);
    ConsistencyReport report;
    report.optimal = optimal_set_bruteforce(model, cap).set;
    const double bound = model.reward_bound();
    const auto optimal_probs = set_probabilities(model, report.optimal);
    const std::uint64_t optimal_mask = subset_mask(report.optimal.arms());
    std::vector<double> probs(model.k());
    for_each_subset(model.n(), model.k(), [&](std::span<const ArmId> s) {
        const std::uint64_t mask = subset_mask(s);
        if (mask == optimal_mask || (mask & optimal_mask) == 0) return;
        set_probabilities(model, s, probs);
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (!(optimal_mask >> s[i].index & 1u)) continue;
            ++report.pairs_checked;
            const double p_star = optimal_probs[*report.optimal.position(s[i])];
            if (bound * probs[i] < bound * p_star - tol) {
                report.pass = false;
                ++report.violation_count;
                if (report.violations.size() < max_listed) {
                    report.violations.push_back({s[i], Subset::from_span(s), probs[i], p_star});
                }
            }
        }
    }, cap);
    return report;
}

struct OrderReport {
    bool has_total_order = true;
    /// Pairs (a, b), a < b by index, where neither a <= b nor b <= a.
    std::vector<std::pair<ArmId, ArmId>> incomparable_pairs;
    /// Cycles through the dominance relation that contain at least one strict
    /// step; each is a witness that transitivity fails. Consecutive arms
    /// satisfy x <= y and the last arm closes back to the first. Rotated so
    /// the smallest arm comes first.
    std::vector<std::vector<ArmId>> cycles;
};

/// Builds a <= b iff P(a|s) <= P(b|s) + tol for every s containing both,
/// then reports incomparable pairs and transitivity witnesses.
inline OrderReport check_total_order(const RewardModel& input, double tol = kCheckerTolerance,
                                     std::uint64_t cap = kDefaultEnumerationCap, std::size_t max_cycles = 64) {
    const RewardModel model = scan_model(input, cap);
    const std::uint32_t n = model.n();
    // le[a*n+b]: a <= b holds in every set seen so far. Pairs never sharing a set stay vacuously comparable.
    std::vector<std::uint8_t> le(std::size_t{n} * n, 1);
    std::vector<double> probs(model.k());
    for_each_subset(n, model.k(), [&](std::span<const ArmId> s) {
        set_probabilities(model, s, probs);
        for (std::size_t i = 0; i < s.size(); ++i) {
            for (std::size_t j = 0; j < s.size(); ++j) {
                if (i != j && probs[i] > probs[j] + tol) le[s[i].index * n + s[j].index] = 0;
            }
        }
    }, cap);

    OrderReport report;
    for (std::uint32_t a = 0; a < n; ++a) {
        for (std::uint32_t b = a + 1; b < n; ++b) {
            if (!le[a * n + b] && !le[b * n + a]) report.incomparable_pairs.emplace_back(ArmId{a}, ArmId{b});
        }
    }

    auto strict = [&](std::uint32_t a, std::uint32_t b) { return le[a * n + b] && !le[b * n + a]; };
    // Shortest path from `from` to `to`, over strict edges only or over all <= edges.
    auto find_path = [&](std::uint32_t from, std::uint32_t to, bool strict_only) -> std::optional<std::vector<std::uint32_t>> {
        std::vector<std::int64_t> parent(n, -1);
        std::deque<std::uint32_t> queue{from};
        parent[from] = from;
        while (!queue.empty()) {
            const std::uint32_t u = queue.front();
            queue.pop_front();
            if (u == to) break;
            for (std::uint32_t v = 0; v < n; ++v) {
                if (v == u || parent[v] != -1) continue;
                if (strict_only ? strict(u, v) : le[u * n + v] != 0) {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if (parent[to] == -1) return std::nullopt;
        std::vector<std::uint32_t> path{to};
        while (path.back() != from) path.push_back(static_cast<std::uint32_t>(parent[path.back()]));
        std::reverse(path.begin(), path.end());
        return path;
    };

    std::set<std::vector<std::uint32_t>> seen;
    for (std::uint32_t a = 0; a < n && report.cycles.size() < max_cycles; ++a) {
        for (std::uint32_t b = 0; b < n && report.cycles.size() < max_cycles; ++b) {
            if (a == b || !strict(a, b)) continue;
            auto path = find_path(b, a, true);
            if (!path) path = find_path(b, a, false);
            if (!path) continue;
            std::vector<std::uint32_t> cycle{a};
            cycle.insert(cycle.end(), path->begin(), path->end() - 1);
            std::rotate(cycle.begin(), std::min_element(cycle.begin(), cycle.end()), cycle.end());
            if (!seen.insert(cycle).second) continue;
            std::vector<ArmId> arms;
            for (auto x : cycle) arms.push_back(ArmId{x});
            report.cycles.push_back(std::move(arms));
        }
    }
    report.has_total_order = report.incomparable_pairs.empty() && report.cycles.empty();
    return report;
}

}  // namespace combandit
