#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "combandit/error.hpp"
#include "combandit/format.hpp"
#include "combandit/model.hpp"
#include "combandit/rng.hpp"
#include "combandit/subset.hpp"

namespace combandit {

/// Materializes any model as an explicit table over all C(n,k) sets.
inline RewardModel to_tabular(const RewardModel& model, std::uint64_t cap = kDefaultEnumerationCap) {
    const std::uint32_t n = model.n(), k = model.k();
    check_enumeration(n, k, cap);
    std::vector<double> probs(binomial(n, k) * k);
    for_each_subset(n, k, [&](std::span<const ArmId> s) {
        set_probabilities(model, s, std::span<double>(probs).subspan(subset_rank(s) * k, k));
    }, cap);
    RewardModel out = RewardModel::tabular(n, k, model.mode(), std::move(probs), model.reward_bound(), cap)
                          .with_name(model.name())
                          .with_labels(model.labels())
                          .with_regret_kind(model.regret_kind());
    if (model.declared_optimal()) out = out.with_declared_optimal(*model.declared_optimal());
    return out;
}

/// Set-independent rewards: P(a|s) = probs[a] for every s.
inline RewardModel make_independent_env(std::vector<double> probs, std::uint32_t k, FeedbackMode mode,
                                        std::uint64_t cap = kDefaultEnumerationCap) {
    const auto n = static_cast<std::uint32_t>(probs.size());
    detail::check_sizes(n, k);
    check_enumeration(n, k, cap);
    std::vector<double> table(binomial(n, k) * k);
    for_each_subset(n, k, [&](std::span<const ArmId> s) {
        const std::uint64_t base = subset_rank(s) * k;
        for (std::size_t i = 0; i < k; ++i) table[base + i] = probs[s[i].index];
    }, cap);
    return RewardModel::tabular(n, k, mode, std::move(table), 1.0, cap);
}

namespace envs {

/// v_i = 1 - 0.04 i for i = 1..20, outside weight 1.
inline RewardModel mnl20() {
    std::vector<double> v(20);
    for (int i = 1; i <= 20; ++i) v[i - 1] = 1.0 - 0.04 * i;
    return RewardModel::mnl(std::move(v), 10).with_name("mnl20").with_declared_optimal(Subset::prefix(10));
}

/// mu_i = 1 - 0.04 i, unit-variance Gaussian utilities, outside option ~ N(2, 1).
inline RewardModel rum20() {
    std::vector<double> mu(20);
    for (int i = 1; i <= 20; ++i) mu[i - 1] = 1.0 - 0.04 * i;
    return RewardModel::rum(std::move(mu), 5, 2.0)
        .with_name("rum20")
        .with_declared_optimal(Subset::prefix(5))
        .with_regret_kind(RegretKind::UtilitySurrogate);
}

// Row i, column j: P(a_i | {a_i, a_j}) - P(a_j | {a_i, a_j}). Arms 4, 5, 6 form a cycle.
inline constexpr double kPreferenceTable[10][10] = {
    {0.0, 0.02, 0.05, 0.1, 0.1, 0.2, 0.25, 0.3, 0.3, 0.3},
    {-0.02, 0.0, 0.05, 0.1, 0.1, 0.2, 0.25, 0.3, 0.3, 0.3},
    {-0.05, -0.05, 0.0, 0.45, 0.45, 0.45, 0.45, 0.45, 0.45, 0.45},
    {-0.1, -0.1, -0.45, 0.0, -0.3, 0.3, 0.0, 0.0, 0.0, 0.0},
    {-0.1, -0.1, -0.45, 0.3, 0.0, -0.3, 0.0, 0.0, 0.0, 0.0},
    {-0.2, -0.2, -0.45, -0.3, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0},
    {-0.25, -0.25, -0.45, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {-0.3, -0.3, -0.45, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {-0.3, -0.3, -0.45, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {-0.3, -0.3, -0.45, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
};

inline RewardModel pref10() {
    std::vector<double> m(100);
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) m[i * 10 + j] = kPreferenceTable[i][j];
    }
    return RewardModel::preference(std::move(m), 10, Subset::of({0, 1}), 0.08, 0.1)
        .with_name("pref10")
        .with_declared_optimal(Subset::of({0, 1}));
}

inline constexpr std::uint32_t kNikon = 0, kCanon = 1, kSony = 2, kDigitalCamera = 3, kKeyboard = 4, kShoes = 5;

/// Six suggestions, three shown at a time. Fixed acceptance probabilities
/// except the generic "Digital Camera", which absorbs 0.85 minus its partners.
inline RewardModel camera6() {
    constexpr double fixed[6] = {0.35, 0.30, 0.25, 0.0, 0.01, 0.01};
    constexpr std::uint32_t n = 6, k = 3;
    std::vector<double> table(binomial(n, k) * k);
    for_each_subset(n, k, [&](std::span<const ArmId> s) {
        const std::uint64_t base = subset_rank(s) * k;
        double partners = 0.0;
        for (auto a : s) {
            if (a.index != kDigitalCamera) partners += fixed[a.index];
        }
        for (std::size_t i = 0; i < k; ++i) {
            table[base + i] = s[i].index == kDigitalCamera ? 0.85 - partners : fixed[s[i].index];
        }
    });
    return RewardModel::tabular(n, k, FeedbackMode::Exclusive, std::move(table))
        .with_name("camera6")
        .with_labels({"Nikon", "Canon", "Sony", "DigitalCamera", "Keyboard", "Shoes"})
        .with_declared_optimal(Subset::of({kNikon, kCanon, kSony}));
}

}  // namespace envs

inline RewardModel make_experiment_env(std::string_view name) {
    if (name == "mnl20") return envs::mnl20();
    if (name == "rum20") return envs::rum20();
    if (name == "pref10") return envs::pref10();
    if (name == "camera6") return envs::camera6();
    throw Error(Errc::UnknownEnvironment, "unknown environment '" + std::string(name) + "'");
}

/// Lower-bound family member E_i over n + k - 1 arms. The optimal set
/// {a_i, a_{n+1}, ..., a_{n+k-1}} pays base = 1/(k+1) (M1) or 1/2 (M2) per arm
/// in every set; every other arm pays base - epsilon.
inline RewardModel make_lower_bound_env(FeedbackMode mode, std::uint32_t n, std::uint32_t k, double epsilon,
                                        std::uint32_t i) {
    if (n < 1 || k < 1) throw Error(Errc::InvalidParams, "lower-bound family needs n >= 1 and k >= 1");
    if (i < 1 || i > n) throw Error(Errc::InvalidParams, "environment index must lie in [1, n]");
    const double base = mode == FeedbackMode::Exclusive ? 1.0 / (k + 1.0) : 0.5;
    if (!(epsilon > 0.0 && epsilon < base)) {
        throw Error(Errc::InvalidGap, "epsilon must lie in (0, " + std::to_string(base) + ")");
    }
    const std::uint32_t arms = n + k - 1;
    std::vector<double> probs(arms, base - epsilon);
    std::vector<ArmId> optimal{ArmId{i - 1}};
    probs[i - 1] = base;
    for (std::uint32_t a = n; a < arms; ++a) {
        probs[a] = base;
        optimal.push_back(ArmId{a});
    }
    const std::string name = std::string("lb-") + std::string(to_string(mode)) + "-n" + std::to_string(n) + "-k" +
                             std::to_string(k) + "-eps" + fmt::num(epsilon) + "-i" + std::to_string(i);
    return make_independent_env(std::move(probs), k, mode).with_name(name).with_declared_optimal(Subset(optimal));
}

inline double round_to_12_digits(double x) { return std::round(x * 1e12) / 1e12; }

/// Rejection-sampling generator for environments satisfying weak optimal set
/// consistency: s* = {a_1..a_k}, P(a|s*) ~ U(0, 1/k), and every other set is
/// resampled until its mass falls strictly below the mass of s*. Each set
/// draws from its own child stream of rng, so the result does not depend on
/// visiting order. Exact ties with s* are resampled.
inline RewardModel generate_consistent_env(std::uint32_t n, std::uint32_t k, const RngStream& rng,
                                           std::uint64_t max_retries = 1'000'000,
                                           std::uint64_t cap = kDefaultEnumerationCap) {
    detail::check_sizes(n, k);
    check_enumeration(n, k, cap);
    if (max_retries < 1) throw Error(Errc::InvalidParams, "max_retries must be >= 1");
    const double upper = 1.0 / k;
    const std::uint64_t total_sets = binomial(n, k);
    std::vector<double> table(total_sets * k);

    std::vector<double> optimal_probs(k);
    RngStream opt_rng = rng.fork(total_sets);  // ranks are < total_sets, so no collision
    for (auto& p : optimal_probs) p = round_to_12_digits(opt_rng.uniform(0.0, upper));
    double optimal_mass = 0.0;
    for (double p : optimal_probs) optimal_mass += p;

    for_each_subset(n, k, [&](std::span<const ArmId> s) {
        const std::uint64_t rank = subset_rank(s);
        double* row = table.data() + rank * k;
        if (s[k - 1].index == k - 1) {  // s == s*
            std::copy(optimal_probs.begin(), optimal_probs.end(), row);
            return;
        }
        RngStream set_rng = rng.fork(rank);
        for (std::uint64_t attempt = 0; attempt < max_retries; ++attempt) {
            double mass = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                const std::uint32_t a = s[i].index;
                const double lo = a < k ? optimal_probs[a] : 0.0;
                row[i] = round_to_12_digits(set_rng.uniform(lo, upper));
                mass += row[i];
            }
            if (mass < optimal_mass) return;
        }
        throw Error(Errc::RejectionBudgetExhausted, "no acceptable draw for set " + Subset::from_span(s).to_string() +
                                                        " after " + std::to_string(max_retries) + " attempts");
    }, cap);

    return RewardModel::tabular(n, k, FeedbackMode::Exclusive, std::move(table), 1.0, cap)
        .with_name("gen-n" + std::to_string(n) + "-k" + std::to_string(k) + "-seed" + std::to_string(rng.seed()))
        .with_declared_optimal(Subset::prefix(k));
}

}  // namespace combandit
