#include <gtest/gtest.h>

#include <algorithm>

#include "combandit/assumptions.hpp"
#include "combandit/environments.hpp"

using namespace combandit;

namespace {

// Naive restatements of the two definitions for 4-arm, k=2 tables.
struct Truth {
    bool consistent;
    bool total_order;
};

Truth naive_truth(const std::vector<double>& table) {
    const auto sets = enumerate_subsets(4, 2);
    // Table rows follow subset_rank, not enumeration order.
    auto prob = [&](std::size_t set, std::uint32_t arm) {
        return table[subset_rank(sets[set].arms()) * 2 + (sets[set][0].index == arm ? 0 : 1)];
    };
    std::size_t best = 0;
    for (std::size_t s = 1; s < sets.size(); ++s) {
        if (prob(s, sets[s][0].index) + prob(s, sets[s][1].index) >
            prob(best, sets[best][0].index) + prob(best, sets[best][1].index)) {
            best = s;
        }
    }
    Truth t{true, true};
    for (std::size_t s = 0; s < sets.size(); ++s) {
        if (s == best) continue;
        for (auto a : sets[s]) {
            if (sets[best].contains(a) && prob(s, a.index) < prob(best, a.index) - 1e-10) t.consistent = false;
        }
    }
    // With k=2 each pair shares exactly one set, so a <= b is decided by that set.
    bool le[4][4];
    for (std::uint32_t a = 0; a < 4; ++a) {
        for (std::uint32_t b = 0; b < 4; ++b) {
            if (a == b) {
                le[a][b] = true;
                continue;
            }
            const auto s = static_cast<std::size_t>(
                std::find(sets.begin(), sets.end(), Subset::of({a, b})) - sets.begin());
            le[a][b] = prob(s, a) <= prob(s, b) + 1e-10;
        }
    }
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            if (!le[a][b] && !le[b][a]) t.total_order = false;
            for (int c = 0; c < 4; ++c) {
                if (le[a][b] && le[b][c] && !le[a][c]) t.total_order = false;
            }
        }
    }
    return t;
}

}  // namespace

TEST(Checkers, AgreeWithNaiveTruthOnAllTwoLevelTables) {
    const double levels[2] = {0.1, 0.3};
    for (std::uint32_t code = 0; code < (1u << 12); ++code) {
        std::vector<double> table(12);
        for (int e = 0; e < 12; ++e) table[e] = levels[(code >> e) & 1u];
        const RewardModel m = RewardModel::tabular(4, 2, FeedbackMode::Independent, table);
        const Truth truth = naive_truth(table);
        ASSERT_EQ(check_weak_consistency(m).pass, truth.consistent) << code;
        ASSERT_EQ(check_total_order(m).has_total_order, truth.total_order) << code;
    }
}

TEST(Checkers, AgreeWithNaiveTruthOnRandomTables) {
    RngStream rng(99, 0);
    for (int trial = 0; trial < 3000; ++trial) {
        std::vector<double> table(12);
        for (auto& p : table) p = static_cast<double>(rng.below(5)) / 10.0;
        const RewardModel m = RewardModel::tabular(4, 2, FeedbackMode::Exclusive, table);
        const Truth truth = naive_truth(table);
        ASSERT_EQ(check_weak_consistency(m).pass, truth.consistent) << trial;
        ASSERT_EQ(check_total_order(m).has_total_order, truth.total_order) << trial;
    }
}

TEST(WeakConsistency, BundledEnvironmentsPass) {
    for (const RewardModel& m : {envs::mnl20(), envs::rum20(), envs::pref10(), envs::camera6()}) {
        const auto r = check_weak_consistency(m);
        EXPECT_TRUE(r.pass) << m.name();
        EXPECT_EQ(r.violation_count, 0u);
        EXPECT_GT(r.pairs_checked, 0u);
    }
}

TEST(WeakConsistency, PlantedViolationIsReportedExactly) {
    RewardModel base = make_independent_env({0.6, 0.3, 0.2, 0.1}, 2, FeedbackMode::Independent);
    auto table = std::get<TabularParams>(base.params()).probs;
    const Subset target = Subset::of({0, 2});
    table[subset_rank(target.arms()) * 2 + 0] = 0.6 / 2.0;
    const RewardModel m = RewardModel::tabular(4, 2, FeedbackMode::Independent, table);
    const auto r = check_weak_consistency(m);
    EXPECT_FALSE(r.pass);
    ASSERT_EQ(r.violation_count, 1u);
    EXPECT_EQ(r.violations[0].arm, ArmId{0});
    EXPECT_EQ(r.violations[0].set, target);
    EXPECT_DOUBLE_EQ(r.violations[0].prob_in_set, 0.3);
    EXPECT_DOUBLE_EQ(r.violations[0].prob_in_optimal, 0.6);
}

TEST(WeakConsistency, UsesScaledExpectations) {
    RewardModel m = make_independent_env({0.6, 0.3, 0.2, 0.1}, 2, FeedbackMode::Independent).with_reward_bound(3.0);
    EXPECT_TRUE(check_weak_consistency(m).pass);
}

TEST(TotalOrder, MnlAndRumPass) {
    EXPECT_TRUE(check_total_order(envs::mnl20()).has_total_order);
    EXPECT_TRUE(check_total_order(envs::rum20()).has_total_order);
}

TEST(TotalOrder, PreferenceMatrixCycle) {
    const OrderReport r = check_total_order(envs::pref10());
    EXPECT_FALSE(r.has_total_order);
    const std::vector<ArmId> expected{ArmId{3}, ArmId{4}, ArmId{5}};
    EXPECT_NE(std::find(r.cycles.begin(), r.cycles.end(), expected), r.cycles.end());
    // Cycle steps follow the relation: 4 <= 5, 5 <= 6, 6 <= 4 (1-indexed).
    const RewardModel m = envs::pref10();
    EXPECT_LT(arm_prob(m, ArmId{3}, Subset::of({3, 4})), arm_prob(m, ArmId{4}, Subset::of({3, 4})));
    EXPECT_LT(arm_prob(m, ArmId{4}, Subset::of({4, 5})), arm_prob(m, ArmId{5}, Subset::of({4, 5})));
    EXPECT_LT(arm_prob(m, ArmId{5}, Subset::of({3, 5})), arm_prob(m, ArmId{3}, Subset::of({3, 5})));
}

TEST(TotalOrder, CameraHasIncomparableDigitalCamera) {
    const OrderReport r = check_total_order(envs::camera6());
    EXPECT_FALSE(r.has_total_order);
    using namespace envs;
    const std::pair<ArmId, ArmId> nikon_dc{ArmId{kNikon}, ArmId{kDigitalCamera}};
    EXPECT_NE(std::find(r.incomparable_pairs.begin(), r.incomparable_pairs.end(), nikon_dc), r.incomparable_pairs.end());
    for (const auto& [a, b] : r.incomparable_pairs) {
        EXPECT_TRUE(a.index == kDigitalCamera || b.index == kDigitalCamera);
    }
}

TEST(TotalOrder, ReportInvariant) {
    for (const RewardModel& m : {envs::pref10(), envs::camera6(), envs::mnl20()}) {
        const OrderReport r = check_total_order(m);
        EXPECT_EQ(r.has_total_order, r.incomparable_pairs.empty() && r.cycles.empty());
    }
}
