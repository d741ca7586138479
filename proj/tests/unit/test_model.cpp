#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "combandit/environments.hpp"
#include "combandit/model.hpp"

using namespace combandit;

namespace {

// Composite Simpson on a fixed grid: an oracle independent of the adaptive
// Gauss-Legendre integrator used by the library.
double simpson_win_probability(const std::vector<double>& means, std::size_t winner) {
    const double lo = -12.0, hi = 14.0;
    const int panels = 20000;
    const double h = (hi - lo) / panels;
    auto f = [&](double x) {
        double v = std::exp(-0.5 * (x - means[winner]) * (x - means[winner])) / std::sqrt(2.0 * M_PI);
        for (std::size_t j = 0; j < means.size(); ++j) {
            if (j != winner) v *= 0.5 * std::erfc(-(x - means[j]) / std::sqrt(2.0));
        }
        return v;
    };
    double sum = f(lo) + f(hi);
    for (int i = 1; i < panels; ++i) sum += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

}  // namespace

TEST(Mnl, OptimalSetMatchesRationalArithmetic) {
    const RewardModel m = envs::mnl20();
    EXPECT_EQ(m.n(), 20u);
    EXPECT_EQ(m.k(), 10u);
    const auto& params = std::get<MnlParams>(m.params());
    EXPECT_DOUBLE_EQ(params.weights[0], 0.96);
    // weights (100 - 4i)/100: sum over i=1..10 is 780/100, so P(a_1) = 96/880 = 6/55.
    const Subset s = Subset::prefix(10);
    EXPECT_NEAR(arm_prob(m, ArmId{0}, s), 6.0 / 55.0, 1e-15);
    EXPECT_NEAR(arm_prob(m, ArmId{9}, s), 60.0 / 880.0, 1e-15);
    EXPECT_NEAR(expected_reward(m, s), 39.0 / 44.0, 1e-14);
}

TEST(Mnl, ExpectedRewardIsOneMinusOutsideShare) {
    const RewardModel m = envs::mnl20();
    const Subset s = Subset::of({0, 3, 7, 12, 15, 16, 17, 18, 19, 2});
    double sum_v = 0.0;
    for (auto a : s) sum_v += 1.0 - 0.04 * (a.index + 1);
    EXPECT_NEAR(expected_reward(m, s), 1.0 - 1.0 / (1.0 + sum_v), 1e-14);
}

TEST(Rum, MatchesFrozenOracleValues) {
    const RewardModel m = envs::rum20();
    // Frozen from an independent adaptive quadrature (outside mean 2, unit variances).
    const std::vector<double> expected{0.11617045560863896, 0.10887445843831824, 0.10195579682333798,
                                       0.09540030058654247, 0.08919402935153573};
    const auto p = set_probabilities(m, Subset::prefix(5));
    for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(p[i], expected[i], 1e-9);
    const auto q = set_probabilities(m, Subset::of({0, 5, 10, 15, 19}));
    const std::vector<double> expected_spread{0.14714186224290188, 0.10744878927587542, 0.07695518027371558,
                                              0.05400050382892708, 0.04005346030994317};
    for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(q[i], expected_spread[i], 1e-9);
}

TEST(Rum, AgreesWithSimpsonOracle) {
    const RewardModel m = envs::rum20();
    const Subset s = Subset::of({15, 16, 17, 18, 19});
    const auto p = set_probabilities(m, s);
    std::vector<double> means;
    for (auto a : s) means.push_back(1.0 - 0.04 * (a.index + 1));
    means.push_back(2.0);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(p[i], simpson_win_probability(means, i), 1e-9);
}

TEST(Rum, ProbabilitiesIncludingOutsideSumToOne) {
    const RewardModel m = envs::rum20();
    RngStream rng(5, 0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<ArmId> arms;
        while (arms.size() < 5) {
            const ArmId a{static_cast<std::uint32_t>(rng.below(20))};
            if (std::find(arms.begin(), arms.end(), a) == arms.end()) arms.push_back(a);
        }
        const Subset s(arms);
        const auto p = set_probabilities(m, s);
        std::vector<double> means;
        for (auto a : s) means.push_back(1.0 - 0.04 * (a.index + 1));
        means.push_back(2.0);
        const double outside = quadrature::gaussian_max_probability(means, 5);
        EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0) + outside, 1.0, 1e-6);
    }
}

TEST(Rum, AgreesWithMonteCarlo) {
    const RewardModel m = envs::rum20();
    const Subset s = Subset::prefix(5);
    const auto p = set_probabilities(m, s);
    RngStream rng(2024, 0);
    const int draws = 1'000'000;
    std::vector<int> wins(6, 0);
    for (int d = 0; d < draws; ++d) {
        int best = 5;
        double best_x = 2.0 + rng.normal();
        for (int i = 0; i < 5; ++i) {
            const double x = 1.0 - 0.04 * (i + 1) + rng.normal();
            if (x > best_x) {
                best_x = x;
                best = i;
            }
        }
        ++wins[best];
    }
    for (int i = 0; i < 5; ++i) {
        const double se = std::sqrt(p[i] * (1.0 - p[i]) / draws);
        EXPECT_NEAR(static_cast<double>(wins[i]) / draws, p[i], 3.0 * se) << "arm " << i;
    }
}

TEST(Preference, PairProbabilities) {
    const RewardModel m = envs::pref10();
    EXPECT_NEAR(arm_prob(m, ArmId{0}, Subset::of({0, 1})), 0.47, 1e-15);
    EXPECT_NEAR(arm_prob(m, ArmId{1}, Subset::of({0, 1})), 0.45, 1e-15);
    EXPECT_NEAR(expected_reward(m, Subset::of({0, 1})), 0.92, 1e-15);
    EXPECT_NEAR(arm_prob(m, ArmId{3}, Subset::of({3, 4})), 0.3, 1e-15);
    EXPECT_NEAR(arm_prob(m, ArmId{4}, Subset::of({3, 4})), 0.6, 1e-15);
    EXPECT_NEAR(expected_reward(m, Subset::of({2, 9})), 0.9, 1e-15);
    const auto& params = std::get<PreferenceParams>(m.params());
    EXPECT_DOUBLE_EQ(params.matrix[3 * 10 + 4], -0.3);
    EXPECT_DOUBLE_EQ(params.matrix[4 * 10 + 5], -0.3);
    EXPECT_DOUBLE_EQ(params.matrix[5 * 10 + 3], -0.3);
}

TEST(Preference, RejectsNonAntisymmetricMatrix) {
    std::vector<double> m(9, 0.0);
    m[0 * 3 + 1] = 0.1;
    m[1 * 3 + 0] = 0.1;
    EXPECT_THROW(RewardModel::preference(m, 3, Subset::of({0, 1}), 0.1, 0.1), Error);
}

TEST(Camera, DigitalCameraAbsorbsRemainder) {
    const RewardModel m = envs::camera6();
    using namespace envs;
    EXPECT_NEAR(arm_prob(m, ArmId{kDigitalCamera}, Subset::of({kNikon, kCanon, kDigitalCamera})), 0.20, 1e-15);
    EXPECT_NEAR(arm_prob(m, ArmId{kDigitalCamera}, Subset::of({kDigitalCamera, kKeyboard, kShoes})), 0.83, 1e-15);
    EXPECT_NEAR(expected_reward(m, Subset::of({kNikon, kCanon, kSony})), 0.90, 1e-15);
    EXPECT_EQ(m.arm_name(ArmId{kDigitalCamera}), "DigitalCamera");
}

TEST(Tabular, Validation) {
    EXPECT_THROW(RewardModel::tabular(3, 2, FeedbackMode::Independent, {0.5, 0.5}), Error);
    EXPECT_THROW(RewardModel::tabular(3, 2, FeedbackMode::Independent, {0.5, 1.2, 0.1, 0.1, 0.1, 0.1}), Error);
    try {
        RewardModel::tabular(3, 2, FeedbackMode::Exclusive, {0.6, 0.6, 0.1, 0.1, 0.1, 0.1});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::ProbabilityOverflow);
    }
}

TEST(Model, ArmNotInSet) {
    const RewardModel m = envs::camera6();
    try {
        arm_prob(m, ArmId{5}, Subset::of({0, 1, 2}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::ArmNotInSet);
    }
}

TEST(Sampling, ExclusiveRewardsAtMostOneArm) {
    const RewardModel m = envs::camera6();
    RngStream rng(1, 1);
    const Subset s = Subset::of({0, 1, 2});
    std::vector<int> wins(3, 0);
    const int m_draws = 100000;
    for (int d = 0; d < m_draws; ++d) {
        const auto r = sample_feedback(m, s, rng);
        int total = 0;
        for (std::size_t i = 0; i < 3; ++i) {
            ASSERT_TRUE(r[i] == 0.0 || r[i] == 1.0);
            total += r[i] > 0;
            wins[i] += r[i] > 0;
        }
        ASSERT_LE(total, 1);
    }
    const double probs[3] = {0.35, 0.30, 0.25};
    for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(static_cast<double>(wins[i]) / m_draws, probs[i],
                    4.0 * std::sqrt(probs[i] * (1 - probs[i]) / m_draws));
    }
}

TEST(Sampling, IndependentFrequencies) {
    const RewardModel m = make_independent_env({0.9, 0.5, 0.1}, 3, FeedbackMode::Independent);
    std::vector<int> wins(3, 0);
    int all_three = 0;
    const int draws = 1'000'000;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        RngStream rng(seed, 1);
        for (int d = 0; d < draws / 10; ++d) {
            const auto r = sample_feedback(m, Subset::prefix(3), rng);
            for (int i = 0; i < 3; ++i) wins[i] += r[i] > 0;
            all_three += r[0] > 0 && r[1] > 0 && r[2] > 0;
        }
    }
    const double probs[3] = {0.9, 0.5, 0.1};
    for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(static_cast<double>(wins[i]) / draws, probs[i], 4.0 * std::sqrt(probs[i] * (1 - probs[i]) / draws));
    }
    // independence: joint frequency factorizes
    EXPECT_NEAR(static_cast<double>(all_three) / draws, 0.045, 4.0 * std::sqrt(0.045 * 0.955 / draws));
}

TEST(Sampling, ZeroProbabilitiesNeverReward) {
    const RewardModel m = RewardModel::tabular(3, 2, FeedbackMode::Exclusive, std::vector<double>(6, 0.0));
    RngStream rng(1, 0);
    for (int d = 0; d < 1000; ++d) {
        const auto r = sample_feedback(m, Subset::of({0, 2}), rng);
        ASSERT_EQ(r[0], 0.0);
        ASSERT_EQ(r[1], 0.0);
    }
}

TEST(Sampling, RewardScaledByBound) {
    const RewardModel m = make_independent_env({1.0, 1.0}, 2, FeedbackMode::Independent).with_reward_bound(2.5);
    RngStream rng(1, 0);
    const auto r = sample_feedback(m, Subset::prefix(2), rng);
    EXPECT_EQ(r[0], 2.5);
    EXPECT_EQ(r[1], 2.5);
    EXPECT_DOUBLE_EQ(expected_reward(m, Subset::prefix(2)), 5.0);
}

TEST(Sampling, SingleArmSetExpectedReward) {
    const RewardModel m = make_independent_env({0.3, 0.7}, 1, FeedbackMode::Exclusive);
    EXPECT_DOUBLE_EQ(expected_reward(m, Subset::of({1})), 0.7);
}
