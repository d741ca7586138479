#include <gtest/gtest.h>

#include <fstream>
#include <optional>
#include <sstream>

#include "combandit/assumptions.hpp"
#include "combandit/environments.hpp"
#include "combandit/oracle.hpp"
#include "combandit/tabular_io.hpp"

using namespace combandit;

TEST(LowerBoundEnv, ExclusiveProbabilities) {
    const RewardModel m = make_lower_bound_env(FeedbackMode::Exclusive, 4, 2, 0.05, 1);
    EXPECT_EQ(m.n(), 5u);
    for_each_subset(m.n(), m.k(), [&](std::span<const ArmId> s) {
        std::vector<double> p(2);
        set_probabilities(m, s, p);
        for (std::size_t i = 0; i < 2; ++i) {
            const bool good = s[i].index == 0 || s[i].index == 4;
            EXPECT_NEAR(p[i], good ? 1.0 / 3.0 : 1.0 / 3.0 - 0.05, 1e-15);
        }
    });
}

TEST(LowerBoundEnv, IndependentProbabilities) {
    const RewardModel m = make_lower_bound_env(FeedbackMode::Independent, 4, 2, 0.05, 2);
    EXPECT_NEAR(arm_prob(m, ArmId{1}, Subset::of({1, 4})), 0.5, 1e-15);
    EXPECT_NEAR(arm_prob(m, ArmId{4}, Subset::of({0, 4})), 0.5, 1e-15);
    EXPECT_NEAR(arm_prob(m, ArmId{0}, Subset::of({0, 2})), 0.45, 1e-15);
    EXPECT_EQ(optimal_set_bruteforce(m).set, Subset::of({1, 4}));
}

TEST(LowerBoundEnv, InvalidGap) {
    try {
        make_lower_bound_env(FeedbackMode::Exclusive, 4, 2, 0.4, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::InvalidGap);
    }
    EXPECT_THROW(make_lower_bound_env(FeedbackMode::Independent, 4, 2, 0.0, 1), Error);
    EXPECT_THROW(make_lower_bound_env(FeedbackMode::Independent, 4, 2, 0.1, 5), Error);
}

TEST(Generator, DeterministicForFixedSeed) {
    const RewardModel a = generate_consistent_env(10, 5, RngStream(7, 0));
    const RewardModel b = generate_consistent_env(10, 5, RngStream(7, 0));
    EXPECT_EQ(std::get<TabularParams>(a.params()).probs, std::get<TabularParams>(b.params()).probs);
    EXPECT_EQ(model_fingerprint(a), model_fingerprint(b));
    const RewardModel c = generate_consistent_env(10, 5, RngStream(8, 0));
    EXPECT_NE(model_fingerprint(a), model_fingerprint(c));
}

TEST(Generator, ConstructionInvariants) {
    // Rejection sampling has no guaranteed termination; seeds that run out of
    // budget are skipped until 15 environments have been checked.
    int checked = 0;
    for (std::uint64_t seed = 1; checked < 15 && seed <= 100; ++seed) {
        std::optional<RewardModel> generated;
        try {
            generated = generate_consistent_env(6, 3, RngStream(seed, 0));
        } catch (const Error& e) {
            ASSERT_EQ(e.code(), Errc::RejectionBudgetExhausted);
            continue;
        }
        ++checked;
        const RewardModel& m = *generated;
        const auto p_star = set_probabilities(m, Subset::prefix(3));
        double mass_star = 0.0;
        for (double p : p_star) {
            EXPECT_GE(p, 0.0);
            EXPECT_LE(p, 1.0 / 3.0);
            EXPECT_EQ(p, round_to_12_digits(p));
            mass_star += p;
        }
        for_each_subset(6, 3, [&](std::span<const ArmId> s) {
            if (s[2].index == 2) return;
            std::vector<double> p(3);
            set_probabilities(m, s, p);
            double mass = 0.0;
            for (std::size_t i = 0; i < 3; ++i) {
                mass += p[i];
                EXPECT_LE(p[i], 1.0 / 3.0);
                if (s[i].index < 3) { EXPECT_GE(p[i], p_star[s[i].index]); }
            }
            EXPECT_LT(mass, mass_star);
        });
        EXPECT_TRUE(check_weak_consistency(m).pass);
        EXPECT_EQ(optimal_set_bruteforce(m).set, Subset::prefix(3));
    }
    EXPECT_EQ(checked, 15);
}

TEST(Generator, BudgetExhaustionNamesTheSet) {
    // One attempt per set is far too few for n=10, k=5.
    try {
        generate_consistent_env(10, 5, RngStream(1, 0), 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::RejectionBudgetExhausted);
        EXPECT_NE(std::string(e.what()).find("set "), std::string::npos);
    }
}

TEST(TabularIo, RoundTripIsExact) {
    for (const RewardModel& m : {envs::camera6(), generate_consistent_env(8, 3, RngStream(3, 0)),
                                 make_lower_bound_env(FeedbackMode::Independent, 4, 2, 0.05, 1).with_reward_bound(2.0),
                                 envs::pref10()}) {
        std::stringstream buf;
        write_tabular(m, buf);
        const RewardModel back = read_tabular(buf);
        const RewardModel table = to_tabular(m);
        EXPECT_EQ(std::get<TabularParams>(back.params()).probs, std::get<TabularParams>(table.params()).probs);
        EXPECT_EQ(back.name(), m.name());
        EXPECT_EQ(back.mode(), m.mode());
        EXPECT_EQ(back.reward_bound(), m.reward_bound());
        EXPECT_EQ(back.labels(), m.labels());
        EXPECT_EQ(back.declared_optimal(), m.declared_optimal());
        std::stringstream again;
        write_tabular(back, again);
        EXPECT_EQ(again.str(), buf.str());
    }
}

TEST(TabularIo, CorruptProbabilityNamesRow) {
    std::ifstream in(std::string(COMBANDIT_GOLDEN_DIR) + "/../fixtures/corrupt_prob.txt");
    ASSERT_TRUE(in.good());
    try {
        read_tabular(in);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::ParseError);
        const std::string msg = e.what();
        EXPECT_NE(msg.find("line 16"), std::string::npos) << msg;
        EXPECT_NE(msg.find("1.2"), std::string::npos) << msg;
    }
}

TEST(TabularIo, RejectsIncompleteTable) {
    std::stringstream in("# combandit tabular environment v1\nn 3\nk 2\nmode M2\ntable\n1,2 1 0.5\n1,2 2 0.5\n");
    EXPECT_THROW(read_tabular(in), Error);
}

TEST(TabularIo, FixtureLoads) {
    const RewardModel m = load_tabular(std::string(COMBANDIT_GOLDEN_DIR) + "/../fixtures/independent4.txt");
    EXPECT_EQ(m.n(), 4u);
    EXPECT_EQ(m.mode(), FeedbackMode::Independent);
    EXPECT_DOUBLE_EQ(arm_prob(m, ArmId{0}, Subset::of({0, 3})), 0.6);
}

TEST(ExperimentEnvs, UnknownName) {
    try {
        make_experiment_env("nope");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::UnknownEnvironment);
    }
}
