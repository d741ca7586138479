#include <gtest/gtest.h>

#include <cmath>

#include "combandit/environments.hpp"
#include "combandit/episode.hpp"

using namespace combandit;

namespace {

void expect_same(const EpisodeTrace& a, const EpisodeTrace& b) {
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        ASSERT_EQ(a.records[i].t, b.records[i].t);
        ASSERT_EQ(a.records[i].selected, b.records[i].selected);
        ASSERT_EQ(a.records[i].rewards, b.records[i].rewards);
        ASSERT_EQ(a.records[i].cumulative_regret, b.records[i].cumulative_regret);
    }
    EXPECT_EQ(a.final_plays, b.final_plays);
    EXPECT_EQ(a.final_rewards, b.final_rewards);
}

}  // namespace

TEST(Episode, DeterministicForFixedSeed) {
    const PreparedEnvironment env(envs::pref10());
    EpisodeOptions opts;
    opts.full_trace = true;
    expect_same(run_episode(env, Policy::Ucb, 2000, 17, opts), run_episode(env, Policy::Ucb, 2000, 17, opts));
    const auto other = run_episode(env, Policy::Ucb, 2000, 18, opts);
    const auto base = run_episode(env, Policy::Ucb, 2000, 17, opts);
    EXPECT_NE(other.final_rewards, base.final_rewards);
}

TEST(Episode, AllArmsSelectedHasNoRegret) {
    const PreparedEnvironment env(make_independent_env({0.2, 0.7, 0.4}, 3, FeedbackMode::Independent));
    for (Policy p : {Policy::Ucb, Policy::UniformRandom}) {
        const auto trace = run_episode(env, p, 500, 1);
        EXPECT_EQ(trace.terminal_regret(), 0.0);
    }
}

TEST(Episode, UniformRegretMatchesMeanGap) {
    // Mean gap over the 20 camera sets is 0.199 with variance 0.038089.
    const PreparedEnvironment env(envs::camera6());
    const std::uint64_t horizon = 10000;
    const auto trace = run_episode(env, Policy::UniformRandom, horizon, 3);
    const double se = std::sqrt(0.038089 / horizon);
    EXPECT_NEAR(trace.terminal_regret() / horizon, 0.199, 3.0 * se);
}

TEST(Episode, RecordsAreConsistent) {
    const PreparedEnvironment env(envs::camera6());
    EpisodeOptions opts;
    opts.full_trace = true;
    const auto trace = run_episode(env, Policy::Ucb, 3000, 5, opts);
    ASSERT_EQ(trace.records.size(), 3000u);
    double sum = 0.0;
    std::vector<std::uint64_t> plays(6, 0);
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        const auto& r = trace.records[i];
        ASSERT_EQ(r.t, i + 1);
        ASSERT_EQ(r.selected.size(), 3u);
        ASSERT_GE(r.regret, -1e-12);
        sum += r.regret;
        ASSERT_NEAR(r.cumulative_regret, sum, 1e-9);
        for (auto a : r.selected) ++plays[a.index];
    }
    EXPECT_EQ(plays, trace.final_plays);
}

TEST(Episode, CheckpointRecordsMatchFullTrace) {
    const PreparedEnvironment env(envs::pref10());
    EpisodeOptions full;
    full.full_trace = true;
    EpisodeOptions sparse;
    sparse.checkpoints = 50;
    const auto a = run_episode(env, Policy::Ucb, 5000, 2, full);
    const auto b = run_episode(env, Policy::Ucb, 5000, 2, sparse);
    ASSERT_EQ(b.records.back().t, 5000u);
    for (const auto& r : b.records) EXPECT_EQ(r.cumulative_regret, a.records[r.t - 1].cumulative_regret);
}

TEST(Episode, ParallelSeedsMatchSequential) {
    const PreparedEnvironment env(envs::camera6());
    const std::vector<std::uint64_t> seeds{4, 9, 1, 12, 7};
    const auto one = run_seeds(env, Policy::Ucb, 2000, seeds, {}, 1);
    const auto many = run_seeds(env, Policy::Ucb, 2000, seeds, {}, 4);
    ASSERT_EQ(one.size(), seeds.size());
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        EXPECT_EQ(one[i].seed, seeds[i]);
        expect_same(one[i], many[i]);
    }
}

TEST(Episode, HorizonMismatch) {
    const PreparedEnvironment env(envs::camera6());
    UcbState state(UcbConfig{6, 3, 500, 2.0, 1.0, false});
    try {
        run_episode(env, Policy::Ucb, std::move(state), 1000, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::HorizonMismatch);
    }
}

TEST(Episode, GeometricCheckpoints) {
    const auto c = geometric_checkpoints(100000, 1000);
    EXPECT_EQ(c.front(), 1u);
    EXPECT_EQ(c.back(), 100000u);
    for (std::size_t i = 1; i < c.size(); ++i) EXPECT_LT(c[i - 1], c[i]);
    EXPECT_EQ(geometric_checkpoints(5, 1000).size(), 5u);
}
