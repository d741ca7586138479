#include <gtest/gtest.h>

#include <cmath>

#include "combandit/environments.hpp"
#include "combandit/episode.hpp"
#include "combandit/trace.hpp"

using namespace combandit;

namespace {

EpisodeTrace full_run(const PreparedEnvironment& env, std::uint64_t horizon, std::uint64_t seed) {
    EpisodeOptions opts;
    opts.full_trace = true;
    opts.record_indices = true;
    return run_episode(env, Policy::Ucb, horizon, seed, opts);
}

}  // namespace

TEST(RhoDynamics, CameraTraceSatisfiesSandwich) {
    const PreparedEnvironment env(envs::camera6());
    const EpisodeTrace trace = full_run(env, 5000, 1);
    ASSERT_TRUE(trace.dynamics.has_value());
    EXPECT_TRUE(trace.dynamics->pass);
    const DynamicsResult replay = verify_rho_dynamics(trace);
    EXPECT_TRUE(replay.pass);
    EXPECT_EQ(replay.violations, 0u);
    EXPECT_GT(replay.steps_checked, 4000u);
}

TEST(RhoDynamics, RhoNeverIncreases) {
    const PreparedEnvironment env(envs::pref10());
    const EpisodeTrace trace = full_run(env, 3000, 4);
    for (std::size_t i = 1; i < trace.records.size(); ++i) {
        ASSERT_LE(trace.records[i].rho, trace.records[i - 1].rho);
        ASSERT_LE(trace.records[i].rho, trace.records[i].rho_prime);
    }
}

TEST(RhoDynamics, CorruptedIndexIsCaught) {
    const PreparedEnvironment env(envs::camera6());
    EpisodeTrace trace = full_run(env, 2000, 2);
    ASSERT_TRUE(verify_rho_dynamics(trace).pass);
    const std::size_t step = 1500;
    const auto& rec = trace.records[step];
    std::uint32_t outside = 0;
    while (rec.selected.contains(ArmId{outside})) ++outside;
    trace.snapshots[step].index[outside] = rec.rho * 2.0 + 1.0;
    const DynamicsResult r = verify_rho_dynamics(trace);
    EXPECT_FALSE(r.pass);
    ASSERT_TRUE(r.first_violation.has_value());
    EXPECT_EQ(r.first_violation->step, rec.t);
    EXPECT_EQ(r.first_violation->arm, ArmId{outside});
    EXPECT_EQ(r.first_violation->which, RhoInequality::UpperBound);
}

TEST(RhoDynamics, IncreasingStoredRhoIsCaught) {
    const PreparedEnvironment env(envs::camera6());
    EpisodeTrace trace = full_run(env, 500, 3);
    trace.records[400].rho = trace.records[399].rho + 1.0;
    const DynamicsResult r = verify_rho_dynamics(trace);
    EXPECT_FALSE(r.pass);
}

TEST(RhoDynamics, NeedsSnapshots) {
    const PreparedEnvironment env(envs::camera6());
    const EpisodeTrace trace = run_episode(env, Policy::Ucb, 100, 1);
    EXPECT_THROW(verify_rho_dynamics(trace), Error);
}

TEST(Confidence, ZeroProbabilityModelHasNoEvents) {
    const PreparedEnvironment env(RewardModel::tabular(4, 2, FeedbackMode::Exclusive, std::vector<double>(12, 0.0)));
    EpisodeOptions opts;
    opts.full_trace = true;
    const EpisodeTrace trace = run_episode(env, Policy::Ucb, 1000, 1, opts);
    ASSERT_TRUE(trace.confidence.has_value());
    EXPECT_EQ(trace.confidence->violation_events, 0u);
    EXPECT_EQ(confidence_monitor(trace, env.model).violation_events, 0u);
}

TEST(Confidence, PlantedDriftIsFlagged) {
    // Arm 1 pays 1 on every step while its probability is 0.1.
    const RewardModel model = make_independent_env({0.1, 0.1}, 1, FeedbackMode::Independent);
    EpisodeTrace trace;
    trace.horizon = 1000;
    trace.alpha = 2.0;
    trace.full_resolution = true;
    for (std::uint64_t t = 1; t <= 1000; ++t) trace.records.push_back({t, Subset::of({0}), {1.0}, 0.0, 0.0, 0.0, 0.0});
    const ConfidenceSummary s = confidence_monitor(trace, model);
    EXPECT_GT(s.violation_events, 0u);
    EXPECT_EQ(s.per_arm_events[1], 0u);
    // Deviation 0.9 N exceeds sqrt(2 N ln 1000) once N > 17.
    EXPECT_GE(s.violation_events, 1000u - 18u);
}

TEST(Confidence, StreamingAndReplayAgree) {
    const PreparedEnvironment env(envs::camera6());
    EpisodeOptions opts;
    opts.full_trace = true;
    const EpisodeTrace trace = run_episode(env, Policy::Ucb, 3000, 9, opts);
    const ConfidenceSummary replay = confidence_monitor(trace, env.model);
    EXPECT_EQ(replay.violation_events, trace.confidence->violation_events);
    EXPECT_EQ(replay.arm_steps, trace.confidence->arm_steps);
}

TEST(LockIn, CameraSeedsLockIn) {
    const PreparedEnvironment env(envs::camera6());
    const GapProfile gaps = gap_profile(env.model);
    int passed = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        EpisodeOptions opts;
        opts.full_trace = true;
        const EpisodeTrace trace = run_episode(env, Policy::Ucb, 10000, seed, opts);
        const LockInResult r = check_arm_lock_in(trace, gaps);
        ASSERT_EQ(r.lock_times.size(), 3u);
        passed += r.pass;
    }
    EXPECT_GE(passed, 19);
}

TEST(LockIn, MissingArmAfterLockTimeFails) {
    const GapProfile gaps = gap_profile(make_independent_env({0.9, 0.5, 0.1}, 1, FeedbackMode::Independent));
    const std::vector<double> rho{HUGE_VAL, 0.95, 0.8, 0.8};
    const std::vector<std::uint64_t> masks{1, 2, 1, 2};
    const LockInResult r = check_arm_lock_in(rho, masks, gaps);
    EXPECT_EQ(r.lock_times[0], 2u);
    EXPECT_FALSE(r.pass);
    ASSERT_TRUE(r.first_failure.has_value());
    EXPECT_EQ(r.first_failure->second, 4u);
}
