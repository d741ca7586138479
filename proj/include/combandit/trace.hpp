#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "combandit/dynamics.hpp"
#include "combandit/episode.hpp"
#include "combandit/format.hpp"

namespace combandit {

// ---------------------------------------------------------------------------
// Aggregation

struct AggregateCurve {
    std::string environment;
    std::string environment_hash;
    std::string policy;
    std::uint64_t horizon = 0;
    std::vector<std::uint64_t> t;
    std::vector<double> mean_regret;
    std::vector<double> std_regret;
    std::vector<std::uint64_t> seeds;
    std::vector<double> terminal_regret;  // per seed, same order as seeds
};

namespace detail {

// R(t) at the last stored record with step <= t; records are sorted by t.
inline double regret_at(const EpisodeTrace& trace, std::uint64_t t, std::size_t& cursor) {
    const auto& r = trace.records;
    while (cursor + 1 < r.size() && r[cursor + 1].t <= t) ++cursor;
    if (r.empty() || r[cursor].t > t) return 0.0;
    return r[cursor].cumulative_regret;
}

}  // namespace detail

/// Mean and population std of R(t) on a geometric grid that ends at T.
/// Sums run in trace order so the result does not depend on how the traces were produced.
inline AggregateCurve aggregate_runs(std::span<const EpisodeTrace> traces, std::uint64_t checkpoints = 1000) {
    if (traces.empty()) throw Error(Errc::HeterogeneousTraces, "no traces to aggregate");
    const EpisodeTrace& first = traces.front();
    for (const auto& tr : traces) {
        if (tr.environment_hash != first.environment_hash || tr.policy != first.policy || tr.horizon != first.horizon) {
            throw Error(Errc::HeterogeneousTraces, "traces differ in environment, policy or horizon (seed " +
                                                       std::to_string(tr.seed) + ")");
        }
    }
    AggregateCurve c;
    c.environment = first.environment;
    c.environment_hash = first.environment_hash;
    c.policy = first.policy;
    c.horizon = first.horizon;
    c.t = geometric_checkpoints(first.horizon, checkpoints);
    const double m = static_cast<double>(traces.size());
    std::vector<std::size_t> cursor(traces.size(), 0);
    std::vector<double> values(traces.size());
    for (std::uint64_t t : c.t) {
        double sum = 0.0;
        for (std::size_t i = 0; i < traces.size(); ++i) {
            values[i] = detail::regret_at(traces[i], t, cursor[i]);
            sum += values[i];
        }
        const double mean = sum / m;
        double sq = 0.0;
        for (double v : values) sq += (v - mean) * (v - mean);
        c.mean_regret.push_back(mean);
        c.std_regret.push_back(std::sqrt(sq / m));
    }
    for (const auto& tr : traces) {
        c.seeds.push_back(tr.seed);
        c.terminal_regret.push_back(tr.terminal_regret());
    }
    return c;
}

// ---------------------------------------------------------------------------
// Batch diagnostics over stored traces

/// Replays the rho(t) sandwich from per-step index snapshots and also checks
/// that the stored rho column never increases.
inline DynamicsResult verify_rho_dynamics(const EpisodeTrace& trace, double relative_slack = 1e-9) {
    if (!trace.full_resolution || trace.snapshots.size() != trace.records.size()) {
        throw Error(Errc::InvalidParams, "rho verification needs a full trace with index snapshots");
    }
    const std::uint32_t n = trace.snapshots.empty() ? 0 : static_cast<std::uint32_t>(trace.snapshots.front().index.size());
    RhoDynamicsChecker checker(n, relative_slack);
    DynamicsResult stored;
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        const auto& snap = trace.snapshots[i];
        const auto& rec = trace.records[i];
        checker.observe(rec.t, snap.index, snap.played, snap.plays, rec.selected);
        if (rec.rho > previous && !stored.first_violation) {
            stored.first_violation = RhoViolation{rec.t, ArmId{}, RhoInequality::Monotonicity, rec.rho, previous};
        }
        if (rec.rho > previous) ++stored.violations;
        previous = rec.rho;
    }
    DynamicsResult r = checker.finish(trace.final_plays);
    if (stored.violations > 0) {
        r.violations += stored.violations;
        if (!r.first_violation || stored.first_violation->step < r.first_violation->step) {
            r.first_violation = stored.first_violation;
        }
        r.pass = false;
    }
    return r;
}

/// Rebuilds C_i(t) from recorded rewards and counts confidence-radius breaches.
inline ConfidenceSummary confidence_monitor(const EpisodeTrace& trace, const RewardModel& model) {
    if (!trace.full_resolution) throw Error(Errc::InvalidParams, "confidence monitoring needs a full trace");
    const std::uint32_t n = model.n();
    ConfidenceMonitor monitor(n, trace.alpha, trace.horizon, trace.reward_bound);
    ProbabilitySource source(model);
    std::vector<std::uint64_t> plays(n, 0);
    std::vector<double> cumulative(n, 0.0);
    std::vector<double> probs(model.k());
    for (const auto& rec : trace.records) {
        if (rec.rewards.size() != rec.selected.size()) {
            throw Error(Errc::MisalignedRewards, "step " + std::to_string(rec.t) + " has no reward vector");
        }
        for (std::size_t i = 0; i < rec.selected.size(); ++i) {
            ++plays[rec.selected[i].index];
            cumulative[rec.selected[i].index] += rec.rewards[i];
        }
        source.fill(rec.selected, probs);
        monitor.observe(rec.selected, probs, plays, cumulative);
    }
    return monitor.summary();
}

/// Lock-in check driven by a full trace.
inline LockInResult check_arm_lock_in(const EpisodeTrace& trace, const GapProfile& gaps) {
    if (!trace.full_resolution) throw Error(Errc::InvalidParams, "lock-in check needs a full trace");
    std::vector<double> rho;
    std::vector<std::uint64_t> masks;
    rho.reserve(trace.records.size());
    masks.reserve(trace.records.size());
    for (const auto& rec : trace.records) {
        rho.push_back(rec.rho);
        masks.push_back(subset_mask(rec.selected.arms()));
    }
    return check_arm_lock_in(rho, masks, gaps);
}

// ---------------------------------------------------------------------------
// Trace files
//
//   # combandit trace v1
//   # env: camera6
//   # env_hash: 0123456789abcdef
//   # policy: ucb
//   # seed: 1
//   # horizon: 10000
//   # alpha: 2
//   # reward_bound: 1
//   # regret: expected
//   # resolution: checkpoints | full
//   # final_N: 10 20 ...
//   # final_C: 3 7 ...
//   # <extra key>: <value>          (provenance, e.g. the resolved config)
//   t,cumulative_regret,rho,selected
//   1,0.05,inf,1 2 4

using Provenance = std::vector<std::pair<std::string, std::string>>;

inline constexpr const char* kTraceMagic = "# combandit trace v1";
inline constexpr const char* kTraceColumns = "t,cumulative_regret,rho,selected";
inline constexpr const char* kCurveMagic = "# combandit curve v1";
inline constexpr const char* kCurveColumns = "t,mean_regret,std_regret";

namespace detail {

template <typename T, typename F>
std::string join_values(const std::vector<T>& values, F&& format) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ' ';
        out += format(values[i]);
    }
    return out;
}

inline Error trace_error(std::size_t line, const std::string& msg) {
    return Error(Errc::ParseError, "line " + std::to_string(line) + ": " + msg);
}

// Splits "# key: value" into its parts; false for other lines.
inline bool header_field(std::string_view line, std::string_view& key, std::string_view& value) {
    if (line.size() < 2 || line.substr(0, 2) != "# ") return false;
    const auto colon = line.find(": ", 2);
    if (colon == std::string_view::npos) return false;
    key = line.substr(2, colon - 2);
    value = line.substr(colon + 2);
    return true;
}

inline void write_provenance(std::ostream& out, const Provenance& extra) {
    for (const auto& [key, value] : extra) out << "# " << key << ": " << value << '\n';
}

}  // namespace detail

inline void write_trace(const EpisodeTrace& trace, std::ostream& out, const Provenance& extra = {}) {
    out << kTraceMagic << '\n';
    out << "# env: " << trace.environment << '\n';
    out << "# env_hash: " << trace.environment_hash << '\n';
    out << "# policy: " << trace.policy << '\n';
    out << "# seed: " << trace.seed << '\n';
    out << "# horizon: " << trace.horizon << '\n';
    out << "# alpha: " << fmt::num(trace.alpha) << '\n';
    out << "# reward_bound: " << fmt::num(trace.reward_bound) << '\n';
    out << "# regret: " << to_string(trace.regret_kind) << '\n';
    out << "# resolution: " << (trace.full_resolution ? "full" : "checkpoints") << '\n';
    out << "# final_N: " << detail::join_values(trace.final_plays, [](std::uint64_t v) { return std::to_string(v); }) << '\n';
    out << "# final_C: " << detail::join_values(trace.final_rewards, [](double v) { return fmt::num(v); }) << '\n';
    detail::write_provenance(out, extra);
    out << kTraceColumns << '\n';
    for (const auto& rec : trace.records) {
        out << rec.t << ',' << fmt::num(rec.cumulative_regret) << ',' << fmt::num(rec.rho) << ','
            << fmt::join_subset(rec.selected, ' ') << '\n';
    }
}

struct TraceFile {
    EpisodeTrace trace;  // records carry t, R(t), rho and the selected set
    Provenance extra;
};

inline TraceFile read_trace(std::istream& in) {
    TraceFile file;
    EpisodeTrace& tr = file.trace;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line) || fmt::trim(line) != kTraceMagic) throw detail::trace_error(1, "not a trace file");
    ++line_no;
    bool body = false;
    double previous_regret = 0.0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view text = fmt::trim(line);
        if (text.empty()) continue;
        if (!body) {
            if (text == kTraceColumns) {
                body = true;
                continue;
            }
            std::string_view key, value;
            if (!detail::header_field(text, key, value)) throw detail::trace_error(line_no, "malformed header line");
            auto need_u64 = [&](std::string_view v) {
                const auto x = fmt::parse_u64(v);
                if (!x) throw detail::trace_error(line_no, "expected an integer for " + std::string(key));
                return *x;
            };
            auto need_double = [&](std::string_view v) {
                const auto x = fmt::parse_double(v);
                if (!x) throw detail::trace_error(line_no, "expected a number for " + std::string(key));
                return *x;
            };
            if (key == "env") tr.environment = value;
            else if (key == "env_hash") tr.environment_hash = value;
            else if (key == "policy") tr.policy = value;
            else if (key == "seed") tr.seed = need_u64(value);
            else if (key == "horizon") tr.horizon = need_u64(value);
            else if (key == "alpha") tr.alpha = need_double(value);
            else if (key == "reward_bound") tr.reward_bound = need_double(value);
            else if (key == "regret") {
                const auto kind = parse_regret_kind(value);
                if (!kind) throw detail::trace_error(line_no, "unknown regret kind");
                tr.regret_kind = *kind;
            } else if (key == "resolution") tr.full_resolution = value == "full";
            else if (key == "final_N") {
                for (auto v : fmt::split_ws(value)) tr.final_plays.push_back(need_u64(v));
            } else if (key == "final_C") {
                for (auto v : fmt::split_ws(value)) tr.final_rewards.push_back(need_double(v));
            } else {
                file.extra.emplace_back(std::string(key), std::string(value));
            }
            continue;
        }
        const auto fields = fmt::split(text, ',');
        if (fields.size() != 4) throw detail::trace_error(line_no, "expected 4 columns");
        StepRecord rec;
        const auto t = fmt::parse_u64(fields[0]);
        const auto regret = fmt::parse_double(fields[1]);
        const auto rho = fmt::parse_double(fields[2]);
        std::vector<ArmId> arms;
        for (auto part : fmt::split_ws(fields[3])) {
            const auto a = fmt::parse_u64(part);
            if (!a || *a == 0) throw detail::trace_error(line_no, "bad arm id");
            arms.push_back(ArmId{static_cast<std::uint32_t>(*a - 1)});
        }
        if (!t || !regret || !rho) throw detail::trace_error(line_no, "bad numeric field");
        rec.t = *t;
        rec.cumulative_regret = *regret;
        rec.rho = *rho;
        rec.selected = Subset(std::move(arms));
        // Per-step regret is recoverable only between consecutive steps.
        rec.regret = (!tr.records.empty() && tr.records.back().t + 1 == rec.t) || rec.t == 1
                         ? rec.cumulative_regret - previous_regret
                         : std::numeric_limits<double>::quiet_NaN();
        previous_regret = rec.cumulative_regret;
        tr.records.push_back(std::move(rec));
    }
    if (!body) throw detail::trace_error(line_no, "missing column header");
    return file;
}

inline void write_curve(const AggregateCurve& curve, std::ostream& out, const Provenance& extra = {}) {
    out << kCurveMagic << '\n';
    out << "# env: " << curve.environment << '\n';
    out << "# env_hash: " << curve.environment_hash << '\n';
    out << "# policy: " << curve.policy << '\n';
    out << "# horizon: " << curve.horizon << '\n';
    out << "# seeds: " << detail::join_values(curve.seeds, [](std::uint64_t v) { return std::to_string(v); }) << '\n';
    out << "# terminal_regret: " << detail::join_values(curve.terminal_regret, [](double v) { return fmt::num(v); })
        << '\n';
    detail::write_provenance(out, extra);
    out << kCurveColumns << '\n';
    for (std::size_t i = 0; i < curve.t.size(); ++i) {
        out << curve.t[i] << ',' << fmt::num(curve.mean_regret[i]) << ',' << fmt::num(curve.std_regret[i]) << '\n';
    }
}

inline AggregateCurve read_curve(std::istream& in, Provenance* extra = nullptr) {
    AggregateCurve c;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line) || fmt::trim(line) != kCurveMagic) throw detail::trace_error(1, "not a curve file");
    ++line_no;
    bool body = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view text = fmt::trim(line);
        if (text.empty()) continue;
        if (!body) {
            if (text == kCurveColumns) {
                body = true;
                continue;
            }
            std::string_view key, value;
            if (!detail::header_field(text, key, value)) throw detail::trace_error(line_no, "malformed header line");
            if (key == "env") c.environment = value;
            else if (key == "env_hash") c.environment_hash = value;
            else if (key == "policy") c.policy = value;
            else if (key == "horizon") {
                const auto v = fmt::parse_u64(value);
                if (!v) throw detail::trace_error(line_no, "bad horizon");
                c.horizon = *v;
            } else if (key == "seeds") {
                for (auto v : fmt::split_ws(value)) {
                    const auto x = fmt::parse_u64(v);
                    if (!x) throw detail::trace_error(line_no, "bad seed");
                    c.seeds.push_back(*x);
                }
            } else if (key == "terminal_regret") {
                for (auto v : fmt::split_ws(value)) {
                    const auto x = fmt::parse_double(v);
                    if (!x) throw detail::trace_error(line_no, "bad terminal regret");
                    c.terminal_regret.push_back(*x);
                }
            } else if (extra) {
                extra->emplace_back(std::string(key), std::string(value));
            }
            continue;
        }
        const auto fields = fmt::split(text, ',');
        if (fields.size() != 3) throw detail::trace_error(line_no, "expected 3 columns");
        const auto t = fmt::parse_u64(fields[0]);
        const auto mean = fmt::parse_double(fields[1]);
        const auto sd = fmt::parse_double(fields[2]);
        if (!t || !mean || !sd) throw detail::trace_error(line_no, "bad numeric field");
        c.t.push_back(*t);
        c.mean_regret.push_back(*mean);
        c.std_regret.push_back(*sd);
    }
    if (!body) throw detail::trace_error(line_no, "missing column header");
    return c;
}

inline std::string trace_to_string(const EpisodeTrace& trace, const Provenance& extra = {}) {
    std::ostringstream out;
    write_trace(trace, out, extra);
    return out.str();
}

inline std::string curve_to_string(const AggregateCurve& curve, const Provenance& extra = {}) {
    std::ostringstream out;
    write_curve(curve, out, extra);
    return out.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::IoError, "cannot open " + path + " for writing");
    out << content;
    if (!out) throw Error(Errc::IoError, "write failed for " + path);
}

}  // namespace combandit
