#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "combandit/combandit.hpp"

namespace combandit::cli {

struct ExperimentConfig {
    std::string environment = "camera6";
    std::vector<std::string> policies{"ucb"};
    std::uint64_t horizon = 10000;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    double alpha = 2.0;
    std::optional<double> reward_bound;  // unset: the environment's own B
    std::string out = "out";
    std::uint64_t checkpoints = 1000;
    bool full_trace = false;
    std::uint64_t enum_cap = kDefaultEnumerationCap;
};

/// Flag values as typed; unset fields leave the config-file value in place.
struct ConfigOverrides {
    std::optional<std::string> environment;
    std::vector<std::string> policies;
    std::optional<std::uint64_t> horizon;
    std::optional<std::string> seeds;
    std::optional<std::uint64_t> base_seed;
    std::optional<std::uint64_t> seed_count;
    std::optional<double> alpha;
    std::optional<double> reward_bound;
    std::optional<std::string> out;
    std::optional<std::uint64_t> checkpoints;
    bool full_trace = false;
    std::optional<std::uint64_t> enum_cap;
};

inline Error config_error(const std::string& msg) { return Error(Errc::InvalidParams, msg); }

/// "1..5", "1,2,7" or "3".
inline std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
    std::vector<std::uint64_t> seeds;
    const auto dots = text.find("..");
    if (dots != std::string_view::npos) {
        const auto lo = fmt::parse_u64(fmt::trim(text.substr(0, dots)));
        const auto hi = fmt::parse_u64(fmt::trim(text.substr(dots + 2)));
        if (!lo || !hi || *hi < *lo) throw config_error("bad seed range '" + std::string(text) + "'");
        if (*hi - *lo >= 1'000'000) throw config_error("seed range too long");
        for (std::uint64_t s = *lo; s <= *hi; ++s) seeds.push_back(s);
        return seeds;
    }
    for (auto part : fmt::split(text, ',')) {
        const auto v = fmt::parse_u64(fmt::trim(part));
        if (!v) throw config_error("bad seed '" + std::string(part) + "'");
        seeds.push_back(*v);
    }
    return seeds;
}

inline std::vector<std::uint64_t> seed_block(std::uint64_t base, std::uint64_t count) {
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t i = 0; i < count; ++i) seeds.push_back(base + i);
    return seeds;
}

inline void validate(const ExperimentConfig& c) {
    if (c.policies.empty()) throw config_error("at least one policy is required");
    for (const auto& p : c.policies) parse_policy(p);
    if (c.horizon < 1) throw config_error("horizon must be >= 1");
    if (c.seeds.empty()) throw config_error("at least one seed is required");
    if (std::set<std::uint64_t>(c.seeds.begin(), c.seeds.end()).size() != c.seeds.size()) {
        throw config_error("seeds must be distinct");
    }
    if (!(c.alpha > 0.0)) throw config_error("alpha must be positive");
    if (c.alpha < 2.0 && std::find(c.policies.begin(), c.policies.end(), "ucb") != c.policies.end()) {
        throw config_error("ucb needs alpha >= 2");
    }
    if (c.reward_bound && !(*c.reward_bound > 0.0)) throw config_error("reward bound must be positive");
    if (c.checkpoints < 1) throw config_error("checkpoints must be >= 1");
}

/// Applies a JSON config document onto c. Unknown keys are rejected.
inline void apply_json(ExperimentConfig& c, const nlohmann::json& doc) {
    if (!doc.is_object()) throw config_error("config must be a JSON object");
    try {
        std::optional<std::uint64_t> base, count;
        for (const auto& [key, value] : doc.items()) {
            if (key == "env") c.environment = value.get<std::string>();
            else if (key == "policies") c.policies = value.get<std::vector<std::string>>();
            else if (key == "horizon") c.horizon = value.get<std::uint64_t>();
            else if (key == "seeds") {
                c.seeds = value.is_string() ? parse_seed_list(value.get<std::string>())
                                            : value.get<std::vector<std::uint64_t>>();
            } else if (key == "base_seed") base = value.get<std::uint64_t>();
            else if (key == "seed_count") count = value.get<std::uint64_t>();
            else if (key == "alpha") c.alpha = value.get<double>();
            else if (key == "reward_bound") c.reward_bound = value.get<double>();
            else if (key == "out") c.out = value.get<std::string>();
            else if (key == "checkpoints") c.checkpoints = value.get<std::uint64_t>();
            else if (key == "full_trace") c.full_trace = value.get<bool>();
            else if (key == "enum_cap") c.enum_cap = value.get<std::uint64_t>();
            else throw config_error("unknown config key '" + key + "'");
        }
        if (base || count) c.seeds = seed_block(base.value_or(1), count.value_or(c.seeds.size()));
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("config value has the wrong type: ") + e.what());
    }
}

inline ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot read config file " + path);
    ExperimentConfig c;
    try {
        apply_json(c, nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }
    return c;
}

/// Flags win over the config file.
inline void apply_overrides(ExperimentConfig& c, const ConfigOverrides& o) {
    if (o.environment) c.environment = *o.environment;
    if (!o.policies.empty()) c.policies = o.policies;
    if (o.horizon) c.horizon = *o.horizon;
    if (o.seeds) c.seeds = parse_seed_list(*o.seeds);
    if (o.base_seed || o.seed_count) {
        c.seeds = seed_block(o.base_seed.value_or(c.seeds.empty() ? 1 : c.seeds.front()),
                             o.seed_count.value_or(c.seeds.size()));
    }
    if (o.alpha) c.alpha = *o.alpha;
    if (o.reward_bound) c.reward_bound = *o.reward_bound;
    if (o.out) c.out = *o.out;
    if (o.checkpoints) c.checkpoints = *o.checkpoints;
    if (o.full_trace) c.full_trace = true;
    if (o.enum_cap) c.enum_cap = *o.enum_cap;
}

/// The resolved config as embedded in every output. The output directory is
/// left out so relocating a run does not change artifact bytes.
inline nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["env"] = c.environment;
    j["policies"] = c.policies;
    j["horizon"] = c.horizon;
    j["seeds"] = c.seeds;
    j["alpha"] = c.alpha;
    if (c.reward_bound) j["reward_bound"] = *c.reward_bound;
    j["checkpoints"] = c.checkpoints;
    j["full_trace"] = c.full_trace;
    j["enum_cap"] = c.enum_cap;
    return j;
}

/// Builtin name, "lb:M1|M2:n:k:eps:i", "gen:n:k:seed" or a tabular file path.
inline RewardModel resolve_environment(const std::string& source, std::uint64_t cap = kDefaultEnumerationCap) {
    const auto parts = fmt::split(source, ':');
    auto need_u32 = [&](std::string_view text) {
        const auto v = fmt::parse_u64(text);
        if (!v || *v > kMaxArms * 2) throw Error(Errc::UnknownEnvironment, "bad integer '" + std::string(text) + "' in " + source);
        return static_cast<std::uint32_t>(*v);
    };
    if (parts[0] == "lb") {
        if (parts.size() != 6) throw Error(Errc::UnknownEnvironment, "expected lb:M1|M2:n:k:eps:i, got " + source);
        FeedbackMode mode;
        if (parts[1] == "M1") mode = FeedbackMode::Exclusive;
        else if (parts[1] == "M2") mode = FeedbackMode::Independent;
        else throw Error(Errc::UnknownEnvironment, "feedback mode must be M1 or M2");
        const auto eps = fmt::parse_double(parts[4]);
        if (!eps) throw Error(Errc::UnknownEnvironment, "bad epsilon in " + source);
        return make_lower_bound_env(mode, need_u32(parts[2]), need_u32(parts[3]), *eps, need_u32(parts[5]));
    }
    if (parts[0] == "gen") {
        if (parts.size() != 4) throw Error(Errc::UnknownEnvironment, "expected gen:n:k:seed, got " + source);
        const auto seed = fmt::parse_u64(parts[3]);
        if (!seed) throw Error(Errc::UnknownEnvironment, "bad seed in " + source);
        return generate_consistent_env(need_u32(parts[1]), need_u32(parts[2]), RngStream(*seed, 0), 1'000'000, cap);
    }
    if (source == "mnl20" || source == "rum20" || source == "pref10" || source == "camera6") return make_experiment_env(source);
    if (std::filesystem::exists(source)) return load_tabular(source, cap);
    throw Error(Errc::UnknownEnvironment, "'" + source + "' is neither a builtin environment nor a readable file");
}

}  // namespace combandit::cli
