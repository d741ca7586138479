#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "combandit/error.hpp"
#include "combandit/quadrature.hpp"
#include "combandit/rng.hpp"
#include "combandit/subset.hpp"

namespace combandit {

/// M1: at most one arm of the played set is rewarded per step (choice-model
/// feedback with an implicit outside option). M2: every arm independently.
enum class FeedbackMode { Exclusive, Independent };

enum class ModelKind { Mnl, RumGaussian, PreferenceMatrix, Tabular };

/// How the harness charges regret for a played set.
enum class RegretKind {
    ExpectedReward,    ///< E[Q(s*)] - E[Q(s)]
    UtilitySurrogate,  ///< sum of mean utilities over s* minus over s (RUM experiments)
};

inline constexpr double kProbabilitySlack = 1e-12;

constexpr std::string_view to_string(FeedbackMode mode) {
    return mode == FeedbackMode::Exclusive ? "M1" : "M2";
}

constexpr std::string_view to_string(RegretKind kind) {
    return kind == RegretKind::ExpectedReward ? "expected" : "utility-surrogate";
}

inline std::optional<RegretKind> parse_regret_kind(std::string_view s) {
    if (s == "expected") return RegretKind::ExpectedReward;
    if (s == "utility-surrogate") return RegretKind::UtilitySurrogate;
    return std::nullopt;
}

constexpr std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Mnl: return "mnl";
        case ModelKind::RumGaussian: return "rum-gaussian";
        case ModelKind::PreferenceMatrix: return "preference-matrix";
        case ModelKind::Tabular: return "tabular";
    }
    return "unknown";
}

struct MnlParams {
    std::vector<double> weights;  // v_i, raw (not exponentiated)
    double outside_weight = 1.0;
};

struct RumParams {
    std::vector<double> means;
    std::optional<double> outside_mean;  // nullopt: no outside option
};

struct PreferenceParams {
    std::vector<double> matrix;  // n*n row-major, M(i,j) = P(i|{i,j}) - P(j|{i,j})
    Subset optimal;              // the set charged the lower outside mass
    double outside_optimal = 0.08;
    double outside_other = 0.1;
};

struct TabularParams {
    std::vector<double> probs;  // [colex rank * k + position in subset]
};

using ModelParams = std::variant<MnlParams, RumParams, PreferenceParams, TabularParams>;

/// P(a|s) for every arm/set pair plus the feedback mode. Immutable once built;
/// use the static factories, which validate the invariants.
class RewardModel {
public:
    static RewardModel mnl(std::vector<double> weights, std::uint32_t k, double outside_weight = 1.0);
    static RewardModel rum(std::vector<double> means, std::uint32_t k, std::optional<double> outside_mean);
    static RewardModel preference(std::vector<double> matrix, std::uint32_t n, Subset optimal,
                                  double outside_optimal, double outside_other);
    /// probs is indexed by colex rank * k + position; validated for range and M1 mass.
    static RewardModel tabular(std::uint32_t n, std::uint32_t k, FeedbackMode mode, std::vector<double> probs,
                               double reward_bound = 1.0, std::uint64_t cap = kDefaultEnumerationCap);

    std::uint32_t n() const noexcept { return n_; }
    std::uint32_t k() const noexcept { return k_; }
    FeedbackMode mode() const noexcept { return mode_; }
    ModelKind kind() const noexcept { return kind_; }
    double reward_bound() const noexcept { return reward_bound_; }
    RegretKind regret_kind() const noexcept { return regret_kind_; }
    const ModelParams& params() const noexcept { return params_; }
    const std::string& name() const noexcept { return name_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const std::optional<Subset>& declared_optimal() const noexcept { return declared_optimal_; }

    RewardModel with_name(std::string name) const {
        RewardModel m = *this;
        m.name_ = std::move(name);
        return m;
    }
    RewardModel with_labels(std::vector<std::string> labels) const;
    RewardModel with_declared_optimal(Subset s) const;
    RewardModel with_regret_kind(RegretKind kind) const {
        RewardModel m = *this;
        m.regret_kind_ = kind;
        return m;
    }
    RewardModel with_reward_bound(double bound) const;

    /// "a_3" or the label when one is set; 1-indexed.
    std::string arm_name(ArmId arm) const {
        if (arm.index < labels_.size()) return labels_[arm.index];
        return "a_" + std::to_string(arm.index + 1);
    }

    void validate_subset(std::span<const ArmId> s) const {
        if (s.size() != k_) {
            throw Error(Errc::InvalidSize, "set has " + std::to_string(s.size()) + " arms, model expects k=" +
                                               std::to_string(k_));
        }
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i].index >= n_) throw Error(Errc::InvalidSize, "arm index out of range");
            if (i > 0 && !(s[i - 1] < s[i])) throw Error(Errc::InvalidSize, "set arms must be strictly increasing");
        }
    }

private:
    RewardModel(std::uint32_t n, std::uint32_t k, FeedbackMode mode, ModelKind kind, ModelParams params)
        : n_(n), k_(k), mode_(mode), kind_(kind), params_(std::move(params)) {}

    std::uint32_t n_;
    std::uint32_t k_;
    FeedbackMode mode_;
    ModelKind kind_;
    ModelParams params_;
    double reward_bound_ = 1.0;
    RegretKind regret_kind_ = RegretKind::ExpectedReward;
    std::string name_;
    std::vector<std::string> labels_;
    std::optional<Subset> declared_optimal_;
};

namespace detail {

inline void check_sizes(std::uint32_t n, std::uint32_t k) {
    if (k < 1 || k > n) throw Error(Errc::InvalidParams, "need 1 <= k <= n");
    if (n > kMaxArms) throw Error(Errc::InvalidParams, "at most 64 arms are supported");
}

inline void check_probability(double p, const std::string& where) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw Error(Errc::InvalidParams, "probability " + std::to_string(p) + " outside [0,1] " + where);
    }
}

}  // namespace detail

inline RewardModel RewardModel::mnl(std::vector<double> weights, std::uint32_t k, double outside_weight) {
    const auto n = static_cast<std::uint32_t>(weights.size());
    detail::check_sizes(n, k);
    if (!(outside_weight >= 0.0)) throw Error(Errc::InvalidParams, "outside weight must be non-negative");
    for (double v : weights) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw Error(Errc::InvalidParams, "MNL weights must be finite and >= 0");
    }
    RewardModel m(n, k, FeedbackMode::Exclusive, ModelKind::Mnl, MnlParams{std::move(weights), outside_weight});
    return m;
}

inline RewardModel RewardModel::rum(std::vector<double> means, std::uint32_t k, std::optional<double> outside_mean) {
    const auto n = static_cast<std::uint32_t>(means.size());
    detail::check_sizes(n, k);
    for (double mu : means) {
        if (!std::isfinite(mu)) throw Error(Errc::InvalidParams, "RUM means must be finite");
    }
    if (outside_mean && !std::isfinite(*outside_mean)) {
        throw Error(Errc::InvalidParams, "RUM outside mean must be finite");
    }
    return RewardModel(n, k, FeedbackMode::Exclusive, ModelKind::RumGaussian, RumParams{std::move(means), outside_mean});
}

inline RewardModel RewardModel::preference(std::vector<double> matrix, std::uint32_t n, Subset optimal,
                                           double outside_optimal, double outside_other) {
    detail::check_sizes(n, 2);
    if (matrix.size() != std::size_t{n} * n) throw Error(Errc::InvalidParams, "preference matrix must be n*n");
    if (optimal.size() != 2 || optimal[1].index >= n) {
        throw Error(Errc::InvalidParams, "preference optimum must be a 2-subset of the arms");
    }
    detail::check_probability(outside_optimal, "for the optimal outside mass");
    detail::check_probability(outside_other, "for the outside mass");
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = i + 1; j < n; ++j) {
            const double mij = matrix[i * n + j];
            const double mji = matrix[j * n + i];
            if (mij != -mji) {
                throw Error(Errc::InvalidParams, "preference matrix is not antisymmetric at (" + std::to_string(i + 1) +
                                                     "," + std::to_string(j + 1) + ")");
            }
            const double outside = (optimal == Subset::of({i, j})) ? outside_optimal : outside_other;
            const std::string where = "in pair {" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "}";
            detail::check_probability((1.0 - outside + mij) / 2.0, where);
            detail::check_probability((1.0 - outside - mij) / 2.0, where);
        }
    }
    PreferenceParams params{std::move(matrix), std::move(optimal), outside_optimal, outside_other};
    return RewardModel(n, 2, FeedbackMode::Exclusive, ModelKind::PreferenceMatrix, std::move(params));
}

inline RewardModel RewardModel::tabular(std::uint32_t n, std::uint32_t k, FeedbackMode mode,
                                        std::vector<double> probs, double reward_bound, std::uint64_t cap) {
    detail::check_sizes(n, k);
    check_enumeration(n, k, cap);
    if (!(reward_bound > 0.0) || !std::isfinite(reward_bound)) {
        throw Error(Errc::InvalidParams, "reward bound must be positive");
    }
    if (probs.size() != binomial(n, k) * k) throw Error(Errc::InvalidParams, "tabular size mismatch");
    for_each_subset(n, k, [&](std::span<const ArmId> s) {
        const std::uint64_t base = subset_rank(s) * k;
        double total = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            detail::check_probability(probs[base + i], "for arm " + std::to_string(s[i].index + 1) + " in set " +
                                                            Subset::from_span(s).to_string());
            total += probs[base + i];
        }
        if (mode == FeedbackMode::Exclusive && total > 1.0 + kProbabilitySlack) {
            throw Error(Errc::ProbabilityOverflow, "set " + Subset::from_span(s).to_string() +
                                                       " has exclusive reward mass " + std::to_string(total));
        }
    }, cap);
    RewardModel m(n, k, mode, ModelKind::Tabular, TabularParams{std::move(probs)});
    m.reward_bound_ = reward_bound;
    return m;
}

inline RewardModel RewardModel::with_labels(std::vector<std::string> labels) const {
    if (!labels.empty() && labels.size() != n_) throw Error(Errc::InvalidParams, "one label per arm required");
    RewardModel m = *this;
    m.labels_ = std::move(labels);
    return m;
}

inline RewardModel RewardModel::with_declared_optimal(Subset s) const {
    validate_subset(s.arms());
    RewardModel m = *this;
    m.declared_optimal_ = std::move(s);
    return m;
}

inline RewardModel RewardModel::with_reward_bound(double bound) const {
    if (!(bound > 0.0) || !std::isfinite(bound)) throw Error(Errc::InvalidParams, "reward bound must be positive");
    RewardModel m = *this;
    m.reward_bound_ = bound;
    return m;
}

/// Writes P(a|s) for every arm of s, in subset order, into out.
inline void set_probabilities(const RewardModel& model, std::span<const ArmId> s, std::span<double> out) {
    model.validate_subset(s);
    const std::size_t k = s.size();
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, MnlParams>) {
                double denom = p.outside_weight;
                for (auto a : s) denom += p.weights[a.index];
                for (std::size_t i = 0; i < k; ++i) out[i] = denom > 0.0 ? p.weights[s[i].index] / denom : 0.0;
            } else if constexpr (std::is_same_v<P, RumParams>) {
                std::vector<double> means;
                means.reserve(k + 1);
                for (auto a : s) means.push_back(p.means[a.index]);
                if (p.outside_mean) means.push_back(*p.outside_mean);
                for (std::size_t i = 0; i < k; ++i) out[i] = quadrature::gaussian_max_probability(means, i);
            } else if constexpr (std::is_same_v<P, PreferenceParams>) {
                const std::uint32_t n = model.n();
                const std::uint32_t i = s[0].index, j = s[1].index;
                const bool is_opt = p.optimal.arms()[0] == s[0] && p.optimal.arms()[1] == s[1];
                const double outside = is_opt ? p.outside_optimal : p.outside_other;
                out[0] = (1.0 - outside + p.matrix[i * n + j]) / 2.0;
                out[1] = (1.0 - outside + p.matrix[j * n + i]) / 2.0;
            } else {
                const std::uint64_t base = subset_rank(s) * k;
                for (std::size_t i = 0; i < k; ++i) out[i] = p.probs[base + i];
            }
        },
        model.params());
}

inline std::vector<double> set_probabilities(const RewardModel& model, const Subset& s) {
    std::vector<double> out(s.size());
    set_probabilities(model, s.arms(), out);
    return out;
}

/// P(arm | s). Throws ArmNotInSet when arm is not a member of s.
inline double arm_prob(const RewardModel& model, ArmId arm, const Subset& s) {
    const auto pos = s.position(arm);
    if (!pos) throw Error(Errc::ArmNotInSet, "arm " + std::to_string(arm.index + 1) + " not in set " + s.to_string());
    if (model.kind() == ModelKind::RumGaussian) {
        model.validate_subset(s.arms());
        const auto& p = std::get<RumParams>(model.params());
        std::vector<double> means;
        for (auto a : s) means.push_back(p.means[a.index]);
        if (p.outside_mean) means.push_back(*p.outside_mean);
        return quadrature::gaussian_max_probability(means, *pos);
    }
    return set_probabilities(model, s)[*pos];
}

/// E[Q(s)] = B * sum of P(a|s) over the arms of s.
inline double expected_reward(const RewardModel& model, std::span<const ArmId> s) {
    std::vector<double> probs(s.size());
    set_probabilities(model, s, probs);
    double total = 0.0;
    for (double p : probs) total += p;
    return model.reward_bound() * total;
}

inline double expected_reward(const RewardModel& model, const Subset& s) { return expected_reward(model, s.arms()); }

/// Draws one feedback vector from known arm probabilities.
inline void sample_rewards(FeedbackMode mode, double reward_bound, std::span<const double> probs, RngStream& rng,
                           std::span<double> out) {
    if (mode == FeedbackMode::Exclusive) {
        double total = 0.0;
        for (double p : probs) total += p;
        if (total > 1.0 + kProbabilitySlack) {
            throw Error(Errc::ProbabilityOverflow, "exclusive reward mass " + std::to_string(total) + " exceeds 1");
        }
        std::fill(out.begin(), out.end(), 0.0);
        const double u = rng.uniform();
        double cumulative = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            cumulative += probs[i];
            if (u < cumulative) {
                out[i] = reward_bound;
                break;
            }
        }
    } else {
        for (std::size_t i = 0; i < probs.size(); ++i) out[i] = rng.uniform() < probs[i] ? reward_bound : 0.0;
    }
}

inline std::vector<double> sample_feedback(const RewardModel& model, const Subset& s, RngStream& rng) {
    const auto probs = set_probabilities(model, s);
    std::vector<double> out(s.size());
    sample_rewards(model.mode(), model.reward_bound(), probs, rng, out);
    return out;
}

}  // namespace combandit
