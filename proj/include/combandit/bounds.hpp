#pragma once

#include <cmath>
#include <cstdint>
#include <span>

#include "combandit/error.hpp"

namespace combandit {

struct RegretBounds {
    double gap_dependent = 0.0;
    double gap_independent = 0.0;
};

/// Upper bounds on R(T) for the top-k UCB policy, natural log throughout:
///   gap-dependent:   B^2 (8 a k^1.5 n ln T + 30 a k^2 n ln T) / eps + n
///   gap-independent: B (2 sqrt(a k n T ln T) + 15 k^2 sqrt(a n T ln T))
inline RegretBounds evaluate_regret_bounds(double n, double k, double horizon, double alpha, double epsilon,
                                           double reward_bound = 1.0) {
    if (!(n > 0 && k > 0 && horizon >= 1 && epsilon > 0 && reward_bound > 0)) {
        throw Error(Errc::InvalidParams, "bound inputs must be positive (T >= 1)");
    }
    if (!(alpha >= 2.0)) throw Error(Errc::InvalidParams, "bounds require alpha >= 2");
    const double log_t = std::log(horizon);
    const double b2 = reward_bound * reward_bound;
    RegretBounds r;
    r.gap_dependent = b2 * (8.0 * alpha * std::pow(k, 1.5) * n * log_t / epsilon +
                            30.0 * alpha * k * k * n * log_t / epsilon) +
                      n;
    r.gap_independent = reward_bound * (2.0 * std::sqrt(alpha * k * n * horizon * log_t) +
                                        15.0 * k * k * std::sqrt(alpha * n * horizon * log_t));
    return r;
}

struct KlResult {
    double divergence = 0.0;
    /// sum_i (p_i - q_i)^2 / q_i
    double chi_square_bound = 0.0;
    /// The perturbation p - q sums to zero (within 1e-12).
    bool zero_sum = false;
    /// divergence <= chi_square_bound; only asserted when zero_sum holds.
    bool bound_holds = true;
};

/// KL(p || q) for categorical distributions plus the chi-square upper bound
/// that applies when q differs from p by a zero-sum perturbation.
inline KlResult kl_categorical(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size() || p.empty()) throw Error(Errc::SupportMismatch, "distributions differ in length");
    double sum_p = 0.0, sum_q = 0.0, perturbation = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p[i] >= 0.0 && q[i] >= 0.0)) throw Error(Errc::InvalidParams, "probabilities must be non-negative");
        sum_p += p[i];
        sum_q += q[i];
        perturbation += p[i] - q[i];
    }
    if (std::abs(sum_p - 1.0) > 1e-9 || std::abs(sum_q - 1.0) > 1e-9) {
        throw Error(Errc::InvalidParams, "probabilities must sum to 1");
    }
    KlResult r;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0 && q[i] == 0.0) throw Error(Errc::SupportMismatch, "q vanishes where p is positive");
        if (p[i] > 0.0) r.divergence += p[i] * std::log(p[i] / q[i]);
        if (q[i] > 0.0) r.chi_square_bound += (p[i] - q[i]) * (p[i] - q[i]) / q[i];
    }
    r.zero_sum = std::abs(perturbation) <= 1e-12;
    if (r.zero_sum) r.bound_holds = r.divergence <= r.chi_square_bound;
    return r;
}

}  // namespace combandit
