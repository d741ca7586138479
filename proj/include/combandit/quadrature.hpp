#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>

namespace combandit::quadrature {

inline constexpr std::size_t kGaussOrder = 16;

struct GaussLegendreRule {
    std::array<double, kGaussOrder> nodes{};
    std::array<double, kGaussOrder> weights{};
};

/// Nodes and weights on [-1, 1], computed once by Newton iteration on P_n.
inline const GaussLegendreRule& gauss_legendre() {
    static const GaussLegendreRule rule = [] {
        GaussLegendreRule r;
        constexpr std::size_t n = kGaussOrder;
        for (std::size_t i = 0; i < n; ++i) {
            double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                                (static_cast<double>(n) + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0, p1 = x;
                for (std::size_t j = 2; j <= n; ++j) {
                    const double pj = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / static_cast<double>(j);
                    p0 = p1;
                    p1 = pj;
                }
                dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            r.nodes[i] = x;
            r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        return r;
    }();
    return rule;
}

template <typename F>
double gauss_legendre(F&& f, double a, double b) {
    const auto& rule = gauss_legendre();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < kGaussOrder; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * sum;
}

namespace detail {

template <typename F>
double adaptive(F& f, double a, double b, double whole, double tol, int depth) {
    const double mid = 0.5 * (a + b);
    const double left = gauss_legendre(f, a, mid);
    const double right = gauss_legendre(f, mid, b);
    if (depth <= 0 || std::abs(left + right - whole) <= tol) return left + right;
    return adaptive(f, a, mid, left, 0.5 * tol, depth - 1) +
           adaptive(f, mid, b, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive bisection with a 16-point Gauss-Legendre rule on each panel.
template <typename F>
double integrate(F&& f, double a, double b, double tol = 1e-10, int max_depth = 30) {
    return detail::adaptive(f, a, b, gauss_legendre(f, a, b), tol, max_depth);
}

inline double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// P(X_winner is the largest) for independent X_j ~ N(means[j], 1).
inline double gaussian_max_probability(std::span<const double> means, std::size_t winner,
                                       double tol = 1e-10) {
    if (means.size() == 1) return 1.0;
    double lo = means[0], hi = means[0];
    for (double m : means) {
        lo = std::min(lo, m);
        hi = std::max(hi, m);
    }
    const double mu = means[winner];
    auto integrand = [&](double x) {
        double value = normal_pdf(x - mu);
        for (std::size_t j = 0; j < means.size(); ++j) {
            if (j != winner) value *= normal_cdf(x - means[j]);
        }
        return value;
    };
    return integrate(integrand, lo - 8.0, hi + 8.0, tol);
}

}  // namespace combandit::quadrature
