#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "combandit/error.hpp"

namespace combandit {

/// Zero-based arm index. The outside option is never an ArmId.
struct ArmId {
    std::uint32_t index = 0;
    friend constexpr auto operator<=>(const ArmId&, const ArmId&) = default;
};

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;
inline constexpr std::uint32_t kMaxArms = 64;

namespace detail {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

// Pascal's triangle up to 64, saturating at kSaturated.
constexpr auto make_pascal() {
    std::array<std::array<std::uint64_t, kMaxArms + 1>, kMaxArms + 1> table{};
    for (std::size_t n = 0; n <= kMaxArms; ++n) {
        table[n][0] = 1;
        for (std::size_t k = 1; k <= n; ++k) {
            const std::uint64_t a = table[n - 1][k - 1];
            const std::uint64_t b = k <= n - 1 ? table[n - 1][k] : 0;
            table[n][k] = (a > kSaturated - b) ? kSaturated : a + b;
        }
    }
    return table;
}

inline constexpr auto kPascal = make_pascal();

}  // namespace detail

/// C(n, k), saturating at UINT64_MAX when the value does not fit.
constexpr std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    if (n <= kMaxArms) return detail::kPascal[n][k];
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        const std::uint64_t num = n - k + i;
        const auto wide = static_cast<unsigned __int128>(result) * num / i;
        if (wide > detail::kSaturated) return detail::kSaturated;
        result = static_cast<std::uint64_t>(wide);
    }
    return result;
}

/// A k-element arm selection with strictly increasing indices.
class Subset {
public:
    Subset() = default;

    explicit Subset(std::vector<ArmId> arms) : arms_(std::move(arms)) {
        std::sort(arms_.begin(), arms_.end());
        if (std::adjacent_find(arms_.begin(), arms_.end()) != arms_.end()) {
            throw Error(Errc::InvalidSize, "subset contains duplicate arms");
        }
    }

    static Subset of(std::initializer_list<std::uint32_t> indices) {
        std::vector<ArmId> arms;
        arms.reserve(indices.size());
        for (auto i : indices) arms.push_back(ArmId{i});
        return Subset(std::move(arms));
    }

    static Subset from_span(std::span<const ArmId> arms) {
        return Subset(std::vector<ArmId>(arms.begin(), arms.end()));
    }

    /// First k arms, the shape of every declared optimum in the bundled environments.
    static Subset prefix(std::uint32_t k) {
        std::vector<ArmId> arms(k);
        for (std::uint32_t i = 0; i < k; ++i) arms[i] = ArmId{i};
        return Subset(std::move(arms));
    }

    std::span<const ArmId> arms() const noexcept { return arms_; }
    std::size_t size() const noexcept { return arms_.size(); }
    bool empty() const noexcept { return arms_.empty(); }
    ArmId operator[](std::size_t i) const { return arms_[i]; }
    auto begin() const noexcept { return arms_.begin(); }
    auto end() const noexcept { return arms_.end(); }

    std::optional<std::size_t> position(ArmId arm) const {
        const auto it = std::lower_bound(arms_.begin(), arms_.end(), arm);
        if (it == arms_.end() || *it != arm) return std::nullopt;
        return static_cast<std::size_t>(it - arms_.begin());
    }

    bool contains(ArmId arm) const { return position(arm).has_value(); }

    /// Comma-joined 1-indexed arm list, e.g. "1,2,5".
    std::string to_string() const {
        std::string out;
        for (std::size_t i = 0; i < arms_.size(); ++i) {
            if (i) out += ',';
            out += std::to_string(arms_[i].index + 1);
        }
        return out;
    }

    friend bool operator==(const Subset&, const Subset&) = default;
    friend auto operator<=>(const Subset& a, const Subset& b) { return a.arms_ <=> b.arms_; }

private:
    std::vector<ArmId> arms_;
};

/// Bitmask of a subset; valid for n <= 64.
inline std::uint64_t subset_mask(std::span<const ArmId> arms) {
    std::uint64_t mask = 0;
    for (auto a : arms) mask |= std::uint64_t{1} << a.index;
    return mask;
}

/// Colexicographic rank in [0, C(n, k)); a dense key for per-subset tables.
inline std::uint64_t subset_rank(std::span<const ArmId> arms) {
    std::uint64_t rank = 0;
    for (std::size_t i = 0; i < arms.size(); ++i) rank += binomial(arms[i].index, i + 1);
    return rank;
}

inline void check_enumeration(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
    if (k < 1 || k > n) {
        throw Error(Errc::InvalidSize,
                    "set size k=" + std::to_string(k) + " must lie in [1, n=" + std::to_string(n) + "]");
    }
    if (n > kMaxArms) {
        throw Error(Errc::InvalidSize, "at most " + std::to_string(kMaxArms) + " arms are supported");
    }
    const std::uint64_t count = binomial(n, k);
    if (count > cap) {
        throw Error(Errc::EnumerationTooLarge, "C(" + std::to_string(n) + "," + std::to_string(k) +
                                                   ")=" + std::to_string(count) + " exceeds cap " +
                                                   std::to_string(cap));
    }
}

/// Visits every k-subset of [0, n) in lexicographic order without allocating
/// per subset. The visitor receives a span valid only for the call.
template <typename Visitor>
void for_each_subset(std::uint32_t n, std::uint32_t k, Visitor&& visit,
                     std::uint64_t cap = kDefaultEnumerationCap) {
    check_enumeration(n, k, cap);
    std::vector<ArmId> combo(k);
    for (std::uint32_t i = 0; i < k; ++i) combo[i] = ArmId{i};
    while (true) {
        visit(std::span<const ArmId>(combo));
        std::int64_t pos = static_cast<std::int64_t>(k) - 1;
        while (pos >= 0 && combo[pos].index == n - k + static_cast<std::uint32_t>(pos)) --pos;
        if (pos < 0) return;
        ++combo[pos].index;
        for (auto j = static_cast<std::size_t>(pos) + 1; j < k; ++j) {
            combo[j].index = combo[j - 1].index + 1;
        }
    }
}

inline std::vector<Subset> enumerate_subsets(std::uint32_t n, std::uint32_t k,
                                             std::uint64_t cap = kDefaultEnumerationCap) {
    check_enumeration(n, k, cap);
    std::vector<Subset> out;
    out.reserve(binomial(n, k));
    for_each_subset(n, k, [&](std::span<const ArmId> arms) { out.push_back(Subset::from_span(arms)); }, cap);
    return out;
}

}  // namespace combandit
