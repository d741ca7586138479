#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "combandit/environments.hpp"
#include "combandit/error.hpp"
#include "combandit/format.hpp"
#include "combandit/model.hpp"

namespace combandit {

// Tabular environment file:
//
//   # combandit tabular environment v1
//   name camera6                  (optional)
//   n 6
//   k 3
//   mode M1                       (M1 | M2)
//   B 1
//   regret expected               (expected | utility-surrogate; optional)
//   labels Nikon,Canon,...        (optional)
//   declared_optimal 1,2,3        (optional)
//   table
//   1,2,3 1 0.35                  (subset, arm, probability; 1-indexed)
//
// Probabilities are written in shortest round-trip form, so write -> read is exact.

inline void write_tabular(const RewardModel& model, std::ostream& out, std::uint64_t cap = kDefaultEnumerationCap) {
    const RewardModel table = model.kind() == ModelKind::Tabular ? model : to_tabular(model, cap);
    const auto& probs = std::get<TabularParams>(table.params()).probs;
    out << "# combandit tabular environment v1\n";
    if (!table.name().empty()) out << "name " << table.name() << '\n';
    out << "n " << table.n() << '\n';
    out << "k " << table.k() << '\n';
    out << "mode " << to_string(table.mode()) << '\n';
    out << "B " << fmt::num(table.reward_bound()) << '\n';
    out << "regret " << to_string(table.regret_kind()) << '\n';
    if (!table.labels().empty()) {
        out << "labels ";
        for (std::size_t i = 0; i < table.labels().size(); ++i) out << (i ? "," : "") << table.labels()[i];
        out << '\n';
    }
    if (table.declared_optimal()) out << "declared_optimal " << table.declared_optimal()->to_string() << '\n';
    out << "table\n";
    const std::uint32_t k = table.k();
    for_each_subset(table.n(), k, [&](std::span<const ArmId> s) {
        const std::string set = Subset::from_span(s).to_string();
        const std::uint64_t base = subset_rank(s) * k;
        for (std::size_t i = 0; i < k; ++i) {
            out << set << ' ' << (s[i].index + 1) << ' ' << fmt::num(probs[base + i]) << '\n';
        }
    }, cap);
}

inline RewardModel read_tabular(std::istream& in, std::uint64_t cap = kDefaultEnumerationCap) {
    auto fail = [](std::size_t line, const std::string& msg) -> Error {
        return Error(Errc::ParseError, "line " + std::to_string(line) + ": " + msg);
    };
    std::string name, labels_text, optimal_text;
    std::optional<std::uint64_t> n, k;
    std::optional<FeedbackMode> mode;
    double bound = 1.0;
    RegretKind regret = RegretKind::ExpectedReward;
    std::vector<double> probs;
    std::vector<char> filled;
    bool in_table = false;
    std::string raw;
    std::size_t line_no = 0;

    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = fmt::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto fields = fmt::split_ws(line);
        if (!in_table) {
            const std::string_view key = fields[0];
            if (key == "table") {
                if (!n || !k || !mode) throw fail(line_no, "table before n, k and mode are set");
                check_enumeration(*n, *k, cap);
                probs.assign(binomial(*n, *k) * *k, 0.0);
                filled.assign(probs.size(), 0);
                in_table = true;
                continue;
            }
            if (fields.size() != 2) throw fail(line_no, "expected 'key value'");
            const std::string_view value = fields[1];
            if (key == "name") {
                name = std::string(value);
            } else if (key == "n" || key == "k") {
                const auto v = fmt::parse_u64(value);
                if (!v || *v < 1 || *v > kMaxArms) throw fail(line_no, "bad " + std::string(key));
                (key == "n" ? n : k) = *v;
            } else if (key == "mode") {
                if (value == "M1") mode = FeedbackMode::Exclusive;
                else if (value == "M2") mode = FeedbackMode::Independent;
                else throw fail(line_no, "mode must be M1 or M2");
            } else if (key == "B") {
                const auto v = fmt::parse_double(value);
                if (!v || !(*v > 0.0) || !std::isfinite(*v)) throw fail(line_no, "B must be a positive number");
                bound = *v;
            } else if (key == "regret") {
                const auto kind = parse_regret_kind(value);
                if (!kind) throw fail(line_no, "unknown regret kind");
                regret = *kind;
            } else if (key == "labels") {
                labels_text = std::string(value);
            } else if (key == "declared_optimal") {
                optimal_text = std::string(value);
            } else {
                throw fail(line_no, "unknown key '" + std::string(key) + "'");
            }
            continue;
        }
        if (fields.size() != 3) throw fail(line_no, "expected 'subset arm probability'");
        const auto set = fmt::parse_subset(fields[0]);
        if (!set || set->size() != *k || (*set)[set->size() - 1].index >= *n) {
            throw fail(line_no, "bad subset '" + std::string(fields[0]) + "'");
        }
        const auto arm = fmt::parse_u64(fields[1]);
        const auto pos = arm && *arm >= 1 ? set->position(ArmId{static_cast<std::uint32_t>(*arm - 1)}) : std::nullopt;
        if (!pos) throw fail(line_no, "arm '" + std::string(fields[1]) + "' is not in set " + set->to_string());
        const auto p = fmt::parse_double(fields[2]);
        if (!p || !(*p >= 0.0 && *p <= 1.0)) {
            throw fail(line_no, "probability " + std::string(fields[2]) + " outside [0,1] for arm " +
                                    std::string(fields[1]) + " in set " + set->to_string());
        }
        const std::uint64_t idx = subset_rank(set->arms()) * *k + *pos;
        if (filled[idx]) throw fail(line_no, "duplicate entry for arm " + std::string(fields[1]) + " in set " + set->to_string());
        filled[idx] = 1;
        probs[idx] = *p;
    }
    if (!in_table) throw Error(Errc::ParseError, "missing 'table' section");
    for (std::size_t i = 0; i < filled.size(); ++i) {
        if (!filled[i]) throw Error(Errc::ParseError, "table is incomplete: " + std::to_string(filled.size()) +
                                                         " entries expected");
    }
    RewardModel model = RewardModel::tabular(static_cast<std::uint32_t>(*n), static_cast<std::uint32_t>(*k), *mode,
                                             std::move(probs), bound, cap)
                            .with_name(name)
                            .with_regret_kind(regret);
    if (!labels_text.empty()) {
        std::vector<std::string> labels;
        for (auto part : fmt::split(labels_text, ',')) labels.emplace_back(part);
        model = model.with_labels(std::move(labels));
    }
    if (!optimal_text.empty()) {
        const auto opt = fmt::parse_subset(optimal_text);
        if (!opt) throw Error(Errc::ParseError, "bad declared_optimal '" + optimal_text + "'");
        model = model.with_declared_optimal(*opt);
    }
    return model;
}

inline RewardModel load_tabular(const std::string& path, std::uint64_t cap = kDefaultEnumerationCap) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open '" + path + "'");
    return read_tabular(in, cap);
}

inline void save_tabular(const RewardModel& model, const std::string& path, std::uint64_t cap = kDefaultEnumerationCap) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::IoError, "cannot write '" + path + "'");
    write_tabular(model, out, cap);
}

/// Content hash over the model's defining parameters (not its name).
inline std::string model_fingerprint(const RewardModel& model) {
    std::ostringstream s;
    s << to_string(model.kind()) << '|' << model.n() << '|' << model.k() << '|' << to_string(model.mode()) << '|'
      << fmt::num(model.reward_bound()) << '|' << static_cast<int>(model.regret_kind()) << '|';
    std::visit([&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, MnlParams>) {
            for (double v : p.weights) s << fmt::num(v) << ',';
            s << fmt::num(p.outside_weight);
        } else if constexpr (std::is_same_v<P, RumParams>) {
            for (double v : p.means) s << fmt::num(v) << ',';
            s << (p.outside_mean ? fmt::num(*p.outside_mean) : "none");
        } else if constexpr (std::is_same_v<P, PreferenceParams>) {
            for (double v : p.matrix) s << fmt::num(v) << ',';
            s << p.optimal.to_string() << ',' << fmt::num(p.outside_optimal) << ',' << fmt::num(p.outside_other);
        } else {
            for (double v : p.probs) s << fmt::num(v) << ',';
        }
    }, model.params());
    return fmt::fnv1a_hex(s.str());
}

}  // namespace combandit
