#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "../stats.hpp"
#include "store.hpp"

namespace fvtomo::harness {

/// Shortest round-trip decimal form.
inline std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_number(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::invalid_argument("not a number: '" + s + "'");
    return v;
}

using CsvTable = std::vector<std::vector<std::string>>;

inline void write_csv(const std::filesystem::path& path, const CsvTable& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
    }
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

inline CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    CsvTable rows;
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

enum class Metric { E1, E2 };

/// Orders strings with embedded numbers numerically ("a6" < "a16", "mu=5" < "mu=55").
inline bool natural_less(const std::string& a, const std::string& b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const bool da = std::isdigit(static_cast<unsigned char>(a[i])) != 0;
        const bool db = std::isdigit(static_cast<unsigned char>(b[j])) != 0;
        if (da && db) {
            std::size_t ie = i, je = j;
            while (ie < a.size() && (std::isdigit(static_cast<unsigned char>(a[ie])) || a[ie] == '.')) ++ie;
            while (je < b.size() && (std::isdigit(static_cast<unsigned char>(b[je])) || b[je] == '.')) ++je;
            const double na = std::stod(a.substr(i, ie - i)), nb = std::stod(b.substr(j, je - j));
            if (na != nb) return na < nb;
            i = ie;
            j = je;
        } else {
            if (a[i] != b[j]) return a[i] < b[j];
            ++i;
            ++j;
        }
    }
    return a.size() - i < b.size() - j;
}

/**
 * Successful records regrouped by problem and algorithm. Problems and
 * algorithms are in natural order so tables never depend on the order in
 * which runs finished.
 */
struct MetricView {
    std::vector<std::string> problems;
    std::vector<std::string> algorithms;
    std::map<std::string, std::map<std::string, std::vector<const RunRecord*>>> cells;  // problem -> alg -> runs

    std::vector<double> values(const std::string& problem, const std::string& algorithm, Metric m) const {
        std::vector<double> out;
        const auto p = cells.find(problem);
        if (p == cells.end()) return out;
        const auto a = p->second.find(algorithm);
        if (a == p->second.end()) return out;
        for (const auto* r : a->second) out.push_back(m == Metric::E1 ? r->e1 : r->e2);
        return out;
    }
};

inline MetricView make_view(const ResultStore& store) {
    MetricView v;
    std::set<std::string> seen_p, seen_a;
    std::vector<const RunRecord*> sorted;
    for (const auto& r : store.records())
        if (!r.failed()) sorted.push_back(&r);
    // Repetition order inside a cell must not depend on completion order.
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const RunRecord* a, const RunRecord* b) { return a->repetition < b->repetition; });
    for (const auto* r : sorted) {
        if (seen_p.insert(r->problem_id).second) v.problems.push_back(r->problem_id);
        if (seen_a.insert(r->algorithm_id).second) v.algorithms.push_back(r->algorithm_id);
    }
    std::sort(v.problems.begin(), v.problems.end(), natural_less);
    std::sort(v.algorithms.begin(), v.algorithms.end(), natural_less);
    for (const auto* r : sorted) v.cells[r->problem_id][r->algorithm_id].push_back(r);
    return v;
}

inline CsvTable median_table(const MetricView& v, Metric m) {
    CsvTable t;
    std::vector<std::string> header{"problem"};
    header.insert(header.end(), v.algorithms.begin(), v.algorithms.end());
    t.push_back(header);
    for (const auto& p : v.problems) {
        std::vector<std::string> row{p};
        for (const auto& a : v.algorithms) {
            const auto vals = v.values(p, a, m);
            row.push_back(vals.empty() ? "NA" : format_number(stats::median(vals)));
        }
        t.push_back(std::move(row));
    }
    return t;
}

inline CsvTable win_table(const stats::WinMatrix& w) {
    CsvTable t;
    std::vector<std::string> header{"algorithm"};
    header.insert(header.end(), w.algorithms.begin(), w.algorithms.end());
    header.push_back("sum");
    t.push_back(header);
    for (std::size_t i = 0; i < w.algorithms.size(); ++i) {
        std::vector<std::string> row{w.algorithms[i]};
        for (std::size_t j = 0; j < w.algorithms.size(); ++j)
            row.push_back(i == j ? "NA" : std::to_string(w.counts[i][j]));
        row.push_back(std::to_string(w.row_sum(i)));
        t.push_back(std::move(row));
    }
    return t;
}

/// Problems on which every listed algorithm has at least one sample.
inline std::vector<stats::ProblemSamples> complete_samples(const MetricView& v, const std::vector<std::string>& algs,
                                                           Metric m) {
    std::vector<stats::ProblemSamples> out;
    for (const auto& p : v.problems) {
        stats::ProblemSamples s;
        for (const auto& a : algs) {
            auto vals = v.values(p, a, m);
            if (vals.empty()) break;
            s.emplace(a, std::move(vals));
        }
        if (s.size() == algs.size()) out.push_back(std::move(s));
    }
    return out;
}

/// Splits `base@key=value` ids into sweep groups keyed by `key`.
inline std::map<std::string, std::vector<std::string>> sweep_groups(const std::vector<std::string>& algorithms) {
    std::map<std::string, std::vector<std::string>> groups;
    for (const auto& a : algorithms) {
        const auto at = a.find('@');
        if (at == std::string::npos) continue;
        const auto eq = a.find('=', at);
        if (eq == std::string::npos) continue;
        groups[a.substr(at + 1, eq - at - 1)].push_back(a);
    }
    return groups;
}

inline std::string sweep_value(const std::string& id) { return id.substr(id.find('=', id.find('@')) + 1); }

/**
 * Writes the summary tables for a store into `dir`:
 *   median_e1.csv, median_e2.csv     problems x algorithms medians
 *   wins_e1.csv, wins_e2.csv         pairwise significant wins with a sum column
 *   sweep_<key>.csv                  per sweep value: medians and win totals
 *   sweep_<key>_wins_e{1,2}.csv      pairwise wins among the sweep values
 * Returns the written paths.
 */
inline std::vector<std::filesystem::path> emit_tables(const ResultStore& store, const std::filesystem::path& dir,
                                                      double alpha = 0.05) {
    if (store.empty()) throw std::invalid_argument("emit_tables: empty result store");
    const MetricView v = make_view(store);
    if (v.problems.empty()) throw std::invalid_argument("emit_tables: no successful runs in store");
    std::filesystem::create_directories(dir);

    std::vector<std::filesystem::path> written;
    auto emit = [&](const std::string& name, const CsvTable& t) {
        write_csv(dir / name, t);
        written.push_back(dir / name);
    };

    emit("median_e1.csv", median_table(v, Metric::E1));
    emit("median_e2.csv", median_table(v, Metric::E2));
    for (auto [m, name] : {std::pair{Metric::E1, "wins_e1.csv"}, std::pair{Metric::E2, "wins_e2.csv"}})
        emit(name, win_table(stats::win_matrix(v.algorithms, complete_samples(v, v.algorithms, m), alpha)));

    for (const auto& [key, algs] : sweep_groups(v.algorithms)) {
        const auto w1 = stats::win_matrix(algs, complete_samples(v, algs, Metric::E1), alpha);
        const auto w2 = stats::win_matrix(algs, complete_samples(v, algs, Metric::E2), alpha);
        emit("sweep_" + key + "_wins_e1.csv", win_table(w1));
        emit("sweep_" + key + "_wins_e2.csv", win_table(w2));

        CsvTable t{{"problem", key, "median_e1", "median_e2", "wins_e1", "wins_e2"}};
        for (const auto& p : v.problems) {
            for (std::size_t i = 0; i < algs.size(); ++i) {
                const auto e1 = v.values(p, algs[i], Metric::E1);
                const auto e2 = v.values(p, algs[i], Metric::E2);
                if (e1.empty()) continue;
                t.push_back({p, sweep_value(algs[i]), format_number(stats::median(e1)),
                             format_number(stats::median(e2)), std::to_string(w1.row_sum(i)),
                             std::to_string(w2.row_sum(i))});
            }
        }
        emit("sweep_" + key + ".csv", t);
    }
    return written;
}

}  // namespace fvtomo::harness
