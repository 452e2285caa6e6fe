#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "../optim/run.hpp"

namespace fvtomo::harness {

using optim::HistorySample;
using optim::RunRecord;

inline nlohmann::json to_json(const RunRecord& r) {
    nlohmann::json history = nlohmann::json::array();
    for (const auto& h : r.history) history.push_back({h.fe, h.e1});
    return {
        {"problem", r.problem_id},   {"algorithm", r.algorithm_id}, {"repetition", r.repetition},
        {"seed", r.seed},            {"config", r.config},          {"e1", r.e1},
        {"e2", r.e2},                {"fitness", r.fitness},        {"fe_count", r.fe_count},
        {"scale_mode", r.scale_mode}, {"wall_seconds", r.wall_seconds}, {"error", r.error},
        {"history", history},        {"best", r.best},
    };
}

inline RunRecord record_from_json(const nlohmann::json& j) {
    RunRecord r;
    r.problem_id = j.at("problem").get<std::string>();
    r.algorithm_id = j.at("algorithm").get<std::string>();
    r.repetition = j.at("repetition").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.config = j.value("config", std::string{});
    r.e1 = j.at("e1").get<double>();
    r.e2 = j.at("e2").get<double>();
    r.fitness = j.value("fitness", r.e1);
    r.fe_count = j.value("fe_count", std::size_t{0});
    r.scale_mode = j.value("scale_mode", std::string{"clamp"});
    r.wall_seconds = j.value("wall_seconds", 0.0);
    r.error = j.value("error", std::string{});
    if (j.contains("history"))
        for (const auto& h : j.at("history")) r.history.push_back({h.at(0).get<std::size_t>(), h.at(1).get<double>()});
    if (j.contains("best")) r.best = j.at("best").get<std::vector<double>>();
    return r;
}

/// Append-only set of run records keyed by (problem, algorithm, repetition).
class ResultStore {
  public:
    using Key = std::tuple<std::string, std::string, std::size_t>;

    ResultStore() = default;

    /// Opens a JSON-lines store, loading any records already on disk.
    explicit ResultStore(std::filesystem::path path) : path_(std::move(path)) {
        if (std::filesystem::exists(path_)) load_file();
    }

    bool contains(const Key& key) const { return index_.count(key) != 0; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }
    const std::vector<RunRecord>& records() const { return records_; }
    const std::filesystem::path& path() const { return path_; }

    const RunRecord& at(const Key& key) const {
        const auto it = index_.find(key);
        if (it == index_.end()) throw std::out_of_range("ResultStore: no record for key");
        return records_[it->second];
    }

    /// Adds a record, persisting it immediately when the store is file-backed.
    void append(RunRecord record) {
        Key key{record.problem_id, record.algorithm_id, record.repetition};
        if (contains(key))
            throw std::invalid_argument("ResultStore: duplicate record for " + record.problem_id + " / " +
                                        record.algorithm_id + " / " + std::to_string(record.repetition));
        if (!path_.empty()) {
            std::ofstream out(path_, std::ios::app);
            if (!out) throw std::runtime_error("cannot append to result store: " + path_.string());
            out << to_json(record).dump() << '\n';
            out.flush();
            if (!out) throw std::runtime_error("failed writing result store: " + path_.string());
        }
        index_.emplace(std::move(key), records_.size());
        records_.push_back(std::move(record));
    }

  private:
    void load_file() {
        std::ifstream in(path_);
        if (!in) throw std::runtime_error("cannot read result store: " + path_.string());
        std::vector<std::string> lines;
        for (std::string line; std::getline(in, line);)
            if (!line.empty()) lines.push_back(std::move(line));
        in.close();
        for (std::size_t i = 0; i < lines.size(); ++i) {
            RunRecord r;
            try {
                r = record_from_json(nlohmann::json::parse(lines[i]));
            } catch (const std::exception& e) {
                if (i + 1 == lines.size()) {  // torn final line from an interrupted run
                    lines.pop_back();
                    rewrite(lines);
                    break;
                }
                throw std::runtime_error("corrupt result store " + path_.string() + " line " + std::to_string(i + 1) +
                                         ": " + e.what());
            }
            Key key{r.problem_id, r.algorithm_id, r.repetition};
            if (contains(key)) continue;
            index_.emplace(std::move(key), records_.size());
            records_.push_back(std::move(r));
        }
    }

    void rewrite(const std::vector<std::string>& lines) const {
        std::ofstream out(path_, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot repair result store: " + path_.string());
        for (const auto& l : lines) out << l << '\n';
    }

    std::filesystem::path path_;
    std::vector<RunRecord> records_;
    std::map<Key, std::size_t> index_;
};

}  // namespace fvtomo::harness
