// ============================================================================
// stratsynth/record.hpp — evaluation records and the persistent cache
// ============================================================================
//
// One EvalRecord captures a single strategy-on-instance run. The EvalCache
// keys records by (strategy canonical key, instance id, timeout) and persists
// them as append-only JSONL, one record per line. A key is never overwritten
// with different data; a corrupt trailing line (crash artifact) is dropped
// and truncated away on load with a warning.
//
// ============================================================================

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <tuple>

#include <json.hpp>

#include "stratsynth/errors.hpp"

namespace stratsynth {

enum class SolveResult : std::uint8_t { sat, unsat, unknown, timeout, error };

inline const char* solve_result_text(SolveResult r) {
    switch (r) {
        case SolveResult::sat: return "sat";
        case SolveResult::unsat: return "unsat";
        case SolveResult::unknown: return "unknown";
        case SolveResult::timeout: return "timeout";
        case SolveResult::error: return "error";
    }
    return "?";
}

inline SolveResult solve_result_from_text(const std::string& s) {
    if (s == "sat") return SolveResult::sat;
    if (s == "unsat") return SolveResult::unsat;
    if (s == "unknown") return SolveResult::unknown;
    if (s == "timeout") return SolveResult::timeout;
    if (s == "error") return SolveResult::error;
    throw IoError("unknown solve result: " + s);
}

inline bool is_solved(SolveResult r) {
    return r == SolveResult::sat || r == SolveResult::unsat;
}

struct EvalRecord {
    std::string strategy_key;
    std::string instance_id;
    std::int64_t timeout_ms = 0;
    SolveResult result = SolveResult::unknown;
    std::int64_t wall_ms = 0;
    std::string backend_tag;
    std::uint64_t seed = 0;

    bool operator==(const EvalRecord& o) const {
        return strategy_key == o.strategy_key && instance_id == o.instance_id &&
               timeout_ms == o.timeout_ms && result == o.result && wall_ms == o.wall_ms &&
               backend_tag == o.backend_tag && seed == o.seed;
    }
};

inline nlohmann::json record_to_json(const EvalRecord& r) {
    return nlohmann::json{{"strategy_key", r.strategy_key},
                          {"instance_id", r.instance_id},
                          {"timeout_ms", r.timeout_ms},
                          {"result", solve_result_text(r.result)},
                          {"wall_ms", r.wall_ms},
                          {"backend_tag", r.backend_tag},
                          {"seed", r.seed}};
}

inline EvalRecord record_from_json(const nlohmann::json& j) {
    EvalRecord r;
    r.strategy_key = j.at("strategy_key").get<std::string>();
    r.instance_id = j.at("instance_id").get<std::string>();
    r.timeout_ms = j.at("timeout_ms").get<std::int64_t>();
    r.result = solve_result_from_text(j.at("result").get<std::string>());
    r.wall_ms = j.at("wall_ms").get<std::int64_t>();
    r.backend_tag = j.at("backend_tag").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    return r;
}

// ── EvalCache ───────────────────────────────────────────────────────────────

class EvalCache {
  public:
    using Key = std::tuple<std::string, std::string, std::int64_t>;

    EvalCache() = default;  // in-memory only

    explicit EvalCache(const std::filesystem::path& file) : file_(file) {
        if (std::filesystem::exists(file)) load(file);
        out_.open(file, std::ios::app);
        if (!out_) throw IoError("cannot open cache file for append: " + file.string());
    }

    const EvalRecord* find(const std::string& strategy_key, const std::string& instance_id,
                           std::int64_t timeout_ms) const {
        auto it = records_.find(Key{strategy_key, instance_id, timeout_ms});
        return it == records_.end() ? nullptr : &it->second;
    }

    void append(const EvalRecord& r) {
        const Key key{r.strategy_key, r.instance_id, r.timeout_ms};
        auto it = records_.find(key);
        if (it != records_.end()) {
            if (it->second == r) return;  // idempotent re-append
            throw CacheConflictError("cache conflict for strategy " + r.strategy_key +
                                     " on instance " + r.instance_id + " at " +
                                     std::to_string(r.timeout_ms) + " ms");
        }
        records_.emplace(key, r);
        if (out_.is_open()) {
            out_ << record_to_json(r).dump() << '\n';
            out_.flush();
        }
    }

    std::size_t size() const { return records_.size(); }

    const std::map<Key, EvalRecord>& records() const { return records_; }

  private:
    void load(const std::filesystem::path& file) {
        std::ifstream in(file, std::ios::binary);
        if (!in) throw IoError("cannot open cache file: " + file.string());
        std::string line;
        std::uint64_t offset = 0;
        while (std::getline(in, line)) {
            const std::uint64_t line_start = offset;
            offset += line.size() + 1;
            if (line.empty()) continue;
            EvalRecord r;
            try {
                r = record_from_json(nlohmann::json::parse(line));
            } catch (const std::exception& e) {
                if (in.peek() == std::char_traits<char>::eof()) {
                    std::cerr << "warning: dropping corrupt trailing cache line in "
                              << file.string() << "\n";
                    in.close();
                    std::filesystem::resize_file(file, line_start);
                    return;
                }
                throw IoError("corrupt cache line in " + file.string() + ": " + e.what());
            }
            const Key key{r.strategy_key, r.instance_id, r.timeout_ms};
            auto it = records_.find(key);
            if (it != records_.end() && !(it->second == r))
                throw IoError("cache file " + file.string() + " holds conflicting records");
            records_.emplace(key, std::move(r));
        }
    }

    std::map<Key, EvalRecord> records_;
    std::filesystem::path file_;
    std::ofstream out_;
};

}  // namespace stratsynth
