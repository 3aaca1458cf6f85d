// ============================================================================
// stratsynth/instance.hpp — benchmark instances
// ============================================================================

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "stratsynth/catalog.hpp"
#include "stratsynth/errors.hpp"
#include "stratsynth/features.hpp"
#include "stratsynth/hash.hpp"

namespace stratsynth {

enum class Status : std::uint8_t { sat, unsat, unknown };

inline const char* status_text(Status s) {
    switch (s) {
        case Status::sat: return "sat";
        case Status::unsat: return "unsat";
        case Status::unknown: return "unknown";
    }
    return "?";
}

struct Instance {
    std::string id;                       // stable identifier (relative path)
    std::filesystem::path text_source;    // empty for simulated instances
    Status expected_status = Status::unknown;
    std::optional<FeatureMap> features;   // given for simulated, extracted for files
    double sim_difficulty = 0.0;          // simulated backend only, in [0, 1)
};

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Reads the benchmark's status annotation, e.g. (set-info :status unsat).
inline Status scan_status_annotation(std::string_view text) {
    const std::string needle = ":status";
    std::size_t pos = text.find(needle);
    while (pos != std::string::npos) {
        std::size_t i = pos + needle.size();
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) &&
               text[i] != ')')
            ++i;
        const std::string_view word = text.substr(start, i - start);
        if (word == "sat") return Status::sat;
        if (word == "unsat") return Status::unsat;
        if (word == "unknown") return Status::unknown;
        pos = text.find(needle, pos + 1);
    }
    return Status::unknown;
}

// Recursively collects *.smt2 files; ids are paths relative to the scanned
// directory, sorted for a stable order.
inline std::vector<Instance> scan_benchmarks(const std::vector<std::filesystem::path>& dirs) {
    namespace fs = std::filesystem;
    std::vector<Instance> out;
    for (const fs::path& dir : dirs) {
        if (!fs::is_directory(dir)) throw ConfigError("benchmark dir not found: " + dir.string());
        for (const auto& entry : fs::recursive_directory_iterator(dir)) {
            if (!entry.is_regular_file() || entry.path().extension() != ".smt2") continue;
            Instance inst;
            inst.id = fs::relative(entry.path(), dir).generic_string();
            inst.text_source = entry.path();
            inst.expected_status = scan_status_annotation(read_text_file(entry.path()));
            out.push_back(std::move(inst));
        }
    }
    std::sort(out.begin(), out.end(),
              [](const Instance& a, const Instance& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < out.size(); ++i)
        if (out[i - 1].id == out[i].id)
            throw ConfigError("duplicate instance id across benchmark dirs: " + out[i].id);
    return out;
}

// Computes and memoizes the feature map of a file-backed instance.
inline const FeatureMap& ensure_features(Instance& inst, const TacticCatalog& catalog) {
    if (!inst.features) {
        if (inst.text_source.empty())
            throw MissingFeatureError("instance " + inst.id + " carries no feature map");
        inst.features = extract_features(read_text_file(inst.text_source), catalog);
    }
    return *inst.features;
}

// Seeded synthetic instances for the simulated backend: random feature maps
// covering the catalog probes, alternating known statuses.
inline std::vector<Instance> make_simulated_instances(int count, const TacticCatalog& catalog,
                                                      std::uint64_t seed,
                                                      double difficulty = 0.0) {
    std::vector<Instance> out;
    for (int i = 0; i < count; ++i) {
        Instance inst;
        inst.id = "sim/" + std::to_string(i);
        inst.sim_difficulty = difficulty;
        const std::uint64_t h = splitmix64(seed ^ (0x5151000051510000ULL + std::uint64_t(i)));
        inst.expected_status = (h & 1) != 0 ? Status::sat : Status::unsat;
        FeatureMap features;
        std::uint64_t roll = h;
        for (const ProbeSpec& probe : catalog.probes) {
            roll = splitmix64(roll ^ fnv1a64(probe.name));
            if (probe.kind == ProbeKind::boolean_probe) {
                features[probe.name] = (roll & 2) != 0;
            } else {
                const std::int64_t top =
                    2 * *std::max_element(probe.thresholds.begin(), probe.thresholds.end());
                features[probe.name] = static_cast<std::int64_t>(roll % std::uint64_t(top + 1));
            }
        }
        inst.features = std::move(features);
        out.push_back(std::move(inst));
    }
    return out;
}

}  // namespace stratsynth
