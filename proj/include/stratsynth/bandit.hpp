// ============================================================================
// stratsynth/bandit.hpp — UCB bandits for tactic-parameter tuning
// ============================================================================
//
// Each tactic parameter at one tactic-application position is tuned by its
// own bandit. Bandits live beside the search tree (keyed by the action path
// that leads to the application), never inside it: selecting a parameter
// value adds no tree nodes. Arm values are updated with the max rule, like
// the tree itself.
//
// ============================================================================

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "stratsynth/catalog.hpp"
#include "stratsynth/types.hpp"

namespace stratsynth {

// UCB score of one arm/child: value estimate plus the exploration bonus.
// Unvisited arms score +infinity so they are tried first.
inline double ucb_score(std::int64_t pulls, double q_max, std::int64_t total_pulls, double c) {
    if (pulls <= 0) return std::numeric_limits<double>::infinity();
    return q_max + c * std::sqrt(std::log(static_cast<double>(total_pulls)) /
                                 static_cast<double>(pulls));
}

struct BanditArm {
    ParamValue value;
    std::int64_t pulls = 0;
    double q_max = 0.0;
};

struct ParamBandit {
    std::string param;
    std::vector<BanditArm> arms;  // candidate order from the catalog
    std::int64_t total_pulls = 0;

    static ParamBandit for_param(const ParamSpec& spec) {
        ParamBandit b;
        b.param = spec.name;
        for (const ParamValue& v : spec.candidates) b.arms.push_back(BanditArm{v, 0, 0.0});
        return b;
    }

    // Index of the arm to pull next: unpulled arms first in candidate order,
    // otherwise the UCB argmax (ties keep the earliest candidate).
    std::size_t select(double c) const {
        for (std::size_t i = 0; i < arms.size(); ++i)
            if (arms[i].pulls == 0) return i;
        std::size_t best = 0;
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < arms.size(); ++i) {
            const double s = ucb_score(arms[i].pulls, arms[i].q_max, total_pulls, c);
            if (s > best_score) {
                best_score = s;
                best = i;
            }
        }
        return best;
    }

    void update(std::size_t arm, double reward) {
        arms[arm].pulls += 1;
        total_pulls += 1;
        arms[arm].q_max = std::max(arms[arm].q_max, reward);
    }
};

}  // namespace stratsynth
