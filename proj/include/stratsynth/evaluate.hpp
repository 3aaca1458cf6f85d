// ============================================================================
// stratsynth/evaluate.hpp — cached batch evaluation
// ============================================================================
//
// evaluate_set runs one strategy over a set of instances, reusing cached
// records and executing only the misses. Misses may run on a bounded worker
// pool; cache appends happen afterwards on the caller thread, in instance
// order, so the cache file is identical however the work was scheduled.
//
// ============================================================================

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "stratsynth/backend.hpp"
#include "stratsynth/record.hpp"
#include "stratsynth/strategy.hpp"

namespace stratsynth {

inline std::vector<EvalRecord> evaluate_set(Backend& backend, const StrategyNode& strategy,
                                            const std::vector<Instance>& instances,
                                            std::int64_t timeout_ms, EvalCache& cache,
                                            int workers = 1) {
    const std::string key = canonical_key(strategy);
    std::vector<EvalRecord> results(instances.size());
    std::vector<std::size_t> misses;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const EvalRecord* hit = cache.find(key, instances[i].id, timeout_ms);
        if (hit != nullptr)
            results[i] = *hit;
        else
            misses.push_back(i);
    }

    if (!misses.empty()) {
        if (workers <= 1 || misses.size() == 1) {
            for (std::size_t i : misses)
                results[i] = backend.execute(strategy, instances[i], timeout_ms);
        } else {
            std::atomic<std::size_t> next{0};
            std::vector<std::thread> pool;
            const std::size_t n =
                std::min(static_cast<std::size_t>(workers), misses.size());
            std::exception_ptr failure;
            std::mutex failure_mutex;
            for (std::size_t w = 0; w < n; ++w) {
                pool.emplace_back([&] {
                    for (;;) {
                        const std::size_t j = next.fetch_add(1);
                        if (j >= misses.size()) return;
                        try {
                            results[misses[j]] =
                                backend.execute(strategy, instances[misses[j]], timeout_ms);
                        } catch (...) {
                            std::lock_guard<std::mutex> lock(failure_mutex);
                            if (!failure) failure = std::current_exception();
                            return;
                        }
                    }
                });
            }
            for (std::thread& t : pool) t.join();
            if (failure) std::rethrow_exception(failure);
        }
        for (std::size_t i : misses) cache.append(results[i]);
    }
    return results;
}

}  // namespace stratsynth
