#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

namespace qvsim {

/// Monotone counters describing one run (or one worker's share of it).
/// blocks/bytes track store I/O, hits/misses the cache window, traversals the
/// number of planned sweeps over the state. All counters only ever increase
/// within a run.
struct Metrics {
    std::uint64_t gates_applied = 0;
    std::uint64_t traversals = 0;
    std::uint64_t blocks_read = 0;
    std::uint64_t blocks_written = 0;
    std::uint64_t bytes_read = 0;
    std::uint64_t bytes_written = 0;
    std::uint64_t cache_hits = 0;
    std::uint64_t cache_misses = 0;
    std::uint64_t peak_cache_bytes = 0;
    std::uint64_t madds = 0; // complex multiply-adds, dense engine only
    double wall_ms = 0.0;
    std::uint32_t workers = 1;
    std::string strategy;

    bool operator==(const Metrics &) const = default;
};

/// Counter sum; peak_cache_bytes takes the max, workers the max, strategy the
/// first non-empty tag. Commutative and associative on the counters.
Metrics merge(const Metrics &a, const Metrics &b);

/// Metrics document with the fixed reporting field names.
nlohmann::json to_json(const Metrics &m, std::uint32_t n_qubits);

} // namespace qvsim
