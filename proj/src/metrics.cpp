#include "qvsim/metrics.hpp"

#include <algorithm>

namespace qvsim {

Metrics merge(const Metrics &a, const Metrics &b) {
    Metrics out;
    out.gates_applied = a.gates_applied + b.gates_applied;
    out.traversals = a.traversals + b.traversals;
    out.blocks_read = a.blocks_read + b.blocks_read;
    out.blocks_written = a.blocks_written + b.blocks_written;
    out.bytes_read = a.bytes_read + b.bytes_read;
    out.bytes_written = a.bytes_written + b.bytes_written;
    out.cache_hits = a.cache_hits + b.cache_hits;
    out.cache_misses = a.cache_misses + b.cache_misses;
    out.peak_cache_bytes = std::max(a.peak_cache_bytes, b.peak_cache_bytes);
    out.madds = a.madds + b.madds;
    out.wall_ms = a.wall_ms + b.wall_ms;
    out.workers = std::max(a.workers, b.workers);
    out.strategy = a.strategy.empty() ? b.strategy : a.strategy;
    return out;
}

nlohmann::json to_json(const Metrics &m, std::uint32_t n_qubits) {
    return nlohmann::json{
        {"n_qubits", n_qubits},
        {"strategy", m.strategy},
        {"workers", m.workers},
        {"gates_applied", m.gates_applied},
        {"traversals", m.traversals},
        {"blocks_read", m.blocks_read},
        {"blocks_written", m.blocks_written},
        {"bytes_read", m.bytes_read},
        {"bytes_written", m.bytes_written},
        {"cache_hits", m.cache_hits},
        {"cache_misses", m.cache_misses},
        {"peak_cache_bytes", m.peak_cache_bytes},
        {"wall_ms", m.wall_ms},
    };
}

} // namespace qvsim
