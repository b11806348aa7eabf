#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "qvsim/kernel.hpp"
#include "qvsim/metrics.hpp"
#include "qvsim/store.hpp"
#include "qvsim/types.hpp"

namespace qvsim {

/// Even split of a work domain into per-worker intervals.
struct PartitionPlan {
    std::uint32_t workers = 0;
    /// Half-open [lo, hi) ranges; disjoint, ordered, covering the domain,
    /// sizes differing by at most one.
    std::vector<std::pair<std::uint64_t, std::uint64_t>> ranges;
};

/// Interval i = [floor(total*i/C), floor(total*(i+1)/C)).
PartitionPlan partition_indices(std::uint64_t total, std::uint32_t workers);

/// Contiguous per-worker chunks of a gate's unit list, sizes differing by at
/// most one. Every unit lands in exactly one chunk, so every block is touched
/// by exactly one worker per gate.
std::vector<std::span<const PairUnit>>
assign_pair_units(std::span<const PairUnit> units, std::uint32_t workers);

struct WorkerReport {
    std::uint32_t worker_id = 0;
    std::uint64_t units_processed = 0;
    Metrics metrics;
    double wall_ms = 0.0;
};

/// Test instrumentation: called on the worker thread around each gate's
/// chunk. Not used in production paths.
struct ExecHooks {
    std::function<void(std::uint32_t worker, std::size_t gate)> on_gate_start;
    std::function<void(std::uint32_t worker, std::size_t gate)> on_gate_end;
};

/// Execute the circuit with `workers` concurrent workers sharing the store.
/// Per gate: the unit list is chunked across workers, each worker sweeps its
/// chunk through a private cache window (budget cache_bytes / workers) and
/// flushes; a barrier separates gates. Worker counters merge into `metrics`
/// at each barrier; reports aggregate per worker across the run.
std::vector<WorkerReport> run_parallel(BlockStore &store, const Circuit &circuit,
                                       std::uint32_t workers,
                                       std::uint64_t cache_bytes,
                                       Metrics &metrics,
                                       const ExecHooks &hooks = {});

} // namespace qvsim
