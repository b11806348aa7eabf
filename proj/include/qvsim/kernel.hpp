#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qvsim/cache.hpp"
#include "qvsim/metrics.hpp"
#include "qvsim/store.hpp"
#include "qvsim/types.hpp"

namespace qvsim {

/// Block-level unit of work for one gate: a single block when the gate
/// stride 2^k fits inside a block, or an XOR-related pair of blocks when it
/// does not (block_b = block_a XOR 2^k/block_amps, block_a the lower one).
struct PairUnit {
    std::uint64_t block_a = 0;
    std::uint64_t block_b = 0;

    bool intra_block() const noexcept { return block_a == block_b; }
    bool operator==(const PairUnit &) const = default;
};

/// Unit list for a gate on qubit `target`, ordered by ascending block_a.
/// Every block id appears in exactly one unit: n_blocks units in the
/// intra-block case, n_blocks/2 in the cross-block case.
std::vector<PairUnit> plan_block_pairs(std::uint32_t n_qubits,
                                       std::uint64_t block_amps,
                                       std::uint32_t target);

struct GatePlan {
    GateOp op;
    std::vector<PairUnit> units;
};

GatePlan make_gate_plan(std::uint32_t n_qubits, std::uint64_t block_amps,
                        const GateOp &op);

/// Apply the 2x2 update to every pair inside one block (stride 2^target <
/// block size). base_index is the global index of amps[0]. Pairs whose
/// control bit is 0 are left untouched.
void apply_gate_in_block(BlockBuffer &buf, const GateMatrix &u,
                         std::uint32_t target, std::uint64_t base_index,
                         std::optional<std::uint32_t> control);

/// Apply the 2x2 update across a block pair (stride 2^target >= block size):
/// pair j is (a.amps[j], b.amps[j]).
void apply_gate_cross_block(BlockBuffer &a, BlockBuffer &b, const GateMatrix &u,
                            std::uint32_t target,
                            std::optional<std::uint32_t> control);

/// Process a span of pair units through the cache: acquire, update, mark
/// dirty, release. Used by both the serial sweep and the per-worker chunks.
void apply_units(CacheWindow &cache, const GateOp &op,
                 std::span<const PairUnit> units, std::uint64_t block_amps);

/// One full streaming traversal for one gate: plan, sweep every unit, flush.
/// Counts one traversal and one applied gate; every block is read and written
/// exactly once.
void apply_gate_streamed(BlockStore &store, CacheWindow &cache,
                         const GateOp &op, Metrics &metrics);

} // namespace qvsim
