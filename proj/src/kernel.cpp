#include "qvsim/kernel.hpp"

#include <bit>

#include "qvsim/error.hpp"

namespace qvsim {

namespace {

// Shared by the in-block and cross-block paths so the per-pair arithmetic is
// the same expression everywhere; final states are then bit-identical across
// block size and worker count choices.
inline void apply_pair(amp_t &lo, amp_t &hi, const GateMatrix &u) {
    const amp_t a = lo;
    const amp_t b = hi;
    lo = u.u00 * a + u.u01 * b;
    hi = u.u10 * a + u.u11 * b;
}

inline bool control_set(std::uint64_t index,
                        std::optional<std::uint32_t> control) {
    return !control || ((index >> *control) & 1u) != 0;
}

} // namespace

std::vector<PairUnit> plan_block_pairs(std::uint32_t n_qubits,
                                       std::uint64_t block_amps,
                                       std::uint32_t target) {
    const std::uint64_t n_blocks = block_layout(n_qubits, block_amps);
    if (target >= n_qubits) {
        throw ValidationError("target " + std::to_string(target) +
                              " >= n_qubits " + std::to_string(n_qubits));
    }
    const std::uint64_t stride = std::uint64_t{1} << target;
    std::vector<PairUnit> units;
    if (stride < block_amps) {
        units.reserve(n_blocks);
        for (std::uint64_t b = 0; b < n_blocks; ++b) {
            units.push_back({b, b});
        }
    } else {
        const std::uint64_t block_stride = stride / block_amps;
        units.reserve(n_blocks / 2);
        for (std::uint64_t b = 0; b < n_blocks; ++b) {
            if ((b & block_stride) == 0) {
                units.push_back({b, b ^ block_stride});
            }
        }
    }
    return units;
}

GatePlan make_gate_plan(std::uint32_t n_qubits, std::uint64_t block_amps,
                        const GateOp &op) {
    return {op, plan_block_pairs(n_qubits, block_amps, op.target)};
}

void apply_gate_in_block(BlockBuffer &buf, const GateMatrix &u,
                         std::uint32_t target, std::uint64_t base_index,
                         std::optional<std::uint32_t> control) {
    const std::uint64_t block_amps = buf.amps.size();
    const std::uint64_t stride = std::uint64_t{1} << target;
    if (stride >= block_amps) {
        throw ValidationError(
            "stride 2^" + std::to_string(target) +
            " does not fit in a block of " + std::to_string(block_amps) +
            " amplitudes; use the cross-block path");
    }
    amp_t *amps = buf.amps.data();
    for (std::uint64_t group = 0; group < block_amps; group += 2 * stride) {
        for (std::uint64_t j = group; j < group + stride; ++j) {
            if (!control_set(base_index + j, control)) {
                continue;
            }
            apply_pair(amps[j], amps[j + stride], u);
        }
    }
}

void apply_gate_cross_block(BlockBuffer &a, BlockBuffer &b, const GateMatrix &u,
                            std::uint32_t target,
                            std::optional<std::uint32_t> control) {
    const std::uint64_t block_amps = a.amps.size();
    if (b.amps.size() != block_amps) {
        throw ValidationError("block buffers differ in size");
    }
    const std::uint64_t stride = std::uint64_t{1} << target;
    if (stride < block_amps) {
        throw ValidationError("stride 2^" + std::to_string(target) +
                              " fits in one block; use the in-block path");
    }
    const std::uint64_t block_stride = stride / block_amps;
    if (b.block_id != (a.block_id ^ block_stride) ||
        (a.block_id & block_stride) != 0) {
        throw ValidationError("blocks " + std::to_string(a.block_id) + " and " +
                              std::to_string(b.block_id) +
                              " are not a pair for stride 2^" +
                              std::to_string(target));
    }
    const std::uint64_t base_index = a.block_id * block_amps;
    amp_t *lo = a.amps.data();
    amp_t *hi = b.amps.data();
    for (std::uint64_t j = 0; j < block_amps; ++j) {
        if (!control_set(base_index + j, control)) {
            continue;
        }
        apply_pair(lo[j], hi[j], u);
    }
}

void apply_units(CacheWindow &cache, const GateOp &op,
                 std::span<const PairUnit> units, std::uint64_t block_amps) {
    for (const PairUnit &unit : units) {
        if (unit.intra_block()) {
            BlockLease lease = cache.acquire(unit.block_a);
            apply_gate_in_block(lease.buffer(), op.matrix, op.target,
                                unit.block_a * block_amps, op.control);
            lease.mark_dirty();
        } else {
            BlockLease lease_a = cache.acquire(unit.block_a);
            BlockLease lease_b = cache.acquire(unit.block_b);
            apply_gate_cross_block(lease_a.buffer(), lease_b.buffer(),
                                   op.matrix, op.target, op.control);
            lease_a.mark_dirty();
            lease_b.mark_dirty();
        }
    }
}

void apply_gate_streamed(BlockStore &store, CacheWindow &cache,
                         const GateOp &op, Metrics &metrics) {
    if (op.target >= store.n_qubits() ||
        (op.control && (*op.control >= store.n_qubits() ||
                        *op.control == op.target))) {
        throw ValidationError("op '" + op.name +
                              "' has qubit indices invalid for n_qubits " +
                              std::to_string(store.n_qubits()));
    }
    const GatePlan plan = make_gate_plan(store.n_qubits(), store.block_amps(), op);
    apply_units(cache, op, plan.units, store.block_amps());
    cache.flush();
    metrics.traversals += 1;
    metrics.gates_applied += 1;
}

} // namespace qvsim
