#include "qvsim/parallel.hpp"

#include <chrono>
#include <exception>
#include <thread>

#include "qvsim/error.hpp"

namespace qvsim {

namespace {

std::uint64_t boundary(std::uint64_t total, std::uint32_t workers,
                       std::uint32_t i) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(total) * i) / workers);
}

} // namespace

PartitionPlan partition_indices(std::uint64_t total, std::uint32_t workers) {
    if (workers < 1) {
        throw ValidationError("worker count must be at least 1");
    }
    if (workers > total) {
        throw ValidationError("worker count " + std::to_string(workers) +
                              " exceeds domain size " + std::to_string(total));
    }
    PartitionPlan plan;
    plan.workers = workers;
    plan.ranges.reserve(workers);
    for (std::uint32_t i = 0; i < workers; ++i) {
        plan.ranges.emplace_back(boundary(total, workers, i),
                                 boundary(total, workers, i + 1));
    }
    return plan;
}

std::vector<std::span<const PairUnit>>
assign_pair_units(std::span<const PairUnit> units, std::uint32_t workers) {
    if (workers < 1) {
        throw ValidationError("worker count must be at least 1");
    }
    std::vector<std::span<const PairUnit>> chunks;
    chunks.reserve(workers);
    const std::uint64_t total = units.size();
    for (std::uint32_t i = 0; i < workers; ++i) {
        const std::uint64_t lo = boundary(total, workers, i);
        const std::uint64_t hi = boundary(total, workers, i + 1);
        chunks.push_back(units.subspan(lo, hi - lo));
    }
    return chunks;
}

std::vector<WorkerReport> run_parallel(BlockStore &store,
                                       const Circuit &circuit,
                                       std::uint32_t workers,
                                       std::uint64_t cache_bytes,
                                       Metrics &metrics,
                                       const ExecHooks &hooks) {
    if (workers < 1) {
        throw ValidationError("worker count must be at least 1");
    }
    if (circuit.n_qubits != store.n_qubits()) {
        throw ValidationError("circuit is for " +
                              std::to_string(circuit.n_qubits) +
                              " qubits, store holds " +
                              std::to_string(store.n_qubits()));
    }
    const auto violations = validate_circuit(circuit);
    if (!violations.empty()) {
        throw ValidationError("invalid circuit: op " +
                              std::to_string(violations.front().op_index) +
                              ": " + violations.front().message);
    }
    const std::uint64_t per_worker_cache = cache_bytes / workers;
    if (per_worker_cache < 2 * store.block_bytes()) {
        throw CapacityError(
            "cache budget " + std::to_string(cache_bytes) + " / " +
            std::to_string(workers) +
            " workers leaves less than one pair unit (two blocks) each");
    }

    std::vector<WorkerReport> reports(workers);
    for (std::uint32_t w = 0; w < workers; ++w) {
        reports[w].worker_id = w;
    }

    using clock = std::chrono::steady_clock;
    for (std::size_t gate_idx = 0; gate_idx < circuit.ops.size(); ++gate_idx) {
        const GateOp &op = circuit.ops[gate_idx];
        const GatePlan plan =
            make_gate_plan(circuit.n_qubits, store.block_amps(), op);
        const auto chunks = assign_pair_units(plan.units, workers);

        std::vector<Metrics> worker_metrics(workers);
        std::vector<double> worker_wall(workers, 0.0);
        std::vector<std::exception_ptr> failures(workers);
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (std::uint32_t w = 0; w < workers; ++w) {
            threads.emplace_back([&, w]() {
                try {
                    if (hooks.on_gate_start) {
                        hooks.on_gate_start(w, gate_idx);
                    }
                    const auto t0 = clock::now();
                    CacheWindow window(
                        store, {per_worker_cache, store.block_amps()},
                        worker_metrics[w]);
                    apply_units(window, op, chunks[w], store.block_amps());
                    window.flush();
                    worker_wall[w] =
                        std::chrono::duration<double, std::milli>(clock::now() -
                                                                  t0)
                            .count();
                    if (hooks.on_gate_end) {
                        hooks.on_gate_end(w, gate_idx);
                    }
                } catch (...) {
                    failures[w] = std::current_exception();
                }
            });
        }
        for (auto &t : threads) {
            t.join(); // the barrier: no worker starts gate g+1 before this
        }
        for (std::uint32_t w = 0; w < workers; ++w) {
            if (failures[w]) {
                std::rethrow_exception(failures[w]);
            }
        }
        for (std::uint32_t w = 0; w < workers; ++w) {
            metrics = merge(metrics, worker_metrics[w]);
            reports[w].units_processed += chunks[w].size();
            reports[w].metrics = merge(reports[w].metrics, worker_metrics[w]);
            reports[w].wall_ms += worker_wall[w];
        }
        metrics.traversals += 1;
        metrics.gates_applied += 1;
    }
    return reports;
}

} // namespace qvsim
