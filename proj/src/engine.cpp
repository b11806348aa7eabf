#include "qvsim/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "qvsim/cache.hpp"
#include "qvsim/error.hpp"
#include "qvsim/gates.hpp"
#include "qvsim/kernel.hpp"

namespace qvsim {

namespace fs = std::filesystem;

const char *strategy_tag(Strategy s) {
    switch (s) {
    case Strategy::dense:
        return "dense";
    case Strategy::paired:
        return "paired";
    case Strategy::paired_cached:
        return "paired-cached";
    case Strategy::paired_cached_parallel:
        return "paired-cached-parallel";
    }
    return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view tag) {
    if (tag == "dense") {
        return Strategy::dense;
    }
    if (tag == "paired") {
        return Strategy::paired;
    }
    if (tag == "paired-cached") {
        return Strategy::paired_cached;
    }
    if (tag == "paired-cached-parallel") {
        return Strategy::paired_cached_parallel;
    }
    return std::nullopt;
}

const std::vector<std::string> &strategy_tags() {
    static const std::vector<std::string> tags = {
        "dense", "paired", "paired-cached", "paired-cached-parallel"};
    return tags;
}

namespace {

void check_match(const BlockStore &store, const Circuit &circuit) {
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
}

fs::path scratch_or_temp(const fs::path &dir) {
    return dir.empty() ? fs::temp_directory_path() : dir;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

} // namespace

std::vector<WorkerReport> apply_circuit(BlockStore &store,
                                        const Circuit &circuit,
                                        const RunConfig &config,
                                        Metrics &metrics) {
    check_match(store, circuit);
    metrics.strategy = strategy_tag(config.strategy);
    metrics.workers =
        config.strategy == Strategy::paired_cached_parallel ? config.workers
                                                            : 1;

    // wall_ms is this call's elapsed time on top of whatever the metrics
    // object carried before; per-worker sums merged mid-run are replaced.
    const double wall_before = metrics.wall_ms;
    const auto t0 = std::chrono::steady_clock::now();
    const auto stamp = [&] {
        metrics.wall_ms =
            wall_before + std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
    };

    std::vector<WorkerReport> reports;
    try {
        switch (config.strategy) {
        case Strategy::dense: {
            if (store.n_qubits() > config.oracle_limit) {
                throw OracleLimitError(
                    "dense strategy refuses " +
                    std::to_string(store.n_qubits()) +
                    " qubits (oracle limit " +
                    std::to_string(config.oracle_limit) + ")");
            }
            DenseState state = read_full_state(store, metrics);
            for (const GateOp &op : circuit.ops) {
                state = apply_dense(
                    expand_op(op, circuit.n_qubits, config.oracle_limit),
                    state, &metrics);
                metrics.gates_applied += 1;
            }
            write_full_state(store, state, metrics);
            break;
        }
        case Strategy::paired: {
            const std::uint64_t cap =
                std::max<std::uint64_t>(store.n_blocks(), 2) *
                store.block_bytes();
            CacheWindow window(store, {cap, store.block_amps()}, metrics);
            for (const GateOp &op : circuit.ops) {
                apply_gate_streamed(store, window, op, metrics);
            }
            break;
        }
        case Strategy::paired_cached: {
            CacheWindow window(store, {config.cache_bytes, store.block_amps()},
                               metrics);
            for (const GateOp &op : circuit.ops) {
                apply_gate_streamed(store, window, op, metrics);
            }
            break;
        }
        case Strategy::paired_cached_parallel:
            reports = run_parallel(store, circuit, config.workers,
                                   config.cache_bytes, metrics, config.hooks);
            break;
        }
    } catch (...) {
        stamp();
        throw;
    }
    stamp();
    return reports;
}

std::uint64_t uniform_below(std::mt19937_64 &rng, std::uint64_t bound) {
    if (bound == 0) {
        throw ValidationError("uniform_below: bound must be positive");
    }
    // Reject draws below 2^64 mod bound so the remainder is unbiased.
    const std::uint64_t threshold = (-bound) % bound;
    for (;;) {
        const std::uint64_t r = rng();
        if (r >= threshold) {
            return r % bound;
        }
    }
}

double uniform_unit(std::mt19937_64 &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Circuit random_circuit(std::mt19937_64 &rng, std::uint32_t n_qubits,
                       std::uint32_t depth) {
    if (n_qubits < 1) {
        throw ValidationError("circuit needs at least one qubit");
    }
    std::vector<std::string> pool = builtin_gate_names();
    if (n_qubits >= 2) {
        pool.push_back("cx");
        pool.push_back("cz");
    }
    const double two_pi = 2.0 * std::numbers::pi;
    const amp_t i1{0.0, 1.0};

    Circuit circuit;
    circuit.n_qubits = n_qubits;
    circuit.ops.reserve(depth);
    for (std::uint32_t g = 0; g < depth; ++g) {
        const std::string &name = pool[uniform_below(rng, pool.size())];
        const auto target =
            static_cast<std::uint32_t>(uniform_below(rng, n_qubits));
        if (name == "cx" || name == "cz") {
            auto control =
                static_cast<std::uint32_t>(uniform_below(rng, n_qubits - 1));
            if (control >= target) {
                ++control;
            }
            circuit.ops.push_back(controlled_op(name, control, target));
            continue;
        }
        const std::size_t arity = *gate_arity(name);
        if (arity == 0) {
            circuit.ops.push_back(single_op(name, target));
        } else if (arity == 1) {
            circuit.ops.push_back(
                single_op(name, target, {two_pi * uniform_unit(rng)}));
        } else {
            // Phase * Rz * Ry * Rz parametrization: exactly unitary for any
            // draw of the four angles.
            const double phi = two_pi * uniform_unit(rng);
            const double beta = two_pi * uniform_unit(rng);
            const double gamma = two_pi * uniform_unit(rng);
            const double delta = two_pi * uniform_unit(rng);
            const double c = std::cos(gamma / 2);
            const double s = std::sin(gamma / 2);
            const amp_t u00 = std::exp(i1 * (phi - beta / 2 - delta / 2)) * c;
            const amp_t u01 = -std::exp(i1 * (phi - beta / 2 + delta / 2)) * s;
            const amp_t u10 = std::exp(i1 * (phi + beta / 2 - delta / 2)) * s;
            const amp_t u11 = std::exp(i1 * (phi + beta / 2 + delta / 2)) * c;
            circuit.ops.push_back(single_op(
                name, target,
                {u00.real(), u00.imag(), u01.real(), u01.imag(), u10.real(),
                 u10.imag(), u11.real(), u11.imag()}));
        }
    }
    return circuit;
}

Circuit random_circuit(std::uint32_t n_qubits, std::uint32_t depth,
                       std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return random_circuit(rng, n_qubits, depth);
}

Circuit make_benchmark_circuit(std::uint32_t n_qubits) {
    if (n_qubits < 1) {
        throw ValidationError("circuit needs at least one qubit");
    }
    Circuit circuit;
    circuit.n_qubits = n_qubits;
    circuit.ops.reserve(n_qubits);
    for (std::uint32_t k = 0; k < n_qubits; ++k) {
        circuit.ops.push_back(single_op("h", k));
    }
    return circuit;
}

VerifyResult verify_equivalence(const VerifyOptions &opts) {
    if (opts.min_qubits < 1 || opts.min_qubits > opts.max_qubits) {
        throw ValidationError("verify: qubit range must satisfy 1 <= min <= max");
    }
    if (opts.max_qubits > kDefaultOracleLimit) {
        throw ValidationError("verify is oracle-bound: max qubits " +
                              std::to_string(opts.max_qubits) + " exceeds " +
                              std::to_string(kDefaultOracleLimit));
    }
    if (opts.max_depth < 1 || opts.block_amps.empty() || opts.workers.empty()) {
        throw ValidationError(
            "verify: depth, block sizes, and worker counts must be nonempty");
    }
    const fs::path scratch = scratch_or_temp(opts.scratch_dir);

    VerifyResult result;
    result.trials = opts.trials;
    for (std::uint64_t trial = 0; trial < opts.trials; ++trial) {
        // Fixed per-trial seed derivation: trials are independent of order
        // and reproducible one at a time.
        std::mt19937_64 rng(
            splitmix64(opts.seed ^ (0x9e3779b97f4a7c15ull * (trial + 1))));
        const auto n = static_cast<std::uint32_t>(
            opts.min_qubits +
            uniform_below(rng, opts.max_qubits - opts.min_qubits + 1));
        const auto depth =
            static_cast<std::uint32_t>(1 + uniform_below(rng, opts.max_depth));
        const Circuit circuit = random_circuit(rng, n, depth);

        const DenseState reference = simulate_dense(circuit);

        std::vector<std::uint64_t> amp_sizes;
        for (const std::uint64_t ba : opts.block_amps) {
            const std::uint64_t capped =
                std::min(ba, std::uint64_t{1} << n);
            if (std::find(amp_sizes.begin(), amp_sizes.end(), capped) ==
                amp_sizes.end()) {
                amp_sizes.push_back(capped);
            }
        }

        for (const std::uint64_t ba : amp_sizes) {
            for (const std::uint32_t workers : opts.workers) {
                const fs::path path =
                    scratch / ("verify-" + std::to_string(trial) + "-" +
                               std::to_string(ba) + "-c" +
                               std::to_string(workers) + ".qvs");
                const std::uint64_t cache = 4ull * workers * ba * kAmpBytes;
                double deviation = 0.0;
                {
                    BlockStore store = BlockStore::create(path, n, ba, true);
                    Metrics m;
                    RunConfig cfg;
                    cfg.strategy = workers > 1
                                       ? Strategy::paired_cached_parallel
                                       : Strategy::paired_cached;
                    cfg.cache_bytes = cache;
                    cfg.workers = workers;
                    apply_circuit(store, circuit, cfg, m);
                    const DenseState streamed = read_full_state(store, m);
                    deviation = max_deviation(reference, streamed);
                }
                result.comparisons += 1;
                result.max_deviation =
                    std::max(result.max_deviation, deviation);
                if (!(deviation <= opts.tolerance)) {
                    VerifyFailure failure;
                    failure.trial = trial;
                    failure.n_qubits = n;
                    failure.depth = depth;
                    failure.block_amps = ba;
                    failure.workers = workers;
                    failure.deviation = deviation;
                    const auto div = locate_divergence(
                        circuit, circuit, ba, workers, cache, path,
                        opts.tolerance);
                    if (div) {
                        failure.first_divergent_gate = div->op_index;
                    }
                    result.failures.push_back(std::move(failure));
                }
                std::error_code ec;
                fs::remove(path, ec);
            }
        }
    }
    return result;
}

std::optional<Divergence>
locate_divergence(const Circuit &reference, const Circuit &streamed,
                  std::uint64_t block_amps, std::uint32_t workers,
                  std::uint64_t cache_bytes,
                  const std::filesystem::path &state_path, double tolerance) {
    if (reference.n_qubits != streamed.n_qubits ||
        reference.ops.size() != streamed.ops.size()) {
        throw ValidationError(
            "locate_divergence: circuits must have equal shape");
    }
    Metrics m;
    std::optional<Divergence> found;
    {
        BlockStore store =
            BlockStore::create(state_path, reference.n_qubits, block_amps,
                               true);
        DenseState dense = zero_state(reference.n_qubits);
        for (std::size_t i = 0; i < reference.ops.size(); ++i) {
            dense = apply_dense(
                expand_op(reference.ops[i], reference.n_qubits), dense);
            Circuit step;
            step.n_qubits = streamed.n_qubits;
            step.ops = {streamed.ops[i]};
            RunConfig cfg;
            cfg.strategy = workers > 1 ? Strategy::paired_cached_parallel
                                       : Strategy::paired_cached;
            cfg.cache_bytes = cache_bytes;
            cfg.workers = workers;
            apply_circuit(store, step, cfg, m);
            const DenseState state = read_full_state(store, m);
            const double dev = max_deviation(dense, state);
            if (!(dev <= tolerance)) {
                found = Divergence{i, dev};
                break;
            }
        }
    }
    std::error_code ec;
    fs::remove(state_path, ec);
    return found;
}

std::vector<BenchRow> run_bench(const BenchOptions &opts) {
    if (opts.min_qubits < 1 || opts.min_qubits > opts.max_qubits) {
        throw ValidationError("bench: qubit range must satisfy 1 <= min <= max");
    }
    if (opts.strategies.empty() || opts.workers.empty() || opts.repeats < 1) {
        throw ValidationError(
            "bench: strategies, workers, and repeats must be nonempty");
    }
    const fs::path scratch = scratch_or_temp(opts.scratch_dir);

    std::vector<BenchRow> rows;
    for (std::uint32_t n = opts.min_qubits; n <= opts.max_qubits; ++n) {
        const Circuit circuit = make_benchmark_circuit(n);
        const std::uint64_t ba =
            std::min(opts.block_amps, std::uint64_t{1} << n);
        const fs::path path = scratch / ("bench-" + std::to_string(n) + ".qvs");
        for (const Strategy strategy : opts.strategies) {
            if (strategy == Strategy::dense && n > opts.oracle_limit) {
                continue;
            }
            const std::vector<std::uint32_t> workers_list =
                strategy == Strategy::paired_cached_parallel
                    ? opts.workers
                    : std::vector<std::uint32_t>{1};
            for (const std::uint32_t workers : workers_list) {
                // Setup stays outside the timed region: the store is built
                // once per cell and each repeat re-streams the same file, so
                // min-of-N reflects gate streaming, not file creation. The
                // sync between repeats keeps one pass's writeback from
                // bleeding into the next measurement.
                BlockStore store = BlockStore::create(path, n, ba, true);
                store.sync();
                double best_wall = std::numeric_limits<double>::infinity();
                Metrics best;
                for (std::uint32_t rep = 0; rep < opts.repeats; ++rep) {
                    Metrics m;
                    RunConfig cfg;
                    cfg.strategy = strategy;
                    cfg.cache_bytes = opts.cache_bytes;
                    cfg.workers = workers;
                    cfg.oracle_limit = opts.oracle_limit;
                    apply_circuit(store, circuit, cfg, m);
                    store.sync();
                    if (m.wall_ms < best_wall) {
                        best_wall = m.wall_ms;
                        best = m;
                    }
                }
                BenchRow row;
                row.qubits = n;
                row.data_size_bytes = total_bytes(n);
                row.strategy = strategy_tag(strategy);
                row.workers = workers;
                row.wall_ms = best_wall;
                row.blocks_read_per_gate =
                    circuit.ops.empty()
                        ? 0.0
                        : static_cast<double>(best.blocks_read) /
                              static_cast<double>(circuit.ops.size());
                rows.push_back(std::move(row));
            }
        }
        std::error_code ec;
        fs::remove(path, ec);
    }

    for (BenchRow &row : rows) {
        if (row.workers == 1) {
            row.speedup_vs_1_worker = 1.0;
            continue;
        }
        const auto base = std::find_if(
            rows.begin(), rows.end(), [&](const BenchRow &r) {
                return r.qubits == row.qubits && r.strategy == row.strategy &&
                       r.workers == 1;
            });
        row.speedup_vs_1_worker =
            (base != rows.end() && row.wall_ms > 0.0)
                ? base->wall_ms / row.wall_ms
                : 0.0;
    }
    return rows;
}

std::string bench_csv(const std::vector<BenchRow> &rows) {
    std::string out = "qubits,data_size_bytes,strategy,workers,wall_ms,"
                      "blocks_read_per_gate,speedup_vs_1_worker\n";
    char buf[128];
    for (const BenchRow &r : rows) {
        std::snprintf(buf, sizeof(buf), "%u,%llu,%s,%u,%.3f,%.3f,%.3f\n",
                      r.qubits,
                      static_cast<unsigned long long>(r.data_size_bytes),
                      r.strategy.c_str(), r.workers, r.wall_ms,
                      r.blocks_read_per_gate, r.speedup_vs_1_worker);
        out += buf;
    }
    return out;
}

DenseState read_full_state(const BlockStore &store, Metrics &m) {
    DenseState state;
    state.n_qubits = store.n_qubits();
    state.amps.resize(store.n_amps());
    BlockBuffer buf;
    for (std::uint64_t b = 0; b < store.n_blocks(); ++b) {
        store.read_block_into(b, buf, m);
        std::copy(buf.amps.begin(), buf.amps.end(),
                  state.amps.data() + b * store.block_amps());
    }
    return state;
}

void write_full_state(BlockStore &store, const DenseState &state, Metrics &m) {
    if (state.n_qubits != store.n_qubits() ||
        state.amps.size() != store.n_amps()) {
        throw ValidationError("state shape does not match the store");
    }
    BlockBuffer buf;
    buf.amps.resize(store.block_amps());
    for (std::uint64_t b = 0; b < store.n_blocks(); ++b) {
        buf.block_id = b;
        const amp_t *src = state.amps.data() + b * store.block_amps();
        std::copy(src, src + store.block_amps(), buf.amps.begin());
        store.write_block(buf, m);
    }
}

std::vector<AmplitudeEntry> top_amplitudes(const BlockStore &store,
                                           std::size_t k, Metrics &m) {
    std::vector<AmplitudeEntry> heap;
    if (k == 0) {
        return heap;
    }
    const auto better = [](const AmplitudeEntry &a, const AmplitudeEntry &b) {
        const double ma = std::norm(a.value);
        const double mb = std::norm(b.value);
        if (ma != mb) {
            return ma > mb;
        }
        return a.index < b.index;
    };
    // Heap under `better`-as-less keeps the worst retained entry on top.
    BlockBuffer buf;
    for (std::uint64_t b = 0; b < store.n_blocks(); ++b) {
        store.read_block_into(b, buf, m);
        const std::uint64_t base = b * store.block_amps();
        for (std::size_t j = 0; j < buf.amps.size(); ++j) {
            const AmplitudeEntry cand{base + j, buf.amps[j]};
            if (heap.size() < k) {
                heap.push_back(cand);
                std::push_heap(heap.begin(), heap.end(), better);
            } else if (better(cand, heap.front())) {
                std::pop_heap(heap.begin(), heap.end(), better);
                heap.back() = cand;
                std::push_heap(heap.begin(), heap.end(), better);
            }
        }
    }
    std::sort(heap.begin(), heap.end(), better);
    return heap;
}

} // namespace qvsim
