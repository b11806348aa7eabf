#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "qvsim/dense.hpp"
#include "qvsim/metrics.hpp"
#include "qvsim/parallel.hpp"
#include "qvsim/store.hpp"
#include "qvsim/types.hpp"

namespace qvsim {

/// Execution engines, from the in-memory baseline to the bounded-memory
/// streaming variants.
enum class Strategy {
    /// Expand every gate to its full 2^n x 2^n matrix and multiply. Baseline
    /// and oracle; O(4^n) work, refuses n above the oracle limit.
    dense,
    /// One streaming pass per gate with an unbounded window (the whole state
    /// may become resident). Isolates the pairing logic from cache bounds.
    paired,
    /// One streaming pass per gate through a window bounded by cache_bytes.
    paired_cached,
    /// paired_cached with the unit list split across worker threads, each
    /// owning a private window of cache_bytes / workers.
    paired_cached_parallel,
};

/// "dense", "paired", "paired-cached", "paired-cached-parallel".
const char *strategy_tag(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view tag);
const std::vector<std::string> &strategy_tags();

struct RunConfig {
    Strategy strategy = Strategy::paired_cached;
    /// Total in-memory budget M; split evenly across workers when parallel.
    std::uint64_t cache_bytes = 64ull << 20;
    /// Worker threads; meaningful only for paired_cached_parallel.
    std::uint32_t workers = 1;
    std::uint32_t oracle_limit = kDefaultOracleLimit;
    /// Test instrumentation, forwarded to the parallel runner.
    ExecHooks hooks;
};

/// Apply the circuit to the store in place with the chosen engine. Counters
/// accumulate into `metrics` as the run progresses (so a failed run leaves
/// honest partial counts); wall_ms records the elapsed time of this call,
/// replacing any per-worker sums merged along the way. Returns per-worker
/// reports for the parallel strategy, empty otherwise.
std::vector<WorkerReport> apply_circuit(BlockStore &store,
                                        const Circuit &circuit,
                                        const RunConfig &config,
                                        Metrics &metrics);

/// Uniformly random circuit over the full gate library: each op picks a
/// uniform gate (controlled gates only when n >= 2), uniform target (and
/// distinct control), rotation angles uniform in [0, 2pi), and custom
/// matrices from a uniformly sampled unitary parametrization. The generator
/// and the value mapping are both fixed here, so an (n, depth, seed) triple
/// names the same circuit on every platform and standard library.
Circuit random_circuit(std::uint32_t n_qubits, std::uint32_t depth,
                       std::uint64_t seed);
Circuit random_circuit(std::mt19937_64 &rng, std::uint32_t n_qubits,
                       std::uint32_t depth);

/// Fixed benchmark circuit: one Hadamard per qubit, ascending target. Covers
/// every stride class from fully intra-block to fully cross-block.
Circuit make_benchmark_circuit(std::uint32_t n_qubits);

/// Unbiased integer in [0, bound) and double in [0, 1) from the raw 64-bit
/// stream. Fixed mappings, unlike the standard distributions, so frozen test
/// vectors stay valid across standard libraries.
std::uint64_t uniform_below(std::mt19937_64 &rng, std::uint64_t bound);
double uniform_unit(std::mt19937_64 &rng);

struct VerifyOptions {
    std::uint32_t min_qubits = 1;
    std::uint32_t max_qubits = 10;
    /// Per-trial depth is uniform in [1, max_depth].
    std::uint32_t max_depth = 30;
    std::uint64_t trials = 200;
    std::uint64_t seed = 1;
    /// Each entry is capped at 2^n for the trial's n.
    std::vector<std::uint64_t> block_amps = {1, 4, kDefaultBlockAmps};
    /// 1 runs the serial cached engine, >1 the parallel one.
    std::vector<std::uint32_t> workers = {1, 2, 4};
    double tolerance = 1e-12;
    /// Directory for scratch stores; empty means the system temp dir.
    std::filesystem::path scratch_dir;
};

struct VerifyFailure {
    std::uint64_t trial = 0;
    std::uint32_t n_qubits = 0;
    std::uint32_t depth = 0;
    std::uint64_t block_amps = 0;
    std::uint32_t workers = 0;
    double deviation = 0.0;
    /// First op whose post-state already exceeded the tolerance.
    std::optional<std::size_t> first_divergent_gate;
};

struct VerifyResult {
    std::uint64_t trials = 0;
    /// Streamed runs compared against the oracle (trials x configurations).
    std::uint64_t comparisons = 0;
    double max_deviation = 0.0;
    std::vector<VerifyFailure> failures;

    bool passed() const noexcept { return failures.empty(); }
};

/// Random circuits through the dense oracle and every streamed configuration
/// in the options' block_amps x workers grid; records the worst amplitude
/// deviation and pinpoints the first divergent gate of any failing run.
VerifyResult verify_equivalence(const VerifyOptions &opts);

struct Divergence {
    std::size_t op_index = 0;
    double deviation = 0.0;
};

/// Step the dense reference and one streamed configuration through their op
/// lists together, comparing after every op. Returns the first op whose
/// post-states differ by more than the tolerance. `streamed` normally is
/// `reference`; passing a tampered copy exercises the reporting path.
std::optional<Divergence>
locate_divergence(const Circuit &reference, const Circuit &streamed,
                  std::uint64_t block_amps, std::uint32_t workers,
                  std::uint64_t cache_bytes,
                  const std::filesystem::path &state_path, double tolerance);

struct BenchOptions {
    std::uint32_t min_qubits = 16;
    std::uint32_t max_qubits = 20;
    std::vector<Strategy> strategies = {Strategy::paired_cached};
    /// Applied to the parallel strategy only; others always run one worker.
    std::vector<std::uint32_t> workers = {1};
    std::uint64_t block_amps = kDefaultBlockAmps; // capped at 2^n per size
    std::uint64_t cache_bytes = 64ull << 20;
    std::uint32_t oracle_limit = kDefaultOracleLimit;
    /// Wall time reported is the minimum over this many runs.
    std::uint32_t repeats = 1;
    /// Directory for scratch stores; empty means the system temp dir.
    std::filesystem::path scratch_dir;
};

struct BenchRow {
    std::uint32_t qubits = 0;
    std::uint64_t data_size_bytes = 0;
    std::string strategy;
    std::uint32_t workers = 0;
    double wall_ms = 0.0;
    double blocks_read_per_gate = 0.0;
    /// wall_ms of the same strategy and size at one worker over this row's;
    /// 1.0 for one-worker rows, 0.0 when no baseline row exists.
    double speedup_vs_1_worker = 0.0;
};

/// Benchmark every size x strategy x workers cell on the fixed circuit.
/// Dense cells above the oracle limit are skipped.
std::vector<BenchRow> run_bench(const BenchOptions &opts);

/// Comma-separated table with a header row:
/// qubits,data_size_bytes,strategy,workers,wall_ms,blocks_read_per_gate,
/// speedup_vs_1_worker.
std::string bench_csv(const std::vector<BenchRow> &rows);

/// Whole store into memory (2^n amplitudes; the caller judges the size) and
/// back. Both stream block by block and count I/O into `m`.
DenseState read_full_state(const BlockStore &store, Metrics &m);
void write_full_state(BlockStore &store, const DenseState &state, Metrics &m);

struct AmplitudeEntry {
    std::uint64_t index = 0;
    amp_t value;
};

/// The k largest-magnitude amplitudes, streaming the store once. Ordered by
/// descending magnitude, ties by ascending index.
std::vector<AmplitudeEntry> top_amplitudes(const BlockStore &store,
                                           std::size_t k, Metrics &m);

} // namespace qvsim
