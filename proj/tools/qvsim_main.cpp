#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qvsim/circuit_io.hpp"
#include "qvsim/engine.hpp"
#include "qvsim/error.hpp"
#include "qvsim/metrics.hpp"
#include "qvsim/store.hpp"

namespace fs = std::filesystem;
using namespace qvsim;

namespace {

std::string read_text_file(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const fs::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << text;
    if (!out) {
        throw IoError("write to " + path.string() + " failed");
    }
}

std::string binary_index(std::uint64_t index, std::uint32_t n_qubits) {
    std::string bits(n_qubits, '0');
    for (std::uint32_t b = 0; b < n_qubits; ++b) {
        if (index >> (n_qubits - 1 - b) & 1) {
            bits[b] = '1';
        }
    }
    return bits;
}

void print_amplitudes(const BlockStore &store,
                      const std::vector<AmplitudeEntry> &entries) {
    for (const AmplitudeEntry &e : entries) {
        std::printf("  |%s>  index %llu  %.17g %+.17gi  p=%.6f\n",
                    binary_index(e.index, store.n_qubits()).c_str(),
                    static_cast<unsigned long long>(e.index), e.value.real(),
                    e.value.imag(), std::norm(e.value));
    }
}

struct RunArgs {
    std::string circuit_path;
    std::uint32_t qubits = 0; // 0 = take the count from the circuit file
    std::string state_path;
    std::uint64_t block_amps = kDefaultBlockAmps;
    std::uint64_t cache_bytes = 64ull << 20;
    std::uint32_t workers = 1;
    std::string strategy = "paired-cached";
    std::string metrics_path;
    bool strict = false;
};

int cmd_run(const RunArgs &a) {
    const std::string text = read_text_file(a.circuit_path);
    std::optional<std::uint32_t> n_override;
    if (a.qubits > 0) {
        n_override = a.qubits;
    }
    const Circuit circuit = parse_circuit(text, n_override, a.strict);

    const auto strategy = parse_strategy(a.strategy);
    if (!strategy) {
        throw ValidationError("unknown strategy '" + a.strategy + "'");
    }

    BlockStore store = [&] {
        if (fs::exists(a.state_path)) {
            return BlockStore::open(a.state_path);
        }
        const std::uint64_t ba =
            std::min(a.block_amps, std::uint64_t{1} << circuit.n_qubits);
        return BlockStore::create(a.state_path, circuit.n_qubits, ba);
    }();

    Metrics metrics;
    int rc = 0;
    try {
        RunConfig cfg;
        cfg.strategy = *strategy;
        cfg.cache_bytes = a.cache_bytes;
        cfg.workers = a.workers;
        apply_circuit(store, circuit, cfg, metrics);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        rc = 1;
    }
    // The document reflects the run, successful or not; whatever counters
    // accumulated before a failure are flushed as they stand.
    if (!a.metrics_path.empty()) {
        write_text_file(a.metrics_path,
                        to_json(metrics, store.n_qubits()).dump(2) + "\n");
    }
    if (rc != 0) {
        return rc;
    }

    Metrics diag; // diagnostics below stay out of the run's document
    std::printf("norm %.17g\n", store.norm(diag));
    std::printf("top amplitudes:\n");
    print_amplitudes(store, top_amplitudes(store, 8, diag));
    return 0;
}

struct VerifyArgs {
    std::uint32_t qubits = 10;
    std::uint64_t trials = 200;
    std::uint32_t depth = 30;
    std::uint64_t seed = 1;
    std::string scratch_dir;
};

int cmd_verify(const VerifyArgs &a) {
    VerifyOptions opts;
    opts.min_qubits = 1;
    opts.max_qubits = a.qubits;
    opts.max_depth = a.depth;
    opts.trials = a.trials;
    opts.seed = a.seed;
    opts.scratch_dir = a.scratch_dir;
    const VerifyResult result = verify_equivalence(opts);

    for (const VerifyFailure &f : result.failures) {
        std::printf("FAIL trial=%llu n=%u depth=%u block_amps=%llu workers=%u "
                    "deviation=%.3e",
                    static_cast<unsigned long long>(f.trial), f.n_qubits,
                    f.depth, static_cast<unsigned long long>(f.block_amps),
                    f.workers, f.deviation);
        if (f.first_divergent_gate) {
            std::printf(" first_divergent_gate=%zu", *f.first_divergent_gate);
        }
        std::printf("\n");
    }
    std::printf("verify: trials=%llu comparisons=%llu max_deviation=%.3e "
                "tolerance=%.0e\n",
                static_cast<unsigned long long>(result.trials),
                static_cast<unsigned long long>(result.comparisons),
                result.max_deviation, opts.tolerance);
    std::printf("%s\n", result.passed() ? "PASS" : "FAIL");
    return result.passed() ? 0 : 1;
}

struct BenchArgs {
    std::uint32_t min_qubits = 16;
    std::uint32_t max_qubits = 20;
    std::vector<std::string> strategies = {"paired-cached"};
    std::vector<std::uint32_t> workers = {1, 2};
    std::string report_path;
    std::uint64_t block_amps = kDefaultBlockAmps;
    std::uint64_t cache_bytes = 64ull << 20;
    std::uint32_t repeats = 1;
    std::string scratch_dir;
};

int cmd_bench(const BenchArgs &a) {
    BenchOptions opts;
    opts.min_qubits = a.min_qubits;
    opts.max_qubits = a.max_qubits;
    opts.strategies.clear();
    for (const std::string &tag : a.strategies) {
        const auto s = parse_strategy(tag);
        if (!s) {
            throw ValidationError("unknown strategy '" + tag + "'");
        }
        opts.strategies.push_back(*s);
    }
    opts.workers = a.workers;
    opts.block_amps = a.block_amps;
    opts.cache_bytes = a.cache_bytes;
    opts.repeats = a.repeats;
    opts.scratch_dir = a.scratch_dir;

    const std::vector<BenchRow> rows = run_bench(opts);
    const std::string csv = bench_csv(rows);
    if (!a.report_path.empty()) {
        write_text_file(a.report_path, csv);
    }
    std::fputs(csv.c_str(), stdout);

    // Derived ratios, as '#' comment lines so stdout stays a loadable table.
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const BenchRow &prev = rows[i - 1];
        const BenchRow &cur = rows[i];
        if (cur.strategy == prev.strategy && cur.workers == prev.workers &&
            cur.qubits == prev.qubits + 1 && prev.wall_ms > 0.0) {
            std::printf("# growth %s workers=%u n=%u->%u: %.3f\n",
                        cur.strategy.c_str(), cur.workers, prev.qubits,
                        cur.qubits, cur.wall_ms / prev.wall_ms);
        }
    }
    for (const BenchRow &row : rows) {
        if (row.workers > 1 && row.speedup_vs_1_worker > 0.0) {
            std::printf("# speedup %s n=%u workers=%u vs 1: %.3f\n",
                        row.strategy.c_str(), row.qubits, row.workers,
                        row.speedup_vs_1_worker);
        }
    }
    return 0;
}

struct StatsArgs {
    std::string state_path;
    std::size_t top = 8;
};

int cmd_stats(const StatsArgs &a) {
    const BlockStore store = BlockStore::open(a.state_path);
    std::printf("path         %s\n", store.path().c_str());
    std::printf("n_qubits     %u\n", store.n_qubits());
    std::printf("amplitudes   %llu\n",
                static_cast<unsigned long long>(store.n_amps()));
    std::printf("block_amps   %llu\n",
                static_cast<unsigned long long>(store.block_amps()));
    std::printf("blocks       %llu\n",
                static_cast<unsigned long long>(store.n_blocks()));
    std::printf("data bytes   %llu\n",
                static_cast<unsigned long long>(total_bytes(store.n_qubits())));
    Metrics m;
    std::printf("norm         %.17g\n", store.norm(m));
    std::printf("top %zu amplitudes:\n", a.top);
    print_amplitudes(store, top_amplitudes(store, a.top, m));
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Out-of-core quantum state-vector simulator"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto *run = app.add_subcommand("run", "Apply a circuit to a state store");
    run->add_option("--circuit", run_args.circuit_path, "Circuit text file")
        ->required();
    run->add_option("--qubits", run_args.qubits,
                    "Qubit count (otherwise taken from the circuit file)");
    run->add_option("--state", run_args.state_path,
                    "State store path (created as |0...0> if absent)")
        ->required();
    run->add_option("--block-amps", run_args.block_amps,
                    "Amplitudes per block for a newly created store");
    run->add_option("--cache-bytes", run_args.cache_bytes,
                    "In-memory cache budget in bytes");
    run->add_option("--workers", run_args.workers,
                    "Worker threads (paired-cached-parallel)");
    run->add_option("--strategy", run_args.strategy,
                    "dense | paired | paired-cached | paired-cached-parallel");
    run->add_option("--metrics", run_args.metrics_path,
                    "Write the run's metrics document (JSON) here");
    run->add_flag("--strict", run_args.strict,
                  "Tighten the unitarity tolerance for custom gates");

    VerifyArgs verify_args;
    auto *verify = app.add_subcommand(
        "verify", "Random circuits against the dense oracle");
    verify->add_option("--qubits", verify_args.qubits,
                       "Largest qubit count to draw");
    verify->add_option("--trials", verify_args.trials, "Number of circuits");
    verify->add_option("--depth", verify_args.depth, "Largest depth to draw");
    verify->add_option("--seed", verify_args.seed, "Base seed");
    verify->add_option("--scratch-dir", verify_args.scratch_dir,
                       "Directory for scratch stores (default: system temp)");

    BenchArgs bench_args;
    auto *bench =
        app.add_subcommand("bench", "Time strategies on a fixed circuit");
    bench->add_option("--min-qubits", bench_args.min_qubits, "Smallest size");
    bench->add_option("--max-qubits", bench_args.max_qubits, "Largest size");
    bench->add_option("--strategies", bench_args.strategies,
                      "Comma-separated strategy list")
        ->delimiter(',');
    bench->add_option("--workers", bench_args.workers,
                      "Comma-separated worker counts (parallel strategy)")
        ->delimiter(',');
    bench->add_option("--report", bench_args.report_path, "Write the CSV here");
    bench->add_option("--block-amps", bench_args.block_amps,
                      "Amplitudes per block");
    bench->add_option("--cache-bytes", bench_args.cache_bytes,
                      "In-memory cache budget in bytes");
    bench->add_option("--repeats", bench_args.repeats,
                      "Repetitions per cell; minimum wall time is reported");
    bench->add_option("--scratch-dir", bench_args.scratch_dir,
                      "Directory for scratch stores (default: system temp)");

    StatsArgs stats_args;
    auto *stats = app.add_subcommand("stats", "Inspect a state store");
    stats->add_option("--state", stats_args.state_path, "State store path")
        ->required();
    stats->add_option("--top", stats_args.top, "Amplitudes to list");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return cmd_run(run_args);
        }
        if (verify->parsed()) {
            return cmd_verify(verify_args);
        }
        if (bench->parsed()) {
            return cmd_bench(bench_args);
        }
        if (stats->parsed()) {
            return cmd_stats(stats_args);
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
