#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "test_util.hpp"

using qvsim_test::ScratchDir;

namespace {

struct CliResult {
    int status = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::filesystem::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
}

/// Run the installed binary with shell-ready arguments, capturing both
/// streams. Scratch paths contain no shell metacharacters.
CliResult run_cli(const ScratchDir &dir, const std::string &args) {
    const std::string out_path = dir.file("cli.out").string();
    const std::string err_path = dir.file("cli.err").string();
    const std::string cmd = std::string(QVSIM_CLI_PATH) + " " + args + " >" +
                            out_path + " 2>" + err_path;
    const int raw = std::system(cmd.c_str());
    CliResult r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    return r;
}

bool contains(const std::string &haystack, const std::string &needle) {
    return haystack.find(needle) != std::string::npos;
}

/// Value after `key ` on the first line containing the key.
double number_after(const std::string &text, const std::string &key) {
    const auto at = text.find(key);
    REQUIRE(at != std::string::npos);
    return std::stod(text.substr(at + key.size()));
}

} // namespace

TEST_CASE("run builds a Bell state and reports it") {
    ScratchDir dir("cli-bell");
    spit(dir.file("bell.qc"), "qubits 2\nh 0\ncx 0 1\n");
    const CliResult r = run_cli(
        dir, "run --circuit " + dir.file("bell.qc").string() + " --state " +
                 dir.file("bell.qvs").string() + " --metrics " +
                 dir.file("m.json").string());
    CAPTURE(r.err);
    REQUIRE(r.status == 0);
    CHECK(std::abs(number_after(r.out, "norm ") - 1.0) < 1e-12);
    CHECK(contains(r.out, "|00>"));
    CHECK(contains(r.out, "|11>"));
    CHECK(contains(r.out, "index 0"));
    CHECK(contains(r.out, "index 3"));
    CHECK(contains(r.out, "0.7071067811865")); // both surviving amplitudes
    CHECK(contains(r.out, "p=0.500000"));
    // Largest magnitudes first: the dead basis states trail the live ones.
    CHECK(r.out.find("|11>") < r.out.find("|01>"));

    const auto doc = nlohmann::json::parse(slurp(dir.file("m.json")));
    const std::set<std::string> expect = {
        "n_qubits",    "strategy",   "workers",          "gates_applied",
        "traversals",  "blocks_read", "blocks_written",  "bytes_read",
        "bytes_written", "cache_hits", "cache_misses",
        "peak_cache_bytes", "wall_ms"};
    std::set<std::string> got;
    for (const auto &item : doc.items()) {
        got.insert(item.key());
    }
    CHECK(got == expect);
    CHECK(doc["n_qubits"] == 2);
    CHECK(doc["strategy"] == "paired-cached");
    CHECK(doc["workers"] == 1);
    CHECK(doc["gates_applied"] == 2);
    CHECK(doc["traversals"] == 2);
    // One 4-amplitude block: read and written once per gate.
    CHECK(doc["blocks_read"] == 2);
    CHECK(doc["blocks_written"] == 2);
    CHECK(doc["bytes_read"] == 128);
    CHECK(doc["bytes_written"] == 128);
    CHECK(doc["peak_cache_bytes"] == 64);
    CHECK(doc["wall_ms"].is_number());
}

TEST_CASE("run streams large states in block-sized pieces") {
    ScratchDir dir("cli-large");
    spit(dir.file("one.qc"), "h 19\n");
    const CliResult r = run_cli(
        dir, "run --circuit " + dir.file("one.qc").string() + " --qubits 20" +
                 " --state " + dir.file("s20.qvs").string() + " --metrics " +
                 dir.file("m.json").string());
    CAPTURE(r.err);
    REQUIRE(r.status == 0);
    const auto doc = nlohmann::json::parse(slurp(dir.file("m.json")));
    // 2^20 amplitudes over 65536-amplitude blocks: 16 blocks, one pass.
    CHECK(doc["traversals"] == 1);
    CHECK(doc["blocks_read"] == 16);
    CHECK(doc["blocks_written"] == 16);
}

TEST_CASE("runs accumulate on an existing store") {
    ScratchDir dir("cli-accumulate");
    spit(dir.file("c.qc"), "qubits 3\nh 0\nh 1\nh 2\n");
    const std::string base = "run --circuit " + dir.file("c.qc").string() +
                             " --state " + dir.file("s.qvs").string();
    REQUIRE(run_cli(dir, base).status == 0);
    const CliResult second = run_cli(dir, base);
    REQUIRE(second.status == 0);
    // H twice is the identity; the state is back to |000>.
    CHECK(std::abs(number_after(second.out, "norm ") - 1.0) < 1e-12);
    CHECK(contains(second.out, "|000>"));
    CHECK(contains(second.out, "p=1.000000"));
}

TEST_CASE("run leaves a metrics document even when the engine refuses") {
    ScratchDir dir("cli-refused");
    spit(dir.file("c.qc"), "qubits 20\nh 0\n");
    const CliResult r = run_cli(
        dir, "run --circuit " + dir.file("c.qc").string() + " --state " +
                 dir.file("s.qvs").string() + " --strategy dense --metrics " +
                 dir.file("m.json").string());
    CHECK(r.status == 1);
    CHECK(contains(r.err, "error:"));
    const auto doc = nlohmann::json::parse(slurp(dir.file("m.json")));
    CHECK(doc["strategy"] == "dense");
    CHECK(doc["gates_applied"] == 0);
}

TEST_CASE("parse failures name the offending line") {
    ScratchDir dir("cli-parse");
    spit(dir.file("bad.qc"), "qubits 2\nh 0\nwoble 1\n");
    const CliResult r = run_cli(dir, "run --circuit " +
                                         dir.file("bad.qc").string() +
                                         " --state " +
                                         dir.file("s.qvs").string());
    CHECK(r.status == 1);
    CHECK(contains(r.err, "line 3"));
}

TEST_CASE("unknown strategies are rejected by name") {
    ScratchDir dir("cli-strategy");
    spit(dir.file("c.qc"), "qubits 1\nh 0\n");
    const CliResult r = run_cli(dir, "run --circuit " +
                                         dir.file("c.qc").string() +
                                         " --state " +
                                         dir.file("s.qvs").string() +
                                         " --strategy turbo");
    CHECK(r.status == 1);
    CHECK(contains(r.err, "unknown strategy 'turbo'"));
}

TEST_CASE("missing required flags fail before any work") {
    ScratchDir dir("cli-required");
    const CliResult r = run_cli(dir, "run --circuit nowhere.qc");
    CHECK(r.status != 0);
    CHECK(contains(r.err, "--state"));
}

TEST_CASE("verify reports a passing sweep") {
    ScratchDir dir("cli-verify");
    const CliResult r =
        run_cli(dir, "verify --qubits 4 --trials 5 --depth 8 --seed 7 "
                     "--scratch-dir " +
                         dir.path().string());
    CAPTURE(r.err);
    REQUIRE(r.status == 0);
    CHECK(contains(r.out, "verify: trials=5"));
    CHECK(contains(r.out, "tolerance=1e-12"));
    CHECK(contains(r.out, "PASS"));
    CHECK_FALSE(contains(r.out, "FAIL"));
}

TEST_CASE("stats summarizes a store without touching it") {
    ScratchDir dir("cli-stats");
    spit(dir.file("bell.qc"), "qubits 2\nh 0\ncx 0 1\n");
    REQUIRE(run_cli(dir, "run --circuit " + dir.file("bell.qc").string() +
                             " --state " + dir.file("bell.qvs").string())
                .status == 0);
    const CliResult r = run_cli(
        dir, "stats --state " + dir.file("bell.qvs").string() + " --top 2");
    CAPTURE(r.err);
    REQUIRE(r.status == 0);
    CHECK(contains(r.out, "n_qubits     2"));
    CHECK(contains(r.out, "amplitudes   4"));
    CHECK(contains(r.out, "blocks       1"));
    CHECK(contains(r.out, "data bytes   64"));
    CHECK(std::abs(number_after(r.out, "norm") - 1.0) < 1e-12);
    CHECK(contains(r.out, "top 2 amplitudes:"));
    CHECK(contains(r.out, "|00>"));
    CHECK(contains(r.out, "|11>"));
}

TEST_CASE("bench emits the CSV schema plus derived ratios") {
    ScratchDir dir("cli-bench");
    const CliResult r = run_cli(
        dir, "bench --min-qubits 4 --max-qubits 5 --strategies paired-cached "
             "--block-amps 4 --report " +
                 dir.file("r.csv").string() + " --scratch-dir " +
                 dir.path().string());
    CAPTURE(r.err);
    REQUIRE(r.status == 0);
    const std::string header = "qubits,data_size_bytes,strategy,workers,"
                               "wall_ms,blocks_read_per_gate,"
                               "speedup_vs_1_worker";
    CHECK(r.out.rfind(header + "\n", 0) == 0); // stdout starts with the schema
    CHECK(contains(r.out, "\n4,256,paired-cached,1,"));
    CHECK(contains(r.out, "\n5,512,paired-cached,1,"));
    // Every gate of the fixture reads each of the 4 blocks once.
    CHECK(contains(r.out, ",4.000,"));
    CHECK(contains(r.out, "# growth paired-cached workers=1 n=4->5:"));

    const std::string csv = slurp(dir.file("r.csv"));
    CHECK(csv.rfind(header + "\n", 0) == 0);
    CHECK(contains(csv, "\n4,256,paired-cached,1,"));
    CHECK_FALSE(contains(csv, "#")); // comments stay on stdout
}

TEST_CASE("bench rejects unknown strategy names") {
    ScratchDir dir("cli-bench-bad");
    const CliResult r = run_cli(dir, "bench --min-qubits 3 --max-qubits 3 "
                                     "--strategies warp");
    CHECK(r.status == 1);
    CHECK(contains(r.err, "unknown strategy 'warp'"));
}
