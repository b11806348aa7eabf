#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qvsim/circuit_io.hpp"
#include "qvsim/dense.hpp"
#include "qvsim/engine.hpp"
#include "qvsim/error.hpp"
#include "qvsim/store.hpp"

namespace py = pybind11;
using namespace qvsim;

namespace {

py::dict metrics_dict(const Metrics &m, std::uint32_t n_qubits) {
    const nlohmann::json j = to_json(m, n_qubits);
    py::dict d;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto &v = it.value();
        if (v.is_string()) {
            d[py::str(it.key())] = v.get<std::string>();
        } else if (v.is_number_float()) {
            d[py::str(it.key())] = v.get<double>();
        } else {
            d[py::str(it.key())] = v.get<std::uint64_t>();
        }
    }
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Out-of-core quantum state-vector simulator";

    py::register_exception<Error>(m, "QvsimError");

    py::class_<Circuit>(m, "Circuit", "Ordered gate list on n qubits")
        .def_property_readonly(
            "n_qubits", [](const Circuit &c) { return c.n_qubits; })
        .def("__len__", [](const Circuit &c) { return c.ops.size(); })
        .def("to_text", &serialize_circuit,
             "Circuit text that parse_circuit round-trips exactly")
        .def("__repr__", [](const Circuit &c) {
            return "<Circuit n_qubits=" + std::to_string(c.n_qubits) +
                   " ops=" + std::to_string(c.ops.size()) + ">";
        });

    m.def(
        "parse_circuit",
        [](const std::string &text, std::optional<std::uint32_t> qubits,
           bool strict) { return parse_circuit(text, qubits, strict); },
        py::arg("text"), py::arg("qubits") = std::nullopt,
        py::arg("strict") = false,
        "Parse circuit text; `qubits` overrides/checks the file's directive");
    m.def("serialize_circuit", &serialize_circuit, py::arg("circuit"));
    m.def(
        "random_circuit",
        [](std::uint32_t n_qubits, std::uint32_t depth, std::uint64_t seed) {
            return random_circuit(n_qubits, depth, seed);
        },
        py::arg("n_qubits"), py::arg("depth"), py::arg("seed"),
        "Deterministic uniformly random circuit over the full gate library");
    m.def("make_benchmark_circuit", &make_benchmark_circuit,
          py::arg("n_qubits"), "One Hadamard per qubit");

    py::class_<BlockStore>(m, "StateStore",
                           "Disk-backed state vector, read in blocks")
        .def_static(
            "create",
            [](const std::string &path, std::uint32_t n_qubits,
               std::uint64_t block_amps, bool overwrite) {
                const std::uint64_t ba = std::min(
                    block_amps, std::uint64_t{1} << n_qubits);
                return BlockStore::create(path, n_qubits, ba, overwrite);
            },
            py::arg("path"), py::arg("n_qubits"),
            py::arg("block_amps") = kDefaultBlockAmps,
            py::arg("overwrite") = false,
            "New store holding |0...0>; block_amps is capped at 2^n")
        .def_static(
            "open",
            [](const std::string &path) { return BlockStore::open(path); },
            py::arg("path"))
        .def_property_readonly("n_qubits", &BlockStore::n_qubits)
        .def_property_readonly("n_amps", &BlockStore::n_amps)
        .def_property_readonly("block_amps", &BlockStore::block_amps)
        .def_property_readonly("n_blocks", &BlockStore::n_blocks)
        .def_property_readonly(
            "path", [](const BlockStore &s) { return s.path().string(); })
        .def("norm",
             [](const BlockStore &s) {
                 Metrics m_;
                 return s.norm(m_);
             })
        .def(
            "amplitude",
            [](const BlockStore &s, std::uint64_t index) {
                Metrics m_;
                return s.read_amplitude(index, m_);
            },
            py::arg("index"))
        .def(
            "read_state",
            [](const BlockStore &s) {
                Metrics m_;
                return read_full_state(s, m_).amps;
            },
            "All 2^n amplitudes as a list; sized for small n");

    m.def(
        "apply_circuit",
        [](BlockStore &store, const Circuit &circuit,
           const std::string &strategy, std::uint64_t cache_bytes,
           std::uint32_t workers) {
            const auto s = parse_strategy(strategy);
            if (!s) {
                throw ValidationError("unknown strategy '" + strategy + "'");
            }
            RunConfig cfg;
            cfg.strategy = *s;
            cfg.cache_bytes = cache_bytes;
            cfg.workers = workers;
            Metrics metrics;
            apply_circuit(store, circuit, cfg, metrics);
            return metrics_dict(metrics, store.n_qubits());
        },
        py::arg("store"), py::arg("circuit"),
        py::arg("strategy") = "paired-cached",
        py::arg("cache_bytes") = std::uint64_t{64} << 20,
        py::arg("workers") = 1,
        "Apply the circuit in place; returns the run's metrics document");

    m.def(
        "simulate_dense",
        [](const Circuit &circuit) { return simulate_dense(circuit).amps; },
        py::arg("circuit"),
        "Oracle run from |0...0>: full matrix expansion, in memory");

    m.def(
        "top_amplitudes",
        [](const BlockStore &store, std::size_t k) {
            Metrics m_;
            std::vector<std::pair<std::uint64_t, amp_t>> out;
            for (const AmplitudeEntry &e : top_amplitudes(store, k, m_)) {
                out.emplace_back(e.index, e.value);
            }
            return out;
        },
        py::arg("store"), py::arg("k") = 8,
        "(index, amplitude) pairs, largest magnitude first");

    m.def(
        "verify_equivalence",
        [](std::uint32_t max_qubits, std::uint64_t trials,
           std::uint32_t max_depth, std::uint64_t seed,
           const std::string &scratch_dir) {
            VerifyOptions opts;
            opts.max_qubits = max_qubits;
            opts.trials = trials;
            opts.max_depth = max_depth;
            opts.seed = seed;
            if (!scratch_dir.empty()) {
                opts.scratch_dir = scratch_dir;
            }
            const VerifyResult r = verify_equivalence(opts);
            py::dict d;
            d["trials"] = r.trials;
            d["comparisons"] = r.comparisons;
            d["max_deviation"] = r.max_deviation;
            d["failures"] = r.failures.size();
            d["passed"] = r.passed();
            return d;
        },
        py::arg("max_qubits") = 10, py::arg("trials") = 200,
        py::arg("max_depth") = 30, py::arg("seed") = 1,
        py::arg("scratch_dir") = "",
        "Random circuits through the oracle and the streamed engines");

    m.attr("DEFAULT_BLOCK_AMPS") = kDefaultBlockAmps;
}
