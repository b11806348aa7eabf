#include "qvsim/circuit_io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "qvsim/error.hpp"
#include "qvsim/gates.hpp"

namespace qvsim {

namespace {

std::vector<std::string> tokenize(std::string_view line) {
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) {
        line = line.substr(0, hash);
    }
    std::vector<std::string> out;
    std::istringstream in{std::string(line)};
    std::string tok;
    while (in >> tok) {
        out.push_back(tok);
    }
    return out;
}

std::uint32_t parse_qubit(const std::string &tok, std::size_t line_no) {
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
        v = std::stoul(tok, &pos);
    } catch (const std::exception &) {
        throw ParseError(line_no, "expected a qubit index, got '" + tok + "'");
    }
    if (pos != tok.size() || tok[0] == '-') {
        throw ParseError(line_no, "expected a qubit index, got '" + tok + "'");
    }
    return static_cast<std::uint32_t>(v);
}

double parse_real(const std::string &tok, std::size_t line_no) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception &) {
        throw ParseError(line_no, "expected a number, got '" + tok + "'");
    }
    if (pos != tok.size()) {
        throw ParseError(line_no, "expected a number, got '" + tok + "'");
    }
    if (!std::isfinite(v)) {
        throw ParseError(line_no, "number must be finite, got '" + tok + "'");
    }
    return v;
}

std::string fmt_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

Circuit parse_circuit(std::string_view text,
                      std::optional<std::uint32_t> n_override, bool strict) {
    std::optional<std::uint32_t> declared;
    struct PendingOp {
        GateOp op;
        std::size_t line_no;
    };
    std::vector<PendingOp> ops;

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        std::string_view line =
            text.substr(start, end == std::string_view::npos ? std::string_view::npos
                                                             : end - start);
        start = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;

        const auto toks = tokenize(line);
        if (toks.empty()) {
            continue;
        }
        const std::string &mnemonic = toks[0];

        if (mnemonic == "qubits") {
            if (!ops.empty() || declared) {
                throw ParseError(line_no,
                                 "'qubits' directive must appear once, before "
                                 "any instruction");
            }
            if (toks.size() != 2) {
                throw ParseError(line_no, "'qubits' takes one argument");
            }
            const std::uint32_t n = parse_qubit(toks[1], line_no);
            if (n == 0) {
                throw ParseError(line_no, "qubit count must be positive");
            }
            declared = n;
            continue;
        }

        if (mnemonic == "cx" || mnemonic == "cz") {
            if (toks.size() != 3) {
                throw ParseError(line_no, "'" + mnemonic +
                                              "' takes <control> <target>");
            }
            const std::uint32_t control = parse_qubit(toks[1], line_no);
            const std::uint32_t target = parse_qubit(toks[2], line_no);
            if (control == target) {
                throw ParseError(line_no, "control equals target (" +
                                              std::to_string(target) + ")");
            }
            ops.push_back({controlled_op(mnemonic, control, target), line_no});
            continue;
        }

        const auto arity = gate_arity(mnemonic);
        if (!arity) {
            throw ParseError(line_no, "unknown instruction '" + mnemonic + "'");
        }
        if (toks.size() != 2 + *arity) {
            throw ParseError(line_no, "'" + mnemonic + "' takes <qubit>" +
                                          (*arity == 1 ? " <theta>"
                                           : *arity == 8
                                               ? " <8 matrix entries>"
                                               : "") +
                                          ", got " +
                                          std::to_string(toks.size() - 1) +
                                          " argument(s)");
        }
        const std::uint32_t target = parse_qubit(toks[1], line_no);
        std::vector<double> params;
        params.reserve(*arity);
        for (std::size_t i = 0; i < *arity; ++i) {
            params.push_back(parse_real(toks[2 + i], line_no));
        }
        GateOp op;
        try {
            op = single_op(mnemonic, target, std::move(params));
        } catch (const ValidationError &e) {
            throw ParseError(line_no, e.what());
        }
        if (mnemonic == "u" && strict) {
            // Re-check at the strict tolerance.
            try {
                make_gate("u", op.params, true);
            } catch (const ValidationError &e) {
                throw ParseError(line_no, e.what());
            }
        }
        ops.push_back({std::move(op), line_no});
    }

    if (declared && n_override && *declared != *n_override) {
        throw ParseError(1, "declared qubit count " + std::to_string(*declared) +
                                " conflicts with requested " +
                                std::to_string(*n_override));
    }
    const std::optional<std::uint32_t> n = declared ? declared : n_override;
    if (!n) {
        throw ParseError(1, "qubit count unspecified: add a 'qubits <n>' "
                            "directive or pass one explicitly");
    }

    Circuit circuit;
    circuit.n_qubits = *n;
    circuit.ops.reserve(ops.size());
    for (auto &pending : ops) {
        circuit.ops.push_back(std::move(pending.op));
    }
    const auto violations = validate_circuit(circuit);
    if (!violations.empty()) {
        const Violation &v = violations.front();
        throw ParseError(ops[v.op_index].line_no, v.message);
    }
    return circuit;
}

std::string serialize_circuit(const Circuit &c) {
    std::string out = "qubits " + std::to_string(c.n_qubits) + "\n";
    for (const GateOp &op : c.ops) {
        if (op.kind == OpKind::controlled) {
            out += op.name + " " + std::to_string(*op.control) + " " +
                   std::to_string(op.target) + "\n";
            continue;
        }
        out += op.name + " " + std::to_string(op.target);
        for (double p : op.params) {
            out += " " + fmt_real(p);
        }
        out += "\n";
    }
    return out;
}

} // namespace qvsim
