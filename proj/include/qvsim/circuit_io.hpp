#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "qvsim/types.hpp"

namespace qvsim {

/// Parse the line-oriented circuit text format.
///
/// Grammar: one instruction per line, fields split on whitespace, `#` starts
/// a comment, blank lines ignored. An optional `qubits <n>` directive may
/// appear before the first instruction. Instructions:
///   h|x|y|z|s|sdg|t|tdg <q>
///   rx|ry|rz <q> <theta-radians>
///   u <q> <re00> <im00> <re01> <im01> <re10> <im10> <re11> <im11>
///   cx <control> <target>
///   cz <control> <target>
/// Qubit 0 is the least-significant bit of the state index.
///
/// The qubit count comes from the directive, the override, or both (they must
/// agree). Ops are validated against it; any problem throws ParseError with
/// the 1-based line number.
Circuit parse_circuit(std::string_view text,
                      std::optional<std::uint32_t> n_override = {},
                      bool strict = false);

/// Inverse of parse_circuit: emits a `qubits` directive plus one line per op.
/// Angles and matrix entries are printed with 17 significant digits, so
/// parse(serialize(c)) == c exactly.
std::string serialize_circuit(const Circuit &c);

} // namespace qvsim
