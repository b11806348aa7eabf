#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qvsim/types.hpp"

namespace qvsim {

/// U†U = I tolerance for the built-in library.
inline constexpr double kBuiltinUnitaryTol = 1e-9;
/// Default tolerance for user-supplied matrices; strict mode tightens to the
/// built-in tolerance.
inline constexpr double kCustomUnitaryTol = 1e-6;

/// Parameter count of a known single-qubit gate name (0 for fixed gates,
/// 1 for rotations, 8 for a custom matrix), or nullopt if unknown.
std::optional<std::size_t> gate_arity(const std::string &name);

/// Names accepted by make_gate, in a fixed order.
const std::vector<std::string> &builtin_gate_names();

/// Standard gate library: h x y z s sdg t tdg rx ry rz u.
/// Rotations take one angle in radians; "u" takes 8 reals, row-major
/// (re00 im00 re01 im01 re10 im10 re11 im11). Custom matrices must pass the
/// unitarity check (1e-6, or 1e-9 in strict mode).
GateMatrix make_gate(const std::string &name, const std::vector<double> &params,
                     bool strict = false);

/// Single-qubit op from a library name.
GateOp single_op(const std::string &name, std::uint32_t target,
                 std::vector<double> params = {});

/// Controlled op; name is "cx" or "cz".
GateOp controlled_op(const std::string &name, std::uint32_t control,
                     std::uint32_t target);

} // namespace qvsim
