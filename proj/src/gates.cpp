#include "qvsim/gates.hpp"

#include <cmath>
#include <numbers>
#include <unordered_map>

#include "qvsim/error.hpp"

namespace qvsim {

std::optional<std::size_t> gate_arity(const std::string &name) {
    static const std::unordered_map<std::string, std::size_t> arities = {
        {"h", 0},  {"x", 0},   {"y", 0},  {"z", 0},  {"s", 0},  {"sdg", 0},
        {"t", 0},  {"tdg", 0}, {"rx", 1}, {"ry", 1}, {"rz", 1}, {"u", 8},
    };
    auto it = arities.find(name);
    if (it == arities.end()) {
        return std::nullopt;
    }
    return it->second;
}

const std::vector<std::string> &builtin_gate_names() {
    static const std::vector<std::string> names = {
        "h", "x", "y", "z", "s", "sdg", "t", "tdg", "rx", "ry", "rz", "u"};
    return names;
}

GateMatrix make_gate(const std::string &name, const std::vector<double> &params,
                     bool strict) {
    const auto arity = gate_arity(name);
    if (!arity) {
        throw ValidationError("unknown gate '" + name + "'");
    }
    if (params.size() != *arity) {
        throw ValidationError("gate '" + name + "' expects " +
                              std::to_string(*arity) + " parameter(s), got " +
                              std::to_string(params.size()));
    }

    const double rt2 = 1.0 / std::sqrt(2.0);
    const amp_t i1{0.0, 1.0};

    GateMatrix g;
    if (name == "h") {
        g = {amp_t{rt2, 0}, amp_t{rt2, 0}, amp_t{rt2, 0}, amp_t{-rt2, 0}};
    } else if (name == "x") {
        g = {amp_t{0, 0}, amp_t{1, 0}, amp_t{1, 0}, amp_t{0, 0}};
    } else if (name == "y") {
        g = {amp_t{0, 0}, amp_t{0, -1}, amp_t{0, 1}, amp_t{0, 0}};
    } else if (name == "z") {
        g = {amp_t{1, 0}, amp_t{0, 0}, amp_t{0, 0}, amp_t{-1, 0}};
    } else if (name == "s") {
        g = {amp_t{1, 0}, amp_t{0, 0}, amp_t{0, 0}, amp_t{0, 1}};
    } else if (name == "sdg") {
        g = {amp_t{1, 0}, amp_t{0, 0}, amp_t{0, 0}, amp_t{0, -1}};
    } else if (name == "t") {
        g = {amp_t{1, 0}, amp_t{0, 0}, amp_t{0, 0}, std::exp(i1 * (std::numbers::pi / 4))};
    } else if (name == "tdg") {
        g = {amp_t{1, 0}, amp_t{0, 0}, amp_t{0, 0}, std::exp(i1 * (-std::numbers::pi / 4))};
    } else if (name == "rx") {
        const double c = std::cos(params[0] / 2), s = std::sin(params[0] / 2);
        g = {amp_t{c, 0}, amp_t{0, -s}, amp_t{0, -s}, amp_t{c, 0}};
    } else if (name == "ry") {
        const double c = std::cos(params[0] / 2), s = std::sin(params[0] / 2);
        g = {amp_t{c, 0}, amp_t{-s, 0}, amp_t{s, 0}, amp_t{c, 0}};
    } else if (name == "rz") {
        const double h = params[0] / 2;
        g = {std::exp(i1 * (-h)), amp_t{0, 0}, amp_t{0, 0}, std::exp(i1 * h)};
    } else { // "u"
        g = {amp_t{params[0], params[1]}, amp_t{params[2], params[3]},
             amp_t{params[4], params[5]}, amp_t{params[6], params[7]}};
        const double tol = strict ? kBuiltinUnitaryTol : kCustomUnitaryTol;
        const double dev = unitarity_deviation(g);
        if (!(dev <= tol)) {
            throw ValidationError("custom gate is not unitary (deviation " +
                                  std::to_string(dev) + " > tolerance " +
                                  std::to_string(tol) + ")");
        }
    }
    return g;
}

GateOp single_op(const std::string &name, std::uint32_t target,
                 std::vector<double> params) {
    GateOp op;
    op.kind = OpKind::single;
    op.matrix = make_gate(name, params);
    op.target = target;
    op.name = name;
    op.params = std::move(params);
    return op;
}

GateOp controlled_op(const std::string &name, std::uint32_t control,
                     std::uint32_t target) {
    if (name != "cx" && name != "cz") {
        throw ValidationError("unknown controlled gate '" + name + "'");
    }
    GateOp op;
    op.kind = OpKind::controlled;
    op.matrix = make_gate(name == "cx" ? "x" : "z", {});
    op.target = target;
    op.control = control;
    op.name = name;
    return op;
}

} // namespace qvsim
