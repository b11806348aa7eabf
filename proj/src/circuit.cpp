#include "qvsim/types.hpp"

#include <cmath>

namespace qvsim {

namespace {

bool finite(const amp_t &a) {
    return std::isfinite(a.real()) && std::isfinite(a.imag());
}

} // namespace

double unitarity_deviation(const GateMatrix &u) {
    if (!finite(u.u00) || !finite(u.u01) || !finite(u.u10) || !finite(u.u11)) {
        return std::numeric_limits<double>::infinity();
    }
    // U†U, entry by entry.
    const amp_t d00 = std::conj(u.u00) * u.u00 + std::conj(u.u10) * u.u10;
    const amp_t d01 = std::conj(u.u00) * u.u01 + std::conj(u.u10) * u.u11;
    const amp_t d10 = std::conj(u.u01) * u.u00 + std::conj(u.u11) * u.u10;
    const amp_t d11 = std::conj(u.u01) * u.u01 + std::conj(u.u11) * u.u11;
    double dev = std::abs(d00 - amp_t{1.0, 0.0});
    dev = std::max(dev, std::abs(d01));
    dev = std::max(dev, std::abs(d10));
    dev = std::max(dev, std::abs(d11 - amp_t{1.0, 0.0}));
    return dev;
}

std::vector<Violation> validate_circuit(const Circuit &c) {
    std::vector<Violation> out;
    for (std::size_t idx = 0; idx < c.ops.size(); ++idx) {
        const GateOp &op = c.ops[idx];
        if (op.target >= c.n_qubits) {
            out.push_back({idx, "target " + std::to_string(op.target) +
                                    " >= n_qubits " + std::to_string(c.n_qubits)});
        }
        if (op.control) {
            if (*op.control >= c.n_qubits) {
                out.push_back({idx, "control " + std::to_string(*op.control) +
                                        " >= n_qubits " +
                                        std::to_string(c.n_qubits)});
            }
            if (*op.control == op.target) {
                out.push_back({idx, "control equals target (" +
                                        std::to_string(op.target) + ")"});
            }
        }
    }
    return out;
}

} // namespace qvsim
