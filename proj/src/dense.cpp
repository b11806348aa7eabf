#include "qvsim/dense.hpp"

#include <cmath>

#include "qvsim/error.hpp"

namespace qvsim {

namespace {

void check_oracle_limit(std::uint32_t n_qubits, std::uint32_t oracle_limit) {
    if (n_qubits > oracle_limit) {
        throw OracleLimitError("dense path refused: n_qubits " +
                               std::to_string(n_qubits) + " > oracle limit " +
                               std::to_string(oracle_limit));
    }
}

DenseMatrix from_gate(const GateMatrix &u) {
    DenseMatrix m;
    m.dim = 2;
    m.entries = {u.u00, u.u01, u.u10, u.u11};
    return m;
}

} // namespace

DenseMatrix identity_matrix(std::uint64_t dim) {
    DenseMatrix m;
    m.dim = dim;
    m.entries.assign(dim * dim, amp_t{0.0, 0.0});
    for (std::uint64_t i = 0; i < dim; ++i) {
        m.at(i, i) = amp_t{1.0, 0.0};
    }
    return m;
}

DenseMatrix kron(const DenseMatrix &a, const DenseMatrix &b) {
    DenseMatrix out;
    out.dim = a.dim * b.dim;
    out.entries.assign(out.dim * out.dim, amp_t{0.0, 0.0});
    for (std::uint64_t ra = 0; ra < a.dim; ++ra) {
        for (std::uint64_t ca = 0; ca < a.dim; ++ca) {
            const amp_t va = a.at(ra, ca);
            if (va == amp_t{0.0, 0.0}) {
                continue;
            }
            for (std::uint64_t rb = 0; rb < b.dim; ++rb) {
                for (std::uint64_t cb = 0; cb < b.dim; ++cb) {
                    out.at(ra * b.dim + rb, ca * b.dim + cb) = va * b.at(rb, cb);
                }
            }
        }
    }
    return out;
}

DenseMatrix expand_gate(const GateMatrix &u, std::uint32_t target,
                        std::uint32_t n_qubits, std::uint32_t oracle_limit) {
    check_oracle_limit(n_qubits, oracle_limit);
    if (target >= n_qubits) {
        throw ValidationError("target " + std::to_string(target) +
                              " >= n_qubits " + std::to_string(n_qubits));
    }
    const std::uint64_t low_dim = std::uint64_t{1} << target;
    const std::uint64_t high_dim = std::uint64_t{1} << (n_qubits - target - 1);
    return kron(identity_matrix(high_dim),
                kron(from_gate(u), identity_matrix(low_dim)));
}

DenseMatrix expand_controlled(std::uint32_t control, std::uint32_t target,
                              const GateMatrix &u, std::uint32_t n_qubits,
                              std::uint32_t oracle_limit) {
    check_oracle_limit(n_qubits, oracle_limit);
    if (control == target) {
        throw ValidationError("control equals target (" +
                              std::to_string(target) + ")");
    }
    if (control >= n_qubits || target >= n_qubits) {
        throw ValidationError("qubit index out of range for n_qubits " +
                              std::to_string(n_qubits));
    }
    const std::uint64_t dim = std::uint64_t{1} << n_qubits;
    const std::uint64_t cbit = std::uint64_t{1} << control;
    const std::uint64_t tbit = std::uint64_t{1} << target;
    DenseMatrix m;
    m.dim = dim;
    m.entries.assign(dim * dim, amp_t{0.0, 0.0});
    // Column j is the image of basis state j.
    for (std::uint64_t j = 0; j < dim; ++j) {
        if ((j & cbit) == 0) {
            m.at(j, j) = amp_t{1.0, 0.0};
            continue;
        }
        const bool tset = (j & tbit) != 0;
        m.at(j & ~tbit, j) = tset ? u.u01 : u.u00;
        m.at(j | tbit, j) = tset ? u.u11 : u.u10;
    }
    return m;
}

DenseState apply_dense(const DenseMatrix &m, const DenseState &s,
                       Metrics *metrics) {
    const std::uint64_t dim = std::uint64_t{1} << s.n_qubits;
    if (m.dim != dim || s.amps.size() != dim) {
        throw ValidationError("matrix dimension " + std::to_string(m.dim) +
                              " does not match state of " +
                              std::to_string(s.amps.size()) + " amplitudes");
    }
    DenseState out;
    out.n_qubits = s.n_qubits;
    out.amps.assign(dim, amp_t{0.0, 0.0});
    const amp_t *row = m.entries.data();
    for (std::uint64_t i = 0; i < dim; ++i, row += dim) {
        amp_t acc{0.0, 0.0};
        for (std::uint64_t j = 0; j < dim; ++j) {
            acc += row[j] * s.amps[j];
        }
        out.amps[i] = acc;
    }
    if (metrics) {
        metrics->madds += dim * dim;
        // Each output component scans the full vector once.
        metrics->traversals += dim;
    }
    return out;
}

DenseState zero_state(std::uint32_t n_qubits) {
    DenseState s;
    s.n_qubits = n_qubits;
    s.amps.assign(std::uint64_t{1} << n_qubits, amp_t{0.0, 0.0});
    s.amps[0] = amp_t{1.0, 0.0};
    return s;
}

DenseMatrix expand_op(const GateOp &op, std::uint32_t n_qubits,
                      std::uint32_t oracle_limit) {
    if (op.kind == OpKind::controlled) {
        return expand_controlled(*op.control, op.target, op.matrix, n_qubits,
                                 oracle_limit);
    }
    return expand_gate(op.matrix, op.target, n_qubits, oracle_limit);
}

DenseState simulate_dense(const Circuit &c, Metrics *metrics,
                          std::uint32_t oracle_limit) {
    check_oracle_limit(c.n_qubits, oracle_limit);
    const auto violations = validate_circuit(c);
    if (!violations.empty()) {
        throw ValidationError("invalid circuit: op " +
                              std::to_string(violations.front().op_index) +
                              ": " + violations.front().message);
    }
    DenseState s = zero_state(c.n_qubits);
    for (const GateOp &op : c.ops) {
        const DenseMatrix m = expand_op(op, c.n_qubits, oracle_limit);
        s = apply_dense(m, s, metrics);
        if (metrics) {
            metrics->gates_applied += 1;
        }
    }
    return s;
}

double state_norm(const DenseState &s) {
    double sum = 0.0;
    for (const amp_t &a : s.amps) {
        sum += std::norm(a);
    }
    return std::sqrt(sum);
}

double max_deviation(const DenseState &a, const DenseState &b) {
    if (a.amps.size() != b.amps.size()) {
        throw ValidationError("state length mismatch");
    }
    double dev = 0.0;
    for (std::size_t i = 0; i < a.amps.size(); ++i) {
        dev = std::max(dev, std::abs(a.amps[i] - b.amps[i]));
    }
    return dev;
}

} // namespace qvsim
