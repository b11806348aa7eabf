#pragma once

#include <cstdint>
#include <vector>

#include "qvsim/metrics.hpp"
#include "qvsim/types.hpp"

namespace qvsim {

/// Largest qubit count the dense baseline will materialize (2^24 matrix
/// entries, 256 MiB, at the default).
inline constexpr std::uint32_t kDefaultOracleLimit = 12;

/// Row-major square complex matrix; dim is a power of two.
struct DenseMatrix {
    std::uint64_t dim = 0;
    std::vector<amp_t> entries; // dim * dim

    amp_t &at(std::uint64_t row, std::uint64_t col) {
        return entries[row * dim + col];
    }
    const amp_t &at(std::uint64_t row, std::uint64_t col) const {
        return entries[row * dim + col];
    }
};

/// Fully in-memory state vector of 2^n amplitudes.
struct DenseState {
    std::uint32_t n_qubits = 0;
    std::vector<amp_t> amps;
};

DenseMatrix identity_matrix(std::uint64_t dim);

/// Kronecker product a ⊗ b (a supplies the high-order index bits).
DenseMatrix kron(const DenseMatrix &a, const DenseMatrix &b);

/// Lift a single-qubit matrix to the full system:
/// I_{2^(n-k-1)} ⊗ U ⊗ I_{2^k}, qubit 0 being the least-significant bit.
DenseMatrix expand_gate(const GateMatrix &u, std::uint32_t target,
                        std::uint32_t n_qubits,
                        std::uint32_t oracle_limit = kDefaultOracleLimit);

/// Full-system matrix of a controlled gate: basis state i maps through u on
/// bit `target` when bit `control` of i is 1, identity otherwise.
DenseMatrix expand_controlled(std::uint32_t control, std::uint32_t target,
                              const GateMatrix &u, std::uint32_t n_qubits,
                              std::uint32_t oracle_limit = kDefaultOracleLimit);

/// Full matrix-vector product, dim^2 complex multiply-adds. Counts every
/// multiply-add and one state traversal per output component into `metrics`.
DenseState apply_dense(const DenseMatrix &m, const DenseState &s,
                       Metrics *metrics = nullptr);

/// |0...0>: amplitude 1 at index 0.
DenseState zero_state(std::uint32_t n_qubits);

/// Apply every op of the circuit in order via expand + apply_dense,
/// starting from |0...0>.
DenseState simulate_dense(const Circuit &c, Metrics *metrics = nullptr,
                          std::uint32_t oracle_limit = kDefaultOracleLimit);

/// Expand one op (single or controlled) to its full-system matrix.
DenseMatrix expand_op(const GateOp &op, std::uint32_t n_qubits,
                      std::uint32_t oracle_limit = kDefaultOracleLimit);

double state_norm(const DenseState &s);

/// max_i |a_i - b_i| between two states of equal length.
double max_deviation(const DenseState &a, const DenseState &b);

} // namespace qvsim
