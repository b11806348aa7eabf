#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qvsim {

/// One state-vector amplitude. Two IEEE-754 doubles, 16 bytes on disk.
using amp_t = std::complex<double>;

inline constexpr std::uint64_t kAmpBytes = 16;
static_assert(sizeof(amp_t) == kAmpBytes, "amplitude must serialize to 16 bytes");

/// Partner index of i for a gate on qubit k: i XOR 2^k. Involution.
constexpr std::uint64_t pair_index(std::uint64_t i, std::uint32_t k) noexcept {
    return i ^ (std::uint64_t{1} << k);
}

/// True when bit k of i is 0, i.e. i is the lower member of its pair.
constexpr bool is_pair_base(std::uint64_t i, std::uint32_t k) noexcept {
    return ((i >> k) & 1u) == 0;
}

/// Row-major 2x2 complex matrix.
struct GateMatrix {
    amp_t u00{}, u01{}, u10{}, u11{};

    bool operator==(const GateMatrix &) const = default;
};

/// Largest entrywise |(U†U - I)_rc|. Returns +inf for non-finite entries.
double unitarity_deviation(const GateMatrix &u);

enum class OpKind { single, controlled };

/// One circuit instruction: `matrix` applied to qubit `target`, optionally
/// gated on `control`. `name`/`params` keep the textual form so circuits
/// serialize back exactly.
struct GateOp {
    OpKind kind = OpKind::single;
    GateMatrix matrix{};
    std::uint32_t target = 0;
    std::optional<std::uint32_t> control;
    std::string name;
    std::vector<double> params;

    bool operator==(const GateOp &) const = default;
};

struct Circuit {
    std::uint32_t n_qubits = 0;
    std::vector<GateOp> ops;

    bool operator==(const Circuit &) const = default;
};

struct Violation {
    std::size_t op_index = 0;
    std::string message;
};

/// Every out-of-range qubit index and control==target conflict, with the
/// offending op position. Empty result means the circuit is well formed.
std::vector<Violation> validate_circuit(const Circuit &c);

} // namespace qvsim
