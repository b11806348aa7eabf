"""Out-of-core quantum state-vector simulator.

The state lives in a disk-backed block store; every gate is applied in one
streaming pass through a bounded in-memory window. The dense oracle and the
verification harness are exposed for cross-checking.
"""

from qvsim._core import (
    DEFAULT_BLOCK_AMPS,
    Circuit,
    QvsimError,
    StateStore,
    apply_circuit,
    make_benchmark_circuit,
    parse_circuit,
    random_circuit,
    serialize_circuit,
    simulate_dense,
    top_amplitudes,
    verify_equivalence,
)

__all__ = [
    "DEFAULT_BLOCK_AMPS",
    "Circuit",
    "QvsimError",
    "StateStore",
    "apply_circuit",
    "make_benchmark_circuit",
    "parse_circuit",
    "random_circuit",
    "serialize_circuit",
    "simulate_dense",
    "top_amplitudes",
    "verify_equivalence",
]

__version__ = "0.1.0"
