"""Smoke checks for the Python bindings: parse, simulate, store, verify."""

import math
import os
import sys
import tempfile

import qvsim

RT2 = 1 / math.sqrt(2)


def approx(a, b, tol=1e-12):
    return abs(a - b) <= tol


def test_parse_and_simulate_bell():
    c = qvsim.parse_circuit("qubits 2\nh 0\ncx 0 1\n")
    assert c.n_qubits == 2
    assert len(c) == 2
    amps = qvsim.simulate_dense(c)
    assert len(amps) == 4
    assert approx(amps[0], RT2)
    assert approx(amps[3], RT2)
    assert approx(amps[1], 0) and approx(amps[2], 0)


def test_circuit_text_round_trip():
    c = qvsim.random_circuit(5, 25, seed=42)
    text = c.to_text()
    back = qvsim.parse_circuit(text)
    assert back.n_qubits == 5
    assert len(back) == 25
    assert back.to_text() == text
    assert qvsim.serialize_circuit(back) == text
    assert "Circuit" in repr(back)


def test_random_circuit_is_deterministic():
    a = qvsim.random_circuit(4, 30, seed=7)
    b = qvsim.random_circuit(4, 30, seed=7)
    assert a.to_text() == b.to_text()
    assert a.to_text() != qvsim.random_circuit(4, 30, seed=8).to_text()


def test_store_apply_and_inspect(tmp):
    path = os.path.join(tmp, "ghz.qvs")
    store = qvsim.StateStore.create(path, 3, block_amps=2)
    assert store.n_qubits == 3
    assert store.n_amps == 8
    assert store.block_amps == 2
    assert store.n_blocks == 4
    assert store.path == path
    assert approx(store.amplitude(0), 1)

    c = qvsim.parse_circuit("qubits 3\nh 0\ncx 0 1\ncx 1 2\n")
    metrics = qvsim.apply_circuit(store, c, cache_bytes=4 * 2 * 16)
    assert metrics["gates_applied"] == 3
    assert metrics["traversals"] == 3
    assert metrics["blocks_read"] == 12  # 3 gates x 4 blocks
    assert metrics["strategy"] == "paired-cached"
    assert metrics["n_qubits"] == 3

    assert approx(store.norm(), 1)
    top = qvsim.top_amplitudes(store, k=2)
    assert sorted(idx for idx, _ in top) == [0, 7]
    for _, value in top:
        assert approx(value, RT2)

    state = store.read_state()
    assert len(state) == 8
    assert approx(state[0], RT2) and approx(state[7], RT2)

    dense = qvsim.simulate_dense(c)
    assert all(approx(a, b) for a, b in zip(state, dense))


def test_parallel_matches_serial(tmp):
    c = qvsim.random_circuit(6, 15, seed=3)
    states = []
    for workers in (1, 2):
        path = os.path.join(tmp, f"par{workers}.qvs")
        store = qvsim.StateStore.create(path, 6, block_amps=4)
        strategy = "paired-cached" if workers == 1 else "paired-cached-parallel"
        qvsim.apply_circuit(store, c, strategy=strategy, workers=workers)
        states.append(store.read_state())
    assert states[0] == states[1]


def test_store_reopen(tmp):
    path = os.path.join(tmp, "keep.qvs")
    store = qvsim.StateStore.create(path, 2)
    qvsim.apply_circuit(store, qvsim.parse_circuit("qubits 2\nx 0\n"))
    del store
    back = qvsim.StateStore.open(path)
    assert approx(back.amplitude(1), 1)
    assert back.block_amps == 4  # capped at 2^n on create


def test_verify_equivalence(tmp):
    r = qvsim.verify_equivalence(max_qubits=4, trials=4, max_depth=8, seed=5,
                                 scratch_dir=tmp)
    assert r["passed"] is True
    assert r["trials"] == 4
    assert r["failures"] == 0
    assert r["comparisons"] > 0
    assert r["max_deviation"] <= 1e-12


def test_errors_are_typed():
    try:
        qvsim.parse_circuit("qubits 2\nh 7\n")
    except qvsim.QvsimError as e:
        assert "line 2" in str(e)
    else:
        raise AssertionError("expected QvsimError for an out-of-range target")

    try:
        qvsim.parse_circuit("h 0\n")  # no qubit count anywhere
    except qvsim.QvsimError:
        pass
    else:
        raise AssertionError("expected QvsimError for a missing qubit count")


def main():
    checks = [
        test_parse_and_simulate_bell,
        test_circuit_text_round_trip,
        test_random_circuit_is_deterministic,
        test_store_apply_and_inspect,
        test_parallel_matches_serial,
        test_store_reopen,
        test_verify_equivalence,
        test_errors_are_typed,
    ]
    for check in checks:
        with tempfile.TemporaryDirectory(prefix="qvsim-py-") as tmp:
            if check.__code__.co_argcount:
                check(tmp)
            else:
                check()
        print(f"ok {check.__name__}")
    print(f"{len(checks)} python smoke checks passed")


if __name__ == "__main__":
    sys.exit(main())
