import random

import numpy as np
import pytest

from stabbench.circuit import parse_circuit
from stabbench.errors import IllFormedFlagGadget, MalformedProblem, NondeterministicMeasurement, StructuralError
from stabbench.pauli import PauliString, parse_pauli
from stabbench.tableau import (
    GenStatus,
    Membership,
    Tableau,
    check_stabilizers,
    deterministic_flag_outcomes,
    run,
    simulate,
)

from corpus import label, ops_to_circuit, random_group_element, random_hermitian_pauli, random_unitary_ops
from oracles import run_dense


def dense_membership(sv, p: PauliString) -> Membership:
    e = sv.expectation(label(p), p.phase)
    assert abs(e.imag) < 1e-9
    if abs(e.real - 1) < 1e-9:
        return Membership.PLUS_ONE
    if abs(e.real + 1) < 1e-9:
        return Membership.MINUS_ONE
    assert abs(e.real) < 1e-9
    return Membership.NOT_IN_GROUP


def test_initial_state():
    t = simulate(parse_circuit(""), 2)
    assert t.stabilizers() == [parse_pauli("Z_"), parse_pauli("_Z")]


def test_bell_state():
    t = simulate(parse_circuit("H 0\nCX 0 1"))
    assert t.stabilizes(parse_pauli("XX")) is Membership.PLUS_ONE
    assert t.stabilizes(parse_pauli("ZZ")) is Membership.PLUS_ONE
    assert t.stabilizes(parse_pauli("-XX")) is Membership.MINUS_ONE
    assert t.stabilizes(parse_pauli("X_")) is Membership.NOT_IN_GROUP
    sv = run_dense([("H", (0,)), ("CX", (0, 1))], 2)
    for text in ("XX", "ZZ", "-XX", "X_", "YY", "-YY"):
        p = parse_pauli(text)
        assert t.stabilizes(p) is dense_membership(sv, p)


def test_bit_flip_sign():
    t = simulate(parse_circuit("X 0"))
    assert t.stabilizers() == [parse_pauli("-Z")]


def test_rejects_non_hermitian_query():
    with pytest.raises(ValueError):
        simulate(parse_circuit("H 0")).stabilizes(parse_pauli("iX"))


def test_random_circuits_against_state_vector():
    rng = random.Random(1234)
    for _ in range(40):
        n = rng.randint(1, 6)
        ops = random_unitary_ops(rng, n, rng.randint(0, 30))
        t = simulate(ops_to_circuit(ops), n)
        assert t.check_invariants()
        sv = run_dense(ops, n)
        stabs = t.stabilizers()
        for _ in range(20):
            g = random_group_element(rng, stabs)
            assert t.stabilizes(g) is dense_membership(sv, g)
            assert t.stabilizes(g.negated()) is dense_membership(sv, g.negated())
            p = random_hermitian_pauli(rng, n)
            assert t.stabilizes(p) is dense_membership(sv, p)


def test_invariants_after_every_gate():
    rng = random.Random(7)
    for _ in range(10):
        n = rng.randint(2, 7)
        t = Tableau(n)
        for op in ops_to_circuit(random_unitary_ops(rng, n, 25)).ops():
            t.apply(op.kind, op.qubits)
            assert t.check_invariants()
            x = np.concatenate([t.x, t.z], axis=1)
            assert np.linalg.matrix_rank(x.astype(float)) == 2 * n


def test_compositional():
    rng = random.Random(99)
    for _ in range(10):
        n = 5
        a = ops_to_circuit(random_unitary_ops(rng, n, 15))
        b = ops_to_circuit(random_unitary_ops(rng, n, 15))
        whole = simulate(a + b, n)
        staged = run(simulate(a, n), b.ops())
        for s in whole.stabilizers():
            assert staged.stabilizes(s) is Membership.PLUS_ONE


def test_reset_repins_qubit():
    t = simulate(parse_circuit("H 0\nCX 0 1\nR 0"))
    assert t.stabilizes(parse_pauli("Z_")) is Membership.PLUS_ONE
    assert t.check_invariants()
    t = simulate(parse_circuit("X 0\nR 0"))
    assert t.stabilizes(parse_pauli("Z")) is Membership.PLUS_ONE


def test_random_measurement_is_rejected():
    with pytest.raises(NondeterministicMeasurement, match="instruction 1"):
        simulate(parse_circuit("H 0\nM 0"))


def test_check_stabilizers_examples():
    bell = parse_circuit("H 0\nCX 0 1")
    rep = check_stabilizers(bell, [parse_pauli("XX"), parse_pauli("ZZ")])
    assert (rep.satisfied_count, rep.valid) == (2, True)
    rep = check_stabilizers(parse_circuit(""), [parse_pauli("ZZZZ")])
    assert rep.valid
    rep = check_stabilizers(parse_circuit(""), [parse_pauli("XX")])
    assert (rep.satisfied_count, rep.valid, rep.statuses) == (0, False, [GenStatus.FAIL])
    rep = check_stabilizers(parse_circuit("X 0"), [parse_pauli("ZZ")])
    assert rep.statuses == [GenStatus.SIGN_FAIL]


def test_check_stabilizers_with_flag_qubits():
    # flag on qubit 2 measures the parity of qubit 0 twice: deterministic 0
    circ = parse_circuit("H 0\nCX 0 2\nCX 0 1\nCX 0 2\nM 2")
    rep = check_stabilizers(circ, [parse_pauli("XX"), parse_pauli("ZZ")])
    assert rep.valid and rep.flag_outcomes == [0]


def test_check_stabilizers_problem_errors():
    with pytest.raises(MalformedProblem):
        check_stabilizers(parse_circuit(""), [parse_pauli("XX"), parse_pauli("ZI")])
    with pytest.raises(MalformedProblem):
        check_stabilizers(parse_circuit(""), [parse_pauli("XX"), parse_pauli("ZZZ")])
    with pytest.raises(StructuralError):
        check_stabilizers(parse_circuit("M 0"), [parse_pauli("ZZ")])


def test_deterministic_flag_outcomes():
    gadget = parse_circuit("CX 0 2\nCX 0 1\nCX 0 2\nM 2")
    assert deterministic_flag_outcomes(gadget, {0, 1}) == [0]
    assert deterministic_flag_outcomes(parse_circuit("H 0"), {0}) == []
    with pytest.raises(IllFormedFlagGadget):
        deterministic_flag_outcomes(parse_circuit("H 2\nM 2"), {0, 1})
    with pytest.raises(StructuralError):
        deterministic_flag_outcomes(parse_circuit("M 0"), {0})
