import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from stabbench.errors import BoundsError, ParseError, UnsupportedGateError
from stabbench.gates import GateKind
from stabbench.pauli import (
    PauliString,
    commutes,
    conjugate_by_gate,
    emit_pauli,
    emit_sparse,
    multiply,
    parse_pauli,
    weight,
)

from oracles import dense_pauli, gate_matrix

UNITARY_1Q = [GateKind.I, GateKind.X, GateKind.Y, GateKind.Z, GateKind.H, GateKind.S, GateKind.S_DAG]
UNITARY_2Q = [GateKind.CX, GateKind.CZ, GateKind.SWAP]


def dense(p: PauliString) -> np.ndarray:
    label = "".join(p[q] for q in range(p.num_qubits))
    return dense_pauli(label, p.phase)


@st.composite
def paulis(draw, n=None, hermitian=False):
    n = draw(st.integers(1, 12)) if n is None else n
    x = draw(st.integers(0, (1 << n) - 1))
    z = draw(st.integers(0, (1 << n) - 1))
    phase = draw(st.sampled_from([0, 2] if hermitian else [0, 1, 2, 3]))
    return PauliString(n, x, z, phase)


def test_parse_dense_literal():
    p = parse_pauli("+XX", 2)
    assert (p.x_bits(), p.z_bits(), p.phase) == ([1, 1], [0, 0], 0)


def test_parse_sparse_literal():
    p = parse_pauli("-Z0*Z1", 2)
    assert (p.x_bits(), p.z_bits(), p.phase) == ([0, 0], [1, 1], 2)


def test_parse_identity_forms():
    for text in ("II", "__", "+I_"):
        p = parse_pauli(text, 2)
        assert p.is_identity and p.phase == 0


def test_parse_errors_carry_column():
    with pytest.raises(ParseError) as err:
        parse_pauli("+XQZ", 3)
    assert err.value.column == 3
    with pytest.raises(BoundsError):
        parse_pauli("X0*Z5", 3)
    with pytest.raises(ParseError):
        parse_pauli("X0*Z0", 3)
    with pytest.raises(ParseError):
        parse_pauli("X0")  # sparse needs a width


def test_emit_is_canonical():
    assert emit_pauli(parse_pauli("-X0*Y2", 4)) == "-X_Y_"
    assert emit_sparse(parse_pauli("+_Z_X")) == "+Z1*X3"
    assert emit_pauli(parse_pauli("iZ")) == "+iZ"


@given(paulis())
def test_round_trip(p):
    assert parse_pauli(emit_pauli(p)) == p
    assert parse_pauli(emit_sparse(p), p.num_qubits) == p
    assert emit_pauli(parse_pauli(emit_pauli(p))) == emit_pauli(p)


def test_commutes_examples():
    assert commutes(parse_pauli("XX"), parse_pauli("ZZ"))
    assert not commutes(parse_pauli("X"), parse_pauli("Z"))


STEANE_G1 = "XXXX___"
STEANE_G4 = "ZZZZ___"


def test_steane_pair_commutes_against_dense_commutator():
    a, b = parse_pauli(STEANE_G1), parse_pauli(STEANE_G4)
    da, db = dense(a), dense(b)
    assert da.shape == (128, 128)
    assert np.allclose(da @ db, db @ da)
    assert commutes(a, b)
    # sanity on an anticommuting pair through the same oracle
    c = parse_pauli("Z______")
    assert not np.allclose(da @ dense(c), dense(c) @ da)
    assert not commutes(a, c)


def test_multiply_x_z_gives_minus_i_y():
    p = multiply(parse_pauli("X"), parse_pauli("Z"))
    assert p[0] == "Y" and p.phase == 3
    assert np.allclose(dense(p), dense(parse_pauli("X")) @ dense(parse_pauli("Z")))


def test_multiply_involution_and_zz_xx():
    assert multiply(parse_pauli("XX"), parse_pauli("XX")) == PauliString(2)
    p = multiply(parse_pauli("ZZ"), parse_pauli("XX"))
    assert p.unsigned() == parse_pauli("YY")


def test_multiply_exhaustive_two_qubit_against_dense():
    labels = ["".join(t) for t in itertools.product("IXYZ", repeat=2)]
    cases = 0
    for la in labels:
        for lb in labels:
            base, b = parse_pauli(la), parse_pauli(lb)
            for pa in range(4):
                a = PauliString(2, base.x, base.z, pa)
                assert np.allclose(dense(multiply(a, b)), dense(a) @ dense(b))
            cases += 1
    assert cases == 256


@given(paulis(n=5), paulis(n=5), paulis(n=5))
def test_multiply_associative(a, b, c):
    assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))


@given(paulis(n=6), paulis(n=6))
def test_commutation_symmetric(a, b):
    assert commutes(a, b) == commutes(b, a)
    assert commutes(a, a)
    assert commutes(a, PauliString(6))


def test_weight_examples():
    assert weight(parse_pauli("XX")) == 2
    assert weight(PauliString(4)) == 0
    assert weight(parse_pauli("XXX"), support={0, 1}) == 2


def test_cx_propagates_control_x():
    assert conjugate_by_gate(parse_pauli("X_"), GateKind.CX, (0, 1)) == parse_pauli("XX")
    assert conjugate_by_gate(parse_pauli("_Z"), GateKind.CX, (0, 1)) == parse_pauli("ZZ")
    assert conjugate_by_gate(parse_pauli("Z_"), GateKind.CX, (0, 1)) == parse_pauli("Z_")


@pytest.mark.parametrize("gate", UNITARY_1Q)
def test_one_qubit_conjugation_exhaustive(gate):
    for n, q in ((1, 0), (2, 0), (2, 1)):
        u = gate_matrix(gate.value, (q,), n)
        for x in range(1 << n):
            for z in range(1 << n):
                for phase in (0, 1, 2, 3):
                    p = PauliString(n, x, z, phase)
                    out = conjugate_by_gate(p, gate, (q,))
                    assert np.allclose(dense(out), u @ dense(p) @ u.conj().T)
                    back = conjugate_by_gate(out, gate.inverse, (q,))
                    assert back == p


@pytest.mark.parametrize("gate", UNITARY_2Q)
def test_two_qubit_conjugation_exhaustive(gate):
    for targets in ((0, 1), (1, 0)):
        u = gate_matrix(gate.value, targets, 2)
        for x in range(4):
            for z in range(4):
                for phase in (0, 2):
                    p = PauliString(2, x, z, phase)
                    out = conjugate_by_gate(p, gate, targets)
                    assert np.allclose(dense(out), u @ dense(p) @ u.conj().T)
                    assert conjugate_by_gate(out, gate.inverse, targets) == p


@given(paulis(n=4, hermitian=True), paulis(n=4, hermitian=True), st.sampled_from(UNITARY_1Q + UNITARY_2Q), st.permutations(range(4)))
def test_conjugation_preserves_commutation_and_bounds_weight(a, b, gate, perm):
    targets = tuple(perm[: gate.arity])
    ca, cb = conjugate_by_gate(a, gate, targets), conjugate_by_gate(b, gate, targets)
    assert commutes(ca, cb) == commutes(a, b)
    assert weight(ca) <= weight(a) + len(targets)


def test_conjugation_errors():
    with pytest.raises(UnsupportedGateError):
        conjugate_by_gate(parse_pauli("X"), GateKind.M, (0,))
    with pytest.raises(ValueError):
        conjugate_by_gate(parse_pauli("XX"), GateKind.CX, (1, 1))
    with pytest.raises(ValueError):
        commutes(parse_pauli("X"), parse_pauli("XX"))
