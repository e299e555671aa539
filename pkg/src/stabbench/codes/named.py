"""Embedded generator matrices for the named codes.

Rows are written as bit strings, qubit 0 first.  CSS codes list their X and Z
check matrices separately; the perfect code is given directly as Paulis.
"""

from __future__ import annotations

from ..pauli import PauliString, parse_pauli
from .model import CodeInstance, css_generators, make_code


def _rows(*texts: str) -> list[int]:
    return [sum(1 << q for q, ch in enumerate(t) if ch == "1") for t in texts]


# Hamming [7,4,3] parity checks (Steane code uses them for both X and Z).
HAMMING_7 = ("1111000", "1100110", "1010101")

# Hamming [15,11,3] parity checks: column j is the binary expansion of j.
HAMMING_15 = (
    "101010101010101",
    "011001100110011",
    "000111100001111",
    "000000011111111",
)

# Parity checks of the cyclic [23,12,7] Golay code: shifts of the reciprocal
# check polynomial of g(x) = x^11 + x^10 + x^6 + x^5 + x^4 + x^2 + 1.
GOLAY_23 = (
    "11111001001010000000000",
    "01111100100101000000000",
    "00111110010010100000000",
    "00011111001001010000000",
    "00001111100100101000000",
    "00000111110010010100000",
    "00000011111001001010000",
    "00000001111100100101000",
    "00000000111110010010100",
    "00000000011111001001010",
    "00000000001111100100101",
)

# Shor [[9,1,3]]: Z pairs inside each block of three, X across adjacent blocks.
SHOR_X = ("111111000", "000111111")
SHOR_Z = ("110000000", "011000000", "000110000", "000011000", "000000110", "000000011")

# Quantum Reed-Muller [[15,1,3]]: X checks are the weight-8 Hamming rows,
# Z checks add their pairwise intersections (weight 4).
TETRA_X = HAMMING_15
TETRA_Z = HAMMING_15 + (
    "001000100010001",
    "000010100000101",
    "000000001010101",
    "000001100000011",
    "000000000110011",
    "000000000001111",
)

# [[12,2,4]]: three [[4,2,2]] blocks carrying a [[6,2,2]] outer code
# (the C4/C6 concatenation).  Inner logicals per block: X1=X0X1, X2=X0X2,
# Z1=Z0Z2, Z2=Z0Z1; outer checks XIIXXX, XXXIIX and the Z analogues.
CARBON_X = (
    "111100000000",
    "000011110000",
    "000000001111",
    "110010100110",
    "011011001010",
)
CARBON_Z = (
    "111100000000",
    "000011110000",
    "000000001111",
    "101011000110",
    "011010101100",
)

PERFECT_5 = ("XZZX_", "_XZZX", "X_XZZ", "ZX_XZ")

DETECTOR_4 = ("XXXX", "ZZZZ")


def _css(id: str, xs, zs, n: int, d: int) -> CodeInstance:
    return make_code(id, "named", css_generators(_rows(*xs), _rows(*zs), n), d, {"name": id})


def _paulis(id: str, texts, d: int) -> CodeInstance:
    gens: list[PauliString] = [parse_pauli(t) for t in texts]
    return make_code(id, "named", gens, d, {"name": id})


NAMED = {
    "perfect5": lambda: _paulis("perfect5", PERFECT_5, 3),
    "steane": lambda: _css("steane", HAMMING_7, HAMMING_7, 7, 3),
    "hamming15": lambda: _css("hamming15", HAMMING_15, HAMMING_15, 15, 3),
    "golay23": lambda: _css("golay23", GOLAY_23, GOLAY_23, 23, 7),
    "shor9": lambda: _css("shor9", SHOR_X, SHOR_Z, 9, 3),
    "tetrahedral15": lambda: _css("tetrahedral15", TETRA_X, TETRA_Z, 15, 3),
    "carbon12": lambda: _css("carbon12", CARBON_X, CARBON_Z, 12, 4),
    "detector4": lambda: _paulis("detector4", DETECTOR_4, 2),
}


def named_code(name: str) -> CodeInstance:
    return NAMED[name]()
