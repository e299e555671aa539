"""Programmatic constructions of the parametrised code families."""

from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np

from ..errors import UnsupportedParameters
from ..gf2 import independent_subset
from .model import CodeInstance, css_generators, make_code


def _mask(qubits) -> int:
    out = 0
    for q in qubits:
        out |= 1 << q
    return out


def _need_odd_distance(d: int, family: str) -> None:
    if d < 3 or d % 2 == 0:
        raise UnsupportedParameters(f"{family} needs an odd distance >= 3, got {d}")


def rotated_surface(d: int) -> CodeInstance:
    """[[d^2, 1, d]] rotated surface code on a d x d grid (qubit r*d + c)."""
    _need_odd_distance(d, "rotated_surface")
    xs, zs = [], []
    for r in range(-1, d):
        for c in range(-1, d):
            corners = [(r + a, c + b) for a in (0, 1) for b in (0, 1)]
            qs = [i * d + j for i, j in corners if 0 <= i < d and 0 <= j < d]
            is_x = (r + c) % 2 == 0
            if len(qs) == 4:
                (xs if is_x else zs).append(_mask(qs))
            elif len(qs) == 2:
                # weight-2 checks: X type on top/bottom edges, Z type on left/right
                if is_x and r in (-1, d - 1):
                    xs.append(_mask(qs))
                elif not is_x and c in (-1, d - 1):
                    zs.append(_mask(qs))
    return make_code(f"surface_d{d}", "rotated_surface", css_generators(xs, zs, d * d), d, {"d": d})


_HEX_NEIGHBOURS = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1))


def color_hex(d: int) -> CodeInstance:
    """Triangular 6.6.6 color code, [[(3d^2 + 1)/4, 1, d]].

    Points (i, j) of a triangular lattice with i, j >= 0 and i + j <= L form a
    big triangle; sites with (i + 2j) % 3 == 1 are face centres and all other
    sites are qubits.  Each face acts on its lattice neighbours.
    """
    _need_odd_distance(d, "color_hex")
    size = 3 * (d - 1) // 2
    qubits = [
        (i, j) for i in range(size + 1) for j in range(size + 1 - i) if (i + 2 * j) % 3 != 1
    ]
    index = {p: q for q, p in enumerate(qubits)}
    rows = []
    for i in range(-2, size + 3):
        for j in range(-2, size + 3):
            if (i + 2 * j) % 3 != 1:
                continue
            face = [index[(i + a, j + b)] for a, b in _HEX_NEIGHBOURS if (i + a, j + b) in index]
            if len(face) >= 4:
                rows.append(_mask(face))
    n = len(qubits)
    return make_code(f"color_hex_d{d}", "color_hex", css_generators(rows, rows, n), d, {"d": d})


def _sqoct_layout(d: int) -> tuple[list[tuple[int, int]], list[tuple[int, int]], list[tuple[int, int]]]:
    """Qubit, square and octagon coordinates of the triangular 4.8.8 patch.

    Rows of data qubits alternate with rows of face centres; qubits in a
    row sit at alternating gaps of 2 and 4, faces every 3 columns.
    """
    data: list[tuple[int, int]] = []
    squares: list[tuple[int, int]] = []
    octagons = [(x, 0) for x in range(4, (d // 2) * 6, 6)]

    def qubit_row(x: int, y: int, count: int) -> None:
        for step in itertools.islice(itertools.cycle((2, 4)), count):
            data.append((x, y))
            x += step

    def face_row(x: int, y: int, count: int, square_first: bool) -> None:
        kinds = itertools.cycle((squares, octagons) if square_first else (octagons, squares))
        for kind in itertools.islice(kinds, count):
            kind.append((x, y))
            x += 3

    top = d + d // 2
    y, width = 1, d
    while y <= top:
        qubit_row(y - 1, y, width)
        width -= 1 if y == 1 else 2
        y += 1
        if y <= top:
            qubit_row(y + 1, y, width)
            y += 1
        if y <= top:
            if y % 2 == 0:
                face_row(y + 1, y, width, square_first=True)
            else:
                face_row(y - 2, y, width, square_first=False)
            y += 1
    return data, squares, octagons


_SQUARE_CORNERS = ((-1, -1), (1, -1), (1, 1), (-1, 1))
_OCTAGON_CORNERS = ((-2, -1), (-1, -2), (1, -2), (2, -1), (2, 1), (1, 2), (-1, 2), (-2, 1))


def color_sqoct(d: int) -> CodeInstance:
    """Triangular 4.8.8 color code, [[(d^2 - 1)/2 + d, 1, d]]."""
    _need_odd_distance(d, "color_sqoct")
    data, squares, octagons = _sqoct_layout(d)
    index = {p: q for q, p in enumerate(sorted(data))}
    rows = []
    for centres, corners in ((squares, _SQUARE_CORNERS), (octagons, _OCTAGON_CORNERS)):
        for x, y in sorted(centres):
            face = [index[(x + a, y + b)] for a, b in corners if (x + a, y + b) in index]
            rows.append(_mask(face))
    n = len(index)
    return make_code(f"color_sqoct_d{d}", "color_sqoct", css_generators(rows, rows, n), d, {"d": d})


def iceberg(m: int) -> CodeInstance:
    """[[2m, 2m - 2, 2]]: the all-X and all-Z checks."""
    if m < 1:
        raise UnsupportedParameters(f"iceberg needs m >= 1, got {m}")
    n = 2 * m
    full = (1 << n) - 1
    return make_code(f"iceberg_m{m}", "iceberg", css_generators([full], [full], n), 2, {"m": m})


# logical operators of the [[6,4,2]] block used by the hypercube recursion
def _block_logicals() -> tuple[list[int], list[int]]:
    xl = [_mask((0, j + 1)) for j in range(4)]
    zl = [_mask((j + 1, 5)) for j in range(4)]
    return xl, zl


def hypercube(level: int) -> CodeInstance:
    """Many-hypercube code [[6^l, 4^l, 2^l]] for l in {1, 2}.

    Level 2 arranges six [[6,4,2]] blocks; logical j of every block forms an
    outer [[6,4,2]] codeword whose checks are lifted through the inner
    logical operators.
    """
    if level == 1:
        full = (1 << 6) - 1
        return make_code("hypercube_l1", "hypercube", css_generators([full], [full], 6), 2, {"level": 1})
    if level != 2:
        raise UnsupportedParameters(f"hypercube level must be 1 or 2, got {level}")
    n = 36
    xl, zl = _block_logicals()
    xs = [0b111111 << (6 * b) for b in range(6)]
    zs = list(xs)
    for j in range(4):
        lift_x = lift_z = 0
        for b in range(6):
            lift_x |= xl[j] << (6 * b)
            lift_z |= zl[j] << (6 * b)
        xs.append(lift_x)
        zs.append(lift_z)
    return make_code("hypercube_l2", "hypercube", css_generators(xs, zs, n), 4, {"level": 2})


def _shift(size: int) -> np.ndarray:
    return np.roll(np.eye(size, dtype=np.uint8), 1, axis=1)


def _bb_poly(terms: Sequence[Sequence[int]], l: int, m: int) -> np.ndarray:
    x = np.kron(_shift(l), np.eye(m, dtype=np.uint8))
    y = np.kron(np.eye(l, dtype=np.uint8), _shift(m))
    out = np.zeros((l * m, l * m), dtype=np.uint8)
    for a, b in terms:
        out ^= (np.linalg.matrix_power(x, a) @ np.linalg.matrix_power(y, b)) % 2
    return out


def _row_ints(mat: np.ndarray) -> list[int]:
    weights = 1 << np.arange(mat.shape[1], dtype=object)
    return [int((row.astype(object) * weights).sum()) for row in mat]


BB_PRESETS = {
    72: {"l": 6, "m": 6, "a": [[3, 0], [0, 1], [0, 2]], "b": [[0, 3], [1, 0], [2, 0]], "d": 6},
    90: {"l": 15, "m": 3, "a": [[9, 0], [0, 1], [0, 2]], "b": [[0, 0], [2, 0], [7, 0]], "d": 10},
}


def bivariate_bicycle(
    l: int, m: int, a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], d: int, id: str | None = None
) -> CodeInstance:
    """BB code with H_X = [A | B], H_Z = [B^T | A^T].

    Monomials are (power of x, power of y).  The raw check matrices are
    rank deficient; a greedy independent subset of each is kept.
    """
    A = _bb_poly(a, l, m)
    B = _bb_poly(b, l, m)
    hx = _row_ints(np.concatenate([A, B], axis=1))
    hz = _row_ints(np.concatenate([B.T, A.T], axis=1))
    xs = [hx[i] for i in independent_subset(hx)]
    zs = [hz[i] for i in independent_subset(hz)]
    n = 2 * l * m
    params = {"l": l, "m": m, "a": [list(t) for t in a], "b": [list(t) for t in b]}
    return make_code(id or f"bb_{n}", "bb", css_generators(xs, zs, n), d, params)


def bb_preset(n: int) -> CodeInstance:
    if n not in BB_PRESETS:
        raise UnsupportedParameters(f"no bivariate bicycle preset with n={n}")
    p = BB_PRESETS[n]
    return bivariate_bicycle(p["l"], p["m"], p["a"], p["b"], p["d"])
