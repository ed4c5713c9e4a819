"""Path matrices, return-time vectors, simplex volumes, path probabilities.

Everything here is arbitrary-precision integer or exact rational: entries of
path matrices grow exponentially along paths and the volume formula needs
them exactly.  Matrices are tuples of row tuples, indexed by the canonical
(sorted) alphabet order of the path's start vertex.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .combinat import Arrow, Path

Matrix = tuple[tuple[int, ...], ...]


def identity_matrix(d: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(d)) for i in range(d))


def arrow_matrix(arrow: Arrow) -> Matrix:
    """Identity plus a single 1 in (row loser, column winner).

    This sends the winner's basis vector to winner + loser and fixes every
    other basis vector.
    """
    letters = arrow.start.letters
    loser = letters.index(arrow.loser)
    winner = letters.index(arrow.winner)
    d = len(letters)
    return tuple(
        tuple(1 if i == j else (1 if (i == loser and j == winner) else 0) for j in range(d))
        for i in range(d)
    )


def _compose_arrow(matrix: Matrix, arrow: Arrow) -> Matrix:
    # left-multiplying by the elementary matrix adds the winner's row to the loser's
    letters = arrow.start.letters
    loser = letters.index(arrow.loser)
    winner = letters.index(arrow.winner)
    rows = list(matrix)
    rows[loser] = tuple(x + y for x, y in zip(rows[loser], rows[winner]))
    return tuple(rows)


def path_matrix(path: Path) -> Matrix:
    """Ordered product of elementary matrices; composing a path on the right
    left-multiplies by the new arrow's matrix."""
    matrix = identity_matrix(path.start.d)
    for arrow in path.arrows:
        matrix = _compose_arrow(matrix, arrow)
    return matrix


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    d = len(a)
    bt = tuple(zip(*b))
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a
    )


def mat_vec(a: Matrix, v: Sequence) -> tuple:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a))


def determinant(a: Matrix) -> Fraction:
    """Fraction-pivot Gaussian elimination; exact for integer input."""
    n = len(a)
    m = [[Fraction(x) for x in row] for row in a]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            factor = m[r][col] * inv
            if factor:
                m[r] = [x - factor * y for x, y in zip(m[r], m[col])]
    return det


def solve(a: Matrix, rhs: Sequence) -> tuple[Fraction, ...]:
    """Solve a x = rhs exactly (a invertible over the rationals)."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(v)] for row, v in zip(a, rhs)]
    for col in range(n):
        pivot = next(r for r in range(col, n) if m[r][col] != 0)
        m[col], m[pivot] = m[pivot], m[col]
        inv = 1 / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col]:
                factor = m[r][col]
                m[r] = [x - factor * y for x, y in zip(m[r], m[col])]
    return tuple(row[n] for row in m)


def q_vector(path: Path) -> tuple[int, ...]:
    """Row sums of the path matrix: the vector of return times.

    Computed incrementally: each arrow adds the winner's entry to the loser's.
    """
    d = path.start.d
    q = [1] * d
    letters = path.start.letters
    for arrow in path.arrows:
        q[letters.index(arrow.loser)] += q[letters.index(arrow.winner)]
    return tuple(q)


def q_norm(q: Sequence[int]) -> int:
    return sum(q)


def q_max(q: Sequence[int]) -> int:
    return max(q)


def q_min(q: Sequence[int]) -> int:
    return min(q)


def q_product(q: Sequence[int]) -> int:
    prod = 1
    for entry in q:
        prod *= entry
    return prod


def matrix_norm(a: Matrix) -> int:
    """Max-entry norm; for a positive path matrix it bounds all q ratios."""
    return max(entry for row in a for entry in row)


def simplex_volume(path: Path) -> Fraction:
    """Normalized Lebesgue volume of the path's simplex: prod of 1/q entries.

    The trivial path has volume one (total mass normalization).
    """
    return Fraction(1, q_product(q_vector(path)))


def conditional_probability(prefix: Path, continuation: Path) -> Fraction:
    """Volume of the concatenation relative to the prefix's simplex."""
    if continuation.start != prefix.end:
        raise ValueError("paths do not compose")
    return Fraction(
        q_product(q_vector(prefix)),
        q_product(q_vector(prefix.then(continuation))),
    )
