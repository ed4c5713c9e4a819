import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ietkhinchin.combinat import TOP, Arrow, Path, parse_permutation, path_from_types
from ietkhinchin.matrices import (
    arrow_matrix,
    conditional_probability,
    determinant,
    identity_matrix,
    mat_mul,
    mat_vec,
    matrix_norm,
    path_matrix,
    q_vector,
    simplex_volume,
    solve,
    transpose,
)


def random_path(seed, start_text="ABC/CBA", length=10):
    rng = random.Random(seed)
    path = Path(parse_permutation(start_text))
    for _ in range(length):
        path = path.extended(rng.choice("tb"))
    return path


def test_arrow_matrix_shape():
    # top arrow at ABC/CBA has winner C, loser A: identity + 1 at (row A, col C)
    arrow = Arrow(parse_permutation("ABC/CBA"), TOP)
    assert arrow.winner == "C" and arrow.loser == "A"
    assert arrow_matrix(arrow) == ((1, 0, 1), (0, 1, 0), (0, 0, 1))


def test_trivial_path_is_identity():
    p = parse_permutation("ABC/CBA")
    assert path_matrix(Path(p)) == identity_matrix(3)
    assert q_vector(Path(p)) == (1, 1, 1)


def test_tb_matrix_and_q():
    tb = path_from_types(parse_permutation("AB/BA"), "tb")
    assert path_matrix(tb) == ((1, 1), (1, 2))
    assert q_vector(tb) == (2, 3)


def test_single_arrow_q():
    t = path_from_types(parse_permutation("ABC/CBA"), "t")
    assert q_vector(t) == (2, 1, 1)


def test_composition_rule():
    p = parse_permutation("AB/BA")
    t = path_from_types(p, "t")
    tb = path_from_types(p, "tb")
    ext = mat_mul(arrow_matrix(tb.arrows[-1]), path_matrix(t))
    assert ext == path_matrix(tb)


@given(st.integers(0, 10**9))
@settings(max_examples=100, deadline=None)
def test_determinant_one(seed):
    path = random_path(seed, length=12)
    assert determinant(path_matrix(path)) == 1


@given(st.integers(0, 10**9))
@settings(max_examples=60, deadline=None)
def test_q_is_row_sums(seed):
    path = random_path(seed)
    matrix = path_matrix(path)
    assert q_vector(path) == tuple(sum(row) for row in matrix)


@given(st.integers(0, 10**9), st.integers(0, 10**9))
@settings(max_examples=40, deadline=None)
def test_q_concatenation_and_monotonicity(seed_a, seed_b):
    prefix = random_path(seed_a, length=6)
    rng = random.Random(seed_b)
    cont = Path(prefix.end)
    for _ in range(6):
        cont = cont.extended(rng.choice("tb"))
    whole = prefix.then(cont)
    # q of the concatenation is the continuation matrix applied to the prefix q
    lifted = mat_vec(path_matrix(cont), q_vector(prefix))
    assert q_vector(whole) == lifted
    assert all(x <= y for x, y in zip(q_vector(prefix), q_vector(whole)))


def test_volumes():
    p = parse_permutation("AB/BA")
    assert simplex_volume(Path(p)) == 1
    assert simplex_volume(path_from_types(p, "t")) == Fraction(1, 2)
    assert simplex_volume(path_from_types(p, "tb")) == Fraction(1, 6)
    p3 = parse_permutation("ABC/CBA")
    assert simplex_volume(path_from_types(p3, "t")) == Fraction(1, 2)


def test_conditional_probability():
    p = parse_permutation("AB/BA")
    t = path_from_types(p, "t")
    b = path_from_types(t.end, "b")
    assert conditional_probability(t, b) == Fraction(1, 3)
    assert conditional_probability(t, Path(t.end)) == 1
    # trivial prefix reduces to the plain volume
    assert conditional_probability(Path(p), t) == simplex_volume(t)


def test_conditional_probability_rejects_noncomposable():
    p = parse_permutation("ABC/CBA")
    t = path_from_types(p, "t")
    with pytest.raises(ValueError):
        conditional_probability(t, path_from_types(p, "b"))


def test_volume_splits_into_children():
    path = random_path(7, length=8)
    vol = simplex_volume(path)
    assert vol == simplex_volume(path.extended("t")) + simplex_volume(path.extended("b"))


def test_solve_and_transpose():
    path = random_path(3, length=9)
    matrix = path_matrix(path)
    rhs = (Fraction(3, 7), Fraction(1, 2), Fraction(5, 11))
    x = solve(matrix, rhs)
    assert mat_vec(matrix, x) == rhs
    assert transpose(transpose(matrix)) == matrix


def test_positive_suffix_balances_q():
    # a path ending with a positive suffix has comparable q entries (ratio <= max entry)
    start = parse_permutation("AB/BA")
    eta = path_from_types(start, "tb")
    m = matrix_norm(path_matrix(eta))
    rng = random.Random(12)
    for _ in range(20):
        prefix = Path(start)
        for _ in range(rng.randrange(0, 9)):
            prefix = prefix.extended(rng.choice("tb"))
        whole = prefix.then(path_from_types(prefix.end, "tb"))
        q = q_vector(whole)
        for qa in q:
            for qb in q:
                assert qa <= m * qb
