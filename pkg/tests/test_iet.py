import random
from fractions import Fraction as F
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from ietkhinchin.cf import predicted_reduced_ns
from ietkhinchin.combinat import BOTTOM, TOP, parse_permutation
from ietkhinchin.iet import (
    EXACT,
    FLOAT,
    IET,
    Triple,
    has_connection_up_to,
    iet_type,
    is_reduced_triple,
    reduced_triples_brute_force,
    sample_iet,
    singularities,
    valid_pairs,
    w_vectors,
)


def rotation(p, q):
    """The two-letter exchange rotating by p/q."""
    return IET(parse_permutation("AB/BA"), {"A": F(q - p, q), "B": F(p, q)})


class TestSingularities:
    def test_d2(self):
        T = IET(parse_permutation("AB/BA"), {"A": F(1, 3), "B": F(2, 3)})
        u_top, u_bottom = singularities(T)
        assert u_top["B"] == F(1, 3)
        assert u_bottom["A"] == F(2, 3)

    def test_position_one_is_zero(self):
        T = IET(parse_permutation("ABC/CBA"), {"A": F(1, 6), "B": F(1, 3), "C": F(1, 2)})
        u_top, u_bottom = singularities(T)
        assert u_top["A"] == 0 and u_bottom["C"] == 0
        assert u_top["B"] == F(1, 6) and u_top["C"] == F(1, 2)
        assert u_bottom["B"] == F(1, 2) and u_bottom["A"] == F(5, 6)


class TestEvaluate:
    def test_translations(self):
        T = rotation(5, 8)
        assert T.evaluate(F(0)) == F(5, 8)
        assert T.evaluate(F(5, 8)) == F(2, 8)

    def test_inverse_consistency(self):
        rng = random.Random(4)
        T = sample_iet(parse_permutation("ABCD/DCBA"), rng)
        for _ in range(100):
            x = F(rng.randrange(0, 10**6), 10**6) * T.total()
            assert T.evaluate_inverse(T.evaluate(x)) == x

    def test_domain_checked(self):
        T = rotation(1, 2)
        with pytest.raises(ValueError):
            T.evaluate(F(3, 2))

    def test_forward_backward_orbit(self):
        rng = random.Random(9)
        T = sample_iet(parse_permutation("ABC/CBA"), rng)
        x = F(1, 7) * T.total()
        y = x
        for _ in range(50):
            y = T.evaluate(y)
        for _ in range(50):
            y = T.evaluate_inverse(y)
        assert y == x


class TestType:
    def test_top(self):
        assert iet_type(rotation(5, 8)) == TOP

    def test_none_on_tie(self):
        assert iet_type(rotation(1, 2)) is None

    def test_bottom(self):
        assert iet_type(rotation(3, 8)) == BOTTOM


class TestConnections:
    def test_rotation_five_eighths(self):
        assert has_connection_up_to(rotation(5, 8), 10) == Triple("A", "B", 6)

    def test_half(self):
        assert has_connection_up_to(rotation(1, 2), 5) == Triple("A", "B", 0)

    def test_absent_within_horizon(self):
        assert has_connection_up_to(rotation(610, 987), 20) is None

    def test_float_rejected(self):
        T = IET(parse_permutation("AB/BA"), {"A": 0.4, "B": 0.6}, FLOAT)
        with pytest.raises(ValueError):
            has_connection_up_to(T, 5)


class TestWVectors:
    def test_d2(self):
        wb, wa, w = w_vectors(parse_permutation("AB/BA"), "A", "B")
        assert wb == (0, 1) and wa == (1, 0) and w == (-1, 1)

    def test_d3(self):
        wb, wa, w = w_vectors(parse_permutation("ABC/CAB"), "B", "B")
        assert wb == (1, 0, 1)  # bottom prefix {C, A}
        assert wa == (1, 0, 0)
        assert w == (0, 0, 1)

    def test_position_constraint(self):
        with pytest.raises(ValueError):
            w_vectors(parse_permutation("AB/BA"), "B", "B")

    @given(st.integers(0, 10**9))
    @settings(max_examples=40, deadline=None)
    def test_pairing_identity(self, seed):
        rng = random.Random(seed)
        T = sample_iet(parse_permutation("ABCD/DCBA"), rng)
        u_top, u_bottom = singularities(T)
        lam = T.length_vector()
        for beta, alpha in valid_pairs(T.perm):
            _, _, w = w_vectors(T.perm, beta, alpha)
            pairing = sum(x * y for x, y in zip(w, lam))
            assert pairing == u_bottom[beta] - u_top[alpha]


class TestReducedTriples:
    def test_rotation_example(self):
        T = rotation(5, 8)
        assert is_reduced_triple(T, Triple("A", "B", 1))
        gaps = reduced_triples_brute_force(T, "A", "B", 10)
        assert gaps[1] == F(1, 8)

    def test_singularity_inside_fails(self):
        # theta = 5/8: I(A,B,2) strictly contains the bottom singularity
        T = rotation(5, 8)
        assert not is_reduced_triple(T, Triple("A", "B", 2))

    def test_connection_rejected(self):
        with pytest.raises(ValueError):
            is_reduced_triple(rotation(1, 2), Triple("A", "B", 0))

    def test_float_rejected(self):
        T = IET(parse_permutation("AB/BA"), {"A": 0.4, "B": 0.6}, FLOAT)
        with pytest.raises(ValueError):
            is_reduced_triple(T, Triple("A", "B", 1))

    def test_brute_force_agrees_with_pointwise(self):
        rng = random.Random(31)
        T = sample_iet(parse_permutation("ABC/CBA"), rng, bits=12)
        for beta, alpha in valid_pairs(T.perm):
            table = reduced_triples_brute_force(T, beta, alpha, 40)
            conn = has_connection_up_to(T, 40)
            horizon = conn.n if conn and conn.beta == beta and conn.alpha == alpha else 40
            for n in range(horizon):
                assert (n in table) == is_reduced_triple(T, Triple(beta, alpha, n))

    @given(st.integers(5, 10**4), st.integers(0, 10**9))
    @settings(max_examples=60, deadline=None)
    def test_continued_fraction_oracle(self, q, seed):
        p = random.Random(seed).randrange(1, q)
        g = gcd(p, q)
        p, q = p // g, q // g
        if q < 5:
            return
        found = set(reduced_triples_brute_force(rotation(p, q), "A", "B", q).keys())
        assert found == predicted_reduced_ns(p, q)


def test_json_roundtrip():
    T = rotation(5, 8)
    back = IET.from_json(T.to_json())
    assert back.perm == T.perm and back.lengths == T.lengths and back.backend == EXACT
    Tf = T.to_float()
    back_f = IET.from_json(Tf.to_json())
    assert back_f.backend == FLOAT and back_f.lengths == Tf.lengths


def test_exact_rationalization_of_floats():
    Tf = IET(parse_permutation("AB/BA"), {"A": 0.375, "B": 0.625}, FLOAT)
    Te = Tf.to_exact()
    assert Te.lengths["A"] == F(3, 8) and Te.backend == EXACT
