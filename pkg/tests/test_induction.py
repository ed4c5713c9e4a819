import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from ietkhinchin.cf import subtractive_runs
from ietkhinchin.combinat import parse_permutation, path_from_types
from ietkhinchin.errors import AlgorithmStopped, PrecisionExhausted
from ietkhinchin.iet import FLOAT, IET, has_connection_up_to, sample_iet
from ietkhinchin.induction import (
    InductionState,
    iterate,
    lengths_after,
    lh_counters,
    normalized_step,
    path_of,
    zorich_step,
)
from ietkhinchin.matrices import mat_vec, transpose, path_matrix


def rotation(p, q):
    return IET(parse_permutation("AB/BA"), {"A": F(q - p, q), "B": F(p, q)})


class TestSingleSteps:
    def test_first_step(self):
        state = InductionState(rotation(5, 8))
        arrow = state.rauzy_step()
        assert arrow.kind == "t" and arrow.winner == "B" and arrow.loser == "A"
        assert state.current.lengths == {"A": F(3, 8), "B": F(2, 8)}
        assert state.l == {"A": 1, "B": 0} and state.q == {"A": 2, "B": 1}

    def test_second_step(self):
        state = iterate(rotation(5, 8), 2)
        assert state.h["B"] == 2 and state.q == {"A": 2, "B": 3}
        assert state.path.type_string() == "tb"
        for a in "AB":
            assert state.l[a] + state.h[a] + 1 == state.q[a]

    def test_tie_stops(self):
        with pytest.raises(AlgorithmStopped):
            iterate(rotation(1, 2), 1)

    def test_stop_carries_step_index(self):
        # theta = 1/4: lengths (3/4, 1/4): b-steps reach the tie at step 2
        try:
            iterate(rotation(1, 4), 10)
        except AlgorithmStopped as stop:
            assert stop.step == 2


class TestIterate:
    def test_zero_steps_identity(self):
        state = iterate(rotation(5, 8), 0)
        assert state.path.is_trivial()
        assert state.q == {"A": 1, "B": 1}

    def test_lengths_match_inverse_transpose(self):
        state = iterate(rotation(5, 8), 2)
        expected = lengths_after(state.path, state.start.lengths)
        assert state.current.lengths == expected
        assert expected == {"A": F(1, 8), "B": F(2, 8)}

    def test_path_extension_order(self):
        T = rotation(355, 1000)
        assert path_of(T, 5).begins_with(path_of(T, 3))

    @given(st.integers(0, 10**9), st.sampled_from(["AB/BA", "ABC/CBA", "ABCD/DCBA", "ABCDE/EDCBA"]))
    @settings(max_examples=50, deadline=None)
    def test_exact_length_transport(self, seed, perm_text):
        rng = random.Random(seed)
        T = sample_iet(parse_permutation(perm_text), rng, bits=20)
        state = InductionState(T)
        for _ in range(25):
            try:
                state.rauzy_step()
            except AlgorithmStopped:
                break
            # the original lengths are recovered by the transposed matrix
            letters = T.perm.letters
            recovered = mat_vec(transpose(state.matrix), state.current.length_vector())
            assert recovered == tuple(T.lengths[a] for a in letters)
            for a in letters:
                assert state.l[a] + state.h[a] + 1 == state.q[a]

    def test_membership_of_cone(self):
        # rerunning from the barycenter of the arrival cone replays the path
        T = rotation(355, 1000)
        path = path_of(T, 6)
        mu = {a: F(1, T.d) for a in T.perm.letters}
        letters = T.perm.letters
        matrix = transpose(path_matrix(path))
        lam = mat_vec(matrix, tuple(mu[a] for a in letters))
        replay = IET(T.perm, dict(zip(letters, lam)))
        assert path_of(replay, len(path)) == path


class TestCounterReplay:
    def test_lh_counters_match_state(self):
        T = rotation(355, 1000)
        state = iterate(T, 7)
        l, h, q = lh_counters(state.path)
        assert l == state.l and h == state.h and q == state.q


class TestNormalized:
    def test_rescale(self):
        T = normalized_step(rotation(5, 8))
        assert T.lengths == {"A": F(3, 5), "B": F(2, 5)}
        assert T.total() == 1

    def test_same_arrows_as_plain(self):
        T = rotation(377, 987)
        plain = path_of(T, 6)
        current = T
        kinds = []
        for _ in range(6):
            state = InductionState(current)
            kinds.append(state.rauzy_step().kind)
            current = state.current.normalized()
        assert "".join(kinds) == plain.type_string()


class TestZorich:
    def test_type_flip_count(self):
        accelerated, count = zorich_step(rotation(5, 8))
        assert count == 1
        assert accelerated.lengths == {"A": F(3, 5), "B": F(2, 5)}

    def test_counts_match_euclid_runs(self):
        p, q = 355, 1000  # not coprime with interesting quotients after reduction
        from math import gcd

        g = gcd(p, q)
        p, q = p // g, q // g
        T = rotation(p, q)
        runs = []
        current = T
        while True:
            try:
                current, count = zorich_step(current)
                runs.append(count)
            except AlgorithmStopped as stop:
                if stop.step:
                    runs.append(stop.step)
                break
        assert runs == subtractive_runs(p, q)

    def test_tie_raises(self):
        with pytest.raises(AlgorithmStopped):
            zorich_step(rotation(1, 2))


class TestFloatBackend:
    def test_band_escalation(self):
        T = IET(parse_permutation("AB/BA"), {"A": 0.5 + 1e-14, "B": 0.5}, FLOAT)
        with pytest.raises(PrecisionExhausted):
            InductionState(T).rauzy_step()

    def test_float_run_matches_exact_arrows(self):
        rng = random.Random(3)
        Te = sample_iet(parse_permutation("ABCD/DCBA"), rng, bits=30)
        Tf = Te.to_float()
        exact_path = path_of(Te, 20).type_string()
        state = InductionState(Tf)
        for _ in range(20):
            state.rauzy_step()
        assert state.path.type_string() == exact_path


class TestReturnTimeSemantics:
    def test_first_return_spot_check(self):
        rng = random.Random(11)
        T = sample_iet(parse_permutation("ABC/CBA"), rng, bits=16)
        if has_connection_up_to(T, 60) is not None:
            T = sample_iet(parse_permutation("ABC/CBA"), rng, bits=16)
        state = iterate(T, 8)
        # points of the current subinterval return to it after exactly q steps
        u_top = state.current.left_endpoints("t")
        for letter in state.current.perm.top:
            x = u_top[letter] + state.current.lengths[letter] / 7
            y = x
            for step in range(1, state.q[letter] + 1):
                y = T.evaluate(y)
                inside = y < state.current.total()
                if step < state.q[letter]:
                    assert not inside
            assert y == state.current.evaluate(x)
