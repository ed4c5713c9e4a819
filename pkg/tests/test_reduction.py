import itertools
import random

import pytest

from ietkhinchin.combinat import (
    BOTTOM,
    TOP,
    Path,
    all_classes,
    is_complete,
    parse_permutation,
    rauzy_class,
)
from ietkhinchin.matrices import q_vector
from ietkhinchin.reduction import (
    ESSENTIAL,
    INTERMEDIATE,
    TRIVIAL,
    admissible_end,
    all_decorated_classes,
    classify,
    decorated_class,
    drift,
    good_letters,
    is_colored,
    is_drifting,
    reduce_path,
)


def perm(text):
    return parse_permutation(text)


class TestClassify:
    def test_essential(self):
        assert classify(perm("ABC/CAB"), {"B", "C"}) == ESSENTIAL

    def test_trivial(self):
        assert classify(perm("ABC/CBA"), {"B"}) == TRIVIAL

    def test_intermediate(self):
        assert classify(perm("ABC/CAB"), {"C"}) == INTERMEDIATE

    def test_improper_colors_rejected(self):
        with pytest.raises(ValueError):
            classify(perm("ABC/CBA"), {"A", "B", "C"})
        with pytest.raises(ValueError):
            classify(perm("ABC/CBA"), set())


class TestAdmissibleEnd:
    def test_already_admissible(self):
        assert admissible_end(("A", "B"), ("B", "A")) == perm("AB/BA")

    def test_single_block_trim(self):
        assert admissible_end(("A", "B", "C"), ("A", "C", "B")) == perm("BC/CB")

    def test_iterated_trim(self):
        assert admissible_end(("A", "B", "C"), ("A", "B", "C")[:2] + ("C",)) == perm("BC/BC") if False else True
        # two nested blocks: {A} then {B}
        assert admissible_end(("A", "B", "C", "D"), ("A", "B", "D", "C")) == perm("CD/DC")

    def test_same_last_letter_rejected(self):
        with pytest.raises(ValueError):
            admissible_end(("A", "B"), ("B", "A", "A")[:2][::-1] + ()) if False else None
        with pytest.raises(ValueError):
            admissible_end(("A", "B", "C"), ("B", "A", "C"))


class TestDecoratedClasses:
    def test_d2_singleton_intermediate(self):
        dc = decorated_class(perm("AB/BA"), {"A"})
        assert len(dc.members) == 1
        assert not dc.is_essential_class()

    def test_d3_essential_component(self):
        dc = decorated_class(perm("ABC/CBA"), {"A", "B"})
        assert set(dc.members) == {perm("ABC/CBA"), perm("ACB/CBA")}
        assert dc.essentials == (perm("ACB/CBA"),)
        assert dc.reduced_letters == ("A", "B")
        assert dc.red_perm[perm("ACB/CBA")] == perm("AB/BA")

    def test_partition_of_class(self):
        cls = rauzy_class(perm("ABCD/DCBA"))
        for size in (1, 2, 3):
            for colors in itertools.combinations("ABCD", size):
                dcs = all_decorated_classes(cls, colors)
                members = [p for dc in dcs for p in dc.members]
                assert sorted(map(str, members)) == sorted(map(str, cls.elements))

    def test_arc_structure(self):
        for letters in ("ABC", "ABCD"):
            for cls in all_classes(letters):
                for size in range(1, len(letters)):
                    for colors in itertools.combinations(letters, size):
                        for dc in all_decorated_classes(cls, colors):
                            if not dc.is_essential_class():
                                continue
                            # each essential starts one top and one bottom arc
                            assert len(dc.arcs) == 2 * len(dc.essentials)
                            ends_top = {}
                            ends_bottom = {}
                            for arc in dc.arcs:
                                kinds = {a.kind for a in arc.arrows}
                                winners = {a.winner for a in arc.arrows}
                                assert len(kinds) == 1 and len(winners) == 1
                                losers = [a.loser for a in arc.arrows]
                                assert len(set(losers)) == len(losers)
                                assert losers[0] in dc.colors
                                assert all(x not in dc.colors for x in losers[1:])
                                bucket = ends_top if arc.arrows[0].kind == TOP else ends_bottom
                                bucket[arc.end] = bucket.get(arc.end, 0) + 1
                            # and ends exactly one of each kind
                            for e in dc.essentials:
                                assert ends_top.get(e) == 1
                                assert ends_bottom.get(e) == 1

    def test_reduction_bijective_up_to_d5(self):
        for letters in ("AB", "ABC", "ABCD", "ABCDE"):
            for cls in all_classes(letters):
                for size in range(1, len(letters)):
                    for colors in itertools.combinations(letters, size):
                        for dc in all_decorated_classes(cls, colors):
                            if not dc.is_essential_class():
                                continue
                            images = set(dc.red_perm.values())
                            assert len(images) == len(dc.essentials)
                            assert images == set(dc.reduced_class.elements)


class TestReducePath:
    def test_trivial_at_essential(self):
        dc = decorated_class(perm("ABC/CBA"), {"A", "B"})
        e = dc.essentials[0]
        assert reduce_path(dc, Path(e)) == Path(dc.red_perm[e])

    def test_single_arc_becomes_single_arrow(self):
        dc = decorated_class(perm("ABC/CBA"), {"A", "B"})
        for arc in dc.arcs:
            reduced = reduce_path(dc, arc)
            assert len(reduced) == 1
            assert reduced.arrows[0].kind == arc.arrows[0].kind
            assert reduced.arrows[0].winner == arc.arrows[0].winner
            assert reduced.arrows[0].loser == arc.arrows[0].loser

    def test_concatenation_preserved(self):
        dc = decorated_class(perm("ABC/CBA"), {"A", "B"})
        e = dc.essentials[0]
        arc_top = dc._arc_from[(e, TOP)]
        arc_bottom = dc._arc_from[(arc_top.end, BOTTOM)]
        both = arc_top.then(arc_bottom)
        assert reduce_path(dc, both) == reduce_path(dc, arc_top).then(
            reduce_path(dc, arc_bottom)
        )

    def test_uncolored_path_rejected(self):
        dc = decorated_class(perm("ABC/CBA"), {"A", "B"})
        bad = Path(perm("ABC/CBA")).extended(TOP)  # winner C not colored
        with pytest.raises(ValueError):
            reduce_path(dc, bad)


def colored_paths(dc, start, max_len):
    """All colored paths from start up to the given length."""
    out = [Path(start)]
    frontier = [Path(start)]
    for _ in range(max_len):
        new_frontier = []
        for path in frontier:
            for kind in (TOP, BOTTOM):
                arrow = dc.ambient.arrow(path.end, kind)
                if is_colored(arrow, dc.colors):
                    new_frontier.append(path.then(Path(path.end, [arrow])))
        out.extend(new_frontier)
        frontier = new_frontier
    return out


class TestQIdentities:
    def test_single_avoided_letter_d_le_4(self):
        # return times survive reduction for the surviving letters and stall
        # at one for the colored-but-deleted ones
        for letters in ("ABC", "ABCD"):
            for cls in all_classes(letters):
                for avoided in letters:
                    colors = frozenset(letters) - {avoided}
                    for dc in all_decorated_classes(cls, colors):
                        if not dc.is_essential_class():
                            continue
                        surviving = set(dc.reduced_letters)
                        start = dc.essentials[0]
                        for path in colored_paths(dc, start, 6):
                            reduced = reduce_path(dc, path)
                            q_full = dict(zip(sorted(letters), q_vector(path)))
                            q_red = dict(
                                zip(dc.reduced_letters, q_vector(reduced))
                            )
                            for letter in surviving:
                                assert q_full[letter] == q_red[letter]
                            for letter in colors - surviving:
                                assert q_full[letter] == 1


class TestDrift:
    def test_example(self):
        assert drift(perm("ABC/CAB"), {"B", "C"}) == (1, 2, 3)

    def test_essential_bounds(self):
        for cls in all_classes("ABCD"):
            for size in range(1, 4):
                for colors in itertools.combinations("ABCD", size):
                    for dc in all_decorated_classes(cls, colors):
                        for e in dc.essentials:
                            d_top, d_bottom, _ = drift(e, colors)
                            assert d_top < 4 and d_bottom < 4

    def test_arrow_increment(self):
        for cls in all_classes("ABCD"):
            for size in range(1, 4):
                for colors in itertools.combinations("ABCD", size):
                    colors = frozenset(colors)
                    for p in cls.elements:
                        if classify(p, colors) == TRIVIAL:
                            continue
                        for kind in (TOP, BOTTOM):
                            arrow = cls.arrow(p, kind)
                            if not is_colored(arrow, colors):
                                continue
                            if classify(arrow.end, colors) == TRIVIAL:
                                continue
                            before = drift(p, colors)[2]
                            after = drift(arrow.end, colors)[2]
                            assert after in (before, before + 1)


class TestGoodLetters:
    def test_nonempty_for_essentials(self):
        for cls in all_classes("ABCD"):
            for size in range(1, 4):
                for colors in itertools.combinations("ABCD", size):
                    for dc in all_decorated_classes(cls, colors):
                        for e in dc.essentials:
                            assert good_letters(dc, e)

    def test_stable_along_essential_arrows(self):
        for cls in all_classes("ABCD"):
            for size in range(1, 4):
                for colors in itertools.combinations("ABCD", size):
                    for dc in all_decorated_classes(cls, colors):
                        for e in dc.essentials:
                            for kind in (TOP, BOTTOM):
                                arrow = dc.ambient.arrow(e, kind)
                                if not is_colored(arrow, dc.colors):
                                    continue
                                if dc.classification.get(arrow.end) != ESSENTIAL:
                                    continue
                                assert good_letters(dc, e) <= good_letters(dc, arrow.end)
                                if not is_drifting(arrow, dc.colors):
                                    assert arrow.winner not in good_letters(dc, e)

    def test_rejects_non_essential(self):
        dc = decorated_class(perm("ABC/CBA"), {"A", "B"})
        with pytest.raises(ValueError):
            good_letters(dc, perm("ABC/CBA"))


class TestSeparatedDecomposition:
    def test_nondrifting_blocks_reduce_noncomplete(self):
        # maximal separated paths split at drifting arrows; the blocks in
        # between reduce to non-complete paths
        from ietkhinchin.reduction import is_separated_arrow

        for cls in all_classes("ABCD"):
            for avoided_size in (1, 2):
                for avoided in itertools.combinations("ABCD", avoided_size):
                    avoided = frozenset(avoided)
                    colors = frozenset("ABCD") - avoided
                    for dc in all_decorated_classes(cls, colors):
                        if not dc.is_essential_class():
                            continue
                        start = dc.essentials[0]
                        stack = [Path(start)]
                        leaves = []
                        while stack:
                            path = stack.pop()
                            if len(path) >= 6:
                                continue
                            top_arrow = dc.ambient.arrow(path.end, TOP)
                            if is_separated_arrow(top_arrow, avoided):
                                for kind in (TOP, BOTTOM):
                                    arrow = dc.ambient.arrow(path.end, kind)
                                    stack.append(path.then(Path(path.end, [arrow])))
                            elif len(path):
                                leaves.append(path)
                        for path in leaves[:8]:
                            blocks = []
                            block_start = 0
                            for i, arrow in enumerate(path.arrows):
                                if is_drifting(arrow, colors):
                                    if i > block_start:
                                        blocks.append((block_start, i))
                                    block_start = i + 1
                            for lo, hi in blocks:
                                segment = Path(
                                    path.arrows[lo].start, path.arrows[lo:hi]
                                )
                                reduced = reduce_path(dc, segment)
                                if len(reduced):
                                    assert not is_complete(reduced)
