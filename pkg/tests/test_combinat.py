import pytest
from hypothesis import given, settings, strategies as st

from ietkhinchin.combinat import (
    BOTTOM,
    TOP,
    Arrow,
    Path,
    Permutation,
    all_admissible,
    all_classes,
    find_standard,
    is_admissible,
    is_complete,
    is_neat,
    is_positive,
    is_standard,
    parse_permutation,
    path_from_types,
    proper_borders,
    rauzy_class,
    rauzy_op,
)


def perm(text):
    return parse_permutation(text)


class TestAdmissibility:
    def test_rotation_datum(self):
        assert is_admissible(perm("AB/BA"))

    def test_identity_not_admissible(self):
        assert not is_admissible(perm("AB/AB"))

    def test_shared_prefix_block(self):
        # {A, B} fills positions 1..2 in both rows
        assert not is_admissible(perm("ABC/BAC"))

    def test_symmetric(self):
        assert is_admissible(perm("ABCD/DCBA"))


class TestRauzyOp:
    def test_top_on_symmetric_d3(self):
        assert rauzy_op(perm("ABC/CBA"), TOP) == perm("ABC/CAB")

    def test_bottom_on_symmetric_d3(self):
        assert rauzy_op(perm("ABC/CBA"), BOTTOM) == perm("ACB/CBA")

    def test_d2_fixed_by_both(self):
        assert rauzy_op(perm("AB/BA"), TOP) == perm("AB/BA")
        assert rauzy_op(perm("AB/BA"), BOTTOM) == perm("AB/BA")

    def test_preserves_admissibility_everywhere(self):
        for p in all_admissible("ABCD"):
            assert is_admissible(rauzy_op(p, TOP))
            assert is_admissible(rauzy_op(p, BOTTOM))


class TestRauzyClass:
    def test_sizes(self):
        assert len(rauzy_class(perm("AB/BA"))) == 1
        assert len(rauzy_class(perm("ABC/CBA"))) == 3
        assert len(rauzy_class(perm("ABCD/DCBA"))) == 7

    def test_d3_elements(self):
        cls = rauzy_class(perm("ABC/CBA"))
        assert set(cls.elements) == {perm("ABC/CBA"), perm("ABC/CAB"), perm("ACB/CBA")}

    def test_degree_two_in_two_out(self):
        cls = rauzy_class(perm("ABCD/DCBA"))
        for p in cls.elements:
            assert set(cls.out[p]) == {TOP, BOTTOM}
            assert set(cls.inverse[p]) == {TOP, BOTTOM}

    def test_first_letters_are_class_invariants(self):
        for cls in all_classes("ABCD"):
            xs = {p.first(TOP) for p in cls.elements}
            ys = {p.first(BOTTOM) for p in cls.elements}
            assert len(xs) == 1 and len(ys) == 1

    def test_rejects_inadmissible_seed(self):
        with pytest.raises(ValueError):
            rauzy_class(perm("AB/AB"))

    def test_class_size_cross_check(self):
        # independent count: partition of all admissible d=4 data into classes
        total = sum(len(c) for c in all_classes("ABCD"))
        assert total == len(all_admissible("ABCD"))


class TestStandard:
    def test_symmetric_is_standard(self):
        assert find_standard(rauzy_class(perm("ABC/CBA"))) == perm("ABC/CBA")
        assert find_standard(rauzy_class(perm("AB/BA"))) == perm("AB/BA")

    def test_scan_from_nonstandard_seed(self):
        assert find_standard(rauzy_class(perm("ABC/CAB"))) == perm("ABC/CBA")

    def test_every_class_has_one(self):
        for letters in ("AB", "ABC", "ABCD"):
            for cls in all_classes(letters):
                assert is_standard(find_standard(cls))


class TestPaths:
    def test_composition_and_prefix(self):
        p = perm("AB/BA")
        tb = path_from_types(p, "tb")
        t = path_from_types(p, "t")
        assert tb.begins_with(t)
        assert not t.begins_with(tb)
        assert t.then(path_from_types(t.end, "b")) == tb

    def test_ends_with_requires_vertex_match(self):
        p3 = perm("ABC/CBA")
        pth = path_from_types(p3, "tt")
        suffix = path_from_types(pth.arrows[-1].start, "t")
        assert pth.ends_with(suffix)

    def test_bad_composition_rejected(self):
        p3 = perm("ABC/CBA")
        other = path_from_types(p3, "b")  # starts at ABC/CBA, not at the t-arrow's end
        with pytest.raises(ValueError):
            path_from_types(p3, "t").then(other)


class TestPathPredicates:
    def test_neat_single_arrow(self):
        assert is_neat(path_from_types(perm("AB/BA"), "t"))

    def test_neat_tb(self):
        assert is_neat(path_from_types(perm("AB/BA"), "tb"))

    def test_not_neat_tbt(self):
        assert not is_neat(path_from_types(perm("AB/BA"), "tbt"))

    def test_trivial_rejected(self):
        with pytest.raises(ValueError):
            is_neat(Path(perm("AB/BA")))

    def test_borders_found(self):
        assert proper_borders(path_from_types(perm("AB/BA"), "tbt")) == [1]

    def test_positive(self):
        assert not is_positive(Path(perm("AB/BA")))
        assert is_positive(path_from_types(perm("AB/BA"), "tb"))
        assert not is_positive(path_from_types(perm("ABC/CBA"), "t"))

    def test_complete(self):
        assert not is_complete(Path(perm("AB/BA")))
        assert is_complete(path_from_types(perm("AB/BA"), "tb"))
        assert not is_complete(path_from_types(perm("AB/BA"), "tt"))


@given(st.integers(0, 2**30 - 1), st.sampled_from(["AB/BA", "ABC/CBA", "ABCD/DCBA"]))
@settings(max_examples=60, deadline=None)
def test_random_paths_stay_in_class(bits, seed_text):
    start = parse_permutation(seed_text)
    cls = rauzy_class(start)
    path = Path(start)
    for i in range(12):
        path = path.extended(TOP if (bits >> i) & 1 else BOTTOM)
    assert path.end in cls
    assert len(path) == 12


def test_serialization_roundtrip():
    p = perm("A B C / C B A")
    assert parse_permutation(str(p)) == p
    assert p == perm("ABC/CBA")
