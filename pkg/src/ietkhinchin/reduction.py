"""Decorated Rauzy classes and the reduction to a smaller alphabet.

Color a class by a proper letter subset: an arrow is colored when its winner
is in the subset.  The colored subgraph splits the class into decorated
classes; deleting the non-colored letters from the essential elements (and
then trimming to an admissible end) maps each essential decorated class onto
a genuine Rauzy class on a smaller alphabet, arcs going to arrows.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Optional, Sequence

from .combinat import (
    BOTTOM,
    TOP,
    Arrow,
    Path,
    Permutation,
    RauzyClass,
    is_admissible,
    rauzy_class,
)

TRIVIAL = "trivial"
INTERMEDIATE = "intermediate"
ESSENTIAL = "essential"


def _check_colors(perm: Permutation, colors: Iterable[str]) -> frozenset[str]:
    colors = frozenset(colors)
    letters = set(perm.letters)
    if not colors or not colors < letters:
        raise ValueError("colors must be a proper non-empty subset of the alphabet")
    return colors


def classify(perm: Permutation, colors: Iterable[str]) -> str:
    """Essential, intermediate or trivial, by how many row-last letters are colored."""
    colors = _check_colors(perm, colors)
    hits = (perm.last(TOP) in colors) + (perm.last(BOTTOM) in colors)
    return (TRIVIAL, INTERMEDIATE, ESSENTIAL)[hits]


def is_colored(arrow: Arrow, colors: frozenset[str]) -> bool:
    return arrow.winner in colors


def is_separated_arrow(arrow: Arrow, avoid: frozenset[str]) -> bool:
    """Neither winner nor loser touches ``avoid``."""
    return arrow.winner not in avoid and arrow.loser not in avoid


def is_separated_path(path: Path, avoid: frozenset[str]) -> bool:
    return all(is_separated_arrow(a, avoid) for a in path.arrows)


def restrict_rows(perm: Permutation, keep: frozenset[str]) -> tuple[tuple[str, ...], tuple[str, ...]]:
    return (
        tuple(a for a in perm.top if a in keep),
        tuple(a for a in perm.bottom if a in keep),
    )


def admissible_end(top: Sequence[str], bottom: Sequence[str]) -> Permutation:
    """Trim a (possibly non-admissible) row pair to its admissible suffix.

    Repeatedly delete the shortest shared prefix block from both rows; the
    rows must end with different letters, which guarantees the result keeps
    at least two letters.
    """
    top = list(top)
    bottom = list(bottom)
    if top[-1] == bottom[-1]:
        raise ValueError("rows end with the same letter; no admissible end")
    while True:
        cut = None
        seen_top: set[str] = set()
        seen_bottom: set[str] = set()
        for k in range(len(top) - 1):
            seen_top.add(top[k])
            seen_bottom.add(bottom[k])
            if seen_top == seen_bottom:
                cut = k + 1
                break
        if cut is None:
            return Permutation(top, bottom)
        top = top[cut:]
        bottom = bottom[cut:]


class DecoratedClass:
    """One connected component of the colored subgraph, with its reduction."""

    def __init__(self, seed: Permutation, colors: Iterable[str], ambient: Optional[RauzyClass] = None):
        self.colors = _check_colors(seed, colors)
        self.ambient = ambient if ambient is not None else rauzy_class(seed)
        if seed not in self.ambient:
            raise ValueError("seed not in the ambient class")

        members: list[Permutation] = [seed]
        seen = {seed}
        queue = deque([seed])
        while queue:
            perm = queue.popleft()
            neighbours = []
            for kind in (TOP, BOTTOM):
                out = self.ambient.arrow(perm, kind)
                if is_colored(out, self.colors):
                    neighbours.append(out.end)
                back = self.ambient.inverse[perm].get(kind)
                if back is not None and is_colored(back, self.colors):
                    neighbours.append(back.start)
            for nxt in neighbours:
                if nxt not in seen:
                    seen.add(nxt)
                    members.append(nxt)
                    queue.append(nxt)
        self.members = tuple(members)
        self._member_set = seen
        self.classification = {p: classify(p, self.colors) for p in members}
        self.essentials = tuple(
            p for p in members if self.classification[p] == ESSENTIAL
        )

        self.arcs: tuple[Path, ...] = ()
        self.red_perm: dict[Permutation, Permutation] = {}
        self.red_arc: dict[Path, Arrow] = {}
        self.reduced_class: Optional[RauzyClass] = None
        self.reduced_letters: tuple[str, ...] = ()
        self._arc_from: dict[tuple[Permutation, str], Path] = {}
        if self.essentials:
            self._build_reduction()

    def __contains__(self, perm: Permutation) -> bool:
        return perm in self._member_set

    def is_essential_class(self) -> bool:
        return bool(self.essentials)

    def _follow_arc(self, start: Permutation, kind: str) -> Path:
        arrow = self.ambient.arrow(start, kind)
        if not is_colored(arrow, self.colors):
            raise AssertionError("essential element with a non-colored arrow")
        arrows = [arrow]
        while self.classification[arrows[-1].end] != ESSENTIAL:
            cursor = arrows[-1].end
            nxt = None
            for k in (TOP, BOTTOM):
                candidate = self.ambient.arrow(cursor, k)
                if is_colored(candidate, self.colors):
                    nxt = candidate
            if nxt is None:
                raise AssertionError("arc ran into a trivial element")
            arrows.append(nxt)
            if len(arrows) > start.d:
                raise AssertionError("arc longer than the alphabet")
        return Path(start, arrows)

    def _build_reduction(self) -> None:
        arcs = []
        for essential in self.essentials:
            for kind in (TOP, BOTTOM):
                arc = self._follow_arc(essential, kind)
                arcs.append(arc)
                self._arc_from[(essential, kind)] = arc
        self.arcs = tuple(arcs)

        for essential in self.essentials:
            top, bottom = restrict_rows(essential, self.colors)
            self.red_perm[essential] = admissible_end(top, bottom)
        first = self.red_perm[self.essentials[0]]
        self.reduced_letters = first.letters
        self.reduced_class = rauzy_class(first)
        for essential, reduced in self.red_perm.items():
            if reduced.letters != self.reduced_letters or reduced not in self.reduced_class:
                raise AssertionError("reductions landed in different classes")

        for arc in self.arcs:
            start_red = self.red_perm[arc.start]
            reduced_arrow = Arrow(start_red, arc.arrows[0].kind)
            if reduced_arrow.winner != arc.arrows[0].winner:
                raise AssertionError("reduced arrow winner mismatch")
            if reduced_arrow.loser != arc.arrows[0].loser:
                raise AssertionError("reduced arrow loser is not the first loser")
            if reduced_arrow.end != self.red_perm[arc.end]:
                raise AssertionError("reduced arrow does not join the reductions")
            self.red_arc[arc] = reduced_arrow

    def essential_image(self, perm: Permutation) -> Permutation:
        """The essential element reached from ``perm`` along colored arrows."""
        if perm not in self:
            raise ValueError("element not in this decorated class")
        cursor = perm
        hops = 0
        while self.classification[cursor] != ESSENTIAL:
            if self.classification[cursor] == TRIVIAL:
                raise ValueError("trivial element has no essential image")
            nxt = None
            for k in (TOP, BOTTOM):
                candidate = self.ambient.arrow(cursor, k)
                if is_colored(candidate, self.colors):
                    nxt = candidate
            cursor = nxt.end
            hops += 1
            if hops > cursor.d:
                raise AssertionError("no essential element reachable")
        return cursor

    def reduce_perm(self, perm: Permutation) -> Permutation:
        return self.red_perm[self.essential_image(perm)]


def decorated_class(
    perm: Permutation, colors: Iterable[str], ambient: Optional[RauzyClass] = None
) -> DecoratedClass:
    return DecoratedClass(perm, colors, ambient)


def all_decorated_classes(cls: RauzyClass, colors: Iterable[str]) -> list[DecoratedClass]:
    """Partition a Rauzy class into decorated classes for one color set."""
    colors = frozenset(colors)
    out = []
    assigned: set[Permutation] = set()
    for perm in cls.elements:
        if perm in assigned:
            continue
        dc = DecoratedClass(perm, colors, ambient=cls)
        assigned.update(dc.members)
        out.append(dc)
    return out


def reduce_path(dc: DecoratedClass, path: Path) -> Path:
    """Image of a colored path under the reduction, arc by arc.

    Arrows before the first essential vertex contribute nothing (only their
    essential endpoint); a trailing partial arc is completed through the
    forced colored continuation.
    """
    if not dc.is_essential_class():
        raise ValueError("reduction undefined: no essential elements")
    if path.start not in dc:
        raise ValueError("path does not live in this decorated class")
    for arrow in path.arrows:
        if not is_colored(arrow, dc.colors):
            raise ValueError("path is not colored")

    reduced_arrows: list[Arrow] = []
    i = 0
    arrows = path.arrows
    cursor = path.start
    # skip the leading intermediate stretch
    while i < len(arrows) and dc.classification[cursor] != ESSENTIAL:
        cursor = arrows[i].end
        i += 1
    if dc.classification[cursor] != ESSENTIAL:
        cursor = dc.essential_image(cursor)
    start_red = dc.red_perm[cursor]
    while i < len(arrows):
        kind = arrows[i].kind
        arc = dc._arc_from[(cursor, kind)]
        take = min(len(arc), len(arrows) - i)
        if tuple(arrows[i : i + take]) != arc.arrows[:take]:
            raise AssertionError("colored path deviates from the forced arc")
        reduced_arrows.append(dc.red_arc[arc])
        cursor = arc.end
        i += len(arc)
    return Path(start_red, reduced_arrows)


def drift(perm: Permutation, colors: Iterable[str]) -> tuple[int, int, int]:
    """Positions of the rightmost non-colored letter in each row, and their sum."""
    colors = _check_colors(perm, colors)
    d_top = max(i + 1 for i, a in enumerate(perm.top) if a not in colors)
    d_bottom = max(i + 1 for i, a in enumerate(perm.bottom) if a not in colors)
    return d_top, d_bottom, d_top + d_bottom


def is_drifting(arrow: Arrow, colors: Iterable[str]) -> bool:
    colors = frozenset(colors)
    return drift(arrow.end, colors)[2] == drift(arrow.start, colors)[2] + 1


def good_letters(dc: DecoratedClass, perm: Permutation) -> frozenset[str]:
    """Reduced-alphabet letters sitting left of the rightmost non-colored
    letter in either row."""
    if not dc.is_essential_class() or dc.classification.get(perm) != ESSENTIAL:
        raise ValueError("good letters are defined for essential elements")
    d_top, d_bottom, _ = drift(perm, dc.colors)
    good = set()
    for letter in dc.reduced_letters:
        if perm.position(TOP, letter) < d_top or perm.position(BOTTOM, letter) < d_bottom:
            good.add(letter)
    return frozenset(good)
