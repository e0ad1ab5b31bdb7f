"""The critical path: precritical points, gaps, and Fatou intervals.

The path from the critical point ``*nu`` to the critical value ``nu`` is
grown by repeatedly inserting, between adjacent points ``a < b`` with
``k = diff(a, b) < INF``, the unique precritical point of depth ``k``
compatible with both neighbours.  Pairs with ``diff = INF`` form gaps;
those are closed by a pair of Fatou intervals around the gap's central
itinerary.  Dyadic labels follow the midpoint rule exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from .errors import NotAGap, NotStarPeriodic, TrivialKneadingSequence
from .symbolic import (
    EPSeq,
    INF,
    KneadingSequence,
    STAR,
    AnySeq,
    diff,
    format_sequence,
    precritical,
)


@dataclass(frozen=True)
class PathPoint:
    """One point of the critical path, in path order.

    kind is one of ``critical-point``, ``precritical``, ``critical-value``,
    ``central`` (a gap's central itinerary), ``limit`` (the lower sequence
    adjacent to ``nu``).  ``label`` is the exact dyadic parameter, or None
    for limit points squeezed in without one.
    """

    seq: AnySeq
    kind: str
    label: Optional[Fraction]
    depth: Optional[int] = None

    def word(self) -> Optional[Tuple]:
        """The ``w`` of a precritical point ``w*nu``."""
        if self.depth is None:
            return None
        if self.seq.exact:
            expand = [self.seq.at(i) for i in range(1, self.depth)]
        else:
            expand = list(self.seq.word[: self.depth - 1])
        return tuple(expand)


@dataclass(frozen=True)
class Gap:
    left: AnySeq
    right: AnySeq
    central: AnySeq


@dataclass(frozen=True)
class FatouInterval:
    """An abstract arc between a diff-INF pair; ``a`` precedes ``b``."""

    a: AnySeq
    b: AnySeq


@dataclass
class CriticalPath:
    nu: KneadingSequence
    points: List[PathPoint]
    gaps: List[Gap]
    fatou: List[FatouInterval] = field(default_factory=list)
    depth_built: int = 1


def _require_nontrivial(nu: KneadingSequence) -> None:
    if nu.trivial:
        raise TrivialKneadingSequence("the trivial sequence has no critical path")


def _merge_letters(a: AnySeq, b: AnySeq, upto: int) -> Tuple:
    """Letters forced position-wise by two diff-INF-compatible sequences;
    at each position at most one of them carries the wildcard."""
    out = []
    for i in range(1, upto + 1):
        x, y = a.at(i), b.at(i)
        if x is STAR:
            assert y is not STAR, "adjacent path points share a wildcard position"
            out.append(y)
        else:
            assert y is STAR or x == y, "merge called on differing sequences"
            out.append(x)
    return tuple(out)


def _insert_between(a: AnySeq, b: AnySeq, nu: KneadingSequence):
    """The depth-k point between adjacent a, b, or None for a gap."""
    k = diff(a, b)
    if k is INF:
        return None
    return precritical(_merge_letters(a, b, k - 1), nu)


def build_pn(nu: KneadingSequence, n: int) -> CriticalPath:
    """The ordered set P_n of precritical points, with gaps recorded.

    P_1 = {*nu < nu} with labels 0 and 1; each stage inserts the midpoint
    point between every adjacent non-gap pair.
    """
    _require_nontrivial(nu)
    if n < 1:
        raise ValueError("stage must be at least 1")
    star_nu = nu.critical_point()
    points: List[Tuple[AnySeq, Fraction]] = [(star_nu, Fraction(0)),
                                             (nu.seq, Fraction(1))]
    for _ in range(n - 1):
        nxt: List[Tuple[AnySeq, Fraction]] = [points[0]]
        for (a, la), (b, lb) in zip(points, points[1:]):
            p = _insert_between(a, b, nu)  # None on a gap pair; diff is cached
            if p is not None:
                nxt.append((p, (la + lb) / 2))
            nxt.append((b, lb))
        points = nxt

    # a no-difference answer certifies a gap only for exact sequences;
    # for truncated input it just means "unsplit within the window"
    gaps = [Gap(a, b, central_between(a, b))
            for (a, _), (b, _) in zip(points, points[1:])
            if a.exact and b.exact and diff(a, b) is INF]

    out = []
    for i, (s, label) in enumerate(points):
        if i == 0:
            out.append(PathPoint(s, "critical-point", label, depth=1))
        elif i == len(points) - 1:
            out.append(PathPoint(s, "critical-value", label, depth=None))
        else:
            out.append(PathPoint(s, "precritical", label, depth=s.star_depth()))
    return CriticalPath(nu=nu, points=out, gaps=gaps, depth_built=n)


def central_between(a: AnySeq, b: AnySeq) -> EPSeq:
    """The unique wildcard-free sequence with diff = INF to both sides,
    read position-wise from whichever side carries a letter."""
    if not (a.exact and b.exact):
        raise NotAGap("gaps only occur for exact star-periodic sequences")
    bound = max(len(a.pre), len(b.pre)) + math.lcm(len(a.per), len(b.per))
    word = _merge_letters(a, b, bound)
    m = max(len(a.pre), len(b.pre))
    return EPSeq(word[:m], word[m:], a.degree)


def central_itinerary(gap: Gap, nu: KneadingSequence) -> EPSeq:
    if diff(gap.left, gap.right) is not INF:
        raise NotAGap("pair has a finite first difference")
    return central_between(gap.left, gap.right)


def nu_neighbor_chain(nu: KneadingSequence, min_depth: int) -> List[AnySeq]:
    """Successive points adjacent to ``nu`` on the path, refined locally
    until the neighbour's depth exceeds ``min_depth``.

    Refining just this one pair gives the same neighbours as running the
    full stage recursion, at linear instead of exponential cost.
    """
    _require_nontrivial(nu)
    chain = [nu.critical_point()]
    while True:
        cur = chain[-1]
        d = cur.star_depth()
        if d is not None and d > min_depth:
            return chain
        p = _insert_between(cur, nu.seq, nu)
        if p is None:
            return chain  # gap reached; the neighbour is final
        chain.append(p)


def lower_sequence(nu: KneadingSequence) -> EPSeq:
    """The unique itinerary ``omega`` bounding the Fatou interval at nu:
    nu with every wildcard replaced by one fixed letter.

    For standard bifurcations omega is the central itinerary of the gap
    adjacent to nu; otherwise the letter is read off a deep enough
    neighbour of nu (stabilized past depth 2p, re-checked at 4p).
    """
    if not nu.star_periodic:
        raise NotStarPeriodic("the lower sequence exists for star-periodic nu only")
    _require_nontrivial(nu)
    p = nu.period

    chain = nu_neighbor_chain(nu, 4 * p)
    last = chain[-1]
    if diff(last, nu.seq) is INF:
        return central_between(last, nu.seq)

    def letter_at_depth(min_depth):
        for pt in chain:
            d = pt.star_depth()
            if d is not None and d > min_depth:
                return pt.at(p)
        raise AssertionError("neighbour chain stopped before requested depth")

    e = letter_at_depth(2 * p)
    assert e == letter_at_depth(4 * p), "lower-sequence letter failed to stabilize"
    word = tuple(e if x is STAR else x for x in nu.seq.per)
    return EPSeq((), word, nu.degree)


def build_critical_path(nu: KneadingSequence, n: int) -> CriticalPath:
    """P_n plus Fatou structure: two Fatou intervals around every gap's
    central itinerary, and for star-periodic nu the interval [omega, nu].
    Non-periodic sequences have no Fatou intervals.
    """
    path = build_pn(nu, n)
    if not nu.star_periodic:
        return path

    by_pair = {(g.left, g.right): g for g in path.gaps}
    points = []
    for cur, nxt in zip(path.points, path.points[1:] + [None]):
        points.append(cur)
        if nxt is not None and (cur.seq, nxt.seq) in by_pair:
            g = by_pair[(cur.seq, nxt.seq)]
            label = None
            if cur.label is not None and nxt.label is not None:
                label = (cur.label + nxt.label) / 2
            points.append(PathPoint(g.central, "central", label))
            path.fatou.append(FatouInterval(cur.seq, g.central))
            path.fatou.append(FatouInterval(g.central, nxt.seq))

    omega = lower_sequence(nu)
    if all(pt.seq != omega for pt in points):
        points.insert(len(points) - 1, PathPoint(omega, "limit", None))
        path.fatou.append(FatouInterval(omega, nu.seq))

    path.points = points
    return path


@dataclass(frozen=True)
class AlphaWitness:
    alpha: EPSeq
    kind: str  # "gap-central" | "rho-chain"
    chain: Tuple[AnySeq, ...] = ()


def alpha_point(nu: KneadingSequence, chain_length: int = 12) -> AlphaWitness:
    """The fixed point ovl(1), always on the critical path.

    Witness: either the gap whose central itinerary it is (sequences of
    the form ovl(1..1*)), or the chain rho_n of precritical points that
    converges to it, with diff(rho_n, ovl(1)) >= n - 1.
    """
    _require_nontrivial(nu)
    alpha = EPSeq((), (1,), nu.degree)
    letters = nu.seq.per if nu.exact else nu.seq.word
    if nu.exact and not nu.seq.pre and all(x is STAR or x == 1 for x in letters):
        return AlphaWitness(alpha, "gap-central")

    rho = [nu.seq, nu.critical_point()]
    while len(rho) < chain_length:
        p = _insert_between(rho[-1], rho[-2], nu)
        if p is None:
            break
        rho.append(p)
    return AlphaWitness(alpha, "rho-chain", tuple(rho))


# ---------------------------------------------------------------------------
# text table export


def _fmt_label(label: Optional[Fraction]) -> str:
    if label is None:
        return "-"
    return f"{label.numerator}/{label.denominator}"


def path_table(path: CriticalPath) -> str:
    """One row per point in path order: kind, depth, word w, dyadic label,
    gap/Fatou markers.  Column order fixed."""
    fatou_ends = {}
    for iv in path.fatou:
        fatou_ends.setdefault(iv.a, []).append(iv.b)
        fatou_ends.setdefault(iv.b, []).append(iv.a)
    gap_sides = set()
    for g in path.gaps:
        gap_sides.update((g.left, g.right))

    rows = [("#", "kind", "depth", "word", "label", "markers")]
    for i, pt in enumerate(path.points, start=1):
        markers = []
        if pt.kind == "central":
            markers.append("gap-central")
        elif pt.seq in gap_sides:
            markers.append("gap-boundary")
        if pt.seq in fatou_ends:
            markers.append("fatou")
        if pt.kind == "critical-value":
            word = "-"
        elif pt.depth is not None:
            w = pt.word()
            word = "".join("*" if x is STAR else str(x) for x in w) if w else "e"
        else:
            word = format_sequence(pt.seq)
        depth = str(pt.depth) if pt.depth is not None else "-"
        rows.append((str(i), pt.kind, depth, word, _fmt_label(pt.label),
                     ",".join(markers)))

    widths = [max(len(r[c]) for r in rows) for c in range(6)]
    lines = ["  ".join(r[c].ljust(widths[c]) for c in range(6)).rstrip()
             for r in rows]
    return "\n".join(lines) + "\n"
