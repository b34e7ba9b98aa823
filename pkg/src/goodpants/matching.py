"""Flat-torus feet geometry and the Hall-marriage gluing engine.

The bipartite graph joins minus ends (left) to plus ends (right) of one
curve; the edge rule is the strict inequality
dist(ft(left), ft(right) + 1 + i*pi) < eps/R on N^1(sqrt(gamma)).
Maximum matchings come from Hopcroft-Karp; when no perfect matching exists
the final BFS layer yields an exact Hall violation witness.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from .pants import TWO_PI, FlatTorusPoint

GLUING_SHIFT = complex(1.0, math.pi)


class LatticeMismatch(ValueError):
    """Torus points live on different lattices."""


class UnbalancedSides(ValueError):
    """#left != #right; no bijection can exist."""


def torus_distance(p: FlatTorusPoint, q: FlatTorusPoint, tol: float = 1e-9) -> float:
    """Flat metric on C / (hl Z + 2 pi i Z): min over lattice translates."""
    if not p.same_lattice(q, tol):
        raise LatticeMismatch(f"lattices {p.hl} and {q.hl} differ")
    diff = FlatTorusPoint(p.z - q.z, p.hl).z
    best = math.inf
    for m in (-2, -1, 0, 1, 2):
        for n in (-1, 0, 1):
            cand = abs(diff - m * p.hl - complex(0.0, TWO_PI * n))
            if cand < best:
                best = cand
    return best


def glued_distance(minus_foot: FlatTorusPoint, plus_foot: FlatTorusPoint) -> float:
    """Distance of the minus foot from the shifted plus foot, tau(x) = x+1+i pi."""
    return torus_distance(minus_foot, plus_foot.translated(GLUING_SHIFT))


@dataclass(frozen=True)
class FeetGraph:
    """Bipartite good-gluing graph along one curve."""

    left: tuple
    right: tuple
    threshold: float
    edges: tuple  # edges[i] = sorted tuple of right indices adjacent to left i

    @property
    def edge_count(self) -> int:
        return sum(len(adj) for adj in self.edges)


def build_feet_graph(lefts, rights, eps: float, R: float, feet=None,
                     threshold: float = None) -> FeetGraph:
    """Edge (i, j) iff dist(ft(left_i), tau(ft(right_j))) < threshold
    (default eps/R, strict).  `feet` extracts a FlatTorusPoint from an entry
    (defaults to the `foot` attribute)."""
    if threshold is None:
        threshold = eps / R
    if feet is None:
        feet = lambda end: end.foot
    lf = [feet(e) for e in lefts]
    rf = [feet(e).translated(GLUING_SHIFT) for e in rights]
    edges = []
    for i, p in enumerate(lf):
        row = [j for j, q in enumerate(rf) if torus_distance(p, q) < threshold]
        edges.append(tuple(row))
    return FeetGraph(tuple(lefts), tuple(rights), threshold, tuple(edges))


@dataclass(frozen=True)
class Matching:
    """Either a perfect matching (pairs) or a Hall violation witness."""

    pairs: tuple = field(default=None)   # tuple of (left index, right index)
    witness: tuple = field(default=None)  # left indices with #A > #N(A)
    witness_neighbors: tuple = field(default=None)

    @property
    def is_perfect(self) -> bool:
        return self.pairs is not None


def _hopcroft_karp(n_left, n_right, adj):
    """Maximum matching; returns (match_l, match_r) with -1 for unmatched."""
    INF = math.inf
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    dist = [0.0] * n_left

    def bfs():
        queue = deque()
        for u in range(n_left):
            if match_l[u] == -1:
                dist[u] = 0.0
                queue.append(u)
            else:
                dist[u] = INF
        found = INF
        while queue:
            u = queue.popleft()
            if dist[u] >= found:
                continue
            for v in adj[u]:
                w = match_r[v]
                if w == -1:
                    found = dist[u] + 1.0
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1.0
                    queue.append(w)
        return found is not INF

    def dfs(u):
        for v in adj[u]:
            w = match_r[v]
            if w == -1 or (dist[w] == dist[u] + 1.0 and dfs(w)):
                match_l[u] = v
                match_r[v] = u
                return True
        dist[u] = math.inf
        return False

    while bfs():
        for u in range(n_left):
            if match_l[u] == -1:
                dfs(u)
    return match_l, match_r


def perfect_matching(g: FeetGraph) -> Matching:
    """A perfect matching when one exists, else the Hall witness given by the
    left vertices reachable by alternating paths from an unmatched vertex."""
    n_l, n_r = len(g.left), len(g.right)
    if n_l != n_r:
        raise UnbalancedSides(f"{n_l} left ends vs {n_r} right ends")
    match_l, match_r = _hopcroft_karp(n_l, n_r, g.edges)
    if all(v != -1 for v in match_l):
        return Matching(pairs=tuple(sorted(enumerate(match_l))))
    # Koenig-style alternating reachability from the unmatched left vertices.
    reach_l = [u for u in range(n_l) if match_l[u] == -1]
    seen_l = set(reach_l)
    seen_r = set()
    queue = deque(reach_l)
    while queue:
        u = queue.popleft()
        for v in g.edges[u]:
            if v in seen_r:
                continue
            seen_r.add(v)
            w = match_r[v]
            if w != -1 and w not in seen_l:
                seen_l.add(w)
                queue.append(w)
    witness = tuple(sorted(seen_l))
    neighbors = tuple(sorted(seen_r))
    assert len(witness) > len(neighbors)
    return Matching(witness=witness, witness_neighbors=neighbors)


# ---------------------------------------------------------------------------
# measurable-set checkers: finite unions of axis-aligned torus rectangles


@dataclass(frozen=True)
class TorusRectangle:
    """[x0, x0+w) x [y0, y0+h) on the torus with Re-period p = Re hl and
    Im-period 2 pi; w <= p, h <= 2 pi."""

    x0: float
    y0: float
    w: float
    h: float

    def __post_init__(self):
        if self.w < 0.0 or self.h < 0.0:
            raise ValueError("rectangle sides must be nonnegative")


def _wrap_intervals(start: float, width: float, period: float):
    """Decompose a wrapped interval into pieces of [0, period)."""
    start %= period
    width = min(width, period)
    if start + width <= period:
        return [(start, start + width)]
    return [(start, period), (0.0, start + width - period)]


def _union_area(rects, period_x: float, period_y: float) -> float:
    """Exact area of a union of axis-aligned rectangles via grid decomposition."""
    pieces = []
    for r in rects:
        for x0, x1 in _wrap_intervals(r.x0, r.w, period_x):
            for y0, y1 in _wrap_intervals(r.y0, r.h, period_y):
                if x1 > x0 and y1 > y0:
                    pieces.append((x0, x1, y0, y1))
    if not pieces:
        return 0.0
    xs = sorted({v for p in pieces for v in (p[0], p[1])})
    ys = sorted({v for p in pieces for v in (p[2], p[3])})
    area = 0.0
    for i in range(len(xs) - 1):
        for j in range(len(ys) - 1):
            cx = (xs[i] + xs[i + 1]) / 2.0
            cy = (ys[j] + ys[j + 1]) / 2.0
            if any(p[0] <= cx < p[1] and p[2] <= cy < p[3] for p in pieces):
                area += (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j])
    return area


def _grow(rects, margin: float, period_x: float, period_y: float):
    grown = []
    for r in rects:
        w = min(r.w + 2.0 * margin, period_x)
        h = min(r.h + 2.0 * margin, period_y)
        grown.append(TorusRectangle(r.x0 - margin, r.y0 - margin, w, h))
    return grown


def _grow_inner(rects, eta: float, period_x: float, period_y: float):
    """Rectangles contained in the Euclidean eta-dilation: horizontal strip,
    vertical strip, and inscribed-square dilations of each rectangle."""
    s = eta / math.sqrt(2.0)
    grown = []
    for r in rects:
        grown.append(TorusRectangle(r.x0 - eta, r.y0, min(r.w + 2 * eta, period_x), r.h))
        grown.append(TorusRectangle(r.x0, r.y0 - eta, r.w, min(r.h + 2 * eta, period_y)))
        grown.append(TorusRectangle(r.x0 - s, r.y0 - s,
                                    min(r.w + 2 * s, period_x),
                                    min(r.h + 2 * s, period_y)))
    return grown


@dataclass(frozen=True)
class GrowthReport:
    area: float                 # lambda(A), probability normalized
    grown_area: tuple           # [inner, outer] bracket for lambda(N_eta A)
    ratio: tuple                # [inner, outer] bracket for the growth ratio
    required: float             # 1 + eta/R
    applicable: bool            # outer area <= 1/2 so the bound is asserted
    holds: bool                 # None-like False when not applicable


def neighborhood_growth(rects, hl: complex, eta: float, R: float) -> GrowthReport:
    """Measure lambda(A), bracket lambda(N_eta A) and compare the growth ratio
    with the Cheeger-derived bound 1 + eta/R.

    The Euclidean eta-neighborhood is bracketed between dilations by the
    inscribed square (margin eta/sqrt(2)) and the circumscribed square
    (margin eta); both are exact rectangle-union areas.
    """
    px, py = hl.real, TWO_PI
    total = px * py
    area = _union_area(rects, px, py) / total
    inner = _union_area(_grow_inner(rects, eta, px, py), px, py) / total
    outer = _union_area(_grow(rects, eta, px, py), px, py) / total
    required = 1.0 + eta / R
    if area == 0.0:
        return GrowthReport(0.0, (inner, outer), (math.inf, math.inf), required, False, False)
    ratio = (inner / area, outer / area)
    applicable = outer <= 0.5
    holds = applicable and ratio[0] > required
    return GrowthReport(area, (inner, outer), ratio, required, applicable, holds)


def _point_in_rect(z: complex, r: TorusRectangle, px: float, py: float,
                   margin: float = 0.0) -> bool:
    dx = _axis_dist(z.real, r.x0, r.w, px)
    dy = _axis_dist(z.imag, r.y0, r.h, py)
    return dx * dx + dy * dy <= margin * margin


def _axis_dist(v: float, start: float, width: float, period: float) -> float:
    """Distance from v to the wrapped interval [start, start+width) mod period."""
    offset = (v - start) % period
    if offset <= width:
        return 0.0
    return min(offset - width, period - offset)


def count_feet(feet, rects, hl: complex, margin: float = 0.0) -> int:
    px, py = hl.real, TWO_PI
    return sum(
        1 for p in feet if any(_point_in_rect(p.z, r, px, py, margin) for r in rects)
    )


@dataclass(frozen=True)
class FeetCountReport:
    count_b: int
    count_translated: int
    holds: bool


def feet_count_lemma_check(feet, rects, rho: complex, eps: float, R: float,
                           hl: complex) -> FeetCountReport:
    """Empirical check of Ft(B) <= Ft(rho(N_{eps/R} B)) on an enumerated feet
    set; diagnostic only (the guarantee is asymptotic)."""
    count_b = count_feet(feet, rects, hl)
    shifted = [FlatTorusPoint(p.z - rho, p.hl) for p in feet]
    count_t = count_feet(shifted, rects, hl, margin=eps / R)
    return FeetCountReport(count_b, count_t, count_b <= count_t)
