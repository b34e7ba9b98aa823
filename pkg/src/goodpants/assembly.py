"""Pants measures, closed-surface assembly, connectivity surgery, planning.

A Surface is a purely combinatorial-metric object: pants instances (dual
graph vertices), marked ends carrying feet on their curve's torus, and a
pairing of minus ends with plus ends (dual graph edges).  Real pipelines
instantiate it from enumerated pants; tests may fabricate end records
directly.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .lattice import format_word, parse_word
from .matching import (
    GLUING_SHIFT,
    build_feet_graph,
    glued_distance,
    perfect_matching,
    torus_distance,
)
from .moebius import GroupElement
from .pants import FlatTorusPoint, GoodPants, make_pants


class ZeroMeasure(ValueError):
    pass


class UnmatchedEnd(ValueError):
    pass


class OrientationClash(ValueError):
    pass


class BridgeRemains(RuntimeError):
    """The double-cover construction left a separating edge (degenerate dual)."""


class NoEligibleSwap(RuntimeError):
    def __init__(self, best_gap: float, threshold: float):
        self.best_gap = best_gap
        self.threshold = threshold
        super().__init__(
            f"no cross-component feet pair within {threshold}; best gap {best_gap}"
        )


class InvalidWeights(ValueError):
    pass


@dataclass(frozen=True)
class PantsMeasure:
    """Nonnegative-integer weights on good pants."""

    weights: tuple  # tuple of (GoodPants, int), sorted by key

    @classmethod
    def of(cls, weights) -> "PantsMeasure":
        items = [(p, int(w)) for p, w in (weights.items() if isinstance(weights, dict) else weights)]
        for _, w in items:
            if w < 0:
                raise ValueError("weights must be nonnegative")
        items = [(p, w) for p, w in items if w > 0]
        items.sort(key=lambda pw: pw[0].key)
        return cls(tuple(items))

    def __add__(self, other: "PantsMeasure") -> "PantsMeasure":
        acc = {p.key: (p, w) for p, w in self.weights}
        for p, w in other.weights:
            if p.key in acc:
                acc[p.key] = (p, acc[p.key][1] + w)
            else:
                acc[p.key] = (p, w)
        return PantsMeasure.of(list(acc.values()))

    def scaled(self, n: int) -> "PantsMeasure":
        return PantsMeasure.of([(p, n * w) for p, w in self.weights])

    @property
    def total(self) -> int:
        return sum(w for _, w in self.weights)

    def support(self):
        return [p for p, _ in self.weights]


@dataclass(frozen=True)
class CurveMeasure:
    """Integer weights on (unoriented) good curves, keyed by base word."""

    weights: tuple  # tuple of (base_key, int), sorted

    @classmethod
    def of(cls, mapping) -> "CurveMeasure":
        items = sorted((k, int(v)) for k, v in mapping.items() if v != 0)
        return cls(tuple(items))

    def as_dict(self) -> dict:
        return dict(self.weights)

    def __add__(self, other: "CurveMeasure") -> "CurveMeasure":
        acc = self.as_dict()
        for k, v in other.weights:
            acc[k] = acc.get(k, 0) + v
        return CurveMeasure.of(acc)


def boundary(mu: PantsMeasure) -> CurveMeasure:
    """The end-counting boundary: each cuff of each weighted pants adds its
    weight to its (unoriented) curve."""
    acc: dict = {}
    for pants, w in mu.weights:
        if pants.cuff_curves is None:
            raise ValueError("pants lack cuff curve data; build via enumeration")
        for view in pants.cuff_curves:
            acc[view.base_key] = acc.get(view.base_key, 0) + w
    return CurveMeasure.of(acc)


# ---------------------------------------------------------------------------
# surfaces


@dataclass(frozen=True)
class EndRef:
    """One end of one pants instance, ready for gluing."""

    end_id: str
    instance: int
    cuff_index: int
    curve_key: str
    sign: int
    foot: FlatTorusPoint


@dataclass(frozen=True)
class InstanceRec:
    instance: int
    pants_key: str
    a: GroupElement = field(default=None)
    b: GroupElement = field(default=None)


@dataclass(frozen=True)
class Pairing:
    minus_id: str
    plus_id: str
    discrepancy: float


@dataclass(frozen=True)
class Surface:
    """Closed surface glued from pants instances along matched ends."""

    eps: float
    R: float
    instances: tuple
    ends: tuple
    pairs: tuple

    def end(self, end_id: str) -> EndRef:
        return self._end_map()[end_id]

    def _end_map(self):
        return {e.end_id: e for e in self.ends}

    @property
    def pants_count(self) -> int:
        return len(self.instances)

    @property
    def euler_characteristic(self) -> int:
        return -len(self.instances)

    @property
    def area(self) -> float:
        return 2.0 * math.pi * len(self.instances)

    def components(self):
        """Connected components of the dual graph, as sorted instance tuples."""
        parent = {rec.instance: rec.instance for rec in self.instances}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        ends = self._end_map()
        for pair in self.pairs:
            a = find(ends[pair.minus_id].instance)
            b = find(ends[pair.plus_id].instance)
            if a != b:
                parent[a] = b
        groups: dict = {}
        for rec in self.instances:
            groups.setdefault(find(rec.instance), []).append(rec.instance)
        return [tuple(sorted(g)) for g in sorted(groups.values())]

    def component_genera(self):
        """(instances, chi, genus) per component; chi = -#pants, genus from
        chi = 2 - 2g."""
        out = []
        for comp in self.components():
            chi = -len(comp)
            if chi % 2 != 0:
                raise OrientationClash(
                    f"component {comp} has odd pants count {len(comp)}"
                )
            out.append((comp, chi, (2 - chi) // 2))
        return out

    @property
    def is_connected(self) -> bool:
        return len(self.components()) == 1

    def max_discrepancy(self) -> float:
        return max((p.discrepancy for p in self.pairs), default=0.0)


def instantiate_measure(mu: PantsMeasure, ends_by_pants: dict):
    """Blow a measure up into pants instances and end records."""
    instances = []
    end_refs = []
    idx = 0
    for pants, w in mu.weights:
        for _ in range(w):
            instances.append(InstanceRec(idx, pants.key, pants.a, pants.b))
            for e in ends_by_pants[pants.key]:
                end_refs.append(
                    EndRef(
                        end_id=f"{idx}:{e.marked_cuff}",
                        instance=idx,
                        cuff_index=e.marked_cuff,
                        curve_key=e.curve.base_key,
                        sign=e.sign,
                        foot=e.foot,
                    )
                )
            idx += 1
    return tuple(instances), tuple(end_refs)


def assemble(instances, ends, matchings, eps: float, R: float) -> Surface:
    """Close up the ends along per-curve bijections.

    `matchings` maps curve key -> list of (minus end id, plus end id).
    Every end must be used exactly once, pairs must join opposite
    orientations on the same curve.
    """
    by_id = {e.end_id: e for e in ends}
    used = set()
    pairs = []
    for key in sorted(matchings):
        for minus_id, plus_id in matchings[key]:
            minus, plus = by_id[minus_id], by_id[plus_id]
            if minus.sign != -1 or plus.sign != 1:
                raise OrientationClash(f"pair ({minus_id}, {plus_id}) is not (-,+)")
            if minus.curve_key != plus.curve_key:
                raise OrientationClash(
                    f"pair ({minus_id}, {plus_id}) joins different curves"
                )
            if minus_id in used or plus_id in used:
                raise UnmatchedEnd(f"end reused in pair ({minus_id}, {plus_id})")
            used.update((minus_id, plus_id))
            pairs.append(Pairing(minus_id, plus_id, glued_distance(minus.foot, plus.foot)))
    missing = sorted(set(by_id) - used)
    if missing:
        raise UnmatchedEnd(f"ends left unpaired: {missing[:6]}")
    return Surface(eps, R, tuple(instances), tuple(ends), tuple(sorted(
        pairs, key=lambda p: (p.minus_id, p.plus_id))))


def build_surface(mu: PantsMeasure, end_index, ends_by_pants, eps: float, R: float,
                  threshold: float = None) -> Surface:
    """Pipeline helper: instantiate the measure, match every curve via the
    Hall engine, assemble.  Raises UnmatchedEnd when some curve has no
    perfect matching at the given threshold."""
    instances, ends = instantiate_measure(mu, ends_by_pants)
    by_curve: dict = {}
    for e in ends:
        by_curve.setdefault(e.curve_key, ([], []))[0 if e.sign < 0 else 1].append(e)
    matchings = {}
    for key in sorted(by_curve):
        minus, plus = by_curve[key]
        minus.sort(key=lambda e: e.end_id)
        plus.sort(key=lambda e: e.end_id)
        graph = build_feet_graph(minus, plus, eps, R, threshold=threshold)
        result = perfect_matching(graph)
        if not result.is_perfect:
            raise UnmatchedEnd(
                f"curve {key}: no perfect matching "
                f"(Hall witness of size {len(result.witness)})"
            )
        matchings[key] = [
            (minus[i].end_id, plus[j].end_id) for i, j in result.pairs
        ]
    return assemble(instances, ends, matchings, eps, R)


# ---------------------------------------------------------------------------
# irreducibility


def is_irreducible(mu: PantsMeasure):
    """Connectivity of the gluability graph on supp mu: an edge joins pants
    inducing opposite orientations on a common curve.  Returns (flag,
    certificate); the certificate is a separating (mu1, mu2) when reducible."""
    support = mu.support()
    if not support:
        raise ZeroMeasure("measure has empty support")
    marks = []
    for p in support:
        if p.cuff_curves is None:
            raise ValueError("pants lack cuff curve data")
        marks.append({(v.base_key, v.sign) for v in p.cuff_curves})
    n = len(support)
    adj = [[False] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if any((key, -s) in marks[j] for key, s in marks[i]):
                adj[i][j] = adj[j][i] = True
    seen = {0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in range(n):
            if adj[u][v] and v not in seen:
                seen.add(v)
                queue.append(v)
    if len(seen) == n:
        return True, None
    inside = PantsMeasure.of([(p, w) for (p, w) in mu.weights if p in
                              {support[i] for i in seen}])
    outside = PantsMeasure.of([(p, w) for (p, w) in mu.weights if p not in
                               {support[i] for i in seen}])
    return False, (inside, outside)


# ---------------------------------------------------------------------------
# double covers of the dual graph


def _dual_graph(s: Surface):
    """Vertices = instance ids; edges = (edge index, u, v) from pairings."""
    ends = {e.end_id: e for e in s.ends}
    edges = []
    for idx, pair in enumerate(s.pairs):
        u = ends[pair.minus_id].instance
        v = ends[pair.plus_id].instance
        edges.append((idx, u, v))
    return [rec.instance for rec in s.instances], edges


def find_bridges(vertices, edges):
    """Bridge edge indices of an undirected multigraph (iterative Tarjan);
    parallel edges and loops are never bridges."""
    adj: dict = {v: [] for v in vertices}
    for idx, u, v in edges:
        adj[u].append((idx, v))
        adj[v].append((idx, u))
    visited = set()
    pre: dict = {}
    low: dict = {}
    bridges = []
    counter = [0]
    for root in vertices:
        if root in visited:
            continue
        stack = [(root, -1, iter(adj[root]))]
        visited.add(root)
        pre[root] = low[root] = counter[0]
        counter[0] += 1
        while stack:
            v, in_edge, it = stack[-1]
            advanced = False
            for idx, w in it:
                if idx == in_edge:
                    continue
                if w not in visited:
                    visited.add(w)
                    pre[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append((w, idx, iter(adj[w])))
                    advanced = True
                    break
                low[v] = min(low[v], pre[w])
            if not advanced:
                stack.pop()
                if stack:
                    parent = stack[-1][0]
                    low[parent] = min(low[parent], low[v])
                    if low[v] > pre[parent]:
                        bridges.append(in_edge)
    return sorted(bridges)


def _cover_labels(vertices, edges):
    """Z/2 edge labels: 1 on edges outside (bridges + a spanning forest of
    the bridge-free part), 0 elsewhere."""
    bridges = set(find_bridges(vertices, edges))
    adj: dict = {v: [] for v in vertices}
    for idx, u, v in edges:
        if idx not in bridges:
            adj[u].append((idx, v))
            adj[v].append((idx, u))
    forest = set()
    visited = set()
    for root in vertices:
        if root in visited:
            continue
        visited.add(root)
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for idx, w in adj[u]:
                if w not in visited:
                    visited.add(w)
                    forest.add(idx)
                    queue.append(w)
    labels = {}
    for idx, _, _ in edges:
        labels[idx] = 0 if (idx in bridges or idx in forest) else 1
    return labels


def nonseparating_double_cover(s: Surface) -> Surface:
    """Degree-2 cover in which the pants lift homeomorphically and the dual
    graph has no separating edge; raises BridgeRemains if the construction's
    postcondition fails (possible only for degenerate non-cubic duals)."""
    vertices, edges = _dual_graph(s)
    labels = _cover_labels(vertices, edges)
    old_ends = {e.end_id: e for e in s.ends}

    instances = []
    for rec in s.instances:
        for sheet in (0, 1):
            instances.append(
                InstanceRec(2 * rec.instance + sheet, rec.pants_key, rec.a, rec.b)
            )
    ends = []
    for e in s.ends:
        for sheet in (0, 1):
            ends.append(
                replace(e, end_id=f"{e.end_id}@{sheet}", instance=2 * e.instance + sheet)
            )
    pairs = []
    for idx, pair in enumerate(s.pairs):
        lam = labels[idx]
        for sheet in (0, 1):
            pairs.append(
                Pairing(
                    f"{pair.minus_id}@{sheet}",
                    f"{pair.plus_id}@{sheet ^ lam}",
                    pair.discrepancy,
                )
            )
    cover = Surface(s.eps, s.R, tuple(instances), tuple(ends),
                    tuple(sorted(pairs, key=lambda p: (p.minus_id, p.plus_id))))
    cover_vertices, cover_edges = _dual_graph(cover)
    remaining = find_bridges(cover_vertices, cover_edges)
    if remaining:
        raise BridgeRemains(f"{len(remaining)} bridges survive the double cover")
    return cover


# ---------------------------------------------------------------------------
# regluing surgery


@dataclass(frozen=True)
class SwapRecord:
    curve_key: str
    gap: float
    removed: tuple
    added: tuple


def _component_of(s: Surface):
    comp_of = {}
    for ci, comp in enumerate(s.components()):
        for inst in comp:
            comp_of[inst] = ci
    return comp_of


def _eligible_swaps(s: Surface, threshold: float):
    """Cross-component same-orientation end pairs on a common curve, with
    their feet gap."""
    comp_of = _component_of(s)
    groups: dict = {}
    for e in s.ends:
        groups.setdefault((e.curve_key, e.sign), []).append(e)
    candidates = []
    for (key, _sign), group in sorted(groups.items()):
        group.sort(key=lambda e: e.end_id)
        for i, e1 in enumerate(group):
            for e2 in group[i + 1:]:
                if comp_of[e1.instance] == comp_of[e2.instance]:
                    continue
                gap = torus_distance(e1.foot, e2.foot)
                candidates.append((gap, key, e1, e2))
    eligible = [c for c in candidates if c[0] < threshold]
    best = min((c[0] for c in candidates), default=math.inf)
    return eligible, best


def reglue_connect(s: Surface, max_swaps: int = None):
    """Reduce to one component by swapping glued partners across components
    at nearly-equal feet; every new discrepancy is bounded by the old
    maximum plus the cross gap.  Returns (surface, swap records)."""
    threshold = s.eps / s.R
    swaps = []
    current = s
    while not current.is_connected:
        if max_swaps is not None and len(swaps) >= max_swaps:
            break
        eligible, best = _eligible_swaps(current, threshold)
        if not eligible:
            raise NoEligibleSwap(best, threshold)
        eligible.sort(key=lambda c: (c[0], c[2].end_id, c[3].end_id))
        gap, curve_key, e1, e2 = eligible[0]
        partner_of = {}
        for pair in current.pairs:
            partner_of[pair.minus_id] = pair.plus_id
            partner_of[pair.plus_id] = pair.minus_id
        ends = {e.end_id: e for e in current.ends}
        if e1.sign == -1:
            m1, m2 = e1, e2
            p1, p2 = ends[partner_of[e1.end_id]], ends[partner_of[e2.end_id]]
        else:
            p1, p2 = e1, e2
            m1, m2 = ends[partner_of[e1.end_id]], ends[partner_of[e2.end_id]]
        removed = {(m1.end_id, p1.end_id), (m2.end_id, p2.end_id)}
        added = (
            Pairing(m1.end_id, p2.end_id, glued_distance(m1.foot, p2.foot)),
            Pairing(m2.end_id, p1.end_id, glued_distance(m2.foot, p1.foot)),
        )
        kept = [p for p in current.pairs if (p.minus_id, p.plus_id) not in removed]
        current = Surface(
            current.eps, current.R, current.instances, current.ends,
            tuple(sorted(kept + list(added), key=lambda p: (p.minus_id, p.plus_id))),
        )
        swaps.append(SwapRecord(curve_key, gap, tuple(sorted(removed)),
                                tuple((a.minus_id, a.plus_id) for a in added)))
    return current, tuple(swaps)


# ---------------------------------------------------------------------------
# hybrid degree planner


@dataclass(frozen=True)
class DegreePlan:
    degrees: tuple          # (name, exact Fraction, rounded int)
    realized: tuple         # (name, realized Fraction alpha)
    realized_bulk: Fraction
    gaps: tuple             # (name, |realized - target| Fraction, proven bound)
    bulk_gap: Fraction
    zero_bulk: bool


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x).limit_denominator(10**12)


def hybrid_degree_plan(alpha_bulk, alphas: dict, genus_s: int, genera: dict,
                       zero_bulk_scale: int = 10**6) -> DegreePlan:
    """Cover degrees d(T) = alpha_T (g_S - 1) / (alpha_bulk (g_T - 1)) making
    the hybrid surface's area measure hit the target convex combination,
    with exact rational arithmetic and a rounding report."""
    a_bulk = _to_fraction(alpha_bulk)
    a_map = {k: _to_fraction(v) for k, v in alphas.items()}
    if a_bulk < 0 or any(v < 0 for v in a_map.values()):
        raise InvalidWeights("weights must be nonnegative")
    if a_bulk + sum(a_map.values()) != 1:
        raise InvalidWeights("weights must sum to exactly 1")
    if genus_s < 2 or any(g < 2 for g in genera.values()):
        raise ValueError("genera must be at least 2")
    zero_bulk = a_bulk == 0
    names = sorted(a_map)
    degrees = []
    for name in names:
        g_t = genera[name]
        if zero_bulk:
            d = a_map[name] * (genus_s - 1) * zero_bulk_scale / (g_t - 1)
        else:
            d = a_map[name] * (genus_s - 1) / (a_bulk * (g_t - 1))
        rounded = int(d + Fraction(1, 2)) if d >= 0 else -int(-d + Fraction(1, 2))
        degrees.append((name, d, rounded))
    total = Fraction(genus_s - 1) + sum(
        (genera[name] - 1) * r for name, _, r in degrees
    )
    realized = tuple(
        (name, Fraction((genera[name] - 1) * r, 1) / total) for name, _, r in degrees
    )
    realized_bulk = Fraction(genus_s - 1) / total
    sum_shift = sum((genera[name] - 1) * abs(r - d) for name, d, r in degrees)
    gaps = []
    for (name, d, r), (_, a_real) in zip(degrees, realized):
        target = a_map[name]
        gap = abs(a_real - target)
        bound = ((genera[name] - 1) * abs(r - d) + target * sum_shift) / total
        gaps.append((name, gap, bound))
    bulk_gap = abs(realized_bulk - a_bulk)
    return DegreePlan(tuple(degrees), realized, realized_bulk, tuple(gaps),
                      bulk_gap, zero_bulk)


# ---------------------------------------------------------------------------
# surface file format (round-trips bit-exactly)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _fmt_elem(g: GroupElement) -> str:
    vals = [g.a.real, g.a.imag, g.b.real, g.b.imag,
            g.c.real, g.c.imag, g.d.real, g.d.imag]
    return " ".join(_fmt(v) for v in vals) + " w=" + format_word(g.word)


def _parse_elem(tokens) -> GroupElement:
    vals = [float(t) for t in tokens[:8]]
    word = parse_word(tokens[8][2:]) if len(tokens) > 8 else ()
    return GroupElement(complex(vals[0], vals[1]), complex(vals[2], vals[3]),
                        complex(vals[4], vals[5]), complex(vals[6], vals[7]), word)


def write_surface(path, s: Surface):
    lines = ["# surface v1", f"eps {_fmt(s.eps)}", f"R {_fmt(s.R)}",
             f"instances {len(s.instances)}"]
    for rec in s.instances:
        if rec.a is not None and rec.b is not None:
            lines.append(f"{rec.instance}\t{rec.pants_key}\t{_fmt_elem(rec.a)}\t{_fmt_elem(rec.b)}")
        else:
            lines.append(f"{rec.instance}\t{rec.pants_key}\t-\t-")
    lines.append(f"ends {len(s.ends)}")
    for e in s.ends:
        lines.append(
            f"{e.end_id}\t{e.instance}\t{e.cuff_index}\t{e.curve_key}\t{e.sign}"
            f"\t{_fmt(e.foot.z.real)} {_fmt(e.foot.z.imag)}"
            f"\t{_fmt(e.foot.hl.real)} {_fmt(e.foot.hl.imag)}"
        )
    lines.append(f"pairs {len(s.pairs)}")
    for p in s.pairs:
        lines.append(f"{p.minus_id}\t{p.plus_id}\t{_fmt(p.discrepancy)}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def read_surface(path) -> Surface:
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip() and not ln.startswith("#")]
    pos = 0

    def expect(tag):
        nonlocal pos
        name, value = lines[pos].split()
        if name != tag:
            raise ValueError(f"expected {tag}, found {name}")
        pos += 1
        return value

    eps = float(expect("eps"))
    big_r = float(expect("R"))
    n_inst = int(expect("instances"))
    instances = []
    for _ in range(n_inst):
        parts = lines[pos].split("\t")
        pos += 1
        if parts[2] == "-":
            instances.append(InstanceRec(int(parts[0]), parts[1]))
        else:
            instances.append(InstanceRec(int(parts[0]), parts[1],
                                         _parse_elem(parts[2].split()),
                                         _parse_elem(parts[3].split())))
    n_ends = int(expect("ends"))
    ends = []
    for _ in range(n_ends):
        parts = lines[pos].split("\t")
        pos += 1
        zr, zi = (float(t) for t in parts[5].split())
        hr, hi = (float(t) for t in parts[6].split())
        ends.append(EndRef(parts[0], int(parts[1]), int(parts[2]), parts[3],
                           int(parts[4]), FlatTorusPoint(complex(zr, zi), complex(hr, hi))))
    n_pairs = int(expect("pairs"))
    pairs = []
    for _ in range(n_pairs):
        parts = lines[pos].split("\t")
        pos += 1
        pairs.append(Pairing(parts[0], parts[1], float(parts[2])))
    return Surface(eps, big_r, tuple(instances), tuple(ends), tuple(pairs))
