"""Ideal-triangle barycenters, approximate barycenters, empirical measures,
smoothing operators, rotation averages and discrepancy reports.

The standard ideal triangle (0, 1, infinity) has barycenter over
(1 + i sqrt(3))/2 (the fixed point of z -> 1/(1-z)) at distance
log(sqrt(3)) - the ideal-triangle inradius - from each side midpoint.  The
approximate-barycenter element is a_{R/2} k a_{log sqrt(3)}: walk half a
half-length along the cuff from the foot, turn ninety degrees, walk the
inradius.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .moebius import (
    Frame,
    GroupElement,
    H3Point,
    ProjPoint,
    fixed_points,
    mobius_to_zero_one_inf,
    quarter_rotation,
    right_act,
    rotation,
    translation,
)
from .pants import TWO_PI, FlatTorusPoint, GoodPants, end_for_cuff, curve_from_element

LOG_SQRT3 = 0.5 * math.log(3.0)

# frame of the standard triangle's barycenter for the side (infinity, 0):
# at the point over (1 + i sqrt(3))/2, first vector along the median away
# from that side, third vector normal to the plane of the triangle.
_RHO = GroupElement(0.0, 1j, 1j, 0.0)
_STD_SIDE_FRAME = _RHO @ quarter_rotation() @ translation(LOG_SQRT3)
# cyclic rotation (0,1,inf) -> (1,inf,0) of the standard vertices
_CYCLE = GroupElement(0.0, 1.0, -1.0, 1.0)
_FLIP = GroupElement(1j, 0.0, 0.0, -1j)  # reverses orientation: (v,w,n)->(v,-w,-n)

_STD_BARYCENTER = H3Point(complex(0.5, 0.0), math.sqrt(3.0) / 2.0)
# horoball tangency points of sides (0,1), (1,inf), (inf,0) in that order
_STD_MIDPOINTS = (
    H3Point(complex(0.5, 0.0), 0.5),
    H3Point(1.0, 1.0),
    H3Point(0.0, 1.0),
)


class UnsupportedObservable(TypeError):
    pass


@dataclass(frozen=True)
class IdealTriangle:
    """Ordered ideal vertices; the vertex order fixes the orientation."""

    vertices: tuple
    orientation: int = field(default=1)

    def __post_init__(self):
        verts = tuple(ProjPoint.of(v) for v in self.vertices)
        if len(verts) != 3:
            raise ValueError("a triangle needs three vertices")
        for i in range(3):
            if verts[i].same_as(verts[(i + 1) % 3], tol=1e-13):
                raise ValueError("triangle vertices must be pairwise distinct")
        object.__setattr__(self, "vertices", verts)

    def transformed(self, h: GroupElement) -> "IdealTriangle":
        return IdealTriangle(tuple(h.apply(v) for v in self.vertices), self.orientation)

    def normalizing_map(self) -> GroupElement:
        """Mobius map taking (0, 1, infinity) to the vertices."""
        return mobius_to_zero_one_inf(*self.vertices).inverse()


def barycenter(t: IdealTriangle):
    """(barycenter point, side midpoints): the barycenter is the meeting
    point of the rays from the pairwise-tangent horocycle tangency points to
    the opposite vertices; midpoint i sits on the side (v_i, v_{i+1})."""
    h = t.normalizing_map()
    mids = tuple(h.apply_h3(p) for p in _STD_MIDPOINTS)
    return h.apply_h3(_STD_BARYCENTER), mids


def framed_barycenters(t: IdealTriangle, side: int) -> Frame:
    """The frame (v, w, n) at the barycenter whose first vector points away
    from side (v_side, v_side+1), with n normal to the triangle's plane (sign
    from the vertex-order orientation) and v x w = n."""
    h = t.normalizing_map()
    g = h
    for _ in range((side + 1) % 3):
        g = g @ _CYCLE
    g = g @ _STD_SIDE_FRAME
    if t.orientation < 0:
        g = g @ _FLIP
    return Frame(g)


def _attracting(g: GroupElement) -> ProjPoint:
    return fixed_points(g)[1]


def _cuffs(pants_or_cuffs):
    if isinstance(pants_or_cuffs, GoodPants):
        return pants_or_cuffs.cuffs
    return tuple(pants_or_cuffs)


def spun_triangles(pants_or_cuffs, marked: int = 0):
    """The two ideal triangles of the spun pleated structure, as lifts
    adjacent to the marked cuff's axis.

    Left triangle: attracting fixed points of (w_i, w_{i+1}, w_{i+2}).
    Right triangle: attracting fixed points of (w_i, w_i w_{i+2} w_i^-1,
    w_{i+1}).  In both, the side spiralling along the marked cuff is side 2
    (from the last vertex to the first).
    """
    cuffs = _cuffs(pants_or_cuffs)
    w0, w1, w2 = (cuffs[(marked + k) % 3] for k in range(3))
    left = IdealTriangle((_attracting(w0), _attracting(w1), _attracting(w2)))
    conj = w0 @ w2 @ w0.inverse()
    right = IdealTriangle((_attracting(w0), _attracting(conj), _attracting(w1)))
    return left, right


MARKED_SIDE = 2


def left_barycenter(pants_or_cuffs, marked: int = 0) -> Frame:
    left, _ = spun_triangles(pants_or_cuffs, marked)
    return framed_barycenters(left, MARKED_SIDE)


def right_barycenter(pants_or_cuffs, marked: int = 0) -> Frame:
    _, right = spun_triangles(pants_or_cuffs, marked)
    return framed_barycenters(right, MARKED_SIDE)


def approx_barycenter_element(R: float) -> GroupElement:
    """a_{R/2} k a_{log sqrt(3)}."""
    return translation(R / 2.0) @ quarter_rotation() @ translation(LOG_SQRT3)


def approx_barycenter(foot_frame: Frame, R: float) -> Frame:
    """Right action of a_{R/2} k a_{log sqrt(3)} on a foot frame."""
    return right_act(foot_frame, approx_barycenter_element(R))


def barycenter_gap(pants, side: str, R: float, end=None) -> float:
    """Frame-bundle distance between the approximate and the true framed
    barycenter on the given side of the marked end (cuff 0 by default)."""
    if end is None:
        refs = [pants.cuff(1), pants.cuff(2)]
        curve = curve_from_element(pants.cuff(0), refs)
        end = end_for_cuff(pants, 0, curve)
    if side == "l":
        approx = approx_barycenter(end.left_frame, R)
        true = left_barycenter(_cuffs(pants), end.marked_cuff)
    elif side == "r":
        approx = approx_barycenter(end.right_frame, R)
        true = right_barycenter(_cuffs(pants), end.marked_cuff)
    else:
        raise ValueError("side must be 'l' or 'r'")
    return approx.distance(true)


# ---------------------------------------------------------------------------
# empirical measures and observables


@dataclass(frozen=True)
class EmpiricalFrameMeasure:
    """Finitely many weighted frame atoms."""

    atoms: tuple  # ((Frame, weight), ...)
    normalized: bool = field(default=True)

    @classmethod
    def from_frames(cls, frames, weights=None, normalize=True):
        frames = list(frames)
        if weights is None:
            weights = [1.0] * len(frames)
        total = float(sum(weights))
        if normalize:
            if total <= 0.0:
                raise ValueError("cannot normalize a zero measure")
            weights = [w / total for w in weights]
        return cls(tuple(zip(frames, [float(w) for w in weights])), normalize)

    def evaluate(self, g) -> float:
        return math.fsum(w * g(f) for f, w in self.atoms)

    @property
    def total_mass(self) -> float:
        return math.fsum(w for _, w in self.atoms)


class ConstantObservable:
    domain = "any"

    def __init__(self, value: float):
        self.value = float(value)

    def __call__(self, _):
        return self.value


class TorusIndicator:
    """Indicator (scaled by `value`) of a union of torus rectangles,
    evaluated on FlatTorusPoint arguments."""

    domain = "torus"

    def __init__(self, rects, hl: complex, value: float = 1.0):
        self.rects = tuple(rects)
        self.hl = hl
        self.value = float(value)

    def _inside(self, p: FlatTorusPoint, margin: float = 0.0) -> bool:
        from .matching import _point_in_rect
        return any(
            _point_in_rect(p.z, r, self.hl.real, TWO_PI, margin) for r in self.rects
        )

    def _deep_inside(self, p: FlatTorusPoint, depth: float) -> bool:
        from .matching import _axis_dist
        for r in self.rects:
            dx = _axis_dist(p.z.real, r.x0, r.w, self.hl.real)
            dy = _axis_dist(p.z.imag, r.y0, r.h, TWO_PI)
            if dx == 0.0 and dy == 0.0:
                inx = min((p.z.real - r.x0) % self.hl.real,
                          (r.x0 + r.w - p.z.real) % self.hl.real)
                iny = min((p.z.imag - r.y0) % TWO_PI,
                          (r.y0 + r.h - p.z.imag) % TWO_PI)
                if inx >= depth and iny >= depth:
                    return True
        return False

    def __call__(self, p: FlatTorusPoint) -> float:
        return self.value if self._inside(p) else 0.0


class LipschitzObservable:
    """A function with a stated Lipschitz constant; smoothing uses the
    closure bracket g -+ L*delta."""

    def __init__(self, fn, lipschitz: float, domain: str = "frame"):
        self.fn = fn
        self.lipschitz = float(lipschitz)
        self.domain = domain

    def __call__(self, x):
        return self.fn(x)


class ChartBump:
    """Smooth bump of the chordal frame distance to a center frame;
    compactly supported in the ball of the given radius."""

    domain = "frame"

    def __init__(self, center: Frame, radius: float):
        self.center = center
        self.radius = float(radius)

    def __call__(self, f: Frame) -> float:
        r = self.center.distance(f) / self.radius
        if r >= 1.0:
            return 0.0
        return math.exp(1.0 - 1.0 / (1.0 - r * r))


def min_max_smoothing(g, delta: float):
    """(m_delta g, M_delta g) evaluators with m <= g <= M pointwise.

    Exact for constant observables and for the dilation side of rectangle
    indicators; the erosion side tests depth per rectangle (exact for single
    rectangles).  Lipschitz observables get the closure bracket g -+ L*delta.
    """
    if delta < 0.0:
        raise ValueError("delta must be nonnegative")
    if isinstance(g, ConstantObservable):
        return g, g
    if isinstance(g, TorusIndicator):
        def lower(p, _g=g, _d=delta):
            return _g.value if _g._deep_inside(p, _d) else 0.0

        def upper(p, _g=g, _d=delta):
            return _g.value if _g._inside(p, margin=_d) else 0.0

        return lower, upper
    if isinstance(g, LipschitzObservable):
        shift = g.lipschitz * delta

        def lower(x, _g=g, _s=shift):
            return _g(x) - _s

        def upper(x, _g=g, _s=shift):
            return _g(x) + _s

        return lower, upper
    raise UnsupportedObservable(
        f"no smoothing rule for observables of type {type(g).__name__}"
    )


def rotation_average(g, nodes: int = 256):
    """Average over the circle fiber: g~(f) = (1/2pi) integral of
    g(f r_theta) d theta by the periodic trapezoid rule (uniform average)."""
    if nodes < 1:
        raise ValueError("need at least one quadrature node")
    rots = [rotation(TWO_PI * k / nodes) for k in range(nodes)]

    def averaged(f: Frame) -> float:
        return math.fsum(g(right_act(f, r)) for r in rots) / nodes

    averaged.domain = "frame"
    return averaged


def weighted_foot_sum(curve, ends, g, eps: float, R: float,
                      c_eps: float = 1.0, vol_m: float = 1.0):
    """Sum of g over the left and right feet of the given ends, raw and
    normalized by C = 2 pi c_eps eps^4 Re(l) e^{4R - Re(l)} / vol."""
    on_torus = getattr(g, "domain", "frame") == "torus"
    total = 0.0
    for e in ends:
        if on_torus:
            total += g(curve.torus_point(e.z_left)) + g(curve.torus_point(e.z_right))
        else:
            total += g(e.left_frame) + g(e.right_frame)
    ell = 2.0 * curve.hl.real
    norm = 2.0 * math.pi * c_eps * eps ** 4 * ell * math.exp(4.0 * R - ell) / vol_m
    return total, total / norm, norm


# ---------------------------------------------------------------------------
# chart-restricted Haar target and discrepancy reports


@dataclass(frozen=True)
class ChartWindow:
    """Box of upper half-space: |x|, |y| <= half_width, |log t| <= log_height."""

    half_width: float = 2.0
    log_height: float = 1.0


class HaarChartSampler:
    """Exact Haar measure of PSL(2,C), conditioned on the chart window:
    hyperbolic volume on the base box times Haar on the frame fiber."""

    def __init__(self, window: ChartWindow = ChartWindow()):
        self.window = window

    def sample_frames(self, n: int, rng) -> list:
        w, h = self.window.half_width, self.window.log_height
        xs = rng.uniform(-w, w, size=n)
        ys = rng.uniform(-w, w, size=n)
        a, b = math.exp(-h), math.exp(h)
        u = rng.uniform(0.0, 1.0, size=n)
        inv2 = (1.0 / (a * a)) - u * (1.0 / (a * a) - 1.0 / (b * b))
        ts = 1.0 / np.sqrt(inv2)
        quats = rng.normal(size=(n, 4))
        quats /= np.linalg.norm(quats, axis=1, keepdims=True)
        frames = []
        for x, y, t, q in zip(xs, ys, ts, quats):
            alpha = complex(q[0], q[1])
            beta = complex(q[2], q[3])
            rot = GroupElement(alpha, beta, -beta.conjugate(), alpha.conjugate())
            move = GroupElement(math.sqrt(t), complex(x, y) / math.sqrt(t),
                                0.0, 1.0 / math.sqrt(t))
            frames.append(Frame(move @ rot))
        return frames


@dataclass(frozen=True)
class TargetMeasure:
    """Convex combination alpha_bulk * (chart Haar) + sum alpha_T nu_T, the
    nu_T given as atom lists."""

    alpha_bulk: float
    sampler: HaarChartSampler = field(default_factory=HaarChartSampler)
    parts: tuple = field(default=())  # ((name, alpha, EmpiricalFrameMeasure), ...)

    def __post_init__(self):
        total = self.alpha_bulk + sum(a for _, a, _ in self.parts)
        if abs(total - 1.0) > 1e-12 or self.alpha_bulk < 0.0 or any(
            a < 0.0 for _, a, _ in self.parts
        ):
            raise ValueError("convex weights must be nonnegative and sum to 1")


@dataclass(frozen=True)
class DiscrepancyRow:
    observable: str
    empirical: float
    target: float
    target_se: float
    gap: float


def discrepancy(mu: EmpiricalFrameMeasure, nu: TargetMeasure, suite,
                n_samples: int = 4096, seed: int = 0):
    """Per-observable comparison of mu against nu; the Haar part of nu is
    Monte Carlo with the reported standard error, deterministic per seed."""
    rng = np.random.default_rng(seed)
    frames = nu.sampler.sample_frames(n_samples, rng) if nu.alpha_bulk > 0 else []
    rows = []
    for name, g in suite:
        empirical = mu.evaluate(g)
        if frames:
            vals = np.array([g(f) for f in frames])
            bulk = float(vals.mean())
            se = float(vals.std(ddof=1) / math.sqrt(len(vals)))
        else:
            bulk, se = 0.0, 0.0
        target = nu.alpha_bulk * bulk + sum(
            a * part.evaluate(g) for _, a, part in nu.parts
        )
        target_se = nu.alpha_bulk * se
        rows.append(DiscrepancyRow(name, empirical, target, target_se,
                                   abs(empirical - target)))
    return rows


def haar_self_sample(nu: TargetMeasure, n_samples: int, seed: int) -> EmpiricalFrameMeasure:
    """The empirical measure of the bulk sampler's own draw (same seed and
    size reproduce the Monte Carlo frames of `discrepancy`)."""
    rng = np.random.default_rng(seed)
    frames = nu.sampler.sample_frames(n_samples, rng)
    return EmpiricalFrameMeasure.from_frames(frames)


def default_suite(seed: int = 0, count: int = 6, radius: float = 2.5,
                  window: ChartWindow = ChartWindow()):
    """Deterministic bump suite centered at chart-Haar sample frames."""
    sampler = HaarChartSampler(window)
    rng = np.random.default_rng(seed ^ 0x5EED)
    centers = sampler.sample_frames(count, rng)
    suite = [(f"bump{k}", ChartBump(c, radius)) for k, c in enumerate(centers)]
    suite.append(("const1", ConstantObservable(1.0)))
    return suite


def surface_measure(surface) -> EmpiricalFrameMeasure:
    """Barycenter measure of an assembled surface: one atom per spun triangle
    (two per pants instance), each of weight 1/(2 #pants)."""
    frames = []
    for rec in sorted(surface.instances, key=lambda r: r.instance):
        if rec.a is None or rec.b is None:
            raise ValueError(f"instance {rec.instance} lacks pants matrices")
        cuffs = (rec.a, rec.b, (rec.b @ rec.a).inverse())
        frames.append(left_barycenter(cuffs, 0))
        frames.append(right_barycenter(cuffs, 0))
    return EmpiricalFrameMeasure.from_frames(frames)


def feet_measure(surface) -> EmpiricalFrameMeasure:
    """Uniform measure on the foot frames of a surface's ends, rebuilt from
    the instance matrices (one atom per end, weight 1/#ends)."""
    frames = []
    for rec in sorted(surface.instances, key=lambda r: r.instance):
        if rec.a is None or rec.b is None:
            raise ValueError(f"instance {rec.instance} lacks pants matrices")
        cuffs = (rec.a, rec.b, (rec.b @ rec.a).inverse())
        for i in range(3):
            refs = [cuffs[(i + 1) % 3], cuffs[(i + 2) % 3]]
            curve = curve_from_element(cuffs[i], refs)
            end = end_for_cuff(_CuffTriple(cuffs), i, curve)
            frames.append(end.left_frame)
            frames.append(end.right_frame)
    return EmpiricalFrameMeasure.from_frames(frames)


class _CuffTriple:
    """Duck-typed stand-in for GoodPants when only cuff access is needed."""

    def __init__(self, cuffs):
        self.cuffs = tuple(cuffs)

    def cuff(self, i: int) -> GroupElement:
        return self.cuffs[i % 3]
