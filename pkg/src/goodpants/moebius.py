"""PSL(2,C) Mobius geometry: group elements, boundary points, geodesics, frames.

Conventions, fixed once and used by every other module:

* complex translation length: Re l > 0, Im l in (-pi, pi].
* complex distance between geodesics: Re >= 0, Im in [0, pi].
* boundary points of H^3 are projective pairs (num, den); infinity is (1, 0).
* the frame bundle Fr H^3 is identified with PSL(2,C) through the origin
  frame at j = (0, 0, 1) whose first vector points up the vertical axis
  (0, infinity) and whose second vector points toward +1.
* right actions compose contravariantly: R_h . R_k = R_{kh}.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

TOL = 1e-9

_TWO_PI = 2.0 * math.pi


class NotLoxodromic(ValueError):
    """Element is elliptic, parabolic or the identity within tolerance."""


class SharedEndpoint(ValueError):
    """Two geodesics share an ideal endpoint within tolerance."""


def _reduce_word(word):
    out = []
    for letter in word:
        if letter == 0:
            raise ValueError("zero is not a generator index")
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def invert_word(word):
    return tuple(-letter for letter in reversed(word))


@dataclass(frozen=True)
class ProjPoint:
    """A point of the Riemann sphere as a projective pair (num, den)."""

    num: complex
    den: complex

    def __post_init__(self):
        n, d = complex(self.num), complex(self.den)
        scale = max(abs(n), abs(d))
        if scale == 0.0:
            raise ValueError("(0 : 0) is not a projective point")
        n, d = n / scale, d / scale
        object.__setattr__(self, "num", n)
        object.__setattr__(self, "den", d)

    @classmethod
    def of(cls, value) -> "ProjPoint":
        if isinstance(value, ProjPoint):
            return value
        if value is None or value == cmath.inf:
            return INFINITY
        return cls(complex(value), 1.0)

    @property
    def is_infinite(self) -> bool:
        return abs(self.den) <= TOL * abs(self.num)

    def value(self) -> complex:
        if self.is_infinite:
            return complex(math.inf, 0.0)
        return self.num / self.den

    def same_as(self, other: "ProjPoint", tol: float = 1e-12) -> bool:
        return abs(wedge(self, other)) <= tol


INFINITY = ProjPoint(1.0, 0.0)


def wedge(p: ProjPoint, q: ProjPoint) -> complex:
    """Projective difference; zero exactly when p == q on the sphere."""
    return p.num * q.den - q.num * p.den


@dataclass(frozen=True)
class GroupElement:
    """2x2 complex matrix of determinant one, considered up to global sign.

    Carries an optional word in the generators of an ambient presentation
    (signed indices, 1-based).  Products renormalize the determinant so that
    |det - 1| stays below tolerance along long words.
    """

    a: complex
    b: complex
    c: complex
    d: complex
    word: tuple = field(default=())

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        # Renormalize only when the deviation is resolvable above the
        # cancellation noise of evaluating det itself (~ ||A||^2 * eps);
        # dividing by a noise-level sqrt(det) would corrupt accurate entries.
        scale = max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))
        noise = 64.0 * 2.3e-16 * max(1.0, scale * scale)
        if abs(det) < 1e-30 and noise < 0.5:
            raise ValueError("singular matrix")
        if abs(det - 1.0) > max(1e-14, noise):
            s = cmath.sqrt(det)
            object.__setattr__(self, "a", self.a / s)
            object.__setattr__(self, "b", self.b / s)
            object.__setattr__(self, "c", self.c / s)
            object.__setattr__(self, "d", self.d / s)
        object.__setattr__(self, "word", tuple(self.word))

    @classmethod
    def identity(cls) -> "GroupElement":
        return cls(1.0, 0.0, 0.0, 1.0)

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> complex:
        return self.a + self.d

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            _reduce_word(self.word + other.word),
        )

    def inverse(self) -> "GroupElement":
        return GroupElement(self.d, -self.b, -self.c, self.a, invert_word(self.word))

    def conjugated_by(self, h: "GroupElement") -> "GroupElement":
        return h @ self @ h.inverse()

    def is_close(self, other: "GroupElement", tol: float = TOL) -> bool:
        """Projective equality: g and -g compare equal."""
        plus = max(
            abs(self.a - other.a), abs(self.b - other.b),
            abs(self.c - other.c), abs(self.d - other.d),
        )
        minus = max(
            abs(self.a + other.a), abs(self.b + other.b),
            abs(self.c + other.c), abs(self.d + other.d),
        )
        return min(plus, minus) <= tol

    def apply(self, p: ProjPoint) -> ProjPoint:
        return ProjPoint(self.a * p.num + self.b * p.den, self.c * p.num + self.d * p.den)

    def apply_h3(self, point: "H3Point") -> "H3Point":
        """Isometric action on upper half-space, (z, t) with t > 0."""
        z, t = point.z, point.t
        den = abs(self.c * z + self.d) ** 2 + abs(self.c) ** 2 * t * t
        z_new = ((self.a * z + self.b) * (self.c * z + self.d).conjugate()
                 + self.a * self.c.conjugate() * t * t) / den
        return H3Point(z_new, t / den)

    def __call__(self, value):
        return self.apply(ProjPoint.of(value))


@dataclass(frozen=True)
class H3Point:
    """Point of upper half-space H^3: boundary coordinate z, height t > 0."""

    z: complex
    t: float

    def dist(self, other: "H3Point") -> float:
        num = abs(self.z - other.z) ** 2 + (self.t - other.t) ** 2
        return math.acosh(1.0 + num / (2.0 * self.t * other.t))


ORIGIN = H3Point(0.0, 1.0)


@dataclass(frozen=True)
class Geodesic:
    """Oriented geodesic of H^3 given by distinct ideal endpoints (p -> q)."""

    p: ProjPoint
    q: ProjPoint

    def __post_init__(self):
        if self.p.same_as(self.q, tol=1e-13):
            raise ValueError("geodesic endpoints coincide")

    @classmethod
    def of(cls, p, q) -> "Geodesic":
        return cls(ProjPoint.of(p), ProjPoint.of(q))

    def reversed(self) -> "Geodesic":
        return Geodesic(self.q, self.p)

    def transformed(self, h: GroupElement) -> "Geodesic":
        return Geodesic(h.apply(self.p), h.apply(self.q))

    def point_at(self, s: float) -> H3Point:
        """Unit-speed parametrization; the base point (s = 0) is canonical
        per chart (top of the circle, or height one on a vertical line)."""
        if self.q.is_infinite:
            return H3Point(self.p.value(), math.exp(s))
        if self.p.is_infinite:
            return H3Point(self.q.value(), math.exp(-s))
        u, v = self.p.value(), self.q.value()
        c, rho = (u + v) / 2.0, (v - u) / 2.0
        return H3Point(c + rho * math.tanh(s), abs(rho) / math.cosh(s))


def translation(t) -> GroupElement:
    """a_t = diag(e^{t/2}, e^{-t/2}); moves the origin frame distance Re t up
    the axis (0, infinity) and rotates by Im t around it."""
    t = complex(t)
    return GroupElement(cmath.exp(t / 2.0), 0.0, 0.0, cmath.exp(-t / 2.0))


def rotation(theta: float) -> GroupElement:
    """r_theta in PSL(2,R): rotation by theta about the origin frame's base
    point, in the plane of the first two frame vectors."""
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return GroupElement(c, -s, s, c)


def quarter_rotation() -> GroupElement:
    """k = r_{pi/2}: takes the first frame vector to the second, fixes the third."""
    return rotation(math.pi / 2.0)


def mobius_to_zero_one_inf(p: ProjPoint, q: ProjPoint, r: ProjPoint) -> GroupElement:
    """The Mobius map sending (p, q, r) to (0, 1, infinity)."""
    qr = wedge(q, r)
    qp = wedge(q, p)
    if abs(qr) < 1e-15 or abs(qp) < 1e-15 or abs(wedge(p, r)) < 1e-15:
        raise ValueError("points must be pairwise distinct")
    return GroupElement(p.den * qr, -p.num * qr, r.den * qp, -r.num * qp)


def axis_chart(p_minus: ProjPoint, p_plus: ProjPoint, ref: ProjPoint) -> GroupElement:
    """Chart sending the oriented axis (p_minus -> p_plus) to (0 -> infinity)
    with the reference point landing at 1.  In this chart the normal vector
    at height one pointing toward +1 is the zero of N^1 coordinates."""
    return mobius_to_zero_one_inf(p_minus, ref, p_plus)


def complex_translation_length(g: GroupElement, tol: float = TOL) -> complex:
    """l with tr g = +-2 cosh(l/2), Re l > 0, Im l in (-pi, pi]."""
    half = cmath.acosh(g.trace / 2.0)
    ell = 2.0 * half
    im = math.remainder(ell.imag, _TWO_PI)
    if im <= -math.pi:
        im += _TWO_PI
    ell = complex(ell.real, im)
    if ell.real <= tol:
        raise NotLoxodromic(f"translation length {ell} has no real part")
    return ell


def fixed_points(g: GroupElement, tol: float = TOL):
    """(repelling, attracting) fixed points of a loxodromic element."""
    disc = g.trace * g.trace - 4.0
    if abs(disc) <= tol * tol:
        raise NotLoxodromic("parabolic or identity element has one fixed point")
    complex_translation_length(g, tol)  # raises on elliptics
    root = cmath.sqrt(disc)
    mu_plus = (g.trace + root) / 2.0
    mu_minus = (g.trace - root) / 2.0
    if abs(mu_plus) < abs(mu_minus):
        mu_plus, mu_minus = mu_minus, mu_plus
    if abs(g.c) > 1e-14:
        attract = ProjPoint(mu_plus - g.d, g.c)
        repel = ProjPoint(mu_minus - g.d, g.c)
    else:
        # upper triangular: fixed points are infinity and b/(d - a)
        if abs(g.a) > abs(g.d):
            attract, repel = INFINITY, ProjPoint(g.b, g.d - g.a)
        else:
            attract, repel = ProjPoint(g.b, g.d - g.a), INFINITY
    return repel, attract


def axis(g: GroupElement) -> Geodesic:
    """Axis oriented repelling -> attracting (the translation direction)."""
    repel, attract = fixed_points(g)
    return Geodesic(repel, attract)


def _check_disjoint_endpoints(g1: Geodesic, g2: Geodesic, tol: float):
    for p in (g1.p, g1.q):
        for q in (g2.p, g2.q):
            if p.same_as(q, tol):
                raise SharedEndpoint("geodesics share an ideal endpoint")


def complex_distance(g1: Geodesic, g2: Geodesic, tol: float = 1e-10) -> complex:
    """Complex distance (distance + i angle) between oriented geodesics.

    Computed from the cross-ratio X of the four ideal endpoints in the
    ordering [(p1 - p2)(q1 - q2)] / [(p1 - q2)(q1 - p2)], which satisfies
    tanh^2(eta/2) = X, so cosh eta = (1 + X)/(1 - X).  Branch: Re >= 0,
    Im in [0, pi].
    """
    _check_disjoint_endpoints(g1, g2, tol)
    num = wedge(g1.p, g2.p) * wedge(g1.q, g2.q)
    den = wedge(g1.p, g2.q) * wedge(g1.q, g2.p)
    x = num / den
    eta = cmath.acosh((1.0 + x) / (1.0 - x))
    return complex(abs(eta.real), abs(eta.imag))


def common_perpendicular(g1: Geodesic, g2: Geodesic, tol: float = 1e-10) -> Geodesic:
    """The common perpendicular, oriented from g1 toward g2.

    In the chart taking g1 to (0, infinity) and g2.p to 1, g2 becomes (1, w)
    and the perpendicular is the geodesic with endpoints +-sqrt(w); the sign
    pointing at g2's nearest point is selected explicitly.
    """
    _check_disjoint_endpoints(g1, g2, tol)
    m = mobius_to_zero_one_inf(g1.p, g2.p, g1.q)
    w = m.apply(g2.q).value()
    e = cmath.sqrt(w)
    c, rho = (1.0 + w) / 2.0, (w - 1.0) / 2.0
    t2 = -2.0 * (c * rho.conjugate()).real / (abs(c) ** 2 + abs(rho) ** 2)
    s_star = math.atanh(max(-1.0 + 1e-16, min(1.0 - 1e-16, t2))) / 2.0
    z_star = c + rho * math.tanh(s_star)
    if (z_star / e).real < 0.0:
        e = -e
    m_inv = m.inverse()
    return Geodesic(m_inv.apply(ProjPoint(-e, 1.0)), m_inv.apply(ProjPoint(e, 1.0)))


@dataclass(frozen=True)
class Frame:
    """A point of Fr H^3 = PSL(2,C): the image of the origin frame under g."""

    g: GroupElement

    @classmethod
    def origin(cls) -> "Frame":
        return cls(GroupElement.identity())

    def base_point(self) -> H3Point:
        return self.g.apply_h3(ORIGIN)

    def transformed(self, h: GroupElement) -> "Frame":
        return Frame(h @ self.g)

    def distance(self, other: "Frame") -> float:
        """Left-invariant chordal distance: min over sign of the Frobenius
        distance of g^-1 h from the identity."""
        m = self.g.inverse() @ other.g
        plus = math.sqrt(abs(m.a - 1) ** 2 + abs(m.b) ** 2 + abs(m.c) ** 2 + abs(m.d - 1) ** 2)
        minus = math.sqrt(abs(m.a + 1) ** 2 + abs(m.b) ** 2 + abs(m.c) ** 2 + abs(m.d + 1) ** 2)
        return min(plus, minus)


def right_act(f: Frame, h: GroupElement) -> Frame:
    """R_h(g o) = g h o.  Satisfies right_act(right_act(f, h1), h2) =
    right_act(f, h1 h2)."""
    return Frame(f.g @ h)
