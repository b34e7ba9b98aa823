"""Closed-form normal-flow numerics: equidistant metrics, area-distortion
Jacobians for pleated and minimal surfaces, principal-curvature evolution,
the convexity angle bound, and two scalar bounds (curvature from the
quasiconformal constant, collar length from the Bers norm).

Hitting times, gradients and second fundamental forms are inputs here,
never solved for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class InvalidCurvature(ValueError):
    pass


class DegenerateEquidistant(ValueError):
    pass


class VacuousBound(ValueError):
    pass


class OutOfDomain(ValueError):
    pass


class InvalidGenus(ValueError):
    pass


@dataclass(frozen=True)
class FlowPointData:
    """Inputs of the Jacobians at one surface point."""

    tau: float
    grad_tau: tuple          # (d tau / dx, d tau / dy) in an orthonormal chart
    shape: tuple = ((0.0, 0.0), (0.0, 0.0))  # second fundamental form (minimal case)
    lam: float = 0.0         # principal curvature, |lam| < 1

    def __post_init__(self):
        if self.tau < 0.0:
            raise ValueError("hitting time must be nonnegative")
        (a11, a12), (a21, a22) = self.shape
        if abs(a12 - a21) > 1e-12:
            raise ValueError("second fundamental form must be symmetric")
        if abs(self.lam) >= 1.0:
            raise InvalidCurvature(f"|lambda| = {abs(self.lam)} >= 1")


@dataclass(frozen=True)
class BoundInputs:
    """Scalar inputs of the two analytic bounds."""

    K: float = 1.0
    bers: float = 0.0
    C_seppi: float = 1.0

    def __post_init__(self):
        if self.K < 1.0:
            raise OutOfDomain("quasiconformal constant must be >= 1")
        if not (0.0 <= self.bers < 0.5):
            raise OutOfDomain("Bers norm must lie in [0, 1/2)")
        if self.C_seppi <= 0.0:
            raise OutOfDomain("curvature-bound constant must be positive")


def equidistant_metric_factor(t: float) -> float:
    """cosh^2 t: the conformal factor of the metric cosh^2 t g + dt^2 on the
    surface at normal distance t from a totally geodesic plane."""
    return math.cosh(t) ** 2


def jacobian_pleated(tau: float, grad_tau) -> float:
    """Area distortion of (x, y) -> (x, y, tau(x, y)) against the equidistant
    metric: (cosh^4 tau + |grad tau|^2 cosh^2 tau)^(1/2)."""
    if tau < 0.0:
        raise ValueError("hitting time must be nonnegative")
    gx, gy = grad_tau
    c = math.cosh(tau)
    return math.sqrt(c ** 4 + (gx * gx + gy * gy) * c ** 2)


def _sym_eig(shape):
    """Eig0 <= eig1 and the rotation angle of a symmetric 2x2 matrix."""
    (a, b), (_, d) = shape
    half_tr = (a + d) / 2.0
    disc = math.hypot((a - d) / 2.0, b)
    theta = 0.5 * math.atan2(2.0 * b, a - d)
    return (half_tr - disc, half_tr + disc), theta


def jacobian_minimal(tau: float, grad_tau, shape) -> float:
    """Area distortion in the minimal-surface chart with equidistant metric
    g_t = (cosh t I + sinh t A)^2, evaluated in A's principal basis:
    (|dx|^2 |dy|^2 + tau_x^2 |dy|^2 + tau_y^2 |dx|^2)^(1/2)."""
    if tau < 0.0:
        raise ValueError("hitting time must be nonnegative")
    (eig0, eig1), theta = _sym_eig(shape)
    s0 = math.cosh(tau) + math.sinh(tau) * eig0
    s1 = math.cosh(tau) + math.sinh(tau) * eig1
    if s0 <= 0.0 or s1 <= 0.0:
        raise DegenerateEquidistant(
            f"cosh t + sinh t * eig = ({s0}, {s1}) must stay positive"
        )
    gx, gy = grad_tau
    c, s = math.cos(theta), math.sin(theta)
    tx = c * gx + s * gy
    ty = -s * gx + c * gy
    dx2, dy2 = s0 * s0, s1 * s1
    return math.sqrt(dx2 * dy2 + tx * tx * dy2 + ty * ty * dx2)


def flow_curvature(kappa: float, t: float) -> float:
    """Principal curvature after flowing an equidistant surface for time t:
    (kappa - tanh t) / (1 - kappa tanh t)."""
    th = math.tanh(t)
    den = 1.0 - kappa * th
    if den == 0.0:
        raise DegenerateEquidistant("curvature flow hits the focal point")
    return (kappa - th) / den


def equidistant_curvatures(lam: float, t: float):
    """Both principal curvatures of the surface at distance t from a minimal
    surface with principal curvatures +-lam."""
    if abs(lam) >= 1.0:
        raise InvalidCurvature(f"|lambda| = {abs(lam)} >= 1")
    return flow_curvature(lam, t), flow_curvature(-lam, t)


def convexity_angle(tau: float, eta: float) -> float:
    """Lower bound arccos(tanh tau / tanh eta) for the angle between a normal
    geodesic and the image curve on the convex-core boundary; vacuous (error)
    once tau >= eta."""
    if tau < 0.0 or eta <= 0.0:
        raise ValueError("need 0 <= tau and 0 < eta")
    if tau >= eta:
        raise VacuousBound(f"tau = {tau} >= eta = {eta}")
    return math.acos(math.tanh(tau) / math.tanh(eta))


def seppi_curvature_bound(K: float, C: float) -> float:
    """Sup bound C log K on the principal curvatures of the minimal surface
    of a K-quasifuchsian group, K near 1."""
    if K < 1.0:
        raise OutOfDomain("quasiconformal constant must be >= 1")
    if C <= 0.0:
        raise OutOfDomain("constant must be positive")
    return C * math.log(K)


def bers_collar(bers: float) -> float:
    """Collar bound arctanh(2 * bers) on the orthogeodesic through the
    convex-core; diverges as the Bers norm approaches 1/2."""
    if not (0.0 <= bers < 0.5):
        raise OutOfDomain("Bers norm must lie in [0, 1/2)")
    return math.atanh(2.0 * bers)


def gauss_bonnet_area(genus: int) -> float:
    """Hyperbolic area 2 pi (2g - 2) of a closed genus-g pleated surface."""
    if not isinstance(genus, int) or genus < 2:
        raise InvalidGenus(f"genus {genus} must be an integer >= 2")
    return 2.0 * math.pi * (2 * genus - 2)


def area_ratio_bound(lam_sup: float) -> float:
    """Bound lam_sup^2 on |1 - area(pleated)/area(minimal)|, from
    Gauss-Bonnet: the minimal area is the integral of 1 + lambda^2."""
    if not (0.0 <= lam_sup < 1.0):
        raise OutOfDomain("principal curvature bound must lie in [0, 1)")
    return lam_sup * lam_sup
