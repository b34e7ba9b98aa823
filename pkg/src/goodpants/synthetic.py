"""Desk-scale synthetic groups: Fuchsian pants, Schottky pairs, presets.

These are the worked examples the test-suite and the CLI demos run on.  All
constructions are exact up to floating point; no discreteness checks.
"""

from __future__ import annotations

import cmath
import math

from .lattice import GroupPresentation, write_group_file
from .moebius import GroupElement, complex_translation_length, translation
from .pants import GoodPants, curve_from_element, end_for_cuff, make_pants


def _translation_along(p: complex, q: complex, t: float) -> GroupElement:
    """Hyperbolic translation by t along the geodesic (p -> q), p, q real."""
    m = GroupElement(complex(q), complex(p), 1.0, 1.0)  # 0 -> p, inf -> q
    return m @ translation(t) @ m.inverse()


def seam_length(r_i: float, r_j: float, r_k: float) -> float:
    """Right-angled hexagon relation: distance between the cuff-i and cuff-j
    axes of a pants with cuff half-lengths (r_i, r_j, r_k)."""
    val = (math.cosh(r_k) + math.cosh(r_i) * math.cosh(r_j)) / (
        math.sinh(r_i) * math.sinh(r_j)
    )
    return math.acosh(val)


def fuchsian_pants_pair(lengths) -> tuple:
    """(a, b) in PSL(2,R) with cuff lengths exactly (L0, L1, L2).

    Axis of a is the half-circle (-1, 1); axis of b sits at the hexagon seam
    distance along the vertical axis.  Translation directions are chosen so
    that (ba)^-1 has length L2.
    """
    L0, L1, L2 = lengths
    r = [L / 2.0 for L in lengths]
    s2 = seam_length(r[0], r[1], r[2])
    e = math.exp(s2)
    best = None
    for sa in (1.0, -1.0):
        for sb in (1.0, -1.0):
            a = _translation_along(-1.0, 1.0, sa * L0)
            b = _translation_along(-e, e, sb * L1)
            try:
                ell = complex_translation_length((b @ a).inverse())
            except Exception:
                continue
            err = abs(ell - L2)
            if best is None or err < best[0]:
                best = (err, a, b)
    err, a, b = best
    if err > 1e-8:
        raise ValueError(f"hexagon construction failed: cuff-2 length off by {err}")
    return a, b


def fuchsian_pants(lengths, eps: float, R: float) -> GoodPants:
    a, b = fuchsian_pants_pair(lengths)
    return make_pants(a, b, eps, R)


def symmetric_fuchsian_pants(R: float, eps: float = None) -> GoodPants:
    """All three cuffs of length exactly 2R."""
    if eps is None:
        eps = 0.1
    return fuchsian_pants((2.0 * R, 2.0 * R, 2.0 * R), eps, R)


def pants_ends(p: GoodPants):
    """Marked ends of a synthetic pants; each cuff's curve is built on the
    cuff element itself (identity conjugator), with the other cuffs as gauge
    references."""
    ends = []
    for i in range(3):
        refs = [p.cuff(i + 1), p.cuff(i + 2)]
        curve = curve_from_element(p.cuff(i), refs)
        ends.append(end_for_cuff(p, i, curve))
    return ends


def schottky_pair(l0: float, l1: float, separation: float = 2.5):
    """Two loxodromic generators with perpendicular-ish disjoint axes."""
    a = _translation_along(-1.0, 1.0, l0)
    e = math.exp(separation)
    b = _translation_along(-e, e, l1)
    return GroupPresentation((a, b), label=f"schottky l0={l0} l1={l1}")


def single_generator_group(length: float = 4.0) -> GroupPresentation:
    return GroupPresentation((translation(length),), label=f"cyclic l={length}")


def demo_presentation(R: float = 2.0) -> GroupPresentation:
    """The Fuchsian symmetric pants group: the standard end-to-end demo.

    Every cuff of the pants (a, b, (ba)^-1) has length exactly 2R, so the
    good-curve window around 2R picks up all three cuff classes.
    """
    a, b = fuchsian_pants_pair((2.0 * R, 2.0 * R, 2.0 * R))
    return GroupPresentation((a, b), label=f"fuchsian pants 2R={2 * R}")


PRESETS = {
    "fuchsian": demo_presentation,
    "single": lambda R=2.0: single_generator_group(2.0 * R),
    "schottky": lambda R=2.0: schottky_pair(2.0 * R, 2.0 * R + 0.02),
}


def write_preset(path, name: str, R: float = 2.0):
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; choices: {sorted(PRESETS)}")
    write_group_file(path, PRESETS[name](R))
