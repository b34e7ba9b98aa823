"""Good curves, good pants, short orthogeodesics, feet and torus coordinates.

Gauge for N^1 coordinates: every curve gets a chart built on its *base*
orientation (the one whose canonical word is lexicographically least).  The
chart sends the base representative's axis to (0, infinity) and a reference
point to 1, where the reference is the far endpoint of the common
perpendicular toward the first generator whose axis is disjoint.  Because
every input of that rule is conjugation-covariant, foot coordinates are
unchanged when the whole presentation is conjugated.

A foot's coordinate is log of the far endpoint of its orthogeodesic in the
curve's chart: real part = arclength along the cuff from the gauge point,
imaginary part = normal angle.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .lattice import (
    ConjugacyClass,
    GroupPresentation,
    canonical_form,
    cyclic_reduce,
    format_word,
    in_window,
    invert_word,
    primitive_root,
    reduce_word,
)
from .moebius import (
    Frame,
    Geodesic,
    GroupElement,
    NotLoxodromic,
    ProjPoint,
    SharedEndpoint,
    axis,
    axis_chart,
    common_perpendicular,
    complex_distance,
    complex_translation_length,
    fixed_points,
    translation,
)

TWO_PI = 2.0 * math.pi


class CuffOutOfWindow(ValueError):
    def __init__(self, index: int, length: complex, R: float, eps: float):
        self.index = index
        self.length = length
        super().__init__(
            f"cuff {index} has length {length}, outside |l - {2 * R}| < {2 * eps}"
        )


class DegenerateConfiguration(ValueError):
    """Cuff axes (numerically) share an endpoint; no orthogeodesic exists."""


@dataclass(frozen=True)
class FlatTorusPoint:
    """A point of C modulo the lattice hl * Z + 2*pi*i * Z.

    The stored representative has Re z in [0, Re hl) and Im z in [0, 2*pi).
    """

    z: complex
    hl: complex

    def __post_init__(self):
        if self.hl.real <= 0.0:
            raise ValueError("lattice generator must have positive real part")
        z = complex(self.z)
        z -= math.floor(z.real / self.hl.real) * self.hl
        z -= complex(0.0, TWO_PI * math.floor(z.imag / TWO_PI))
        if z.real >= self.hl.real:  # float edge after subtraction
            z -= self.hl
            z -= complex(0.0, TWO_PI * math.floor(z.imag / TWO_PI))
        object.__setattr__(self, "z", z)

    def translated(self, w: complex) -> "FlatTorusPoint":
        return FlatTorusPoint(self.z + w, self.hl)

    def same_lattice(self, other: "FlatTorusPoint", tol: float = 1e-9) -> bool:
        return abs(self.hl - other.hl) <= tol


@dataclass(frozen=True)
class GoodCurve:
    """An (eps, R)-good curve: oriented conjugacy class plus half-length and
    the torus chart shared by both orientations of the geodesic."""

    cls: ConjugacyClass
    base_cls: ConjugacyClass
    sign: int
    hl: complex
    chart: GroupElement
    chart_inv: GroupElement

    @property
    def length(self) -> complex:
        return self.cls.length

    @property
    def base_key(self) -> str:
        return self.base_cls.word_key

    @property
    def key(self) -> str:
        return self.cls.word_key

    @property
    def lattice(self):
        return (self.hl, complex(0.0, TWO_PI))

    def torus_point(self, z: complex) -> FlatTorusPoint:
        return FlatTorusPoint(z, self.hl)


def _gauge_reference(rep: GroupElement, references, tol: float = 1e-8) -> ProjPoint:
    """Far endpoint of the common perpendicular toward the first reference
    element with a disjoint axis; conjugation-covariant."""
    rep_axis = axis(rep)
    for other in references:
        try:
            other_axis = axis(other)
        except NotLoxodromic:
            continue
        try:
            perp = common_perpendicular(rep_axis, other_axis, tol=tol)
        except SharedEndpoint:
            continue
        return perp.q
    # No usable reference (single-curve groups): fall back to a fixed sphere
    # point off the axis; gauge is arbitrary but deterministic, and no pants
    # exist on such curves anyway.
    mid = ProjPoint(rep_axis.p.num + rep_axis.q.num, rep_axis.p.den + rep_axis.q.den)
    if mid.same_as(rep_axis.p, 1e-9) or mid.same_as(rep_axis.q, 1e-9):
        mid = ProjPoint(rep_axis.p.num + 1j * rep_axis.q.num,
                        rep_axis.p.den + 1j * rep_axis.q.den)
    return mid


def _base_class(cls: ConjugacyClass, presentation: GroupPresentation):
    inv = cls.inverse_word
    if cls.canonical_word and inv < cls.canonical_word:
        rep = presentation.element(inv)
        base = ConjugacyClass(inv, rep, complex_translation_length(rep))
        return base, -1
    return cls, 1


def curve_from_class(
    cls: ConjugacyClass, presentation: GroupPresentation
) -> GoodCurve:
    base, sign = _base_class(cls, presentation)
    p_minus, p_plus = fixed_points(base.representative)
    ref = _gauge_reference(base.representative, presentation.generators)
    chart = axis_chart(p_minus, p_plus, ref)
    return GoodCurve(cls, base, sign, base.length / 2.0, chart, chart.inverse())


def curve_from_element(g: GroupElement, references=()) -> GoodCurve:
    """Curve for a raw matrix (synthetic pants); the element itself is the
    base representative."""
    ell = complex_translation_length(g)
    cls = ConjugacyClass(g.word, g, ell)
    p_minus, p_plus = fixed_points(g)
    ref = _gauge_reference(g, references)
    chart = axis_chart(p_minus, p_plus, ref)
    return GoodCurve(cls, cls, 1, ell / 2.0, chart, chart.inverse())


# ---------------------------------------------------------------------------
# pants equivalence keys


def _pair_canonical(wa, wb):
    """Canonical form of an ordered pair of words under simultaneous
    conjugation."""
    core, conj = cyclic_reduce(wa)
    if not core:
        raise ValueError("first word of a pants pair must be nontrivial")
    b0 = reduce_word(invert_word(conj) + tuple(wb) + conj)
    root, _ = primitive_root(core)
    span = len(b0) // max(1, len(root)) + 2
    best = None
    for k in range(len(core)):
        rot = core[k:] + core[:k]
        prefix = core[:k]
        for j in range(-span, span + 1):
            shift = tuple(root) * j if j >= 0 else invert_word(tuple(root) * (-j))
            b_cand = reduce_word(
                shift + invert_word(prefix) + b0 + prefix + invert_word(shift)
            )
            cand = (rot, (len(b_cand),) + b_cand)
            if best is None or cand < best:
                best = cand
    rot, tagged = best
    return rot, tagged[1:]


def pants_word_key(wa, wb) -> str:
    """Lexicographically least pair-canonical form over the three cyclic-move
    representatives (a, b) -> (b, (ba)^-1) -> ((ba)^-1, a)."""
    wa = reduce_word(wa)
    wb = reduce_word(wb)
    wc = invert_word(reduce_word(wb + wa))
    reps = [(wa, wb), (wb, wc), (wc, wa)]
    best = min(_pair_canonical(x, y) for x, y in reps)
    return f"W:{format_word(best[0])}|{format_word(best[1])}"


def _fmt_trace(t: complex) -> str:
    return f"{t.real:.9e},{t.imag:.9e}"


def pants_trace_key(a: GroupElement, b: GroupElement) -> str:
    """Conjugation- and cyclic-move-invariant key from the trace triple
    (tr a, tr b, tr ba); used for word-free (synthetic) pants."""
    ta, tb, tba = a.trace, b.trace, (b @ a).trace
    best = None
    for sa in (1.0, -1.0):
        for sb in (1.0, -1.0):
            triple = (sa * ta, sb * tb, sa * sb * tba)
            for r in range(3):
                rot = triple[r:] + triple[:r]
                cand = "|".join(_fmt_trace(t) for t in rot)
                if best is None or cand < best:
                    best = cand
    return f"T:{best}"


@dataclass(frozen=True)
class GoodPants:
    """An (eps, R)-good pants presented by the pair (a, b) with cuffs
    a, b, (ba)^-1.  Equality and hashing go through the canonical key."""

    a: GroupElement
    b: GroupElement
    cuffs: tuple
    lengths: tuple
    key: str
    orientation: int = field(default=1)
    cuff_curves: tuple = field(default=None)

    def __eq__(self, other):
        return isinstance(other, GoodPants) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def cuff(self, i: int) -> GroupElement:
        return self.cuffs[i % 3]


def make_pants(
    a: GroupElement,
    b: GroupElement,
    eps: float,
    R: float,
    cuff_curves: tuple = None,
) -> GoodPants:
    c = (b @ a).inverse()
    cuffs = (a, b, c)
    lengths = []
    for i, g in enumerate(cuffs):
        ell = complex_translation_length(g)
        if not in_window(ell, R, eps):
            raise CuffOutOfWindow(i, ell, R, eps)
        lengths.append(ell)
    if a.word and b.word:
        key = pants_word_key(a.word, b.word)
    else:
        key = pants_trace_key(a, b)
    return GoodPants(a, b, cuffs, tuple(lengths), key, 1, cuff_curves)


@dataclass(frozen=True)
class OrthoSegment:
    """Common perpendicular between two cuff axes with its complex length."""

    cuff_pair: tuple
    geodesic: Geodesic
    length: complex


def short_orthogeodesics(p: GoodPants):
    """The three seams of the pants: common perpendiculars between the cuff
    axes of (a, b, (ba)^-1), with complex lengths."""
    axes = []
    for i in range(3):
        try:
            axes.append(axis(p.cuff(i)))
        except NotLoxodromic as exc:  # pragma: no cover - guarded by make_pants
            raise DegenerateConfiguration(str(exc))
    segments = []
    for i, j in ((0, 1), (1, 2), (2, 0)):
        try:
            perp = common_perpendicular(axes[i], axes[j])
            length = complex_distance(axes[i], axes[j])
        except SharedEndpoint as exc:
            raise DegenerateConfiguration(
                f"cuff axes {i} and {j} share an endpoint: {exc}"
            )
        segments.append(OrthoSegment((i, j), perp, length))
    return segments


@dataclass(frozen=True)
class PantsEnd:
    """A pants with a marked cuff; carries the foot on N^1(sqrt(curve)) and
    the left/right orthogeodesic frames."""

    pants: GoodPants
    marked_cuff: int
    curve: GoodCurve
    sign: int
    foot: FlatTorusPoint
    z_left: complex
    z_right: complex
    left_frame: Frame
    right_frame: Frame

    @property
    def orientation_class(self) -> str:
        return "plus" if self.sign > 0 else "minus"


def _foot_coordinate(chart: GroupElement, perp: Geodesic) -> complex:
    e = chart.apply(perp.q).value()
    return cmath.log(e)


def end_for_cuff(
    p: GoodPants,
    i: int,
    curve: GoodCurve,
    conj: GroupElement = None,
    sign: int = 1,
) -> PantsEnd:
    """Build the marked end (p, C_i).

    `conj` carries the curve's base representative to the cuff element
    (cuff = conj base^sign conj^-1); identity for synthetic pants whose
    curve was built on the cuff element itself.
    """
    if conj is None:
        conj = GroupElement.identity()
    conj_inv = conj.inverse()
    base_axis = axis(curve.base_cls.representative)
    neighbors = {}
    for offset in (-1, 1):
        other = axis(p.cuff(i + offset)).transformed(conj_inv)
        try:
            perp = common_perpendicular(base_axis, other)
        except SharedEndpoint as exc:
            raise DegenerateConfiguration(str(exc))
        neighbors[offset] = _foot_coordinate(curve.chart, perp)
    z_left, z_right = neighbors[-1], neighbors[1]
    frames = {
        off: Frame(conj @ curve.chart_inv @ translation(z))
        for off, z in ((-1, z_left), (1, z_right))
    }
    return PantsEnd(
        pants=p,
        marked_cuff=i % 3,
        curve=curve,
        sign=sign,
        foot=curve.torus_point(z_left),
        z_left=z_left,
        z_right=z_right,
        left_frame=frames[-1],
        right_frame=frames[1],
    )


def find_conjugator(word, base_word):
    """(conjugator word, sign) with word = conj . base^sign . conj^-1 in the
    free group; raises ValueError when the classes differ."""
    core, u = cyclic_reduce(word)
    for target, sign in ((tuple(base_word), 1), (invert_word(base_word), -1)):
        if len(core) != len(target):
            continue
        for k in range(len(target)):
            if core == target[k:] + target[:k]:
                prefix = target[:k]
                return reduce_word(tuple(u) + invert_word(prefix)), sign
    raise ValueError("word is not conjugate to the base word or its inverse")


@dataclass(frozen=True)
class EndIndex:
    """Per-curve partition of ends into orientation classes."""

    by_curve: dict

    def plus(self, base_key: str):
        return self.by_curve.get(base_key, ((), ()))[1]

    def minus(self, base_key: str):
        return self.by_curve.get(base_key, ((), ()))[0]

    def curves(self):
        return sorted(self.by_curve)


def enumerate_good_pants(
    curves,
    presentation: GroupPresentation,
    max_word_len: int,
    eps: float,
    R: float,
):
    """All good pants whose defining pair (a, b) consists of enumerated
    elements of word length <= max_word_len, one representative per
    equivalence class, plus the curve -> ends index.

    Completeness is relative to that word bound: a pants is found iff some
    equivalent pair has both entries within the bound.
    """
    by_word = {c.canonical_word: c for c in curves}
    base_curves = {}
    curve_views = {}
    for c in curves:
        view = curve_from_class(c, presentation)
        curve_views[c.canonical_word] = view
        base_curves.setdefault(view.base_key, view if view.sign == 1 else None)
        if view.sign == 1:
            base_curves[view.base_key] = view

    # elements pool: reduced words up to the bound whose class is enumerated
    n = len(presentation.generators)
    letters = sorted(i for i in range(-n, n + 1) if i != 0)
    pool = []
    stack = [((), GroupElement.identity())]
    while stack:
        word, mat = stack.pop()
        if word and canonical_form(word) in by_word:
            pool.append((word, mat))
        if len(word) < max_word_len:
            for letter in letters:
                if word and letter == -word[-1]:
                    continue
                stack.append((word + (letter,), mat @ presentation.generator(letter)))
    pool.sort(key=lambda item: (len(item[0]), item[0]))

    chosen = {}
    for wa, ma in pool:
        for wb, mb in pool:
            wc = invert_word(reduce_word(wb + wa))
            if canonical_form(wc) not in by_word:
                continue
            try:
                pants = make_pants(
                    presentation.element(wa), presentation.element(wb), eps, R
                )
            except (NotLoxodromic, CuffOutOfWindow):
                continue
            prev = chosen.get(pants.key)
            if prev is None or (wa, wb) < (prev.a.word, prev.b.word):
                chosen[pants.key] = pants

    pants_list = []
    index: dict = {}
    for key in sorted(chosen):
        pants = chosen[key]
        ends = []
        oriented_views = []
        degenerate = False
        for i in range(3):
            cuff_word = pants.cuff(i).word
            curve_view = curve_views[canonical_form(cuff_word)]
            oriented_views.append(curve_view)
            base = base_curves[curve_view.base_key]
            conj_word, sign = find_conjugator(cuff_word, base.cls.canonical_word)
            conj = presentation.element(conj_word)
            try:
                ends.append(end_for_cuff(pants, i, base, conj, sign))
            except DegenerateConfiguration:
                degenerate = True
                break
        if degenerate:
            continue
        pants = GoodPants(
            pants.a, pants.b, pants.cuffs, pants.lengths, pants.key, 1,
            tuple(oriented_views),
        )
        ends = [
            PantsEnd(pants, e.marked_cuff, e.curve, e.sign, e.foot,
                     e.z_left, e.z_right, e.left_frame, e.right_frame)
            for e in ends
        ]
        pants_list.append(pants)
        for e in ends:
            minus, plus = index.setdefault(e.curve.base_key, ([], []))
            (plus if e.sign > 0 else minus).append(e)

    frozen = {
        k: (tuple(sorted(v[0], key=_end_order)), tuple(sorted(v[1], key=_end_order)))
        for k, v in index.items()
    }
    return pants_list, EndIndex(frozen)


def _end_order(end: PantsEnd):
    return (end.pants.key, end.marked_cuff)


# ---------------------------------------------------------------------------
# pants dump format: one record per pants, tab-separated


def dump_pants(path, pants_list, ends_by_pants):
    """Line-delimited pants records: canonical key, cuff words, cuff complex
    lengths, and per-end (sign, foot, raw left/right coordinates)."""
    lines = ["# pants dump", "# key\tcuff_words\tcuff_lengths\tends"]
    for p in pants_list:
        words = ",".join(format_word(p.cuff(i).word) for i in range(3))
        lengths = ",".join(_fmt_c(ell) for ell in p.lengths)
        ends = ";".join(
            f"{e.marked_cuff}:{e.curve.base_key}:{e.sign}:{_fmt_c(e.foot.z)}"
            f":{_fmt_c(e.z_left)}:{_fmt_c(e.z_right)}"
            for e in ends_by_pants[p.key]
        )
        mats = ",".join(
            _fmt_c(v) for g in (p.a, p.b) for v in (g.a, g.b, g.c, g.d)
        )
        lines.append(f"{p.key}\t{words}\t{lengths}\t{ends}\t{mats}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def _fmt_c(z: complex) -> str:
    return f"{z.real:.17g}{z.imag:+.17g}j"
