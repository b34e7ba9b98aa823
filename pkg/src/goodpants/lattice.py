"""Group ingestion and enumeration of loxodromic conjugacy classes.

Words are tuples of signed 1-based generator indices.  Conjugacy testing is
done at the free-group level via canonical cyclic words; trace buckets flag
collisions that relators might identify (never merged silently).
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .moebius import (
    TOL,
    GroupElement,
    NotLoxodromic,
    complex_translation_length,
    invert_word,
)


class EmptyWindow(Exception):
    """No conjugacy class fell in the requested length window (informational)."""


def reduce_word(word) -> tuple:
    out = []
    for letter in word:
        if letter == 0:
            raise ValueError("zero is not a generator index")
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def cyclic_reduce(word):
    """Return (core, conj) with word = conj . core . conj^-1 and core
    cyclically reduced."""
    core = list(reduce_word(word))
    conj = []
    while len(core) >= 2 and core[0] == -core[-1]:
        conj.append(core[0])
        core = core[1:-1]
    return tuple(core), tuple(conj)


def canonical_form(word) -> tuple:
    """Lexicographically least cyclic rotation of the cyclic reduction.

    Invariant under cyclic rotation and free reduction; a word and its
    inverse keep distinct canonical forms (orientation matters).
    """
    core, _ = cyclic_reduce(word)
    if not core:
        return ()
    return min(core[i:] + core[:i] for i in range(len(core)))


def primitive_root(word):
    """Smallest p with word equal to its rotation by p; returns (root, m)
    with word = root^m."""
    n = len(word)
    for p in range(1, n + 1):
        if n % p == 0 and word[p:] + word[:p] == word:
            return word[:p], n // p
    return word, 1


def is_primitive(word) -> bool:
    core, _ = cyclic_reduce(word)
    if not core:
        return False
    return primitive_root(core)[1] == 1


@dataclass(frozen=True)
class GroupPresentation:
    """Generator matrices of a discrete subgroup of PSL(2,C).

    Discreteness and cocompactness are trusted, not verified.
    """

    generators: tuple
    relators: tuple = field(default=())
    label: str = ""

    def __post_init__(self):
        gens = tuple(self.generators)
        if not gens:
            raise ValueError("need at least one generator")
        for g in gens:
            if abs(g.det - 1.0) > TOL:
                raise ValueError("generator determinant is not 1")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "relators", tuple(tuple(r) for r in self.relators))

    def generator(self, letter: int) -> GroupElement:
        g = self.generators[abs(letter) - 1]
        return g if letter > 0 else g.inverse()

    def element(self, word) -> GroupElement:
        out = GroupElement(1.0, 0.0, 0.0, 1.0, ())
        for letter in reduce_word(word):
            out = out @ self.generator(letter)
        return GroupElement(out.a, out.b, out.c, out.d, reduce_word(word))


def write_group_file(path, presentation: GroupPresentation):
    lines = []
    if presentation.label:
        lines.append(f"# {presentation.label}")
    lines.append("# one generator per line:")
    lines.append("# Re(a) Im(a) Re(b) Im(b) Re(c) Im(c) Re(d) Im(d)")
    for g in presentation.generators:
        vals = [g.a.real, g.a.imag, g.b.real, g.b.imag,
                g.c.real, g.c.imag, g.d.real, g.d.imag]
        lines.append(" ".join(f"{v:.17g}" for v in vals))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def read_group_file(path) -> GroupPresentation:
    gens = []
    with open(path, "r", encoding="ascii") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = [float(tok) for tok in line.split()]
            if len(parts) != 8:
                raise ValueError(f"expected 8 floats per generator, got {len(parts)}")
            a = complex(parts[0], parts[1])
            b = complex(parts[2], parts[3])
            c = complex(parts[4], parts[5])
            d = complex(parts[6], parts[7])
            det = a * d - b * c
            if abs(det - 1.0) > TOL:
                raise ValueError(f"generator determinant {det} is not 1 within 1e-9")
            gens.append(GroupElement(a, b, c, d))
    return GroupPresentation(tuple(gens))


@dataclass(frozen=True)
class ConjugacyClass:
    """A loxodromic conjugacy class with its canonical cyclic word."""

    canonical_word: tuple
    representative: GroupElement
    length: complex

    @property
    def inverse_word(self) -> tuple:
        return canonical_form(invert_word(self.canonical_word))

    @property
    def word_key(self) -> str:
        return format_word(self.canonical_word)

    def sort_key(self):
        return (len(self.canonical_word), self.canonical_word)


def format_word(word) -> str:
    return ".".join(str(w) for w in word) if word else "e"


def parse_word(text: str) -> tuple:
    if text == "e":
        return ()
    return tuple(int(tok) for tok in text.split("."))


def in_window(length: complex, R: float, eps: float) -> bool:
    """Good-curve test: the complex length is within 2*eps of 2R (strict)."""
    return abs(length - 2.0 * R) < 2.0 * eps


def _scan_prefix(pres, prefix, max_word_len, R, eps, found):
    """DFS over reduced words extending `prefix`, recording in-window classes."""
    n = len(pres.generators)
    letters = [i for i in range(-n, n + 1) if i != 0]
    stack = [(list(prefix), pres.element(prefix))]
    while stack:
        word, mat = stack.pop()
        if word:
            try:
                ell = complex_translation_length(mat)
            except NotLoxodromic:
                ell = None
            if ell is not None and in_window(ell, R, eps) and is_primitive(word):
                key = canonical_form(word)
                if key not in found:
                    found[key] = True
        if len(word) < max_word_len:
            for letter in sorted(letters):
                if word and letter == -word[-1]:
                    continue
                stack.append((word + [letter], mat @ pres.generator(letter)))


def enumerate_conjugacy_classes(
    presentation: GroupPresentation,
    max_word_len: int,
    R: float,
    eps: float,
    workers: int = 1,
):
    """All primitive loxodromic conjugacy classes with |l - 2R| < 2*eps among
    words of length <= max_word_len.  Deterministic; raises EmptyWindow when
    nothing is found."""
    if max_word_len < 1:
        raise ValueError("max_word_len must be >= 1")
    if not (0.0 < 2.0 * eps < 2.0 * R):
        raise ValueError("window requires 0 < 2*eps < 2R")
    n = len(presentation.generators)
    letters = [i for i in range(-n, n + 1) if i != 0]
    keys: dict = {}
    if workers <= 1:
        _scan_prefix(presentation, (), max_word_len, R, eps, keys)
    else:
        parts = [dict() for _ in letters]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_scan_prefix, presentation, (letter,), max_word_len, R, eps, part)
                for letter, part in zip(sorted(letters), parts)
            ]
            for fut in futures:
                fut.result()
        for part in parts:
            keys.update(part)
    classes = []
    for key in sorted(keys, key=lambda w: (len(w), w)):
        rep = presentation.element(key)
        classes.append(ConjugacyClass(key, rep, complex_translation_length(rep)))
    if not classes:
        raise EmptyWindow(
            f"no primitive loxodromic class with |l - {2 * R}| < {2 * eps} "
            f"up to word length {max_word_len}"
        )
    return classes


def trace_collision_report(classes, tol: float = 1e-6):
    """Groups of classes sharing a trace bucket without being mutually
    inverse: candidates for identification by relators the free-group word
    test cannot see.  Review aid only; nothing is merged."""
    buckets: dict = {}
    for cls in classes:
        t = cls.representative.trace
        if (t.real, t.imag) < (0.0, 0.0):
            t = -t
        key = (round(t.real / tol), round(t.imag / tol))
        buckets.setdefault(key, []).append(cls)
    report = []
    for key in sorted(buckets):
        group = buckets[key]
        if len(group) < 2:
            continue
        words = {c.canonical_word for c in group}
        nontrivial = any(
            w2 not in (w1, canonical_form(invert_word(w1)))
            for w1 in words
            for w2 in words
        )
        if nontrivial:
            report.append(tuple(sorted(words, key=lambda w: (len(w), w))))
    return report
