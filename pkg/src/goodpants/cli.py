"""Subcommand front end: curves, pants, match, assemble, connect, stats, flow.

Configuration is flat key=value text; command-line flags override file
values.  With a fixed seed every run is deterministic down to output bytes.
Exit codes: 0 success, 2 config problems, 3 missing inputs, 4 empty curve
window, 5 Hall witness (no perfect matching), 6 unbalanced sides,
7 assembly errors, 8 no eligible surgery swap, 9 bridge remains,
10 domain errors.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, field, replace
from fractions import Fraction

from . import assembly as asm
from . import equidist as eq
from . import figures
from . import lattice as lat
from . import matching as mt
from . import normal_flow as nf
from . import pants as pa
from .moebius import Frame, GroupElement, NotLoxodromic

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_MISSING = 3
EXIT_EMPTY_WINDOW = 4
EXIT_HALL_WITNESS = 5
EXIT_UNBALANCED = 6
EXIT_ASSEMBLY = 7
EXIT_NO_SWAP = 8
EXIT_BRIDGE = 9
EXIT_DOMAIN = 10


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    group: str = ""
    eps: float = 0.1
    R: float = 2.0
    max_word_len: int = 2
    q: float = 0.1
    c_eps: float = 1.0
    vol_m: float = 1.0
    C_seppi: float = 1.0
    seed: int = 0
    out: str = "out"
    threads: int = 1
    measure: str = "all"
    match_threshold: float = None
    duplicate: int = 1
    double_cover: bool = False
    surface_file: str = ""
    stats_samples: int = 4096
    stats_suite_size: int = 6
    stats_bump_radius: float = 2.5
    chart_half_width: float = 2.0
    chart_log_height: float = 1.0
    alpha_bulk: str = "1"
    targets: tuple = field(default=())  # (name, alpha string, atoms path)
    flow_lambdas: tuple = (0.3, 0.6)
    flow_t_max: float = 2.5
    flow_tau: float = 0.25
    flow_eta: float = 1.0
    flow_K: float = 1.2
    flow_bers: float = 0.25

    def validate(self):
        if self.eps <= 0.0 or self.R <= 0.0:
            raise ConfigError("eps and R must be positive")
        if self.max_word_len < 1:
            raise ConfigError("max_word_len must be >= 1")
        if self.duplicate < 1:
            raise ConfigError("duplicate must be >= 1")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")


_BOOL_KEYS = {"double_cover"}
_INT_KEYS = {"max_word_len", "seed", "threads", "duplicate", "stats_samples",
             "stats_suite_size"}
_FLOAT_KEYS = {"eps", "R", "q", "c_eps", "vol_m", "C_seppi", "match_threshold",
               "stats_bump_radius", "chart_half_width", "chart_log_height",
               "flow_t_max", "flow_tau", "flow_eta", "flow_K", "flow_bers"}
_STR_KEYS = {"group", "out", "measure", "surface_file", "alpha_bulk"}


def parse_config_file(path) -> dict:
    values: dict = {}
    targets: dict = {}
    with open(path, "r", encoding="ascii") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"not a key=value line: {line!r}")
            key, value = line.split("=", 1)
            key, value = key.strip(), value.strip()
            if key.startswith("target."):
                _, name, attr = key.split(".", 2)
                targets.setdefault(name, {})[attr] = value
            elif key == "flow_lambdas":
                values[key] = tuple(float(tok) for tok in value.split(";") if tok)
            elif key in _BOOL_KEYS:
                values[key] = value.lower() in ("1", "true", "yes", "on")
            elif key in _INT_KEYS:
                values[key] = int(value)
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            elif key in _STR_KEYS:
                values[key] = value
            else:
                raise ConfigError(f"unknown config key {key!r}")
    if targets:
        rows = []
        for name in sorted(targets):
            spec = targets[name]
            if "alpha" not in spec or "atoms" not in spec:
                raise ConfigError(f"target.{name} needs alpha and atoms")
            rows.append((name, spec["alpha"], spec["atoms"]))
        values["targets"] = tuple(rows)
    return values


def load_config(args) -> RunConfig:
    values = {}
    if args.config:
        if not os.path.exists(args.config):
            raise FileNotFoundError(args.config)
        values = parse_config_file(args.config)
    for attr, flag in (("group", "group"), ("out", "out"), ("eps", "eps"),
                       ("R", "R"), ("max_word_len", "max_word_len"),
                       ("seed", "seed"), ("threads", "threads")):
        cli_val = getattr(args, flag, None)
        if cli_val is not None:
            values[attr] = cli_val
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _fmt_c(z: complex) -> str:
    return f"{z.real:.17g}{z.imag:+.17g}j"


def _out_path(cfg: RunConfig, name: str) -> str:
    os.makedirs(cfg.out, exist_ok=True)
    return os.path.join(cfg.out, name)


def _require(path: str, what: str) -> str:
    if not path or not os.path.exists(path):
        raise FileNotFoundError(f"{what} not found: {path!r}")
    return path


# ---------------------------------------------------------------------------
# shared pipeline loading


def _load_presentation(cfg: RunConfig) -> lat.GroupPresentation:
    return lat.read_group_file(_require(cfg.group, "group file"))


def _load_curves(cfg: RunConfig, presentation) -> list:
    path = _require(_out_path(cfg, "curves.tsv"), "curves artifact")
    classes = []
    with open(path, "r", encoding="ascii") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            word = lat.parse_word(line.split("\t")[0])
            rep = presentation.element(word)
            classes.append(lat.ConjugacyClass(word, rep, lat.complex_translation_length(rep)))
    return classes


def _enumerate_pipeline(cfg: RunConfig, presentation, curves):
    pants_list, index = pa.enumerate_good_pants(
        curves, presentation, cfg.max_word_len, cfg.eps, cfg.R
    )
    ends_by: dict = {}
    for key in index.curves():
        for e in index.minus(key) + index.plus(key):
            ends_by.setdefault(e.pants.key, []).append(e)
    for k in ends_by:
        ends_by[k].sort(key=lambda e: e.marked_cuff)
    return pants_list, index, ends_by


def _select_measure(cfg: RunConfig, pants_list) -> asm.PantsMeasure:
    if cfg.measure == "all":
        return asm.PantsMeasure.of({p: 1 for p in pants_list})
    weights = {}
    by_key = {p.key: p for p in pants_list}
    for item in cfg.measure.split(";"):
        item = item.strip()
        if not item:
            continue
        key, _, weight = item.rpartition("=")
        if key not in by_key:
            raise ConfigError(f"measure references unknown pants {key!r}")
        weights[by_key[key]] = int(weight)
    if not weights:
        raise ConfigError("measure selected no pants")
    return asm.PantsMeasure.of(weights)


# ---------------------------------------------------------------------------
# subcommands


def cmd_curves(cfg: RunConfig) -> int:
    presentation = _load_presentation(cfg)
    try:
        classes = lat.enumerate_conjugacy_classes(
            presentation, cfg.max_word_len, cfg.R, cfg.eps, workers=cfg.threads
        )
    except lat.EmptyWindow as exc:
        with open(_out_path(cfg, "curves.tsv"), "w", encoding="ascii") as fh:
            fh.write("# canonical_word\tlength\thalf_length\ttrace\n")
        print(f"curves: empty window ({exc})")
        return EXIT_EMPTY_WINDOW
    lines = ["# canonical_word\tlength\thalf_length\ttrace"]
    for c in classes:
        lines.append(
            f"{c.word_key}\t{_fmt_c(c.length)}\t{_fmt_c(c.length / 2.0)}"
            f"\t{_fmt_c(c.representative.trace)}"
        )
    collisions = lat.trace_collision_report(classes)
    for group in collisions:
        lines.append("# trace-collision " + " ".join(lat.format_word(w) for w in group))
    with open(_out_path(cfg, "curves.tsv"), "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"curves: {len(classes)} classes -> {_out_path(cfg, 'curves.tsv')}")
    return EXIT_OK


def cmd_pants(cfg: RunConfig) -> int:
    presentation = _load_presentation(cfg)
    curves = _load_curves(cfg, presentation)
    pants_list, index, ends_by = _enumerate_pipeline(cfg, presentation, curves)
    path = _out_path(cfg, "pants.tsv")
    lines = ["# key\tpair_words\tcuff_words\tcuff_lengths\tends"]
    for p in pants_list:
        words = ",".join(lat.format_word(p.cuff(i).word) for i in range(3))
        pair = f"{lat.format_word(p.a.word)},{lat.format_word(p.b.word)}"
        lengths = ",".join(_fmt_c(ell) for ell in p.lengths)
        ends = ";".join(
            f"{e.marked_cuff}:{e.curve.base_key}:{e.sign}:{_fmt_c(e.foot.z)}"
            f":{_fmt_c(e.z_left)}:{_fmt_c(e.z_right)}"
            for e in ends_by[p.key]
        )
        lines.append(f"{p.key}\t{pair}\t{words}\t{lengths}\t{ends}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"pants: {len(pants_list)} classes -> {path}")
    return EXIT_OK


def _matchings_for(cfg: RunConfig, mu, index, ends_by):
    instances, ends = asm.instantiate_measure(mu, ends_by)
    by_curve: dict = {}
    for e in ends:
        by_curve.setdefault(e.curve_key, ([], []))[0 if e.sign < 0 else 1].append(e)
    results = {}
    for key in sorted(by_curve):
        minus, plus = by_curve[key]
        minus.sort(key=lambda e: e.end_id)
        plus.sort(key=lambda e: e.end_id)
        graph = mt.build_feet_graph(minus, plus, cfg.eps, cfg.R,
                                    threshold=cfg.match_threshold)
        results[key] = (minus, plus, mt.perfect_matching(graph))
    return instances, ends, results


def cmd_match(cfg: RunConfig) -> int:
    presentation = _load_presentation(cfg)
    curves = _load_curves(cfg, presentation)
    _require(_out_path(cfg, "pants.tsv"), "pants artifact")
    pants_list, index, ends_by = _enumerate_pipeline(cfg, presentation, curves)
    mu = _select_measure(cfg, pants_list)
    instances, ends, results = _matchings_for(cfg, mu, index, ends_by)
    lines = ["# curve\tstatus\tpairs_or_witness\tmax_discrepancy"]
    any_witness = False
    for key in sorted(results):
        minus, plus, result = results[key]
        if result.is_perfect:
            pairs = ";".join(
                f"{minus[i].end_id}~{plus[j].end_id}" for i, j in result.pairs
            )
            worst = max(
                (mt.glued_distance(minus[i].foot, plus[j].foot)
                 for i, j in result.pairs),
                default=0.0,
            )
            lines.append(f"{key}\tmatched\t{pairs}\t{_fmt(worst)}")
        else:
            any_witness = True
            wit = ";".join(minus[i].end_id for i in result.witness)
            lines.append(f"{key}\twitness\t{wit}\t-")
    with open(_out_path(cfg, "matching.tsv"), "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"match: {len(results)} curves -> {_out_path(cfg, 'matching.tsv')}")
    return EXIT_HALL_WITNESS if any_witness else EXIT_OK


def cmd_assemble(cfg: RunConfig) -> int:
    presentation = _load_presentation(cfg)
    curves = _load_curves(cfg, presentation)
    _require(_out_path(cfg, "matching.tsv"), "matching artifact")
    pants_list, index, ends_by = _enumerate_pipeline(cfg, presentation, curves)
    mu = _select_measure(cfg, pants_list)
    instances, ends, results = _matchings_for(cfg, mu, index, ends_by)
    matchings = {}
    for key, (minus, plus, result) in results.items():
        if not result.is_perfect:
            raise asm.UnmatchedEnd(f"curve {key} has a Hall witness; cannot assemble")
        matchings[key] = [(minus[i].end_id, plus[j].end_id) for i, j in result.pairs]
    surface = asm.assemble(instances, ends, matchings, cfg.eps, cfg.R)
    asm.write_surface(_out_path(cfg, "surface.txt"), surface)
    genera = surface.component_genera()
    print(
        f"assemble: {surface.pants_count} pants, chi={surface.euler_characteristic}, "
        f"components={[(len(c), g) for c, _, g in genera]} -> "
        f"{_out_path(cfg, 'surface.txt')}"
    )
    return EXIT_OK


def cmd_connect(cfg: RunConfig) -> int:
    surface = asm.read_surface(_require(_out_path(cfg, "surface.txt"), "surface artifact"))
    if cfg.double_cover:
        surface = asm.nonseparating_double_cover(surface)
    if cfg.duplicate > 1:
        surface = _disjoint_copies(surface, cfg.duplicate)
    connected, swaps = asm.reglue_connect(surface)
    asm.write_surface(_out_path(cfg, "surface_connected.txt"), connected)
    lines = ["# curve\tgap\tremoved\tadded"]
    for s in swaps:
        removed = ";".join("~".join(pair) for pair in s.removed)
        added = ";".join("~".join(pair) for pair in s.added)
        lines.append(f"{s.curve_key}\t{_fmt(s.gap)}\t{removed}\t{added}")
    with open(_out_path(cfg, "swaps.tsv"), "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
    print(
        f"connect: {len(swaps)} swaps, components "
        f"{len(surface.components())} -> {len(connected.components())}, "
        f"max discrepancy {_fmt(connected.max_discrepancy())}"
    )
    return EXIT_OK


def _disjoint_copies(surface: asm.Surface, n: int) -> asm.Surface:
    shift = max(rec.instance for rec in surface.instances) + 1
    instances = []
    ends = []
    pairs = []
    for k in range(n):
        off = k * shift
        for rec in surface.instances:
            instances.append(replace(rec, instance=rec.instance + off))
        for e in surface.ends:
            ends.append(replace(e, end_id=f"{e.end_id}#{k}", instance=e.instance + off))
        for p in surface.pairs:
            pairs.append(asm.Pairing(f"{p.minus_id}#{k}", f"{p.plus_id}#{k}",
                                     p.discrepancy))
    return asm.Surface(surface.eps, surface.R, tuple(instances), tuple(ends),
                       tuple(pairs))


def _load_target(cfg: RunConfig) -> eq.TargetMeasure:
    window = eq.ChartWindow(cfg.chart_half_width, cfg.chart_log_height)
    parts = []
    for name, alpha, atoms_path in cfg.targets:
        frames = []
        weights = []
        with open(_require(atoms_path, f"target atoms for {name}"), "r",
                  encoding="ascii") as fh:
            for raw in fh:
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                vals = [float(t) for t in line.split()]
                if len(vals) != 9:
                    raise ConfigError("atom lines need 8 frame floats + weight")
                frames.append(Frame(GroupElement(
                    complex(vals[0], vals[1]), complex(vals[2], vals[3]),
                    complex(vals[4], vals[5]), complex(vals[6], vals[7]))))
                weights.append(vals[8])
        part = eq.EmpiricalFrameMeasure.from_frames(frames, weights)
        parts.append((name, float(Fraction(alpha)), part))
    alpha_bulk = float(Fraction(cfg.alpha_bulk))
    return eq.TargetMeasure(alpha_bulk, eq.HaarChartSampler(window), tuple(parts))


def _write_measure_dump(path, measure: eq.EmpiricalFrameMeasure):
    lines = ["# frame a b c d (re im each) weight"]
    for frame, w in measure.atoms:
        g = frame.g
        vals = [g.a.real, g.a.imag, g.b.real, g.b.imag,
                g.c.real, g.c.imag, g.d.real, g.d.imag, w]
        lines.append(" ".join(_fmt(v) for v in vals))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def cmd_stats(cfg: RunConfig) -> int:
    name = cfg.surface_file
    if not name:
        name = ("surface_connected.txt"
                if os.path.exists(_out_path(cfg, "surface_connected.txt"))
                else "surface.txt")
    surface = asm.read_surface(_require(_out_path(cfg, name), "surface artifact"))
    bary = eq.surface_measure(surface)
    feet = eq.feet_measure(surface)
    target = _load_target(cfg)
    window = eq.ChartWindow(cfg.chart_half_width, cfg.chart_log_height)
    suite = eq.default_suite(cfg.seed, cfg.stats_suite_size,
                             cfg.stats_bump_radius, window)
    rows = eq.discrepancy(bary, target, suite, cfg.stats_samples, cfg.seed)
    feet_rows = eq.discrepancy(feet, target, suite, cfg.stats_samples, cfg.seed)
    lines = ["observable,measure,empirical,target,target_se,gap"]
    for label, rr in (("barycenters", rows), ("feet", feet_rows)):
        for r in rr:
            lines.append(
                f"{r.observable},{label},{_fmt(r.empirical)},{_fmt(r.target)},"
                f"{_fmt(r.target_se)},{_fmt(r.gap)}"
            )
    with open(_out_path(cfg, "stats.csv"), "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
    _write_measure_dump(_out_path(cfg, "barycenters.tsv"), bary)
    _write_measure_dump(_out_path(cfg, "feet.tsv"), feet)
    figures.feet_scatter(_out_path(cfg, "feet_torus.png"), surface)
    figures.discrepancy_bars(_out_path(cfg, "discrepancy.png"), rows)
    print(
        f"stats: {len(rows)} observables; max barycenter gap "
        f"{_fmt(max((r.gap for r in rows), default=0.0))} -> "
        f"{_out_path(cfg, 'stats.csv')}"
    )
    return EXIT_OK


def cmd_flow(cfg: RunConfig) -> int:
    lines = ["quantity,inputs,value"]
    lines.append(f"equidistant_metric_factor,t={_fmt(cfg.flow_tau)},"
                 f"{_fmt(nf.equidistant_metric_factor(cfg.flow_tau))}")
    grad = (0.1, -0.2)
    lines.append(
        "jacobian_pleated,"
        f"tau={_fmt(cfg.flow_tau)};grad=(0.1;-0.2),"
        f"{_fmt(nf.jacobian_pleated(cfg.flow_tau, grad))}"
    )
    shape = ((0.2, 0.05), (0.05, -0.1))
    lines.append(
        "jacobian_minimal,"
        f"tau={_fmt(cfg.flow_tau)};grad=(0.1;-0.2);A=((0.2;0.05);(0.05;-0.1)),"
        f"{_fmt(nf.jacobian_minimal(cfg.flow_tau, grad, shape))}"
    )
    for lam in cfg.flow_lambdas:
        for frac in (0.0, 0.5, 1.0):
            t = cfg.flow_t_max * frac
            kp, km = nf.equidistant_curvatures(lam, t)
            lines.append(f"equidistant_curvatures,lam={_fmt(lam)};t={_fmt(t)},"
                         f"{_fmt(kp)};{_fmt(km)}")
    try:
        angle = nf.convexity_angle(cfg.flow_tau, cfg.flow_eta)
        lines.append(f"convexity_angle,tau={_fmt(cfg.flow_tau)};eta={_fmt(cfg.flow_eta)},"
                     f"{_fmt(angle)}")
    except nf.VacuousBound:
        lines.append(f"convexity_angle,tau={_fmt(cfg.flow_tau)};eta={_fmt(cfg.flow_eta)},"
                     "vacuous")
    lines.append(f"seppi_curvature_bound,K={_fmt(cfg.flow_K)};C={_fmt(cfg.C_seppi)},"
                 f"{_fmt(nf.seppi_curvature_bound(cfg.flow_K, cfg.C_seppi))}")
    lines.append(f"bers_collar,bers={_fmt(cfg.flow_bers)},"
                 f"{_fmt(nf.bers_collar(cfg.flow_bers))}")
    for genus in (2, 3):
        lines.append(f"gauss_bonnet_area,g={genus},{_fmt(nf.gauss_bonnet_area(genus))}")
    lam_sup = max(cfg.flow_lambdas) if cfg.flow_lambdas else 0.0
    lines.append(f"area_ratio_bound,lam_sup={_fmt(lam_sup)},"
                 f"{_fmt(nf.area_ratio_bound(lam_sup))}")
    with open(_out_path(cfg, "flow.csv"), "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
    figures.curvature_flow(_out_path(cfg, "flow.png"), cfg.flow_lambdas,
                           cfg.flow_t_max)
    print(f"flow: {len(lines) - 1} rows -> {_out_path(cfg, 'flow.csv')}")
    return EXIT_OK


# ---------------------------------------------------------------------------


_COMMANDS = {
    "curves": cmd_curves,
    "pants": cmd_pants,
    "match": cmd_match,
    "assemble": cmd_assemble,
    "connect": cmd_connect,
    "stats": cmd_stats,
    "flow": cmd_flow,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="goodpants",
        description="good-pants construction pipeline for hyperbolic 3-manifolds",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--group", default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--eps", type=float, default=None)
        p.add_argument("--R", type=float, default=None)
        p.add_argument("--max-word-len", dest="max_word_len", type=int, default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"missing input: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except lat.EmptyWindow as exc:
        print(f"empty window: {exc}", file=sys.stderr)
        return EXIT_EMPTY_WINDOW
    except mt.UnbalancedSides as exc:
        print(f"unbalanced sides: {exc}", file=sys.stderr)
        return EXIT_UNBALANCED
    except (asm.UnmatchedEnd, asm.OrientationClash, asm.ZeroMeasure,
            asm.InvalidWeights) as exc:
        print(f"assembly error: {exc}", file=sys.stderr)
        return EXIT_ASSEMBLY
    except asm.NoEligibleSwap as exc:
        print(f"surgery stuck: {exc}", file=sys.stderr)
        return EXIT_NO_SWAP
    except asm.BridgeRemains as exc:
        print(f"cover degenerate: {exc}", file=sys.stderr)
        return EXIT_BRIDGE
    except (NotLoxodromic, nf.OutOfDomain, nf.InvalidCurvature, nf.VacuousBound,
            nf.InvalidGenus, mt.LatticeMismatch, pa.CuffOutOfWindow,
            pa.DegenerateConfiguration) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
