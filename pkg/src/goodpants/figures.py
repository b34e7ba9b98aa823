"""Figure rendering for the report paths (PNG files next to the CSV/TSV).

All figures use the Agg backend with fixed sizes so identical inputs give
identical bytes.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .pants import TWO_PI

_DPI = 110


def feet_scatter(path, surface, max_panels: int = 4):
    """Feet of the surface's ends on their curves' fundamental rectangles,
    one panel per curve, minus ends as circles and plus ends as crosses."""
    by_curve: dict = {}
    for e in surface.ends:
        by_curve.setdefault(e.curve_key, []).append(e)
    keys = sorted(by_curve)[:max_panels]
    n = max(1, len(keys))
    fig, axes = plt.subplots(1, n, figsize=(3.2 * n, 3.0), squeeze=False)
    for ax, key in zip(axes[0], keys):
        ends = by_curve[key]
        hl = ends[0].foot.hl
        for sign, marker, label in ((-1, "o", "minus"), (1, "x", "plus")):
            xs = [e.foot.z.real for e in ends if e.sign == sign]
            ys = [e.foot.z.imag for e in ends if e.sign == sign]
            ax.scatter(xs, ys, marker=marker, s=28, label=label)
        ax.set_xlim(0.0, hl.real)
        ax.set_ylim(0.0, TWO_PI)
        ax.set_xlabel("Re")
        ax.set_ylabel("Im")
        ax.set_title(f"feet on {key}", fontsize=9)
        ax.legend(fontsize=7)
    if not keys:
        axes[0][0].set_axis_off()
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def discrepancy_bars(path, rows):
    """Per-observable empirical vs target values with +-3 se whiskers."""
    fig, ax = plt.subplots(figsize=(1.0 + 0.9 * max(1, len(rows)), 3.2))
    xs = range(len(rows))
    ax.bar([x - 0.18 for x in xs], [r.empirical for r in rows], width=0.36,
           label="empirical")
    ax.bar([x + 0.18 for x in xs], [r.target for r in rows], width=0.36,
           yerr=[3.0 * r.target_se for r in rows], capsize=3, label="target")
    ax.set_xticks(list(xs))
    ax.set_xticklabels([r.observable for r in rows], rotation=45, ha="right",
                       fontsize=7)
    ax.set_ylabel("value")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def curvature_flow(path, lams, t_max: float = 2.5, steps: int = 121):
    """Principal-curvature evolution kappa_+-(lambda, t) for several lambda."""
    from .normal_flow import equidistant_curvatures

    ts = [t_max * k / (steps - 1) for k in range(steps)]
    fig, ax = plt.subplots(figsize=(4.2, 3.2))
    for lam in lams:
        kp = [equidistant_curvatures(lam, t)[0] for t in ts]
        km = [equidistant_curvatures(lam, t)[1] for t in ts]
        ax.plot(ts, kp, label=f"k+ ({lam})")
        ax.plot(ts, km, linestyle="--", label=f"k- ({lam})")
    ax.axhline(-1.0, color="gray", linewidth=0.6)
    ax.set_xlabel("t")
    ax.set_ylabel("principal curvature")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
