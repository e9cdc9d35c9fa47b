"""Figure rendering for comparison runs.

One SVG per requested time, two stacked panels (a over b): the simulated
profile as a black line, the leading-order values colored by zone, and
the scenario rays as dashed verticals.  Output is deterministic for a
fixed report (fixed hash salt, no timestamps), so figures can be diffed.
"""

from __future__ import annotations

from pathlib import Path

from .harness import ComparisonReport

__all__ = ["ZONE_COLORS", "emit_plots"]

ZONE_COLORS = {
    "left_bg": "0.45",
    "right_bg": "0.45",
    "slope_left": "tab:green",
    "slope_right": "tab:olive",
    "middle_const": "tab:orange",
    "gap": "tab:red",
    "left_whitham": "tab:blue",
    "right_whitham": "tab:purple",
    "left_twoband": "tab:cyan",
}


def _axes_style(ax, ylabel):
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.25, linewidth=0.5)


def emit_plots(report: ComparisonReport, snapshots, out_dir) -> list:
    """Render one figure per time; returns the written paths."""
    import matplotlib
    matplotlib.use("Agg")
    matplotlib.rcParams["svg.hashsalt"] = "todalab"
    import matplotlib.pyplot as plt

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    by_time: dict = {}
    for row in report.sites:
        by_time.setdefault(row[0], []).append(row)

    paths = []
    for t, state in zip(report.times, snapshots):
        fig, (ax_a, ax_b) = plt.subplots(
            2, 1, figsize=(9.0, 6.0), sharex=True)

        # clip the view to the wave pattern plus a margin of background
        xs = [r["xi"] for r in report.scenario["rays_physical"]]
        lo = max(report.window[0], int(min(xs) * t) - 40)
        hi = min(report.window[1], int(max(xs) * t) + 40)
        ns = [n for n in range(lo, hi + 1)]
        idx0 = ns[0] - state.n_min
        a_sim = state.a[idx0:idx0 + len(ns)]
        b_sim = state.b[idx0:idx0 + len(ns)]
        ax_a.plot(ns, a_sim, color="black", linewidth=0.8, label="simulation")
        ax_b.plot(ns, b_sim, color="black", linewidth=0.8)

        seen = set()
        for zone in sorted({row[3] for row in by_time.get(t, [])}):
            rows = [r for r in by_time[t] if r[3] == zone]
            rows.sort(key=lambda r: r[1])
            color = ZONE_COLORS.get(zone, "tab:pink")
            label = zone if zone not in seen else None
            seen.add(zone)
            ax_a.plot([r[1] for r in rows], [r[6] for r in rows],
                      color=color, linewidth=1.4, alpha=0.9, label=label)
            ax_b.plot([r[1] for r in rows], [r[7] for r in rows],
                      color=color, linewidth=1.4, alpha=0.9)

        for ray in report.scenario["rays_physical"]:
            for ax in (ax_a, ax_b):
                ax.axvline(ray["xi"] * t, color="0.6", linestyle="--",
                           linewidth=0.7)
            ax_a.annotate(ray["label"], (ray["xi"] * t, 1.01),
                          xycoords=("data", "axes fraction"),
                          fontsize=7, ha="center", color="0.35")

        _axes_style(ax_a, "a(n)")
        _axes_style(ax_b, "b(n)")
        ax_b.set_xlabel("n")
        ax_a.legend(loc="upper right", fontsize=7, framealpha=0.9)
        la, lb = report.left, report.right
        ax_a.set_title(
            f"left ({la.a:g}, {la.b:g}), right ({lb.a:g}, {lb.b:g}), "
            f"t = {t:g}", fontsize=10)

        path = out / f"fig_t{t:g}.svg"
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
        paths.append(path)
    return paths
