"""Rate-curve figures for simulation reports.

Uses the object-oriented matplotlib interface only; no pyplot, no global
figure state, safe to call from library code and tests alike.
"""

from __future__ import annotations

from typing import Sequence

from matplotlib.figure import Figure

from .experiments import TrialReport

__all__ = ["rate_figure", "save_rate_figure"]


def rate_figure(reports: Sequence[TrialReport], title: str | None = None) -> Figure:
    """Success rate against support size, with 95% Wilson error bars.

    Reports sharing (d, r) form one line; several configurations may be
    plotted together and are distinguished in the legend.
    """
    if len(reports) == 0:
        raise ValueError("nothing to plot: no reports")
    fig = Figure(figsize=(6.4, 4.2))
    ax = fig.add_subplot()
    groups: dict[tuple[int, int], list[TrialReport]] = {}
    for rep in reports:
        groups.setdefault((rep.d, rep.r), []).append(rep)
    for (d, r), reps in groups.items():
        reps = sorted(reps, key=lambda rep: rep.ell)
        ells = [rep.ell for rep in reps]
        rates = [rep.rate for rep in reps]
        err_low = [rep.rate - rep.wilson_ci[0] for rep in reps]
        err_high = [rep.wilson_ci[1] - rep.rate for rep in reps]
        ax.errorbar(
            ells,
            rates,
            yerr=[err_low, err_high],
            marker="o",
            capsize=3,
            label=f"d={d}, r={r}",
        )
    ax.set_xlabel("entries observed per column")
    ax.set_ylabel("success rate")
    ax.set_ylim(-0.03, 1.03)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="lower right")
    if title:
        ax.set_title(title)
    return fig


def save_rate_figure(
    reports: Sequence[TrialReport], path, title: str | None = None
) -> None:
    """Render the rate figure straight to an image file (format by suffix)."""
    rate_figure(reports, title=title).savefig(path, dpi=150, bbox_inches="tight")
