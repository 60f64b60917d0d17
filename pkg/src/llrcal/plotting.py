"""Tippett plot rendering.

The CSV emitted by the evaluation module is the data contract; figures
rendered here are a convenience view of the same curve.  Output format
follows the file extension (SVG recommended); SVG output is scrubbed of
timestamps and uses a fixed id salt so repeated runs produce identical
bytes.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .evaluation import TippettCurve


def render_tippett(curve: TippettCurve, path, title: str | None = None) -> None:
    """Draw both survival curves against the base-10 LLR threshold axis."""
    with matplotlib.rc_context({"svg.hashsalt": "llrcal"}):
        fig, ax = plt.subplots(figsize=(6.0, 4.5))
        ax.plot(
            curve.thresholds,
            curve.so_proportions,
            color="tab:blue",
            label="same-origin",
        )
        ax.plot(
            curve.thresholds,
            curve.do_proportions,
            color="tab:red",
            linestyle="--",
            label="different-origin",
        )
        ax.axvline(0.0, color="0.6", linewidth=0.8)
        ax.set_xlabel(r"$\log_{10}$ likelihood-ratio threshold")
        ax.set_ylabel("proportion of LLRs at or above threshold")
        ax.set_ylim(-0.02, 1.02)
        ax.grid(alpha=0.3)
        ax.legend(loc="best")
        if title:
            ax.set_title(title)
        fig.tight_layout()
        kwargs = {}
        if Path(path).suffix.lower() == ".svg":
            kwargs["metadata"] = {"Date": None}
        try:
            fig.savefig(path, **kwargs)
        finally:
            plt.close(fig)
