"""SVG figures for experiment outputs."""
import io
import logging
from pathlib import Path
from typing import Mapping, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from advlin.utils.artifacts import write_bytes_atomic  # noqa: E402

logger = logging.getLogger(__name__)

# Fixed salt and no date so the same data renders to the same bytes
matplotlib.rcParams["svg.hashsalt"] = "advlin"
_SVG_METADATA = {"Date": None}


def _save_svg(fig, path: Path) -> Path:
    buffer = io.BytesIO()
    fig.savefig(buffer, format="svg", metadata=_SVG_METADATA)
    plt.close(fig)
    written = write_bytes_atomic(path, buffer.getvalue())
    logger.debug(f"Wrote figure {written}")
    return written


def plot_sign_counts(
    path: Path,
    epsilons: Sequence[float],
    positive: Sequence[float],
    negative: Sequence[float],
    title: str
) -> Path:
    """Positive and negative counts against epsilon."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(epsilons, positive, marker="o", label="positive")
    ax.plot(epsilons, negative, marker="s", label="negative")
    ax.set_xlabel("epsilon")
    ax.set_ylabel("counts")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    return _save_svg(fig, path)


def plot_epoch_curves(
    path: Path,
    curves: Mapping[str, Sequence[float]],
    ylabel: str,
    title: str,
    reference: Optional[float] = None
) -> Path:
    """
    One line per labelled series against epoch number.

    Args:
        path: Output file
        curves: Label to per-epoch values
        ylabel: Y axis label
        title: Figure title
        reference: Optional horizontal reference line (e.g. the learning rate)
    """
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, values in curves.items():
        ax.plot(range(1, len(values) + 1), values, label=label)
    if reference is not None:
        ax.axhline(reference, color="grey", linestyle="--", linewidth=0.8)
    ax.set_xlabel("epoch")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    return _save_svg(fig, path)
