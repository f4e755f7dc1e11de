#!/usr/bin/env python3
"""
================================================================
🖼️ SVG RENDER - Figures for cell sets, curves and grid graphs
One filled square per cell, one dot per cut point, polylines for
sampled curves and segment collections for X_j and H
================================================================
"""

import logging
from pathlib import Path
from typing import Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams.update({
    "svg.hashsalt": "fractal-tangent-lab",
    "svg.fonttype": "none",
    "font.family": "DejaVu Sans",
    "axes.unicode_minus": False,
})
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.collections import LineCollection, PolyCollection  # noqa: E402

from setops import CellSet, Point  # noqa: E402

logger = logging.getLogger(__name__)

CELL_COLOR = "#2c5282"
CUT_COLOR = "#c53030"
CURVE_COLOR = "#dd6b20"


def _cell_polygons(cells: CellSet) -> np.ndarray:
    h = float(cells.cell_size)
    corners = cells.corner_array().astype(np.float64) * h
    corners += np.array([float(c) for c in cells.origin_offset])
    unit = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=np.float64) * h
    return corners[:, None, :] + unit[None, :, :]


def _save(fig, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.info(f"🖼️ wrote {path}")
    return path


def _frame(title: Optional[str]):
    fig, ax = plt.subplots(figsize=(6.0, 6.0))
    ax.set_aspect("equal")
    ax.set_axis_off()
    if title:
        ax.set_title(title)
    return fig, ax


def render_cells(cells: CellSet, path: Union[str, Path], cut_points: Sequence[Point] = (),
                 title: Optional[str] = None) -> Path:
    fig, ax = _frame(title)
    if len(cells):
        ax.add_collection(PolyCollection(_cell_polygons(cells), facecolors=CELL_COLOR, edgecolors="none"))
    if cut_points:
        pts = np.array([[float(c) for c in p] for p in cut_points])
        ax.scatter(pts[:, 0], pts[:, 1], s=12, color=CUT_COLOR, zorder=3)
    ax.autoscale_view()
    return _save(fig, path)


def render_curve(points: np.ndarray, path: Union[str, Path], cells: Optional[CellSet] = None,
                 title: Optional[str] = None) -> Path:
    """Polyline through sampled curve points, over the carpet when given"""
    fig, ax = _frame(title)
    if cells is not None and len(cells):
        ax.add_collection(PolyCollection(_cell_polygons(cells), facecolors=CELL_COLOR,
                                         edgecolors="none", alpha=0.35))
    pts = np.asarray(points, dtype=np.float64)
    ax.plot(pts[:, 0], pts[:, 1], color=CURVE_COLOR, linewidth=0.6)
    ax.autoscale_view()
    return _save(fig, path)


def render_segments(segments: np.ndarray, path: Union[str, Path], title: Optional[str] = None) -> Path:
    """(S, 2, 2) array of planar segments"""
    segments = np.asarray(segments, dtype=np.float64)
    if segments.ndim != 3 or segments.shape[1:] != (2, 2):
        raise ValueError("render_segments needs planar segments of shape (S, 2, 2)")
    fig, ax = _frame(title)
    ax.add_collection(LineCollection(segments, colors=CELL_COLOR, linewidths=0.5))
    ax.autoscale_view()
    return _save(fig, path)
