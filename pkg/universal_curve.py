#!/usr/bin/env python3
"""
================================================================
🧵 UNIVERSAL CURVE - One curve whose tangents realise every target
Grid graphs on [-2^k, 2^k]^N, the W_j / X_j approximation of a
closed set with unbounded components, the scale cascade r_n, the
assembled curve H and the recovery check ρ_j H -> T
================================================================

Lattice conventions:
    approximation level j   vertex m <-> point 2^{-j} m,  m in [1-4^j, 4^j-1]^N
    grid graph level k      vertex m <-> point 2^{-k} m,  m in [-2^k, 2^k]^N
"""

import hashlib
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.cluster.hierarchy import DisjointSet
from scipy.spatial import cKDTree

from carpet import DEFAULT_CELL_BUDGET
from setops import Point, PointCloud, as_fraction, excess
from workbench_errors import BudgetExceededError, DomainError, InvariantViolation, PreconditionError

logger = logging.getLogger(__name__)

MAX_DIMENSION = 3
BORDER_TOL = 1e-6


# ----------------------------------------------------------------------
# Targets
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Piece:
    """{anchor + t·direction : t_lo <= t <= t_hi}; None bounds are infinite"""
    anchor: Tuple[Fraction, ...]
    direction: Tuple[Fraction, ...]
    t_lo: Optional[Fraction] = None
    t_hi: Optional[Fraction] = None

    def __post_init__(self):
        object.__setattr__(self, 'anchor', tuple(as_fraction(c) for c in self.anchor))
        object.__setattr__(self, 'direction', tuple(as_fraction(c) for c in self.direction))
        if len(self.anchor) != len(self.direction):
            raise DomainError("anchor and direction dimensions differ")
        if not any(self.direction) and (self.t_lo is None or self.t_hi is None):
            raise DomainError("a point piece needs finite parameter bounds")

    def scaled(self, s: Fraction) -> 'Piece':
        return Piece(tuple(s * c for c in self.anchor), self.direction,
                     None if self.t_lo is None else s * self.t_lo,
                     None if self.t_hi is None else s * self.t_hi)

    def clip(self, lo: Fraction, hi: Fraction) -> Optional[Tuple[Point, Point]]:
        """Exact intersection with the closed box [lo, hi]^N, as a segment"""
        t_min, t_max = self.t_lo, self.t_hi
        for a, d in zip(self.anchor, self.direction):
            if d == 0:
                if not lo <= a <= hi:
                    return None
                continue
            t1, t2 = sorted(((lo - a) / d, (hi - a) / d))
            t_min = t1 if t_min is None else max(t_min, t1)
            t_max = t2 if t_max is None else min(t_max, t2)
        if t_min is None:
            t_min = t_max = Fraction(0)
        if t_min > t_max:
            return None
        start = tuple(a + t_min * d for a, d in zip(self.anchor, self.direction))
        end = tuple(a + t_max * d for a, d in zip(self.anchor, self.direction))
        return start, end


def _segment_sq_float(points: np.ndarray, a: Point, b: Point) -> np.ndarray:
    A = np.array([float(c) for c in a])
    D = np.array([float(q - p) for p, q in zip(a, b)])
    rel = points - A
    dd = float(D @ D)
    if dd == 0.0:
        return (rel * rel).sum(axis=1)
    t = np.clip(rel @ D / dd, 0.0, 1.0)
    diff = rel - t[:, None] * D
    return (diff * diff).sum(axis=1)


def _segment_sq_exact(m: Sequence[int], a: Point, b: Point) -> Fraction:
    d = [q - p for p, q in zip(a, b)]
    rel = [Fraction(v) - p for v, p in zip(m, a)]
    dd = sum(c * c for c in d)
    t = Fraction(0) if dd == 0 else min(Fraction(1), max(Fraction(0), sum(r * c for r, c in zip(rel, d)) / dd))
    return sum((r - t * c) ** 2 for r, c in zip(rel, d))


class Target(ABC):
    """A closed set T ⊂ R^N containing the origin"""
    name: str = "target"

    def __init__(self, dimension: int, resolution: Any = 0):
        if not 2 <= dimension <= MAX_DIMENSION:
            raise DomainError(f"target dimension must lie in 2..{MAX_DIMENSION}")
        self.dimension = dimension
        self.resolution = as_fraction(resolution)

    @abstractmethod
    def contains_origin(self) -> bool:
        ...

    @abstractmethod
    def lattice_within(self, lattice: np.ndarray, scale: int, half_width: int, threshold_sq: int) -> np.ndarray:
        """Mask of lattice points m with dist(m, (scale·T) ∩ [-hw, hw]^N)^2 <= threshold_sq"""

    @abstractmethod
    def sample(self, half_width: Any, den: int) -> PointCloud:
        """Points of T ∩ [-hw, hw]^N on the 1/den grid, with declared resolution"""

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "dimension": self.dimension, "resolution": str(self.resolution)}


class PieceTarget(Target):
    """Finite union of lines, rays, segments and points"""

    def __init__(self, pieces: Sequence[Piece], name: str = "pieces"):
        pieces = list(pieces)
        if not pieces:
            raise DomainError("target needs at least one piece")
        dims = {len(p.anchor) for p in pieces}
        if len(dims) != 1:
            raise DomainError("pieces have mixed dimensions")
        super().__init__(dims.pop())
        self.pieces = pieces
        self.name = name

    def contains_origin(self) -> bool:
        zero = tuple(0 for _ in range(self.dimension))
        for piece in self.pieces:
            seg = piece.clip(Fraction(-1), Fraction(1))
            if seg is not None and _segment_sq_exact(zero, *seg) == 0:
                return True
        return False

    def segments(self, scale: Any, half_width: Any) -> List[Tuple[Point, Point]]:
        scale, half_width = as_fraction(scale), as_fraction(half_width)
        out = []
        for piece in self.pieces:
            seg = piece.scaled(scale).clip(-half_width, half_width)
            if seg is not None:
                out.append(seg)
        return out

    def lattice_within(self, lattice: np.ndarray, scale: int, half_width: int, threshold_sq: int) -> np.ndarray:
        segs = self.segments(scale, half_width)
        if not segs:
            return np.zeros(lattice.shape[0], dtype=bool)
        pts = lattice.astype(np.float64)
        best = np.full(lattice.shape[0], np.inf)
        for a, b in segs:
            best = np.minimum(best, _segment_sq_float(pts, a, b))
        mask = best <= threshold_sq
        border = np.nonzero(np.abs(best - threshold_sq) <= BORDER_TOL * max(threshold_sq, 1))[0]
        for i in border:
            m = lattice[i].tolist()
            mask[i] = min(_segment_sq_exact(m, a, b) for a, b in segs) <= threshold_sq
        return mask

    def sample(self, half_width: Any, den: int) -> PointCloud:
        rows = []
        for a, b in self.segments(1, half_width):
            A = np.array([float(c) for c in a])
            B = np.array([float(c) for c in b])
            count = int(math.ceil(float(np.linalg.norm(B - A)) * den)) + 1
            t = np.linspace(0.0, 1.0, count)
            rows.append(np.rint((A + t[:, None] * (B - A)) * den).astype(np.int64))
        if not rows:
            raise PreconditionError(f"{self.name} does not meet the sampling window")
        nums = np.unique(np.concatenate(rows), axis=0)
        return PointCloud(nums, den, Fraction(2, den))

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data["pieces"] = [
            {"anchor": [str(c) for c in p.anchor], "direction": [str(c) for c in p.direction],
             "t_lo": None if p.t_lo is None else str(p.t_lo),
             "t_hi": None if p.t_hi is None else str(p.t_hi)}
            for p in self.pieces
        ]
        return data


def _axis(dimension: int, i: int, value: Any = 1) -> Tuple[Fraction, ...]:
    return tuple(as_fraction(value) if c == i else Fraction(0) for c in range(dimension))


def line_target(direction: Sequence[Any], through: Optional[Sequence[Any]] = None) -> Piece:
    through = through or tuple(0 for _ in direction)
    return Piece(tuple(through), tuple(direction))


def ray_target(direction: Sequence[Any], start: Optional[Sequence[Any]] = None) -> Piece:
    start = start or tuple(0 for _ in direction)
    return Piece(tuple(start), tuple(direction), Fraction(0), None)


def point_target(point: Sequence[Any]) -> Piece:
    return Piece(tuple(point), tuple(0 for _ in point), Fraction(0), Fraction(0))


def union_target(pieces: Sequence[Piece], name: str = "union") -> PieceTarget:
    return PieceTarget(pieces, name)


class CloudTarget(Target):
    """A user point cloud; distances are taken to the cloud itself"""
    name = "cloud"

    def __init__(self, cloud: PointCloud, name: str = "cloud"):
        super().__init__(cloud.dimension, cloud.resolution)
        self.cloud = cloud
        self.name = name

    @classmethod
    def from_cells(cls, cells, name: str = "cells") -> 'CloudTarget':
        return cls(PointCloud.from_cells(cells), name)

    def contains_origin(self) -> bool:
        return self.cloud.contains_origin()

    def lattice_within(self, lattice: np.ndarray, scale: int, half_width: int, threshold_sq: int) -> np.ndarray:
        pts = self.cloud.to_float() * scale
        pts = pts[np.all(np.abs(pts) <= half_width, axis=1)]
        if pts.shape[0] == 0:
            return np.zeros(lattice.shape[0], dtype=bool)
        dist, _ = cKDTree(pts).query(lattice.astype(np.float64))
        return dist * dist <= threshold_sq

    def sample(self, half_width: Any, den: int) -> PointCloud:
        hw = float(as_fraction(half_width))
        keep = np.all(np.abs(self.cloud.to_float()) <= hw, axis=1)
        if not keep.any():
            raise PreconditionError("cloud target does not meet the sampling window")
        return PointCloud(self.cloud.numerators[keep], self.cloud.denominator, self.cloud.resolution)


def named_target(name: str, dimension: int = 2) -> Target:
    """Built-in targets for the command line"""
    e = [_axis(dimension, i) for i in range(dimension)]
    builders = {
        "line": lambda: union_target([line_target(e[0])], "line"),
        "diagonal": lambda: union_target([line_target(tuple(1 for _ in range(dimension)))], "diagonal"),
        "cross": lambda: union_target([line_target(v) for v in e], "cross"),
        "quarter": lambda: union_target([ray_target(e[0]), ray_target(e[1])], "quarter"),
        "parallel": lambda: union_target([line_target(e[0]), line_target(e[0], e[1])], "parallel"),
        "point-line": lambda: union_target([point_target(_axis(dimension, 0, 0)),
                                            line_target(e[1], _axis(dimension, 0, 10))], "point-line"),
    }
    if name not in builders:
        raise DomainError(f"unknown target '{name}', expected one of {sorted(builders)}")
    return builders[name]()


# ----------------------------------------------------------------------
# Lattice graphs
# ----------------------------------------------------------------------

def _keys(vertices: np.ndarray, half_width: int) -> Tuple[np.ndarray, np.ndarray]:
    side = 2 * half_width + 1
    weights = side ** np.arange(vertices.shape[1], dtype=np.int64)
    return (vertices + half_width) @ weights, weights


def lattice_edges(vertices: np.ndarray, half_width: int) -> np.ndarray:
    """Index pairs of vertices at lattice distance 1"""
    if vertices.shape[0] == 0:
        return np.zeros((0, 2), dtype=np.int64)
    keys, weights = _keys(vertices, half_width)
    order = np.argsort(keys)
    sorted_keys = keys[order]
    pairs = []
    for axis in range(vertices.shape[1]):
        movable = vertices[:, axis] < half_width
        src = np.nonzero(movable)[0]
        target = keys[src] + weights[axis]
        pos = np.clip(np.searchsorted(sorted_keys, target), 0, sorted_keys.shape[0] - 1)
        hit = sorted_keys[pos] == target
        pairs.append(np.stack([src[hit], order[pos[hit]]], axis=1))
    return np.concatenate(pairs).astype(np.int64)


def _components(count: int, edges: np.ndarray) -> List[np.ndarray]:
    ds = DisjointSet(range(count))
    for a, b in edges.tolist():
        ds.merge(a, b)
    return [np.array(sorted(s), dtype=np.int64) for s in ds.subsets()]


def boundary_ring(half_width: int, dimension: int) -> np.ndarray:
    """Lattice points of ∂[-h, h]^N"""
    axes = np.arange(-half_width, half_width + 1, dtype=np.int64)
    faces = []
    for i in range(dimension):
        others = np.stack(np.meshgrid(*([axes] * (dimension - 1)), indexing='ij'), axis=-1)
        others = others.reshape(-1, dimension - 1)
        for sign in (-1, 1):
            fixed = np.full((others.shape[0], 1), sign * half_width, dtype=np.int64)
            faces.append(np.concatenate([others[:, :i], fixed, others[:, i:]], axis=1))
    return np.unique(np.concatenate(faces), axis=0)


@dataclass
class BoundaryCheck:
    ok: bool
    components: int
    failing: List[Dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {"ok": self.ok, "components": self.components, "failing": self.failing}


@dataclass
class Approximation:
    target: str
    dimension: int
    j: int
    vertices: np.ndarray
    edges: np.ndarray
    components: List[np.ndarray]

    @property
    def half_width(self) -> int:
        return 4 ** self.j - 1

    def boundary_check(self) -> BoundaryCheck:
        """Every component of X_j meets ∂[2^{-j} - 2^j, 2^j - 2^{-j}]^N"""
        failing = []
        for comp in self.components:
            pts = self.vertices[comp]
            if not (np.abs(pts) == self.half_width).any():
                failing.append({"size": int(comp.shape[0]), "vertex": pts[0].tolist()})
        if failing:
            logger.warning(f"⚠️ {len(failing)} component(s) of X_{self.j} stay off the boundary")
        return BoundaryCheck(not failing, len(self.components), failing)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "target": self.target,
            "N": self.dimension,
            "j": self.j,
            "scale": f"1/{2 ** self.j}",
            "vertices": self.vertices.tolist(),
            "edges": int(self.edges.shape[0]),
            "boundary": self.boundary_check().to_dict(),
        }


def approximate(target: Target, j: int, budget: int = DEFAULT_CELL_BUDGET) -> Approximation:
    """W_j = {v in Q_j : dist(v, T ∩ window) <= 2^{2-j}√N} and its segment graph X_j"""
    if j < 1:
        raise DomainError("approximation level j must be >= 1")
    if target.resolution > Fraction(1, 2 ** j):
        raise PreconditionError(f"target resolution {target.resolution} is coarser than 2^-{j}")
    if not target.contains_origin():
        raise PreconditionError("target must contain the origin")
    N = target.dimension
    hw = 4 ** j - 1
    required = (2 * hw + 1) ** N
    if required > budget:
        raise BudgetExceededError(f"Q_{j} lattice", required, budget)
    axes = np.arange(-hw, hw + 1, dtype=np.int64)
    lattice = np.stack(np.meshgrid(*([axes] * N), indexing='ij'), axis=-1).reshape(-1, N)
    # scaled by 2^j: dist(v, T') <= 2^{2-j}√N  <=>  dist(m, 2^j T')^2 <= 16N
    mask = target.lattice_within(lattice, 2 ** j, hw, 16 * N)
    vertices = lattice[mask]
    if not (vertices == 0).all(axis=1).any():
        raise InvariantViolation("W_j-origin", "0 is missing from W_j")
    edges = lattice_edges(vertices, hw)
    approx = Approximation(target.name, N, j, vertices, edges, _components(vertices.shape[0], edges))
    logger.info(f"📊 W_{j} for {target.name}: {vertices.shape[0]} points, "
                f"{len(approx.components)} component(s)")
    return approx


@dataclass
class GridGraph:
    """Induced lattice graph of level k on [-2^k, 2^k]^N"""
    k: int
    vertices: np.ndarray
    edges: np.ndarray

    @classmethod
    def from_vertices(cls, k: int, vertices: np.ndarray) -> 'GridGraph':
        vertices = np.unique(np.asarray(vertices, dtype=np.int64), axis=0)
        return cls(k, vertices, lattice_edges(vertices, 2 ** k))

    @property
    def dimension(self) -> int:
        return self.vertices.shape[1]

    @property
    def length(self) -> Fraction:
        """𝓗¹ of the image"""
        return Fraction(int(self.edges.shape[0]), 2 ** self.k)

    @property
    def length_bound(self) -> int:
        return (2 ** (self.k + 1) + 1) ** self.dimension

    def is_connected(self) -> bool:
        return len(_components(self.vertices.shape[0], self.edges)) == 1

    def content_hash(self) -> str:
        h = hashlib.sha256()
        h.update(f"{self.k}:{self.dimension}:".encode())
        h.update(np.ascontiguousarray(self.vertices).tobytes())
        return h.hexdigest()[:16]

    def membership_failures(self) -> List[str]:
        """Empty exactly when the graph lies in 𝒢_k"""
        failures = []
        hw = 2 ** self.k
        if (np.abs(self.vertices) > hw).any():
            failures.append("vertex outside [-2^k, 2^k]^N")
        keys, _ = _keys(self.vertices, hw)
        present = set(keys.tolist())
        if int(_keys(np.zeros((1, self.dimension), dtype=np.int64), hw)[0][0]) not in present:
            failures.append("origin missing")
        ring_keys, _ = _keys(boundary_ring(hw, self.dimension), hw)
        if not set(ring_keys.tolist()) <= present:
            failures.append("boundary lattice incomplete")
        if not self.is_connected():
            failures.append("not connected")
        if self.length > self.length_bound:
            failures.append("length above (2^{k+1}+1)^N")
        return failures

    def to_dict(self) -> Dict[str, Any]:
        return {"k": self.k, "N": self.dimension, "vertices": int(self.vertices.shape[0]),
                "edges": int(self.edges.shape[0]), "length": str(self.length),
                "hash": self.content_hash()}


def complete_to_graph(approx: Approximation) -> GridGraph:
    """V^j = 4^{-j}(2^j W_j ∪ ∂[-4^j, 4^j]^N), a graph of level 2j"""
    check = approx.boundary_check()
    if not check.ok:
        raise PreconditionError(f"X_{approx.j} fails the boundary check", check.to_dict())
    ring = boundary_ring(4 ** approx.j, approx.dimension)
    graph = GridGraph.from_vertices(2 * approx.j, np.concatenate([approx.vertices, ring]))
    failures = graph.membership_failures()
    if failures:
        raise InvariantViolation("grid-graph", f"completed graph not in G_{graph.k}: {failures}")
    logger.info(f"✅ G in 𝒢_{graph.k}: {graph.edges.shape[0]} edges, length {float(graph.length):.1f}")
    return graph


# ----------------------------------------------------------------------
# Scale cascade
# ----------------------------------------------------------------------

def cascade_scales(lengths: Sequence[Any], levels: Sequence[int], next_level: Optional[int] = None) -> List[Fraction]:
    """
    r_0 = 1, r_n = min{1/(2^{n+1} 𝓗¹_n), r_{n-1}/2^{n+k_{n+1}+1}}.
    `next_level` stands in for k_{L+1} after the last graph.
    """
    if len(lengths) != len(levels):
        raise DomainError("lengths and levels differ in count")
    if next_level is None:
        next_level = levels[-1] if levels else 0
    if any(b < a for a, b in zip(levels, levels[1:])):
        logger.warning("⚠️ graph levels decrease along the cascade")
    following = list(levels[1:]) + [next_level]
    scales = [Fraction(1)]
    for n, (length, k_next) in enumerate(zip(lengths, following), start=1):
        length = as_fraction(length)
        if length <= 0:
            raise DomainError(f"graph {n} has no length")
        scales.append(min(1 / (2 ** (n + 1) * length), scales[-1] / 2 ** (n + k_next + 1)))
    return scales


@dataclass
class CascadeSpec:
    graphs: List[GridGraph]
    scales: List[Fraction]

    @property
    def levels(self) -> List[int]:
        return [g.k for g in self.graphs]

    def __len__(self) -> int:
        return len(self.graphs)

    @property
    def total_length(self) -> Fraction:
        return sum((r * g.length for r, g in zip(self.scales[1:], self.graphs)), Fraction(0))

    def rho(self, position: int, j: int) -> Fraction:
        """ρ_j = 2^j / r_{n_j}"""
        return Fraction(2 ** j) / self.scales[position]

    def scale_certificate(self, position: int, j: int) -> bool:
        """ρ_j r_{n_j+1} <= 2^{-n_j-j+1}"""
        if position >= len(self):
            raise PreconditionError("the last graph has no following scale")
        return self.rho(position, j) * self.scales[position + 1] <= Fraction(1, 2 ** (position + j - 1))

    def to_dict(self) -> Dict[str, Any]:
        return {"graphs": [g.to_dict() for g in self.graphs],
                "scales": [str(r) for r in self.scales],
                "total_length": str(self.total_length)}


def build_cascade(graphs: Sequence[GridGraph], next_level: Optional[int] = None) -> CascadeSpec:
    graphs = list(graphs)
    if not graphs:
        raise DomainError("cascade needs at least one graph")
    if len({g.dimension for g in graphs}) != 1:
        raise DomainError("cascade graphs have mixed dimensions")
    scales = cascade_scales([g.length for g in graphs], [g.k for g in graphs], next_level)
    cascade = CascadeSpec(graphs, scales)
    if cascade.total_length > 1:
        raise InvariantViolation("cascade-length", f"Σ r_n 𝓗¹(G_n) = {cascade.total_length} > 1")
    return cascade


# ----------------------------------------------------------------------
# The curve H
# ----------------------------------------------------------------------

Segment = Tuple[Point, Point]


@dataclass
class HLevel:
    n: int
    segments: List[Segment]
    length: Fraction
    clipped: bool


@dataclass
class HCurve:
    levels: List[HLevel]
    components: int

    @property
    def length(self) -> Fraction:
        return sum((lv.length for lv in self.levels), Fraction(0))

    def segments_float(self) -> np.ndarray:
        rows = [[[float(c) for c in a], [float(c) for c in b]] for lv in self.levels for a, b in lv.segments]
        return np.array(rows, dtype=np.float64)

    def to_dict(self) -> Dict[str, Any]:
        return {"levels": [{"n": lv.n, "segments": len(lv.segments), "length": str(lv.length),
                            "clipped": lv.clipped} for lv in self.levels],
                "length": str(self.length), "components": self.components}


def _level_segments(graph: GridGraph, r: Fraction, hole: Optional[Fraction]) -> Tuple[List[Segment], Fraction]:
    """r·Im(G) minus the open cube (-hole, hole)^N"""
    unit = r / 2 ** graph.k
    V = graph.vertices
    src, dst = V[graph.edges[:, 0]], V[graph.edges[:, 1]]
    lo = np.minimum(src, dst)
    axis = np.argmax(np.abs(dst - src), axis=1)
    inside = np.zeros(lo.shape[0], dtype=bool)
    if hole is not None:
        c = hole / unit
        reach = math.ceil(c) - 1
        floor_along = math.floor(-c - 1) + 1
        inside = np.ones(lo.shape[0], dtype=bool)
        for d in range(V.shape[1]):
            coord = lo[:, d]
            # along the edge [m, m+1] meets (-c, c); across it |m| < c
            hit = np.where(axis == d, (coord <= reach) & (coord >= floor_along), np.abs(coord) <= reach)
            inside &= hit
    segments: List[Segment] = []
    length = Fraction(0)
    for i in np.nonzero(~inside)[0].tolist():
        a = tuple(int(v) * unit for v in lo[i])
        b = tuple(a[d] + (unit if d == axis[i] else 0) for d in range(V.shape[1]))
        segments.append((a, b))
        length += unit
    for i in np.nonzero(inside)[0].tolist():
        d = int(axis[i])
        a = [int(v) * unit for v in lo[i]]
        start, end = a[d], a[d] + unit
        for piece in ((start, min(end, -hole)), (max(start, hole), end)):
            if piece[0] < piece[1]:
                p, q = list(a), list(a)
                p[d], q[d] = piece
                segments.append((tuple(p), tuple(q)))
                length += piece[1] - piece[0]
    return segments, length


def assemble_H(cascade: CascadeSpec, depth: int) -> HCurve:
    """
    H_≤depth = ⋃_{n<depth} r_n Im(G_n) ∖ (-r_{n+1}, r_{n+1})^N ∪ r_depth Im(G_depth).
    Adjacent levels must share points and the union must be connected.
    """
    if not 1 <= depth <= len(cascade):
        raise DomainError(f"depth must lie in 1..{len(cascade)}")
    ds = DisjointSet()
    levels: List[HLevel] = []
    previous_rim: Optional[set] = None
    for n in range(1, depth + 1):
        clipped = n < depth
        hole = cascade.scales[n + 1] if clipped else None
        segments, length = _level_segments(cascade.graphs[n - 1], cascade.scales[n], hole)
        endpoints = set()
        for a, b in segments:
            for p in (a, b):
                if p not in ds:
                    ds.add(p)
                endpoints.add(p)
            ds.merge(a, b)
        if previous_rim is not None and not previous_rim & endpoints:
            raise InvariantViolation("H-gluing", f"H_{n - 1} and level {n} share no point")
        if clipped:
            previous_rim = {p for p in endpoints if max(abs(c) for c in p) == hole}
        levels.append(HLevel(n, segments, length, clipped))
    curve = HCurve(levels, len(ds.subsets()))
    if curve.length > 1:
        raise InvariantViolation("H-length", f"𝓗¹(H) = {curve.length} > 1")
    if curve.components != 1:
        raise InvariantViolation("H-connected", f"H has {curve.components} components")
    logger.info(f"✅ H through level {depth}: {sum(len(lv.segments) for lv in levels)} segments, "
                f"length {float(curve.length):.4f}")
    return curve


# ----------------------------------------------------------------------
# Recovery
# ----------------------------------------------------------------------

@dataclass
class RecoveryReport:
    j: int
    position: int
    radius: Fraction
    applicable: bool
    rho: Fraction
    forward: float = 0.0
    backward: float = 0.0
    bound: float = 0.0
    resolution: float = 0.0
    small_cube: float = 0.0
    level_forward: float = 0.0
    level_backward: float = 0.0

    @property
    def passed(self) -> Optional[bool]:
        if not self.applicable:
            return None
        return self.forward <= self.bound and self.backward <= self.bound

    def to_dict(self) -> Dict[str, Any]:
        return {"j": self.j, "position": self.position, "radius": str(self.radius),
                "applicable": self.applicable, "rho": str(self.rho),
                "exc_H_T": self.forward, "exc_T_H": self.backward, "bound": self.bound,
                "resolution": self.resolution, "small_cube": self.small_cube,
                "exc_G_T": self.level_forward, "exc_T_G": self.level_backward, "passed": self.passed}


def _graph_cloud(graph: GridGraph, scale_bits: int, sub: int, hole: Optional[Fraction]) -> PointCloud:
    """Edge samples of 2^{-scale_bits}·Im-lattice, `sub` points per edge, hole removed, origin kept"""
    V = graph.vertices
    src, dst = V[graph.edges[:, 0]], V[graph.edges[:, 1]]
    steps = np.arange(sub + 1, dtype=np.int64)
    pts = (src[:, None, :] * sub + steps[None, :, None] * (dst - src)[:, None, :]).reshape(-1, V.shape[1])
    den = 2 ** scale_bits * sub
    if hole is not None:
        bound = hole * den
        keep = ~np.all(np.abs(pts) < float(bound), axis=1)
        pts = pts[keep]
    pts = np.unique(np.concatenate([pts, np.zeros((1, V.shape[1]), dtype=np.int64)]), axis=0)
    return PointCloud(pts, den, Fraction(1, 2 * den))


def _curve_cloud(curve: HCurve, dimension: int, rho: Fraction, window: Fraction, sub: int) -> PointCloud:
    """Samples of ρ·H inside [-window, window]^N, `sub` steps per segment, origin kept"""
    reach = window / rho
    points = {tuple(Fraction(0) for _ in range(dimension))}
    spacing = Fraction(0)
    for level in curve.levels:
        for a, b in level.segments:
            if any(min(a[d], b[d]) > reach or max(a[d], b[d]) < -reach for d in range(dimension)):
                continue
            step = tuple((b[d] - a[d]) / sub for d in range(dimension))
            for i in range(sub + 1):
                points.add(tuple(rho * (a[d] + i * step[d]) for d in range(dimension)))
            spacing = max(spacing, rho * max(abs(s) for s in step))
    return PointCloud.from_points(sorted(points), spacing / 2)


def verify_recovery(target: Target, cascade: CascadeSpec, position: int, j: int, radius: Any,
                    sub: int = 4, curve: Optional[HCurve] = None) -> RecoveryReport:
    """
    exc(ρ_j H ∩ B̄(0,R), T) and exc(T ∩ B̄(0,R), ρ_j H) against
    2^{2-j}(√N + 1/4) + resolution + 2 ρ_j r_{n_j+1} √N.

    H is the curve assembled through the whole cascade unless `curve` is
    given. The same excesses against G_{n_j} alone are kept as
    exc_G_T / exc_T_G: levels before n_j lie outside (-2^j, 2^j)^N after
    scaling, so with 2^{j-1} >= R only G_{n_j} and the small cube
    around 0 matter.
    """
    radius = as_fraction(radius)
    if not 1 <= position <= len(cascade):
        raise PreconditionError(f"position must lie in 1..{len(cascade)}")
    graph = cascade.graphs[position - 1]
    if graph.k != 2 * j:
        raise PreconditionError(f"graph at position {position} has level {graph.k}, expected {2 * j}")
    if graph.dimension != target.dimension:
        raise PreconditionError("target and cascade dimensions differ")
    rho = cascade.rho(position, j)
    if 2 ** (j - 1) < radius:
        logger.warning(f"⚠️ R={radius} exceeds 2^(j-1) at j={j}: not applicable")
        return RecoveryReport(j, position, radius, False, rho)

    N = target.dimension
    last = position == len(cascade)
    small = Fraction(0) if last else rho * cascade.scales[position + 1]
    if curve is None:
        curve = assemble_H(cascade, len(cascade))
    H = _curve_cloud(curve, N, rho, radius + 1, sub)
    # 2^j Im(G) has edge length 2^{-j}
    G = _graph_cloud(graph, j, sub, None if last else small)
    den = 2 ** (j + 2)
    T = target.sample(radius + 1, den)
    H_ball = H.clip_to_ball(radius)
    G_ball = G.clip_to_ball(radius)
    T_ball = T.clip_to_ball(radius)
    if H_ball is None or G_ball is None or T_ball is None:
        raise PreconditionError("empty window in recovery check")
    forward = float(excess(H_ball, T))
    backward = float(excess(T_ball, H))
    resolution = float(T.resolution) + max(float(H.resolution), float(G.resolution))
    small_cube = 2 * float(small) * math.sqrt(N)
    bound = 2.0 ** (2 - j) * (math.sqrt(N) + 0.25) + resolution + small_cube
    report = RecoveryReport(j, position, radius, True, rho, forward, backward, bound, resolution, small_cube,
                            float(excess(G_ball, T)), float(excess(T_ball, G)))
    status = "✅" if report.passed else "❌"
    logger.info(f"{status} recovery j={j}: exc(H,T)={forward:.4f} exc(T,H)={backward:.4f} bound {bound:.4f}")
    return report


def recovery_cascade(target: Target, js: Sequence[int], budget: int = DEFAULT_CELL_BUDGET
                     ) -> Tuple[CascadeSpec, Dict[int, int]]:
    """One graph G_{n_j} per requested j, in the given order; returns the cascade and j -> n_j"""
    graphs = [complete_to_graph(approximate(target, j, budget)) for j in js]
    return build_cascade(graphs), {j: i + 1 for i, j in enumerate(js)}
