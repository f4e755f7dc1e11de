#!/usr/bin/env python3
"""
================================================================
📐 SET OPERATIONS - Exact set calculus kernel
Point clouds, cell sets, excess & Hausdorff distance, blow-ups,
Attouch-Wets profiles, connectivity and local cut-point detection
================================================================

All coordinates are exact rationals. A point cloud stores integer
numerators over one shared denominator so that nearest-neighbour
searches run on a float KD-tree while every reported distance is
recomputed exactly on squared integer values.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.cluster.hierarchy import DisjointSet
from scipy.spatial import cKDTree

from workbench_errors import DomainError, EmptyResultError, PreconditionError

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]
Point = Tuple[Fraction, ...]
Cell = Tuple[int, int]

INT64_SAFE = 2 ** 62
FLOAT_EXACT = 2 ** 50
REL_TOL = 1e-9


def as_fraction(value: Any) -> Fraction:
    """Parse int / Fraction / 'p/q' string into a Fraction"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise DomainError(f"not a rational coordinate: {value!r}")
    if isinstance(value, (int, str)):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise DomainError(f"non-finite coordinate {value}")
        return Fraction(value)
    raise DomainError(f"not a rational coordinate: {value!r}")


def fraction_str(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


@total_ordering
class Length:
    """
    A nonnegative length kept as its exact square.

    Compares exactly against other lengths and rationals; compares
    against floats through its float value.
    """
    __slots__ = ("squared",)

    def __init__(self, squared: Rational):
        squared = Fraction(squared)
        if squared < 0:
            raise DomainError("squared length must be nonnegative")
        self.squared = squared

    @classmethod
    def of(cls, value: Rational) -> 'Length':
        value = Fraction(value)
        if value < 0:
            raise DomainError("length must be nonnegative")
        return cls(value * value)

    def __float__(self) -> float:
        return math.sqrt(self.squared)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Length):
            return self.squared == other.squared
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return other >= 0 and self.squared == Fraction(other) ** 2
        if isinstance(other, float):
            return float(self) == other
        return NotImplemented

    def __lt__(self, other: object) -> bool:
        if isinstance(other, Length):
            return self.squared < other.squared
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return other > 0 and self.squared < Fraction(other) ** 2
        if isinstance(other, float):
            return float(self) < other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("Length", self.squared))

    def __add__(self, other: Any) -> float:
        return float(self) + float(other)

    __radd__ = __add__

    def scaled(self, factor: Rational) -> 'Length':
        factor = Fraction(factor)
        return Length(self.squared * factor * factor)

    def le_sum(self, a: 'Length', b: 'Length') -> bool:
        """Exact test of self <= a + b"""
        gap = self.squared - a.squared - b.squared
        if gap <= 0:
            return True
        return gap * gap <= 4 * a.squared * b.squared

    def __repr__(self) -> str:
        return f"Length(√{self.squared} ≈ {float(self):.6g})"

    def to_dict(self) -> Dict[str, Any]:
        return {"squared": fraction_str(self.squared), "value": float(self)}


def _int_array(rows: Sequence[Sequence[int]]) -> np.ndarray:
    """Integer array, int64 when safe, Python ints otherwise"""
    biggest = max((abs(int(v)) for row in rows for v in row), default=0)
    if biggest < INT64_SAFE:
        return np.array(rows, dtype=np.int64).reshape(len(rows), -1)
    arr = np.empty((len(rows), len(rows[0])), dtype=object)
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            arr[i, j] = int(v)
    return arr


def _scale_int_array(arr: np.ndarray, factor: int) -> np.ndarray:
    if factor == 1:
        return arr
    if arr.dtype != object and arr.size and int(np.abs(arr).max()) * factor < INT64_SAFE:
        return arr * factor
    return _int_array([[int(v) * factor for v in row] for row in arr])


def _shift_int_array(arr: np.ndarray, shift: Sequence[int]) -> np.ndarray:
    if arr.dtype != object:
        bound = (int(np.abs(arr).max()) if arr.size else 0) + max(abs(int(s)) for s in shift)
        if bound < INT64_SAFE:
            return arr + np.array([int(s) for s in shift], dtype=np.int64)
    return _int_array([[int(v) + int(s) for v, s in zip(row, shift)] for row in arr])


class PointCloud:
    """
    Finite set of rational points plus a declared resolution.

    Points are `numerators / denominator`; every point of the
    represented closed set lies within `resolution` of a listed point.
    """
    __slots__ = ("numerators", "denominator", "resolution")

    def __init__(self, numerators: np.ndarray, denominator: int = 1, resolution: Rational = 0):
        numerators = np.asarray(numerators)
        if numerators.ndim != 2 or numerators.shape[0] == 0:
            raise DomainError("point cloud must be a nonempty (P, N) array")
        if denominator <= 0:
            raise DomainError("denominator must be positive")
        resolution = Fraction(resolution)
        if resolution < 0:
            raise DomainError("resolution must be nonnegative")
        self.numerators = numerators
        self.denominator = int(denominator)
        self.resolution = resolution

    @classmethod
    def from_points(cls, points: Iterable[Sequence[Any]], resolution: Rational = 0) -> 'PointCloud':
        pts = [tuple(as_fraction(c) for c in p) for p in points]
        if not pts:
            raise DomainError("point cloud must be nonempty")
        dims = {len(p) for p in pts}
        if len(dims) != 1:
            raise DomainError("points have mixed dimensions")
        den = 1
        for p in pts:
            for c in p:
                den = den * c.denominator // math.gcd(den, c.denominator)
        rows = [[int(c * den) for c in p] for p in pts]
        return cls(_int_array(rows), den, resolution)

    @classmethod
    def from_cells(cls, cells: 'CellSet') -> 'PointCloud':
        return cells.to_point_cloud()

    @property
    def dimension(self) -> int:
        return self.numerators.shape[1]

    def __len__(self) -> int:
        return self.numerators.shape[0]

    def points(self) -> List[Point]:
        return [tuple(Fraction(int(v), self.denominator) for v in row) for row in self.numerators]

    def to_float(self) -> np.ndarray:
        return self.numerators.astype(float) / self.denominator

    def contains_origin(self) -> bool:
        nonzero = self.numerators != 0
        return bool((~np.any(nonzero, axis=1)).any())

    def translate(self, vector: Sequence[Any]) -> 'PointCloud':
        vec = [as_fraction(v) for v in vector]
        if len(vec) != self.dimension:
            raise DomainError("translation dimension mismatch")
        den = self.denominator
        for v in vec:
            den = den * v.denominator // math.gcd(den, v.denominator)
        scaled = _scale_int_array(self.numerators, den // self.denominator)
        shifted = _shift_int_array(scaled, [int(v * den) for v in vec])
        return PointCloud(shifted, den, self.resolution)

    def scale(self, factor: Rational) -> 'PointCloud':
        """Multiply every point (and the resolution) by a positive rational"""
        factor = Fraction(factor)
        if factor <= 0:
            raise DomainError("scale factor must be positive")
        nums = _scale_int_array(self.numerators, factor.numerator)
        return PointCloud(nums, self.denominator * factor.denominator, self.resolution * factor)

    def clip_to_ball(self, radius: Rational) -> Optional['PointCloud']:
        """Points with |p| <= radius (exact); None when nothing remains"""
        radius = Fraction(radius)
        bound = radius * self.denominator
        norms = _squared_norms(self.numerators)
        scale = bound.denominator ** 2
        if norms.dtype != object and int(norms.max()) * scale >= INT64_SAFE:
            norms = norms.astype(object)
        mask = np.array(norms * scale <= bound.numerator ** 2, dtype=bool)
        if not mask.any():
            return None
        return PointCloud(self.numerators[mask], self.denominator, self.resolution)

    def union(self, other: 'PointCloud') -> 'PointCloud':
        a, b, den = _common_lattice(self, other)
        rows = np.concatenate([a, b]) if a.dtype == b.dtype else np.concatenate([a.astype(object), b.astype(object)])
        return PointCloud(rows, den, max(self.resolution, other.resolution))

    def with_resolution(self, resolution: Rational) -> 'PointCloud':
        return PointCloud(self.numerators, self.denominator, resolution)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "resolution": fraction_str(self.resolution),
            "points": [[fraction_str(c) for c in p] for p in sorted(self.points())],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PointCloud':
        return cls.from_points(data["points"], as_fraction(data.get("resolution", 0)))

    def __repr__(self) -> str:
        return f"PointCloud(points={len(self)}, dim={self.dimension}, resolution={self.resolution})"


def _squared_norms(nums: np.ndarray) -> np.ndarray:
    if nums.dtype == object:
        return np.array([sum(int(v) * int(v) for v in row) for row in nums], dtype=object)
    if nums.size and int(np.abs(nums).max()) ** 2 * nums.shape[1] < INT64_SAFE:
        return (nums * nums).sum(axis=1)
    return np.array([sum(int(v) * int(v) for v in row) for row in nums], dtype=object)


def _common_lattice(a: PointCloud, b: PointCloud) -> Tuple[np.ndarray, np.ndarray, int]:
    if a.dimension != b.dimension:
        raise DomainError(f"dimension mismatch {a.dimension} vs {b.dimension}")
    den = a.denominator * b.denominator // math.gcd(a.denominator, b.denominator)
    return (_scale_int_array(a.numerators, den // a.denominator),
            _scale_int_array(b.numerators, den // b.denominator), den)


def _recentred_floats(a: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, np.ndarray, int]:
    """Shift both integer arrays by a shared origin; return floats and the extent"""
    origin = [min(int(a[:, c].min()), int(b[:, c].min())) for c in range(a.shape[1])]
    neg = [-o for o in origin]
    a_s = _shift_int_array(a, neg)
    b_s = _shift_int_array(b, neg)
    extent = max(int(a_s.max()), int(b_s.max()))
    return a_s.astype(float), b_s.astype(float), extent


def _exact_sq(p: Sequence[Any], q: Sequence[Any]) -> int:
    return sum((int(x) - int(y)) ** 2 for x, y in zip(p, q))


def _nearest_squared(a: np.ndarray, b: np.ndarray, only_max: bool = False) -> List[int]:
    """
    Exact squared nearest-neighbour distances from each row of `a` to `b`.

    With only_max the list holds just the maximum (as a single entry).
    """
    if a.shape[0] == 0:
        return [0] if only_max else []
    a_f, b_f, extent = _recentred_floats(a, b)
    tree = cKDTree(b_f)
    dist, _ = tree.query(a_f)
    if extent * extent * a.shape[1] < FLOAT_EXACT:
        exact = [int(v) for v in np.rint(dist * dist)]
        return [max(exact)] if only_max else exact

    rows = range(a.shape[0])
    if only_max:
        top = dist.max()
        rows = np.nonzero(dist >= top * (1 - REL_TOL) - REL_TOL)[0]
    k = min(4, b.shape[0])
    results: List[int] = []
    for i in rows:
        dk, ik = tree.query(a_f[i], k=k)
        dk = np.atleast_1d(dk)
        ik = np.atleast_1d(ik)
        cutoff = dk[0] * (1 + REL_TOL) + REL_TOL
        if k > 1 and dk[-1] <= cutoff:
            ik = tree.query_ball_point(a_f[i], cutoff)
        else:
            ik = [j for j, d in zip(ik, dk) if d <= cutoff]
        results.append(min(_exact_sq(a[i], b[j]) for j in ik))
    return [max(results)] if only_max else results


def _require(cloud: Optional[PointCloud], name: str) -> PointCloud:
    if cloud is None or len(cloud) == 0:
        raise DomainError(f"{name} must be a nonempty point cloud")
    return cloud


def excess(a: PointCloud, b: PointCloud) -> Length:
    """sup over a in A of inf over b in B of |a - b|, exactly"""
    _require(a, "A")
    _require(b, "B")
    a_num, b_num, den = _common_lattice(a, b)
    top = _nearest_squared(a_num, b_num, only_max=True)[0]
    return Length(Fraction(top, den * den))


def hausdorff_distance(a: PointCloud, b: PointCloud) -> Length:
    return max(excess(a, b), excess(b, a))


EXCESS_AXIOMS = ("translation", "triangle", "containment", "monotonicity", "subadditivity")


def excess_axiom_failures(a: PointCloud, b: PointCloud, c: PointCloud,
                          shift: Sequence[Any]) -> List[str]:
    """
    Names of the excess axioms that fail on (A, B, C):

      translation    exc(A+v, B+v) = exc(A, B)
      triangle       exc(A, C) <= exc(A, B) + exc(B, C)
      containment    exc(A, B) = 0 iff A ⊆ B, and exc(A, A ∪ B) = 0
      monotonicity   exc(A, B ∪ C) <= exc(A, B) <= exc(A ∪ C, B)
      subadditivity  exc(A ∪ C, B) = max(exc(A, B), exc(C, B))
    """
    ab = excess(a, b)
    failures = []
    if excess(a.translate(shift), b.translate(shift)) != ab:
        failures.append("translation")
    if not excess(a, c).le_sum(ab, excess(b, c)):
        failures.append("triangle")
    subset = set(a.points()) <= set(b.points())
    if (ab == 0) != subset or excess(a, a.union(b)) != 0:
        failures.append("containment")
    if excess(a, b.union(c)) > ab or ab > excess(a.union(c), b):
        failures.append("monotonicity")
    if excess(a.union(c), b) != max(ab, excess(c, b)):
        failures.append("subadditivity")
    return failures


# ----------------------------------------------------------------------
# Cell sets
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class CellSet:
    """
    Finite union of closed grid squares
    origin_offset + n^{-depth} [i, i+1] x [j, j+1].
    """
    base: int
    depth: int
    cells: frozenset
    origin_offset: Tuple[Fraction, Fraction] = (Fraction(0), Fraction(0))

    def __post_init__(self):
        if self.base < 2:
            raise DomainError("base must be >= 2")
        if self.depth < 0:
            raise DomainError("depth must be >= 0")
        cells = frozenset((int(c[0]), int(c[1])) for c in self.cells)
        object.__setattr__(self, 'cells', cells)
        offset = tuple(as_fraction(v) for v in self.origin_offset)
        if len(offset) != 2:
            raise DomainError("origin_offset must be a 2-vector")
        object.__setattr__(self, 'origin_offset', offset)

    @classmethod
    def from_array(cls, base: int, depth: int, corners: np.ndarray,
                   origin_offset: Tuple[Rational, Rational] = (0, 0)) -> 'CellSet':
        corners = np.asarray(corners).reshape(-1, 2)
        return cls(base, depth, frozenset(map(tuple, corners.tolist())), origin_offset)

    @property
    def cell_size(self) -> Fraction:
        return Fraction(1, self.base ** self.depth)

    def __len__(self) -> int:
        return len(self.cells)

    def __contains__(self, cell: Cell) -> bool:
        return cell in self.cells

    def corner_array(self) -> np.ndarray:
        if not self.cells:
            return np.zeros((0, 2), dtype=np.int64)
        arr = np.array(sorted(self.cells), dtype=np.int64)
        return arr

    def bounding_box(self) -> Tuple[Point, Point]:
        if not self.cells:
            raise DomainError("empty cell set has no bounding box")
        arr = self.corner_array()
        h = self.cell_size
        lo = tuple(self.origin_offset[c] + h * int(arr[:, c].min()) for c in range(2))
        hi = tuple(self.origin_offset[c] + h * (int(arr[:, c].max()) + 1) for c in range(2))
        return lo, hi

    def lattice_points(self) -> np.ndarray:
        """All distinct corners of all cells, in lattice units"""
        arr = self.corner_array()
        if arr.shape[0] == 0:
            return arr
        stacked = np.concatenate([arr, arr + [1, 0], arr + [0, 1], arr + [1, 1]])
        return np.unique(stacked, axis=0)

    def to_point_cloud(self) -> PointCloud:
        """Cell-corner sample; every point of the union lies within one cell side of it"""
        pts = self.lattice_points()
        if pts.shape[0] == 0:
            raise EmptyResultError("cell set is empty")
        cloud = PointCloud(pts, self.base ** self.depth, self.cell_size)
        if any(self.origin_offset):
            cloud = cloud.translate(self.origin_offset)
        return cloud

    def translate(self, vector: Sequence[Rational]) -> 'CellSet':
        offset = tuple(self.origin_offset[c] + as_fraction(vector[c]) for c in range(2))
        return CellSet(self.base, self.depth, self.cells, offset)

    def union(self, other: 'CellSet') -> 'CellSet':
        if (self.base, self.depth, self.origin_offset) != (other.base, other.depth, other.origin_offset):
            raise DomainError("cell sets live on different lattices")
        return CellSet(self.base, self.depth, self.cells | other.cells, self.origin_offset)

    def point(self, lattice: Sequence[int]) -> Point:
        h = self.cell_size
        return tuple(self.origin_offset[c] + h * int(lattice[c]) for c in range(2))

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "base": self.base,
            "depth": self.depth,
            "cells": [list(c) for c in sorted(self.cells)],
        }
        if any(self.origin_offset):
            data["origin_offset"] = [fraction_str(v) for v in self.origin_offset]
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'CellSet':
        try:
            offset = tuple(as_fraction(v) for v in data.get("origin_offset", [0, 0]))
            return cls(int(data["base"]), int(data["depth"]),
                       frozenset(tuple(c) for c in data["cells"]), offset)
        except (KeyError, TypeError, ValueError) as e:
            raise DomainError(f"malformed cell set JSON: {e}")

    def __repr__(self) -> str:
        return f"CellSet(base={self.base}, depth={self.depth}, cells={len(self.cells)})"


# ----------------------------------------------------------------------
# Blow-ups and Attouch-Wets profiles
# ----------------------------------------------------------------------

def _cells_near_point(cells: CellSet, x: Sequence[Fraction], radius: Fraction) -> CellSet:
    """Cells whose closed square comes within `radius` of x (float prefilter, generous)"""
    arr = cells.corner_array()
    if arr.shape[0] == 0:
        return cells
    h = cells.cell_size
    local = [float((x[c] - cells.origin_offset[c]) / h) for c in range(2)]
    reach = float(radius / h) + 2.0
    dx = np.maximum(0.0, np.maximum(arr[:, 0] - local[0], local[0] - arr[:, 0] - 1))
    dy = np.maximum(0.0, np.maximum(arr[:, 1] - local[1], local[1] - arr[:, 1] - 1))
    keep = dx * dx + dy * dy <= reach * reach
    return CellSet.from_array(cells.base, cells.depth, arr[keep], cells.origin_offset)


def blow_up(shape: Union[CellSet, PointCloud], x: Sequence[Any], r: Rational, R: Rational) -> PointCloud:
    """((S - x)/r) ∩ B̄(0, R), resolution divided by r"""
    r = Fraction(r)
    R = Fraction(R)
    if r <= 0 or R <= 0:
        raise DomainError("blow-up needs r > 0 and R > 0")
    x = tuple(as_fraction(v) for v in x)
    if isinstance(shape, CellSet):
        near = _cells_near_point(shape, x, r * R)
        if len(near) == 0:
            raise EmptyResultError(f"no cells within {float(r * R):.4g} of {x}")
        cloud = near.to_point_cloud()
    else:
        cloud = shape
    moved = cloud.translate(tuple(-v for v in x)).scale(1 / r)
    clipped = moved.clip_to_ball(R)
    if clipped is None:
        raise EmptyResultError(f"blow-up at {tuple(float(v) for v in x)} scale {float(r):.4g} is empty")
    return clipped


@dataclass
class AWRow:
    index: int
    radius: Fraction
    forward: Length
    backward: Length

    def to_dict(self) -> Dict[str, Any]:
        return {
            "index": self.index,
            "radius": fraction_str(self.radius),
            "exc_seq_target": float(self.forward),
            "exc_target_seq": float(self.backward),
        }


@dataclass
class AWProfile:
    """Two-sided excess table of a sequence against a target"""
    rows: List[AWRow] = field(default_factory=list)

    def column(self, radius: Rational) -> List[AWRow]:
        radius = Fraction(radius)
        return [row for row in self.rows if row.radius == radius]

    def converged(self, eps: Rational) -> Dict[Fraction, bool]:
        """Per radius: is the last entry below eps on both sides"""
        verdict: Dict[Fraction, bool] = {}
        for radius in sorted({row.radius for row in self.rows}):
            last = max(self.column(radius), key=lambda row: row.index)
            verdict[radius] = last.forward < eps and last.backward < eps
        return verdict

    def to_dict(self) -> Dict[str, Any]:
        return {"rows": [row.to_dict() for row in self.rows]}


def aw_profile(sequence: Sequence[PointCloud], target: PointCloud,
               radii: Sequence[Rational]) -> AWProfile:
    """exc(X_m ∩ B̄(0,r), T) and exc(T ∩ B̄(0,r), X_m) for every m and r"""
    if not target.contains_origin():
        raise PreconditionError("target cloud must contain the origin")
    for index, cloud in enumerate(sequence):
        if not cloud.contains_origin():
            raise PreconditionError(f"sequence entry {index} does not contain the origin")
    profile = AWProfile()
    for index, cloud in enumerate(sequence):
        for radius in radii:
            radius = Fraction(radius)
            profile.rows.append(AWRow(
                index=index,
                radius=radius,
                forward=excess(cloud.clip_to_ball(radius), target),
                backward=excess(target.clip_to_ball(radius), cloud),
            ))
    logger.debug(f"📊 AW profile with {len(profile.rows)} rows")
    return profile


# ----------------------------------------------------------------------
# Connectivity and contacts
# ----------------------------------------------------------------------

EDGE_STEPS = ((1, 0), (0, 1))
CORNER_STEPS = ((1, 0), (0, 1), (1, 1), (1, -1))


def connected_components(cells: CellSet, adjacency: str = "edge") -> List[List[Cell]]:
    """Union-find components; ordered by their lexicographically least cell"""
    if adjacency not in ("edge", "corner"):
        raise DomainError(f"adjacency must be 'edge' or 'corner', got {adjacency}")
    steps = EDGE_STEPS if adjacency == "edge" else CORNER_STEPS
    members = cells.cells
    forest = DisjointSet(sorted(members))
    for (i, j) in members:
        for (di, dj) in steps:
            other = (i + di, j + dj)
            if other in members:
                forest.merge((i, j), other)
    components = [sorted(group) for group in forest.subsets()]
    components.sort(key=lambda group: group[0])
    return components


def _encode(arr: np.ndarray, lo: np.ndarray, width: int) -> np.ndarray:
    return (arr[:, 0] - lo[0]) * width + (arr[:, 1] - lo[1])


def _corner_flags(cells: CellSet) -> Tuple[np.ndarray, np.ndarray]:
    """For every lattice point: which of its four surrounding cells are present"""
    arr = cells.corner_array()
    points = cells.lattice_points()
    lo = arr.min(axis=0) - 1
    width = int(arr[:, 1].max() - lo[1]) + 3
    present = _encode(arr, lo, width)
    flags = np.zeros((points.shape[0], 4), dtype=bool)
    # order: lower-left, lower-right, upper-left, upper-right
    for slot, (dx, dy) in enumerate(((-1, -1), (0, -1), (-1, 0), (0, 0))):
        flags[:, slot] = np.isin(_encode(points + [dx, dy], lo, width), present)
    return points, flags


def _diagonal_mask(flags: np.ndarray) -> np.ndarray:
    ll, lr, ul, ur = flags[:, 0], flags[:, 1], flags[:, 2], flags[:, 3]
    return (ll & ur & ~lr & ~ul) | (lr & ul & ~ll & ~ur)


def local_cut_point_candidates(cells: CellSet) -> List[Point]:
    """Lattice points held by exactly two cells that touch only there"""
    if len(cells) == 0:
        return []
    points, flags = _corner_flags(cells)
    hits = points[_diagonal_mask(flags)]
    return sorted(cells.point(p) for p in hits.tolist())


@dataclass
class ContactReport:
    """Pairwise contacts of equal-size squares"""
    edge_contacts: List[Tuple[Cell, Cell, Tuple[Point, Point]]] = field(default_factory=list)
    corner_contacts: List[Tuple[Cell, Cell, Point]] = field(default_factory=list)
    faces: List[Tuple[Tuple[int, ...], Any]] = field(default_factory=list)

    @property
    def meets_at_edges(self) -> bool:
        return not self.corner_contacts

    def corner_points(self) -> List[Point]:
        return sorted({p for _, _, p in self.corner_contacts})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "edge_contacts": len(self.edge_contacts),
            "corner_contacts": [
                {"cells": [list(a), list(b)], "point": [fraction_str(c) for c in p]}
                for a, b, p in self.corner_contacts
            ],
            "faces": [{"indices": list(idx), "face": str(face)} for idx, face in self.faces],
        }


def contact_report(cells: CellSet) -> ContactReport:
    """
    Edge contacts are orthogonal neighbours with their shared segment.
    A diagonal pair is a corner contact only when no third cell bridges
    their common point.
    """
    report = ContactReport()
    members = cells.cells
    for (i, j) in sorted(members):
        if (i + 1, j) in members:
            report.edge_contacts.append(((i, j), (i + 1, j),
                                         (cells.point((i + 1, j)), cells.point((i + 1, j + 1)))))
        if (i, j + 1) in members:
            report.edge_contacts.append(((i, j), (i, j + 1),
                                         (cells.point((i, j + 1)), cells.point((i + 1, j + 1)))))
    if members:
        points, flags = _corner_flags(cells)
        mask = _diagonal_mask(flags)
        for p, f in zip(points[mask].tolist(), flags[mask]):
            a, b = p
            if f[0]:
                pair = ((a - 1, b - 1), (a, b))
            else:
                pair = ((a - 1, b), (a, b - 1))
            report.corner_contacts.append((min(pair), max(pair), cells.point(p)))
    return report
