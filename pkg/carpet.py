#!/usr/bin/env python3
"""
================================================================
🧶 CARPET - Model systems and randomized carpets K^η
The two model IFSs, composed maps φ_w, depth-m approximations,
open set condition, point coding and Ahlfors-regularity ratios
================================================================

Lattice conventions: at depth m a cell is the closed square
n^{-m}[a, a+1] x [b, b+1] and is stored by its integer corner (a, b).
Model offsets are corners at depth 1.

Letter layout (1-based):
    1 .. n            bottom row, left to right
    n+1 .. 2n-1       right column, bottom to top
    2n .. 3n-2        top row, right to left
    3n-1 .. 4n-4      left column, top to bottom
    4n-3 .. 4n-4+n/2-1      middle group   (n/2+i-1, 1)
    next n/2-1 letters      bump group     (i, 2) in model 1, (i, 1) in model 2
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from setops import CellSet, Length, Point, as_fraction, connected_components, contact_report
from symbolic import ChoiceFunction, Word
from workbench_errors import BudgetExceededError, DomainError, InvariantViolation, PreconditionError

logger = logging.getLogger(__name__)

DEFAULT_CELL_BUDGET = 10_000_000


# ----------------------------------------------------------------------
# Similarities
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Similarity:
    """
    x ↦ scale · O x + translation, with O a signed permutation.

    `orthogonal` lists (source axis, sign) per output axis; None means
    the identity.
    """
    scale: Fraction
    translation: Tuple[Fraction, ...]
    orthogonal: Optional[Tuple[Tuple[int, int], ...]] = None

    def __post_init__(self):
        scale = as_fraction(self.scale)
        if scale <= 0:
            raise DomainError("similarity scale must be positive")
        object.__setattr__(self, 'scale', scale)
        object.__setattr__(self, 'translation', tuple(as_fraction(t) for t in self.translation))
        if self.orthogonal is not None:
            axes = sorted(axis for axis, _ in self.orthogonal)
            if axes != list(range(len(self.translation))) or any(s not in (1, -1) for _, s in self.orthogonal):
                raise DomainError("orthogonal part must be a signed permutation")

    @classmethod
    def identity(cls, dimension: int = 2) -> 'Similarity':
        return cls(Fraction(1), tuple(Fraction(0) for _ in range(dimension)))

    @property
    def dimension(self) -> int:
        return len(self.translation)

    def _rotate(self, point: Sequence[Fraction]) -> Tuple[Fraction, ...]:
        if self.orthogonal is None:
            return tuple(point)
        return tuple(sign * point[axis] for axis, sign in self.orthogonal)

    def __call__(self, point: Sequence[Any]) -> Point:
        point = tuple(as_fraction(c) for c in point)
        rotated = self._rotate(point)
        return tuple(self.scale * c + t for c, t in zip(rotated, self.translation))

    def compose(self, inner: 'Similarity') -> 'Similarity':
        """self ∘ inner"""
        translation = self(inner.translation)
        if self.orthogonal is None:
            orthogonal = inner.orthogonal
        elif inner.orthogonal is None:
            orthogonal = self.orthogonal
        else:
            orthogonal = tuple(
                (inner.orthogonal[axis][0], sign * inner.orthogonal[axis][1])
                for axis, sign in self.orthogonal
            )
        return Similarity(self.scale * inner.scale, translation, orthogonal)

    def inverse(self) -> 'Similarity':
        if self.orthogonal is None:
            inv_orth = None
        else:
            inv = [None] * self.dimension
            for out_axis, (src_axis, sign) in enumerate(self.orthogonal):
                inv[src_axis] = (out_axis, sign)
            inv_orth = tuple(inv)
        shell = Similarity(1 / self.scale, tuple(Fraction(0) for _ in self.translation), inv_orth)
        shifted = shell(self.translation)
        return Similarity(1 / self.scale, tuple(-c for c in shifted), inv_orth)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "scale": str(self.scale),
            "translation": [str(t) for t in self.translation],
            "orthogonal": [list(o) for o in self.orthogonal] if self.orthogonal else None,
        }


# ----------------------------------------------------------------------
# Model systems
# ----------------------------------------------------------------------

def ring_cell(n: int, j: int) -> Tuple[int, int]:
    """Corner of the j-th boundary square (1 <= j <= 4n-4)"""
    if 1 <= j <= n:
        return (j - 1, 0)
    if j <= 2 * n - 1:
        return (n - 1, j - n)
    if j <= 3 * n - 2:
        return (n - 1 - (j - (2 * n - 1)), n - 1)
    if j <= 4 * n - 4:
        return (0, n - 1 - (j - (3 * n - 2)))
    raise DomainError(f"{j} is not a ring letter for n={n}")


def _raw_offsets(n: int, model: int) -> np.ndarray:
    half = n // 2
    ring = 4 * n - 4
    offsets = [ring_cell(n, j) for j in range(1, ring + 1)]
    offsets += [(half + i - 1, 1) for i in range(1, half)]
    bump_row = 2 if model == 1 else 1
    offsets += [(i, bump_row) for i in range(1, half)]
    return np.array(offsets, dtype=np.int64)


def middle_letters(n: int) -> range:
    start = 4 * n - 3
    return range(start, start + n // 2 - 1)


def bump_letters(n: int) -> range:
    start = 4 * n - 3 + n // 2 - 1
    return range(start, start + n // 2 - 1)


def model_dendrite_edges(n: int, model: int) -> List[Tuple[Tuple[int, int], Tuple[int, int]]]:
    """
    Unit edges of T^model in lattice units 1/n, each as (lower/left, upper/right).

    T is the boundary of [0, n-1]^2 without the edge x=n-1, y in [n-2, n-1],
    the stub {n/2} x [0, 1] and the segment [n/2, n-2] x {1}; model 1 adds
    [0, n/2-1] x {2}, model 2 adds [0, n/2-1] x {1}.
    """
    _check_n(n)
    top = n - 1
    half = n // 2
    edges = []
    for x in range(top):
        edges.append(((x, 0), (x + 1, 0)))
        edges.append(((x, top), (x + 1, top)))
    for y in range(top):
        edges.append(((0, y), (0, y + 1)))
        if y != top - 1:
            edges.append(((top, y), (top, y + 1)))
    edges.append(((half, 0), (half, 1)))
    for x in range(half, n - 2):
        edges.append(((x, 1), (x + 1, 1)))
    bump_row = 2 if model == 1 else 1
    for x in range(0, half - 1):
        edges.append(((x, bump_row), (x + 1, bump_row)))
    return sorted(edges)


@dataclass
class ConstraintResult:
    name: str
    ok: bool
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "ok": self.ok, "detail": self.detail}


def _check_n(n: int) -> None:
    if n < 4 or n % 2:
        raise DomainError(f"n must be an even integer >= 4, got {n}")


def verify_model_constraints(n: int) -> List[ConstraintResult]:
    """Programmatic check of the layout constraints C1-C7"""
    _check_n(n)
    results: List[ConstraintResult] = []
    one, two = _raw_offsets(n, 1), _raw_offsets(n, 2)
    size = 5 * n - 6
    ring = 4 * n - 4

    c1 = all(
        len({tuple(c) for c in offs.tolist()}) == size and offs.min() >= 0 and offs.max() <= n - 1
        for offs in (one, two)
    ) and one.shape[0] == size
    results.append(ConstraintResult("C1", bool(c1), f"{size} distinct cells of side 1/n in [0,1]^2"))

    same = one[:ring + n // 2 - 1]
    diff_rows = np.nonzero(np.any(one != two, axis=1))[0] + 1
    bumps = list(bump_letters(n))
    c2 = (np.array_equal(same, two[:ring + n // 2 - 1])
          and list(diff_rows) == bumps
          and all(one[j - 1][0] == two[j - 1][0] and one[j - 1][1] == 2 and two[j - 1][1] == 1 for j in bumps))
    results.append(ConstraintResult("C2", bool(c2), "models differ only in the bump row height"))

    cells = {model: CellSet(n, 1, frozenset(map(tuple, offs.tolist())))
             for model, offs in ((1, one), (2, two))}
    corners_two = contact_report(cells[2]).corner_points()
    results.append(ConstraintResult("C3", not corners_two, f"model 2 corner contacts: {corners_two}"))

    corners_one = contact_report(cells[1]).corner_points()
    expected = [(Fraction(1, 2), Fraction(2, n))]
    results.append(ConstraintResult("C4", corners_one == expected, f"model 1 corner contacts: {corners_one}"))

    c5 = True
    for model in (1, 2):
        members = cells[model].cells
        for (a, b), (c, d) in model_dendrite_edges(n, model):
            if b == d:
                on_boundary = (a, b) in members or (a, b - 1) in members
            else:
                on_boundary = (a, b) in members or (a - 1, b) in members
            c5 = c5 and on_boundary
    results.append(ConstraintResult("C5", c5, "dendrite edges lie on cell boundaries"))

    c6 = all(len(connected_components(cells[m], "edge")) == 1 for m in (1, 2))
    results.append(ConstraintResult("C6", c6, "cell union connected"))

    interior = np.concatenate([one[ring:], two[ring:]])
    c7 = bool(interior.min() >= 1 and interior.max() <= n - 2)
    results.append(ConstraintResult("C7", c7, "interior letters map [0,1]^2 into (0,1)^2"))
    return results


@lru_cache(maxsize=None)
def model_offsets(n: int, model: int) -> np.ndarray:
    """Depth-1 corners of model `model`, row j-1 for letter j; constraints checked once per n"""
    _check_n(n)
    if model not in (1, 2):
        raise DomainError("model must be 1 or 2")
    failures = [r for r in verify_model_constraints(n) if not r.ok]
    if failures:
        raise InvariantViolation(failures[0].name, failures[0].detail)
    offsets = _raw_offsets(n, model)
    offsets.setflags(write=False)
    return offsets


@lru_cache(maxsize=None)
def letter_at(n: int, model: int) -> Dict[Tuple[int, int], int]:
    """Inverse of model_offsets: corner -> letter"""
    return {tuple(c): j + 1 for j, c in enumerate(model_offsets(n, model).tolist())}


def model_map(n: int, model: int, j: int) -> Similarity:
    _check_n(n)
    if not 1 <= j <= 5 * n - 6:
        raise DomainError(f"letter {j} out of range 1..{5 * n - 6}")
    a, b = model_offsets(n, model)[j - 1].tolist()
    return Similarity(Fraction(1, n), (Fraction(a, n), Fraction(b, n)))


@dataclass(frozen=True)
class ModelSystem:
    n: int
    model: int
    maps: Tuple[Similarity, ...]

    @classmethod
    def build(cls, n: int, model: int) -> 'ModelSystem':
        return cls(n, model, tuple(model_map(n, model, j) for j in range(1, 5 * n - 5)))

    def cells(self) -> CellSet:
        return CellSet(self.n, 1, frozenset(map(tuple, model_offsets(self.n, self.model).tolist())))


def compose_phi(eta: ChoiceFunction, n: int, word: Sequence[int]) -> Similarity:
    """φ_w = ψ^{η(ε)}_{i1} ∘ ψ^{η(i1)}_{i2} ∘ ... ; identity for the empty word"""
    word = tuple(word)
    phi = Similarity.identity()
    for i, letter in enumerate(word):
        phi = phi.compose(model_map(n, eta(word[:i]), letter))
    return phi


def corner_of(eta: ChoiceFunction, n: int, word: Sequence[int]) -> Tuple[int, int]:
    """n^{|w|} φ_w(0) as integers"""
    word = tuple(int(x) for x in word)
    a = b = 0
    for i, letter in enumerate(word):
        off = model_offsets(n, eta(word[:i]))[letter - 1]
        a, b = n * a + int(off[0]), n * b + int(off[1])
    return a, b


# ----------------------------------------------------------------------
# Approximations
# ----------------------------------------------------------------------

@dataclass
class CarpetApprox:
    """Depth-m cells of K^η: row i of `words` addresses cell `corners[i]`"""
    n: int
    depth: int
    words: np.ndarray
    corners: np.ndarray
    eta: Optional[ChoiceFunction] = None
    partial: bool = False
    _index: Optional[Dict[Tuple[int, int], int]] = field(default=None, repr=False)

    def __len__(self) -> int:
        return self.corners.shape[0]

    @property
    def cell_size(self) -> Fraction:
        return Fraction(1, self.n ** self.depth)

    @property
    def cells(self) -> CellSet:
        return CellSet.from_array(self.n, self.depth, self.corners)

    def word(self, row: int) -> Word:
        return tuple(int(x) for x in self.words[row])

    def index(self) -> Dict[Tuple[int, int], int]:
        """corner -> row lookup"""
        if self._index is None:
            self._index = {tuple(c): i for i, c in enumerate(self.corners.tolist())}
        return self._index

    def word_at(self, corner: Tuple[int, int]) -> Optional[Word]:
        row = self.index().get(tuple(corner))
        return None if row is None else self.word(row)

    def check_osc(self) -> None:
        """Distinct cells inside [0,1]^2, i.e. pairwise disjoint open squares"""
        side = self.n ** self.depth
        if self.corners.size and (self.corners.min() < 0 or self.corners.max() > side - 1):
            raise InvariantViolation("OSC", "a cell leaves [0,1]^2")
        encoded = self.corners[:, 0] * side + self.corners[:, 1]
        if np.unique(encoded).shape[0] != encoded.shape[0]:
            raise InvariantViolation("OSC", "two words share a cell")

    def boundary_covered(self) -> bool:
        """All boundary cells of the depth-m grid are present"""
        side = self.n ** self.depth
        present = set(map(tuple, self.corners.tolist())) if side <= 4096 else None
        edge = [(a, 0) for a in range(side)] + [(a, side - 1) for a in range(side)]
        edge += [(0, b) for b in range(side)] + [(side - 1, b) for b in range(side)]
        if present is None:
            present = self.index()
        return all(c in present for c in edge)


def _check_budget(what: str, required: int, budget: int) -> None:
    if required > budget:
        raise BudgetExceededError(what, required, budget)


def level_models(eta: ChoiceFunction, words: np.ndarray) -> np.ndarray:
    """η(w) for every row of `words`"""
    return np.fromiter((eta(tuple(w)) for w in words.tolist()), dtype=np.int8, count=words.shape[0])


def refine_level(eta: ChoiceFunction, n: int, words: np.ndarray, corners: np.ndarray,
                 models: Optional[np.ndarray] = None) -> Tuple[np.ndarray, np.ndarray]:
    """One refinement level for every row"""
    size = 5 * n - 6
    count = corners.shape[0]
    if models is None:
        models = level_models(eta, words)
    offsets = np.stack([model_offsets(n, 1), model_offsets(n, 2)])
    new_corners = (n * corners)[:, None, :] + offsets[models - 1]
    letters = np.tile(np.arange(1, size + 1, dtype=np.int16), count)
    new_words = np.concatenate([np.repeat(words, size, axis=0), letters[:, None]], axis=1)
    return new_words, new_corners.reshape(-1, 2)


def approx_cells(eta: ChoiceFunction, n: int, m: int, budget: int = DEFAULT_CELL_BUDGET,
                 check: bool = True) -> CarpetApprox:
    """All depth-m cells φ_w([0,1]^2), |w| = m"""
    if m < 0:
        raise DomainError("depth must be nonnegative")
    _check_n(n)
    _check_budget(f"depth-{m} carpet", (5 * n - 6) ** m, budget)
    words = np.zeros((1, 0), dtype=np.int16)
    corners = np.zeros((1, 2), dtype=np.int64)
    for _ in range(m):
        words, corners = refine_level(eta, n, words, corners)
    approx = CarpetApprox(n, m, words, corners, eta)
    if check:
        approx.check_osc()
    logger.debug(f"✅ depth-{m} approximation with {len(approx)} cells")
    return approx


def _ball_meets_cells(corners: np.ndarray, scale: int, center: Sequence[Fraction], radius: Fraction) -> np.ndarray:
    """Exact closed-ball vs closed-cell test for cells of side 1/scale"""
    den = math.lcm(*(c.denominator for c in center), radius.denominator)
    cx = [int(c * scale * den) for c in center]
    rr = int(radius * scale * den)
    big = max(abs(v) for v in cx) + (int(np.abs(corners).max()) + 1) * den + rr if corners.size else 0
    if big * big * 2 < 2 ** 62:
        lo = corners * den
        dx = np.maximum(0, np.maximum(lo[:, 0] - cx[0], cx[0] - lo[:, 0] - den))
        dy = np.maximum(0, np.maximum(lo[:, 1] - cx[1], cx[1] - lo[:, 1] - den))
        return dx * dx + dy * dy <= rr * rr
    out = np.zeros(corners.shape[0], dtype=bool)
    for i, (a, b) in enumerate(corners.tolist()):
        dx = max(0, a * den - cx[0], cx[0] - (a + 1) * den)
        dy = max(0, b * den - cx[1], cx[1] - (b + 1) * den)
        out[i] = dx * dx + dy * dy <= rr * rr
    return out


def cells_near(eta: ChoiceFunction, n: int, center: Sequence[Any], radius: Any, depth: int,
               budget: int = DEFAULT_CELL_BUDGET) -> CarpetApprox:
    """Depth cells meeting the closed ball B̄(center, radius), by pruned descent"""
    center = tuple(as_fraction(c) for c in center)
    radius = as_fraction(radius)
    if radius < 0:
        raise DomainError("radius must be nonnegative")
    words = np.zeros((1, 0), dtype=np.int16)
    corners = np.zeros((1, 2), dtype=np.int64)
    for level in range(1, depth + 1):
        words, corners = refine_level(eta, n, words, corners)
        keep = _ball_meets_cells(corners, n ** level, center, radius)
        words, corners = words[keep], corners[keep]
        _check_budget(f"cells near {tuple(float(c) for c in center)}", corners.shape[0], budget)
    return CarpetApprox(n, depth, words, corners, eta, partial=True)


# ----------------------------------------------------------------------
# Cell relations, coding, regularity
# ----------------------------------------------------------------------

@dataclass
class CellRelation:
    intersecting: bool
    gap: Length
    farthest: Length
    bound_ok: bool

    def to_dict(self) -> Dict[str, Any]:
        return {"intersecting": self.intersecting, "gap": float(self.gap),
                "farthest": float(self.farthest), "bound_ok": self.bound_ok}


def cell_relation(eta: ChoiceFunction, n: int, w: Sequence[int], v: Sequence[int]) -> CellRelation:
    """
    Exact closed-cell intersection with the distance certificate:
    disjoint cells are at least n^{-m} apart, intersecting cells lie
    within 2√2 n^{-m} of each other.
    """
    if len(w) != len(v):
        raise DomainError("cell_relation needs words of equal length")
    m = len(w)
    h = Fraction(1, n ** m)
    (a1, b1), (a2, b2) = corner_of(eta, n, w), corner_of(eta, n, v)
    dx, dy = abs(a1 - a2), abs(b1 - b2)
    gap = Length((max(0, dx - 1) ** 2 + max(0, dy - 1) ** 2) * h * h)
    farthest = Length(((dx + 1) ** 2 + (dy + 1) ** 2) * h * h)
    intersecting = gap.squared == 0
    if intersecting:
        bound_ok = farthest.squared <= 8 * h * h
    else:
        bound_ok = gap.squared >= h * h
    return CellRelation(intersecting, gap, farthest, bound_ok)


@dataclass
class CodePoint:
    point: Point
    error_radius: Length

    def to_dict(self) -> Dict[str, Any]:
        return {"point": [str(c) for c in self.point], "error_radius": float(self.error_radius)}


def code_point(eta: ChoiceFunction, n: int, prefix: Sequence[int]) -> CodePoint:
    """φ_{w(m)}(0), within √2 n^{-m} of π_η(w)"""
    m = len(prefix)
    if m < 1:
        raise DomainError("code_point needs a prefix of length >= 1")
    a, b = corner_of(eta, n, prefix)
    h = Fraction(1, n ** m)
    return CodePoint((a * h, b * h), Length(2 * h * h))


def injective_prefix_check(eta: ChoiceFunction, n: int, prefix: Sequence[int]) -> List[Tuple[int, bool]]:
    """
    For each position m+1 holding an interior letter: the depth-(m+1)
    cell sits inside the open depth-m cell, so the coded point avoids
    every depth-m cell boundary.
    """
    prefix = tuple(prefix)
    results = []
    ring = 4 * n - 4
    x = code_point(eta, n, prefix).point
    for m in range(len(prefix)):
        if prefix[m] <= ring:
            continue
        parent = corner_of(eta, n, prefix[:m])
        child = corner_of(eta, n, prefix[:m + 1])
        ox, oy = child[0] - n * parent[0], child[1] - n * parent[1]
        inside = 1 <= ox <= n - 2 and 1 <= oy <= n - 2
        h = Fraction(1, n ** m)
        lo = (parent[0] * h, parent[1] * h)
        strictly = all(lo[c] < x[c] < lo[c] + h for c in range(2))
        results.append((m, inside and strictly))
    return results


def alpha(n: int) -> float:
    """Similarity dimension log(5n-6)/log n"""
    return math.log(5 * n - 6) / math.log(n)


def moran_residual(n: int) -> float:
    return abs(n ** alpha(n) - (5 * n - 6)) / (5 * n - 6)


def ahlfors_constants(n: int) -> Tuple[float, float]:
    """(lower, upper) = ((8√2)^{-α}, 9 (8/√2)^{α})"""
    a = alpha(n)
    return (8 * math.sqrt(2)) ** (-a), 9 * (8 / math.sqrt(2)) ** a


@dataclass
class AhlforsSample:
    x: Point
    r: Fraction
    mass: Fraction
    ratio: float
    lower: float
    upper: float
    slack: float

    @property
    def within_bounds(self) -> bool:
        """Both constants carry the one-cell-layer slack: lower / slack <= ratio <= upper * slack"""
        return self.lower / self.slack <= self.ratio <= self.upper * self.slack

    def to_dict(self) -> Dict[str, Any]:
        return {"x": [str(c) for c in self.x], "r": str(self.r), "mass": str(self.mass),
                "ratio": self.ratio, "lower": self.lower, "upper": self.upper,
                "slack": self.slack, "within_bounds": self.within_bounds}


def ahlfors_ratio(eta: ChoiceFunction, n: int, x: Sequence[Any], r: Any, depth: int,
                  approx: Optional[CarpetApprox] = None) -> AhlforsSample:
    """
    μ(B̄(x,r)) / r^α with μ the cylinder pushforward counted over
    depth-m cells meeting the ball. Both constants carry the
    one-cell-layer slack (1 + √2 n^{-m}/r)^α.

    x must lie in a depth-m cell of the approximation.
    """
    r = as_fraction(r)
    x = tuple(as_fraction(c) for c in x)
    if not 0 < r < Fraction(1, n):
        raise DomainError(f"r must lie in (0, 1/n), got {r}")
    if approx is None:
        approx = approx_cells(eta, n, depth)
    if approx.depth != depth:
        raise DomainError(f"approximation has depth {approx.depth}, asked for {depth}")
    if not _ball_meets_cells(approx.corners, n ** depth, x, Fraction(0)).any():
        raise PreconditionError(f"x = {x} lies in no depth-{depth} cell of the carpet")
    hits = int(_ball_meets_cells(approx.corners, n ** depth, x, r).sum())
    mass = Fraction(hits, (5 * n - 6) ** depth)
    a = alpha(n)
    lower, upper = ahlfors_constants(n)
    slack = (1 + math.sqrt(2) * float(approx.cell_size) / float(r)) ** a
    return AhlforsSample(x, r, mass, float(mass) / float(r) ** a, lower, upper, slack)
