#!/usr/bin/env python3
"""
================================================================
🔭 TANGENT LAB - Blow-ups, cut points and local self-similarity
K^{n,k} approximations, local cut-point counts, planted blow-up
sequences X_N against the models Y_N and L_k, stopping-time ball
covers and face calculus for self-similar sponges
================================================================
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from carpet import (
    DEFAULT_CELL_BUDGET, Similarity, alpha, ahlfors_constants, approx_cells, cells_near,
    code_point, corner_of, model_offsets,
)
from setops import (
    AWProfile, CellSet, ContactReport, Length, Point, PointCloud, as_fraction, aw_profile,
    blow_up, contact_report, hausdorff_distance, local_cut_point_candidates,
)
from symbolic import (
    Alphabet, ChoiceFunction, ConstantChoice, DepthChoice, ShiftedChoice, Word,
    check_R1R2, collar_choice, find_ell,
)
from workbench_errors import BudgetExceededError, DomainError, InvariantViolation, PreconditionError

logger = logging.getLogger(__name__)


def cut_point_formula(n: int, k: int) -> int:
    """((5n-6)^k - 1)/(5n-7)"""
    return ((5 * n - 6) ** k - 1) // (5 * n - 7)


# ----------------------------------------------------------------------
# K^{n,k} and cut points
# ----------------------------------------------------------------------

def build_Knk(n: int, k: int, extra_depth: int, budget: int = DEFAULT_CELL_BUDGET) -> CellSet:
    """Depth-(k+d) cells: k model-1 levels over d model-2 levels"""
    if k < 0 or extra_depth < 0:
        raise DomainError("k and extra depth must be nonnegative")
    return approx_cells(DepthChoice(k), n, k + extra_depth, budget).cells


def knk_recursion_holds(n: int, k: int, extra_depth: int = 1) -> bool:
    """K^{n,k} = ⋃_j ψ¹_j(K^{n,k-1}) at cell level"""
    if k < 1:
        raise DomainError("recursion needs k >= 1")
    depth = k + extra_depth
    inner = build_Knk(n, k - 1, extra_depth).corner_array()
    step = n ** (depth - 1)
    images = [inner + offset * step for offset in model_offsets(n, 1)]
    rebuilt = set(map(tuple, np.concatenate(images).tolist()))
    return rebuilt == set(build_Knk(n, k, extra_depth).cells)


def count_local_cut_points(n: int, k: int, budget: int = DEFAULT_CELL_BUDGET) -> int:
    """Corner-only contacts of the depth-(k+1) approximation of K^{n,k}"""
    count = len(local_cut_point_candidates(build_Knk(n, k, 1, budget)))
    logger.info(f"📊 K^{{{n},{k}}} has {count} local cut points (formula {cut_point_formula(n, k)})")
    return count


def meet_at_edges(shape: Any, n: Optional[int] = None, model: Optional[int] = None) -> ContactReport:
    """
    Contact classification for a CellSet or for equal-scale translation maps.
    With `model` given, model 2 must meet at edges only and model 1 only
    at the single corner (1/2, 2/n).
    """
    if isinstance(shape, CellSet):
        cells = shape
    else:
        maps: List[Similarity] = list(shape)
        if not maps:
            raise DomainError("no maps given")
        scale = maps[0].scale
        if any(m.scale != scale or m.orthogonal is not None for m in maps):
            raise DomainError("meet_at_edges needs equal-scale translation maps")
        if scale.numerator != 1:
            raise DomainError("map scale must be 1/n")
        corners = []
        for m in maps:
            corner = tuple(t / scale for t in m.translation)
            if any(c.denominator != 1 for c in corner):
                raise DomainError("map images are not grid squares")
            corners.append(tuple(int(c) for c in corner))
        if len(set(corners)) != len(corners):
            raise InvariantViolation("meet-at-edges", "two squares share their interior")
        cells = CellSet(scale.denominator, 1, frozenset(corners))
    report = contact_report(cells)
    if model == 2 and not report.meets_at_edges:
        raise InvariantViolation("meet-at-edges", f"model 2 corner contacts at {report.corner_points()}")
    if model == 1:
        expected = [(Fraction(1, 2), Fraction(2, n))]
        if report.corner_points() != expected:
            raise InvariantViolation("meet-at-edges", f"model 1 corner contacts {report.corner_points()}")
    return report


# ----------------------------------------------------------------------
# Limit models L_k
# ----------------------------------------------------------------------

@dataclass
class TangentModel:
    n: int
    k: int
    radius: Fraction
    offsets: List[Tuple[int, int]]
    cells: CellSet
    cut_points: List[Point]

    @property
    def expected(self) -> int:
        return cut_point_formula(self.n, self.k)

    @property
    def in_unit_square(self) -> List[Point]:
        return [p for p in self.cut_points if all(0 <= c <= 1 for c in p)]

    @property
    def in_window(self) -> List[Point]:
        r2 = self.radius * self.radius
        return [p for p in self.cut_points if p[0] * p[0] + p[1] * p[1] <= r2]

    @property
    def ok(self) -> bool:
        return len(self.in_unit_square) == len(self.cut_points) == self.expected

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "k": self.k,
            "radius": str(self.radius),
            "offsets": [list(o) for o in self.offsets],
            "cells": len(self.cells),
            "cut_points": [[str(c) for c in p] for p in self.cut_points],
            "in_window": len(self.in_window),
            "expected": self.expected,
            "ok": self.ok,
        }


def limit_model(n: int, k: int, radius: Any, offsets: Sequence[Sequence[int]],
                extra_depth: int = 1, budget: int = DEFAULT_CELL_BUDGET) -> TangentModel:
    """
    K^{n,k} on [0,1]^2 plus K^{n,0} copies on the unit squares at `offsets`.

    Raises InvariantViolation when a local cut point leaves the K^{n,k}
    square or their number differs from cut_point_formula(n, k).
    """
    radius = as_fraction(radius)
    if radius <= 0:
        raise DomainError("window radius must be positive")
    offsets = [tuple(int(c) for c in o) for o in offsets]
    if len(set(offsets)) != len(offsets) or (0, 0) in offsets:
        raise InvariantViolation("limit-model", "component unit squares overlap")
    depth = k + extra_depth
    required = (5 * n - 6) ** depth * (len(offsets) + 1)
    if required > budget:
        raise BudgetExceededError(f"L_{k} window", required, budget)
    core = build_Knk(n, k, extra_depth, budget).corner_array()
    parts = [core]
    if offsets:
        copy = approx_cells(ConstantChoice(2), n, depth, budget).corners
        side = n ** depth
        parts += [copy + np.array(o, dtype=np.int64) * side for o in offsets]
    cells = CellSet.from_array(n, depth, np.concatenate(parts))
    cut_points = local_cut_point_candidates(cells)
    model = TangentModel(n, k, radius, sorted(offsets), cells, cut_points)
    if len(model.in_unit_square) != len(cut_points):
        raise InvariantViolation("limit-model", "a local cut point lies outside the K^{n,k} square")
    if len(cut_points) != model.expected:
        raise InvariantViolation("limit-model", f"{len(cut_points)} local cut points, formula gives {model.expected}")
    return model


# ----------------------------------------------------------------------
# Blow-up pipeline
# ----------------------------------------------------------------------

@dataclass
class BlowupReport:
    n: int
    N: int
    k: int
    ell: int
    x_N: Point
    y_N: Point
    gap: Length
    gap_bound: Fraction
    x_resolution: float
    window_distance: Length
    window_resolution: Fraction
    window_bound: Fraction
    margin: Fraction
    margin_bound: Fraction
    profile: AWProfile
    offsets: Dict[Fraction, List[Tuple[int, int]]] = field(default_factory=dict)
    r1r2_method: str = "enumeration"

    @property
    def checks(self) -> Dict[str, bool]:
        return {
            "gap": self.gap <= self.gap_bound,
            "window": self.window_distance <= self.window_bound,
            "margin": self.margin >= self.margin_bound,
        }

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def final_excess(self, radius: Any) -> float:
        rows = self.profile.column(as_fraction(radius))
        return max(float(rows[-1].forward), float(rows[-1].backward))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n, "N": self.N, "k": self.k, "ell": self.ell,
            "x_N": [str(c) for c in self.x_N],
            "y_N": [str(c) for c in self.y_N],
            "gap": float(self.gap), "gap_bound": float(self.gap_bound),
            "x_resolution": self.x_resolution,
            "window_distance": float(self.window_distance),
            "window_resolution": float(self.window_resolution),
            "window_bound": float(self.window_bound),
            "margin": str(self.margin), "margin_bound": str(self.margin_bound),
            "profile": self.profile.to_dict(),
            "offsets": {str(r): [list(o) for o in offs] for r, offs in sorted(self.offsets.items())},
            "r1r2_method": self.r1r2_method,
            "checks": self.checks,
        }


def _depth_point(corner: Tuple[int, int], depth: int, n: int) -> Point:
    return (Fraction(corner[0], n ** depth), Fraction(corner[1], n ** depth))


def _square_margin(inner: Point, inner_side: Fraction, outer: Point, outer_side: Fraction) -> Fraction:
    """Distance from the inner square to the complement of the open outer square"""
    return min(min(inner[c] - outer[c], outer[c] + outer_side - inner[c] - inner_side) for c in range(2))


def observed_offsets(n: int, N: int, block: Sequence[int], radius: Any) -> List[Tuple[int, int]]:
    """Integer translates n^N(ψ²_v(0) - ψ²_{v_N}(0)) of depth-N model-2 squares meeting B̄(0, r)"""
    radius = as_fraction(radius)
    centre_corner = corner_of(ConstantChoice(2), n, block)
    centre = _depth_point(centre_corner, N, n)
    near = cells_near(ConstantChoice(2), n, centre, radius / n ** N, N)
    offsets = [(a - centre_corner[0], b - centre_corner[1]) for a, b in near.corners.tolist()]
    return sorted(o for o in offsets if o != (0, 0))


def blowup_pipeline(eta: ChoiceFunction, n: int, w_prefix: Sequence[int], k: int, N: int,
                    ell: Optional[int] = None, radii: Sequence[Any] = (1, 2), extra_depth: int = 1,
                    budget: int = DEFAULT_CELL_BUDGET) -> BlowupReport:
    """
    Compare X_N = n^ℓ(K^η - x) with Y_N near the origin.

    Everything is computed in the frame of the collar square w(ℓ-N),
    where X_N = n^N(K^{η'} - c(x)) for the shifted choice η' and Y_N is
    the model-2 carpet with the unit square of v_N replaced by K^{n,k}.
    """
    alphabet = Alphabet(n)
    prefix = alphabet.validate_word(w_prefix)
    if ell is None:
        ell = find_ell(eta, alphabet, prefix, N, k, len(prefix))
        if ell is None:
            raise PreconditionError(f"no (R1)/(R2) occurrence for N={N}, k={k} along the prefix")
    verdict = check_R1R2(eta, alphabet, prefix, N, k, ell)
    if not verdict.ok:
        raise PreconditionError(f"(R1)/(R2) fails at ell={ell}: {verdict.reason}", verdict.to_dict())
    radii = [as_fraction(r) for r in radii]
    if any(r <= 0 or r >= n ** (N - 1) for r in radii):
        raise PreconditionError(f"radii must lie in (0, n^(N-1)) = (0, {n ** (N - 1)})")

    logger.info(f"🚀 Blow-up pipeline n={n} N={N} k={k} ell={ell}")
    collar, block = prefix[:ell - N], prefix[:ell]
    v_N = prefix[ell - N:ell]
    depth_L = ell + N + k - 1
    c_collar = corner_of(eta, n, collar)
    c_block = corner_of(eta, n, block)
    c_deep = corner_of(eta, n, prefix[:depth_L])

    x = code_point(eta, n, prefix).point
    scale_l = n ** ell
    block_origin = _depth_point(c_block, ell, n)
    x_N = tuple(scale_l * (x[c] - block_origin[c]) for c in range(2))
    y_N = tuple(Fraction(c_deep[c], n ** (depth_L - ell)) - c_block[c] for c in range(2))
    gap = Length(sum((x_N[c] - y_N[c]) ** 2 for c in range(2)))
    x_resolution = math.sqrt(2) * float(Fraction(scale_l, n ** len(prefix)))

    margin = _square_margin(block_origin, Fraction(1, scale_l),
                            _depth_point(c_collar, ell - N, n), Fraction(1, n ** (ell - N)))
    margin_bound = Fraction(n ** N, n ** (ell + 1))

    window_depth = N + k + extra_depth
    sub = approx_cells(ShiftedChoice(eta, block), n, window_depth, budget).cells
    model = build_Knk(n, k, N + extra_depth, budget)
    window_distance = hausdorff_distance(
        sub.to_point_cloud().translate(tuple(-c for c in x_N)),
        model.to_point_cloud().translate(tuple(-c for c in y_N)),
    )

    # collar frame
    depth_q = 2 * N + k - 2
    c_x = tuple(x[c] * n ** (ell - N) - c_collar[c] for c in range(2))
    reach = (max(radii) + 1) / n ** N
    origin = PointCloud.from_points([(0, 0)])

    def blown(choice: ChoiceFunction, shift: Point) -> PointCloud:
        cells = cells_near(choice, n, c_x, reach, depth_q, budget).cells
        cloud = cells.to_point_cloud().translate(tuple(-c for c in c_x)).scale(n ** N)
        return cloud.translate(shift).union(origin)

    X = blown(ShiftedChoice(eta, collar), (0, 0))
    Y = blown(collar_choice(N, k, v_N), tuple(x_N[c] - y_N[c] for c in range(2)))
    profile = aw_profile([X], Y, radii)

    report = BlowupReport(
        n=n, N=N, k=k, ell=ell, x_N=x_N, y_N=y_N,
        gap=gap, gap_bound=Fraction(n ** 3, n ** (N + k)), x_resolution=x_resolution,
        window_distance=window_distance, window_resolution=Fraction(1, n ** window_depth),
        window_bound=Fraction(n ** 4, n ** (N + k)),
        margin=margin, margin_bound=margin_bound, profile=profile,
        offsets={r: observed_offsets(n, N, v_N, r) for r in radii},
        r1r2_method=verdict.method,
    )
    status = "✅" if report.ok else "❌"
    logger.info(f"{status} |y_N - x_N| = {float(gap):.3e}, window distance {float(window_distance):.3e}")
    return report


# ----------------------------------------------------------------------
# Stopping words and ball covers
# ----------------------------------------------------------------------

@dataclass
class StoppingFamily:
    ratios: Tuple[Fraction, ...]
    delta: Fraction
    words: List[Word]
    scales: List[Fraction]

    def is_prefix_free(self) -> bool:
        members = set(self.words)
        return not any(w[:i] in members for w in self.words for i in range(len(w)))

    def is_complete(self) -> bool:
        """Uniform-weight Kraft sum is exactly 1"""
        size = len(self.ratios)
        return sum(Fraction(1, size ** len(w)) for w in self.words) == 1

    def scales_in_range(self) -> bool:
        if self.words == [()]:
            return True
        low = min(self.ratios) * self.delta
        return all(low <= s < self.delta for s in self.scales)

    def kraft_sum(self, exponent: float) -> float:
        return sum(float(s) ** exponent for s in self.scales)

    def to_dict(self) -> Dict[str, Any]:
        return {"ratios": [str(r) for r in self.ratios], "delta": str(self.delta),
                "words": [list(w) for w in self.words]}


def stopping_words(ratios: Sequence[Any], delta: Any, prune: Optional[Callable[[Word], bool]] = None,
                   budget: int = DEFAULT_CELL_BUDGET) -> StoppingFamily:
    """
    A*(δ): words with L_w < δ <= L_{parent}. `prune(word)` returning
    False drops the whole subtree. δ = 1 gives {ε}.
    """
    ratios = tuple(as_fraction(r) for r in ratios)
    delta = as_fraction(delta)
    if not ratios or any(not 0 < r < 1 for r in ratios):
        raise DomainError("Lipschitz ratios must lie in (0, 1)")
    if not 0 < delta <= 1:
        raise DomainError("delta must lie in (0, 1]")
    if delta == 1:
        return StoppingFamily(ratios, delta, [()], [Fraction(1)])
    words: List[Word] = []
    scales: List[Fraction] = []
    stack: List[Tuple[Word, Fraction]] = [((), Fraction(1))]
    while stack:
        word, scale = stack.pop()
        for letter in range(len(ratios), 0, -1):
            child, child_scale = word + (letter,), scale * ratios[letter - 1]
            if prune is not None and not prune(child):
                continue
            if child_scale < delta:
                words.append(child)
                scales.append(child_scale)
                if len(words) > budget:
                    raise BudgetExceededError("stopping family", len(words), budget)
            else:
                stack.append((child, child_scale))
    order = sorted(range(len(words)), key=lambda i: words[i])
    return StoppingFamily(ratios, delta, [words[i] for i in order], [scales[i] for i in order])


def _square_distance_bounds(x: Point, corner: Point, side: Fraction) -> Tuple[Fraction, Fraction]:
    """(nearest, farthest) squared distance from x to a closed square"""
    near = far = Fraction(0)
    for c in range(2):
        lo, hi = corner[c], corner[c] + side
        d = max(Fraction(0), lo - x[c], x[c] - hi)
        near += d * d
        far += max(abs(x[c] - lo), abs(x[c] - hi)) ** 2
    return near, far


@dataclass
class BallCover:
    x: Point
    r: Fraction
    delta: Fraction
    words: List[Word]
    inner_ok: bool
    outer_ok: bool
    card_bound: float
    s: float
    c1: float

    @property
    def card(self) -> int:
        return len(self.words)

    @property
    def ok(self) -> bool:
        return self.inner_ok and self.outer_ok and self.card <= self.card_bound

    def to_dict(self) -> Dict[str, Any]:
        return {"x": [str(c) for c in self.x], "r": str(self.r), "delta": str(self.delta),
                "card": self.card, "card_bound": self.card_bound, "s": self.s, "c1": self.c1,
                "inner_ok": self.inner_ok, "outer_ok": self.outer_ok, "ok": self.ok}


def ball_cover(eta: ChoiceFunction, n: int, x: Sequence[Any], r: Any, check_depth: int = 4,
               budget: int = DEFAULT_CELL_BUDGET) -> BallCover:
    """
    Stopping words of δ = r/√2 whose squares meet B̄(x, r). Each such
    square has diameter < r, so B̄(x,r) ∩ K ⊂ ⋃ φ_w(Q) ⊂ B̄(x, 2r);
    both inclusions are checked, the first against depth-`check_depth`
    cells.
    """
    x = tuple(as_fraction(c) for c in x)
    r = as_fraction(r)
    if r <= 0:
        raise DomainError("radius must be positive")
    if not all(0 <= c <= 1 for c in x):
        raise DomainError("centre must lie in [0,1]^2")
    size = 5 * n - 6
    # L_w < r/√2  <=>  2 L_w^2 < r^2; every stopping word has the same length m
    m = 0
    while 2 * Fraction(1, n ** m) ** 2 >= r * r:
        m += 1
    r2 = r * r

    def meets(word: Word) -> bool:
        corner = _depth_point(corner_of(eta, n, word), len(word), n)
        return _square_distance_bounds(x, corner, Fraction(1, n ** len(word)))[0] <= r2

    if m == 0:
        delta, words = Fraction(1), [()]
    else:
        # any δ in (n^{-m}, n^{1-m}] selects the same family
        delta = Fraction(n + 1, 2 * n ** m)
        words = stopping_words([Fraction(1, n)] * size, delta, meets, budget).words

    outer_ok = all(
        _square_distance_bounds(x, _depth_point(corner_of(eta, n, w), len(w), n),
                                Fraction(1, n ** len(w)))[1] <= 4 * r2
        for w in words
    )
    depth = max(check_depth, m)
    fine = cells_near(eta, n, x, r, depth, budget)
    members = set(words)
    inner_ok = all(tuple(int(v) for v in row[:m]) in members for row in fine.words)

    s = alpha(n)
    c1 = ahlfors_constants(n)[1] * 2 ** (s / 2)
    bound = (2 * n) ** s * c1
    return BallCover(x, r, delta, sorted(words), inner_ok, outer_ok, bound, s, c1)


# ----------------------------------------------------------------------
# Sponges
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Sponge:
    """Maps S_i(y) = y/k + a_i/k on [0,1]^N, a_i integer vectors in [0, k-1]^N"""
    k: int
    translations: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if self.k < 2:
            raise DomainError("sponge scale k must be >= 2")
        trans = tuple(tuple(int(v) for v in t) for t in self.translations)
        if not trans or len({len(t) for t in trans}) != 1:
            raise DomainError("translations must be nonempty vectors of one dimension")
        if any(v < 0 or v >= self.k for t in trans for v in t):
            raise DomainError("translations must lie in [0, k-1]^N")
        if len(set(trans)) != len(trans):
            raise DomainError("sponge translations must be distinct")
        object.__setattr__(self, 'translations', trans)

    @classmethod
    def from_model(cls, n: int, model: int) -> 'Sponge':
        return cls(n, tuple(map(tuple, model_offsets(n, model).tolist())))

    @property
    def dimension(self) -> int:
        return len(self.translations[0])

    def map(self, index: int) -> Similarity:
        a = self.translations[index - 1]
        return Similarity(Fraction(1, self.k), tuple(Fraction(v, self.k) for v in a))


@dataclass(frozen=True)
class SpongeFace:
    """Product of '[0,1]', '0', '1' factors, relative to S_{i_1}"""
    factors: Tuple[str, ...]

    @property
    def dimension(self) -> int:
        return sum(1 for f in self.factors if f == '[0,1]')

    def __str__(self) -> str:
        return " x ".join(self.factors)


def sponge_face_intersection(sponge: Sponge, indices: Sequence[int]) -> Optional[SpongeFace]:
    """⋂_j S_{i_j}([0,1]^N) = S_{i_1}(C) for a face C, or None when empty"""
    if not indices:
        raise DomainError("need at least one index")
    count = len(sponge.translations)
    if any(not 1 <= i <= count for i in indices):
        raise DomainError(f"indices must lie in 1..{count}")
    boxes = [sponge.translations[i - 1] for i in indices]
    first = boxes[0]
    factors = []
    for c in range(sponge.dimension):
        lo = max(b[c] for b in boxes)
        hi = min(b[c] for b in boxes) + 1
        if lo > hi:
            return None
        if lo < hi:
            factors.append('[0,1]')
        else:
            factors.append('0' if lo == first[c] else '1')
    return SpongeFace(tuple(factors))


def sponge_contacts(sponge: Sponge) -> ContactReport:
    """All nonempty pairwise intersections as faces"""
    report = ContactReport()
    count = len(sponge.translations)
    for i in range(1, count + 1):
        for j in range(i + 1, count + 1):
            face = sponge_face_intersection(sponge, (i, j))
            if face is not None:
                report.faces.append(((i, j), face))
    return report


# ----------------------------------------------------------------------
# Smooth-curve sanity check
# ----------------------------------------------------------------------

@dataclass
class LineBlowup:
    centre: Tuple[float, float]
    r: Fraction
    to_line: float
    from_line: float

    def to_dict(self) -> Dict[str, Any]:
        return {"centre": list(self.centre), "r": str(self.r),
                "to_line": self.to_line, "from_line": self.from_line}


@dataclass
class LineBlowupReport:
    rows: List[LineBlowup]
    bound: float

    @property
    def worst(self) -> float:
        return max(row.to_line for row in self.rows)

    @property
    def ok(self) -> bool:
        return self.worst <= self.bound

    def to_dict(self) -> Dict[str, Any]:
        return {"rows": [row.to_dict() for row in self.rows], "worst": self.worst,
                "bound": self.bound, "ok": self.ok}


def quarter_circle_cloud(samples: int, grid_bits: int = 20) -> PointCloud:
    """((1-t²)/(1+t²), 2t/(1+t²)) for t in [0,1], snapped to a dyadic grid"""
    t = np.linspace(0.0, 1.0, samples)
    pts = np.stack([(1 - t * t) / (1 + t * t), 2 * t / (1 + t * t)], axis=1)
    grid = 2 ** grid_bits
    nums = np.unique(np.rint(pts * grid).astype(np.int64), axis=0)
    return PointCloud(nums, grid, Fraction(1, grid))


def _line_fit(points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    centroid = points.mean(axis=0)
    _, _, vt = np.linalg.svd(points - centroid)
    return centroid, vt[0]


def line_blowup_check(centres: int = 20, exponents: Sequence[int] = range(4, 10),
                      samples: int = 2 ** 15, bound: float = 0.05) -> LineBlowupReport:
    """Blow-ups of a quarter circle at interior points stay within `bound` of their best-fit line"""
    cloud = quarter_circle_cloud(samples)
    floats = cloud.to_float()
    rows = []
    for index in np.linspace(0, floats.shape[0] - 1, centres + 2)[1:-1].astype(int):
        centre = tuple(Fraction(int(v), cloud.denominator) for v in cloud.numerators[index])
        for e in exponents:
            r = Fraction(1, 2 ** e)
            window = blow_up(cloud, centre, r, 1).to_float()
            mid, direction = _line_fit(window)
            normal = np.array([-direction[1], direction[0]])
            to_line = float(np.abs((window - mid) @ normal).max())
            along = np.linspace(-1.0, 1.0, 101)
            base = -float(mid @ direction)
            line_pts = mid + np.outer(base + along, direction)
            line_pts = line_pts[np.linalg.norm(line_pts, axis=1) <= 1.0]
            gaps = np.linalg.norm(window[None, :, :] - line_pts[:, None, :], axis=2).min(axis=1)
            rows.append(LineBlowup((float(centre[0]), float(centre[1])), r, to_line,
                                   float(gaps.max()) if gaps.size else 0.0))
    report = LineBlowupReport(rows, bound)
    logger.info(f"📊 quarter-circle blow-ups: worst distance to fitted line {report.worst:.4f}")
    return report
