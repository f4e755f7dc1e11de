#!/usr/bin/env python3
"""
Set Operation Tests
===================

Exact excess / Hausdorff distance, cell sets, blow-ups, AW profiles
and contact classification.
"""

import logging
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from setops import (
    AWProfile, CellSet, Length, PointCloud, aw_profile, blow_up, connected_components,
    contact_report, excess, excess_axiom_failures, hausdorff_distance, local_cut_point_candidates,
)
from workbench_errors import DomainError, EmptyResultError, PreconditionError

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


coords = st.integers(min_value=-20, max_value=20)
clouds = st.builds(
    lambda pts, den: PointCloud(np.array(pts, dtype=np.int64), den),
    st.lists(st.tuples(coords, coords), min_size=1, max_size=8),
    st.integers(min_value=1, max_value=6),
)
shifts = st.tuples(st.fractions(min_value=-5, max_value=5, max_denominator=7),
                   st.fractions(min_value=-5, max_value=5, max_denominator=7))
cell_sets = st.builds(
    lambda cells: CellSet(4, 2, frozenset(cells)),
    st.sets(st.tuples(st.integers(0, 5), st.integers(0, 5)), min_size=1, max_size=20),
)


def test_length_exact_comparisons():
    """Lengths compare exactly against ints and Fractions"""
    logger.info("\n" + "="*60)
    logger.info("🧪 TEST 1: Length comparisons")
    logger.info("="*60)

    five = Length(25)
    assert five == 5
    assert five == Length.of(Fraction(5))
    assert Length(2) < Fraction(3, 2)
    assert not Length(2) < Fraction(7, 5)
    assert Length(25).le_sum(Length(9), Length(16))
    assert not Length(26).le_sum(Length(1), Length(16))
    with pytest.raises(DomainError):
        Length(-1)


def test_excess_known_values():
    """exc(A, B) for small hand-computed clouds"""
    logger.info("\n" + "="*60)
    logger.info("🧪 TEST 2: Excess of small clouds")
    logger.info("="*60)

    A = PointCloud.from_points([(0, 0), (3, 4)])
    B = PointCloud.from_points([(0, 0)])
    assert excess(A, B) == 5
    assert excess(B, A) == 0
    assert hausdorff_distance(A, B) == 5

    half = PointCloud.from_points([("1/2", "1/3")])
    assert excess(half, B).squared == Fraction(1, 4) + Fraction(1, 9)
    logger.info(f"   exc = {excess(half, B)}")


@settings(max_examples=60, deadline=None)
@given(clouds, clouds, clouds)
def test_excess_triangle_inequality(A, B, C):
    """exc(A,B) <= exc(A,C) + exc(C,B) holds exactly"""
    assert excess(A, B).le_sum(excess(A, C), excess(C, B))


@settings(max_examples=60, deadline=None)
@given(clouds, clouds)
def test_excess_zero_on_subsets(A, B):
    assert excess(A, A) == 0
    assert excess(A, A.union(B)) == 0
    assert hausdorff_distance(A, B) == hausdorff_distance(B, A)


@settings(max_examples=60, deadline=None)
@given(clouds, clouds, shifts)
def test_excess_translation_invariant(A, B, v):
    """exc(A+v, B+v) = exc(A, B)"""
    assert excess(A.translate(v), B.translate(v)) == excess(A, B)


@settings(max_examples=60, deadline=None)
@given(clouds, clouds, clouds)
def test_excess_monotone_and_subadditive(A, B, C):
    """Growing B never raises exc(A, B); exc(A ∪ C, B) is the larger of the two parts"""
    assert excess(A, B.union(C)) <= excess(A, B)
    assert excess(A, B) <= excess(A.union(C), B)
    assert excess(A.union(C), B) == max(excess(A, B), excess(C, B))


@settings(max_examples=60, deadline=None)
@given(clouds, clouds, clouds, shifts)
def test_all_excess_axioms_hold(A, B, C, v):
    assert excess_axiom_failures(A, B, C, v) == []


def test_excess_containment_both_ways():
    """exc(A, B) = 0 exactly when A ⊆ B"""
    B = PointCloud.from_points([(0, 0), (1, 2), ("1/2", 3)])
    inside = PointCloud.from_points([("1/2", 3), (0, 0)])
    outside = PointCloud.from_points([(0, 0), (1, "5/2")])
    assert excess(inside, B) == 0
    assert excess(outside, B) == Fraction(1, 2)
    assert excess_axiom_failures(inside, B, outside, (1, "1/3")) == []
    assert excess_axiom_failures(outside, B, inside, (0, 0)) == []


def test_empty_inputs_rejected():
    logger.info("\n" + "="*60)
    logger.info("🧪 TEST 3: Empty sets are a domain error")
    logger.info("="*60)

    with pytest.raises(DomainError):
        PointCloud.from_points([])
    far = PointCloud.from_points([(10, 10)])
    assert far.clip_to_ball(1) is None
    with pytest.raises(DomainError):
        excess(far.clip_to_ball(1), far)


def test_cell_set_point_cloud_and_json():
    """Corners of a 2x1 block; JSON keeps the cells"""
    logger.info("\n" + "="*60)
    logger.info("🧪 TEST 4: Cell sets")
    logger.info("="*60)

    cells = CellSet(4, 1, frozenset({(0, 0), (1, 0)}))
    assert cells.cell_size == Fraction(1, 4)
    cloud = cells.to_point_cloud()
    assert len(cloud) == 6
    assert cloud.resolution == Fraction(1, 4)
    assert cloud.contains_origin()
    assert CellSet.from_dict(cells.to_dict()) == cells

    moved = cells.translate((Fraction(1, 2), 0))
    assert moved.bounding_box() == ((Fraction(1, 2), 0), (1, Fraction(1, 4)))
    with pytest.raises(DomainError):
        cells.union(moved)
    with pytest.raises(EmptyResultError):
        CellSet(4, 1, frozenset()).to_point_cloud()


def test_blow_up_rescales_and_clips():
    logger.info("\n" + "="*60)
    logger.info("🧪 TEST 5: Blow-ups")
    logger.info("="*60)

    cells = CellSet(2, 2, frozenset({(0, 0), (1, 0), (2, 0), (3, 0)}))
    cloud = blow_up(cells, (0, 0), Fraction(1, 4), 1)
    pts = set(cloud.points())
    assert (Fraction(0), Fraction(0)) in pts
    assert (Fraction(1), Fraction(0)) in pts
    assert all(x * x + y * y <= 1 for x, y in pts)
    assert cloud.resolution == 1

    with pytest.raises(DomainError):
        blow_up(cells, (0, 0), 0, 1)
    with pytest.raises(EmptyResultError):
        blow_up(cells, (5, 5), Fraction(1, 4), 1)


def test_aw_profile_needs_origin_and_shrinks():
    """A sequence converging to the x-axis segment"""
    logger.info("\n" + "="*60)
    logger.info("🧪 TEST 6: AW profile")
    logger.info("="*60)

    target = PointCloud.from_points([(Fraction(i, 4), 0) for i in range(-8, 9)])
    sequence = [
        PointCloud.from_points([(Fraction(i, 4), Fraction(1, 2 ** m)) for i in range(-8, 9)] + [(0, 0)])
        for m in range(1, 5)
    ]
    profile = aw_profile(sequence, target, [1, 2])
    assert isinstance(profile, AWProfile)
    forward = [float(row.forward) for row in profile.column(2)]
    assert forward == sorted(forward, reverse=True)
    assert profile.column(1)[-1].forward == Fraction(1, 16)
    assert profile.converged(Fraction(1, 8)) == {Fraction(1): True, Fraction(2): True}

    with pytest.raises(PreconditionError):
        aw_profile([PointCloud.from_points([(1, 1)])], target, [1])


def test_components_and_cut_points():
    """Two squares meeting at a corner: one corner component, one cut point"""
    logger.info("\n" + "="*60)
    logger.info("🧪 TEST 7: Components and corner contacts")
    logger.info("="*60)

    diagonal = CellSet(4, 1, frozenset({(0, 0), (1, 1)}))
    assert len(connected_components(diagonal, "edge")) == 2
    assert len(connected_components(diagonal, "corner")) == 1
    assert local_cut_point_candidates(diagonal) == [(Fraction(1, 4), Fraction(1, 4))]

    report = contact_report(diagonal)
    assert not report.meets_at_edges
    assert report.corner_points() == [(Fraction(1, 4), Fraction(1, 4))]

    bridged = CellSet(4, 1, frozenset({(0, 0), (1, 1), (1, 0)}))
    assert local_cut_point_candidates(bridged) == []
    assert contact_report(bridged).meets_at_edges
    with pytest.raises(DomainError):
        connected_components(bridged, "king")


def _cut_points_by_brute_force(cells):
    """Lattice points whose incident cells fall apart in their edge-adjacency graph"""
    found = []
    corners = {(i + dx, j + dy) for i, j in cells.cells for dx in (0, 1) for dy in (0, 1)}
    for i, j in corners:
        around = [c for c in ((i - 1, j - 1), (i, j - 1), (i - 1, j), (i, j)) if c in cells.cells]
        graph = nx.Graph()
        graph.add_nodes_from(around)
        graph.add_edges_from((a, b) for a in around for b in around
                             if abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1)
        if len(around) >= 2 and nx.number_connected_components(graph) > 1:
            found.append(cells.point((i, j)))
    return sorted(found)


@settings(max_examples=80, deadline=None)
@given(cell_sets)
def test_cut_point_candidates_match_brute_force(cells):
    assert local_cut_point_candidates(cells) == _cut_points_by_brute_force(cells)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
