#!/usr/bin/env python3
"""
Universal Curve Tests
=====================

Lattice approximations X_j, grid graphs in 𝒢_k, the scale cascade,
the assembled curve H and recovery of targets from rescalings of H.
"""

import logging
from fractions import Fraction

import numpy as np
import pytest

from universal_curve import (
    GridGraph, HCurve, approximate, assemble_H, boundary_ring,
    build_cascade, cascade_scales, complete_to_graph, named_target, recovery_cascade,
    line_target, point_target, ray_target, union_target, verify_recovery,
)
from workbench_errors import BudgetExceededError, DomainError, PreconditionError

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


def test_cascade_scales_first_level():
    """r_1 = min(1/(4·4), 1/2^3) = 1/16"""
    scales = cascade_scales([4], [1], next_level=1)
    assert scales == [Fraction(1), Fraction(1, 16)]
    with pytest.raises(DomainError):
        cascade_scales([0], [1])
    with pytest.raises(DomainError):
        cascade_scales([1, 2], [1])


def test_boundary_ring_counts():
    assert boundary_ring(2, 2).shape == (16, 2)
    assert boundary_ring(1, 3).shape == (26, 3)


def test_line_approximation_reaches_boundary():
    logger.info("\n" + "="*60)
    logger.info("🧪 TEST 1: X_j of a line")
    logger.info("="*60)

    approx = approximate(named_target("line"), 2)
    assert approx.half_width == 15
    assert (approx.vertices == 0).all(axis=1).any()
    check = approx.boundary_check()
    assert check.ok
    assert check.components == 1


def test_point_line_fails_boundary_check():
    """{0} ∪ {x = 10}: the origin component never reaches ∂[-4, 4]^2 at j = 2"""
    logger.info("\n" + "="*60)
    logger.info("🧪 TEST 2: Boundary check failure")
    logger.info("="*60)

    approx = approximate(named_target("point-line"), 2)
    check = approx.boundary_check()
    assert not check.ok
    assert check.failing
    with pytest.raises(PreconditionError):
        complete_to_graph(approx)


def test_approximation_preconditions():
    with pytest.raises(DomainError):
        approximate(named_target("line"), 0)
    with pytest.raises(BudgetExceededError):
        approximate(named_target("line"), 4, budget=1000)
    with pytest.raises(PreconditionError):
        approximate(union_target([line_target((1, 0), (0, 1))], "shifted"), 2)
    with pytest.raises(DomainError):
        named_target("spiral")


def test_completed_graph_is_in_Gk():
    logger.info("\n" + "="*60)
    logger.info("🧪 TEST 3: Completion to 𝒢_2j")
    logger.info("="*60)

    graph = complete_to_graph(approximate(named_target("cross"), 2))
    assert graph.k == 4
    assert graph.membership_failures() == []
    assert graph.length <= graph.length_bound
    again = complete_to_graph(approximate(named_target("cross"), 2))
    assert graph.content_hash() == again.content_hash()

    lonely = GridGraph.from_vertices(1, np.array([[0, 0], [2, 2]]))
    assert "not connected" in lonely.membership_failures()


def test_three_dimensional_cross():
    approx = approximate(named_target("cross", 3), 1)
    assert approx.dimension == 3
    assert approx.boundary_check().ok


def test_cascade_and_H_assembly():
    """Two levels glue into one connected curve of length <= 1"""
    logger.info("\n" + "="*60)
    logger.info("🧪 TEST 4: Cascade and H")
    logger.info("="*60)

    cascade, positions = recovery_cascade(named_target("line"), [2, 3])
    assert positions == {2: 1, 3: 2}
    assert cascade.levels == [4, 6]
    assert cascade.total_length <= 1
    assert cascade.scale_certificate(1, 2)

    curve = assemble_H(cascade, 2)
    assert curve.components == 1
    assert curve.length <= 1
    assert curve.levels[0].clipped and not curve.levels[1].clipped
    assert curve.segments_float().shape[1:] == (2, 2)
    with pytest.raises(DomainError):
        assemble_H(cascade, 3)
    with pytest.raises(DomainError):
        build_cascade([])


@pytest.mark.parametrize("name", ["line", "cross"])
def test_recovery_of_targets(name):
    """ρ_j H ∩ B̄(0, 2) is close to T for every applicable j"""
    logger.info("\n" + "="*60)
    logger.info(f"🧪 TEST 5: Recovery of {name}")
    logger.info("="*60)

    target = named_target(name)
    cascade, positions = recovery_cascade(target, [2, 3])
    for j in (2, 3):
        report = verify_recovery(target, cascade, positions[j], j, 2)
        assert report.applicable
        assert report.passed, report.to_dict()

    skipped = verify_recovery(target, cascade, positions[2], 2, 3)
    assert skipped.passed is None
    with pytest.raises(PreconditionError):
        verify_recovery(target, cascade, positions[2], 3, 2)


def test_recovery_reads_the_assembled_curve():
    """Dropping the matching level from H fails the check even though G_{n_j} alone still passes"""
    target = named_target("cross")
    cascade, positions = recovery_cascade(target, [2, 3])
    curve = assemble_H(cascade, 2)
    report = verify_recovery(target, cascade, positions[2], 2, 2, curve=curve)
    assert report.passed
    assert report.to_dict()["exc_T_H"] == report.backward

    broken = HCurve([curve.levels[1]], 1)
    report = verify_recovery(target, cascade, positions[2], 2, 2, curve=broken)
    assert report.level_backward <= report.bound
    assert report.backward > report.bound
    assert report.passed is False


def test_point_target_pieces():
    target = union_target([point_target((0, 0)), line_target((0, 1))], "axis")
    assert target.contains_origin()
    cloud = target.sample(2, 4)
    assert cloud.contains_origin()


def test_target_builders_compose_named_targets():
    quarter = union_target([ray_target((1, 0)), ray_target((0, 1))], "quarter")
    assert quarter.to_dict() == named_target("quarter").to_dict()
    cross = union_target([line_target((1, 0)), line_target((0, 1))], "cross")
    assert cross.to_dict() == named_target("cross").to_dict()


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
