#!/usr/bin/env python3
"""
Carpet Tests
============

Model layouts, the layout constraints, exact cell approximations,
coding and the Ahlfors ratio sampler.
"""

import logging
import math
from fractions import Fraction

import numpy as np
import pytest

from carpet import (
    AhlforsSample, Similarity, ahlfors_ratio, alpha, approx_cells, cell_relation, cells_near, code_point,
    compose_phi, corner_of, injective_prefix_check, letter_at, middle_letters, model_map, model_offsets,
    moran_residual, ring_cell, verify_model_constraints,
)
from symbolic import Alphabet, ConstantChoice, SeededChoice
from workbench_errors import BudgetExceededError, DomainError, PreconditionError

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


@pytest.mark.parametrize("n", [4, 6, 8])
def test_layout_constraints_hold(n):
    logger.info("\n" + "="*60)
    logger.info(f"🧪 TEST 1: Layout constraints n={n}")
    logger.info("="*60)

    results = verify_model_constraints(n)
    for r in results:
        logger.info(f"   {'✅' if r.ok else '❌'} {r.name}: {r.detail}")
    assert [r.name for r in results] == ["C1", "C2", "C3", "C4", "C5", "C6", "C7"]
    assert all(r.ok for r in results)


def test_model_offsets_layout():
    """Ring order is counter-clockwise from the origin; letter 13 sits at (2, 1) for n = 4"""
    assert ring_cell(4, 1) == (0, 0)
    assert ring_cell(4, 4) == (3, 0)
    assert ring_cell(4, 7) == (3, 3)
    assert ring_cell(4, 12) == (0, 1)
    assert model_offsets(4, 1).shape == (14, 2)
    assert letter_at(4, 2)[(2, 1)] == 13
    assert list(middle_letters(6)) == [21, 22]
    with pytest.raises(DomainError):
        model_offsets(5, 1)


def test_model_map_places_letters():
    psi = model_map(4, 2, 13)
    assert psi((0, 0)) == (Fraction(1, 2), Fraction(1, 4))
    assert psi((1, 1)) == (Fraction(3, 4), Fraction(1, 2))
    with pytest.raises(DomainError):
        model_map(4, 2, 15)


def test_similarity_compose_and_inverse():
    swap = Similarity(Fraction(1, 2), (Fraction(1), Fraction(0)), ((1, 1), (0, -1)))
    assert swap((2, 4)) == (Fraction(3), Fraction(-1))
    ident = swap.inverse().compose(swap)
    assert ident((Fraction(5, 7), Fraction(-3))) == (Fraction(5, 7), Fraction(-3))
    with pytest.raises(DomainError):
        Similarity(0, (0, 0))


def test_approx_cells_constant_model():
    """Depth-2 model-2 carpet: 196 distinct cells covering the boundary"""
    logger.info("\n" + "="*60)
    logger.info("🧪 TEST 2: Depth-2 approximation")
    logger.info("="*60)

    approx = approx_cells(ConstantChoice(2), 4, 2)
    assert len(approx) == 196
    assert approx.boundary_covered()
    approx.check_osc()
    assert approx.word_at((0, 0)) == (1, 1)
    assert len(approx_cells(ConstantChoice(1), 4, 0)) == 1
    with pytest.raises(BudgetExceededError):
        approx_cells(ConstantChoice(2), 4, 3, budget=100)


def test_corner_matches_composed_maps():
    eta = SeededChoice(Alphabet(4), 7)
    rng = np.random.default_rng(0)
    for _ in range(20):
        word = tuple(int(v) for v in rng.integers(1, 15, size=4))
        corner = corner_of(eta, 4, word)
        origin = compose_phi(eta, 4, word)((0, 0))
        assert tuple(c * 4 ** 4 for c in origin) == corner


def test_cells_near_is_exact_subset():
    """Pruned descent returns exactly the full-depth cells meeting the ball"""
    logger.info("\n" + "="*60)
    logger.info("🧪 TEST 3: Cells near a point")
    logger.info("="*60)

    eta = SeededChoice(Alphabet(4), 3)
    full = approx_cells(eta, 4, 3)
    centre = (Fraction(1, 2), Fraction(1, 3))
    radius = Fraction(1, 8)
    near = cells_near(eta, 4, centre, radius, 3)
    assert near.partial
    h = Fraction(1, 64)
    expected = set()
    for a, b in full.corners.tolist():
        dx = max(0, a * h - centre[0], centre[0] - (a + 1) * h)
        dy = max(0, b * h - centre[1], centre[1] - (b + 1) * h)
        if dx * dx + dy * dy <= radius * radius:
            expected.add((a, b))
    assert set(map(tuple, near.corners.tolist())) == expected
    assert all(near.word(i) == full.word_at(tuple(c)) for i, c in enumerate(near.corners.tolist()))


def test_cell_relations_and_coding():
    eta = ConstantChoice(2)
    for v in range(1, 15):
        assert cell_relation(eta, 4, (1,), (v,)).bound_ok
    assert cell_relation(eta, 4, (1,), (2,)).intersecting
    assert not cell_relation(eta, 4, (1,), (13,)).intersecting

    point = code_point(eta, 4, (13,))
    assert point.point == (Fraction(1, 2), Fraction(1, 4))
    assert point.error_radius.squared == Fraction(2, 16)
    assert all(ok for _, ok in injective_prefix_check(eta, 4, (13, 13, 14)))
    with pytest.raises(DomainError):
        code_point(eta, 4, ())


def test_dimension_and_ahlfors_ratio():
    """n^α = 5n-6 and sampled ratios fall inside the constants"""
    logger.info("\n" + "="*60)
    logger.info("🧪 TEST 4: Dimension and Ahlfors ratio")
    logger.info("="*60)

    assert math.isclose(alpha(4), math.log(14) / math.log(4))
    assert moran_residual(6) < 1e-12

    eta = SeededChoice(Alphabet(4), 11)
    approx = approx_cells(eta, 4, 4)
    for word, r in [((13, 13, 13, 13), Fraction(1, 5)), ((1, 1, 1, 1), Fraction(1, 16)),
                    ((7, 14, 2, 9), Fraction(1, 9))]:
        x = code_point(eta, 4, word).point
        sample = ahlfors_ratio(eta, 4, x, r, 4, approx)
        logger.info(f"   x={x} r={r} ratio={sample.ratio:.4f}")
        assert sample.within_bounds
    with pytest.raises(DomainError):
        ahlfors_ratio(eta, 4, (0, 0), Fraction(1, 4), 4, approx)


def test_ahlfors_slack_on_both_sides():
    def sample(ratio):
        return AhlforsSample((0, 0), Fraction(1, 8), Fraction(0), ratio, 1.0, 2.0, 1.25)

    assert sample(0.9).within_bounds
    assert sample(2.4).within_bounds
    assert not sample(0.7).within_bounds
    assert not sample(2.6).within_bounds


def test_ahlfors_ratio_needs_a_carpet_point():
    eta = SeededChoice(Alphabet(4), 11)
    approx = approx_cells(eta, 4, 3)
    with pytest.raises(PreconditionError):
        ahlfors_ratio(eta, 4, (2, 2), Fraction(1, 8), 3, approx)
    with pytest.raises(DomainError):
        ahlfors_ratio(eta, 4, code_point(eta, 4, (13, 13, 13)).point, Fraction(1, 8), 4, approx)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
