#!/usr/bin/env python3
"""
Dendrite Parametrization Tests
==============================

Model dendrites, T_m, tours and templates, the nested interval
families and the limit parametrization F.
"""

import logging
import math
from fractions import Fraction

import pytest

from carpet import approx_cells
from dendrite_param import (
    ParametrizationBuilder, build_model_dendrite, build_Tm, build_tour, cauchy_gap,
    check_overlap_degeneracy, check_properties, classify_edges, eval_F, holder_constant,
    model_leaves, subdivide, surjectivity_check,
)
from symbolic import Alphabet, ConstantChoice, SeededChoice
from workbench_errors import BudgetExceededError, DomainError

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


@pytest.mark.parametrize("n", [4, 6])
@pytest.mark.parametrize("model", [1, 2])
def test_model_dendrite_is_tree_on_cell_corners(n, model):
    logger.info("\n" + "="*60)
    logger.info(f"🧪 TEST 1: T^{model} for n={n}")
    logger.info("="*60)

    graph = build_model_dendrite(n, model)
    assert graph.vertices.shape[0] == 5 * n - 6
    assert graph.edges.shape[0] == 5 * n - 7
    assert set(graph.leaves()) == set(model_leaves(n, model).values())


def test_Tm_edges_carry_unique_labels():
    """T_2 for a random choice: a tree on all 196 depth-2 corners"""
    logger.info("\n" + "="*60)
    logger.info("🧪 TEST 2: T_m and edge labels")
    logger.info("="*60)

    eta = SeededChoice(Alphabet(4), 5)
    tree = build_Tm(eta, 4, 2)
    assert tree.vertices.shape[0] == 196
    labels = classify_edges(tree)
    assert len(labels) == 195
    assert {side for _, side in labels.values()} == {'b', 'l'}
    with pytest.raises(BudgetExceededError):
        build_Tm(eta, 4, 3, budget=100)


@pytest.mark.parametrize("model", [1, 2])
def test_tours_order_marks(model):
    """τ̃ visits leaf_top < s_U < leaf_bump < t < leaf_middle < s_L < leaf_right"""
    plain = build_tour(6, model)
    assert 0 < plain.t < 1
    extended = build_tour(6, model, extended=True)
    p = extended.parameters()
    chain = [p["leaf_top"], p["s_U"], p["leaf_bump"], p["t"], p["leaf_middle"], p["s_L"], p["leaf_right"]]
    assert chain == sorted(chain)
    assert extended.to_dict()["extended"] is True


def test_parametrization_properties_hold():
    """P1-P7 at every built stage for a few random choices"""
    logger.info("\n" + "="*60)
    logger.info("🧪 TEST 3: Interval families")
    logger.info("="*60)

    for seed in (1, 2, 3):
        eta = SeededChoice(Alphabet(4), seed)
        param = ParametrizationBuilder(eta, 4).build(2)
        assert param.total_mass == 14 ** 3
        for m in range(3):
            violations = check_properties(param, m)
            assert violations == [], [v.to_dict() for v in violations]
        counts = param.stage(2).counts()
        logger.info(f"   seed {seed}: stage 2 counts {counts}")
        assert counts["N"] == 196
        assert check_overlap_degeneracy(param, 1).ok
        again = subdivide(param.stage(1), eta, 4)
        assert again.starts == param.stage(2).starts
        assert again.kinds == param.stage(2).kinds


def test_F_starts_at_origin_and_converges():
    eta = ConstantChoice(2)
    param = ParametrizationBuilder(eta, 4).build(3)
    assert param.F(0) == (0, 0)
    for m in range(2):
        assert cauchy_gap(param, m) <= 2 * math.sqrt(2) * 4 ** (-m) + 1e-12
    point, error = eval_F(eta, 4, 3, Fraction(13, 64), param)
    assert point == param.F(Fraction(13, 64))
    assert error == pytest.approx(math.sqrt(2) / 64)
    with pytest.raises(DomainError):
        eval_F(eta, 4, 3, Fraction(3, 2), param)
    with pytest.raises(DomainError):
        param.stage(7)


def test_surjectivity_and_holder():
    """F meets every depth-2 cell; sampled Hölder constant below √2 n³"""
    logger.info("\n" + "="*60)
    logger.info("🧪 TEST 4: Surjectivity and Hölder constant")
    logger.info("="*60)

    eta = SeededChoice(Alphabet(4), 9)
    param = ParametrizationBuilder(eta, 4).build(2)
    report = surjectivity_check(param, approx_cells(eta, 4, 2))
    assert report.ok
    assert report.hit == report.cells == 196

    holder = holder_constant(eta, 4, 2, 300, seed=4, param=param)
    logger.info(f"   Hölder constant {holder.constant:.3f} vs {holder.bound:.1f}")
    assert holder.pairs > 0
    assert holder.ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
