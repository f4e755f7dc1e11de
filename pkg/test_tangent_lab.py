#!/usr/bin/env python3
"""
Tangent Lab Tests
=================

Cut-point counts of K^{n,k}, contact classification, limit models,
planted blow-ups, stopping-word covers, sponge faces and the
smooth-curve blow-up check.
"""

import logging
from fractions import Fraction

import pytest

from carpet import ModelSystem, code_point, middle_letters
from symbolic import Alphabet, ConstantChoice, Occurrence, PlantSpec, plant_R1R2
from tangent_lab import (
    Sponge, ball_cover, blowup_pipeline, build_Knk, count_local_cut_points, cut_point_formula,
    knk_recursion_holds, limit_model, line_blowup_check, meet_at_edges, observed_offsets,
    sponge_contacts, sponge_face_intersection, stopping_words,
)
from workbench_errors import DomainError, InvariantViolation, PreconditionError

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

MIDDLE = middle_letters(4)[0]


def test_cut_point_formula_values():
    assert [cut_point_formula(4, k) for k in range(4)] == [0, 1, 15, 211]
    assert cut_point_formula(6, 2) == 25
    assert cut_point_formula(6, 3) == 601


@pytest.mark.parametrize("n,k", [(4, 0), (4, 1), (4, 2), (4, 3), (6, 1), (6, 2)])
def test_counted_cut_points_match_formula(n, k):
    logger.info("\n" + "="*60)
    logger.info(f"🧪 TEST 1: Local cut points of K^{{{n},{k}}}")
    logger.info("="*60)

    assert count_local_cut_points(n, k) == cut_point_formula(n, k)


def test_knk_recursion():
    assert len(build_Knk(4, 1, 0)) == 14
    assert set(build_Knk(4, 0, 1).cells) == set(ModelSystem.build(4, 2).cells().cells)
    with pytest.raises(DomainError):
        build_Knk(4, -1, 1)
    assert knk_recursion_holds(4, 1)
    assert knk_recursion_holds(4, 2)
    with pytest.raises(DomainError):
        knk_recursion_holds(4, 0)


def test_meet_at_edges_for_model_maps():
    """Model 2 squares meet along edges; model 1 adds the one corner (1/2, 2/n)"""
    logger.info("\n" + "="*60)
    logger.info("🧪 TEST 2: Contacts of the model maps")
    logger.info("="*60)

    for n in (4, 6):
        assert meet_at_edges(ModelSystem.build(n, 2).maps, n, model=2).meets_at_edges
        report = meet_at_edges(ModelSystem.build(n, 1).maps, n, model=1)
        assert report.corner_points() == [(Fraction(1, 2), Fraction(2, n))]

    maps = ModelSystem.build(4, 2).maps
    with pytest.raises(InvariantViolation):
        meet_at_edges([maps[0], maps[0]])
    with pytest.raises(InvariantViolation):
        meet_at_edges(ModelSystem.build(4, 1).maps, 4, model=2)


def test_limit_model_cut_points():
    """L_1 keeps exactly one local cut point, inside the K^{n,1} square"""
    logger.info("\n" + "="*60)
    logger.info("🧪 TEST 3: Limit models")
    logger.info("="*60)

    offsets = observed_offsets(4, 3, (MIDDLE,) * 3, 2)
    assert offsets
    assert (0, 0) not in offsets
    model = limit_model(4, 1, 2, offsets)
    logger.info(f"   offsets {offsets}, cut points {model.cut_points}")
    assert model.ok
    assert len(model.cut_points) == 1

    with pytest.raises(InvariantViolation):
        limit_model(4, 1, 2, [(1, 0), (1, 0)])
    with pytest.raises(InvariantViolation):
        limit_model(4, 1, 2, [(0, 0)])


def test_limit_model_raises_on_count_mismatch(monkeypatch):
    offsets = observed_offsets(4, 3, (MIDDLE,) * 3, 2)
    monkeypatch.setattr("tangent_lab.cut_point_formula", lambda n, k: 2)
    with pytest.raises(InvariantViolation) as info:
        limit_model(4, 1, 2, offsets)
    assert info.value.prop == "limit-model"


def _planted(N, k, tail=4):
    ell = N + 1
    prefix = (MIDDLE,) * (ell + 2 * N + k + tail)
    spec = PlantSpec(prefix, (Occurrence(ell, N, k),))
    return plant_R1R2(Alphabet(4), 5, spec), prefix, ell


def test_blowup_pipeline_planted():
    """Planted N=2, k=1: gap, window and margin bounds all hold"""
    logger.info("\n" + "="*60)
    logger.info("🧪 TEST 4: Planted blow-up")
    logger.info("="*60)

    eta, prefix, ell = _planted(2, 1)
    report = blowup_pipeline(eta, 4, prefix, k=1, N=2, ell=ell, radii=(1, 2))
    logger.info(f"   gap {float(report.gap):.4g}, window {float(report.window_distance):.4g}")
    assert report.ok
    assert report.gap <= report.gap_bound
    assert report.margin >= report.margin_bound
    assert len(report.profile.column(1)) == 1
    assert report.final_excess(2) >= 0
    assert report.to_dict()["checks"] == {"gap": True, "window": True, "margin": True}
    assert report.r1r2_method == "certificate"


@pytest.mark.parametrize("N,k", [(3, 0), (3, 1), (4, 1)])
def test_blowup_pipeline_acceptance_pairs(N, k):
    """The pairs verify-all plants, at window depth N + k"""
    logger.info("\n" + "="*60)
    logger.info(f"🧪 TEST 5: Planted blow-up N={N} k={k}")
    logger.info("="*60)

    eta, prefix, ell = _planted(N, k)
    report = blowup_pipeline(eta, 4, prefix, k=k, N=N, ell=ell, radii=(1, 2), extra_depth=0)
    assert report.gap <= report.gap_bound
    assert report.window_distance <= report.window_bound
    assert report.ok


def test_blowup_pipeline_preconditions():
    eta, prefix, ell = _planted(2, 1)
    with pytest.raises(PreconditionError):
        blowup_pipeline(eta, 4, prefix, k=1, N=2, ell=ell, radii=(4,))
    with pytest.raises(PreconditionError):
        blowup_pipeline(ConstantChoice(1), 4, prefix, k=1, N=2)


def test_stopping_words_known_family():
    """Ratios (1/2, 1/4) at δ = 1/4"""
    logger.info("\n" + "="*60)
    logger.info("🧪 TEST 5: Stopping words")
    logger.info("="*60)

    family = stopping_words([Fraction(1, 2), Fraction(1, 4)], Fraction(1, 4))
    assert family.words == [(1, 1, 1), (1, 1, 2), (1, 2), (2, 1), (2, 2)]
    assert family.is_prefix_free()
    assert family.is_complete()
    assert family.scales_in_range()

    assert stopping_words([Fraction(1, 2)], 1).words == [()]
    with pytest.raises(DomainError):
        stopping_words([Fraction(1, 2)], 0)
    with pytest.raises(DomainError):
        stopping_words([Fraction(3, 2)], Fraction(1, 2))


@pytest.mark.parametrize("word,r", [((MIDDLE, MIDDLE), Fraction(1, 8)), ((1, 1), Fraction(1, 20)),
                                    ((5, 9, 14), Fraction(1, 5))])
def test_ball_cover(word, r):
    eta = ConstantChoice(2)
    x = code_point(eta, 4, word).point
    cover = ball_cover(eta, 4, x, r)
    logger.info(f"   x={x} r={r}: {cover.card} words, bound {cover.card_bound:.0f}")
    assert cover.inner_ok
    assert cover.outer_ok
    assert cover.ok


def test_sponge_faces():
    logger.info("\n" + "="*60)
    logger.info("🧪 TEST 6: Sponge faces")
    logger.info("="*60)

    sponge = Sponge.from_model(4, 2)
    edge = sponge_face_intersection(sponge, (1, 2))
    assert edge.factors == ('1', '[0,1]')
    assert edge.dimension == 1
    assert sponge_face_intersection(sponge, (1, 13)) is None
    assert all(face.dimension >= 0 for _, face in sponge_contacts(sponge).faces)

    cube = Sponge(3, ((0, 0, 0), (1, 0, 0), (1, 1, 1)))
    vertex = sponge_face_intersection(cube, (1, 3))
    assert vertex.factors == ('1', '1', '1')
    assert str(vertex) == "1 x 1 x 1"
    with pytest.raises(DomainError):
        Sponge(2, ((0, 0), (2, 0)))
    with pytest.raises(DomainError):
        sponge_face_intersection(sponge, (0, 1))


def test_quarter_circle_blows_up_to_lines():
    report = line_blowup_check(centres=4, exponents=range(4, 7), samples=2 ** 12)
    assert len(report.rows) == 12
    assert report.ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
