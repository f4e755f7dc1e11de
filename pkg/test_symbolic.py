#!/usr/bin/env python3
"""
Symbolic Layer Tests
====================

Alphabets, cylinder mass, the pinned PRF, collar choices and the
(R1)/(R2) occurrence checks.
"""

import hashlib
import logging
from fractions import Fraction

import pytest

from symbolic import (
    Alphabet, ConstantChoice, DepthChoice, Occurrence, PlantSpec, SeededChoice, ShiftedChoice,
    TableChoice, check_R1R2, choice_from_dict, collar_choice, cylinder_mass, find_ell, patch_size,
    plant_R1R2, sample_choice,
)
from workbench_errors import BudgetExceededError, DomainError, PreconditionError

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

N4 = Alphabet(4)
MIDDLE = 13


def test_alphabet_and_mass():
    logger.info("\n" + "="*60)
    logger.info("🧪 TEST 1: Alphabet A_4 and cylinder mass")
    logger.info("="*60)

    assert N4.size == 14
    assert N4.ring_size == 12
    assert not N4.is_interior(12)
    assert N4.is_interior(MIDDLE)
    assert N4.count(2) == 196
    assert cylinder_mass(N4, (1, 2)) == Fraction(1, 196)
    assert cylinder_mass(N4, ()) == 1
    with pytest.raises(DomainError):
        Alphabet(5)
    with pytest.raises(DomainError):
        N4.validate_word((0, 3))


def test_prf_layout_is_pinned():
    """Value = 1 + low bit of the first digest byte"""
    logger.info("\n" + "="*60)
    logger.info("🧪 TEST 2: Seeded choice PRF")
    logger.info("="*60)

    eta = SeededChoice(N4, 42)
    header = b"ftl-choice-v1" + (42).to_bytes(8, 'big') + (4).to_bytes(2, 'big')
    for word in [(), (1,), (13, 2), (14, 14, 14)]:
        payload = b"".join(letter.to_bytes(2, 'big') for letter in word)
        expected = 1 + (hashlib.sha256(header + payload).digest()[0] & 1)
        assert eta(word) == expected

    values = {eta(w) for w in N4.words(2)}
    assert values == {1, 2}
    rebuilt = choice_from_dict(eta.to_dict())
    assert all(rebuilt(w) == eta(w) for w in N4.words(2))
    sampled = sample_choice(N4, 42)
    assert all(sampled(w) == eta(w) for w in N4.words(2))
    with pytest.raises(DomainError):
        SeededChoice(N4, -1)


def test_simple_choice_functions():
    assert DepthChoice(2)((1,)) == 1
    assert DepthChoice(2)((1, 1)) == 2
    table = TableChoice({(3,): 1})
    assert table((3,)) == 1 and table((4,)) == 2
    assert ShiftedChoice(table, (3,))(()) == 1
    with pytest.raises(DomainError):
        ConstantChoice(3)


def test_collar_choice_values():
    """Model 1 exactly on the k levels under the block"""
    logger.info("\n" + "="*60)
    logger.info("🧪 TEST 3: Collar choice")
    logger.info("="*60)

    eta = collar_choice(2, 1, (MIDDLE, MIDDLE))
    assert eta(()) == 2
    assert eta((MIDDLE,)) == 2
    assert eta((MIDDLE, MIDDLE)) == 1
    assert eta((MIDDLE, 1)) == 2
    assert eta((MIDDLE, MIDDLE, 1)) == 2
    with pytest.raises(DomainError):
        collar_choice(2, 1, (MIDDLE,))


def test_check_R1R2_exhaustive():
    """k = 0 forces model 2 on the whole window"""
    logger.info("\n" + "="*60)
    logger.info("🧪 TEST 4: Exhaustive (R1)/(R2)")
    logger.info("="*60)

    prefix = (MIDDLE, MIDDLE, MIDDLE)
    verdict = check_R1R2(ConstantChoice(2), N4, prefix, N=1, k=0, ell=1)
    assert verdict.ok
    assert verdict.words_checked == patch_size(N4, 1, 0) == 15

    failing = check_R1R2(ConstantChoice(1), N4, prefix, N=1, k=0, ell=1)
    assert not failing.ok
    assert failing.witness == ()

    ring = check_R1R2(ConstantChoice(2), N4, (1, MIDDLE, MIDDLE), N=1, k=0, ell=1)
    assert not ring.ok
    assert ring.witness == (1,)
    assert ring.method == "collar"

    with pytest.raises(PreconditionError):
        check_R1R2(ConstantChoice(2), N4, prefix, N=2, k=0, ell=1)
    with pytest.raises(BudgetExceededError):
        check_R1R2(ConstantChoice(2), N4, (MIDDLE,) * 10, N=3, k=1, ell=3, budget=10)


def test_find_ell_skips_ring_collar():
    assert find_ell(ConstantChoice(2), N4, (1, MIDDLE, MIDDLE, MIDDLE), 1, 0, 3) == 2
    assert find_ell(ConstantChoice(1), N4, (MIDDLE,) * 4, 1, 0, 3) is None


def test_planted_occurrences():
    """Planted windows satisfy (R1) both by certificate and by enumeration"""
    logger.info("\n" + "="*60)
    logger.info("🧪 TEST 5: Planting (R1)/(R2)")
    logger.info("="*60)

    prefix = (MIDDLE,) * 12
    spec = PlantSpec(prefix, (Occurrence(2, 1, 1), Occurrence(7, 2, 1)))
    eta = plant_R1R2(N4, 3, spec)

    first = check_R1R2(eta, N4, prefix, N=1, k=1, ell=2)
    assert first.ok and first.words_checked == 0
    assert first.method == "certificate"
    assert first.to_dict()["method"] == "certificate"
    enumerated = check_R1R2(ShiftedChoice(eta, ()), N4, prefix, N=1, k=1, ell=2)
    assert enumerated.ok and enumerated.method == "enumeration"
    assert enumerated.words_checked == patch_size(N4, 1, 1) == 211
    assert check_R1R2(eta, N4, prefix, N=2, k=1, ell=7).ok

    rebuilt = choice_from_dict(eta.to_dict())
    assert rebuilt(prefix[:2]) == eta(prefix[:2]) == 1
    assert PlantSpec.from_dict(spec.to_dict()) == spec


def test_overlapping_plants_rejected():
    prefix = (MIDDLE,) * 8
    with pytest.raises(PreconditionError):
        plant_R1R2(N4, 0, PlantSpec(prefix, (Occurrence(2, 1, 0), Occurrence(3, 1, 0))))
    with pytest.raises(PreconditionError):
        plant_R1R2(N4, 0, PlantSpec((1,) + prefix, (Occurrence(1, 1, 0),)))


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
