import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

# -------------------------------
# Locate modules
# -------------------------------
PROJECT_ROOT = Path(__file__).resolve().parents[1]
SCRIPTS_DIR = PROJECT_ROOT / "Scripts"
sys.path.insert(0, str(SCRIPTS_DIR))

from affine_weyl import (
    AffineWeylElement, act, affine_identity, affine_inverse, affine_length, affine_multiply, affine_reflection,
    affine_simple, alcove_walls, bruhat_cover_pairs, enumerate_affine_weyl, enumerate_finite_weyl, fold_to_alcove,
    in_alcove, stabilizer_group, translation,
)
from errors import CapacityError, DomainError
from lattice_core import parse_type

F = Fraction


def test_identity_acts_trivially():
    d = parse_type("B2")
    h = (F(1, 3), F(-2, 5))
    assert act(affine_identity(d), h) == h


def test_finite_weyl_orders():
    assert len(enumerate_finite_weyl(parse_type("A2"))) == 6
    assert len(enumerate_finite_weyl(parse_type("C2"))) == 8
    assert len(enumerate_finite_weyl(parse_type("G2"))) == 12
    assert enumerate_finite_weyl(parse_type("A2"))[0].word == ()


def test_fold_a1_examples():
    d = parse_type("A1")
    p, witness = fold_to_alcove(d, (F(7, 10),))
    assert p.point == (F(3, 10),)
    assert p.walls == frozenset()
    assert act(witness, (F(7, 10),)) == p.point

    p, _ = fold_to_alcove(d, (F(0),))
    assert p.walls == frozenset({1})

    p, _ = fold_to_alcove(d, (F(1, 2),))
    assert p.walls == frozenset({0})


@pytest.mark.parametrize("label", ["A2", "B2", "G2"])
def test_fold_lands_in_alcove(label):
    d = parse_type(label)
    for h in [(F(7, 3), F(-5, 4)), (F(-1, 2), F(9, 7)), (F(0), F(0)), (F(3), F(-3))]:
        p, witness = fold_to_alcove(d, h)
        assert in_alcove(d, p.point)
        assert act(witness, h) == p.point
        assert p.walls == alcove_walls(d, p.point)


def test_a2_walls_with_highest_root_tight():
    d = parse_type("A2")
    # alpha_1 = alpha_2 = 1/2 so the highest root takes the value 1
    h = (F(1, 2), F(1, 2))
    assert alcove_walls(d, h) == frozenset({0})
    assert alcove_walls(d, (F(1, 6), F(1, 6))) == frozenset()


def test_group_laws():
    d = parse_type("C2")
    g1 = affine_multiply(d, affine_simple(d, 0), affine_simple(d, 2))
    g2 = affine_multiply(d, translation(d, (1, -1)), affine_simple(d, 1))
    h = (F(2, 7), F(-1, 3))
    assert act(affine_multiply(d, g1, g2), h) == act(g1, act(g2, h))
    assert affine_multiply(d, g1, affine_inverse(d, g1)) == affine_identity(d)


def test_affine_reflection_fixes_its_hyperplane():
    d = parse_type("A2")
    alpha = d.highest_root
    r = affine_reflection(d, alpha, -1)
    # alpha(h) = 1 on this point
    h = (F(1, 2), F(1, 2))
    assert act(r, h) == h
    assert affine_multiply(d, r, r) == affine_identity(d)


def test_stabilizer_orders():
    d = parse_type("A2")
    assert len(stabilizer_group(d, [])) == 1
    assert len(stabilizer_group(d, [0])) == 2
    assert len(stabilizer_group(d, [1, 2])) == 6
    with pytest.raises(DomainError):
        stabilizer_group(d, [0, 1, 2])


def test_affine_length_matches_word_length():
    d = parse_type("B2")
    for word, g in enumerate_affine_weyl(d, 4):
        assert affine_length(d, g) == len(word)


def test_a1_cover_counts():
    d = parse_type("A1")
    pairs = bruhat_cover_pairs(d, 2)
    assert len(pairs) == 6
    assert sum(1 for p in pairs if len(p.w_word) == 2) == 4
    for p in pairs:
        r = affine_reflection(d, p.root, p.m)
        assert affine_multiply(d, r, p.v) == p.w


def test_length_bound_capacity():
    with pytest.raises(CapacityError):
        enumerate_affine_weyl(parse_type("A1"), 13)


def _random_point(d, rng):
    return tuple(F(int(rng.integers(-20, 21)), int(rng.integers(1, 13))) for _ in range(d.rank))


def _random_affine(d, rng, ws):
    beta = tuple(int(x) for x in rng.integers(-3, 4, d.rank))
    return AffineWeylElement(beta, ws[int(rng.integers(len(ws)))])


@pytest.mark.parametrize("label", ["A1", "A2", "C2", "G2"])
def test_fold_is_invariant_and_idempotent(label):
    d = parse_type(label)
    rng = np.random.default_rng(17)
    ws = enumerate_finite_weyl(d)
    for _ in range(1000):
        h = _random_point(d, rng)
        p, witness = fold_to_alcove(d, h)
        assert act(witness, h) == p.point
        assert in_alcove(d, p.point)
        moved, _ = fold_to_alcove(d, act(_random_affine(d, rng, ws), h))
        assert moved == p
        again, _ = fold_to_alcove(d, p.point)
        assert again == p
