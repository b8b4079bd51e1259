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

from char_ring import (
    add, agree, divide_exact, divide_exact_series, divide_lines, divisor, finite_weyl_act, lattice_translate,
    make_series, monomial, monomial_series, mul, one, scale, series_from_json, series_to_json, truncate,
)
from affine_weyl import enumerate_finite_weyl
from errors import DomainError, InsufficientTruncation
from lattice_core import parse_type

A1 = parse_type("A1")


def e(weight, energy=0, level=0, coeff=1, truncation=None):
    return monomial_series(level, energy, weight, coeff, truncation)


def test_divide_by_its_own_divisor():
    f = add(e((2,)), e((0,), coeff=-1))
    assert divide_exact(f, (2,)).terms == one(1).terms


def test_constant_is_not_divisible():
    assert divide_exact(one(1), (2,)) is None


def test_a1_antisymmetric_difference():
    f = add(e((2,)), e((-2,), coeff=-1))
    q = divide_exact(f, (2,))
    assert q.terms == add(e((0,)), e((-2,))).terms
    assert mul(q, divisor((2,))).terms == f.terms


def test_zero_divisor_rejected():
    with pytest.raises(DomainError):
        divide_exact(one(1), (0,))


def test_multivariate_division():
    # (e^{a} - 1)(e^{b} + 3) divided by e^{a} - 1 in rank 2
    a, b = (2, -1), (-1, 2)
    f = mul(divisor(a), add(e(b), e((0, 0), coeff=3)))
    q = divide_exact(f, a)
    assert q.terms == add(e(b), e((0, 0), coeff=3)).terms


def test_truncation_propagates_through_products():
    s = add(e((0,), 0, truncation=5), e((2,), 3, truncation=5))
    t = add(e((0,), 1), e((0,), 2))
    prod = mul(s, t)
    assert prod.truncation == 6
    assert all(m.energy <= 6 for m in prod.terms)
    assert truncate(prod, 4).truncation == 4


def test_agree_uses_common_range():
    s = make_series({monomial(0, 0, (0,)): 1, monomial(0, 7, (2,)): 1}, 8)
    t = make_series({monomial(0, 0, (0,)): 1}, 5)
    assert agree(s, t)
    assert not agree(s, make_series({}, 5))


def test_lattice_translate_level_one_monomial():
    # beta u = u e^{beta*} q^{<beta,beta>/2}
    s = lattice_translate(A1, (1,), e((0,), level=1))
    assert s.terms == {monomial(1, 1, (2,)): 1}
    s = lattice_translate(A1, (1,), e((1,), level=0))
    assert s.terms == {monomial(0, 1, (1,)): 1}


def test_translation_is_a_group_action():
    d = parse_type("B2")
    s = add(e((1, 0), level=2), e((0, 1), 1, level=2))
    lhs = lattice_translate(d, (1, 1), lattice_translate(d, (0, -1), s))
    assert lhs.terms == lattice_translate(d, (1, 0), s).terms


def test_finite_weyl_act_reflects_weights():
    s1 = enumerate_finite_weyl(A1)[1]
    assert finite_weyl_act(s1, e((3,), 2)).terms == {monomial(0, 2, (-3,)): 1}


def test_open_line_raises_insufficient_truncation():
    # (q e^{alpha} - 1) cannot be decided from a single term below the truncation
    f = e((0,), 0, truncation=2)
    with pytest.raises(InsufficientTruncation):
        divide_exact_series(f, (2,), energy=1)


def test_affine_divisor_division_of_truncated_series():
    # f = (q e^{alpha} - 1) * (1 + q) truncated at 3
    f = truncate(mul(divisor((2,), 1), add(e((0,)), e((0,), 1))), 3)
    result = divide_lines(f, (2,), 1, through=1)
    assert result.divisible
    assert result.quotient.terms == add(e((0,)), e((0,), 1)).terms


def test_series_json_keeps_rational_energies():
    s = make_series({monomial(1, Fraction(1, 3), (2, -1)): -4}, Fraction(9, 2))
    obj = series_to_json(s)
    assert obj["truncation"] == "9/2"
    assert obj["terms"][0]["q"] == "1/3"
    back = series_from_json(obj)
    assert back.terms == s.terms and back.truncation == s.truncation
    assert scale(s, 0).terms == {}


ALL_TYPES = ["A1", "A2", "A3", "A4", "B2", "B3", "B4", "C2", "C3", "C4", "D3", "D4", "F4", "G2"]


def _random_series(d, rng, size=3):
    terms = []
    for _ in range(size):
        weight = tuple(int(x) for x in rng.integers(-3, 4, d.rank))
        energy = Fraction(int(rng.integers(0, 6)), int(rng.integers(1, 3)))
        terms.append((monomial(int(rng.integers(0, 4)), energy, weight), int(rng.choice([-2, -1, 1, 2]))))
    return make_series(terms)


def _random_beta(d, rng):
    return tuple(int(x) for x in rng.integers(-2, 3, d.rank))


@pytest.mark.parametrize("label", ALL_TYPES)
def test_translation_group_law_on_random_series(label):
    d = parse_type(label)
    rng = np.random.default_rng(31)
    for _ in range(500):
        s = _random_series(d, rng)
        b1, b2 = _random_beta(d, rng), _random_beta(d, rng)
        both = tuple(x + y for x, y in zip(b1, b2))
        assert lattice_translate(d, b1, lattice_translate(d, b2, s)).terms == lattice_translate(d, both, s).terms


@pytest.mark.parametrize("label", ["A1", "A2", "B2", "G2"])
def test_translation_is_a_ring_map(label):
    d = parse_type(label)
    rng = np.random.default_rng(32)
    for _ in range(200):
        s, t = _random_series(d, rng), _random_series(d, rng)
        beta = _random_beta(d, rng)
        lhs = lattice_translate(d, beta, mul(s, t))
        rhs = mul(lattice_translate(d, beta, s), lattice_translate(d, beta, t))
        assert lhs.terms == rhs.terms
