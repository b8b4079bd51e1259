import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

import pytest

# -------------------------------
# Locate modules
# -------------------------------
PROJECT_ROOT = Path(__file__).resolve().parents[1]
SCRIPTS_DIR = PROJECT_ROOT / "Scripts"
sys.path.insert(0, str(SCRIPTS_DIR))

from affine_weyl import bruhat_cover_pairs, enumerate_affine_weyl, enumerate_finite_weyl
from char_ring import finite_weyl_act, monomial
from errors import DomainError
from lattice_core import parse_type
from theta import (
    LevelKCharacter, antisymmetrize, check_cover_divisibility, check_lattice_invariance, enumerate_level_k,
    euler_theta_class, euler_theta_class_affine, factorization_witness, invariant_theta_rank, lattice_shells,
    theta_lambda, weyl_invariantize,
)

A1 = parse_type("A1")


def test_a1_level_one_vacuum_theta():
    th = theta_lambda(A1, LevelKCharacter((0,), 1), 9)
    expected = {monomial(1, m * m, (2 * m,)): 1 for m in range(-3, 4)}
    assert th.terms == expected
    assert th.truncation == 9


def test_a1_level_one_fundamental_theta():
    th = theta_lambda(A1, LevelKCharacter((1,), 1), 12)
    expected = {monomial(1, m * m + m, (2 * m + 1,)): 1 for m in range(-4, 4)}
    assert th.terms == expected
    lowest = [m for m in th.terms if m.energy == 0]
    assert sorted(m.weight for m in lowest) == [(-1,), (1,)]


def test_energy_offset_shifts_every_term():
    th = theta_lambda(A1, LevelKCharacter((0,), 1, Fraction(1, 2)), Fraction(9, 2))
    assert min(m.energy for m in th.terms) == Fraction(1, 2)
    assert len(th.terms) == 5


def test_level_must_be_positive():
    with pytest.raises(DomainError):
        LevelKCharacter((0,), 0)


@pytest.mark.parametrize("label,k,count", [("A1", 2, 3), ("A1", 0, 1), ("A2", 1, 3), ("C2", 1, 3), ("G2", 2, 4)])
def test_level_k_weight_counts(label, k, count):
    assert len(enumerate_level_k(parse_type(label), k)) == count


def test_level_k_weights_a1():
    assert enumerate_level_k(A1, 2) == [(0,), (1,), (2,)]
    assert enumerate_level_k(parse_type("A2"), 1) == [(0, 0), (0, 1), (1, 0)]


@pytest.mark.parametrize("label,lam,k", [("A1", (1,), 3), ("A2", (1, 0), 2), ("B2", (0, 1), 1)])
def test_lattice_invariance(label, lam, k):
    d = parse_type(label)
    character = LevelKCharacter(lam, k)
    for beta in lattice_shells(d, 2):
        assert check_lattice_invariance(d, character, beta, 8)


def test_weyl_symmetrization():
    d = parse_type("A2")
    th = theta_lambda(d, LevelKCharacter((1, 0), 2), 6)
    sym = weyl_invariantize(d, th)
    anti = antisymmetrize(d, th)
    for w in enumerate_finite_weyl(d):
        assert finite_weyl_act(w, sym).terms == sym.terms
        flipped = finite_weyl_act(w, anti).terms
        assert flipped == {m: w.sign * c for m, c in anti.terms.items()}


@pytest.mark.parametrize("label,k", [("A1", 2), ("A2", 1), ("C2", 1)])
def test_invariant_theta_rank_counts_weights(label, k):
    d = parse_type(label)
    assert invariant_theta_rank(d, k, 10) == len(enumerate_level_k(d, k))


def test_euler_theta_class_components():
    d = parse_type("B2")
    cls = euler_theta_class(d, LevelKCharacter((0, 0), 1), 4)
    assert len(cls.components) == 8


def test_a1_cover_divisibility_passes():
    lam = LevelKCharacter((0,), 1)
    for pair in bruhat_cover_pairs(A1, 2):
        cert = check_cover_divisibility(A1, lam, pair, 6)
        assert cert.status == "pass", cert.to_json()
        assert cert.multiply_back


def test_factorization_witness_on_covers():
    d = parse_type("A2")
    lam = LevelKCharacter((1, 0), 1)
    for pair in bruhat_cover_pairs(d, 1):
        for beta in [(0, 0), (1, 0), (1, -1)]:
            out = factorization_witness(d, pair.w, pair.v, lam, pair.root, pair.m, beta)
            assert out["match"]


@pytest.mark.parametrize("k", [1, 2])
def test_a1_cover_divisibility_all_weights(k):
    # 2 covers at length 1, then 4 per length
    for lam in enumerate_level_k(A1, k):
        pairs = bruhat_cover_pairs(A1, 4)
        assert len(pairs) == 14
        for pair in pairs:
            cert = check_cover_divisibility(A1, LevelKCharacter(lam, k), pair, 16)
            assert cert.status == "pass", (lam, cert.to_json())
            assert cert.multiply_back


def test_a1_nonzero_differences_are_divided():
    lam = LevelKCharacter((1,), 2)
    quotients = [check_cover_divisibility(A1, lam, pair, 16).quotient for pair in bruhat_cover_pairs(A1, 4)]
    assert all(q is not None and q.terms for q in quotients)


def _a2_simple_cover():
    d = parse_type("A2")
    pair, = [p for p in bruhat_cover_pairs(d, 1) if p.m == 0 and tuple(p.root) in {(2, -1), (-2, 1)}]
    return d, pair


def test_a2_level_two_cover_divisibility():
    d = parse_type("A2")
    lam = LevelKCharacter((1, 0), 2)
    for pair in bruhat_cover_pairs(d, 2):
        cert = check_cover_divisibility(d, lam, pair, 8)
        assert cert.status == "pass", cert.to_json()
        assert cert.multiply_back
    _, pair = _a2_simple_cover()
    assert check_cover_divisibility(d, lam, pair, 8).quotient.terms


def test_wrong_root_is_not_a_divisor():
    # s1 theta - theta has e^{omega1 - alpha1} - e^{omega1} at energy 0; alpha2-lines hold one term each
    d, pair = _a2_simple_cover()
    swapped = replace(pair, root=(-1, 2))
    cert = check_cover_divisibility(d, LevelKCharacter((1, 0), 2), swapped, 8)
    assert cert.status == "fail"
    assert cert.counterexample is not None


@pytest.mark.parametrize("k", range(1, 11))
def test_a1_basis_count_sweep(k):
    assert len(enumerate_level_k(A1, k)) == k + 1
    assert invariant_theta_rank(A1, k, 20) == k + 1


@pytest.mark.parametrize("k,count", [(1, 3), (2, 6), (3, 10)])
def test_a2_basis_count_sweep(k, count):
    d = parse_type("A2")
    assert len(enumerate_level_k(d, k)) == count
    assert invariant_theta_rank(d, k, 20) == count


def test_affine_indexed_euler_theta_class():
    lam = LevelKCharacter((1,), 2)
    components = euler_theta_class_affine(A1, lam, 8, 2)
    elements = enumerate_affine_weyl(A1, 2)
    assert len(components) == len(elements) == 5
    theta = theta_lambda(A1, lam, 8)
    for _, g in elements:
        if not any(g.translation):
            assert components[g].terms == finite_weyl_act(g.finite, theta.series).terms
