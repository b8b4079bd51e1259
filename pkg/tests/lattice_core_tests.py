import sys
from fractions import Fraction
from pathlib import Path

import pytest
import sympy

# -------------------------------
# Locate modules
# -------------------------------
PROJECT_ROOT = Path(__file__).resolve().parents[1]
SCRIPTS_DIR = PROJECT_ROOT / "Scripts"
sys.path.insert(0, str(SCRIPTS_DIR))

from errors import ConfigurationError, DomainError
from lattice_core import (
    IntegralLattice, basic_form, build_root_datum, coroot_of, dual_weight, fundamental_coweights,
    parse_type, positive_roots, root_coords, root_length_sq, weight_to_root_coords,
)


def test_a1_datum():
    d = build_root_datum("A", 1)
    assert d.cartan == ((2,),)
    assert d.highest_root == d.simple_roots[0] == (2,)
    assert d.gram == ((Fraction(2),),)
    assert d.comarks == (1,)


def test_a2_highest_root_is_sum_of_simple_roots():
    d = build_root_datum("A", 2)
    assert d.marks == (1, 1)
    assert d.highest_root == (1, 1)
    assert len(positive_roots(d)) == 3


def test_c2_cartan_and_lengths():
    d = parse_type("C2")
    assert d.cartan == ((2, -2), (-1, 2))
    assert len(positive_roots(d)) == 4
    # long roots have squared length 2
    assert max(root_length_sq(d, a) for a in positive_roots(d)) == 2
    assert min(root_length_sq(d, a) for a in positive_roots(d)) == 1


def test_c2_long_root_has_short_coroot():
    d = parse_type("C2")
    long_root = d.simple_roots[1]
    h = coroot_of(d, long_root)
    assert h == (0, 1)
    assert basic_form(d, h, h) < basic_form(d, (1, 0), (1, 0))


@pytest.mark.parametrize("label,count", [("A1", 1), ("A3", 6), ("B3", 9), ("D4", 12), ("F4", 24), ("G2", 6)])
def test_positive_root_counts(label, count):
    assert len(positive_roots(parse_type(label))) == count


@pytest.mark.parametrize("label", ["A2", "B2", "C3", "G2", "F4"])
def test_gram_symmetric_positive_definite(label):
    d = parse_type(label)
    M = sympy.Matrix(d.gram)
    assert M == M.T
    assert M.is_positive_definite
    # the coroot lattice is even under the basic form
    assert all(d.gram[i][i] % 2 == 0 for i in range(d.rank))


def test_dual_weight_pairs_with_coroots():
    d = parse_type("B2")
    beta = (1, -2)
    star = dual_weight(d, beta)
    for gamma in [(1, 0), (0, 1), (3, 5)]:
        assert sum(s * g for s, g in zip(star, gamma)) == basic_form(d, beta, gamma)
    assert dual_weight(d, (0, 0)) == (0, 0)


def test_root_coords_round_trip_with_weights():
    d = parse_type("G2")
    for a in positive_roots(d):
        assert tuple(int(x) for x in weight_to_root_coords(d, a)) == root_coords(d, a)


def test_fundamental_coweights_are_dual_to_simple_roots():
    d = parse_type("B3")
    cw = fundamental_coweights(d)
    for i in range(d.rank):
        for j, alpha in enumerate(d.simple_roots):
            assert sum(a * x for a, x in zip(alpha, cw[i])) == (1 if i == j else 0)


def test_unsupported_types_rejected():
    with pytest.raises(ConfigurationError):
        parse_type("E6")
    with pytest.raises(ConfigurationError):
        parse_type("A5")
    with pytest.raises(ConfigurationError):
        parse_type("x")


def test_non_root_rejected():
    with pytest.raises(DomainError):
        root_coords(parse_type("A1"), (4,))


def test_integral_lattice_validation():
    assert IntegralLattice.from_rows([[1]]).rank == 1
    with pytest.raises(DomainError):
        IntegralLattice.from_rows([[2, 1], [0, 2]])
