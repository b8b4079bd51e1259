# lattice_core.py
# Exact root-datum arithmetic: Cartan data, root enumeration, the basic form on the
# coroot lattice and conversions between weight and coroot coordinates.
#
# Coordinates: weights in the fundamental-weight basis, coroots (and Cartan vectors)
# in the simple-coroot basis. cartan[i][j] = alpha_j(alpha_i^vee), Bourbaki numbering.

from __future__ import annotations
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

import numpy as np
import sympy

from config import MAX_RANK
from errors import ConfigurationError, ConsistencyError, DomainError

Vector = Tuple[int, ...]
RationalVector = Tuple[Fraction, ...]

SUPPORTED_FAMILIES = ("A", "B", "C", "D", "F", "G")


@dataclass(frozen=True)
class RootDatum:
    family: str
    rank: int
    cartan: Tuple[Vector, ...]                  # cartan[i][j] = alpha_j(alpha_i^vee)
    symmetrizer: Tuple[Fraction, ...]           # d_i = (alpha_i, alpha_i) / 2, long roots d = 1
    gram: Tuple[Tuple[Fraction, ...], ...]      # <alpha_i^vee, alpha_j^vee>
    positive_roots: Tuple[Vector, ...]          # root coordinates (in the simple-root basis), by height
    highest_root: Vector                        # weight coordinates
    marks: Vector                               # highest root in the simple-root basis
    comarks: Vector                             # h_{alpha_0} in the simple-coroot basis

    @property
    def name(self) -> str:
        return f"{self.family}{self.rank}"

    @property
    def simple_roots(self) -> Tuple[Vector, ...]:
        # alpha_j in fundamental-weight coordinates is column j of the Cartan matrix
        n = self.rank
        return tuple(tuple(self.cartan[i][j] for i in range(n)) for j in range(n))

    @property
    def coroot_basis(self) -> Tuple[Vector, ...]:
        n = self.rank
        return tuple(tuple(int(i == j) for i in range(n)) for j in range(n))

    @property
    def coxeter_number(self) -> int:
        return 1 + sum(self.marks)


# A bare integral lattice with a symmetric Gram matrix, for pairings on lattices
# that do not come from a root datum (odd lattices in particular)
@dataclass(frozen=True)
class IntegralLattice:
    gram: Tuple[Tuple[Fraction, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.gram)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "IntegralLattice":
        try:
            gram = tuple(tuple(Fraction(x) for x in row) for row in rows)
        except (TypeError, ValueError) as e:
            raise DomainError("Gram matrix entries must be rational numbers", {"reason": str(e)})
        n = len(gram)
        for i in range(n):
            if len(gram[i]) != n:
                raise DomainError("Gram matrix must be square")
            for j in range(n):
                if gram[i][j] != gram[j][i]:
                    raise DomainError("Gram matrix must be symmetric")
        return cls(gram)


# Obtain Cartan matrix given label of Dynkin diagram (row i belongs to alpha_i^vee)
def dynkin_to_cartan(family: str, rank: int) -> np.ndarray:
    A = 2 * np.eye(rank, dtype=int)
    if family == "A":
        A[range(rank - 1), range(1, rank)] = -1
        A[range(1, rank), range(rank - 1)] = -1
    elif family == "B":
        A[range(rank - 2), range(1, rank - 1)] = -1
        A[range(1, rank - 1), range(rank - 2)] = -1
        # final root is shorter
        A[-2, -1] = -1
        A[-1, -2] = -2
    elif family == "C":
        A[range(rank - 2), range(1, rank - 1)] = -1
        A[range(1, rank - 1), range(rank - 2)] = -1
        # final root is longer
        A[-2, -1] = -2
        A[-1, -2] = -1
    elif family == "D":
        A[range(rank - 2), range(1, rank - 1)] = -1
        A[range(1, rank - 1), range(rank - 2)] = -1
        # final root hangs off the third-to-last
        A[-3, -1] = -1
        A[-1, -3] = -1
    elif family == "F":
        A[0, 1] = A[1, 0] = -1
        A[1, 2] = -1
        A[2, 1] = -2
        A[2, 3] = A[3, 2] = -1
    elif family == "G":
        A[0, 1] = -3
        A[1, 0] = -1
    return A


def _check_type(family: str, rank: int) -> None:
    if family not in SUPPORTED_FAMILIES:
        raise ConfigurationError(f"unsupported family {family!r}", {"family": family, "rank": rank})
    if rank < 1 or rank > MAX_RANK:
        raise ConfigurationError(f"rank must lie in 1..{MAX_RANK}", {"family": family, "rank": rank})
    minimum = {"A": 1, "B": 2, "C": 2, "D": 3, "F": 4, "G": 2}[family]
    if rank < minimum or (family == "F" and rank != 4) or (family == "G" and rank != 2):
        raise ConfigurationError(f"{family}{rank} is not a simple type", {"family": family, "rank": rank})


# d_j = d_i a_ij / a_ji along the (connected) Dynkin diagram, then scale so max d = 1
def _symmetrizer(cartan: Sequence[Sequence[int]]) -> Tuple[Fraction, ...]:
    n = len(cartan)
    d: List[Fraction] = [Fraction(0)] * n
    d[0] = Fraction(1)
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for j in range(n):
            if j not in seen and cartan[i][j] != 0:
                d[j] = d[i] * cartan[i][j] / cartan[j][i]
                seen.add(j)
                stack.append(j)
    top = max(d)
    return tuple(x / top for x in d)


def _weight_of(cartan: Sequence[Sequence[int]], coeffs: Sequence[int]) -> Vector:
    n = len(cartan)
    return tuple(sum(cartan[i][j] * coeffs[j] for j in range(n)) for i in range(n))


# Positive roots in the simple-root basis by alpha_i-string closure, ordered by height
def _root_string_closure(cartan: Sequence[Sequence[int]]) -> List[Vector]:
    n = len(cartan)
    simple = [tuple(int(i == j) for i in range(n)) for j in range(n)]
    roots = set(simple)
    layer = list(simple)
    ordered = list(simple)
    while layer:
        nxt = []
        for beta in layer:
            lam = _weight_of(cartan, beta)
            for i in range(n):
                # p = how far the alpha_i-string extends downward from beta
                p = 0
                down = list(beta)
                while True:
                    down[i] -= 1
                    if tuple(down) in roots:
                        p += 1
                    else:
                        break
                if p - lam[i] > 0:
                    up = list(beta)
                    up[i] += 1
                    up = tuple(up)
                    if up not in roots:
                        roots.add(up)
                        nxt.append(up)
        nxt.sort(key=lambda c: (sum(c), tuple(-x for x in c)))
        ordered.extend(nxt)
        layer = nxt
    return ordered


@lru_cache(maxsize=None)
def build_root_datum(family: str, rank: int) -> RootDatum:
    family = family.upper()
    _check_type(family, int(rank))
    A = dynkin_to_cartan(family, int(rank))
    cartan = tuple(tuple(int(x) for x in row) for row in A)
    n = len(cartan)
    d = _symmetrizer(cartan)
    gram = tuple(tuple(Fraction(cartan[i][j]) / d[j] for j in range(n)) for i in range(n))
    for i in range(n):
        for j in range(n):
            if gram[i][j] != gram[j][i]:
                raise ConsistencyError("coroot Gram matrix is not symmetric", {"type": f"{family}{rank}"})
    if not sympy.Matrix(gram).is_positive_definite:
        raise ConsistencyError("coroot Gram matrix is not positive definite", {"type": f"{family}{rank}"})
    positive = _root_string_closure(cartan)
    marks = max(positive, key=lambda c: (sum(c), c))
    highest = _weight_of(cartan, marks)
    datum = RootDatum(
        family=family,
        rank=n,
        cartan=cartan,
        symmetrizer=d,
        gram=gram,
        positive_roots=tuple(positive),
        highest_root=highest,
        marks=tuple(marks),
        comarks=tuple(0 for _ in range(n)),
    )
    comarks = coroot_of(datum, highest)
    return RootDatum(**{**datum.__dict__, "comarks": comarks})


# Parse labels such as "A1", "c2" or "G2"
def parse_type(label: str) -> RootDatum:
    label = label.strip()
    if len(label) < 2 or not label[1:].isdigit():
        raise ConfigurationError(f"cannot parse root type {label!r}")
    return build_root_datum(label[0].upper(), int(label[1:]))


# ------------------------------
# Pairings and forms
# ------------------------------

def basic_form(d, beta1: Sequence, beta2: Sequence) -> Fraction:
    """<beta1, beta2> on the coroot lattice; `d` is a RootDatum or IntegralLattice."""
    g = d.gram
    n = len(g)
    return sum((Fraction(beta1[i]) * g[i][j] * Fraction(beta2[j]) for i in range(n) for j in range(n)), Fraction(0))


def dual_weight(d, beta: Sequence[int]) -> Vector:
    # beta*(gamma) = <beta, gamma>, read off on the simple coroots
    n = len(d.gram)
    out = []
    for i in range(n):
        v = sum((Fraction(beta[j]) * d.gram[j][i] for j in range(n)), Fraction(0))
        if v.denominator != 1:
            raise ConsistencyError("dual weight is not integral", {"beta": list(beta), "coordinate": i, "value": str(v)})
        out.append(int(v))
    return tuple(out)


def pairing(lam: Sequence, beta: Sequence):
    # lambda(h) for a weight lambda and a coroot-coordinate vector h (integral or rational)
    return sum((x * y for x, y in zip(lam, beta)), 0)


def simple_root_value(d: RootDatum, i: int, h: Sequence):
    return sum((d.cartan[j][i] * h[j] for j in range(d.rank)), 0)


def highest_root_value(d: RootDatum, h: Sequence):
    return pairing(d.highest_root, h)


# ------------------------------
# Roots
# ------------------------------

def root_coords_to_weight(d: RootDatum, coeffs: Sequence[int]) -> Vector:
    return _weight_of(d.cartan, coeffs)


def all_roots(d: RootDatum) -> List[Vector]:
    """All roots in weight coordinates: positive roots by height, then their negatives."""
    pos = [root_coords_to_weight(d, c) for c in d.positive_roots]
    return pos + [tuple(-x for x in a) for a in pos]


def positive_roots(d: RootDatum) -> List[Vector]:
    return [root_coords_to_weight(d, c) for c in d.positive_roots]


@lru_cache(maxsize=None)
def _root_index(d: RootDatum) -> Dict[Vector, Tuple[int, Vector]]:
    index = {}
    for c in d.positive_roots:
        index[root_coords_to_weight(d, c)] = (1, c)
        index[root_coords_to_weight(d, tuple(-x for x in c))] = (-1, tuple(-x for x in c))
    return index


def is_root(d: RootDatum, alpha: Sequence[int]) -> bool:
    return tuple(alpha) in _root_index(d)


def is_positive_root(d: RootDatum, alpha: Sequence[int]) -> bool:
    entry = _root_index(d).get(tuple(alpha))
    return entry is not None and entry[0] > 0


def root_coords(d: RootDatum, alpha: Sequence[int]) -> Vector:
    entry = _root_index(d).get(tuple(alpha))
    if entry is None:
        raise DomainError("not a root", {"weight": list(alpha), "type": d.name})
    return entry[1]


def root_length_sq(d: RootDatum, alpha: Sequence[int]) -> Fraction:
    c = root_coords(d, alpha)
    n = d.rank
    return sum((c[i] * c[j] * d.symmetrizer[i] * d.cartan[i][j] for i in range(n) for j in range(n)), Fraction(0))


def coroot_of(d: RootDatum, alpha: Sequence[int]) -> Vector:
    # h_alpha = 2 alpha / (alpha, alpha), using alpha_j <-> d_j alpha_j^vee
    c = root_coords(d, alpha)
    scale = Fraction(2) / root_length_sq(d, alpha)
    out = []
    for j in range(d.rank):
        v = scale * c[j] * d.symmetrizer[j]
        if v.denominator != 1:
            raise ConsistencyError("coroot is not integral", {"root": list(alpha), "type": d.name})
        out.append(int(v))
    return tuple(out)


def comarks(d: RootDatum) -> Vector:
    return d.comarks


def weight_to_root_coords(d: RootDatum, lam: Sequence[int]) -> RationalVector:
    inv = sympy.Matrix(d.cartan).inv()
    out = inv * sympy.Matrix([int(x) for x in lam])
    return tuple(Fraction(int(sympy.fraction(x)[0]), int(sympy.fraction(x)[1])) for x in out)


@lru_cache(maxsize=None)
def fundamental_coweights(d: RootDatum) -> Tuple[RationalVector, ...]:
    # omega_i^vee with alpha_j(omega_i^vee) = delta_ij; rows of the inverse Cartan matrix
    inv = sympy.Matrix(d.cartan).inv()
    rows = []
    for i in range(d.rank):
        rows.append(tuple(Fraction(int(sympy.fraction(inv[i, k])[0]), int(sympy.fraction(inv[i, k])[1]))
                          for k in range(d.rank)))
    return tuple(rows)


# ------------------------------
# Simple reflections
# ------------------------------

def reflect_weight(d: RootDatum, i: int, lam: Sequence) -> tuple:
    li = lam[i]
    return tuple(lam[k] - li * d.cartan[k][i] for k in range(d.rank))


def reflect_coroot(d: RootDatum, i: int, h: Sequence) -> tuple:
    ai = simple_root_value(d, i, h)
    return tuple(h[k] - (ai if k == i else 0) for k in range(d.rank))


def reflect_weight_by_root(d: RootDatum, alpha: Sequence[int], lam: Sequence) -> tuple:
    h_alpha = coroot_of(d, alpha)
    t = pairing(lam, h_alpha)
    return tuple(lam[k] - t * alpha[k] for k in range(d.rank))


def reflect_coroot_by_root(d: RootDatum, alpha: Sequence[int], h: Sequence) -> tuple:
    h_alpha = coroot_of(d, alpha)
    t = pairing(alpha, h)
    return tuple(h[k] - t * h_alpha[k] for k in range(d.rank))


def is_lattice_vector(h: Sequence) -> bool:
    return all(Fraction(x).denominator == 1 for x in h)


def datum_to_json(d: RootDatum) -> dict:
    return {
        "family": d.family,
        "rank": d.rank,
        "cartan": [list(row) for row in d.cartan],
        "gram": [[str(x) for x in row] for row in d.gram],
        "simple_roots": [list(a) for a in d.simple_roots],
        "coroot_basis": [list(a) for a in d.coroot_basis],
        "highest_root": list(d.highest_root),
        "marks": list(d.marks),
        "comarks": list(d.comarks),
        "positive_roots": [list(a) for a in positive_roots(d)],
        "coxeter_number": d.coxeter_number,
    }
