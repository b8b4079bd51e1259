# affine_weyl.py
# Finite and affine Weyl groups acting on rational Cartan vectors: alcove folding,
# wall stabilizers, affine lengths and Bruhat cover pairs.

from __future__ import annotations
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import floor
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from config import MAX_COVER_LENGTH
from errors import CapacityError, DomainError
from lattice_core import (
    RootDatum, coroot_of, fundamental_coweights, highest_root_value,
    pairing, positive_roots, simple_root_value,
)

Matrix = Tuple[Tuple[int, ...], ...]

MAX_WEYL_ORDER = 1152


@dataclass(frozen=True)
class FiniteWeylElement:
    word: Tuple[int, ...]        # lexicographically least reduced word, 0-based simple indices
    matrix: Matrix               # action on weight coordinates
    coroot_matrix: Matrix        # action on coroot coordinates

    @property
    def length(self) -> int:
        return len(self.word)

    @property
    def sign(self) -> int:
        return -1 if len(self.word) % 2 else 1

    @property
    def label(self) -> str:
        return "e" if not self.word else "".join(f"s{i + 1}" for i in self.word)

    def act_weight(self, lam: Sequence) -> tuple:
        return _apply(self.matrix, lam)

    def act_coroot(self, h: Sequence) -> tuple:
        return _apply(self.coroot_matrix, h)


@dataclass(frozen=True)
class AffineWeylElement:
    translation: Tuple[int, ...]
    finite: FiniteWeylElement

    def to_json(self) -> dict:
        return {"translation": list(self.translation), "word": [i + 1 for i in self.finite.word]}


@dataclass(frozen=True)
class AlcovePoint:
    point: Tuple[Fraction, ...]
    walls: FrozenSet[int]

    def to_json(self) -> dict:
        return {"point": [str(x) for x in self.point], "walls": sorted(self.walls)}


def _apply(matrix: Matrix, v: Sequence) -> tuple:
    return tuple(sum(row[j] * v[j] for j in range(len(v))) for row in matrix)


def _simple_matrices(d: RootDatum, i: int) -> Tuple[Matrix, Matrix]:
    n = d.rank
    weight = tuple(tuple(int(k == l) - int(l == i) * d.cartan[k][i] for l in range(n)) for k in range(n))
    coroot = tuple(tuple(int(k == l) - int(k == i) * d.cartan[l][i] for l in range(n)) for k in range(n))
    return weight, coroot


def _matmul(a: Matrix, b: Matrix) -> Matrix:
    prod = np.array(a, dtype=np.int64) @ np.array(b, dtype=np.int64)
    return tuple(tuple(int(x) for x in row) for row in prod)


# Holds the enumerated finite Weyl group with product lookup by weight matrix
class FiniteWeylGroup:
    # BFS from the identity by right multiplication, parents visited in lex order of words
    def __init__(self, d: RootDatum):
        self.datum = d
        n = d.rank
        ident = tuple(tuple(int(k == l) for l in range(n)) for k in range(n))
        self.generators = [_simple_matrices(d, i) for i in range(n)]
        self.identity = FiniteWeylElement((), ident, ident)
        self.elements: List[FiniteWeylElement] = [self.identity]
        self.by_matrix: Dict[Matrix, FiniteWeylElement] = {ident: self.identity}
        layer = [self.identity]
        while layer:
            nxt = []
            for w in layer:
                for i, (gw, gc) in enumerate(self.generators):
                    m = _matmul(w.matrix, gw)
                    if m in self.by_matrix:
                        continue
                    el = FiniteWeylElement(w.word + (i,), m, _matmul(w.coroot_matrix, gc))
                    self.by_matrix[m] = el
                    nxt.append(el)
                    if len(self.by_matrix) > MAX_WEYL_ORDER:
                        raise CapacityError("finite Weyl group exceeds capacity", {"type": d.name})
            self.elements.extend(nxt)
            layer = nxt
        self._reflections: Dict[Matrix, Tuple[int, ...]] = {}
        for alpha in positive_roots(d):
            self._reflections[self.reflection(alpha).matrix] = alpha

    def multiply(self, a: FiniteWeylElement, b: FiniteWeylElement) -> FiniteWeylElement:
        return self.by_matrix[_matmul(a.matrix, b.matrix)]

    def inverse(self, a: FiniteWeylElement) -> FiniteWeylElement:
        return self.from_word(reversed(a.word))

    def from_word(self, word: Iterable[int]) -> FiniteWeylElement:
        el = self.identity
        for i in word:
            el = self.multiply(el, self.simple(i))
        return el

    def simple(self, i: int) -> FiniteWeylElement:
        return self.by_matrix[self.generators[i][0]]

    # s_alpha(lambda) = lambda - lambda(h_alpha) alpha
    def reflection(self, alpha: Sequence[int]) -> FiniteWeylElement:
        h = coroot_of(self.datum, alpha)
        n = self.datum.rank
        m = tuple(tuple(int(k == l) - alpha[k] * h[l] for l in range(n)) for k in range(n))
        return self.by_matrix[m]

    # positive root whose reflection is w, or None
    def reflection_root(self, w: FiniteWeylElement) -> Optional[Tuple[int, ...]]:
        return self._reflections.get(w.matrix)


@lru_cache(maxsize=None)
def weyl_group(d: RootDatum) -> FiniteWeylGroup:
    if d.rank > 4:
        raise CapacityError("rank too large for Weyl enumeration", {"type": d.name})
    return FiniteWeylGroup(d)


def enumerate_finite_weyl(d: RootDatum) -> List[FiniteWeylElement]:
    return list(weyl_group(d).elements)


def finite_reflection(d: RootDatum, alpha: Sequence[int]) -> FiniteWeylElement:
    return weyl_group(d).reflection(alpha)


# ------------------------------
# Affine Weyl group
# ------------------------------

def affine_identity(d: RootDatum) -> AffineWeylElement:
    return AffineWeylElement(tuple(0 for _ in range(d.rank)), weyl_group(d).identity)


def translation(d: RootDatum, beta: Sequence[int]) -> AffineWeylElement:
    return AffineWeylElement(tuple(int(x) for x in beta), weyl_group(d).identity)


def act(g: AffineWeylElement, h: Sequence) -> tuple:
    wh = g.finite.act_coroot(h)
    return tuple(x + b for x, b in zip(wh, g.translation))


# (beta1, w1)(beta2, w2) = (beta1 + w1(beta2), w1 w2)
def affine_multiply(d: RootDatum, g1: AffineWeylElement, g2: AffineWeylElement) -> AffineWeylElement:
    shifted = g1.finite.act_coroot(g2.translation)
    return AffineWeylElement(
        tuple(int(a + b) for a, b in zip(g1.translation, shifted)),
        weyl_group(d).multiply(g1.finite, g2.finite),
    )


def affine_inverse(d: RootDatum, g: AffineWeylElement) -> AffineWeylElement:
    winv = weyl_group(d).inverse(g.finite)
    back = winv.act_coroot(g.translation)
    return AffineWeylElement(tuple(int(-x) for x in back), winv)


# Reflection in the affine root h -> alpha(h) + m: (-m h_alpha, s_alpha)
def affine_reflection(d: RootDatum, alpha: Sequence[int], m: int) -> AffineWeylElement:
    h = coroot_of(d, alpha)
    return AffineWeylElement(tuple(-m * x for x in h), weyl_group(d).reflection(alpha))


def affine_simple(d: RootDatum, i: int) -> AffineWeylElement:
    if i == 0:
        theta = d.highest_root
        return affine_reflection(d, tuple(-x for x in theta), 1)
    return AffineWeylElement(tuple(0 for _ in range(d.rank)), weyl_group(d).simple(i - 1))


def affine_from_word(d: RootDatum, word: Iterable[int]) -> AffineWeylElement:
    g = affine_identity(d)
    for i in word:
        g = affine_multiply(d, g, affine_simple(d, i))
    return g


# ------------------------------
# Alcove
# ------------------------------

def alcove_walls(d: RootDatum, h: Sequence) -> FrozenSet[int]:
    walls = {i + 1 for i in range(d.rank) if simple_root_value(d, i, h) == 0}
    if highest_root_value(d, h) == 1:
        walls.add(0)
    return frozenset(walls)


def in_alcove(d: RootDatum, h: Sequence) -> bool:
    return all(simple_root_value(d, i, h) >= 0 for i in range(d.rank)) and highest_root_value(d, h) <= 1


def fold_to_alcove(d: RootDatum, h: Sequence) -> Tuple[AlcovePoint, AffineWeylElement]:
    """Reflect h into the fundamental alcove; returns (point, witness) with act(witness, h) = point."""
    point = tuple(Fraction(x) for x in h)
    witness = affine_identity(d)
    while True:
        # most violated constraint, ties to the smallest affine index
        best, worst = None, Fraction(0)
        over = highest_root_value(d, point) - 1
        if over > worst:
            best, worst = 0, over
        for i in range(d.rank):
            under = -simple_root_value(d, i, point)
            if under > worst:
                best, worst = i + 1, under
        if best is None:
            break
        r = affine_simple(d, best)
        point = act(r, point)
        witness = affine_multiply(d, r, witness)
    return AlcovePoint(point, alcove_walls(d, point)), witness


def stabilizer_walls(p: AlcovePoint) -> FrozenSet[int]:
    return p.walls


# Closure of the wall reflections {r_i : i in walls}; finite for a proper wall set
def stabilizer_group(d: RootDatum, walls: Iterable[int]) -> List[AffineWeylElement]:
    gens = [affine_simple(d, i) for i in sorted(walls)]
    if len(gens) > d.rank:
        raise DomainError("wall set must be proper", {"walls": sorted(walls)})
    ident = affine_identity(d)
    seen = {ident}
    order = [ident]
    queue = deque([ident])
    while queue:
        g = queue.popleft()
        for r in gens:
            x = affine_multiply(d, g, r)
            if x not in seen:
                seen.add(x)
                order.append(x)
                queue.append(x)
    return order


# ------------------------------
# Lengths and Bruhat covers
# ------------------------------

@lru_cache(maxsize=None)
def interior_point(d: RootDatum) -> Tuple[Fraction, ...]:
    # sum of fundamental coweights over the Coxeter number
    h = d.coxeter_number
    cw = fundamental_coweights(d)
    return tuple(sum((cw[i][k] for i in range(d.rank)), Fraction(0)) / h for k in range(d.rank))


# Number of affine hyperplanes separating the alcove from its image
def affine_length(d: RootDatum, g: AffineWeylElement) -> int:
    q = act(g, interior_point(d))
    return sum(abs(floor(pairing(alpha, q))) for alpha in positive_roots(d))


def enumerate_affine_weyl(d: RootDatum, max_length: int) -> List[Tuple[Tuple[int, ...], AffineWeylElement]]:
    """All elements of length <= max_length as (lex-least reduced word, element), by length."""
    if max_length > MAX_COVER_LENGTH:
        raise CapacityError("length bound too large", {"length_bound": max_length, "max": MAX_COVER_LENGTH})
    ident = affine_identity(d)
    seen = {ident: ()}
    out = [((), ident)]
    layer = [((), ident)]
    for _ in range(max_length):
        nxt = []
        for word, g in layer:
            for i in range(d.rank + 1):
                x = affine_multiply(d, g, affine_simple(d, i))
                if x not in seen:
                    seen[x] = word + (i,)
                    nxt.append((word + (i,), x))
        out.extend(nxt)
        layer = nxt
    return out


# (alpha_bar, m) with r = (-m h_alpha, s_alpha), normalized to a positive affine root
def reflection_affine_root(d: RootDatum, r: AffineWeylElement) -> Optional[Tuple[Tuple[int, ...], int]]:
    alpha = weyl_group(d).reflection_root(r.finite)
    if alpha is None:
        return None
    h = coroot_of(d, alpha)
    k = next(i for i, x in enumerate(h) if x != 0)
    if r.translation[k] % h[k]:
        return None
    m = -(r.translation[k] // h[k])
    if tuple(-m * x for x in h) != r.translation:
        return None
    if m < 0:
        return tuple(-x for x in alpha), -m
    return tuple(alpha), m


@dataclass(frozen=True)
class CoverPair:
    w: AffineWeylElement
    v: AffineWeylElement
    w_word: Tuple[int, ...]
    v_word: Tuple[int, ...]
    root: Tuple[int, ...]        # finite part alpha_bar (weight coordinates)
    m: int                        # affine root is h -> alpha_bar(h) + m

    def to_json(self) -> dict:
        return {
            "w": list(self.w_word), "v": list(self.v_word),
            "alpha": {"finite": list(self.root), "m": self.m},
        }


def bruhat_cover_pairs(d: RootDatum, length_bound: int) -> List[CoverPair]:
    """Pairs (w, v, alpha) with w = r_alpha v and l(w) = l(v) + 1 <= length_bound."""
    elements = enumerate_affine_weyl(d, length_bound)
    by_length: Dict[int, List[Tuple[Tuple[int, ...], AffineWeylElement]]] = {}
    for word, g in elements:
        by_length.setdefault(len(word), []).append((word, g))
    pairs: List[CoverPair] = []
    for length in range(1, length_bound + 1):
        lower = [(word, g, affine_inverse(d, g)) for word, g in by_length.get(length - 1, [])]
        for w_word, w in by_length.get(length, []):
            for v_word, v, v_inv in lower:
                found = reflection_affine_root(d, affine_multiply(d, w, v_inv))
                if found is None:
                    continue
                alpha, m = found
                pairs.append(CoverPair(w, v, w_word, v_word, alpha, m))
    return pairs
