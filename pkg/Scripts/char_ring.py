# char_ring.py
# Formal character ring: sums of u^m q^e e^lambda with exact rational energies, the
# coroot-lattice action on characters and exact division by (q^e0 e^alpha - 1).

from __future__ import annotations
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple

from errors import DomainError, InsufficientTruncation
from lattice_core import basic_form, dual_weight, pairing


class CharacterMonomial(NamedTuple):
    level: int                  # u-exponent
    energy: Fraction            # q-exponent
    weight: Tuple[int, ...]     # fundamental-weight coordinates


def monomial(level: int, energy, weight: Sequence[int]) -> CharacterMonomial:
    return CharacterMonomial(int(level), Fraction(energy), tuple(int(x) for x in weight))


@dataclass(frozen=True)
class CharacterSeries:
    terms: Dict[CharacterMonomial, int] = field(default_factory=dict)
    truncation: Optional[Fraction] = None    # every term with energy <= truncation is present

    @property
    def lower_bound(self) -> Fraction:
        if self.terms:
            return min(m.energy for m in self.terms)
        if self.truncation is not None:
            return self.truncation
        return Fraction(0)

    @property
    def is_exact(self) -> bool:
        return self.truncation is None

    def __len__(self) -> int:
        return len(self.terms)

    def coefficient(self, mono: CharacterMonomial) -> int:
        return self.terms.get(mono, 0)

    def sorted_terms(self) -> List[Tuple[CharacterMonomial, int]]:
        return sorted(self.terms.items(), key=lambda kv: (kv[0].level, kv[0].energy, kv[0].weight))

    def __add__(self, other: "CharacterSeries") -> "CharacterSeries":
        return add(self, other)

    def __sub__(self, other: "CharacterSeries") -> "CharacterSeries":
        return add(self, scale(other, -1))

    def __mul__(self, other: "CharacterSeries") -> "CharacterSeries":
        return mul(self, other)


# LaurentPoly is a CharacterSeries with truncation None
LaurentPoly = CharacterSeries


def _min_trunc(*values: Optional[Fraction]) -> Optional[Fraction]:
    present = [v for v in values if v is not None]
    return min(present) if present else None


def make_series(terms: Mapping[CharacterMonomial, int] | Iterable[Tuple[CharacterMonomial, int]],
                truncation=None) -> CharacterSeries:
    """Collect terms, drop zeros and anything above the truncation."""
    trunc = None if truncation is None else Fraction(truncation)
    items = terms.items() if isinstance(terms, Mapping) else terms
    acc: Dict[CharacterMonomial, int] = {}
    for mono, c in items:
        mono = CharacterMonomial(int(mono[0]), Fraction(mono[1]), tuple(int(x) for x in mono[2]))
        acc[mono] = acc.get(mono, 0) + int(c)
    kept = {m: c for m, c in acc.items() if c != 0 and (trunc is None or m.energy <= trunc)}
    return CharacterSeries(kept, trunc)


def monomial_series(level: int, energy, weight: Sequence[int], coeff: int = 1, truncation=None) -> CharacterSeries:
    return make_series({monomial(level, energy, weight): coeff}, truncation)


def one(rank: int) -> CharacterSeries:
    return monomial_series(0, 0, (0,) * rank)


def zero(truncation=None) -> CharacterSeries:
    return CharacterSeries({}, None if truncation is None else Fraction(truncation))


def truncate(s: CharacterSeries, order) -> CharacterSeries:
    return make_series(s.terms, _min_trunc(s.truncation, Fraction(order)))


def scale(s: CharacterSeries, c: int) -> CharacterSeries:
    return make_series({m: c * v for m, v in s.terms.items()}, s.truncation)


def add(s1: CharacterSeries, s2: CharacterSeries) -> CharacterSeries:
    trunc = _min_trunc(s1.truncation, s2.truncation)
    acc = dict(s1.terms)
    for m, c in s2.terms.items():
        acc[m] = acc.get(m, 0) + c
    return make_series(acc, trunc)


def mul(s1: CharacterSeries, s2: CharacterSeries) -> CharacterSeries:
    # validity: min(N1 + lb2, N2 + lb1), with an absent truncation counting as infinite
    cands = []
    if s1.truncation is not None:
        cands.append(s1.truncation + s2.lower_bound)
    if s2.truncation is not None:
        cands.append(s2.truncation + s1.lower_bound)
    trunc = min(cands) if cands else None
    acc: Dict[CharacterMonomial, int] = {}
    for m1, c1 in s1.terms.items():
        for m2, c2 in s2.terms.items():
            e = m1.energy + m2.energy
            if trunc is not None and e > trunc:
                continue
            key = CharacterMonomial(m1.level + m2.level, e, tuple(a + b for a, b in zip(m1.weight, m2.weight)))
            acc[key] = acc.get(key, 0) + c1 * c2
    return make_series(acc, trunc)


# Equality on the range where both series are valid
def agree(s1: CharacterSeries, s2: CharacterSeries) -> bool:
    trunc = _min_trunc(s1.truncation, s2.truncation)
    return truncate_or_self(s1, trunc).terms == truncate_or_self(s2, trunc).terms


def truncate_or_self(s: CharacterSeries, order: Optional[Fraction]) -> CharacterSeries:
    return s if order is None else truncate(s, order)


# ------------------------------
# Group actions
# ------------------------------

def _translate_monomial(d, beta: Sequence[int], mono: CharacterMonomial, bb: Fraction, beta_star) -> Tuple[CharacterMonomial, Fraction]:
    shift = Fraction(pairing(mono.weight, beta)) + Fraction(mono.level, 2) * bb
    weight = tuple(x + mono.level * b for x, b in zip(mono.weight, beta_star))
    return CharacterMonomial(mono.level, mono.energy + shift, weight), shift


def lattice_translate(d, beta: Sequence[int], s: CharacterSeries) -> CharacterSeries:
    """beta u = u e^{beta*} q^{<beta,beta>/2},  beta e^lambda = e^lambda q^{lambda(beta)},  beta q = q."""
    bb = basic_form(d, beta, beta)
    beta_star = dual_weight(d, beta)
    acc: Dict[CharacterMonomial, int] = {}
    shifts = []
    for mono, c in s.terms.items():
        new, shift = _translate_monomial(d, beta, mono, bb, beta_star)
        acc[new] = acc.get(new, 0) + c
        shifts.append(shift)
    trunc = None
    if s.truncation is not None:
        trunc = s.truncation + (min(shifts) if shifts else 0)
    return make_series(acc, trunc)


def finite_weyl_act(w, s: CharacterSeries) -> CharacterSeries:
    acc: Dict[CharacterMonomial, int] = {}
    for mono, c in s.terms.items():
        key = CharacterMonomial(mono.level, mono.energy, tuple(int(x) for x in w.act_weight(mono.weight)))
        acc[key] = acc.get(key, 0) + c
    return make_series(acc, s.truncation)


# ------------------------------
# Division by (q^e0 e^alpha - 1)
# ------------------------------

@dataclass
class CosetLine:
    key: Tuple[int, Fraction, Tuple[int, ...]]    # (level, energy, weight) at position t = 0
    coeffs: Dict[int, int]                        # position t -> coefficient
    bottom: Fraction                               # least energy on the line
    status: str = "closed"                         # closed | failing | open

    @property
    def total(self) -> int:
        return sum(self.coeffs.values())

    def to_json(self) -> dict:
        level, energy, weight = self.key
        return {
            "level": level, "energy": str(energy), "weight": list(weight),
            "coefficients": {str(t): c for t, c in sorted(self.coeffs.items())},
            "bottom": str(self.bottom), "status": self.status,
        }


@dataclass
class LineDivision:
    quotient: CharacterSeries
    lines: List[CosetLine]

    @property
    def failing(self) -> List[CosetLine]:
        return [ln for ln in self.lines if ln.status == "failing"]

    @property
    def open(self) -> List[CosetLine]:
        return [ln for ln in self.lines if ln.status == "open"]

    @property
    def divisible(self) -> bool:
        return not self.failing and not self.open


def _position(alpha: Sequence[int], weight: Sequence[int]) -> int:
    i = next(k for k, a in enumerate(alpha) if a != 0)
    return weight[i] // alpha[i]


def coset_lines(f: CharacterSeries, alpha: Sequence[int], energy=0) -> List[CosetLine]:
    """Partition the support into lines mono * x^Z with x = q^energy e^alpha."""
    e0 = Fraction(energy)
    lines: Dict[tuple, CosetLine] = {}
    for mono, c in f.terms.items():
        t = _position(alpha, mono.weight)
        key = (mono.level, mono.energy - t * e0, tuple(x - t * a for x, a in zip(mono.weight, alpha)))
        line = lines.get(key)
        if line is None:
            line = lines[key] = CosetLine(key, {}, mono.energy)
        line.coeffs[t] = line.coeffs.get(t, 0) + c
        line.bottom = min(line.bottom, mono.energy)
    return [lines[k] for k in sorted(lines, key=lambda k: (k[0], k[1], k[2]))]


def divide_lines(f: CharacterSeries, alpha: Sequence[int], energy=0, through=None) -> LineDivision:
    """Line-by-line division of f by (q^energy e^alpha - 1).

    Only lines whose least energy is <= `through` (default: f's truncation) are decided.
    A line with non-zero coefficient sum is failing when it is known completely and
    open when terms beyond the truncation could still close it.
    """
    if not any(alpha):
        raise DomainError("division by e^0 - 1", {"alpha": list(alpha)})
    e0 = Fraction(energy)
    limit = f.truncation if through is None else Fraction(through)
    if f.truncation is not None and limit is not None and limit > f.truncation:
        limit = f.truncation
    acc: Dict[CharacterMonomial, int] = {}
    kept: List[CosetLine] = []
    for line in coset_lines(f, alpha, e0):
        if limit is not None and line.bottom > limit:
            continue
        kept.append(line)
        if line.total != 0:
            # a line at a single energy (e0 = 0) is complete below the truncation
            line.status = "failing" if (f.truncation is None or e0 == 0) else "open"
            continue
        level, base_energy, base_weight = line.key
        running = 0
        lo, hi = min(line.coeffs), max(line.coeffs)
        for t in range(lo, hi):
            running += line.coeffs.get(t, 0)
            if running:
                mono = CharacterMonomial(level, base_energy + t * e0,
                                         tuple(x + t * a for x, a in zip(base_weight, alpha)))
                acc[mono] = acc.get(mono, 0) - running
    return LineDivision(make_series(acc, limit), kept)


def divide_exact(f: CharacterSeries, alpha: Sequence[int]) -> Optional[CharacterSeries]:
    """g with g (e^alpha - 1) = f, or None; f must be a Laurent polynomial."""
    if not any(alpha):
        raise DomainError("division by e^0 - 1", {"alpha": list(alpha)})
    if not f.is_exact:
        return divide_exact_series(f, alpha)
    result = divide_lines(f, alpha)
    return result.quotient if result.divisible else None


def divide_exact_series(f: CharacterSeries, alpha: Sequence[int], energy=0, through=None) -> Optional[CharacterSeries]:
    """Division of a truncated series; raises InsufficientTruncation if some line stays open."""
    result = divide_lines(f, alpha, energy, through)
    if result.failing:
        return None
    if result.open:
        raise InsufficientTruncation(
            "truncation too small to decide divisibility",
            {"open_lines": [ln.to_json() for ln in result.open[:5]], "truncation": str(f.truncation)},
        )
    return result.quotient


# (q^e0 e^alpha - 1) as a Laurent polynomial
def divisor(alpha: Sequence[int], energy=0, level: int = 0) -> CharacterSeries:
    rank = len(alpha)
    return make_series({monomial(level, energy, alpha): 1, monomial(level, 0, (0,) * rank): -1})


# ------------------------------
# JSON
# ------------------------------

def series_to_json(s: CharacterSeries) -> dict:
    return {
        "truncation": None if s.truncation is None else str(s.truncation),
        "terms": [{"u": m.level, "q": str(m.energy), "weight": list(m.weight), "coeff": c}
                  for m, c in s.sorted_terms()],
    }


def series_from_json(obj: Mapping) -> CharacterSeries:
    trunc = obj.get("truncation")
    terms = []
    for t in obj.get("terms", []):
        terms.append((monomial(t.get("u", 0), Fraction(str(t.get("q", 0))), t["weight"]), int(t.get("coeff", 1))))
    return make_series(terms, None if trunc is None else Fraction(str(trunc)))
