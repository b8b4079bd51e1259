# theta.py
# Level-k theta series as exact truncated q-series, Weyl (anti)symmetrization,
# level-k weight enumeration and Euler-theta divisibility certificates.

from __future__ import annotations
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import ceil, floor, sqrt
from typing import Dict, List, Optional, Sequence, Tuple

import sympy

from affine_weyl import (
    AffineWeylElement, CoverPair, affine_multiply, affine_reflection, enumerate_affine_weyl,
    enumerate_finite_weyl,
)
from char_ring import (
    CharacterMonomial, CharacterSeries, add, agree, divide_lines, divisor, finite_weyl_act,
    lattice_translate, make_series, monomial, monomial_series, mul, scale, series_to_json, truncate,
)
from errors import DomainError, FactorizationMismatch
from lattice_core import RootDatum, basic_form, coroot_of, dual_weight, pairing, root_length_sq

# a cover line of w*theta - v*theta meets each Weyl component in at most two terms
MAX_COVER_LINE_TERMS = 4


@dataclass(frozen=True)
class LevelKCharacter:
    weight: Tuple[int, ...]      # finite part lambda_bar
    level: int                   # k
    energy: Fraction = Fraction(0)

    def __post_init__(self):
        if self.level <= 0:
            raise DomainError("level must be positive", {"level": self.level})


@dataclass(frozen=True)
class ThetaSeries:
    series: CharacterSeries
    source: LevelKCharacter

    @property
    def truncation(self) -> Optional[Fraction]:
        return self.series.truncation

    @property
    def terms(self):
        return self.series.terms

    def to_json(self) -> dict:
        out = series_to_json(self.series)
        out["level"] = self.source.level
        out["lambda"] = list(self.source.weight)
        out["energy_offset"] = str(self.source.energy)
        return out


@dataclass
class EulerThetaClass:
    source: LevelKCharacter
    components: Dict[object, ThetaSeries] = field(default_factory=dict)


# ------------------------------
# Shell enumeration
# ------------------------------

@lru_cache(maxsize=None)
def _ldl(gram: Tuple[Tuple[Fraction, ...], ...]):
    L, D = sympy.Matrix(gram).LDLdecomposition()
    n = len(gram)
    to_frac = lambda x: Fraction(int(sympy.Rational(x).p), int(sympy.Rational(x).q))
    return (tuple(tuple(to_frac(L[i, j]) for j in range(n)) for i in range(n)),
            tuple(to_frac(D[i, i]) for i in range(n)))


@lru_cache(maxsize=None)
def gram_inverse(gram: Tuple[Tuple[Fraction, ...], ...]):
    inv = sympy.Matrix(gram).inv()
    n = len(gram)
    return tuple(tuple(Fraction(int(inv[i, j].p), int(inv[i, j].q)) for j in range(n)) for i in range(n))


def _center(d: RootDatum, lam: LevelKCharacter) -> Tuple[Tuple[Fraction, ...], Fraction]:
    # c with G c = lambda / k, and c^T G c
    n = d.rank
    G = d.gram
    Ginv = gram_inverse(G)
    c = tuple(sum((Ginv[i][j] * lam.weight[j] for j in range(n)), Fraction(0)) / lam.level for i in range(n))
    return c, sum((c[i] * G[i][j] * c[j] for i in range(n) for j in range(n)), Fraction(0))


def shell_points(d: RootDatum, lam: LevelKCharacter, order) -> List[Tuple[Tuple[int, ...], Fraction]]:
    """All beta in the coroot lattice with n + lambda(beta) + k/2 <beta,beta> <= order, with energies.

    Completing the square gives (beta + c)^T G (beta + c) <= R^2 with G c = lambda / k;
    coordinates are bounded from the last one down through G = L D L^T and every
    partial sum is checked exactly, so no point is missed.
    """
    order = Fraction(order)
    k = lam.level
    n = d.rank
    G = d.gram
    c, cGc = _center(d, lam)
    radius_sq = 2 * (order - lam.energy) / k + cGc
    if radius_sq < 0:
        return []
    L, D = _ldl(G)
    found: List[Tuple[Tuple[int, ...], Fraction]] = []
    beta = [0] * n

    def descend(i: int, remaining: Fraction):
        # x_j = beta_j + c_j; term i is D_i (x_i + sum_{j>i} L_ji x_j)^2
        s = sum((L[j][i] * (beta[j] + c[j]) for j in range(i + 1, n)), Fraction(0))
        r = sqrt(float(remaining / D[i]))
        lo = ceil(-r - float(c[i] + s)) - 1
        hi = floor(r - float(c[i] + s)) + 1
        for b in range(lo, hi + 1):
            y = b + c[i] + s
            rest = remaining - D[i] * y * y
            if rest < 0:
                continue
            beta[i] = b
            if i == 0:
                vec = tuple(beta)
                e = lam.energy + pairing(lam.weight, vec) + Fraction(k, 2) * basic_form(d, vec, vec)
                if e <= order:
                    found.append((vec, e))
            else:
                descend(i - 1, rest)
        beta[i] = 0

    descend(n - 1, radius_sq)
    found.sort(key=lambda be: (be[1], be[0]))
    return found


# ------------------------------
# Theta series
# ------------------------------

def theta_term(d: RootDatum, lam: LevelKCharacter, beta: Sequence[int]) -> CharacterMonomial:
    # beta * (u^k q^n e^lambda)
    k = lam.level
    e = lam.energy + pairing(lam.weight, beta) + Fraction(k, 2) * basic_form(d, beta, beta)
    star = dual_weight(d, beta)
    return monomial(k, e, tuple(x + k * b for x, b in zip(lam.weight, star)))


def theta_lambda(d: RootDatum, lam: LevelKCharacter, order) -> ThetaSeries:
    if lam.level <= 0:
        raise DomainError("theta series needs a positive level", {"level": lam.level})
    terms = {theta_term(d, lam, beta): 1 for beta, _ in shell_points(d, lam, order)}
    return ThetaSeries(make_series(terms, Fraction(order)), lam)


def theta_weyl_act(w, theta: ThetaSeries) -> ThetaSeries:
    src = theta.source
    moved = LevelKCharacter(tuple(int(x) for x in w.act_weight(src.weight)), src.level, src.energy)
    return ThetaSeries(finite_weyl_act(w, theta.series), moved)


def lattice_shells(d: RootDatum, count: int = 2) -> List[Tuple[int, ...]]:
    """Nonzero coroot-lattice vectors on the `count` smallest values of <beta,beta>."""
    trivial = LevelKCharacter(tuple(0 for _ in range(d.rank)), 1)
    order = Fraction(1)
    while True:
        pts = [(b, e) for b, e in shell_points(d, trivial, order) if any(b)]
        energies = sorted({e for _, e in pts})
        if len(energies) >= count:
            return [b for b, e in pts if e <= energies[count - 1]]
        order *= 2


def check_lattice_invariance(d: RootDatum, lam: LevelKCharacter, beta: Sequence[int], order) -> bool:
    """beta * theta_lambda agrees with theta_lambda through `order`.

    theta is expanded far enough that every term of energy <= order has its
    beta-preimage present: ||gamma - beta + c|| <= ||gamma + c|| + ||beta||.
    """
    order = Fraction(order)
    k = lam.level
    _, cGc = _center(d, lam)
    base = lam.energy - Fraction(k, 2) * cGc
    radius = sqrt(max(float(2 * (order - base) / k), 0.0)) + sqrt(float(basic_form(d, beta, beta)))
    wide = Fraction(ceil(float(base) + k / 2 * radius * radius)) + 1
    moved = lattice_translate(d, beta, theta_lambda(d, lam, wide).series)
    lhs = {m: c for m, c in moved.terms.items() if m.energy <= order}
    return lhs == theta_lambda(d, lam, order).terms


# W-tilde acts through its finite part and then the translation
def affine_act(d: RootDatum, g: AffineWeylElement, s: CharacterSeries) -> CharacterSeries:
    return lattice_translate(d, g.translation, finite_weyl_act(g.finite, s))


def enumerate_level_k(d: RootDatum, k: int) -> List[Tuple[int, ...]]:
    """Dominant weights with lambda(h_{alpha_0}) <= k, in lexicographic order."""
    if k < 0:
        raise DomainError("level must be non-negative", {"level": k})
    bounds = [range(k // a + 1) for a in d.comarks]
    return [lam for lam in product(*bounds) if pairing(lam, d.comarks) <= k]


def weyl_invariantize(d: RootDatum, theta: ThetaSeries) -> CharacterSeries:
    total = make_series({}, theta.truncation)
    for w in enumerate_finite_weyl(d):
        total = add(total, finite_weyl_act(w, theta.series))
    return total


def antisymmetrize(d: RootDatum, theta: ThetaSeries) -> CharacterSeries:
    total = make_series({}, theta.truncation)
    for w in enumerate_finite_weyl(d):
        total = add(total, scale(finite_weyl_act(w, theta.series), w.sign))
    return total


# Rank of the W-symmetrized level-k thetas; equals the number of level-k weights
def invariant_theta_rank(d: RootDatum, k: int, order) -> int:
    vectors = []
    for lam in enumerate_level_k(d, k):
        vectors.append(weyl_invariantize(d, theta_lambda(d, LevelKCharacter(lam, k), order)))
    if not vectors:
        return 0
    support = sorted({m for v in vectors for m in v.terms}, key=lambda m: (m.energy, m.weight))
    M = sympy.Matrix([[v.coefficient(m) for m in support] for v in vectors])
    return int(M.rank())


def euler_theta_class(d: RootDatum, lam: LevelKCharacter, order) -> EulerThetaClass:
    theta = theta_lambda(d, lam, order)
    out = EulerThetaClass(lam)
    for w in enumerate_finite_weyl(d):
        out.components[w] = theta_weyl_act(w, theta)
    return out


# Components indexed by affine elements up to a length bound
def euler_theta_class_affine(d: RootDatum, lam: LevelKCharacter, order, length_bound: int) -> Dict[AffineWeylElement, CharacterSeries]:
    theta = theta_lambda(d, lam, order)
    return {g: affine_act(d, g, theta.series) for _, g in enumerate_affine_weyl(d, length_bound)}


# ------------------------------
# Cover divisibility
# ------------------------------

@dataclass
class DivisibilityCertificate:
    status: str                          # pass | fail | indeterminate
    order: Fraction
    working_order: Fraction
    divisor_weight: Tuple[int, ...]
    divisor_energy: Fraction
    quotient: Optional[CharacterSeries] = None
    multiply_back: Optional[bool] = None
    counterexample: Optional[dict] = None
    open_lines: int = 0
    attempts: int = 0

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "order": str(self.order),
            "working_order": str(self.working_order),
            "divisor": {"weight": list(self.divisor_weight), "energy": str(self.divisor_energy)},
            "quotient": None if self.quotient is None else series_to_json(self.quotient),
            "multiply_back": self.multiply_back,
            "counterexample": self.counterexample,
            "open_lines": self.open_lines,
            "attempts": self.attempts,
        }


def cover_difference(d: RootDatum, lam: LevelKCharacter, pair: CoverPair, order) -> CharacterSeries:
    # w * theta = w_bar * theta since theta is invariant under the coroot lattice
    theta = theta_lambda(d, lam, order)
    return add(finite_weyl_act(pair.w.finite, theta.series), scale(finite_weyl_act(pair.v.finite, theta.series), -1))


def check_cover_divisibility(d: RootDatum, lam: LevelKCharacter, pair: CoverPair, order,
                             margin: int = 8, max_refinements: int = 4) -> DivisibilityCertificate:
    """Is w*theta - v*theta divisible by e^alpha - 1 through q-order `order`?

    The affine root h -> alpha(h) + m is the character q^{-m} e^{alpha}. The difference
    is expanded to a working order above `order` until every coset line starting at or
    below `order` is decided; lines that never close give an indeterminate result.
    """
    order = Fraction(order)
    e0 = Fraction(-pair.m)
    work = order
    result = None
    attempts = 0
    for attempts in range(1, max_refinements + 2):
        work = order + margin * (2 ** (attempts - 1)) if margin else order
        f = cover_difference(d, lam, pair, work)
        result = divide_lines(f, pair.root, e0, through=order)
        for line in result.open:
            if len(line.coeffs) >= MAX_COVER_LINE_TERMS:
                line.status = "failing"
        if result.failing or not result.open:
            break
    cert = DivisibilityCertificate("indeterminate", order, work, tuple(pair.root), e0, attempts=attempts)
    if result.failing:
        cert.status = "fail"
        cert.counterexample = result.failing[0].to_json()
        return cert
    if result.open:
        cert.open_lines = len(result.open)
        return cert
    back = mul(result.quotient, divisor(pair.root, e0))
    cert.quotient = result.quotient
    cert.multiply_back = agree(back, truncate(f, order))
    cert.status = "pass" if cert.multiply_back else "fail"
    return cert


@dataclass
class Factorization:
    lhs: CharacterSeries        # w*Y0 - v*Y0
    rhs: CharacterSeries        # Y (x^{-N} - 1)
    phi: CharacterSeries        # lhs / (x - 1)
    exponent: int               # N
    x_energy: Fraction


def _factor(d: RootDatum, w: AffineWeylElement, v: AffineWeylElement, lam: LevelKCharacter,
            alpha: Tuple[int, ...], m: int, beta: Sequence[int]) -> Factorization:
    if affine_multiply(d, affine_reflection(d, alpha, m), v) != w:
        raise DomainError("w is not r_alpha v", {"alpha": list(alpha), "m": m})
    start = make_series({theta_term(d, lam, beta): 1})
    y_series = affine_act(d, v, start)
    lhs = add(affine_act(d, w, start), scale(y_series, -1))
    (y, _), = y_series.terms.items()
    n_exp = Fraction(pairing(y.weight, coroot_of(d, alpha))) + Fraction(2 * lam.level * m) / root_length_sq(d, alpha)
    if n_exp.denominator != 1:
        raise FactorizationMismatch("reflection exponent is not integral", {"N": str(n_exp)})
    n_exp = int(n_exp)
    x_energy = Fraction(-m)

    def x_pow(j: int) -> CharacterSeries:
        return monomial_series(0, j * x_energy, tuple(j * a for a in alpha))

    rhs = mul(y_series, add(x_pow(-n_exp), scale(x_pow(0), -1)))
    # x^{-N} - 1 = (x - 1) * (-sum_{j=-N}^{-1} x^j)  or  (x - 1) * sum_{j=0}^{-N-1} x^j
    powers = range(-n_exp, 0) if n_exp > 0 else range(0, -n_exp)
    geo = make_series({})
    for j in powers:
        geo = add(geo, x_pow(j))
    phi = scale(mul(y_series, geo), -1 if n_exp > 0 else 1)
    return Factorization(lhs, rhs, phi, n_exp, x_energy)


def factorization_witness(d: RootDatum, w: AffineWeylElement, v: AffineWeylElement, lam: LevelKCharacter,
                          alpha: Sequence[int], m: int, beta: Sequence[int]) -> dict:
    """w*(beta*e^lambda) - v*(beta*e^lambda) = Y (x^{-N} - 1) = (x - 1) phi.

    Y = v*(beta*e^lambda), x = q^{-m} e^alpha and N = mu(h_alpha) + 2km/(alpha,alpha) with mu
    the weight of Y. Raises FactorizationMismatch when either identity fails.
    """
    alpha = tuple(alpha)
    fac = _factor(d, w, v, lam, alpha, m, beta)
    report = {
        "lhs": series_to_json(fac.lhs), "rhs": series_to_json(fac.rhs), "phi": series_to_json(fac.phi),
        "exponent": fac.exponent, "beta": list(beta), "alpha": {"finite": list(alpha), "m": m},
    }
    if fac.lhs.terms != fac.rhs.terms:
        raise FactorizationMismatch("w*Y - v*Y differs from Y(x^-N - 1)", report)
    if mul(fac.phi, divisor(alpha, fac.x_energy)).terms != fac.lhs.terms:
        raise FactorizationMismatch("phi (x - 1) differs from the difference", report)
    report["match"] = True
    return report
