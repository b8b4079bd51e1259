# modular.py
# The groups N, N2(Z) and the double cover M2(Z): their actions on H x Sigma_C and on the
# line L, the mu form and eta cocycle, and numeric evaluation of theta sections.

from __future__ import annotations
from dataclasses import dataclass, field
from fractions import Fraction
from math import gamma, pi, sqrt
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from affine_weyl import AffineWeylElement, FiniteWeylElement, weyl_group
from errors import DomainError, InsufficientTruncation, NormalizationError
from lattice_core import RootDatum, basic_form
from theta import ThetaSeries, gram_inverse

TWO_PI_I = 2j * pi


@dataclass(frozen=True)
class UpperHalfPoint:
    tau: complex

    def __post_init__(self):
        if not complex(self.tau).imag > 0:
            raise DomainError("tau must lie in the upper half plane", {"tau": str(self.tau)})


@dataclass(frozen=True)
class SL2ZElement:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise DomainError("matrix is not in SL2(Z)", {"matrix": [[self.a, self.b], [self.c, self.d]]})

    def __matmul__(self, other: "SL2ZElement") -> "SL2ZElement":
        return SL2ZElement(self.a * other.a + self.b * other.c, self.a * other.b + self.b * other.d,
                           self.c * other.a + self.d * other.c, self.c * other.b + self.d * other.d)

    def inverse(self) -> "SL2ZElement":
        return SL2ZElement(self.d, -self.b, -self.c, self.a)

    def to_json(self) -> list:
        return [[self.a, self.b], [self.c, self.d]]


SL2_IDENTITY = SL2ZElement(1, 0, 0, 1)
SL2_S = SL2ZElement(0, -1, 1, 0)
SL2_T = SL2ZElement(1, 1, 0, 1)


@dataclass(frozen=True)
class NElement:
    beta1: Tuple[int, ...]
    beta2: Tuple[int, ...]
    w: FiniteWeylElement


@dataclass(frozen=True)
class M2Element:
    sign: int                      # central Z/2, acts on the line by -1
    beta1: Tuple[int, ...]
    beta2: Tuple[int, ...]
    w: FiniteWeylElement
    A: SL2ZElement

    def to_json(self) -> dict:
        return {"sign": self.sign, "beta1": list(self.beta1), "beta2": list(self.beta2),
                "word": [i + 1 for i in self.w.word], "A": self.A.to_json()}


# ------------------------------
# N acting on H x Sigma_C and on L
# ------------------------------

def _vec(h: Sequence) -> np.ndarray:
    return np.asarray(h, dtype=complex)


def _gram(d) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in d.gram])


def complex_form(d, x: Sequence, y: Sequence) -> complex:
    """C-bilinear extension of the basic form (no conjugation)."""
    return complex(_vec(x) @ _gram(d) @ _vec(y))


def n_act(g: NElement, tau: complex, h: Sequence) -> Tuple[complex, np.ndarray]:
    wh = _vec(g.w.act_coroot(_vec(h)))
    return tau, wh + tau * _vec(g.beta1) + _vec(g.beta2)


def n_act_line(d, g: NElement, tau: complex, h: Sequence, z: complex) -> Tuple[complex, np.ndarray, complex]:
    wh = _vec(g.w.act_coroot(_vec(h)))
    b1 = _vec(g.beta1)
    factor = np.exp(TWO_PI_I * complex_form(d, b1, wh) + 1j * pi * tau * complex_form(d, b1, b1))
    return tau, wh + tau * b1 + _vec(g.beta2), z * factor


def n_multiply(d, g1: NElement, g2: NElement) -> NElement:
    wb1 = g1.w.act_coroot(g2.beta1)
    wb2 = g1.w.act_coroot(g2.beta2)
    return NElement(tuple(int(a + b) for a, b in zip(g1.beta1, wb1)),
                    tuple(int(a + b) for a, b in zip(g1.beta2, wb2)),
                    weyl_group(d).multiply(g1.w, g2.w))


# (beta1 + beta2) w acts on -h1 through (beta1, w) in the affine Weyl group
def project_to_affine(g: NElement) -> AffineWeylElement:
    return AffineWeylElement(tuple(g.beta1), g.w)


# ------------------------------
# SL2(Z)
# ------------------------------

def sl2_act(A: SL2ZElement, tau: complex, h: Sequence) -> Tuple[complex, np.ndarray]:
    j = A.c * tau + A.d
    return (A.a * tau + A.b) / j, _vec(h) / j


def sl2_act_line(d, A: SL2ZElement, tau: complex, h: Sequence, z: complex) -> Tuple[complex, np.ndarray, complex]:
    j = A.c * tau + A.d
    factor = np.exp(-1j * pi * A.c * complex_form(d, h, h) / j)
    return (A.a * tau + A.b) / j, _vec(h) / j, z * factor


# ------------------------------
# mu, eta and M2(Z)
# ------------------------------

def mu(d, beta1: Sequence[int], beta2: Sequence[int]) -> int:
    v = basic_form(d, beta1, beta2)
    if Fraction(v).denominator != 1:
        raise NormalizationError("pairing of lattice vectors is not integral",
                                 {"beta1": list(beta1), "beta2": list(beta2), "value": str(v)})
    return int(v) % 2


# (beta1, beta2) * A = (a beta1 + c beta2, b beta1 + d beta2), a right action
def pair_act(beta1: Sequence[int], beta2: Sequence[int], A: SL2ZElement) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    return (tuple(A.a * x + A.c * y for x, y in zip(beta1, beta2)),
            tuple(A.b * x + A.d * y for x, y in zip(beta1, beta2)))


def eta(d, beta1: Sequence[int], beta2: Sequence[int], A: SL2ZElement) -> int:
    g1, g2 = pair_act(beta1, beta2, A)
    return (mu(d, g1, g2) - mu(d, beta1, beta2)) % 2


# Weyl data for root data; a bare lattice only carries the trivial Weyl element
def _w_identity(d) -> FiniteWeylElement:
    if isinstance(d, RootDatum):
        return weyl_group(d).identity
    ident = tuple(tuple(int(i == j) for j in range(d.rank)) for i in range(d.rank))
    return FiniteWeylElement((), ident, ident)


def _w_multiply(d, a: FiniteWeylElement, b: FiniteWeylElement) -> FiniteWeylElement:
    if not a.word:
        return b
    if not b.word:
        return a
    return weyl_group(d).multiply(a, b)


def _w_inverse(d, a: FiniteWeylElement) -> FiniteWeylElement:
    return a if not a.word else weyl_group(d).inverse(a)


def m2_identity(d) -> M2Element:
    zero = tuple(0 for _ in range(d.rank))
    return M2Element(0, zero, zero, _w_identity(d), SL2_IDENTITY)


def m2_from_n(g: NElement) -> M2Element:
    return M2Element(0, tuple(g.beta1), tuple(g.beta2), g.w, SL2_IDENTITY)


def m2_from_sl2(d, A: SL2ZElement) -> M2Element:
    zero = tuple(0 for _ in range(d.rank))
    return M2Element(0, zero, zero, _w_identity(d), A)


def m2_multiply(d, g1: M2Element, g2: M2Element) -> M2Element:
    """Product in normal form (sign, beta, w, A): A1 is pushed right past beta2 using
    A1 gamma A1^-1 = z^eta(delta, A1) delta with delta = gamma * A1^-1."""
    delta1, delta2 = pair_act(g2.beta1, g2.beta2, g1.A.inverse())
    sign = (g1.sign + g2.sign + eta(d, delta1, delta2, g1.A)) % 2
    wd1 = g1.w.act_coroot(delta1)
    wd2 = g1.w.act_coroot(delta2)
    return M2Element(
        sign,
        tuple(int(a + b) for a, b in zip(g1.beta1, wd1)),
        tuple(int(a + b) for a, b in zip(g1.beta2, wd2)),
        _w_multiply(d, g1.w, g2.w),
        g1.A @ g2.A,
    )


def m2_inverse(d, g: M2Element) -> M2Element:
    # invert the factors right to left: A^-1 w^-1 (-beta) z^s
    winv = _w_inverse(d, g.w)
    zero = tuple(0 for _ in range(d.rank))
    out = m2_from_sl2(d, g.A.inverse())
    out = m2_multiply(d, out, M2Element(0, zero, zero, winv, SL2_IDENTITY))
    out = m2_multiply(d, out, M2Element(g.sign, tuple(-x for x in g.beta1), tuple(-x for x in g.beta2),
                                        _w_identity(d), SL2_IDENTITY))
    return out


def m2_act_line(d, g: M2Element, tau: complex, h: Sequence, z: complex) -> Tuple[complex, np.ndarray, complex]:
    """z^s beta w A acting on L: A first, then w, then beta, then the central sign."""
    tau, h, z = sl2_act_line(d, g.A, tau, h, z)
    tau, h, z = n_act_line(d, NElement(g.beta1, g.beta2, g.w), tau, h, z)
    return tau, h, -z if g.sign else z


# The action descends to W x SL2(Z) on L^k when the lattice is even or k is even
def is_even_lattice(d) -> bool:
    return all(Fraction(d.gram[i][i]).denominator == 1 and int(d.gram[i][i]) % 2 == 0 for i in range(len(d.gram)))


def descends_to_w_sl2(d, k: int) -> bool:
    return is_even_lattice(d) or k % 2 == 0


# ------------------------------
# Section evaluation
# ------------------------------

@dataclass
class SectionValue:
    value: complex
    tail_bound: float           # bound on the omitted terms
    scale: float                # sum of |term| over the kept terms

    @property
    def relative_tail(self) -> float:
        if self.scale > 0:
            return self.tail_bound / self.scale
        return float("inf") if self.tail_bound > 0 else 0.0


def _ball_count(n: int, radius: float, cell_radius: float, det_sqrt: float) -> float:
    # Upper bound on lattice points within `radius` of any centre. The fundamental
    # parallelepipeds (volume det_sqrt, diameter <= 2 * cell_radius) of those points are
    # disjoint and lie in the ball of radius + cell_radius, so count <= vol(ball) / det_sqrt.
    vol = pi ** (n / 2) / gamma(n / 2 + 1)
    return vol * (radius + cell_radius) ** n / det_sqrt


def tail_bound(d, theta: ThetaSeries, tau: complex, h: Sequence, z: complex) -> float:
    """Bound on the sum of |terms| over theta terms with energy above the truncation.

    A lattice point gamma contributes exp(log_k - pi y k ||gamma + c||^2), with c the centre
    shifted by Im h / Im tau. Omitted points satisfy ||gamma + c0|| >= rho0, hence
    ||gamma + c|| >= rho. The tail is summed over unit-width shells rho + j <= r < rho + j + 1,
    each bounded by its point count (_ball_count) times the largest term on the shell.
    """
    if theta.truncation is None:
        return 0.0
    src = theta.source
    k, n_off = src.level, float(src.energy)
    y = complex(tau).imag
    v = np.asarray(_vec(h).imag, dtype=float)
    G = _gram(d)
    Ginv = np.array([[float(x) for x in row] for row in gram_inverse(d.gram)])
    lam = np.array(src.weight, dtype=float)
    c0 = Ginv @ lam / k
    c = c0 + v / y
    norm = lambda x: sqrt(max(float(x @ G @ x), 0.0))
    log_k = (k * np.log(abs(z)) - 2 * pi * y * n_off - 2 * pi * float(lam @ v)
             + pi * y * k * float(c @ G @ c))
    rho0_sq = 2 * (float(theta.truncation) - n_off) / k + float(c0 @ G @ c0)
    rho = sqrt(max(rho0_sq, 0.0)) - norm(c - c0)
    rho = max(rho, 0.0)
    dim = len(d.gram)
    cell = 0.5 * sum(sqrt(G[i, i]) for i in range(dim))
    det_sqrt = sqrt(float(np.linalg.det(G)))
    a = pi * y * k
    total = 0.0
    step = 1.0
    for j in range(100000):
        r_lo = rho + j * step
        term = _ball_count(dim, r_lo + step, cell, det_sqrt) * np.exp(log_k - a * r_lo * r_lo)
        total += term
        if j > 2 and term < 1e-18 * max(total, 1e-300):
            break
    return float(total)


def evaluate_section(d, theta: ThetaSeries, tau: complex, h: Sequence, z: complex = 1.0,
                     tolerance: Optional[float] = None) -> SectionValue:
    """sum coeff z^m e^{2 pi i tau e} e^{2 pi i lambda(h)} over stored terms, with a tail bound."""
    UpperHalfPoint(tau)
    hv = _vec(h)
    value = 0j
    scale = 0.0
    for mono, coeff in theta.series.sorted_terms():
        t = coeff * (z ** mono.level) * np.exp(TWO_PI_I * (tau * float(mono.energy)
                                                          + complex(np.dot(np.array(mono.weight, dtype=float), hv))))
        value += t
        scale += abs(t)
    out = SectionValue(complex(value), tail_bound(d, theta, tau, h, z), float(scale))
    if tolerance is not None and out.relative_tail > tolerance:
        raise InsufficientTruncation("theta tail exceeds tolerance",
                                     {"tail_bound": out.tail_bound, "scale": out.scale,
                                      "truncation": str(theta.truncation), "tolerance": tolerance})
    return out


@dataclass
class SectionReport:
    errors: Dict[str, float] = field(default_factory=dict)
    tail_bounds: Dict[str, float] = field(default_factory=dict)
    tolerance: float = 1e-8

    @property
    def passed(self) -> bool:
        return all(e <= self.tolerance for e in self.errors.values())

    def to_json(self) -> dict:
        return {"passed": self.passed, "errors": dict(self.errors),
                "tail_bounds": dict(self.tail_bounds), "tolerance": self.tolerance}


def _rel(lhs: SectionValue, rhs: SectionValue, rhs_factor: complex = 1.0) -> float:
    denom = max(lhs.scale, abs(rhs_factor) * rhs.scale, 1e-300)
    return abs(lhs.value - rhs_factor * rhs.value) / denom


def verify_section_transform(d, theta: ThetaSeries, tau: complex, h: Sequence, z: complex,
                             beta: Sequence[int], tol: float) -> SectionReport:
    """Check phi(h + beta) = phi(h), phi(h) = e(k<beta,h> + k tau <beta,beta>/2) phi(h + tau beta)
    and phi(2z) = 2^k phi(z), all as relative errors against tol."""
    k = theta.source.level
    hv = _vec(h)
    b = _vec(beta)
    ev = lambda hh, zz: evaluate_section(d, theta, tau, hh, zz, tolerance=tol)
    base = ev(hv, z)
    shifted = ev(hv + b, z)
    quasi = ev(hv + tau * b, z)
    doubled = ev(hv, 2 * z)
    factor = np.exp(TWO_PI_I * k * complex_form(d, b, hv) + 1j * pi * k * tau * complex_form(d, b, b))
    report = SectionReport(tolerance=tol)
    report.errors["periodicity"] = _rel(shifted, base)
    report.errors["quasi_periodicity"] = _rel(base, quasi, factor)
    report.errors["homogeneity"] = _rel(doubled, base, 2 ** k)
    report.tail_bounds = {"base": base.tail_bound, "shifted": shifted.tail_bound,
                          "quasi": quasi.tail_bound, "doubled": doubled.tail_bound}
    return report


# ------------------------------
# Order of vanishing
# ------------------------------

@dataclass
class ProbeResult:
    status: str            # ok | indeterminate
    order: Optional[int]
    slope: float
    residual: float

    def to_json(self) -> dict:
        return {"status": self.status, "order": self.order, "slope": self.slope, "residual": self.residual}


def vanishing_order_probe(f: Callable[[complex, np.ndarray], complex], center: Tuple[complex, Sequence],
                          direction: Tuple[complex, Sequence], radius: float = 1e-2, samples: int = 24) -> ProbeResult:
    """Least-squares slope of log|f| against log t along center + t * direction."""
    tau0, h0 = complex(center[0]), _vec(center[1])
    dtau, dh = complex(direction[0]), _vec(direction[1])
    ts = np.geomspace(radius * 1e-3, radius, samples)
    logs = []
    for t in ts:
        val = f(tau0 + t * dtau, h0 + t * dh)
        logs.append(np.log(abs(val)) if val != 0 else -np.inf)
    logs = np.array(logs, dtype=float)
    if not np.all(np.isfinite(logs)):
        return ProbeResult("indeterminate", None, float("nan"), float("inf"))
    slope, icpt = np.polyfit(np.log(ts), logs, 1)
    residual = float(np.max(np.abs(logs - (slope * np.log(ts) + icpt))))
    if not np.isfinite(slope):
        return ProbeResult("indeterminate", None, float(slope), residual)
    order = int(round(slope))
    if abs(slope - order) > 0.25:
        return ProbeResult("indeterminate", None, float(slope), residual)
    return ProbeResult("ok", order, float(slope), residual)
