# stalk.py
# Stalk-support analysis on H x Sigma_C: the h = -tau h1 + h2 decomposition, invertible
# characters, fixed-point descriptors, free-space support and euler-class germs.

from __future__ import annotations
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Callable, List, Sequence, Tuple

import numpy as np
import sympy

from affine_weyl import enumerate_finite_weyl, fold_to_alcove, stabilizer_group
from errors import DomainError, UnsupportedInput
from lattice_core import RootDatum, all_roots, is_lattice_vector, pairing
from modular import NElement, SL2ZElement, TWO_PI_I, UpperHalfPoint, sl2_act

RationalVector = Tuple[Fraction, ...]
AffineWeight = Tuple[int, Tuple[int, ...]]     # (m, alpha_bar)


# ------------------------------
# Exact inputs
# ------------------------------

def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise UnsupportedInput("boolean is not a rational coordinate")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if x.is_integer():
            return Fraction(int(x))
        raise UnsupportedInput("floating-point coordinates are not exact; pass p/q strings", {"value": x})
    if isinstance(x, str):
        return Fraction(x.strip())
    s = sympy.nsimplify(x) if isinstance(x, sympy.Float) else sympy.sympify(x)
    if not s.is_Rational:
        raise UnsupportedInput("coordinate is not rational", {"value": str(x)})
    return Fraction(int(s.p), int(s.q))


def rational_vector(v: Sequence) -> RationalVector:
    return tuple(to_fraction(x) for x in v)


def _is_inexact(x) -> bool:
    return isinstance(x, (float, complex, np.floating, np.complexfloating))


def _sym(x):
    if isinstance(x, Fraction):
        return sympy.Rational(x.numerator, x.denominator)
    return sympy.sympify(x)


def _re_im(x):
    if _is_inexact(x):
        c = complex(x)
        return c.real, c.imag
    s = sympy.sympify(x)
    re, im = sympy.re(s), sympy.im(s)
    conv = lambda t: Fraction(int(t.p), int(t.q)) if t.is_Rational else t
    return conv(re), conv(im)


# ------------------------------
# Decomposition
# ------------------------------

def decompose(tau, h: Sequence) -> Tuple[tuple, tuple]:
    """(h1, h2) with h = -tau h1 + h2; exact for Gaussian-rational input, float otherwise."""
    t_re, t_im = _re_im(tau)
    if t_im == 0:
        raise DomainError("tau must not be real", {"tau": str(tau)})
    h1, h2 = [], []
    for x in h:
        x_re, x_im = _re_im(x)
        h1.append(-x_im / t_im)
        h2.append(x_re - t_re * x_im / t_im)
    return tuple(h1), tuple(h2)


def reconstruct(tau, h1: Sequence, h2: Sequence) -> tuple:
    if _is_inexact(tau):
        return tuple(-tau * float(a) + float(b) for a, b in zip(h1, h2))
    t = sympy.sympify(tau)
    return tuple(sympy.expand(-t * _sym(a) + _sym(b)) for a, b in zip(h1, h2))


@dataclass(frozen=True)
class StalkPoint:
    tau: UpperHalfPoint
    h: tuple

    def parts(self) -> Tuple[tuple, tuple]:
        return decompose(self.tau.tau, self.h)


# ------------------------------
# Characters and descriptors
# ------------------------------

def invertible_character(alpha: AffineWeight, h1: Sequence, h2: Sequence) -> bool:
    """True iff alpha_bar(h1) != m or alpha_bar(h2) is not an integer."""
    m, bar = alpha
    v1 = pairing(bar, rational_vector(h1))
    v2 = pairing(bar, rational_vector(h2))
    return v1 != m or Fraction(v2).denominator != 1


def _order(h: RationalVector) -> int:
    # least n >= 1 with n h in the coroot lattice
    return lcm(1, *(x.denominator for x in h))


def joint_order(h1: RationalVector, h2: RationalVector) -> int:
    """Order of the subgroup of T generated by exp(2 pi i h1) and exp(2 pi i h2)."""
    n1, n2 = _order(h1), _order(h2)
    seen = set()
    for a in range(n1):
        for b in range(n2):
            seen.add(tuple((a * x + b * y) % 1 for x, y in zip(h1, h2)))
    return len(seen)


@dataclass
class SupportDescriptor:
    h1: RationalVector
    h2: RationalVector
    walls: Tuple[int, ...]
    order2: int
    denom1: int
    vanishing_roots: List[AffineWeight] = field(default_factory=list)
    folded_point: RationalVector = ()
    stabilizer_order: int = 1
    flag_components: int = 1
    joint_order: int = 1

    def to_json(self) -> dict:
        return {
            "h1": [str(x) for x in self.h1],
            "h2": [str(x) for x in self.h2],
            "walls": list(self.walls),
            "order2": self.order2,
            "denom1": self.denom1,
            "vanishing_roots": [{"m": m, "alpha": list(a)} for m, a in self.vanishing_roots],
            "folded_point": [str(x) for x in self.folded_point],
            "stabilizer_order": self.stabilizer_order,
            "flag_components": self.flag_components,
            "joint_order": self.joint_order,
        }


def support_descriptor(d: RootDatum, h1: Sequence, h2: Sequence) -> SupportDescriptor:
    h1 = rational_vector(h1)
    h2 = rational_vector(h2)
    if len(h1) != d.rank or len(h2) != d.rank:
        raise DomainError("vectors must have one coordinate per simple coroot", {"rank": d.rank})
    point, _ = fold_to_alcove(d, tuple(-x for x in h1))
    walls = tuple(sorted(point.walls))
    vanishing: List[AffineWeight] = []
    for bar in all_roots(d):
        m = pairing(bar, h1)
        if m.denominator == 1 and pairing(bar, h2).denominator == 1:
            vanishing.append((int(m), tuple(bar)))
    vanishing.sort(key=lambda mv: (mv[0], mv[1]))
    stab = len(stabilizer_group(d, walls))
    return SupportDescriptor(
        h1=h1, h2=h2, walls=walls,
        order2=_order(h2), denom1=_order(h1),
        vanishing_roots=vanishing,
        folded_point=point.point,
        stabilizer_order=stab,
        flag_components=len(enumerate_finite_weyl(d)) // stab,
        joint_order=joint_order(h1, h2),
    )


def support_descriptor_at(d: RootDatum, point: StalkPoint) -> SupportDescriptor:
    h1, h2 = point.parts()
    return support_descriptor(d, h1, h2)


def free_space_support(d: RootDatum, h1: Sequence, h2: Sequence) -> bool:
    return is_lattice_vector(rational_vector(h1)) and is_lattice_vector(rational_vector(h2))


# ------------------------------
# Group actions on (h1, h2)
# ------------------------------

# g = (beta1 + beta2) w sends (h1, h2) to (w h1 - beta1, w h2 + beta2)
def transform_parts(g: NElement, h1: Sequence, h2: Sequence) -> Tuple[RationalVector, RationalVector]:
    wh1 = g.w.act_coroot(rational_vector(h1))
    wh2 = g.w.act_coroot(rational_vector(h2))
    return (tuple(a - b for a, b in zip(wh1, g.beta1)), tuple(a + b for a, b in zip(wh2, g.beta2)))


# A sends (h1, h2) to (d h1 + c h2, b h1 + a h2)
def sl2_transform_parts(A: SL2ZElement, h1: Sequence, h2: Sequence) -> Tuple[RationalVector, RationalVector]:
    h1 = rational_vector(h1)
    h2 = rational_vector(h2)
    return (tuple(A.d * x + A.c * y for x, y in zip(h1, h2)), tuple(A.b * x + A.a * y for x, y in zip(h1, h2)))


def transform_affine_weight(g: NElement, alpha: AffineWeight) -> AffineWeight:
    m, bar = alpha
    moved = tuple(int(x) for x in g.w.act_weight(bar))
    return m - int(pairing(moved, g.beta1)), moved


# ------------------------------
# Euler-class germs
# ------------------------------

def euler_germ(weights: Sequence[AffineWeight]) -> Callable[[complex, np.ndarray], complex]:
    """(tau, h) -> prod (1 - exp(-2 pi i (m tau + alpha(h)))) over affine weights (m, alpha)."""
    ws = [(m, np.array(bar, dtype=float)) for m, bar in weights]

    def germ(tau: complex, h) -> complex:
        hv = np.asarray(h, dtype=complex)
        out = 1.0 + 0j
        for m, bar in ws:
            out *= 1 - np.exp(-TWO_PI_I * (m * tau + complex(bar @ hv)))
        return complex(out)

    return germ


def sl2_pulled_euler_germ(A: SL2ZElement, weights: Sequence[AffineWeight]) -> Callable[[complex, np.ndarray], complex]:
    base = euler_germ(weights)

    def germ(tau: complex, h) -> complex:
        t2, h2 = sl2_act(A, tau, h)
        return base(t2, h2)

    return germ
