# property_checks.py
# Seeded property runs behind the verify commands: group laws for N, SL2(Z) and M2(Z),
# theta invariances, section transforms and cover-divisibility sweeps.

from __future__ import annotations
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from affine_weyl import bruhat_cover_pairs, enumerate_finite_weyl
from char_ring import finite_weyl_act
from lattice_core import RootDatum
from modular import (
    M2Element, NElement, SL2_IDENTITY, SL2_S, SL2ZElement, eta, is_even_lattice, m2_act_line,
    m2_from_n, m2_from_sl2, m2_identity, m2_inverse, m2_multiply, n_act, n_multiply, pair_act,
    sl2_act, verify_section_transform,
)
from theta import (
    LevelKCharacter, check_cover_divisibility, check_lattice_invariance, enumerate_level_k,
    factorization_witness, invariant_theta_rank, lattice_shells, theta_lambda, weyl_invariantize,
)

NUMERIC_TOL = 1e-8


def _bar(iterable, progress: bool, desc: str):
    return tqdm(iterable, desc=desc, disable=not progress, file=sys.stderr, leave=False)


def _err(a, b) -> float:
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    b = np.atleast_1d(np.asarray(b, dtype=complex))
    scale = max(1.0, float(np.max(np.abs(a))), float(np.max(np.abs(b))))
    return float(np.max(np.abs(a - b))) / scale


# ------------------------------
# Samplers
# ------------------------------

def sample_lattice(d, rng: np.random.Generator, bound: int = 2) -> Tuple[int, ...]:
    return tuple(int(x) for x in rng.integers(-bound, bound + 1, len(d.gram)))


def sample_sl2(rng: np.random.Generator, steps: int = 3, bound: int = 2) -> SL2ZElement:
    # words in T^n S
    A = SL2_IDENTITY
    for _ in range(int(rng.integers(0, steps + 1))):
        n = int(rng.integers(-bound, bound + 1))
        A = A @ SL2ZElement(1, n, 0, 1) @ SL2_S
    return A


def sample_n_element(d: RootDatum, rng: np.random.Generator, bound: int = 2) -> NElement:
    ws = enumerate_finite_weyl(d)
    return NElement(sample_lattice(d, rng, bound), sample_lattice(d, rng, bound), ws[int(rng.integers(len(ws)))])


def sample_m2(d: RootDatum, rng: np.random.Generator, bound: int = 2, steps: int = 3) -> M2Element:
    g = sample_n_element(d, rng, bound)
    return M2Element(int(rng.integers(2)), g.beta1, g.beta2, g.w, sample_sl2(rng, steps, bound))


def sample_point(d, rng: np.random.Generator, im_floor: float = 0.5) -> Tuple[complex, np.ndarray, complex]:
    n = len(d.gram)
    tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(im_floor, im_floor + 1.5))
    h = rng.uniform(-0.5, 0.5, n) + 1j * rng.uniform(-0.5, 0.5, n)
    z = complex(rng.uniform(0.5, 1.5), rng.uniform(-0.5, 0.5))
    return tau, h, z


# ------------------------------
# Group laws
# ------------------------------

def group_law_report(d: RootDatum, samples: int, seed: int, im_floor: float = 0.5,
                     tol: float = NUMERIC_TOL, progress: bool = False) -> dict:
    """Exact M2(Z) laws on random triples and numeric action laws on random points."""
    rng = np.random.default_rng(seed)
    even = is_even_lattice(d)
    ident_w = enumerate_finite_weyl(d)[0]
    failures: Dict[str, int] = {
        "m2_associativity": 0, "m2_relation": 0, "m2_inverse": 0, "split_n": 0, "split_sl2": 0,
        "n_action": 0, "sl2_action": 0, "line_action": 0, "eta_trivial": 0,
    }
    worst = {"n_action": 0.0, "sl2_action": 0.0, "line_action": 0.0}
    first: Dict[str, dict] = {}

    def fail(key: str, **detail):
        failures[key] += 1
        first.setdefault(key, {k: v.to_json() if hasattr(v, "to_json") else v for k, v in detail.items()})

    for _ in _bar(range(samples), progress, "group laws"):
        g1, g2, g3 = sample_m2(d, rng), sample_m2(d, rng), sample_m2(d, rng)
        if m2_multiply(d, m2_multiply(d, g1, g2), g3) != m2_multiply(d, g1, m2_multiply(d, g2, g3)):
            fail("m2_associativity", g1=g1, g2=g2, g3=g3)
        if m2_multiply(d, g1, m2_inverse(d, g1)) != m2_identity(d):
            fail("m2_inverse", g=g1)

        A, b1, b2 = g1.A, g2.beta1, g2.beta2
        lattice = M2Element(0, b1, b2, ident_w, SL2_IDENTITY)
        lhs = m2_multiply(d, m2_from_sl2(d, A.inverse()), m2_multiply(d, lattice, m2_from_sl2(d, A)))
        c1, c2 = pair_act(b1, b2, A)
        if lhs != M2Element(eta(d, b1, b2, A), c1, c2, ident_w, SL2_IDENTITY):
            fail("m2_relation", A=A, beta1=list(b1), beta2=list(b2))
        if even and eta(d, b1, b2, A):
            fail("eta_trivial", A=A, beta1=list(b1), beta2=list(b2))

        n1 = NElement(g1.beta1, g1.beta2, g1.w)
        n2 = NElement(g2.beta1, g2.beta2, g2.w)
        if m2_from_n(n_multiply(d, n1, n2)) != m2_multiply(d, m2_from_n(n1), m2_from_n(n2)):
            fail("split_n", g1=g1, g2=g2)
        if m2_from_sl2(d, g1.A @ g2.A) != m2_multiply(d, m2_from_sl2(d, g1.A), m2_from_sl2(d, g2.A)):
            fail("split_sl2", A=g1.A, B=g2.A)

        tau, h, z = sample_point(d, rng, im_floor)
        t_a, h_a = n_act(n_multiply(d, n1, n2), tau, h)
        t_b, h_b = n_act(n1, *n_act(n2, tau, h))
        e = max(_err(t_a, t_b), _err(h_a, h_b))
        worst["n_action"] = max(worst["n_action"], e)
        if e > tol:
            fail("n_action", error=e)

        t_a, h_a = sl2_act(g1.A @ g2.A, tau, h)
        t_b, h_b = sl2_act(g1.A, *sl2_act(g2.A, tau, h))
        e = max(_err(t_a, t_b), _err(h_a, h_b))
        worst["sl2_action"] = max(worst["sl2_action"], e)
        if e > tol:
            fail("sl2_action", error=e)

        small1, small2 = sample_m2(d, rng, 1, 2), sample_m2(d, rng, 1, 2)
        a = m2_act_line(d, m2_multiply(d, small1, small2), tau, h, z)
        b = m2_act_line(d, small1, *m2_act_line(d, small2, tau, h, z))
        e = max(_err(a[0], b[0]), _err(a[1], b[1]), abs(a[2] - b[2]) / max(abs(a[2]), abs(b[2]), 1e-300))
        worst["line_action"] = max(worst["line_action"], e)
        if e > tol:
            fail("line_action", g1=small1, g2=small2, error=e)

    return {
        "passed": not any(failures.values()),
        "samples": samples,
        "seed": seed,
        "even_lattice": even,
        "failures": failures,
        "first_failures": first,
        "max_numeric_error": worst,
        "tolerance": tol,
    }


# ------------------------------
# Theta series
# ------------------------------

def theta_report(d: RootDatum, lam: LevelKCharacter, order, rank_order: Optional[int] = None) -> dict:
    theta = theta_lambda(d, lam, order)
    purity = all(m.level == lam.level for m in theta.terms)
    invariance = {",".join(str(x) for x in b): check_lattice_invariance(d, lam, b, order)
                  for b in lattice_shells(d, 2)}
    sym = weyl_invariantize(d, theta)
    w_invariant = all(finite_weyl_act(w, sym).terms == sym.terms for w in enumerate_finite_weyl(d))
    count = len(enumerate_level_k(d, lam.level))
    rank = invariant_theta_rank(d, lam.level, min(Fraction(order), Fraction(rank_order or 20)))
    return {
        "passed": purity and all(invariance.values()) and w_invariant and rank == count,
        "terms": len(theta.terms),
        "level_purity": purity,
        "lattice_invariance": invariance,
        "weyl_invariant": w_invariant,
        "basis_count": {"level_k_weights": count, "invariant_theta_rank": rank},
    }


def section_report(d: RootDatum, lam: LevelKCharacter, order, tol: float, samples: int, seed: int,
                   im_floor: float = 0.5, point: Optional[Tuple[complex, Sequence, complex]] = None,
                   beta: Optional[Sequence[int]] = None, progress: bool = False) -> dict:
    """verify_section_transform at one given point or at seeded random points.

    InsufficientTruncation from any evaluation propagates to the caller."""
    rng = np.random.default_rng(seed)
    theta = theta_lambda(d, lam, order)
    shells = lattice_shells(d, 2)
    runs: List[dict] = []
    count = 1 if point is not None else samples
    for _ in _bar(range(count), progress, "sections"):
        tau, h, z = point if point is not None else sample_point(d, rng, im_floor)
        b = tuple(beta) if beta is not None else shells[int(rng.integers(len(shells)))]
        rep = verify_section_transform(d, theta, tau, h, z, b, tol)
        entry = rep.to_json()
        entry.update({"tau": complex(tau), "h": [complex(x) for x in np.atleast_1d(h)], "z": complex(z), "beta": list(b)})
        runs.append(entry)
    worst = {}
    for r in runs:
        for k, v in r["errors"].items():
            worst[k] = max(worst.get(k, 0.0), v)
    return {"passed": all(r["passed"] for r in runs), "runs": runs, "max_errors": worst, "tolerance": tol}


def cover_report(d: RootDatum, lam: LevelKCharacter, length_bound: int, order, margin: int = 8,
                 max_refinements: int = 4, progress: bool = False) -> dict:
    pairs = bruhat_cover_pairs(d, length_bound)
    certs = []
    counts = {"pass": 0, "fail": 0, "indeterminate": 0}
    for pair in _bar(pairs, progress, "cover pairs"):
        cert = check_cover_divisibility(d, lam, pair, order, margin, max_refinements)
        counts[cert.status] += 1
        entry = pair.to_json()
        entry["certificate"] = cert.to_json()
        certs.append(entry)
    if counts["fail"]:
        status = "fail"
    elif counts["indeterminate"]:
        status = "indeterminate"
    else:
        status = "pass"
    return {"status": status, "pairs": len(pairs), "counts": counts, "certificates": certs}


def witness_report(d: RootDatum, lam: LevelKCharacter, length_bound: int = 1) -> dict:
    """factorization_witness over cover pairs and beta in {0} + the first two shells."""
    betas = [tuple(0 for _ in range(d.rank))] + lattice_shells(d, 2)
    checked = 0
    for pair in bruhat_cover_pairs(d, length_bound):
        for beta in betas:
            factorization_witness(d, pair.w, pair.v, lam, pair.root, pair.m, beta)
            checked += 1
    return {"passed": True, "checked": checked}
