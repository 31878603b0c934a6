"""Seeded property suites behind ``quantropy verify``.

Every suite returns a :class:`SuiteResult` with the measured residual and
the tolerance it was judged against. Randomness comes from Philox streams
keyed on ``(seed, suite index)`` so reruns are bit-for-bit identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from typing import Dict, Optional

import numpy as np

from .ensemble import (
    Classicality,
    expected_action_via_derivative,
    feynman_weights,
    product_space,
    random_space,
    report,
)
from .exceptions import QuantropyError
from .oscillatory import RegulatorSpec, gaussian_closed_form, regularize
from .stationarity import directional_stationarity, lagrange_residual, perturbed_ensemble
from .thermo import analogy_gaps

DEFAULT_TOLERANCES = {
    "stationarity.residual": 1e-11,
    "stationarity.linear": 1e-8,
    "identity.exact": 1e-10,
    "identity.numeric": 1e-6,
    "factorization": 1e-9,
    "cross_engine": 1e-12,
    "regulator.damping": 1e-4,
    "regulator.cutoff": 1e-3,
}

SUITES = ("stationarity", "identity", "factorization", "cross_engine", "regulator")


@dataclass
class SuiteResult:
    name: str
    passed: bool
    residuals: Dict[str, float]
    tolerances: Dict[str, float]
    detail: str = ""


def stream(seed: int, index: int) -> np.random.Generator:
    """Counter-based generator for sub-stream ``index`` of ``seed``."""
    return np.random.Generator(np.random.Philox(key=[index, seed & 0xFFFFFFFFFFFFFFFF]))


def resolve_tolerances(overrides: Optional[Dict[str, float]] = None) -> Dict[str, float]:
    """Apply overrides; a bare suite name sets every tolerance of that suite."""
    tol = dict(DEFAULT_TOLERANCES)
    for key, value in (overrides or {}).items():
        hits = [k for k in tol if k == key or k.split(".")[0] == key]
        if not hits:
            raise KeyError(f"unknown tolerance {key!r}; known: {', '.join(sorted(tol))}")
        for k in hits:
            tol[k] = float(value)
    return tol


def random_classicality(rng: np.random.Generator) -> Classicality:
    kind = rng.integers(3)
    if kind == 0:
        return Classicality(complex(rng.uniform(0.2, 3.0)))
    if kind == 1:
        return Classicality.from_hbar(float(rng.choice([0.5, 1.0, 2.0])))
    return Classicality(complex(rng.uniform(0.1, 2.0), rng.uniform(-2.0, 2.0)))


def _judge(name, residuals, tolerances, detail=""):
    passed = all(residuals[k] <= tolerances[k] for k in residuals)
    return SuiteResult(name, passed, residuals, {k: tolerances[k] for k in residuals}, detail)


def stationarity_suite(seed: int, tol: Dict[str, float], spaces: int = 50,
                       max_size: int = 32, perturb: Optional[float] = None) -> SuiteResult:
    rng = stream(seed, 0)
    worst_res = worst_lin = 0.0
    for _ in range(spaces):
        space = random_space(rng, int(rng.integers(3, max_size + 1)))
        lam = random_classicality(rng)
        if perturb:
            ens = perturbed_ensemble(space, lam, perturb, rng)
        else:
            ens = feynman_weights(space, lam)
        worst_res = max(worst_res, lagrange_residual(ens, lam).max_abs)
        worst_lin = max(worst_lin, directional_stationarity(space, lam, trials=4, rng=rng, ensemble=ens))
    key_res, key_lin = "stationarity.residual", "stationarity.linear"
    return _judge("stationarity", {key_res: worst_res, key_lin: worst_lin}, tol,
                  f"{spaces} spaces" + (f", perturbed by {perturb}" if perturb else ""))


def identity_suite(seed: int, tol: Dict[str, float], spaces: int = 50) -> SuiteResult:
    rng = stream(seed, 1)
    exact = numeric = 0.0
    for _ in range(spaces):
        space = random_space(rng, int(rng.integers(1, 65)))
        lam = random_classicality(rng)
        rep = report(space, lam)
        l = lam.lam
        exact = max(exact,
                    abs(rep.quantropy - (l * rep.expected_action + rep.log_Z)),
                    abs(rep.free_action + rep.log_Z / l))
        deriv = expected_action_via_derivative(space, lam)
        # Q = ln Z - lam * dlnZ/dlam, with dlnZ/dlam taken numerically
        numeric = max(numeric, abs(rep.quantropy - (rep.log_Z + l * deriv)) / (1.0 + abs(l * deriv)))
    return _judge("identity", {"identity.exact": exact, "identity.numeric": numeric}, tol)


def factorization_suite(seed: int, tol: Dict[str, float], spaces: int = 30) -> SuiteResult:
    rng = stream(seed, 2)
    worst = 0.0
    for _ in range(spaces):
        s1 = random_space(rng, int(rng.integers(1, 9)))
        s2 = random_space(rng, int(rng.integers(1, 9)))
        lam = random_classicality(rng)
        r1, r2, r12 = report(s1, lam), report(s2, lam), report(product_space(s1, s2), lam)
        ea_gap = abs(r12.expected_action - (r1.expected_action + r2.expected_action))
        dq = r12.quantropy - (r1.quantropy + r2.quantropy)
        k = round(dq.imag / (2 * math.pi))
        q_gap = abs(dq - 2j * math.pi * k)
        worst = max(worst, ea_gap, q_gap)
    return _judge("factorization", {"factorization": worst}, tol)


def cross_engine_suite(seed: int, tol: Dict[str, float], spaces: int = 50) -> SuiteResult:
    rng = stream(seed, 3)
    worst = 0.0
    for _ in range(spaces):
        space = random_space(rng, int(rng.integers(1, 33)))
        beta = float(rng.choice([0.1, 1.0, 10.0]))
        worst = max(worst, max(analogy_gaps(space, beta).values()))
    return _judge("cross_engine", {"cross_engine": worst}, tol)


def regulator_suite(seed: int, tol: Dict[str, float]) -> SuiteResult:
    rng = stream(seed, 4)
    alphas = [1j] + [complex(np.exp(rng.uniform(np.log(0.5), np.log(5.0))))
                     * np.exp(1j * rng.uniform(-np.pi / 2, np.pi / 2)) for _ in range(3)]
    damp = cut = 0.0
    for a in alphas:
        exact = gaussian_closed_form(a)
        d = regularize(a, RegulatorSpec("damping", epsilon=1e-3, extrapolation_levels=4), strict=False)
        c = regularize(a, RegulatorSpec("cutoff", cutoff_M=50.0, extrapolation_levels=4), strict=False)
        damp = max(damp, abs(d.value - exact))
        cut = max(cut, abs(c.value - exact))
    return _judge("regulator", {"regulator.damping": damp, "regulator.cutoff": cut}, tol)


def run_suites(seed: int = 42, overrides: Optional[Dict[str, float]] = None,
               perturb: Optional[float] = None) -> dict:
    tol = resolve_tolerances(overrides)
    runners = {
        "stationarity": lambda: stationarity_suite(seed, tol, perturb=perturb),
        "identity": lambda: identity_suite(seed, tol),
        "factorization": lambda: factorization_suite(seed, tol),
        "cross_engine": lambda: cross_engine_suite(seed, tol),
        "regulator": lambda: regulator_suite(seed, tol),
    }
    results = []
    for name in SUITES:
        try:
            results.append(runners[name]())
        except QuantropyError as exc:
            results.append(SuiteResult(name, False, {}, {}, f"{type(exc).__name__}: {exc}"))
    return {
        "seed": int(seed),
        "passed": all(r.passed for r in results),
        "failed": [r.name for r in results if not r.passed],
        "suites": [asdict(r) for r in results],
    }
