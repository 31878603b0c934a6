"""Numerical check that Feynman amplitudes make quantropy stationary.

Two complementary checks:

* :func:`lagrange_residual` evaluates ``1 + ln a(x) + lam*A(x) + mu`` with
  ``mu = Ln Z - 1`` history by history.
* :func:`directional_stationarity` perturbs the amplitudes along random
  directions that preserve both constraints (normalization and expected
  action) and measures the first-order change in quantropy.

Variations are holomorphic: amplitudes are independent complex variables
and the bilinear form used to build tangent directions is unconjugated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._validation import check_count, check_positive, log1p_complex
from .ensemble import (
    Classicality,
    ComplexEnsemble,
    HistorySpace,
    feynman_weights,
    log_partition,
)
from .exceptions import AmplitudeNearZero, InvalidInput

__all__ = [
    "LagrangeResidual",
    "lagrange_residual",
    "free_action_residual",
    "tangent_directions",
    "relative_tangent_directions",
    "first_order_coefficients",
    "directional_stationarity",
    "perturbed_ensemble",
    "verification_record",
]

DEFAULT_T = 1e-4
MAX_RESAMPLES = 32


@dataclass(frozen=True)
class LagrangeResidual:
    per_history: np.ndarray
    mu: complex
    max_abs: float


def lagrange_residual(ensemble: ComplexEnsemble, lam) -> LagrangeResidual:
    lam = Classicality.coerce(lam).lam
    space = ensemble.space
    mu = log_partition(space, lam) - 1.0
    r = 1.0 + ensemble.log_amplitudes + lam * space.actions + mu
    return LagrangeResidual(r, mu, float(np.max(np.abs(r))))


def free_action_residual(ensemble: ComplexEnsemble, lam) -> np.ndarray:
    """Stationarity residual of ``<A> - Q/lam`` under normalization alone.

    Setting the holomorphic gradient ``A + (1 + ln a)/lam`` equal to a
    multiplier ``nu = -mu/lam`` gives this residual; it is the quantropy
    residual divided by ``lam``.
    """
    lam = Classicality.coerce(lam).lam
    space = ensemble.space
    nu = -(log_partition(space, lam) - 1.0) / lam
    return space.actions + (1.0 + ensemble.log_amplitudes) / lam - nu


def _bilinear(w, u, v):
    return np.sum(w * u * v)


def tangent_directions(space: HistorySpace, rng: np.random.Generator, count: int) -> np.ndarray:
    """Random complex directions with ``sum w d = 0`` and ``sum w d A = 0``.

    Built by Gram-Schmidt against the constant and action vectors under the
    unconjugated form ``sum w u v``. Rows have unit Euclidean length.
    """
    if len(space) < 3:
        raise InvalidInput("need at least 3 histories for a nontrivial tangent space")
    w, A = space.weights, space.actions
    e1 = np.ones(len(space)) / np.sqrt(np.sum(w))
    e2 = A - _bilinear(w, A, e1) * e1
    norm2 = _bilinear(w, e2, e2)
    if norm2 <= 1e-24 * max(1.0, float(np.sum(w * A * A))):
        # constant action: the two constraints coincide
        e2 = None
    else:
        e2 = e2 / np.sqrt(norm2)
    out = np.empty((count, len(space)), dtype=complex)
    for k in range(count):
        z = rng.standard_normal(len(space)) + 1j * rng.standard_normal(len(space))
        z = z - _bilinear(w, z, e1) * e1
        if e2 is not None:
            z = z - _bilinear(w, z, e2) * e2
        out[k] = z / np.linalg.norm(z)
    return out


def relative_tangent_directions(ensemble: ComplexEnsemble, rng: np.random.Generator,
                                count: int) -> np.ndarray:
    """Constraint-respecting directions of the form ``delta = a * u`` with ``max|u| = 1``.

    Each amplitude moves by the same relative amount at most, so tiny
    amplitudes are neither swamped nor allowed to dominate the check.
    """
    space = ensemble.space
    if len(space) < 3:
        raise InvalidInput("need at least 3 histories for a nontrivial tangent space")
    wa = space.weights * ensemble.amplitudes
    # u must satisfy sum(wa*u) = 0 and sum(wa*A*u) = 0
    constraints = np.vstack([wa, wa * space.actions]).conj()
    q, r = np.linalg.qr(constraints.T)
    keep = np.abs(np.diag(r)) > 1e-12 * np.abs(r).max()
    q = q[:, keep]
    out = np.empty((count, len(space)), dtype=complex)
    for k in range(count):
        u = rng.standard_normal(len(space)) + 1j * rng.standard_normal(len(space))
        u = u - q @ (q.conj().T @ u)
        u = u / np.max(np.abs(u))
        out[k] = ensemble.amplitudes * u
    return out


def _quantropy_change(ensemble: ComplexEnsemble, delta: np.ndarray, s: float) -> complex:
    """``Q(a + s*delta) - Q(a)`` with the branch continued smoothly.

    Expanded term by term so the O(s) signal is not buried under the
    rounding of two nearly equal sums.
    """
    a, b = ensemble.amplitudes, ensemble.log_amplitudes
    w = ensemble.space.weights
    ratio = s * delta / a
    if np.any(np.abs(a + s * delta) < 1e-12) or np.any(np.abs(ratio) >= 1.0):
        raise AmplitudeNearZero("perturbation drives an amplitude through zero")
    ell = log1p_complex(ratio)
    return complex(-np.sum(w * (a * ell + s * delta * (b + ell))))


def first_order_coefficients(ensemble: ComplexEnsemble, directions: np.ndarray, t: float):
    """Two-point fit ``dQ(s) = c1*s + c2*s**2`` at ``s = t`` and ``t/2``."""
    c1 = np.empty(len(directions), dtype=complex)
    c2 = np.empty(len(directions), dtype=complex)
    for k, d in enumerate(directions):
        full = _quantropy_change(ensemble, d, t)
        half = _quantropy_change(ensemble, d, t / 2.0)
        c1[k] = (4.0 * half - full) / t
        c2[k] = 2.0 * (full - 2.0 * half) / t**2
    return c1, c2


def directional_stationarity(space: HistorySpace, lam, trials: int = 16, t: float = DEFAULT_T,
                             rng: Optional[np.random.Generator] = None,
                             ensemble: Optional[ComplexEnsemble] = None) -> float:
    """Largest first-order coefficient of quantropy over random tangent directions.

    ``ensemble`` defaults to the Feynman weights of ``space`` at ``lam``;
    passing another ensemble turns this into a negative control. Directions
    come from :func:`relative_tangent_directions`, so ``t`` is the largest
    relative change of any amplitude.
    """
    trials = check_count(trials, "trials")
    t = check_positive(t, "t")
    rng = np.random.default_rng() if rng is None else rng
    if ensemble is None:
        ensemble = feynman_weights(space, lam)
    worst = 0.0
    for _ in range(trials):
        for _attempt in range(MAX_RESAMPLES):
            d = relative_tangent_directions(ensemble, rng, 1)
            try:
                c1, _ = first_order_coefficients(ensemble, d, t)
            except AmplitudeNearZero:
                continue
            break
        else:
            raise AmplitudeNearZero(f"no admissible direction after {MAX_RESAMPLES} draws")
        worst = max(worst, float(np.abs(c1[0])))
    return worst


def perturbed_ensemble(space: HistorySpace, lam, size: float = 0.1,
                       rng: Optional[np.random.Generator] = None) -> ComplexEnsemble:
    """Feynman weights times ``1 + g(x)`` with ``max|g| = size``, renormalized.

    ``g`` is random but has no component along ``1`` or ``A``: such a
    component would only move the ensemble to another Feynman ensemble
    (shifted ``lam`` or ``mu``), which is still a stationary point.
    """
    rng = np.random.default_rng() if rng is None else rng
    base = feynman_weights(space, lam)
    g = rng.uniform(-1.0, 1.0, len(space))
    basis = np.linalg.qr(np.vstack([np.ones(len(space)), space.actions]).T)[0]
    g = g - basis @ (basis.T @ g)
    g = size * g / np.max(np.abs(g))
    factor = 1.0 + g
    a = base.amplitudes * factor
    norm = np.sum(space.weights * a)
    b = base.log_amplitudes + np.log(factor) - np.log(norm)
    return ComplexEnsemble(space, np.exp(b), b)


def verification_record(residual_max: float, linear_coeff_max: float, trials: int, seed: int) -> dict:
    return {
        "residual_max": float(residual_max),
        "linear_coeff_max": float(linear_coeff_max),
        "trials": int(trials),
        "seed": int(seed),
    }
