"""Complex-weighted history ensembles and the quantropy calculus.

A :class:`HistorySpace` is a finite set of histories, each carrying a
positive measure weight and a real action. Weighting each history by
``exp(-lam * A)`` and normalizing gives the Feynman amplitudes; at real
positive ``lam`` the same construction is the Boltzmann distribution.

All scalar complex logarithms use the principal branch. The per-history
logarithm of an amplitude is never recomputed from the amplitude itself:
it is stored as ``b(x) = -lam*A(x) - Ln Z`` when the ensemble is built.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from ._validation import (
    check_actions,
    check_lambda,
    check_positive,
    check_weights,
    max_histories,
    principal_imag,
)
from .exceptions import (
    InvalidInput,
    InvariantViolation,
    SizeOverflow,
    StepTooLarge,
    ZeroPartitionFunction,
)

__all__ = [
    "HistorySpace",
    "Classicality",
    "ComplexEnsemble",
    "EnsembleReport",
    "log_partition",
    "feynman_weights",
    "quantropy",
    "expected_action",
    "report",
    "central_log_derivative",
    "expected_action_via_derivative",
    "product_space",
]

# A partition sum whose magnitude is this many times smaller than the sum of
# the magnitudes of its terms has lost too many digits to normalize with.
MAX_CANCELLATION = 1e5
ZERO_AMPLITUDE = 1e-300
DEFAULT_STEP = 1e-6


@dataclass(frozen=True, eq=False)
class HistorySpace:
    """Finite set of histories with measure weights and actions.

    The ``actions`` field doubles as an energy when the space is handed to
    the thermal engine.
    """

    ids: tuple
    weights: np.ndarray
    actions: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        actions = check_actions(self.actions)
        weights = check_weights(self.weights, actions.size)
        ids = tuple(str(i) for i in self.ids)
        if len(ids) != actions.size:
            raise InvalidInput(f"{len(ids)} ids for {actions.size} histories")
        actions.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "actions", actions)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "ids", ids)

    @classmethod
    def from_actions(cls, actions, weights=None, ids=None, metadata=None):
        actions = check_actions(actions)
        if ids is None:
            ids = [str(i) for i in range(actions.size)]
        if weights is None:
            weights = np.ones(actions.size)
        return cls(tuple(ids), weights, actions, dict(metadata or {}))

    def __len__(self):
        return self.actions.size

    def to_dict(self) -> dict:
        return {
            "histories": [
                {"id": i, "weight": float(w), "action": float(a)}
                for i, w, a in zip(self.ids, self.weights, self.actions)
            ]
        }

    @classmethod
    def from_dict(cls, data: dict) -> "HistorySpace":
        try:
            rows = data["histories"]
            ids = [str(r["id"]) for r in rows]
            weights = [float(r.get("weight", 1.0)) for r in rows]
            actions = [float(r["action"]) for r in rows]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"malformed history space: {exc}") from exc
        return cls.from_actions(actions, weights, ids)


@dataclass(frozen=True)
class Classicality:
    """The complex multiplier ``lam``; ``lam = 1/(i*hbar)`` in the quantum case."""

    lam: complex
    hbar: Optional[float] = None

    def __post_init__(self):
        lam = check_lambda(self.lam)
        object.__setattr__(self, "lam", lam)
        if self.hbar is not None:
            hbar = check_positive(self.hbar, "hbar")
            object.__setattr__(self, "hbar", hbar)
            if abs(lam - 1.0 / (1j * hbar)) > 1e-12 * abs(lam):
                raise InvalidInput(f"lambda={lam} is not 1/(i*hbar) for hbar={hbar}")

    @classmethod
    def from_hbar(cls, hbar: float) -> "Classicality":
        hbar = check_positive(hbar, "hbar")
        return cls(1.0 / (1j * hbar), hbar)

    @classmethod
    def coerce(cls, value) -> "Classicality":
        if isinstance(value, Classicality):
            return value
        return cls(complex(value))

    @property
    def is_real(self) -> bool:
        return self.lam.imag == 0.0


@dataclass(frozen=True, eq=False)
class ComplexEnsemble:
    """Normalized complex amplitudes over a space, with their log branch."""

    space: HistorySpace
    amplitudes: np.ndarray
    log_amplitudes: np.ndarray
    log_Z: Optional[complex] = None

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        b = np.asarray(self.log_amplitudes, dtype=complex)
        n = len(self.space)
        if a.shape != (n,) or b.shape != (n,):
            raise InvalidInput("amplitude arrays must match the history space")
        norm = np.sum(self.space.weights * a)
        if abs(norm - 1.0) > 1e-10:
            raise InvariantViolation(f"amplitudes are not normalized: sum = {norm}")
        if np.any(np.abs(np.exp(b) - a) > 1e-12 * (1.0 + np.abs(a))):
            raise InvariantViolation("exp(log_amplitudes) does not reproduce amplitudes")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)
        object.__setattr__(self, "log_amplitudes", b)

    @classmethod
    def from_amplitudes(cls, space: HistorySpace, amplitudes) -> "ComplexEnsemble":
        """Wrap arbitrary amplitudes, taking the principal log of each one."""
        a = np.asarray(amplitudes, dtype=complex)
        with np.errstate(divide="ignore"):
            b = np.log(a)
        return cls(space, a, b)


@dataclass(frozen=True)
class EnsembleReport:
    log_Z: complex
    expected_action: complex
    quantropy: complex
    free_action: complex
    lam: Classicality

    def __post_init__(self):
        lam = self.lam.lam
        scale = 1.0 + abs(lam * self.expected_action) + abs(self.log_Z)
        if abs(self.quantropy - (lam * self.expected_action + self.log_Z)) > 1e-10 * scale:
            raise InvariantViolation("Q != lam*<A> + ln Z")
        if abs(self.free_action + self.log_Z / lam) > 1e-10 * (1.0 + abs(self.log_Z / lam)):
            raise InvariantViolation("Phi != -(1/lam) ln Z")

    def as_tuple(self):
        return (self.log_Z, self.expected_action, self.quantropy, self.free_action)


def _partition_terms(space: HistorySpace, lam: complex):
    """Shifted exponent terms and the log of the shift factor.

    Returns ``(terms, log_shift)`` with ``Z = exp(log_shift) * sum(w*terms)``.
    """
    A = space.actions
    shift = float(A.min()) if lam.real > 0 else 0.0
    terms = np.exp(-lam * (A - shift))
    return terms, -lam * shift


def log_partition(space: HistorySpace, lam) -> complex:
    """Principal ``Ln Z`` with ``Z = sum_x w_x exp(-lam A(x))``."""
    lam = Classicality.coerce(lam).lam
    terms, log_shift = _partition_terms(space, lam)
    weighted = space.weights * terms
    z = complex(weighted.sum())
    mass = float(np.abs(weighted).sum())
    if not (abs(z) > ZERO_AMPLITUDE) or abs(z) * MAX_CANCELLATION < mass:
        raise ZeroPartitionFunction(
            f"partition sum cancelled to |Z'|={abs(z):.3e} against term mass {mass:.3e}")
    return principal_imag(cmath.log(z) + log_shift)


def feynman_weights(space: HistorySpace, lam) -> ComplexEnsemble:
    """Amplitudes ``exp(-lam A)/Z`` with the branch ``b = -lam A - Ln Z``."""
    lam = Classicality.coerce(lam).lam
    log_z = log_partition(space, lam)
    b = -lam * space.actions - log_z
    return ComplexEnsemble(space, np.exp(b), b, log_z)


def quantropy(ensemble: ComplexEnsemble) -> complex:
    """``-sum w a b`` using the stored branch; ``0 ln 0`` counts as zero."""
    a = ensemble.amplitudes
    live = np.abs(a) >= ZERO_AMPLITUDE
    w = ensemble.space.weights
    return complex(-np.sum(w[live] * a[live] * ensemble.log_amplitudes[live]))


def expected_action(ensemble: ComplexEnsemble) -> complex:
    sp = ensemble.space
    return complex(np.sum(sp.weights * sp.actions * ensemble.amplitudes))


def report(space: HistorySpace, lam) -> EnsembleReport:
    lam = Classicality.coerce(lam)
    ens = feynman_weights(space, lam)
    log_z = ens.log_Z
    return EnsembleReport(
        log_Z=log_z,
        expected_action=expected_action(ens),
        quantropy=quantropy(ens),
        free_action=-log_z / lam.lam,
        lam=lam,
    )


def central_log_derivative(log_z: Callable[[complex], complex], lam, step: float = DEFAULT_STEP,
                           *, check_branch: bool = True) -> complex:
    """``-d ln Z / d lam`` by a central difference along ``lam/|lam|``.

    The step is ``step * max(1, |lam|)``; truncation error is O(h**2).
    """
    lam = Classicality.coerce(lam).lam
    step = check_positive(step, "step")
    direction = lam / abs(lam)
    h = step * max(1.0, abs(lam))
    lo, hi = lam - h * direction, lam + h * direction
    check_lambda(lo)
    up, down = log_z(hi), log_z(lo)
    diff = up - down
    if check_branch and abs(diff.imag) > math.pi:
        raise StepTooLarge(f"ln Z jumped by {diff.imag:.3f} in its imaginary part across the step")
    return -diff / (2.0 * h * direction)


def expected_action_via_derivative(space: HistorySpace, lam, step: float = DEFAULT_STEP) -> complex:
    return central_log_derivative(lambda l: log_partition(space, l), lam, step)


def product_space(s1: HistorySpace, s2: HistorySpace, cap: Optional[int] = None) -> HistorySpace:
    """Cartesian product: weights multiply, actions add (row-major order)."""
    cap = max_histories() if cap is None else cap
    size = len(s1) * len(s2)
    if size > cap:
        raise SizeOverflow(f"product space of {size} histories exceeds the cap of {cap}")
    ids = tuple(f"{i},{j}" for i in s1.ids for j in s2.ids)
    weights = np.multiply.outer(s1.weights, s2.weights).ravel()
    actions = np.add.outer(s1.actions, s2.actions).ravel()
    return HistorySpace(ids, weights, actions)


def power_space(space: HistorySpace, n: int, cap: Optional[int] = None) -> HistorySpace:
    out = space
    for _ in range(n - 1):
        out = product_space(out, space, cap)
    return out


def random_space(rng: np.random.Generator, size: int, *, action_scale: float = 3.0,
                 weight_range: Sequence[float] = (0.5, 2.0)) -> HistorySpace:
    """Random space used by the property suites."""
    actions = rng.uniform(0.0, action_scale, size)
    weights = rng.uniform(weight_range[0], weight_range[1], size)
    return HistorySpace.from_actions(actions, weights)
