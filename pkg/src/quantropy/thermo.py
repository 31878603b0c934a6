"""Statistical-mechanics side of the analogy: Boltzmann ensembles.

Boltzmann's constant is 1 throughout, so ``beta = 1/T``. Energies are read
from the ``actions`` field of a :class:`~quantropy.ensemble.HistorySpace`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_count, check_positive
from .ensemble import Classicality, HistorySpace, report
from .exceptions import InvariantViolation

__all__ = [
    "ThermalReport",
    "boltzmann_probabilities",
    "boltzmann_report",
    "log_partition_real",
    "ideal_gas_expected_energy",
    "analogy_substitution",
    "check_analogy",
    "analogy_gaps",
]


@dataclass(frozen=True)
class ThermalReport:
    log_Z: float
    expected_energy: float
    entropy: float
    free_energy: float
    beta: float

    def __post_init__(self):
        scale = 1.0 + abs(self.beta * self.expected_energy) + abs(self.log_Z)
        if abs(self.entropy - (self.beta * self.expected_energy + self.log_Z)) > 1e-10 * scale:
            raise InvariantViolation("S != beta*<E> + ln Z")
        if abs(self.free_energy + self.log_Z / self.beta) > 1e-10 * (1.0 + abs(self.log_Z / self.beta)):
            raise InvariantViolation("F != -(1/beta) ln Z")

    def as_tuple(self):
        return (self.log_Z, self.expected_energy, self.entropy, self.free_energy)


def log_partition_real(space: HistorySpace, beta: float) -> float:
    E = space.actions
    e0 = float(E.min())
    return math.log(float(np.sum(space.weights * np.exp(-beta * (E - e0))))) - beta * e0


def boltzmann_probabilities(space: HistorySpace, beta: float):
    """Densities ``p(x) = exp(-beta E)/Z`` and their logs."""
    beta = check_positive(beta, "beta")
    log_z = log_partition_real(space, beta)
    log_p = -beta * space.actions - log_z
    return np.exp(log_p), log_p, log_z


def boltzmann_report(space: HistorySpace, beta: float) -> ThermalReport:
    p, log_p, log_z = boltzmann_probabilities(space, beta)
    w, E = space.weights, space.actions
    live = p > 0
    entropy = float(-np.sum(w[live] * p[live] * log_p[live]))
    energy = float(np.sum(w * E * p))
    return ThermalReport(
        log_Z=log_z,
        expected_energy=energy,
        entropy=entropy,
        free_energy=energy - entropy / beta,
        beta=float(beta),
    )


def ideal_gas_expected_energy(particles: int, dimensions: int, T: float) -> float:
    """Equipartition: ``T/2`` per quadratic degree of freedom."""
    particles = check_count(particles, "particles")
    dimensions = check_count(dimensions, "dimensions")
    T = check_positive(T, "T")
    return 0.5 * dimensions * particles * T


def analogy_substitution(thermal_beta: float) -> Classicality:
    """Classicality with the same numeric value as the coolness."""
    return Classicality(complex(check_positive(thermal_beta, "beta")))


def analogy_gaps(space: HistorySpace, beta: float) -> dict:
    """Field-by-field differences between the quantum and thermal engines at ``lam = beta``."""
    q = report(space, analogy_substitution(beta))
    t = boltzmann_report(space, beta)
    return {
        "log_Z": abs(q.log_Z - t.log_Z),
        "expected": abs(q.expected_action - t.expected_energy),
        "entropy": abs(q.quantropy - t.entropy),
        "free": abs(q.free_action - t.free_energy),
    }


def check_analogy(space: HistorySpace, beta: float, tol: float = 1e-10) -> bool:
    gaps = analogy_gaps(space, beta)
    return all(g <= tol for g in gaps.values())
