"""Time-discretized free particle on a line, and quadratic actions in general.

The particle starts at ``q0 = 0`` and takes ``n`` steps of length ``dt``
with constant velocity ``v_i`` on each, so the action is
``sum(m * v_i**2 * dt / 2)``. The measure on positions is made
dimensionless by a length scale ``dx``; after changing variables to
velocities the partition function factorizes into ``n`` identical
one-dimensional Gaussian integrals, giving closed forms in terms of
``K = 2*pi*dt / (m*dx**2)``.

A grid-quadrature version of the same history space is provided as an
independent cross-check of the closed forms.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from ._validation import check_count, check_positive
from .ensemble import (
    Classicality,
    EnsembleReport,
    HistorySpace,
    central_log_derivative,
    power_space,
    report,
    DEFAULT_STEP,
)
from .exceptions import InvalidInput
from .oscillatory import richardson

__all__ = [
    "FreeParticleModel",
    "QuadraticAction",
    "log_Z_closed",
    "expected_action_closed",
    "free_action_closed",
    "quantropy_closed",
    "closed_report",
    "expected_action_via_derivative",
    "axis_space",
    "quadrature_space",
    "QuadratureResult",
    "quadrature_report",
    "quadratic_action_report",
]

ENVELOPE = 36.0


@dataclass(frozen=True)
class FreeParticleModel:
    n: int = 1
    mass: float = 1.0
    dt: float = 1.0
    dx_scale: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "n", check_count(self.n, "n"))
        for name in ("mass", "dt", "dx_scale", "hbar"):
            object.__setattr__(self, name, check_positive(getattr(self, name), name))
        if not (self.K > 0 and math.isfinite(self.K)):
            raise InvalidInput(f"K = 2*pi*dt/(m*dx^2) must be positive and finite, got {self.K}")

    @property
    def K(self) -> float:
        return 2.0 * math.pi * self.dt / (self.mass * self.dx_scale**2)

    @property
    def classicality(self) -> Classicality:
        return Classicality.from_hbar(self.hbar)

    def to_dict(self) -> dict:
        return {"n": self.n, "mass": self.mass, "dt": self.dt, "dx": self.dx_scale, "hbar": self.hbar}

    @classmethod
    def from_dict(cls, data: dict) -> "FreeParticleModel":
        try:
            return cls(n=data["n"], mass=data.get("mass", 1.0), dt=data.get("dt", 1.0),
                       dx_scale=data.get("dx", 1.0), hbar=data.get("hbar", 1.0))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"malformed free-particle model: {exc}") from exc


@dataclass(frozen=True)
class QuadraticAction:
    """``A(x) = sum(c_i * x_i**2 / 2)`` with every ``c_i > 0``."""

    coefficients: tuple

    def __post_init__(self):
        c = tuple(float(v) for v in self.coefficients)
        if not c:
            raise InvalidInput("need at least one coefficient")
        if not all(math.isfinite(v) and v > 0 for v in c):
            raise InvalidInput("quadratic action coefficients must be positive and finite")
        object.__setattr__(self, "coefficients", c)

    @property
    def dimension(self) -> int:
        return len(self.coefficients)


def _lam(model: FreeParticleModel, lam) -> complex:
    return model.classicality.lam if lam is None else Classicality.coerce(lam).lam


def log_Z_closed(model: FreeParticleModel, lam=None) -> complex:
    """``(n/2) * (Ln K - Ln lam)``; this is not reduced to the principal branch."""
    lam = _lam(model, lam)
    return 0.5 * model.n * (math.log(model.K) - cmath.log(lam))


def expected_action_closed(model: FreeParticleModel, lam=None) -> complex:
    """``n/(2*lam)``, which is ``n*i*hbar/2`` at the model's own classicality.

    Mass, time step and length scale drop out entirely.
    """
    if lam is None:
        return 0.5j * model.n * model.hbar
    return 0.5 * model.n / _lam(model, lam)


def free_action_closed(model: FreeParticleModel, lam=None) -> complex:
    lam = _lam(model, lam)
    return (1.0 / lam) * 0.5 * model.n * (cmath.log(lam) - math.log(model.K))


def quantropy_closed(model: FreeParticleModel, lam=None) -> complex:
    lam = _lam(model, lam)
    return 0.5 * model.n * (math.log(model.K) - cmath.log(lam) + 1.0)


def closed_report(model: FreeParticleModel, lam=None) -> EnsembleReport:
    cls = model.classicality if lam is None else Classicality.coerce(lam)
    return EnsembleReport(
        log_Z=log_Z_closed(model, cls),
        expected_action=expected_action_closed(model, None if lam is None else cls),
        quantropy=quantropy_closed(model, cls),
        free_action=free_action_closed(model, cls),
        lam=cls,
    )


def expected_action_via_derivative(model: FreeParticleModel, lam=None,
                                   step: float = DEFAULT_STEP) -> complex:
    """``-d ln Z/d lam`` of the closed-form partition function, numerically."""
    lam = _lam(model, lam)
    return central_log_derivative(lambda l: log_Z_closed(model, l), lam, step,
                                  check_branch=False)


# -- grid quadrature ---------------------------------------------------------

def axis_space(model: FreeParticleModel, grid_half_width: float, grid_points: int,
               epsilon: float = 0.0) -> HistorySpace:
    """One velocity axis on a uniform trapezoid grid.

    Weights carry the Jacobian ``dt/dx``, the cell width, and the damping
    factor ``exp(-epsilon*v**2)``.
    """
    grid_points = check_count(grid_points, "grid_points", 32)
    W = check_positive(grid_half_width, "grid_half_width")
    if epsilon < 0 or not math.isfinite(epsilon):
        raise InvalidInput("epsilon must be finite and >= 0")
    v = np.linspace(-W, W, grid_points)
    h = v[1] - v[0]
    cell = np.full(grid_points, h)
    cell[0] = cell[-1] = 0.5 * h
    weights = (model.dt / model.dx_scale) * cell * np.exp(-epsilon * v * v)
    actions = 0.5 * model.mass * v * v * model.dt
    ids = [f"{x:.6g}" for x in v]
    meta = {"damping_epsilon": float(epsilon), "damping_in_weights": epsilon > 0,
            "grid_half_width": W, "grid_points": grid_points}
    return HistorySpace(tuple(ids), weights, actions, meta)


def quadrature_space(model: FreeParticleModel, grid_half_width: float, grid_points: int,
                     epsilon: float, cap: Optional[int] = None) -> HistorySpace:
    """Full tensor grid over all ``n`` velocities (raises SizeOverflow if too large)."""
    axis = axis_space(model, grid_half_width, grid_points, epsilon)
    space = power_space(axis, model.n, cap)
    meta = dict(axis.metadata, n=model.n)
    return HistorySpace(space.ids, space.weights, space.actions, meta)


@dataclass(frozen=True)
class QuadratureResult:
    report: EnsembleReport
    epsilons: tuple
    grid_half_width: float
    grid_points: int
    tensor: bool
    level_reports: List[EnsembleReport] = field(default_factory=list)
    error_estimate: float = 0.0


def _auto_grid(model: FreeParticleModel, lam: complex, grid_points: int, levels: int):
    """Damping schedule and half-width that the grid can actually resolve.

    With damping ``eps`` the one-axis integrand is ``exp(-c v**2)``,
    ``c = lam*m*dt/2 + eps``. The grid must reach where ``|exp(-c v**2)|``
    is negligible, and the spacing must keep the trapezoid aliasing term
    ``exp(-pi**2 * Re(1/c) / h**2)`` negligible too. For imaginary ``lam``
    both constrain ``eps`` from below.
    """
    s = abs(lam) * model.mass * model.dt / 2.0
    if lam.real > 0:
        return (0.0,), max(8.0 / math.sqrt(2.0 * s), math.sqrt(ENVELOPE / (lam.real * model.mass * model.dt / 2.0)))
    eps_min = 2.0 * 2.0 * ENVELOPE * s / (math.pi * grid_points)
    eps = tuple(eps_min * 2.0**k for k in reversed(range(levels)))
    return eps, math.sqrt(ENVELOPE / eps_min)


def quadrature_report(model: FreeParticleModel, lam=None, grid_points: int = 2048,
                      epsilon: Optional[float] = None, levels: int = 4,
                      grid_half_width: Optional[float] = None,
                      tensor: bool = False) -> QuadratureResult:
    """Report computed by summing over a velocity grid, extrapolated to zero damping.

    ``tensor=True`` enumerates all ``grid_points**n`` histories; otherwise a
    single axis is summed and the result scaled by ``n`` (the integral
    factorizes exactly, so this is not an approximation).
    """
    cls = model.classicality if lam is None else Classicality.coerce(lam)
    lam_c = cls.lam
    eps_auto, W_auto = _auto_grid(model, lam_c, grid_points, levels)
    if epsilon is None:
        epsilons = eps_auto
    elif epsilon == 0:
        epsilons = (0.0,)
    else:
        epsilons = tuple(epsilon / 2.0**k for k in range(levels))
    W = W_auto if grid_half_width is None else grid_half_width

    level_reports = []
    for eps in epsilons:
        # stronger damping levels get a shorter grid so edge weights stay representable
        decay = lam_c.real * model.mass * model.dt / 2.0 + eps
        W_k = min(W, math.sqrt(ENVELOPE / decay))
        if tensor:
            rep = report(quadrature_space(model, W_k, grid_points, eps), cls)
        else:
            one = report(axis_space(model, W_k, grid_points, eps), cls)
            n = model.n
            rep = EnsembleReport(n * one.log_Z, n * one.expected_action, n * one.quantropy,
                                 n * one.free_action, cls)
        level_reports.append(rep)

    if len(level_reports) == 1:
        final, err = level_reports[0], 0.0
    else:
        log_z, e1 = richardson([r.log_Z for r in level_reports])
        ea, e2 = richardson([r.expected_action for r in level_reports])
        final = EnsembleReport(log_z, ea, lam_c * ea + log_z, -log_z / lam_c, cls)
        err = max(e1, e2)
    return QuadratureResult(final, tuple(epsilons), W, grid_points, tensor, level_reports, err)


def quadratic_action_report(action: QuadraticAction, lam) -> EnsembleReport:
    """Closed-form report for ``sum(c_i x_i**2/2)`` with unit measure scale."""
    cls = Classicality.coerce(lam)
    c = np.asarray(action.coefficients)
    ln_lam = cmath.log(cls.lam)
    log_z = complex(np.sum(0.5 * (np.log(2.0 * math.pi / c) - ln_lam)))
    # per-axis <x_i^2> = 1/(lam c_i); the coefficients cancel axis by axis
    ea = complex(np.sum(0.5 * c / (cls.lam * c)))
    return EnsembleReport(log_z, ea, cls.lam * ea + log_z, -log_z / cls.lam, cls)
