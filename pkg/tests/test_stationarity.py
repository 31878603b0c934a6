import math

import numpy as np
import pytest

from quantropy.ensemble import Classicality, ComplexEnsemble, HistorySpace, feynman_weights, random_space
from quantropy.exceptions import InvalidInput
from quantropy.stationarity import (
    directional_stationarity,
    free_action_residual,
    lagrange_residual,
    perturbed_ensemble,
    relative_tangent_directions,
    tangent_directions,
    verification_record,
)


def test_feynman_residual_vanishes(rng):
    space = random_space(rng, 12)
    res = lagrange_residual(feynman_weights(space, 1.0), 1.0)
    assert res.max_abs <= 1e-12
    assert res.max_abs == pytest.approx(np.max(np.abs(res.per_history)))


def test_uniform_amplitudes_are_not_stationary():
    # a = 1/2 on A = (0, 1), lam = 1: r = (-ln2 + lnZ, -ln2 + 1 + lnZ)
    space = HistorySpace.from_actions([0.0, 1.0])
    ens = ComplexEnsemble.from_amplitudes(space, [0.5, 0.5])
    res = lagrange_residual(ens, 1.0)
    ln_z = math.log(1 + math.exp(-1))
    expected = max(abs(-math.log(2) + ln_z), abs(1 - math.log(2) + ln_z))
    assert res.max_abs == pytest.approx(expected, abs=1e-14)
    assert res.max_abs >= 0.2


def test_imaginary_lambda_residual(rng):
    lam = Classicality.from_hbar(0.5)
    space = random_space(rng, 8)
    assert lagrange_residual(feynman_weights(space, lam), lam).max_abs <= 1e-12


def test_free_action_formulation_has_same_zero_set(rng):
    for lam in (1.0, -1j, 0.5 + 1j):
        space = random_space(rng, 9)
        ens = feynman_weights(space, lam)
        r = lagrange_residual(ens, lam).per_history
        np.testing.assert_allclose(free_action_residual(ens, lam), r / lam, atol=1e-12)
        bad = perturbed_ensemble(space, lam, 0.1, rng)
        np.testing.assert_allclose(free_action_residual(bad, lam),
                                   lagrange_residual(bad, lam).per_history / lam, atol=1e-12)


class TestDirections:
    def test_tangent_directions_respect_constraints(self, rng):
        space = random_space(rng, 10)
        d = tangent_directions(space, rng, 5)
        np.testing.assert_allclose(d @ space.weights, 0, atol=1e-13)
        np.testing.assert_allclose(d @ (space.weights * space.actions), 0, atol=1e-12)
        np.testing.assert_allclose(np.linalg.norm(d, axis=1), 1.0)

    def test_relative_directions_respect_constraints(self, rng):
        space = random_space(rng, 10)
        ens = feynman_weights(space, 0.7 - 1.3j)
        d = relative_tangent_directions(ens, rng, 5)
        np.testing.assert_allclose(d @ space.weights, 0, atol=1e-13)
        np.testing.assert_allclose(d @ (space.weights * space.actions), 0, atol=1e-12)
        np.testing.assert_allclose(np.max(np.abs(d / ens.amplitudes), axis=1), 1.0)

    def test_needs_three_histories(self, rng):
        with pytest.raises(InvalidInput):
            tangent_directions(HistorySpace.from_actions([0.0, 1.0]), rng, 1)


def test_directional_real(rng):
    space = random_space(rng, 4)
    assert directional_stationarity(space, 1.0, trials=16, t=1e-4, rng=rng) <= 1e-9


def test_directional_imaginary(rng):
    space = random_space(rng, 8)
    assert directional_stationarity(space, -1j, trials=16, t=1e-4, rng=rng) <= 1e-9


def test_negative_control(rng):
    space = random_space(rng, 6)
    bad = perturbed_ensemble(space, 1.0, 0.1, rng)
    assert directional_stationarity(space, 1.0, trials=8, rng=rng, ensemble=bad) >= 1e-3
    assert lagrange_residual(bad, 1.0).max_abs >= 1e-3


def test_record_schema():
    rec = verification_record(1e-15, 2e-10, 4, 42)
    assert set(rec) == {"residual_max", "linear_coeff_max", "trials", "seed"}
