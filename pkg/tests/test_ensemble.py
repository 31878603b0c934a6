import cmath
import math

import numpy as np
import pytest

from quantropy.ensemble import (
    Classicality,
    ComplexEnsemble,
    HistorySpace,
    expected_action,
    expected_action_via_derivative,
    feynman_weights,
    log_partition,
    product_space,
    quantropy,
    random_space,
    report,
)
from quantropy.exceptions import (
    InadmissibleClassicality,
    InvalidInput,
    InvariantViolation,
    NonFiniteAction,
    SizeOverflow,
    StepTooLarge,
    ZeroPartitionFunction,
)
from quantropy.freeparticle import FreeParticleModel, axis_space, closed_report

# two states with actions (0, 1) at lam = 1, evaluated with mpmath
A_TWO = (0.731058578630004879, 0.268941421369995121)
LNZ_TWO = 0.313261687518222834
Q_TWO = 0.582203108888217955


class TestHistorySpace:
    def test_rejects_bad_weights(self):
        with pytest.raises(InvalidInput):
            HistorySpace.from_actions([0.0, 1.0], [1.0, 0.0])
        with pytest.raises(InvalidInput):
            HistorySpace.from_actions([0.0, 1.0], [1.0, np.inf])

    def test_rejects_nonfinite_action(self):
        with pytest.raises(NonFiniteAction):
            HistorySpace.from_actions([0.0, np.nan])

    def test_needs_a_history(self):
        with pytest.raises(InvalidInput):
            HistorySpace.from_actions([])

    def test_json_round_trip(self):
        s = HistorySpace.from_actions([0.5, 2.0], [1.0, 3.0], ["x", "y"])
        back = HistorySpace.from_dict(s.to_dict())
        assert back.ids == ("x", "y")
        np.testing.assert_array_equal(back.weights, [1.0, 3.0])
        np.testing.assert_array_equal(back.actions, [0.5, 2.0])

    def test_arrays_are_read_only(self):
        s = HistorySpace.from_actions([0.0, 1.0])
        with pytest.raises(ValueError):
            s.actions[0] = 3.0


class TestClassicality:
    def test_from_hbar(self):
        lam = Classicality.from_hbar(2.0)
        assert lam.lam == pytest.approx(-0.5j)

    @pytest.mark.parametrize("bad", [0, -1.0, complex(-0.1, 1.0)])
    def test_inadmissible(self, bad):
        with pytest.raises(InadmissibleClassicality):
            Classicality(bad)

    def test_hbar_mismatch(self):
        with pytest.raises(InvalidInput):
            Classicality(-1j, hbar=2.0)


class TestFeynmanWeights:
    @pytest.mark.parametrize("lam", [1.0, -0.4j, 0.2 - 0.3j])
    def test_single_history(self, lam):
        ens = feynman_weights(HistorySpace.from_actions([7.0]), lam)
        assert ens.amplitudes[0] == pytest.approx(1.0)
        assert abs(ens.log_amplitudes[0]) < 1e-12

    def test_single_history_branch_wrap(self):
        # -7*lam has imaginary part 7/0.3 > pi, so principal Ln Z differs from
        # -7*lam by 2*pi*i*k and the stored branch is b = 2*pi*i*k, not 0
        ens = feynman_weights(HistorySpace.from_actions([7.0]), Classicality.from_hbar(0.3))
        assert ens.amplitudes[0] == pytest.approx(1.0)
        b = ens.log_amplitudes[0]
        k = round(b.imag / (2 * math.pi))
        assert k != 0
        assert abs(b - 2j * math.pi * k) < 1e-12

    def test_two_state_real(self, two_state):
        ens = feynman_weights(two_state, 1.0)
        np.testing.assert_allclose(ens.amplitudes.real, A_TWO, rtol=0, atol=1e-15)
        assert np.all(ens.amplitudes.imag == 0)

    def test_destructive_interference(self):
        space = HistorySpace.from_actions([0.0, math.pi])
        with pytest.raises(ZeroPartitionFunction):
            feynman_weights(space, -1j)

    def test_overflow_prone_actions_are_shifted(self):
        space = HistorySpace.from_actions([1000.0, 1001.0])
        ens = feynman_weights(space, 1.0)
        np.testing.assert_allclose(ens.amplitudes.real, A_TWO, atol=1e-14)
        assert log_partition(space, 1.0).real == pytest.approx(LNZ_TWO - 1000.0, abs=1e-12)

    def test_log_partition_is_principal(self, rng):
        for _ in range(20):
            space = random_space(rng, 10, action_scale=50.0)
            lam = complex(rng.uniform(0.01, 1.0), rng.uniform(-3, 3))
            lz = log_partition(space, lam)
            assert -math.pi < lz.imag <= math.pi
            z = np.sum(space.weights * np.exp(-lam * space.actions))
            assert abs(cmath.exp(lz) - z) <= 1e-9 * abs(z)

    def test_invariant_checks(self, two_state):
        with pytest.raises(InvariantViolation):
            ComplexEnsemble.from_amplitudes(two_state, [0.5, 0.6])


class TestScalars:
    def test_quantropy_single(self):
        ens = feynman_weights(HistorySpace.from_actions([3.0]), 1.0)
        assert quantropy(ens) == pytest.approx(0.0, abs=1e-14)

    @pytest.mark.parametrize("n", [1, 2, 5, 64])
    def test_quantropy_uniform(self, n):
        ens = feynman_weights(HistorySpace.from_actions(np.zeros(n)), 1.0)
        assert quantropy(ens) == pytest.approx(math.log(n), abs=1e-12)

    def test_zero_amplitude_contributes_nothing(self):
        space = HistorySpace.from_actions([0.0, 0.0, 0.0])
        ens = ComplexEnsemble(space, np.array([0.5, 0.5, 0.0]),
                              np.array([-math.log(2), -math.log(2), -np.inf]))
        assert quantropy(ens) == pytest.approx(math.log(2))

    def test_expected_action(self, two_state):
        assert expected_action(feynman_weights(HistorySpace.from_actions([7.0]), 1j)) == pytest.approx(7.0)
        assert expected_action(feynman_weights(two_state, 1.0)) == pytest.approx(A_TWO[1], abs=1e-15)

    def test_quadratic_grid_expected_action(self):
        # fine velocity grid of a unit Gaussian mode at lam=1: <A> = 1/2
        space = axis_space(FreeParticleModel(), 9.0, 4001)
        assert expected_action(feynman_weights(space, 1.0)) == pytest.approx(0.5, abs=1e-12)


class TestReport:
    def test_single_zero_action(self):
        rep = report(HistorySpace.from_actions([0.0]), -1j)
        assert all(abs(v) < 1e-15 for v in rep.as_tuple())

    def test_two_state(self, two_state):
        rep = report(two_state, 1.0)
        assert rep.log_Z == pytest.approx(LNZ_TWO, abs=1e-14)
        assert rep.expected_action == pytest.approx(A_TWO[1], abs=1e-14)
        assert rep.quantropy == pytest.approx(Q_TWO, abs=1e-14)
        assert rep.free_action == pytest.approx(-LNZ_TWO, abs=1e-14)

    def test_free_particle_grid_matches_closed_form(self):
        # n=2 via a product of two real-lambda axes; closed form is the oracle
        model = FreeParticleModel(n=2, dx_scale=1.0)
        axis = axis_space(model, 9.0, 801)
        rep = report(product_space(axis, axis), 1.0)
        cf = closed_report(model, 1.0)
        for got, want in zip(rep.as_tuple(), cf.as_tuple()):
            assert abs(got - want) < 1e-10


class TestDerivative:
    @pytest.mark.parametrize("lam", [1.0, -1j, 0.3 + 2j, 5.0])
    def test_linear_log_partition(self, lam):
        space = HistorySpace.from_actions([3.0])
        assert expected_action_via_derivative(space, lam, 1e-5) == pytest.approx(3.0, abs=1e-8)

    def test_two_state(self, two_state):
        d = expected_action_via_derivative(two_state, 1.0)
        assert abs(d - A_TWO[1]) < 1e-8

    def test_second_order_convergence(self, two_state):
        exact = report(two_state, 1.0).expected_action
        e1 = abs(expected_action_via_derivative(two_state, 1.0, 1e-2) - exact)
        e2 = abs(expected_action_via_derivative(two_state, 1.0, 5e-3) - exact)
        assert e2 / e1 == pytest.approx(0.25, rel=0.02)

    def test_step_too_large(self):
        # ln Z near the branch cut: Z ~ -1 at lam = -i for A = pi
        space = HistorySpace.from_actions([math.pi])
        with pytest.raises(StepTooLarge):
            expected_action_via_derivative(space, -1j, 1e-3)

    def test_must_stay_admissible(self):
        space = HistorySpace.from_actions([1.0])
        with pytest.raises(InadmissibleClassicality):
            expected_action_via_derivative(space, 0.5, 1.0)


class TestProductSpace:
    def test_identity_element(self, rng):
        s = random_space(rng, 5)
        unit = HistorySpace.from_actions([0.0])
        p = product_space(s, unit)
        np.testing.assert_array_equal(p.actions, s.actions)
        np.testing.assert_array_equal(p.weights, s.weights)

    def test_two_by_two(self):
        s1 = HistorySpace.from_actions([0.0, 1.0], [1.0, 2.0])
        s2 = HistorySpace.from_actions([10.0, 20.0], [3.0, 5.0])
        p = product_space(s1, s2)
        np.testing.assert_array_equal(p.actions, [10.0, 20.0, 11.0, 21.0])
        np.testing.assert_array_equal(p.weights, [3.0, 5.0, 6.0, 10.0])

    def test_log_partition_adds(self, rng):
        s1, s2 = random_space(rng, 2), random_space(rng, 3)
        assert log_partition(product_space(s1, s2), 1.0) == pytest.approx(
            log_partition(s1, 1.0) + log_partition(s2, 1.0), abs=1e-12)

    def test_cap(self, monkeypatch):
        s = HistorySpace.from_actions(np.zeros(10))
        with pytest.raises(SizeOverflow):
            product_space(s, s, cap=99)
        monkeypatch.setenv("QUANTROPY_MAX_HISTORIES", "50")
        with pytest.raises(SizeOverflow):
            product_space(s, s)
