"""scikit-learn compatible wrappers around the ensemble engines.

``fit`` takes a 1-D array of actions (or energies), with optional
``sample_weight`` playing the role of the measure, and stores the fitted
ensemble in trailing-underscore attributes. ``transform`` maps new action
values to amplitudes (or probability densities) under the fitted
normalization, so the estimators drop into a ``Pipeline``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .ensemble import Classicality, HistorySpace, feynman_weights, expected_action, quantropy
from .exceptions import InvalidInput
from .thermo import boltzmann_probabilities, boltzmann_report


def _actions_from(X):
    X = check_array(X, ensure_2d=False, dtype=np.float64)
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise InvalidInput(f"expected a single action column, got {X.shape[1]} columns")
        X = X[:, 0]
    return X


class FeynmanEnsemble(TransformerMixin, BaseEstimator):
    """Amplitudes ``exp(-lam*A)/Z`` over a finite set of histories.

    Parameters
    ----------
    hbar : float, default=1.0
        Used when ``classicality`` is None, giving ``lam = 1/(i*hbar)``.
    classicality : complex, optional
        Explicit ``lam`` with ``Re(lam) >= 0``; overrides ``hbar``.

    Attributes
    ----------
    space_ : HistorySpace
    amplitudes_, log_amplitudes_ : ndarray of complex
    log_Z_, expected_action_, quantropy_, free_action_ : complex
    """

    def __init__(self, hbar=1.0, classicality=None):
        self.hbar = hbar
        self.classicality = classicality

    def _classicality(self):
        if self.classicality is not None:
            return Classicality(complex(self.classicality))
        return Classicality.from_hbar(self.hbar)

    def fit(self, X, y=None, sample_weight=None):
        actions = _actions_from(X)
        lam = self._classicality()
        self.space_ = HistorySpace.from_actions(actions, sample_weight)
        ens = feynman_weights(self.space_, lam)
        self.lambda_ = lam.lam
        self.amplitudes_ = ens.amplitudes
        self.log_amplitudes_ = ens.log_amplitudes
        self.log_Z_ = ens.log_Z
        self.expected_action_ = expected_action(ens)
        self.quantropy_ = quantropy(ens)
        self.free_action_ = -ens.log_Z / lam.lam
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "log_Z_")
        actions = _actions_from(X)
        return np.exp(-self.lambda_ * actions - self.log_Z_)

    def score(self, X=None, y=None):
        """Quantropy of the fitted ensemble (complex)."""
        check_is_fitted(self, "quantropy_")
        return self.quantropy_


class BoltzmannEnsemble(TransformerMixin, BaseEstimator):
    """Boltzmann densities ``exp(-beta*E)/Z`` over a finite set of states."""

    def __init__(self, beta=1.0):
        self.beta = beta

    def fit(self, X, y=None, sample_weight=None):
        energies = _actions_from(X)
        self.space_ = HistorySpace.from_actions(energies, sample_weight)
        rep = boltzmann_report(self.space_, self.beta)
        self.probabilities_, _, _ = boltzmann_probabilities(self.space_, self.beta)
        self.log_Z_ = rep.log_Z
        self.expected_energy_ = rep.expected_energy
        self.entropy_ = rep.entropy
        self.free_energy_ = rep.free_energy
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "log_Z_")
        energies = _actions_from(X)
        return np.exp(-self.beta * energies - self.log_Z_)

    def score(self, X=None, y=None):
        check_is_fitted(self, "entropy_")
        return self.entropy_
