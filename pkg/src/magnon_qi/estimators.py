"""scikit-learn style wrappers around the resonant pipeline.

Rows of ``X`` are cooperativity pairs ``(Lambda_a, Lambda_b)``. The wrappers
hold device and scenario settings as hyperparameters, so they can be cloned,
grid-searched or dropped into a ``Pipeline`` ahead of a regressor.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, validate_data

from .converter import matrix_is_stable, cooperativity_drift_matrix, output_coefficients_resonant
from .detection import evaluate_detection
from .errors import DomainError
from .gaussian import output_moments, resource_report
from .system_params import Cooperativities, SystemParams, planck_occupation

OCCUPANCIES = ("microwave", "magnon")


def check_cooperativities(X, estimator=None, reset=True) -> np.ndarray:
    """Validate an (n, 2) array of nonnegative cooperativities."""
    if estimator is not None:
        X = validate_data(estimator, X, reset=reset, dtype=np.float64, ensure_min_features=2)
    else:
        X = check_array(X, dtype=np.float64)
    if X.shape[1] != 2:
        raise ValueError(f"expected 2 columns (lambda_a, lambda_b), got {X.shape[1]}")
    if np.any(X < 0.0):
        raise ValueError("cooperativities must be >= 0")
    return X


def _check_occupancy(occupancy):
    if occupancy not in OCCUPANCIES:
        raise ValueError(f"occupancy must be one of {OCCUPANCIES}, got {occupancy!r}")


class SourceResources(TransformerMixin, BaseEstimator):
    """Map cooperativities to per-photon quantum-resource features.

    Parameters
    ----------
    occupancy : {"microwave", "magnon"}
        Interpretation of the intermediary bath occupancy.
    discord_convention : {"half", "unit"}
    environment_temperature : float
        Kelvin.
    per_photon : bool
        Divide E_N, I and D by the microwave photon number.

    Unstable rows come back as NaN.
    """

    feature_names = ("n_b", "epsilon", "log_negativity", "coherent_information", "discord")

    def __init__(self, occupancy="microwave", discord_convention="half",
                 environment_temperature=0.030, per_photon=True):
        self.occupancy = occupancy
        self.discord_convention = discord_convention
        self.environment_temperature = environment_temperature
        self.per_photon = per_photon

    def fit(self, X, y=None):
        _check_occupancy(self.occupancy)
        check_cooperativities(X, self, reset=True)
        params = SystemParams(environment_temperature=self.environment_temperature)
        self.baths_ = params.baths(self.occupancy)
        self.kappas_ = params.kappas
        return self

    def _row(self, la, lb):
        coop = Cooperativities(la, lb)
        if not matrix_is_stable(cooperativity_drift_matrix(coop, self.kappas_)):
            return [np.nan] * len(self.feature_names)
        m = output_moments(output_coefficients_resonant(coop), self.baths_)
        rep = resource_report(m, (self.discord_convention,))
        values = [rep.log_negativity, rep.coherent_information, rep.discord[self.discord_convention]]
        if self.per_photon:
            values = [rep.per_photon(v) for v in values]
        return [m.n_b, rep.epsilon, *values]

    def transform(self, X):
        check_is_fitted(self, "baths_")
        X = check_cooperativities(X, self, reset=False)
        return np.array([self._row(la, lb) for la, lb in X], dtype=float).reshape(len(X), -1)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "baths_")
        return np.asarray(self.feature_names, dtype=object)


class IlluminationAdvantage(RegressorMixin, BaseEstimator):
    """Predict the QI-over-classical SNR ratio at equal transmitted energy.

    ``fit`` only resolves the thermal occupancies; ``score`` then measures how
    well the model reproduces observed ratios.
    """

    def __init__(self, eta=0.07, room_temperature=293.0, occupancy="magnon", environment_temperature=0.030):
        self.eta = eta
        self.room_temperature = room_temperature
        self.occupancy = occupancy
        self.environment_temperature = environment_temperature

    def fit(self, X, y=None):
        _check_occupancy(self.occupancy)
        if not 0.0 <= self.eta < 1.0:
            raise ValueError(f"eta must lie in [0, 1), got {self.eta}")
        check_cooperativities(X, self, reset=True)
        params = SystemParams(environment_temperature=self.environment_temperature)
        self.baths_ = params.baths(self.occupancy)
        self.background_occupancy_ = planck_occupation(params.microwave_frequency, self.room_temperature)
        return self

    def predict(self, X):
        check_is_fitted(self, "baths_")
        X = check_cooperativities(X, self, reset=False)
        out = np.empty(len(X))
        for i, (la, lb) in enumerate(X):
            try:
                out[i] = evaluate_detection(Cooperativities(la, lb), self.eta,
                                            self.background_occupancy_, self.baths_).ratio
            except (DomainError, ZeroDivisionError):
                out[i] = np.nan
        return out
