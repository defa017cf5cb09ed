"""scikit-learn wrapper around the inference engine."""

from __future__ import annotations

import os

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .fis_config import ERROR, FisParseError, load_fis, paper_fis, validate
from .fuzzy_core import DEFAULT_RESOLUTION, FisDefinition, infer, infer_batch, rule_strength_matrix


class MamdaniRegressor(RegressorMixin, BaseEstimator):
    """Predict a crisp output from a fixed Mamdani rule base.

    Nothing is learned: ``fit`` only resolves and validates the system so the
    estimator can sit in pipelines and grid searches.

    Parameters
    ----------
    fis : FisDefinition, path-like or None
        The fuzzy system. ``None`` uses the bundled speech accuracy system.
    resolution : int
        Number of output-range samples used by the centroid.
    """

    def __init__(self, fis=None, resolution=DEFAULT_RESOLUTION):
        self.fis = fis
        self.resolution = resolution

    def fit(self, X=None, y=None):
        if self.fis is None:
            fis = paper_fis()
        elif isinstance(self.fis, FisDefinition):
            fis = self.fis
        elif isinstance(self.fis, (str, os.PathLike)):
            fis = load_fis(self.fis)
        else:
            raise TypeError(f"fis must be a FisDefinition, a path or None, got {type(self.fis).__name__}")
        issues = validate(fis)
        if any(i.severity == ERROR for i in issues):
            raise FisParseError(issues)
        if int(self.resolution) < 3:
            raise ValueError(f"resolution must be at least 3, got {self.resolution}")
        self.fis_ = fis
        self.issues_ = issues
        self.n_features_in_ = len(fis.inputs)
        self.feature_names_in_ = np.asarray(fis.input_names(), dtype=object)
        if X is not None:
            self._check_X(X)
        return self

    def _check_X(self, X):
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, but the system expects {self.n_features_in_}")
        return X

    def predict(self, X):
        check_is_fitted(self, "fis_")
        crisp, _ = infer_batch(self.fis_, self._check_X(X), self.resolution)
        return crisp

    def predict_fired(self, X):
        """Whether any rule fired for each row."""
        check_is_fitted(self, "fis_")
        _, fired = infer_batch(self.fis_, self._check_X(X), self.resolution)
        return fired

    def transform(self, X):
        """Weighted rule firing strengths, shape (n_samples, n_rules)."""
        check_is_fitted(self, "fis_")
        return rule_strength_matrix(self.fis_, self._check_X(X))

    def trace(self, x):
        check_is_fitted(self, "fis_")
        return infer(self.fis_, list(x), self.resolution)
