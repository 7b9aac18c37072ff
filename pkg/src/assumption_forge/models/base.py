"""Estimator base: constructor-parameter introspection a la scikit-learn."""

from __future__ import annotations

import inspect

import numpy as np


class BaseClassifier:
    """fit/predict estimators with get_params/set_params support.

    Subclasses keep every hyperparameter as a constructor argument stored
    under the same attribute name, so parameter round trips are mechanical.
    Fitted state lives in trailing-underscore attributes.
    """

    @classmethod
    def _param_names(cls) -> list[str]:
        sig = inspect.signature(cls.__init__)
        return [
            name
            for name, p in sig.parameters.items()
            if name != "self" and p.kind not in (p.VAR_POSITIONAL, p.VAR_KEYWORD)
        ]

    def get_params(self) -> dict:
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params) -> "BaseClassifier":
        valid = set(self._param_names())
        for key, value in params.items():
            if key not in valid:
                raise ValueError(f"unknown parameter {key!r} for {type(self).__name__}")
            setattr(self, key, value)
        return self

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"

    # ties in multiclass scores resolve to the smallest label value
    @staticmethod
    def _argmax_rows(scores: np.ndarray) -> np.ndarray:
        return np.argmax(scores, axis=1)
