"""Versioned model artifact container with feature-schema fingerprint checks."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .classifiers import Classifier, classifier_from_params
from .regression import LassoFit, RidgeFit, Standardization

ARTIFACT_VERSION = 1


class ModelIOError(Exception):
    pass


@dataclass
class TrainedModel:
    """A fitted classifier or regressor bound to a feature-schema fingerprint."""

    kind: str
    schema_fingerprint: str
    train_config: dict
    classifier: Classifier | None = None
    regressor: LassoFit | RidgeFit | None = None
    label_spec: dict | None = None

    @property
    def classes(self) -> tuple[str, ...] | None:
        return self.classifier.classes if self.classifier else None

    def _check(self, fingerprint: str) -> None:
        if fingerprint != self.schema_fingerprint:
            raise ModelIOError(
                f"schema fingerprint mismatch: model={self.schema_fingerprint} input={fingerprint}"
            )

    def predict_proba(self, X: np.ndarray, fingerprint: str) -> np.ndarray:
        self._check(fingerprint)
        if self.classifier is None:
            raise ModelIOError("artifact holds no classifier")
        return self.classifier.predict_proba(X)

    def predict_value(self, X: np.ndarray, fingerprint: str) -> np.ndarray:
        self._check(fingerprint)
        if self.regressor is None:
            raise ModelIOError("artifact holds no regressor")
        return self.regressor.predict(X)

    def save(self, path: str | Path) -> None:
        payload: dict = {
            "artifact_version": ARTIFACT_VERSION,
            "kind": self.kind,
            "schema_fingerprint": self.schema_fingerprint,
            "train_config": self.train_config,
            "label_spec": self.label_spec,
        }
        if self.classifier is not None:
            payload["classifier"] = {
                "kind": self.classifier.kind,
                "classes": list(self.classifier.classes),
                "params": self.classifier.to_params(),
            }
        if self.regressor is not None:
            st = self.regressor.standardization
            payload["regressor"] = {
                "kind": "lasso" if isinstance(self.regressor, LassoFit) else "ridge",
                "names": self.regressor.names,
                "coefficients": self.regressor.coefficients,
                "std_coefficients": self.regressor.std_coefficients,
                "intercept": self.regressor.intercept,
                "lambda": self.regressor.lam,
                "standardization": {
                    "means": st.means.tolist(),
                    "stds": st.stds.tolist(),
                    "kept": st.kept.tolist(),
                    "dropped": st.dropped,
                },
                "vif": getattr(self.regressor, "vif", {}),
            }
        Path(path).write_text(json.dumps(payload, sort_keys=True), "utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "TrainedModel":
        payload = json.loads(Path(path).read_text("utf-8"))
        if payload.get("artifact_version") != ARTIFACT_VERSION:
            raise ModelIOError("unsupported artifact version")
        classifier = None
        if "classifier" in payload:
            c = payload["classifier"]
            classifier = classifier_from_params(c["kind"], c["classes"], c["params"])
        regressor = None
        if "regressor" in payload:
            r = payload["regressor"]
            st = Standardization(
                means=np.array(r["standardization"]["means"]),
                stds=np.array(r["standardization"]["stds"]),
                kept=np.array(r["standardization"]["kept"], dtype=np.int64),
                dropped=list(r["standardization"]["dropped"]),
            )
            common = dict(
                names=list(r["names"]),
                coefficients=dict(r["coefficients"]),
                std_coefficients=dict(r["std_coefficients"]),
                intercept=r["intercept"],
                lam=r["lambda"],
                standardization=st,
            )
            if r["kind"] == "lasso":
                regressor = LassoFit(vif=dict(r.get("vif", {})), **common)
            else:
                regressor = RidgeFit(**common)
        return cls(
            kind=payload["kind"],
            schema_fingerprint=payload["schema_fingerprint"],
            train_config=payload["train_config"],
            classifier=classifier,
            regressor=regressor,
            label_spec=payload.get("label_spec"),
        )
