"""Two-class Mahalanobis classifier over (CR, E_B) feature vectors.

Class 0 is clutter (regions seen under the null hypothesis or away from the
target), class 1 is target.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InsufficientDataError, ValidationError
from .features import FeatureVector

CLUTTER = "clutter"
TARGET = "target"


@dataclass(frozen=True)
class ClassifierModel:
    m0: np.ndarray
    m1: np.ndarray
    C0: np.ndarray
    C1: np.ndarray
    epsilon: tuple[float, float]
    training_counts: tuple[int, int]
    config_digest: str = ""
    pooled: bool = False

    def validate(self):
        for name in ("m0", "m1"):
            v = getattr(self, name)
            if v.shape != (2,) or not np.all(np.isfinite(v)):
                raise ValidationError(f"model {name} must be a finite 2-vector")
        for name in ("C0", "C1"):
            C = getattr(self, name)
            if C.shape != (2, 2) or not np.all(np.isfinite(C)):
                raise ValidationError(f"model {name} must be a finite 2x2 matrix")
            if np.max(np.abs(C - C.T)) > 1e-12 * max(1.0, np.max(np.abs(C))):
                raise ValidationError(f"model {name} is not symmetric")
            if np.linalg.eigvalsh(C)[0] <= 0:
                raise ValidationError(f"model {name} is not positive definite")
        if min(self.training_counts) < 2:
            raise ValidationError("model needs at least two training samples per class")
        return self

    def to_dict(self):
        return {
            "m0": self.m0.tolist(),
            "m1": self.m1.tolist(),
            "C0": self.C0.tolist(),
            "C1": self.C1.tolist(),
            "epsilon": list(self.epsilon),
            "training_counts": list(self.training_counts),
            "config_digest": self.config_digest,
            "pooled": self.pooled,
        }

    @classmethod
    def from_dict(cls, data):
        try:
            model = cls(
                m0=np.asarray(data["m0"], dtype=float),
                m1=np.asarray(data["m1"], dtype=float),
                C0=np.asarray(data["C0"], dtype=float),
                C1=np.asarray(data["C1"], dtype=float),
                epsilon=tuple(float(e) for e in data["epsilon"]),
                training_counts=tuple(int(n) for n in data["training_counts"]),
                config_digest=str(data.get("config_digest", "")),
                pooled=bool(data.get("pooled", False)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed model document: {exc!r}") from exc
        return model.validate()

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path):
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON ({exc})") from exc
        try:
            return cls.from_dict(data)
        except ValidationError as exc:
            raise ValidationError(f"{path}: {exc}") from exc


def _regularize(C):
    """Add eps*I when the smallest eigenvalue is below 1e-9 * trace."""
    tr = float(np.trace(C))
    if np.linalg.eigvalsh(C)[0] >= 1e-9 * tr and tr > 0:
        return C, 0.0
    eps = 1e-6 * tr / 2 if tr > 0 else 1e-12
    return C + eps * np.eye(len(C)), eps


def fit(features, labels, pooled=False, config_digest=""):
    """Per-class sample means and unbiased covariances.

    ``features`` is (n, 2); ``labels`` holds 0/1 or "clutter"/"target".
    """
    X = np.asarray(features, dtype=float).reshape(-1, 2)
    y = np.array([_label_index(v) for v in labels], dtype=int)
    if len(y) != len(X):
        raise ValidationError("features and labels differ in length")
    if not np.all(np.isfinite(X)):
        raise ValidationError("training features must be finite")
    groups = [X[y == 0], X[y == 1]]
    counts = tuple(len(g) for g in groups)
    if min(counts) < 2:
        raise InsufficientDataError(
            f"need at least 2 samples per class, got clutter={counts[0]} target={counts[1]}")
    means = [g.mean(axis=0) for g in groups]
    covs = [np.atleast_2d(np.cov(g, rowvar=False, ddof=1)) for g in groups]
    if pooled:
        n0, n1 = counts
        shared = ((n0 - 1) * covs[0] + (n1 - 1) * covs[1]) / (n0 + n1 - 2)
        covs = [shared, shared]
    regs = [_regularize((C + C.T) / 2) for C in covs]
    return ClassifierModel(
        m0=means[0], m1=means[1], C0=regs[0][0], C1=regs[1][0],
        epsilon=(regs[0][1], regs[1][1]), training_counts=counts,
        config_digest=config_digest, pooled=pooled,
    ).validate()


def _label_index(v):
    if v in (0, 1):
        return int(v)
    if v == CLUTTER:
        return 0
    if v == TARGET:
        return 1
    raise ValidationError(f"unknown class label {v!r}")


def mahalanobis(f, mean, cov):
    d = np.asarray(f, dtype=float) - mean
    q = float(d @ np.linalg.solve(cov, d))
    return float(np.sqrt(max(q, 0.0)))


@dataclass(frozen=True)
class Decision:
    label: str
    d0: float
    d1: float


def classify(f, model):
    """Clutter when d1 > d0, target otherwise (ties go to target)."""
    if isinstance(f, FeatureVector):
        f = f.as_array()
    f = np.asarray(f, dtype=float)
    if f.shape != (2,) or not np.all(np.isfinite(f)):
        raise ValidationError("feature vector must be two finite numbers")
    d0 = mahalanobis(f, model.m0, model.C0)
    d1 = mahalanobis(f, model.m1, model.C1)
    return Decision(CLUTTER if d1 > d0 else TARGET, d0, d1)
