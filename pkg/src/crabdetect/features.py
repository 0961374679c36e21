"""Circularity ratio and bending energy of a traced region."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateContourError
from .regions import chain_code, trace_boundary

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FeatureVector:
    cr: float
    eb: float

    def __post_init__(self):
        if not (np.isfinite(self.cr) and np.isfinite(self.eb)):
            raise ValueError("feature values must be finite")
        if self.cr < 0 or self.eb < 0:
            raise ValueError("feature values must be non-negative")

    def as_array(self):
        return np.array([self.cr, self.eb])


@dataclass(frozen=True)
class RegionFeatures:
    region_id: int
    area: int
    perimeter: float
    cr: float
    eb: float

    @property
    def vector(self):
        return FeatureVector(self.cr, self.eb)


def perimeter(contour):
    """Sum of consecutive boundary distances plus the first-to-last distance."""
    pts = np.asarray(getattr(contour, "boundary", contour), dtype=float)
    if pts.ndim != 2 or len(pts) < 2:
        raise DegenerateContourError("perimeter needs at least two boundary points")
    steps = np.diff(pts, axis=0)
    closing = pts[-1] - pts[0]
    return float(np.hypot(steps[:, 0], steps[:, 1]).sum() + np.hypot(closing[0], closing[1]))


def circularity(region, contour):
    """4 pi A / P^2: 1 for a disk, small for elongated shapes."""
    p = perimeter(contour)
    if p <= 0:
        raise DegenerateContourError("zero perimeter")
    return 4 * np.pi * region.area / p**2


def wrap_angle(x):
    """Map to (-pi, pi]; an exact reversal gives +pi."""
    return np.pi - np.mod(np.pi - np.asarray(x, dtype=float), 2 * np.pi)


def curvature(chain):
    """Turning angle per unit step: wrap(alpha[n+1] - alpha[n]) / |ell[n+1] - ell[n]|.

    Samples whose step has zero length (or an undefined direction) are
    skipped. Returns ``(delta, skipped)``.
    """
    alpha, ell = chain
    alpha = np.asarray(alpha, dtype=float)
    ell = np.asarray(ell, dtype=float)
    if len(alpha) < 2:
        raise DegenerateContourError("curvature needs at least two chain directions")
    turn = wrap_angle(alpha[1:] - alpha[:-1])
    step = np.diff(ell, axis=0)[: len(alpha) - 1]
    length = np.hypot(step[:, 0], step[:, 1])
    ok = (length > 0) & np.isfinite(turn)
    skipped = int(np.count_nonzero(~ok))
    if skipped:
        log.warning("curvature: skipped %d degenerate samples", skipped)
    return turn[ok] / length[ok], skipped


def bending_energy(chain):
    """Mean squared curvature along the contour."""
    delta, _ = curvature(chain)
    if delta.size == 0:
        raise DegenerateContourError("no valid curvature samples")
    return float(np.mean(delta**2))


def region_features(region, contour=None):
    if contour is None:
        contour = trace_boundary(region)
    p = perimeter(contour)
    cr = circularity(region, contour)
    eb = bending_energy(chain_code(contour))
    return RegionFeatures(region.id, region.area, p, cr, eb)


FEATURE_COLUMNS = ("region_id", "area", "perimeter", "cr", "eb", "label")


def write_feature_csv(rows, path, labels=None):
    """``rows`` are :class:`RegionFeatures`; ``labels`` is an optional parallel list."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FEATURE_COLUMNS)
        for i, f in enumerate(rows):
            label = "" if labels is None else labels[i]
            w.writerow([f.region_id, f.area, repr(f.perimeter), repr(f.cr), repr(f.eb), label])


def read_feature_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
