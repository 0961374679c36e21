"""Detect targets among non-linear clutter ridges in STAP angle-Doppler maps.

Pipeline: simulated space-time covariance, Capon (minimum-variance) map,
floor-relative thresholding, 8-connected region labeling, Moore boundary
tracing, shape features (circularity ratio and bending energy) and a
two-class Mahalanobis classifier.
"""

from ._kernels import BACKEND
from .classifier import ClassifierModel, Decision, classify, fit, mahalanobis
from .config import DetectorSettings, RadarScenarioConfig, RunConfig, TrainingSettings
from .errors import (
    CrabDetectError,
    DegenerateContourError,
    DegenerateCovarianceError,
    InsufficientDataError,
    InvalidCovarianceError,
    NumericalError,
    ValidationError,
)
from .features import FeatureVector, RegionFeatures, bending_energy, circularity, region_features
from .pipeline import evaluate, generate_training_set, run_scene
from .regions import Contour, Region, chain_code, discard_edge_regions, label_regions, trace_boundary
from .scene import Hypothesis, clutter_ridge, covariance, sample_snapshots, steering_vector
from .spectral import AngleDopplerMap, DenoisedMap, SpectralGrid, denoise, mv_spectrum

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ClassifierModel", "Decision", "classify", "fit", "mahalanobis",
    "DetectorSettings", "RadarScenarioConfig", "RunConfig", "TrainingSettings",
    "CrabDetectError", "DegenerateContourError", "DegenerateCovarianceError",
    "InsufficientDataError", "InvalidCovarianceError", "NumericalError", "ValidationError",
    "FeatureVector", "RegionFeatures", "bending_energy", "circularity", "region_features",
    "evaluate", "generate_training_set", "run_scene",
    "Contour", "Region", "chain_code", "discard_edge_regions", "label_regions", "trace_boundary",
    "Hypothesis", "clutter_ridge", "covariance", "sample_snapshots", "steering_vector",
    "AngleDopplerMap", "DenoisedMap", "SpectralGrid", "denoise", "mv_spectrum",
]
