"""Scene pipeline and Monte Carlo drivers.

One scene: covariance -> Capon map -> denoise -> label -> edge discard ->
contour features -> (optional) classification.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .classifier import CLUTTER, TARGET, classify
from .config import RunConfig
from .errors import DegenerateContourError, ValidationError
from .features import region_features
from .regions import discard_edge_regions, label_regions, trace_boundary
from .scene import Hypothesis, covariance
from .spectral import SpectralGrid, denoise, mv_spectrum

# distinct SeedSequence tags keep training and evaluation draws apart
TAG_TRAIN = 11
TAG_EVAL = 12


@dataclass
class SceneResult:
    config: RunConfig
    hypothesis: Hypothesis
    grid: SpectralGrid
    spectrum: object
    denoised: object
    regions: list
    kept: list
    discarded: list
    contours: list
    features: list
    decisions: list = field(default_factory=list)
    timing_ms: dict = field(default_factory=dict)

    def target_cell(self):
        sc = self.config.scenario
        return self.grid.nearest_cell(sc.target_spatial_freq, sc.target_doppler_hz)

    def truth_labels(self):
        """Target for the region holding the injected target cell, clutter otherwise."""
        if self.hypothesis is not Hypothesis.H1:
            return [CLUTTER] * len(self.kept)
        row, col = self.target_cell()
        return [TARGET if reg.contains(row, col) else CLUTTER for reg in self.kept]

    def report(self, model_digest=""):
        """JSON-ready report; timing is kept out so reruns are byte-identical."""
        rows = []
        for i, (reg, feat) in enumerate(zip(self.kept, self.features)):
            row = {
                "id": reg.id,
                "area": reg.area,
                "bounding_box": list(reg.bounding_box),
                "perimeter": feat.perimeter,
                "cr": feat.cr,
                "eb": feat.eb,
            }
            if self.decisions:
                dec = self.decisions[i]
                row.update(d0=dec.d0, d1=dec.d1, label=dec.label)
            rows.append(row)
        return {
            "config_digest": self.config.digest(),
            "model_digest": model_digest,
            "hypothesis": self.hypothesis.value,
            "threshold": self.denoised.threshold,
            "support_count": self.denoised.support_count,
            "diagonal_loading": self.spectrum.loading,
            "region_count": len(self.regions),
            "discarded_region_count": len(self.discarded),
            "regions": rows,
        }


def run_scene(run_config, model=None, hypothesis=None):
    sc = run_config.scenario
    det = run_config.detector
    timing = {}
    clock = time.perf_counter()

    def lap(name):
        nonlocal clock
        now = time.perf_counter()
        timing[name] = (now - clock) * 1e3
        clock = now

    cov = covariance(sc, hypothesis)
    lap("covariance")
    grid = SpectralGrid.from_config(sc)
    spec = mv_spectrum(cov.matrix, grid)
    lap("mv_spectrum")
    den = denoise(spec, det.k_sigma, det.bottom_fraction)
    lap("denoise")
    regions = label_regions(den, min_region_area=det.min_region_area)
    lap("label_regions")
    kept, dropped = discard_edge_regions(regions, den.values.shape, det.guard_cols,
                                         det.guard_rows, det.span_exempt)
    lap("discard_edge_regions")
    contours, feats, usable = [], [], []
    for reg in kept:
        con = trace_boundary(reg)
        try:
            feat = region_features(reg, con)
        except DegenerateContourError:
            dropped.append(reg)
            continue
        usable.append(reg)
        contours.append(con)
        feats.append(feat)
    lap("features")
    decisions = [classify(f.vector, model) for f in feats] if model is not None else []
    lap("classify")
    return SceneResult(run_config, cov.hypothesis, grid, spec, den, regions, usable, dropped,
                       contours, feats, decisions, timing)


def ridge_crossings(scenario):
    """Clutter Doppler (Hz) where the ridge passes the target's spatial frequency."""
    ratio = scenario.target_spatial_freq * scenario.wavelength / scenario.spacing
    if abs(ratio) > 1:
        return []
    phi = math.acos(ratio)
    fmax = scenario.max_clutter_doppler
    return [fmax * math.cos(phi - scenario.crab_angle), fmax * math.cos(-phi - scenario.crab_angle)]


def draw_target_doppler(rng, run_config):
    """Uniform over +-[min, max] Hz, rejecting draws near a ridge crossing."""
    tr = run_config.training
    sc = run_config.scenario
    lo, hi = tr.doppler_min_hz, min(tr.doppler_max_hz, sc.prf_hz / 2)
    crossings = ridge_crossings(sc)
    for _ in range(10_000):
        f = rng.uniform(lo, hi) * rng.choice((-1.0, 1.0))
        if all(abs(f - x) > tr.ridge_exclusion_hz for x in crossings):
            return float(f)
    raise ValidationError("training Doppler window is entirely inside the ridge exclusion zone")


def _trial_seed(seed, tag, index):
    return int(np.random.SeedSequence([seed, tag, index]).generate_state(1, dtype=np.uint64)[0])


@dataclass
class TrainingSet:
    features: np.ndarray  # (n, 2)
    labels: list
    records: list  # one dict per row
    skipped_trials: list

    def __len__(self):
        return len(self.labels)

    def counts(self):
        return {CLUTTER: self.labels.count(CLUTTER), TARGET: self.labels.count(TARGET)}


def _training_trial(args):
    run_config, seed, index, hypothesis = args
    scenario_seed = _trial_seed(seed, TAG_TRAIN, index)
    rng = np.random.default_rng(scenario_seed)
    jitter = run_config.training.cnr_jitter_db
    sc = run_config.scenario.replace(
        rng_seed=scenario_seed,
        target_present=hypothesis is Hypothesis.H1,
        cnr_db=run_config.scenario.cnr_db + rng.uniform(-jitter, jitter),
    )
    if hypothesis is Hypothesis.H1:
        sc = sc.replace(target_doppler_hz=draw_target_doppler(rng, run_config))
    cfg = RunConfig(sc, run_config.detector, run_config.training)
    res = run_scene(cfg, hypothesis=hypothesis)
    rows = []
    for reg, feat, label in zip(res.kept, res.features, res.truth_labels()):
        rows.append({
            "trial": index,
            "hypothesis": hypothesis.value,
            "target_doppler_hz": sc.target_doppler_hz if hypothesis is Hypothesis.H1 else None,
            "region_id": reg.id,
            "area": reg.area,
            "perimeter": feat.perimeter,
            "cr": feat.cr,
            "eb": feat.eb,
            "label": label,
        })
    return index, rows


def _map(fn, jobs, workers):
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, jobs, chunksize=8))
    return [fn(job) for job in jobs]


def generate_training_set(run_config, trials, seed, workers=1):
    """Monte Carlo feature set over both hypotheses.

    The first ``round(trials * h1_fraction)`` trials carry a target with a
    random Doppler; the rest are clutter-only. Every trial also draws its
    clutter level within +-``cnr_jitter_db`` of the configured CNR. Each
    trial's randomness comes from ``(seed, trial index)`` only.
    """
    if trials < 2:
        raise ValidationError("trials must be >= 2")
    n_h1 = int(round(trials * run_config.training.h1_fraction))
    jobs = [(run_config, seed, i, Hypothesis.H1 if i < n_h1 else Hypothesis.H0)
            for i in range(trials)]
    rows, skipped = [], []
    for index, trial_rows in _map(_training_trial, jobs, workers):
        if not trial_rows:
            skipped.append(index)
        rows.extend(trial_rows)
    X = np.array([[r["cr"], r["eb"]] for r in rows], dtype=float).reshape(-1, 2)
    return TrainingSet(X, [r["label"] for r in rows], rows, skipped)


def _eval_trial(args):
    run_config, model, seed, index = args
    scenario_seed = _trial_seed(seed, TAG_EVAL, index)
    out = []
    hyps = [Hypothesis.H1, Hypothesis.H0] if run_config.scenario.target_present else [Hypothesis.H0]
    for hyp in hyps:
        sc = run_config.scenario.replace(rng_seed=scenario_seed)
        res = run_scene(RunConfig(sc, run_config.detector, run_config.training), model, hyp)
        truth = res.truth_labels()
        out.append({
            "hypothesis": hyp.value,
            "truth": truth,
            "predicted": [d.label for d in res.decisions],
            "features": [(f.cr, f.eb) for f in res.features],
        })
    return out


def evaluate(run_config, model, trials, seed, workers=1):
    """Fresh seeded scenes of the configured scenario, scored region by region.

    Each trial runs the scene with the target (when the config has one) and
    the same clutter draw without it.
    """
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    jobs = [(run_config, model, seed, i) for i in range(trials)]
    confusion = {CLUTTER: {CLUTTER: 0, TARGET: 0}, TARGET: {CLUTTER: 0, TARGET: 0}}
    feats = {CLUTTER: [], TARGET: []}
    h1_pass = h1_total = h0_false = h0_total = 0
    for trial in _map(_eval_trial, jobs, workers):
        for scene in trial:
            for t, p, f in zip(scene["truth"], scene["predicted"], scene["features"]):
                confusion[t][p] += 1
                feats[t].append(f)
            if scene["hypothesis"] == "H1":
                h1_total += 1
                ok = TARGET in scene["truth"] and scene["truth"] == scene["predicted"]
                h1_pass += ok
            else:
                h0_total += 1
                h0_false += TARGET in scene["predicted"]
    acc = {}
    for cls in (CLUTTER, TARGET):
        n = sum(confusion[cls].values())
        acc[cls] = confusion[cls][cls] / n if n else None
    return {
        "trials": trials,
        "accuracy": acc,
        "confusion": confusion,
        "mean_features": {cls: (np.mean(v, axis=0).tolist() if v else None)
                          for cls, v in feats.items()},
        "h1_scene_pass_rate": h1_pass / h1_total if h1_total else None,
        "h0_false_target_rate": h0_false / h0_total if h0_total else None,
    }
