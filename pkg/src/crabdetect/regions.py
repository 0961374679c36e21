"""Connected regions of a denoised map, edge-artifact removal, boundary tracing.

Pixel coordinates are ``(row, col)`` with rows growing downward. Chain-code
angles use ``atan2(-d_row, d_col)``, so east is 0 and a down-right step
is ``-pi/4``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DegenerateContourError


@dataclass(frozen=True)
class Region:
    id: int
    pixels: np.ndarray  # (area, 2) int, raster order

    @property
    def area(self):
        return len(self.pixels)

    @property
    def bounding_box(self):
        """(min_row, max_row, min_col, max_col), inclusive."""
        r, c = self.pixels[:, 0], self.pixels[:, 1]
        return int(r.min()), int(r.max()), int(c.min()), int(c.max())

    def contains(self, row, col):
        return bool(np.any((self.pixels[:, 0] == row) & (self.pixels[:, 1] == col)))

    def mask(self, pad=1):
        """Cropped boolean mask and the (row, col) offset of its origin."""
        r0, r1, c0, c1 = self.bounding_box
        out = np.zeros((r1 - r0 + 1 + 2 * pad, c1 - c0 + 1 + 2 * pad), dtype=np.uint8)
        out[self.pixels[:, 0] - r0 + pad, self.pixels[:, 1] - c0 + pad] = 1
        return out, (r0 - pad, c0 - pad)


@dataclass(frozen=True)
class Contour:
    boundary: np.ndarray  # (n, 2) int, clockwise from the topmost-leftmost pixel

    def __len__(self):
        return len(self.boundary)

    @property
    def closing_distance(self):
        d = self.boundary[-1] - self.boundary[0]
        return float(np.hypot(d[0], d[1]))


def _as_mask(image):
    values = getattr(image, "values", image)
    return np.ascontiguousarray(np.asarray(values) != 0, dtype=np.uint8)


def label_regions(image, connectivity=8, min_region_area=3):
    """8-connected components of the nonzero pixels.

    ``image`` is a :class:`~crabdetect.spectral.DenoisedMap` or any 2-D array.
    Components smaller than ``min_region_area`` are dropped; the rest are
    numbered from 1 in raster order of their first pixel.
    """
    if connectivity != 8:
        raise ValueError("only 8-connectivity is supported")
    labels, count = _kernels.label_components(_as_mask(image))
    if count == 0:
        return []
    rows, cols = np.nonzero(labels)
    ids = labels[rows, cols]
    order = np.argsort(ids, kind="stable")  # keeps raster order inside a label
    rows, cols, ids = rows[order], cols[order], ids[order]
    splits = np.flatnonzero(np.diff(ids)) + 1
    regions = []
    for r, c in zip(np.split(rows, splits), np.split(cols, splits)):
        if len(r) < min_region_area:
            continue
        regions.append(Region(len(regions) + 1, np.column_stack([r, c]).astype(np.int64)))
    return regions


def label_image(regions, shape):
    out = np.zeros(shape, dtype=np.int32)
    for reg in regions:
        out[reg.pixels[:, 0], reg.pixels[:, 1]] = reg.id
    return out


def touches_edge(region, map_shape, guard=2, guard_rows=0):
    n_rows, n_cols = map_shape
    r0, r1, c0, c1 = region.bounding_box
    if guard > 0 and (c0 < guard or c1 > n_cols - 1 - guard):
        return True
    return guard_rows > 0 and (r0 < guard_rows or r1 > n_rows - 1 - guard_rows)


def discard_edge_regions(regions, map_shape, guard=2, guard_rows=0, span_exempt=None):
    """Drop regions whose bounding box reaches the first/last ``guard`` angle columns.

    ``guard_rows`` extends the band to the first/last Doppler rows. When
    ``span_exempt`` is given, a region whose angle extent covers more than
    that fraction of the map width is kept even if it touches the band:
    aliasing remnants hug one edge, while a crabbed clutter ridge runs from
    endfire to endfire and therefore always reaches both.

    Returns ``(kept, discarded)``.
    """
    kept, dropped = [], []
    n_cols = map_shape[1]
    for reg in regions:
        if touches_edge(reg, map_shape, guard, guard_rows):
            _, _, c0, c1 = reg.bounding_box
            if span_exempt is None or (c1 - c0 + 1) / n_cols <= span_exempt:
                dropped.append(reg)
                continue
        kept.append(reg)
    return kept, dropped


def trace_boundary(region):
    """Outer boundary by Moore-neighbour tracing (Jacob's stopping rule).

    Starts at the topmost-then-leftmost pixel and walks clockwise; a pixel
    is repeated once per visit (thin parts are walked out and back). The
    start pixel is not repeated at the end.
    """
    mask, (dr, dc) = region.mask(pad=1)
    start = region.pixels[0]
    pts = _kernels.trace_boundary(mask, int(start[0] - dr), int(start[1] - dc))
    return Contour(pts + np.array([dr, dc], dtype=np.int64))


def chain_code(contour):
    """Step directions and the boundary coordinates they connect.

    Returns ``(alpha, ell)``: ``alpha[t]`` is the direction from ``ell[t]``
    to ``ell[t + 1]`` snapped to a multiple of pi/4 in (-pi, pi]; a zero-length
    step yields NaN. ``len(alpha) == len(ell) - 1``.
    """
    ell = np.asarray(getattr(contour, "boundary", contour), dtype=float)
    if ell.ndim != 2 or len(ell) < 2:
        raise DegenerateContourError("chain code needs at least two boundary points")
    step = np.diff(ell, axis=0)
    alpha = np.arctan2(-step[:, 0], step[:, 1])
    octant = np.round(alpha / (np.pi / 4))
    octant[octant == -4] = 4
    alpha = octant * (np.pi / 4)
    alpha[(step[:, 0] == 0) & (step[:, 1] == 0)] = np.nan
    return alpha, ell


def write_regions_jsonl(regions, contours, path):
    with open(path, "w") as fh:
        for reg, con in zip(regions, contours):
            rec = {
                "id": reg.id,
                "area": reg.area,
                "bounding_box": list(reg.bounding_box),
                "boundary": con.boundary.tolist(),
            }
            fh.write(json.dumps(rec, separators=(",", ":")) + "\n")


def read_regions_jsonl(path):
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]
