"""Pure-Python implementations of the pixel kernels.

These are the reference versions; ``_ckernels.pyx`` mirrors them line for line.
Both take a C-contiguous uint8 mask and return plain numpy arrays.
"""

import numpy as np

# Clockwise on a y-down raster, starting west.
MOORE_DR = (0, -1, -1, -1, 0, 1, 1, 1)
MOORE_DC = (-1, -1, 0, 1, 1, 1, 0, -1)


def label_components(mask):
    """Flood-fill 8-connected labelling; ids follow raster order of first pixel."""
    mask = np.ascontiguousarray(mask, dtype=np.uint8)
    rows, cols = mask.shape
    labels = np.zeros((rows, cols), dtype=np.int32)
    m = mask.tolist()
    lab = labels.tolist()
    current = 0
    for r0 in range(rows):
        for c0 in range(cols):
            if not m[r0][c0] or lab[r0][c0]:
                continue
            current += 1
            lab[r0][c0] = current
            stack = [(r0, c0)]
            while stack:
                r, c = stack.pop()
                for dr in (-1, 0, 1):
                    rr = r + dr
                    if rr < 0 or rr >= rows:
                        continue
                    row_m = m[rr]
                    row_l = lab[rr]
                    for dc in (-1, 0, 1):
                        cc = c + dc
                        if cc < 0 or cc >= cols:
                            continue
                        if row_m[cc] and not row_l[cc]:
                            row_l[cc] = current
                            stack.append((rr, cc))
    return np.asarray(lab, dtype=np.int32).reshape(rows, cols), current


def trace_boundary(mask, start_row, start_col):
    """Moore-neighbour trace with Jacob's stopping criterion.

    ``mask`` must contain exactly one 8-connected component and the start
    pixel must be its topmost-then-leftmost pixel. Returns an (n, 2) array
    of (row, col) points, clockwise, start not repeated at the end.
    """
    mask = np.ascontiguousarray(mask, dtype=np.uint8)
    rows, cols = mask.shape
    m = mask.tolist()

    def fg(r, c):
        return 0 <= r < rows and 0 <= c < cols and m[r][c]

    pts = []
    r, c = start_row, start_col
    back = 0  # west neighbour of the start is background by construction
    second = None
    limit = 8 * rows * cols + 16
    for _ in range(limit):
        found = -1
        for k in range(1, 9):
            d = (back + k) % 8
            if fg(r + MOORE_DR[d], c + MOORE_DC[d]):
                found = d
                break
        if found < 0:
            pts.append((r, c))  # isolated pixel
            break
        nr = r + MOORE_DR[found]
        nc = c + MOORE_DC[found]
        if second is None:
            second = (nr, nc)
        elif r == start_row and c == start_col and (nr, nc) == second:
            break  # Jacob: the opening move is about to repeat
        pts.append((r, c))
        # the neighbour scanned just before the hit is background; express it
        # relative to the new pixel to get the new backtrack direction
        prev = (found + 7) % 8
        back = _direction(r + MOORE_DR[prev] - nr, c + MOORE_DC[prev] - nc)
        r, c = nr, nc
    else:
        raise RuntimeError("boundary trace did not terminate")
    return np.asarray(pts, dtype=np.int64).reshape(-1, 2)


def _direction(dr, dc):
    for d in range(8):
        if MOORE_DR[d] == dr and MOORE_DC[d] == dc:
            return d
    raise ValueError(f"not a Moore neighbour offset: {(dr, dc)}")
