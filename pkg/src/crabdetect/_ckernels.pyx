# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled pixel kernels; same algorithms and outputs as ``_pykernels``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef int MOORE_DR[8]
cdef int MOORE_DC[8]
MOORE_DR[:] = [0, -1, -1, -1, 0, 1, 1, 1]
MOORE_DC[:] = [-1, -1, 0, 1, 1, 1, 0, -1]


def label_components(mask):
    cdef cnp.uint8_t[:, ::1] m = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef Py_ssize_t rows = m.shape[0], cols = m.shape[1]
    labels_arr = np.zeros((rows, cols), dtype=np.int32)
    cdef cnp.int32_t[:, ::1] lab = labels_arr
    stack_arr = np.empty(max(rows * cols, 1), dtype=np.intp)
    cdef Py_ssize_t[::1] stack = stack_arr
    cdef Py_ssize_t top, r0, c0, r, c, rr, cc, p
    cdef int dr, dc
    cdef cnp.int32_t current = 0
    for r0 in range(rows):
        for c0 in range(cols):
            if m[r0, c0] == 0 or lab[r0, c0] != 0:
                continue
            current += 1
            lab[r0, c0] = current
            stack[0] = r0 * cols + c0
            top = 1
            while top > 0:
                top -= 1
                p = stack[top]
                r = p // cols
                c = p - r * cols
                for dr in range(-1, 2):
                    rr = r + dr
                    if rr < 0 or rr >= rows:
                        continue
                    for dc in range(-1, 2):
                        cc = c + dc
                        if cc < 0 or cc >= cols:
                            continue
                        if m[rr, cc] != 0 and lab[rr, cc] == 0:
                            lab[rr, cc] = current
                            stack[top] = rr * cols + cc
                            top += 1
    return labels_arr, int(current)


cdef inline bint _fg(cnp.uint8_t[:, ::1] m, Py_ssize_t r, Py_ssize_t c,
                     Py_ssize_t rows, Py_ssize_t cols) nogil:
    return 0 <= r < rows and 0 <= c < cols and m[r, c] != 0


cdef inline int _direction(int dr, int dc) nogil:
    cdef int d
    for d in range(8):
        if MOORE_DR[d] == dr and MOORE_DC[d] == dc:
            return d
    return -1


def trace_boundary(mask, Py_ssize_t start_row, Py_ssize_t start_col):
    cdef cnp.uint8_t[:, ::1] m = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef Py_ssize_t rows = m.shape[0], cols = m.shape[1]
    cdef Py_ssize_t limit = 8 * rows * cols + 16
    pts_arr = np.empty((limit, 2), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] pts = pts_arr
    cdef Py_ssize_t count = 0, it, r = start_row, c = start_col, nr, nc
    cdef Py_ssize_t second_r = -1, second_c = -1
    cdef bint have_second = False, done = False
    cdef int back = 0, k, d, found, prev
    for it in range(limit):
        found = -1
        for k in range(1, 9):
            d = (back + k) % 8
            if _fg(m, r + MOORE_DR[d], c + MOORE_DC[d], rows, cols):
                found = d
                break
        if found < 0:
            pts[count, 0] = r
            pts[count, 1] = c
            count += 1
            done = True
            break
        nr = r + MOORE_DR[found]
        nc = c + MOORE_DC[found]
        if not have_second:
            second_r = nr
            second_c = nc
            have_second = True
        elif r == start_row and c == start_col and nr == second_r and nc == second_c:
            done = True
            break
        pts[count, 0] = r
        pts[count, 1] = c
        count += 1
        prev = (found + 7) % 8
        back = _direction(<int>(r + MOORE_DR[prev] - nr), <int>(c + MOORE_DC[prev] - nc))
        r = nr
        c = nc
    if not done:
        raise RuntimeError("boundary trace did not terminate")
    return pts_arr[:count].copy()
