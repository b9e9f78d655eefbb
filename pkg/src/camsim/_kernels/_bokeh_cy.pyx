# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled disc-gather blur kernel.

Same contract as ``_bokeh_py.render``; see that module for the math.
"""

import numpy as np


def render(const double[:, :, ::1] img, const double[:, ::1] defocus,
           double blur_strength, double max_radius, double tau, double tau_leak):
    cdef Py_ssize_t h = img.shape[0]
    cdef Py_ssize_t w = img.shape[1]
    out_arr = np.empty((h, w, 3), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t y, x, qy, qx, y0, y1, x0, x1, ri
    cdef double r, r2, wsum, a0, a1, a2, wq, thresh, dy2, c0, c1, c2

    for y in range(h):
        for x in range(w):
            r = blur_strength * defocus[y, x]
            if r > max_radius:
                r = max_radius
            c0 = img[y, x, 0]
            c1 = img[y, x, 1]
            c2 = img[y, x, 2]
            if r < 0.5:
                out[y, x, 0] = c0
                out[y, x, 1] = c1
                out[y, x, 2] = c2
                continue
            ri = <Py_ssize_t>r
            r2 = r * r
            thresh = defocus[y, x] * (1.0 - tau)
            y0 = y - ri if y >= ri else 0
            y1 = y + ri if y + ri < h else h - 1
            x0 = x - ri if x >= ri else 0
            x1 = x + ri if x + ri < w else w - 1
            wsum = 0.0
            a0 = 0.0
            a1 = 0.0
            a2 = 0.0
            for qy in range(y0, y1 + 1):
                dy2 = <double>((qy - y) * (qy - y))
                for qx in range(x0, x1 + 1):
                    if dy2 + <double>((qx - x) * (qx - x)) <= r2:
                        wq = 1.0 if defocus[qy, qx] >= thresh else tau_leak
                        wsum += wq
                        a0 += wq * (img[qy, qx, 0] - c0)
                        a1 += wq * (img[qy, qx, 1] - c1)
                        a2 += wq * (img[qy, qx, 2] - c2)
            out[y, x, 0] = c0 + a0 / wsum
            out[y, x, 1] = c1 + a1 / wsum
            out[y, x, 2] = c2 + a2 / wsum
    return out_arr
