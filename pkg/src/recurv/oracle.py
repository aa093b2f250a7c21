"""Finite-difference reference for the jet pipeline.

Only plain metric values are used (the evaluator at jet order 0), and the
Christoffel/Riemann formulas are written out as explicit loops, so nothing here
shares code with :mod:`recurv.curvature` beyond the metric itself.  Derivatives
are central differences with one Richardson step:
``(4 D(h/2) - D(h)) / 3``.
"""
from __future__ import annotations

import numpy as np

from .curvature import MetricField


def richardson_derivative(fn, point, h: float = 1e-4) -> np.ndarray:
    """``out[a, ...] = d_a fn(point)`` for an array-valued ``fn``."""
    point = np.asarray(point, dtype=float)

    def central(step, a):
        e = np.zeros_like(point)
        e[a] = step
        return (np.asarray(fn(point + e)) - np.asarray(fn(point - e))) / (2.0 * step)

    return np.stack([(4.0 * central(h / 2, a) - central(h, a)) / 3.0 for a in range(point.size)])


def fd_christoffel(f: MetricField, point, h: float = 1e-4) -> np.ndarray:
    """``gamma[k, i, j] = Gamma^k_{ij}`` from differenced metric values."""
    g = f.value(point)
    ginv = np.linalg.inv(g)
    dg = richardson_derivative(f.value, point, h)
    n = g.shape[0]
    out = np.zeros((n, n, n))
    for k in range(n):
        for i in range(n):
            for j in range(n):
                s = 0.0
                for m in range(n):
                    s += ginv[k, m] * (dg[i, j, m] + dg[j, i, m] - dg[m, i, j])
                out[k, i, j] = 0.5 * s
    return out


def fd_riemann(f: MetricField, point, h: float = 1e-4, return_scale: bool = False):
    """``riemann[j, k, l, m] = R_{jkl}^m`` with differenced Christoffel symbols.

    With ``return_scale`` also returns the Frobenius size of the largest
    constituent (dGamma or Gamma.Gamma), the natural yardstick when the
    curvature itself cancels to zero, e.g. a flat metric in a curved chart.
    """
    gam = fd_christoffel(f, point, h)
    dgam = richardson_derivative(lambda p: fd_christoffel(f, p, h), point, h)
    n = gam.shape[0]
    out = np.zeros((n, n, n, n))
    quad = np.zeros((n, n, n, n))
    for j in range(n):
        for k in range(n):
            for l in range(n):
                for m in range(n):
                    v = dgam[k, m, j, l] - dgam[j, m, k, l]
                    w = 0.0
                    for s in range(n):
                        w += gam[m, k, s] * gam[s, j, l] - gam[m, j, s] * gam[s, k, l]
                    out[j, k, l, m] = v + w
                    quad[j, k, l, m] = w
    if return_scale:
        return out, max(float(np.linalg.norm(dgam)), float(np.linalg.norm(quad)))
    return out


def relative_error(approx, reference, scale: float = 0.0) -> float:
    """|approx - reference| / max(|reference|, scale) (Frobenius); an exact zero
    denominator falls back to the absolute error."""
    diff = float(np.linalg.norm(np.ravel(np.asarray(approx) - np.asarray(reference))))
    ref = max(float(np.linalg.norm(np.ravel(reference))), scale)
    return diff / ref if ref > 0 else diff
