"""Adaptive Gauss-Kronrod quadrature carried out in log-space.

Integrands are supplied as ``log_f(x)`` (vectorised, returning ``-inf`` where the
integrand vanishes).  Panel values are accumulated relative to a running shift so
that integrals of size ``exp(-1000)`` remain representable.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

# 7-point Gauss / 15-point Kronrod nodes on [-1, 1].
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_KRONROD_W = np.concatenate([_WK[:-1], _WK[::-1]])
_GAUSS_W = np.zeros(15)
# Gauss nodes are the odd-indexed Kronrod nodes.
_GAUSS_W[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


@dataclass(frozen=True)
class Estimate:
    """Quadrature (or quadrature-backed) result.

    ``log_value`` is the natural log of the magnitude; ``abs_error_log`` bounds
    the error of ``log_value`` (so the relative error of the value is about
    ``expm1(abs_error_log)``).  ``sign`` is -1 only for signed integrands that
    come out negative.
    """

    log_value: float
    abs_error_log: float
    evaluations: int
    converged: bool = True
    sign: int = 1

    @property
    def value(self) -> float:
        return self.sign * math.exp(self.log_value)

    @property
    def rel_error(self) -> float:
        return math.expm1(self.abs_error_log)


def _panel(log_f, a, b, shift, sign):
    """Kronrod value and error on [a, b], scaled by exp(-shift').

    ``shift'`` is raised to the panel peak when that exceeds ``shift``, so no
    node overflows; the shift actually used is returned.
    """
    half = 0.5 * (b - a)
    x = 0.5 * (a + b) + half * _NODES
    lf = np.asarray(log_f(x), dtype=float)
    peak = float(np.max(lf)) if lf.size else -math.inf
    if peak > shift:
        shift = peak
    y = np.exp(lf - shift)
    if sign is not None:
        y = y * sign(x)
    kron = half * float(_KRONROD_W @ y)
    gauss = half * float(_GAUSS_W @ y)
    return kron, abs(kron - gauss), shift


def log_quad(
    log_f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    *,
    breakpoints: Sequence[float] = (),
    rtol: float = 1e-10,
    max_panels: int = 2000,
    extra_log_error: float = -math.inf,
    sign: Callable[[np.ndarray], np.ndarray] | None = None,
) -> Estimate:
    """Integrate ``exp(log_f)`` over the finite interval ``[a, b]``.

    ``sign``, when given, multiplies ``exp(log_f)`` so oscillating integrands can
    be handled; a negative result is reported through ``Estimate.sign``.
    ``extra_log_error`` is the log of an additional absolute error (e.g. an
    analytic bound on a truncated tail) folded into the reported error.
    The panel set is refined deterministically, largest error first, and the
    reduction uses ``math.fsum`` so the result does not depend on ordering.
    """
    if not b > a:
        raise ValueError(f"empty integration range [{a}, {b}]")
    if rtol < 1e-14:
        raise ValueError("rtol below 1e-14 is not attainable in double precision")
    edges = sorted({a, b, *(p for p in breakpoints if a < p < b)})

    # Probe the integrand once on a coarse grid to fix a working shift.
    probe = np.linspace(a, b, 65)[1:-1]
    probe_lf = np.asarray(log_f(probe), dtype=float)
    shift = float(np.max(probe_lf)) if np.isfinite(probe_lf).any() else 0.0
    evaluations = probe.size

    panels = []  # entries: (value, error, a, b)
    for lo, hi in zip(edges[:-1], edges[1:]):
        kron, err, used = _panel(log_f, lo, hi, shift, sign)
        evaluations += 15
        if used > shift:
            # Probe missed a peak; rescale everything seen so far.
            scale = math.exp(shift - used)
            panels = [(v * scale, e * scale, l, h) for v, e, l, h in panels]
            shift = used
        panels.append((kron, err, lo, hi))

    heap = [(-e, i) for i, (_, e, _, _) in enumerate(panels)]
    heapq.heapify(heap)
    alive = [True] * len(panels)
    converged = True
    while True:
        total = math.fsum(v for (v, _, _, _), ok in zip(panels, alive) if ok)
        error = math.fsum(e for (_, e, _, _), ok in zip(panels, alive) if ok)
        if error <= rtol * abs(total) or (total == 0.0 and error == 0.0):
            break
        if sum(alive) >= max_panels:
            converged = False
            break
        _, idx = heapq.heappop(heap)
        _, _, lo, hi = panels[idx]
        alive[idx] = False
        mid = 0.5 * (lo + hi)
        for l, h in ((lo, mid), (mid, hi)):
            kron, err, used = _panel(log_f, l, h, shift, sign)
            evaluations += 15
            if used > shift:
                scale = math.exp(shift - used)
                panels = [(v * scale, e * scale, pl, ph) for v, e, pl, ph in panels]
                shift = used
                heap = [(-panels[i][1], i) for i in range(len(panels)) if alive[i]]
                heapq.heapify(heap)
            panels.append((kron, err, l, h))
            alive.append(True)
            heapq.heappush(heap, (-err, len(panels) - 1))

    if total == 0.0:
        return Estimate(-math.inf, math.inf, evaluations, converged and error == 0.0)
    log_total = shift + math.log(abs(total))
    log_err_abs = np.logaddexp(shift + math.log(error) if error > 0 else -math.inf, extra_log_error)
    rel = math.exp(log_err_abs - log_total) if np.isfinite(log_err_abs) else 0.0
    abs_error_log = math.log1p(rel) if rel < 0.5 else math.inf
    return Estimate(log_total, abs_error_log, evaluations, converged, 1 if total > 0 else -1)
