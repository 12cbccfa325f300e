"""Daubechies extremal-phase scaling functions by spectral factorisation and cascade."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MIN_ORDER = 10
MIN_LEVELS = 8


class CascadeDivergence(ArithmeticError):
    pass


def daubechies_filter(order):
    """Low-pass taps ``h_0..h_{2 order - 1}`` with ``sum h = sqrt(2)``.

    ``|m0|^2 = cos^{2p}(xi/2) P(sin^2(xi/2))`` with ``P(y) = sum_{k<p}
    C(p-1+k, k) y^k``; each root ``y`` of ``P`` gives the pair of ``z`` roots of
    ``z^2 - (2 - 4y) z + 1``, of which the one inside the unit circle is kept.
    """
    p = int(order)
    if p < 1:
        raise ValueError("order must be positive")
    poly = [math.comb(p - 1 + k, k) for k in range(p)]
    zeros = []
    if p > 1:
        for y in np.roots(poly[::-1]):
            pair = np.roots([1.0, -(2.0 - 4.0 * y), 1.0])
            zeros.append(pair[np.argmin(np.abs(pair))])
    taps = np.array([1.0 + 0j])
    for _ in range(p):
        taps = np.convolve(taps, [1.0, 1.0])
    for z in zeros:
        taps = np.convolve(taps, [1.0, -z])
    taps = taps.real
    return taps * (math.sqrt(2.0) / taps.sum())


def orthogonality_error(taps):
    """``max_m |sum_k h_k h_{k+2m} - delta_{m0}|``."""
    n = len(taps)
    err = 0.0
    for m in range(0, (n + 1) // 2):
        dot = float(np.dot(taps[: n - 2 * m], taps[2 * m :]))
        err = max(err, abs(dot - (1.0 if m == 0 else 0.0)))
    return err


@dataclass(frozen=True)
class ScalingFunction:
    """Dyadic samples ``phi(n 2^{-levels})`` on the support ``[0, 2 order - 1]``."""

    order: int
    levels: int
    taps: np.ndarray
    x: np.ndarray
    values: np.ndarray
    refinement_gaps: tuple

    @property
    def support(self):
        return 0.0, float(2 * self.order - 1)

    @property
    def step(self):
        return 2.0**-self.levels

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.interp(x, self.x, self.values, left=0.0, right=0.0)

    def integral(self):
        return float(self.values.sum() * self.step)

    def partition_error(self):
        """``max_x |sum_k phi(x - k) - 1|`` over the samples in ``[0, 1)``."""
        per_unit = 2**self.levels
        total = np.zeros(per_unit)
        for start in range(0, len(self.values) - 1, per_unit):
            block = self.values[start : start + per_unit]
            total[: len(block)] += block
        return float(np.abs(total - 1.0).max())


def _integer_values(taps):
    n = len(taps) - 1
    mat = np.zeros((n + 1, n + 1))
    for i in range(n + 1):
        for j in range(n + 1):
            if 0 <= 2 * i - j <= n:
                mat[i, j] = math.sqrt(2.0) * taps[2 * i - j]
    evals, evecs = np.linalg.eig(mat)
    pick = int(np.argmin(np.abs(evals - 1.0)))
    if abs(evals[pick] - 1.0) > 1e-8:
        raise CascadeDivergence("refinement matrix has no eigenvalue 1")
    vec = evecs[:, pick].real
    return vec / vec.sum()


def daubechies_scaling(order=16, levels=12, check_order=True):
    """Cascade refinement of the scaling function from its integer values.

    Each level halves the sample step via ``phi(x) = sqrt(2) sum_k h_k
    phi(2x - k)``.  The gap between a level and the linear interpolant of the
    previous one must shrink; otherwise ``CascadeDivergence`` is raised.
    """
    if check_order and order < MIN_ORDER:
        raise ValueError(f"order {order} below {MIN_ORDER}: not smooth enough for the lacunary construction")
    if levels < MIN_LEVELS:
        raise ValueError(f"need at least {MIN_LEVELS} levels")
    taps = daubechies_filter(order)
    span = len(taps) - 1
    values = _integer_values(taps)
    gaps = []
    for level in range(1, levels + 1):
        stride = 2 ** (level - 1)
        refined = np.zeros(span * 2**level + 1)
        for k, h in enumerate(taps):
            shift = k * stride
            # old sample i sits at 2x - k for the new index i + k 2^{level-1}
            refined[shift : shift + len(values)] += math.sqrt(2.0) * h * values
        coarse_interp = np.interp(np.arange(len(refined)) / 2.0, np.arange(len(values)), values)
        gap = float(np.abs(refined - coarse_interp).max())
        if level > 3 and gap >= gaps[-1]:
            raise CascadeDivergence(f"refinement gap stopped shrinking at level {level}: {gap:.3e}")
        gaps.append(gap)
        values = refined
    x = np.arange(len(values)) * 2.0**-levels
    return ScalingFunction(order, levels, taps, x, values, tuple(gaps))
