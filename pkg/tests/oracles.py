"""Independent reference computations used by the tests."""
import itertools
import math

import numpy as np

from tlwavelab.grid import synthesize
from tlwavelab.norms import l1_norm


def torus_wavelet_oracle(spec, system, label, j, k):
    """Periodised generator from the continuous spectrum, summed over every torus frequency.

    Independent of the grid module's sparse bands and folding: the Fourier
    series coefficient of the periodisation at ``xi_m`` is
    ``sqrt(2 pi)^D / L^D * 2^{-jD/2} e^{-i xi_m 2^{-j} k} h(2^{-j} xi_m)``.
    """
    xi = spec.frequencies()
    axes = []
    for bit, kk in zip(label, k):
        scaled = xi * 2.0**-j
        part = system.wavelet_spectrum(scaled) if bit else system.scaling_spectrum(scaled)
        axes.append(np.sqrt(2 * np.pi) * 2.0 ** (-j / 2) * np.exp(-1j * scaled * kk) * part / spec.period)
    series = axes[0]
    for part in axes[1:]:
        series = np.multiply.outer(series, part)
    # samples = sum_m series_m e^{i xi_m x}
    return np.fft.ifftn(series) * spec.size**spec.dim


def _entries(c):
    return [(idx.j, np.array(idx.k), abs(v)) for idx, v in c.entries()]


def brute_f01q(c, q):
    """Cell-by-cell evaluation of the integral of the l^q square-type function."""
    spec, dim = c.spec, c.spec.dim
    entries = _entries(c)
    if not entries:
        return 0.0
    finest = max(j for j, _, _ in entries)
    side = 2.0**-finest
    cells = spec.translations(finest)
    total = 0.0
    for cell in itertools.product(range(cells), repeat=dim):
        x = (np.array(cell) + 0.5) * side
        acc = 0.0
        for j, k, a in entries:
            if np.array_equal(np.floor(x * 2.0**j).astype(int), k):
                acc += (2.0 ** (j * dim / 2) * a) ** q
        total += acc ** (1.0 / q) * side**dim
    return total


def brute_f0infq(c, q):
    """Maximum over every dyadic cube of the normalised sum of contained coefficients."""
    spec, dim = c.spec, c.spec.dim
    entries = _entries(c)
    if not entries:
        return 0.0
    finest = max(j for j, _, _ in entries)
    best = 0.0
    for j in range(-spec.period_exp, finest + 1):
        for cube in itertools.product(range(spec.translations(j)), repeat=dim):
            acc = 0.0
            for jj, k, a in entries:
                if jj >= j and np.array_equal(k // 2 ** (jj - j), np.array(cube)):
                    acc += 2.0 ** (jj * dim * (q / 2 - 1)) * a**q
            best = max(best, acc * 2.0 ** (j * dim))
    return best ** (1.0 / q)


def brute_we1q(c, q, system):
    """Window norm by direct enumeration, with both slice norms recomputed every time."""
    spec = c.spec
    mother = c.mother()

    def part(lo, hi):
        return mother.select(lambda label, j: lo <= j <= hi)

    best = -math.inf
    for s in range(spec.j_lo - 1, spec.j_hi + 2):
        for n in range(1, spec.j_hi - spec.j_lo + 3):
            inner = math.inf
            for t in range(n + 2):
                upper = brute_f01q(part(s - t + 1, s), q) if t > 0 else 0.0
                lower = l1_norm(synthesize(part(s - n, s - t), system)) if t < n + 1 else 0.0
                inner = min(inner, upper + lower)
            best = max(best, inner)
    return best
