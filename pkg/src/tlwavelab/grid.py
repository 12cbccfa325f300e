"""Periodic Meyer wavelet analysis and synthesis on uniform grids.

Functions live on the torus ``[0, L)^D`` with ``L = 2**P``, sampled at
``N = 2**G`` points per axis.  A grid function is identified with the
trigonometric polynomial whose Fourier series coefficients are

    F_m = (L/N)^D * DFT(samples)_m,     xi_m = 2 pi m / L,

and wavelets are the ``L``-periodisations of the L2-normalised functions
``2^{jD/2} psi^lambda(2^j x - k)``.  Their Fourier coefficients are
``(2 pi)^{D/2} 2^{-jD/2} e^{-i k.xi 2^{-j}} psi^lambda^(2^{-j} xi)``, compactly
supported, so every inner product below is an exact finite sum over the
band of one scale.  Coefficients of a whole scale are obtained by folding
that band modulo ``M = L 2^j`` and one inverse FFT of size ``M^D``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .meyer import (
    SQRT_2PI,
    MeyerSystem,
    default_system,
    father_label,
    mother_labels,
    _check_label,
)

SUPPORTED_DIMS = (1, 2)


@dataclass(frozen=True)
class GridSpec:
    """Torus discretisation and the analysed scale window.

    ``j_lo``/``j_hi`` default to the widest window the grid supports: the
    coarsest wavelet band must still contain the frequency ``2 pi / L`` and
    the finest band must stay below the Nyquist frequency.
    """

    dim: int = 1
    period_exp: int = 5
    grid_exp: int = 14
    j_lo: int | None = None
    j_hi: int | None = None

    def __post_init__(self):
        if self.dim not in SUPPORTED_DIMS:
            raise ValueError(f"dimension {self.dim} not supported (use 1 or 2)")
        if self.period_exp < 0:
            raise ValueError("period exponent must be non-negative")
        if self.grid_exp < self.period_exp + 2:
            raise ValueError("grid exponent must exceed the period exponent by at least 2")
        if self.j_lo is None:
            object.__setattr__(self, "j_lo", self.min_scale)
        if self.j_hi is None:
            object.__setattr__(self, "j_hi", self.max_scale)
        if self.j_lo < self.min_scale:
            raise ValueError(
                f"j_lo={self.j_lo} below {self.min_scale}: coarsest band would miss 2*pi/L"
            )
        if self.j_hi > self.max_scale:
            raise ValueError(f"j_hi={self.j_hi} above {self.max_scale}: finest band exceeds Nyquist")
        if self.j_lo > self.j_hi:
            raise ValueError("empty scale window (j_lo > j_hi)")

    @classmethod
    def default(cls, dim=1, **overrides):
        base = {1: dict(period_exp=5, grid_exp=14), 2: dict(period_exp=3, grid_exp=9)}[dim]
        base.update(overrides)
        return cls(dim=dim, **base)

    @property
    def min_scale(self):
        return 1 - self.period_exp

    @property
    def max_scale(self):
        return self.grid_exp - self.period_exp - 2

    @property
    def period(self):
        return 2.0**self.period_exp

    @property
    def size(self):
        return 2**self.grid_exp

    @property
    def shape(self):
        return (self.size,) * self.dim

    @property
    def cell_volume(self):
        return (self.period / self.size) ** self.dim

    @property
    def scales(self):
        return range(self.j_lo, self.j_hi + 1)

    def with_window(self, j_lo, j_hi):
        return GridSpec(self.dim, self.period_exp, self.grid_exp, j_lo, j_hi)

    def translations(self, j):
        """Number of translates per axis at scale ``j`` (``L 2^j``)."""
        if j < -self.period_exp:
            raise ValueError(f"scale {j} coarser than the torus")
        return 2 ** (self.period_exp + j)

    def coordinates(self):
        return np.arange(self.size) * (self.period / self.size)

    def frequencies(self):
        """Angular frequencies ``2 pi m / L`` in FFT order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.size, d=1.0 / self.size) / self.period

    def representable(self, label, j):
        """Whether the generator at scale ``j`` is band-limited on this grid."""
        if j < -self.period_exp:
            return False
        limit = self.grid_exp - self.period_exp - (1 if not any(label) else 2)
        return j <= limit


class WaveletIndex(NamedTuple):
    label: tuple
    j: int
    k: tuple


@dataclass(eq=False)
class GridFunction:
    spec: GridSpec
    samples: np.ndarray

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.samples.shape != self.spec.shape:
            raise ValueError(f"samples have shape {self.samples.shape}, expected {self.spec.shape}")

    @classmethod
    def zeros(cls, spec):
        return cls(spec, np.zeros(spec.shape, dtype=complex))

    @classmethod
    def from_spectrum(cls, spec, coefficients):
        scale = (spec.size / spec.period) ** spec.dim
        return cls(spec, np.fft.ifftn(coefficients) * scale)

    def spectrum(self):
        """Fourier series coefficients on the torus, FFT order."""
        return np.fft.fftn(self.samples) * self.spec.cell_volume

    def mean(self):
        return complex(self.samples.mean())

    def zero_mean(self):
        return GridFunction(self.spec, self.samples - self.samples.mean())

    def inner(self, other):
        """``int f conj(g)`` by the rectangle rule (exact for band-limited pairs)."""
        _same_spec(self.spec, other.spec)
        return complex(np.vdot(other.samples, self.samples) * self.spec.cell_volume)

    def norm2(self):
        return math.sqrt(float(np.vdot(self.samples, self.samples).real) * self.spec.cell_volume)

    @property
    def real(self):
        return GridFunction(self.spec, self.samples.real)

    def copy(self):
        return GridFunction(self.spec, self.samples.copy())

    def __add__(self, other):
        _same_spec(self.spec, other.spec)
        return GridFunction(self.spec, self.samples + other.samples)

    def __sub__(self, other):
        _same_spec(self.spec, other.spec)
        return GridFunction(self.spec, self.samples - other.samples)

    def __neg__(self):
        return GridFunction(self.spec, -self.samples)

    def __mul__(self, alpha):
        return GridFunction(self.spec, self.samples * alpha)

    __rmul__ = __mul__


def _same_spec(a, b):
    if (a.dim, a.period_exp, a.grid_exp) != (b.dim, b.period_exp, b.grid_exp):
        raise ValueError("grid functions live on different grids")


@dataclass(eq=False)
class CoefficientField:
    """Wavelet coefficients grouped by channel ``(label, j)``.

    Each channel holds the dense array of its ``(L 2^j)^D`` translates;
    channels without any nonzero coefficient are simply absent.  Mother
    channels live in the spec's scale window, the scaling (all-zero label)
    channel only at ``j_lo``.
    """

    spec: GridSpec
    channels: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (label, j), values in self.channels.items():
            label = _check_label(label, self.spec.dim)
            j = int(j)
            if any(label):
                if not self.spec.j_lo <= j <= self.spec.j_hi:
                    raise ValueError(f"wavelet scale {j} outside window [{self.spec.j_lo}, {self.spec.j_hi}]")
            elif j != self.spec.j_lo:
                raise ValueError(f"scaling channel only allowed at j_lo={self.spec.j_lo}, got {j}")
            values = np.asarray(values, dtype=complex)
            expected = (self.spec.translations(j),) * self.spec.dim
            if values.shape != expected:
                raise ValueError(f"channel {label, j} has shape {values.shape}, expected {expected}")
            clean[(label, j)] = values
        self.channels = dict(sorted(clean.items(), key=lambda item: (item[0][1], item[0][0])))

    def __len__(self):
        return int(sum(np.count_nonzero(v) for v in self.channels.values()))

    def __iter__(self):
        return iter(self.channels.items())

    @property
    def is_empty(self):
        return len(self) == 0

    def scales(self, include_father=False):
        return sorted({j for (label, j) in self.channels if include_father or any(label)})

    def entries(self):
        """Nonzero entries as ``(WaveletIndex, value)`` in deterministic order."""
        for (label, j), values in self.channels.items():
            for k in zip(*np.nonzero(values)):
                yield WaveletIndex(label, j, tuple(int(i) for i in k)), complex(values[k])

    def energy(self):
        return float(sum(np.vdot(v, v).real for v in self.channels.values()))

    def select(self, keep):
        """Channels for which ``keep(label, j)`` is true."""
        return CoefficientField(self.spec, {key: v for key, v in self.channels.items() if keep(*key)})

    def mother(self):
        return self.select(lambda label, j: any(label))

    def scaled(self, alpha):
        return CoefficientField(self.spec, {key: v * alpha for key, v in self.channels.items()})

    def same_entries(self, other):
        if self.channels.keys() != other.channels.keys():
            return False
        return all(np.array_equal(v, other.channels[key]) for key, v in self.channels.items())

    @classmethod
    def from_entries(cls, spec, entries):
        """Build from ``{(label, j, k): value}``."""
        channels = {}
        for (label, j, k), value in entries.items():
            label = _check_label(label, spec.dim)
            arr = channels.setdefault((label, j), np.zeros((spec.translations(j),) * spec.dim, complex))
            k = tuple(int(i) % spec.translations(j) for i in np.atleast_1d(k))
            arr[k] += value
        return cls(spec, channels)


# -- band filters -------------------------------------------------------------


def _band_limits(kind, j, period):
    """Open range of |m| on which the axis factor can be nonzero."""
    unit = 2.0**j * period
    if kind == 0:
        return 0.0, 2.0 * unit / 3.0
    return unit / 3.0, 4.0 * unit / 3.0


def _axis_band(system, period_exp, grid_exp, kind, j):
    """Sparse axis factor ``sqrt(2 pi) 2^{-j/2} h(2^{-j} xi_m)`` on its band.

    Returns ``(indices, values)`` with indices in FFT order.  Cached per
    profile, so systems differing only in dimension share entries.
    """
    return _axis_band_cached(system.bump, system.quad_tol, period_exp, grid_exp, kind, j)


@lru_cache(maxsize=256)
def _axis_band_cached(profile, quad_tol, period_exp, grid_exp, kind, j):
    system = MeyerSystem(1, quad_tol, bump_profile=profile)
    period = 2.0**period_exp
    size = 2**grid_exp
    lo, hi = _band_limits(kind, j, period)
    top = min(int(math.floor(hi)), size // 2 - 1)
    bottom = int(math.ceil(lo))
    pos = np.arange(max(bottom, 1 if kind else 0), top + 1)
    neg_top = min(int(math.floor(hi)), size // 2)
    neg = -np.arange(max(bottom, 1), neg_top + 1)[::-1]
    m = np.concatenate([neg, pos])
    xi = 2.0 * np.pi * m / period * 2.0**-j
    h = system.wavelet_spectrum(xi) if kind else system.scaling_spectrum(xi).astype(complex)
    values = SQRT_2PI * 2.0 ** (-j / 2.0) * h
    keep = values != 0
    idx = np.mod(m[keep], size)
    return idx, values[keep]


def _channel_bands(spec, label, j, system):
    return [_axis_band(system, spec.period_exp, spec.grid_exp, bit, j) for bit in label]


def _fold(values, indices, modulus, dim):
    """Sum ``values`` (on the outer grid of ``indices``) into bins ``mod modulus``."""
    reduced = [np.mod(i, modulus) for i in indices]
    if dim == 1:
        flat = reduced[0]
    else:
        flat = np.ravel_multi_index(np.ix_(*reduced), (modulus,) * dim).ravel()
    values = values.ravel()
    total = modulus**dim
    out = np.bincount(flat, weights=values.real, minlength=total) + 1j * np.bincount(
        flat, weights=values.imag, minlength=total
    )
    return out.reshape((modulus,) * dim)


def _outer(factors):
    out = factors[0]
    for f in factors[1:]:
        out = np.multiply.outer(out, f)
    return out


def channel_coefficients(spectrum, spec, label, j, system=None):
    """Coefficients ``<f, psi^label_{j,k}>`` for all ``k`` from Fourier coefficients."""
    system = default_system() if system is None else system
    bands = _channel_bands(spec, label, j, system)
    modulus = spec.translations(j)
    out_shape = (modulus,) * spec.dim
    if any(len(idx) == 0 for idx, _ in bands):
        return np.zeros(out_shape, complex)
    indices = [idx for idx, _ in bands]
    sub = spectrum[np.ix_(*indices)] * _outer([np.conj(v) for _, v in bands])
    if not np.any(sub):
        return np.zeros(out_shape, complex)
    folded = _fold(sub, indices, modulus, spec.dim)
    return np.fft.ifftn(folded) * (modulus / spec.period) ** spec.dim


def add_channel_spectrum(spectrum, coefficients, spec, label, j, system=None):
    """Accumulate the Fourier coefficients of ``sum_k c_k psi^label_{j,k}`` in place."""
    system = default_system() if system is None else system
    bands = _channel_bands(spec, label, j, system)
    if any(len(idx) == 0 for idx, _ in bands):
        return spectrum
    modulus = spec.translations(j)
    transformed = np.fft.fftn(coefficients)
    indices = [idx for idx, _ in bands]
    aliased = transformed[np.ix_(*[np.mod(i, modulus) for i in indices])]
    spectrum[np.ix_(*indices)] += aliased * _outer([v for _, v in bands])
    return spectrum


# -- analysis and synthesis -------------------------------------------------------


def analysis_channels(spec):
    """Channel keys of a complete analysis: scaling at ``j_lo`` then all wavelets."""
    keys = [(father_label(spec.dim), spec.j_lo)]
    keys += [(label, j) for j in spec.scales for label in mother_labels(spec.dim)]
    return keys


def analyze(f, system=None, spec=None):
    """Wavelet coefficients of a grid function, modulo constants.

    The mean (zero frequency) is removed first; the scaling channel at
    ``j_lo`` then carries the remaining coarse content.  ``spec`` may narrow
    the scale window; it must describe the same grid as ``f``.
    """
    system = default_system(f.spec.dim) if system is None else system
    spec = f.spec if spec is None else spec
    _same_spec(spec, f.spec)
    coeffs = f.spectrum()
    coeffs.flat[0] = 0.0
    channels = {}
    for label, j in analysis_channels(spec):
        values = channel_coefficients(coeffs, spec, label, j, system)
        if np.any(values):
            channels[(label, j)] = values
    return CoefficientField(spec, channels)


def synthesize(c, system=None):
    """Grid function ``sum c^label_{j,k} psi^label_{j,k}`` (zero function for an empty field)."""
    system = default_system(c.spec.dim) if system is None else system
    spectrum = np.zeros(c.spec.shape, complex)
    for (label, j), values in c.channels.items():
        add_channel_spectrum(spectrum, values, c.spec, label, j, system)
    return GridFunction.from_spectrum(c.spec, spectrum)


def wavelet_function(spec, label, j, k, system=None):
    """Samples of the periodised, L2-normalised generator ``psi^label_{j,k}``."""
    system = default_system(spec.dim) if system is None else system
    label = _check_label(label, spec.dim)
    if not spec.representable(label, j):
        raise ValueError(f"generator {label} at scale {j} is not representable on this grid")
    modulus = spec.translations(j)
    coeffs = np.zeros((modulus,) * spec.dim, complex)
    coeffs[tuple(int(i) % modulus for i in np.atleast_1d(k))] = 1.0
    spectrum = add_channel_spectrum(np.zeros(spec.shape, complex), coeffs, spec, label, j, system)
    return GridFunction.from_spectrum(spec, spectrum)


def wavelet_spectrum(spec, label, j, k, system=None):
    """Fourier series coefficients of ``psi^label_{j,k}`` (dense, FFT order)."""
    system = default_system(spec.dim) if system is None else system
    modulus = spec.translations(j)
    coeffs = np.zeros((modulus,) * spec.dim, complex)
    coeffs[tuple(int(i) % modulus for i in np.atleast_1d(k))] = 1.0
    return add_channel_spectrum(np.zeros(spec.shape, complex), coeffs, spec, _check_label(label, spec.dim), j, system)


def analyze_separable(factors, spec, system=None):
    """Analysis of ``f(x) = prod_l f_l(x_l)`` from one-dimensional factors.

    Every tensor coefficient is the product of one-dimensional scaling or
    wavelet coefficients of the factors, so the D-dimensional grid never has
    to be sampled.  Factors share the period of ``spec``; the result equals
    ``analyze`` on the product grid function (mean removed).
    """
    if len(factors) != spec.dim:
        raise ValueError(f"need {spec.dim} factors")
    system1 = default_system(1) if system is None else system.with_dim(1)
    spectra, mean_spectra = [], []
    for fac in factors:
        if fac.spec.dim != 1 or fac.spec.period_exp != spec.period_exp:
            raise ValueError("factors must be one-dimensional with the period of spec")
        s = fac.spectrum()
        spectra.append(s)
        only_mean = np.zeros_like(s)
        only_mean[0] = s[0]
        mean_spectra.append(only_mean)

    def axis_coeffs(axis, kind, j, which):
        fac_spec = factors[axis].spec.with_window(factors[axis].spec.min_scale, factors[axis].spec.max_scale)
        return channel_coefficients(which[axis], fac_spec, (kind,), j, system1)

    channels = {}
    for label, j in analysis_channels(spec):
        parts = [axis_coeffs(axis, bit, j, spectra) for axis, bit in enumerate(label)]
        values = _outer(parts)
        if not any(label):
            # drop the zero-frequency product, matching analyze's mean removal
            values = values - _outer([axis_coeffs(a, 0, j, mean_spectra) for a in range(spec.dim)])
        if np.any(values):
            channels[(label, j)] = values
    return CoefficientField(spec, channels)


# -- projections and truncations ------------------------------------------------


def _scale_slice(c, lo, hi):
    return c.select(lambda label, j: any(label) and lo <= j <= hi)


def project_P_sN(c, s, N):
    """Wavelet channels with ``s - N <= j <= s``; the scaling channel is dropped."""
    return _scale_slice(c, s - N, s)


def op_T1(c, s, t, N):
    """Upper part ``s - t + 1 <= j <= s`` of the window; empty for ``t = 0``."""
    _check_split(t, N)
    if t == 0:
        return CoefficientField(c.spec)
    return _scale_slice(c, s - t + 1, s)


def op_T2(c, s, t, N):
    """Lower part ``s - N <= j <= s - t`` of the window; empty for ``t = N + 1``."""
    _check_split(t, N)
    if t == N + 1:
        return CoefficientField(c.spec)
    return _scale_slice(c, s - N, s - t)


def _check_split(t, N):
    if N < 0 or not 0 <= t <= N + 1:
        raise ValueError(f"split point t={t} outside {{0, ..., {N + 1}}}")


def project_Qj(c, j):
    """Single-scale wavelet slice."""
    return _scale_slice(c, j, j)


def father_projection(f, j0, system=None):
    """Orthogonal projection onto the span of the scaling functions at scale ``j0``.

    Computed by exact analysis/synthesis of the scaling channel, so the
    aliasing between frequencies ``M`` apart (``M = L 2^j0``) is kept.
    Constants are part of this space and are not removed.
    """
    system = default_system(f.spec.dim) if system is None else system
    label = father_label(f.spec.dim)
    if not f.spec.representable(label, j0):
        raise ValueError(f"scale {j0} not representable on this grid")
    spectrum = f.spectrum()
    values = channel_coefficients(spectrum, f.spec, label, j0, system)
    out = add_channel_spectrum(np.zeros(f.spec.shape, complex), values, f.spec, label, j0, system)
    return GridFunction.from_spectrum(f.spec, out)


def father_lattice_sum(x, radius=64, system=None):
    """``sum_{|k| <= radius} |phi(x - k)|`` for one-dimensional points ``x``."""
    system = default_system(1) if system is None else system
    x = np.atleast_1d(np.asarray(x, dtype=float))
    ks = np.arange(-radius, radius + 1)
    return np.array([np.abs(system.scaling(xv - ks)).sum() for xv in x])


def father_summability_check(x_samples, radius=64, system=None):
    """Largest lattice sum ``sum_k |psi^0(x - k)|`` over the sample points.

    ``x_samples`` is ``(n,)`` for one dimension or ``(n, D)``; the D-dimensional
    sum is evaluated term by term over the ``(2 radius + 1)^D`` lattice points.
    """
    system = default_system(1) if system is None else system
    pts = np.asarray(x_samples, dtype=float)
    if pts.ndim == 1:
        return float(father_lattice_sum(pts, radius, system).max())
    ks = np.arange(-radius, radius + 1)
    best = 0.0
    for point in pts:
        axis_vals = [np.abs(system.scaling(xv - ks)) for xv in point]
        best = max(best, float(_outer(axis_vals).sum()))
    return best


# -- random test inputs -----------------------------------------------------------


def band_cutoff(spec):
    """Largest |m| per axis such that the whole box lies in the analysed span."""
    return int(math.floor(2.0 ** (spec.j_hi + 1) * spec.period / 3.0))


def random_band_limited(spec, rng, real=True, zero_mean=True, cutoff=None):
    """Random trigonometric polynomial inside the span of the wavelet system."""
    cutoff = band_cutoff(spec) if cutoff is None else cutoff
    cutoff = min(cutoff, spec.size // 2 - 1)
    m = np.fft.fftfreq(spec.size, d=1.0 / spec.size)
    inside = np.abs(m) <= cutoff
    mask = _outer([inside] * spec.dim).astype(bool)
    coeffs = np.zeros(spec.shape, complex)
    n = int(mask.sum())
    coeffs[mask] = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    if zero_mean:
        coeffs.flat[0] = 0.0
    f = GridFunction.from_spectrum(spec, coeffs)
    if real:
        f = f.real
    return f


def random_field(spec, rng, density=0.3, scales=None, include_father=False):
    """Sparse random real coefficients on the wavelet channels of the window."""
    scales = spec.scales if scales is None else scales
    keys = [(label, j) for j in scales for label in mother_labels(spec.dim)]
    if include_father:
        keys.insert(0, (father_label(spec.dim), spec.j_lo))
    channels = {}
    for label, j in keys:
        shape = (spec.translations(j),) * spec.dim
        values = rng.standard_normal(shape) * (rng.random(shape) < density)
        if np.any(values):
            channels[(label, j)] = values.astype(complex)
    return CoefficientField(spec, channels)
