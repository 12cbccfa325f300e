"""One-dimensional Meyer wavelet built from an explicit smooth bump.

The bump ``f(x) = exp(-1/x**2)`` (zero for ``x <= 0``) is multiplied with its
mirror image, integrated and normalised into a smooth step ``g`` that rises
from 0 on ``(-inf, 0]`` to 1 on ``[1, inf)``.  The step drives the scaling
spectrum

    Phi(xi) = cos(pi/2 * g(3|xi|/(2 pi) - 1)) / sqrt(2 pi),

from which the low-pass filter and the wavelet spectrum follow.  Fourier
transforms use the unitary convention ``f^(xi) = (2 pi)^(-1/2) int f e^{-i x xi}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicHermiteSpline

SQRT_2PI = math.sqrt(2.0 * math.pi)
INV_SQRT_2PI = 1.0 / SQRT_2PI

# Edges of the transition band of the scaling spectrum and of the wavelet band.
PHI_FLAT_EDGE = 2.0 * math.pi / 3.0
PHI_ZERO_EDGE = 4.0 * math.pi / 3.0
PSI_LOW_EDGE = 2.0 * math.pi / 3.0
PSI_HIGH_EDGE = 8.0 * math.pi / 3.0

DEFAULT_QUAD_TOL = 1e-10
DEFAULT_NODES = 2048


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, achieved):
        super().__init__(f"{message} (achieved error {achieved:.3e})")
        self.achieved = achieved


def bump(x):
    """``exp(-1/x**2)`` for ``x > 0`` and 0 otherwise (vectorised)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos] ** 2)
    return out if out.ndim else float(out)


def _bump_product_scalar(t):
    if t <= 0.0 or t >= 1.0:
        return 0.0
    return math.exp(-1.0 / (t * t) - 1.0 / ((1.0 - t) * (1.0 - t)))


def bump_product(x):
    """``f(x) f(1 - x)``, smooth, supported on [0, 1], symmetric about 1/2."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = (x > 0) & (x < 1)
    xi = x[inside]
    out[inside] = np.exp(-1.0 / xi**2 - 1.0 / (1.0 - xi) ** 2)
    return out if out.ndim else float(out)


def _quad(func, a, b, tol, **kwargs):
    result = integrate.quad(func, a, b, epsabs=tol, epsrel=0.0, limit=400, full_output=1, **kwargs)
    value, err = result[0], result[1]
    # a fourth element is QUADPACK's warning message
    if len(result) > 3 and err > tol:
        raise QuadratureError(f"quadrature on [{a:.6g}, {b:.6g}] did not converge", err)
    return value, err


# Above this many points the cosine transforms share one vector quadrature.
_VECTOR_MIN = 8


def _cos_quad_vec(func, a, b, freqs, tol):
    """``int_a^b func(t) cos(freqs t) dt`` for a vector of frequencies."""
    value, err = integrate.quad_vec(
        lambda t: func(t) * np.cos(freqs * t), a, b, epsabs=tol, epsrel=0.0, norm="max", limit=4000
    )
    if err > tol:
        raise QuadratureError(f"vector cosine quadrature reached {err:.3e} > {tol:.3e}", err)
    return value


@lru_cache(maxsize=None)
def _half_mass(tol):
    # int_0^{1/2} f(t) f(1-t) dt; the full normaliser is twice this by symmetry
    value, _ = _quad(_bump_product_scalar, 0.0, 0.5, tol * 1e-6)
    return value


def cumulative_bump(x, tol=DEFAULT_QUAD_TOL):
    """Normalised cumulative integral ``g(x)`` by direct adaptive quadrature.

    Arguments at or beyond the ends clamp to exactly 0 and 1.  Values above
    one half are obtained from the mirror identity ``g(x) = 1 - g(1 - x)``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = float(x)
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    half = _half_mass(tol)
    mirrored = x > 0.5
    upper = 1.0 - x if mirrored else x
    # absolute tolerance on g translates to tol * normaliser on the raw integral
    raw, _ = _quad(_bump_product_scalar, 0.0, upper, tol * 2.0 * half)
    value = raw / (2.0 * half)
    return 1.0 - value if mirrored else value


@dataclass(frozen=True, eq=False)
class BumpProfile:
    """Tabulated smooth step ``g`` with a monotone cubic Hermite interpolant.

    Only the half ``[0, 1/2]`` is tabulated; the other half follows from the
    mirror identity, so ``g(x) + g(1 - x) == 1`` holds to rounding.
    """

    sample_nodes: np.ndarray
    sample_values: np.ndarray
    sample_slopes: np.ndarray
    normalizer: float
    quad_tol: float
    n_nodes: int

    @classmethod
    def build(cls, n_nodes=DEFAULT_NODES, quad_tol=DEFAULT_QUAD_TOL):
        if n_nodes < 8:
            raise ValueError("need at least 8 table nodes")
        if quad_tol <= 0:
            raise ValueError("quad_tol must be positive")
        full = 0.5 * (1.0 - np.cos(np.pi * np.arange(n_nodes) / (n_nodes - 1)))
        nodes = np.append(full[full < 0.5], 0.5)
        half = _half_mass(min(quad_tol, 1e-10))
        per_piece = quad_tol * 2.0 * half / len(nodes)
        pieces = np.empty(len(nodes) - 1)
        achieved = 0.0
        for i, (a, b) in enumerate(zip(nodes[:-1], nodes[1:])):
            pieces[i], err = _quad(_bump_product_scalar, a, b, per_piece)
            achieved += err
        cumulative = np.concatenate([[0.0], np.cumsum(pieces)])
        # pin g(1/2) = 1/2 exactly; the table is normalised by its own half mass
        values = 0.5 * cumulative / cumulative[-1]
        normalizer = 2.0 * cumulative[-1]
        slopes = bump_product(nodes) / normalizer
        slopes = _limit_slopes(nodes, values, slopes)
        return cls(
            sample_nodes=nodes,
            sample_values=values,
            sample_slopes=slopes,
            normalizer=normalizer,
            quad_tol=max(achieved / normalizer, abs(normalizer - 2.0 * half) / normalizer),
            n_nodes=n_nodes,
        )

    @property
    def _spline(self):
        spline = self.__dict__.get("_spline_cache")
        if spline is None:
            spline = CubicHermiteSpline(self.sample_nodes, self.sample_values, self.sample_slopes)
            object.__setattr__(self, "_spline_cache", spline)
        return spline

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.empty_like(x)
        low = x <= 0.0
        high = x >= 1.0
        out[low] = 0.0
        out[high] = 1.0
        mid = ~(low | high)
        xm = x[mid]
        mirrored = xm > 0.5
        y = np.where(mirrored, 1.0 - xm, xm)
        gy = np.clip(self._spline(y), 0.0, 0.5)
        out[mid] = np.where(mirrored, 1.0 - gy, gy)
        return out if out.ndim else float(out)


def _limit_slopes(x, y, d):
    """Fritsch-Carlson limiting so the Hermite interpolant stays monotone."""
    h = np.diff(x)
    delta = np.diff(y) / h
    d = d.copy()
    flat = delta <= 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        alpha = np.where(flat, 0.0, d[:-1] / delta)
        beta = np.where(flat, 0.0, d[1:] / delta)
    radius = np.hypot(alpha, beta)
    tau = np.where(radius > 3.0, 3.0 / np.where(radius > 0, radius, 1.0), 1.0)
    scale = np.ones_like(d)
    scale[:-1] = np.minimum(scale[:-1], tau)
    scale[1:] = np.minimum(scale[1:], tau)
    d *= scale
    d[:-1][flat] = 0.0
    d[1:][flat] = 0.0
    return d


class MeyerSystem:
    """Scaling spectrum, low-pass filter and wavelet of the Meyer system.

    Parameters
    ----------
    dim : int
        Dimension of the tensor-product generators.
    quad_tol : float
        Absolute tolerance for the quadratures behind the step table and the
        space-domain evaluations.
    n_nodes : int
        Size of the Chebyshev node table for the smooth step.
    """

    def __init__(self, dim=1, quad_tol=DEFAULT_QUAD_TOL, n_nodes=DEFAULT_NODES, bump_profile=None):
        if dim < 1:
            raise ValueError("dim must be a positive integer")
        self.dim = int(dim)
        self.quad_tol = float(quad_tol)
        self.bump = bump_profile if bump_profile is not None else BumpProfile.build(n_nodes, quad_tol)

    def __repr__(self):
        return f"MeyerSystem(dim={self.dim}, quad_tol={self.quad_tol:g}, n_nodes={self.bump.n_nodes})"

    def with_dim(self, dim):
        """Same one-dimensional profile, different tensor dimension."""
        return MeyerSystem(dim, self.quad_tol, bump_profile=self.bump)

    # -- frequency side -----------------------------------------------------

    def scaling_spectrum(self, xi):
        """Fourier transform of the scaling function (``Phi``); real and even."""
        xi = np.asarray(xi, dtype=float)
        a = np.abs(xi)
        out = np.zeros_like(a)
        out[a <= PHI_FLAT_EDGE] = INV_SQRT_2PI
        band = (a > PHI_FLAT_EDGE) & (a < PHI_ZERO_EDGE)
        arg = 3.0 * a[band] / (2.0 * math.pi) - 1.0
        out[band] = INV_SQRT_2PI * np.cos(0.5 * math.pi * self.bump(arg))
        return out if out.ndim else float(out)

    def low_pass(self, xi):
        """``2 pi``-periodic filter equal to ``sqrt(2 pi) Phi(2 xi)`` on ``[-pi, pi)``."""
        xi = np.asarray(xi, dtype=float)
        reduced = np.mod(xi + math.pi, 2.0 * math.pi) - math.pi
        return SQRT_2PI * self.scaling_spectrum(2.0 * reduced)

    def wavelet_amplitude(self, xi):
        """Real even factor ``m(xi/2 + pi) Phi(xi/2)`` of the wavelet spectrum."""
        xi = np.asarray(xi, dtype=float)
        return self.low_pass(0.5 * xi + math.pi) * self.scaling_spectrum(0.5 * xi)

    def wavelet_spectrum(self, xi):
        """Fourier transform of the mother wavelet, ``e^{i xi/2}`` times the amplitude."""
        xi = np.asarray(xi, dtype=float)
        return np.exp(0.5j * xi) * self.wavelet_amplitude(xi)

    def tensor_spectrum(self, label, xi):
        """Spectrum of the tensor generator selected by a 0/1 label.

        ``xi`` has shape ``(..., dim)``; label entries 0 pick the scaling
        spectrum on that axis and 1 the wavelet spectrum.
        """
        label = _check_label(label, self.dim, allow_father=True)
        xi = np.asarray(xi, dtype=float)
        if xi.shape[-1] != self.dim:
            raise ValueError(f"last axis of xi must have length {self.dim}")
        out = np.ones(xi.shape[:-1], dtype=complex)
        for axis, bit in enumerate(label):
            part = self.wavelet_spectrum(xi[..., axis]) if bit else self.scaling_spectrum(xi[..., axis])
            out = out * part
        return out

    # -- space side ----------------------------------------------------------

    def wavelet(self, x, tol=None):
        """Mother wavelet in space by cosine-weighted quadrature of the amplitude."""
        tol = self.quad_tol if tol is None else tol
        if tol <= 0:
            raise ValueError("tol must be positive")
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty_like(xs)
        cuts = (PSI_LOW_EDGE, PHI_ZERO_EDGE, PSI_HIGH_EDGE)
        amplitude = lambda t: float(self.wavelet_amplitude(t))
        if xs.size > _VECTOR_MIN:
            total = sum(_cos_quad_vec(amplitude, a, b, xs + 0.5, tol / 4) for a, b in zip(cuts[:-1], cuts[1:]))
            out = 2.0 * INV_SQRT_2PI * total
            return out if np.ndim(x) else float(out[0])
        for n, xv in enumerate(xs):
            total = 0.0
            for a, b in zip(cuts[:-1], cuts[1:]):
                val, _ = _quad(amplitude, a, b, tol / 4, weight="cos", wvar=xv + 0.5)
                total += val
            out[n] = 2.0 * INV_SQRT_2PI * total
        return out if np.ndim(x) else float(out[0])

    def scaling(self, x, tol=None):
        """Scaling function in space; the flat part of the spectrum is integrated exactly."""
        tol = self.quad_tol if tol is None else tol
        if tol <= 0:
            raise ValueError("tol must be positive")
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty_like(xs)
        spectrum = lambda t: float(self.scaling_spectrum(t))
        if xs.size > _VECTOR_MIN:
            safe = np.where(xs == 0.0, 1.0, xs)
            flat = np.where(xs == 0.0, PHI_FLAT_EDGE, np.sin(PHI_FLAT_EDGE * xs) / safe) * INV_SQRT_2PI
            band = _cos_quad_vec(spectrum, PHI_FLAT_EDGE, PHI_ZERO_EDGE, xs, tol / 2)
            return 2.0 * INV_SQRT_2PI * (flat + band)
        for n, xv in enumerate(xs):
            if xv == 0.0:
                flat = PHI_FLAT_EDGE * INV_SQRT_2PI
            else:
                flat = math.sin(PHI_FLAT_EDGE * xv) / xv * INV_SQRT_2PI
            band, _ = _quad(spectrum, PHI_FLAT_EDGE, PHI_ZERO_EDGE, tol / 2, weight="cos", wvar=xv)
            out[n] = 2.0 * INV_SQRT_2PI * (flat + band)
        return out if np.ndim(x) else float(out[0])


class WaveletAtZero(NamedTuple):
    psi0: float
    bound: float
    margin: float
    step_at_half: float


def wavelet_at_zero_bound(system=None, tol=None):
    """Value of the wavelet at the origin against the closed-form lower bound.

    The bound ``sqrt(3)/pi * cos(pi/2 * g(1/2))`` controls ``|psi(0)|``; the
    margin is ``|psi(0)| - bound``.  The wavelet value itself is negative for
    this construction, so the sign is reported unchanged in ``psi0``.
    """
    system = default_system() if system is None else system
    tol = system.quad_tol if tol is None else tol
    psi0 = system.wavelet(0.0, tol)
    g_half = cumulative_bump(0.5, tol)
    bound = math.sqrt(3.0) / math.pi * math.cos(0.5 * math.pi * g_half)
    return WaveletAtZero(psi0, bound, abs(psi0) - bound, g_half)


def _check_label(label, dim, allow_father=True):
    label = tuple(int(b) for b in label)
    if len(label) != dim or any(b not in (0, 1) for b in label):
        raise ValueError(f"label must be a 0/1 tuple of length {dim}, got {label}")
    if not allow_father and not any(label):
        raise ValueError("the all-zero label is the scaling generator, not a wavelet")
    return label


def mother_labels(dim):
    """Labels of the ``2**dim - 1`` wavelet generators, in lexicographic order."""
    labels = []
    for code in range(1, 2**dim):
        labels.append(tuple((code >> (dim - 1 - axis)) & 1 for axis in range(dim)))
    return labels


def father_label(dim):
    return (0,) * dim


@lru_cache(maxsize=8)
def _shared_system(dim, quad_tol, n_nodes):
    if dim == 1:
        return MeyerSystem(1, quad_tol, n_nodes)
    return _shared_system(1, quad_tol, n_nodes).with_dim(dim)


def default_system(dim=1, quad_tol=DEFAULT_QUAD_TOL, n_nodes=DEFAULT_NODES):
    """Shared system instance; the step table is built once per tolerance."""
    return _shared_system(int(dim), float(quad_tol), int(n_nodes))
