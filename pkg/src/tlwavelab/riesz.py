"""Riesz transforms as Fourier multipliers ``-i xi_l / |xi|`` on grid functions."""
from __future__ import annotations

import numpy as np

from .grid import (
    GridFunction,
    analyze,
    random_field,
    synthesize,
    wavelet_spectrum,
)
from .meyer import default_system, mother_labels
from .norms import RatioStats, f01q_norm

IDENTITY = 0


class NonzeroMeanError(ValueError):
    """Raised when an identity needs the zero-frequency bin to vanish."""


def _check_component(ell, dim):
    ell = int(ell)
    if not 0 <= ell <= dim:
        raise ValueError(f"Riesz component {ell} outside 0..{dim}")
    return ell


def riesz_multiplier(spec, ell):
    """Multiplier array on the FFT grid; the zero bin is mapped to 0."""
    ell = _check_component(ell, spec.dim)
    if ell == IDENTITY:
        return np.ones(spec.shape)
    freqs = np.meshgrid(*([spec.frequencies()] * spec.dim), indexing="ij")
    radius = np.sqrt(sum(x**2 for x in freqs))
    with np.errstate(invalid="ignore", divide="ignore"):
        symbol = np.where(radius > 0, -1j * freqs[ell - 1] / radius, 0.0)
    return symbol


def riesz_apply(ell, f):
    """``R_ell f``; ``ell = 0`` is the identity."""
    ell = _check_component(ell, f.spec.dim)
    if ell == IDENTITY:
        return f.copy()
    spectrum = np.fft.fftn(f.samples) * riesz_multiplier(f.spec, ell)
    out = np.fft.ifftn(spectrum)
    if not np.any(f.samples.imag):
        out = out.real
    return GridFunction(f.spec, out)


def riesz_square_sum(f, mean_tol=1e-12):
    """``sum_{l>=1} R_l R_l f``, which reproduces ``-f`` for zero-mean input."""
    scale = max(float(np.abs(f.samples).max()), 1.0)
    if abs(f.mean()) > mean_tol * scale:
        raise NonzeroMeanError(
            "input has a nonzero mean: the xi=0 bin is annihilated by every R_l, "
            "so the square-sum identity only holds modulo constants"
        )
    total = np.zeros(f.spec.shape, complex)
    for ell in range(1, f.spec.dim + 1):
        total += riesz_apply(ell, riesz_apply(ell, f)).samples
    return GridFunction(f.spec, total)


def square_sum_error(f):
    """Relative deviation of ``sum R_l^2 f`` from ``-f``."""
    g = riesz_square_sum(f)
    return float(np.linalg.norm(g.samples + f.samples) / np.linalg.norm(f.samples))


def _pair_inner(spec, spec_a, mult, spec_b):
    # <R psi_a, psi_b> = L^{-D} sum_m mult_m A_m conj(B_m)
    return complex(np.vdot(spec_b, mult * spec_a) / spec.period**spec.dim)


def _aligned_translation(rng, k, j, jt, modulus, spread):
    base = np.floor(np.asarray(k) * 2.0 ** (jt - j)).astype(int)
    return tuple(int(v) % modulus for v in base + rng.integers(-spread, spread + 1, size=len(k)))


def sample_gram_pairs(spec, j, jt, sample_count, rng, same_label=False, spread=2):
    """Random ``(label, k, label~, k~)`` with ``k~`` near the position aligned with ``k``."""
    labels = mother_labels(spec.dim)
    pairs = []
    for _ in range(sample_count):
        lab = labels[rng.integers(len(labels))]
        labt = lab if same_label else labels[rng.integers(len(labels))]
        k = tuple(int(v) for v in rng.integers(0, spec.translations(j), size=spec.dim))
        kt = _aligned_translation(rng, k, j, jt, spec.translations(jt), spread)
        pairs.append((lab, k, labt, kt))
    return pairs


def gram_values(spec, j, jt, pairs, ells=None, system=None):
    """``|<R_l psi_{j,k}, psi_{jt,kt}>|`` for each pair and component, shape (pairs, ells)."""
    system = default_system(spec.dim) if system is None else system
    ells = range(spec.dim + 1) if ells is None else ells
    mults = [riesz_multiplier(spec, ell) for ell in ells]
    out = np.empty((len(pairs), len(mults)))
    for row, (lab, k, labt, kt) in enumerate(pairs):
        a = wavelet_spectrum(spec, lab, j, k, system)
        b = wavelet_spectrum(spec, labt, jt, kt, system)
        for col, mult in enumerate(mults):
            out[row, col] = abs(_pair_inner(spec, a, mult, b))
    return out


def near_diagonal_gram(spec, j, jt, sample_count=100, rng=None, system=None):
    """Largest sampled ``|<R_l psi_{j,k}, psi~_{jt,kt}>|`` over ``l = 0..D``.

    Translations ``k~`` are drawn next to the position aligned with ``k``,
    where the spatial overlap (and hence any leakage) is largest.
    """
    for scale in (j, jt):
        if not (spec.representable((1,) * spec.dim, scale)):
            raise ValueError(f"scale {scale} not representable")
    rng = np.random.default_rng(0) if rng is None else rng
    pairs = sample_gram_pairs(spec, j, jt, sample_count, rng)
    if not pairs:
        return 0.0
    return float(gram_values(spec, j, jt, pairs, system=system).max())


def riesz_bounded_ratio(spec, q, trials, rng, ell=1, density=0.3, system=None):
    """Distribution of ``|R_l f|_{F01q} / |f|_{F01q}`` over random wavelet series ``f``."""
    if not 1 < q < np.inf:
        raise ValueError("q must lie in (1, inf)")
    system = default_system(spec.dim) if system is None else system
    values = []
    for _ in range(trials):
        c = random_field(spec, rng, density)
        if c.is_empty:
            continue
        f = synthesize(c, system)
        rf = riesz_apply(ell, f)
        values.append(f01q_norm(analyze(rf, system), q) / f01q_norm(c, q))
    return RatioStats.from_values(values)


def adjacent_scale_controls(spec, j, sample_count=20, rng=None, system=None):
    """``|<R_l psi^e_{j,k}, psi^e_{j+1,k~}>|`` for pairs expected to be clearly nonzero.

    The label ``e`` has its single wavelet factor on axis ``l`` and ``k~``
    sits within one step of the aligned position.  Other labels can cancel:
    a scaling factor on axis ``l`` makes the aligned integrand odd in
    ``xi_l``, and extra wavelet factors only pass through the small real
    part of their overlap spectrum.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    out = []
    for _ in range(sample_count):
        ell = int(rng.integers(1, spec.dim + 1))
        label = tuple(int(axis == ell - 1) for axis in range(spec.dim))
        k = tuple(int(v) for v in rng.integers(0, spec.translations(j), size=spec.dim))
        kt = _aligned_translation(rng, k, j, j + 1, spec.translations(j + 1), 1)
        out.append(gram_values(spec, j, j + 1, [(label, k, label, kt)], ells=[ell], system=system)[0, 0])
    return np.array(out)
