import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tlwavelab.grid import GridFunction, GridSpec, random_band_limited
from tlwavelab.riesz import (
    NonzeroMeanError,
    adjacent_scale_controls,
    gram_values,
    near_diagonal_gram,
    riesz_apply,
    riesz_bounded_ratio,
    riesz_multiplier,
    riesz_square_sum,
    sample_gram_pairs,
    square_sum_error,
)


def cot_kernel_hilbert(samples):
    """Periodic Hilbert transform by circular convolution in space (no FFT).

    The discrete kernel of the multiplier ``-i sign(m)`` (Nyquist bin zero)
    is ``(2/N) cot(pi n / N)`` at odd ``n`` and zero at even ``n``.
    """
    n = len(samples)
    idx = np.arange(n)
    kernel = np.zeros(n)
    odd = idx % 2 == 1
    kernel[odd] = 2.0 / n / np.tan(np.pi * idx[odd] / n)
    out = np.empty(n)
    for i in range(n):
        out[i] = np.dot(kernel, samples[(i - idx) % n])
    return out


def test_hilbert_matches_space_convolution(rng):
    spec = GridSpec(1, 3, 8)
    f = random_band_limited(spec, rng)
    np.testing.assert_allclose(riesz_apply(1, f).samples, cot_kernel_hilbert(f.samples.real), atol=1e-12)


@pytest.mark.parametrize("n", [1, 3, 17])
def test_hilbert_of_cosine_is_sine(n):
    spec = GridSpec(1, 2, 7)
    x = spec.coordinates()
    a = 2 * np.pi * n / spec.period
    f = GridFunction(spec, np.cos(a * x))
    np.testing.assert_allclose(riesz_apply(1, f).samples, np.sin(a * x), atol=1e-13)


def test_two_dimensional_plane_wave():
    spec = GridSpec(2, 1, 5)
    x = spec.coordinates()
    X, Y = np.meshgrid(x, x, indexing="ij")
    w = 2 * np.pi / spec.period * np.array([3.0, -4.0])
    f = GridFunction(spec, np.cos(w[0] * X + w[1] * Y))
    for ell in (1, 2):
        want = w[ell - 1] / np.linalg.norm(w) * np.sin(w[0] * X + w[1] * Y)
        np.testing.assert_allclose(riesz_apply(ell, f).samples, want, atol=1e-13)


def test_multiplier_zero_bin_and_identity():
    spec = GridSpec(2, 1, 4)
    assert riesz_multiplier(spec, 1)[0, 0] == 0
    np.testing.assert_array_equal(riesz_multiplier(spec, 0), 1.0)
    with pytest.raises(ValueError):
        riesz_multiplier(spec, 3)


@given(st.integers(0, 2**32 - 1), st.sampled_from([1, 2]))
@settings(max_examples=20, deadline=None)
def test_square_sum_and_anti_self_adjoint(seed, dim):
    spec = GridSpec(dim, 2, 6)
    r = np.random.default_rng(seed)
    f, g = random_band_limited(spec, r), random_band_limited(spec, r)
    assert square_sum_error(f) < 1e-12
    for ell in range(1, dim + 1):
        lhs = riesz_apply(ell, f).inner(g)
        rhs = -f.inner(riesz_apply(ell, g))
        assert abs(lhs - rhs) < 1e-12 * f.norm2() * g.norm2()
        # unitary on zero-mean input
        assert sum(riesz_apply(k, f).norm2() ** 2 for k in range(1, dim + 1)) == pytest.approx(f.norm2() ** 2)


def test_real_in_real_out_complex_kept(rng):
    spec = GridSpec(1, 2, 6)
    f = random_band_limited(spec, rng)
    assert np.all(riesz_apply(1, f).samples.imag == 0)
    g = random_band_limited(spec, rng, real=False)
    assert np.abs(riesz_apply(1, g).samples.imag).max() > 0


def test_nonzero_mean_rejected(rng):
    spec = GridSpec(1, 2, 6)
    f = random_band_limited(spec, rng, zero_mean=False)
    with pytest.raises(NonzeroMeanError, match="xi=0"):
        riesz_square_sum(f)


def test_far_scales_decouple_and_adjacent_do_not(system1, system2):
    for spec, system in ((GridSpec.default(1), system1), (GridSpec.default(2), system2)):
        r = np.random.default_rng(3)
        assert near_diagonal_gram(spec, 0, 2, 20, r, system) <= 1e-12
        assert near_diagonal_gram(spec, spec.j_lo, spec.j_lo + 3, 20, r, system) <= 1e-12
        controls = adjacent_scale_controls(spec, 0, 10, r, system)
        assert controls.min() > 1e-6


def test_gram_values_shape_and_identity_column(small1, system1, rng):
    pairs = sample_gram_pairs(small1, 1, 1, 5, rng, same_label=True, spread=0)
    vals = gram_values(small1, 1, 1, pairs, system=system1)
    assert vals.shape == (5, 2)
    # spread 0 at equal scales pairs each wavelet with itself
    np.testing.assert_allclose(vals[:, 0], 1.0, atol=1e-12)


def test_bounded_ratio_stats(small1, rng):
    st_ = riesz_bounded_ratio(small1, 2.0, 5, rng)
    assert st_.count == 5 and 0 < st_.min <= st_.max < 10
    with pytest.raises(ValueError):
        riesz_bounded_ratio(small1, 1.0, 1, rng)
