import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import torus_wavelet_oracle
from tlwavelab.grid import (
    CoefficientField,
    GridFunction,
    GridSpec,
    analysis_channels,
    analyze,
    analyze_separable,
    band_cutoff,
    father_lattice_sum,
    father_projection,
    op_T1,
    op_T2,
    project_P_sN,
    project_Qj,
    random_band_limited,
    random_field,
    synthesize,
    wavelet_function,
    wavelet_spectrum,
)


def all_indices(spec):
    for label, j in analysis_channels(spec):
        for k in itertools.product(range(spec.translations(j)), repeat=spec.dim):
            yield label, j, k


# -- GridSpec ------------------------------------------------------------------


def test_default_windows():
    assert GridSpec.default(1).scales == range(-4, 8)
    assert GridSpec.default(2).scales == range(-2, 5)


@pytest.mark.parametrize(
    "kwargs",
    [dict(dim=3), dict(period_exp=-1), dict(period_exp=5, grid_exp=6), dict(j_lo=-10), dict(j_hi=50), dict(j_lo=3, j_hi=2)],
)
def test_invalid_specs(kwargs):
    base = dict(dim=1, period_exp=5, grid_exp=14) | kwargs
    with pytest.raises(ValueError):
        GridSpec(**base)


def test_translations_and_representable():
    spec = GridSpec(1, 3, 8)
    assert spec.translations(-3) == 1 and spec.translations(2) == 32
    with pytest.raises(ValueError):
        spec.translations(-4)
    assert spec.representable((0,), 4) and not spec.representable((1,), 4)
    assert not spec.representable((0,), -4)


# -- generators against the continuous spectrum --------------------------------


@pytest.mark.parametrize("label,j,k", [((1,), -2, (1,)), ((1,), 0, (5,)), ((1,), 3, (60,)), ((0,), -2, (1,)), ((0,), 1, (3,))])
def test_wavelet_samples_match_oracle_1d(small1, system1, label, j, k):
    got = wavelet_function(small1, label, j, k, system1).samples
    want = torus_wavelet_oracle(small1, system1, label, j, k)
    np.testing.assert_allclose(got, want, atol=1e-12)


@pytest.mark.parametrize("label,j,k", [((1, 0), -1, (1, 0)), ((0, 1), 0, (2, 3)), ((1, 1), 2, (5, 9)), ((0, 0), -1, (1, 1))])
def test_wavelet_samples_match_oracle_2d(small2, system2, label, j, k):
    got = wavelet_function(small2, label, j, k, system2).samples
    want = torus_wavelet_oracle(small2, system2, label, j, k)
    np.testing.assert_allclose(got, want, atol=1e-12)


def test_spectrum_of_generator_consistent(small1, system1):
    f = wavelet_function(small1, (1,), 1, (3,), system1)
    np.testing.assert_allclose(wavelet_spectrum(small1, (1,), 1, (3,), system1), f.spectrum(), atol=1e-13)


def test_generator_is_real_and_translation_covariant(small1, system1):
    f = wavelet_function(small1, (1,), 1, (0,), system1)
    g = wavelet_function(small1, (1,), 1, (3,), system1)
    assert np.abs(f.samples.imag).max() < 1e-14
    # translation by k 2^{-j} = 3/2 is a shift of 3/2 * N / L = 48 samples
    np.testing.assert_allclose(np.roll(f.samples, 48), g.samples, atol=1e-13)


@pytest.mark.parametrize("spec_name", ["small1", "small2"])
def test_full_basis_is_orthonormal(request, spec_name):
    spec = request.getfixturevalue(spec_name)
    system = request.getfixturevalue("system1" if spec.dim == 1 else "system2")
    rows = np.array([wavelet_function(spec, *idx, system).samples.ravel() for idx in all_indices(spec)])
    gram = rows.conj() @ rows.T * spec.cell_volume
    np.testing.assert_allclose(gram, np.eye(len(rows)), atol=1e-12)
    # the basis spans the band below the finest wavelet band, minus constants
    assert len(rows) == (spec.translations(spec.j_hi + 1)) ** spec.dim


@pytest.mark.parametrize("spec_name", ["small1", "small2"])
def test_analysis_equals_dense_inner_products(request, spec_name, rng):
    spec = request.getfixturevalue(spec_name)
    system = request.getfixturevalue("system1" if spec.dim == 1 else "system2")
    f = random_band_limited(spec, rng, real=False, zero_mean=False)
    c = analyze(f, system)
    f0 = f.zero_mean()
    for label, j, k in itertools.islice(all_indices(spec), 0, None, 7):
        psi = GridFunction(spec, torus_wavelet_oracle(spec, system, label, j, k))
        want = f0.inner(psi)
        got = c.channels.get((label, j), np.zeros((spec.translations(j),) * spec.dim))[k]
        assert got == pytest.approx(want, abs=1e-12)


# -- analysis and synthesis -----------------------------------------------------


@pytest.mark.parametrize("dim", [1, 2])
def test_round_trip_and_parseval(dim, rng, system1, system2):
    spec = GridSpec.default(dim)
    system = system1 if dim == 1 else system2
    f = random_band_limited(spec, rng)
    c = analyze(f, system)
    g = synthesize(c, system)
    assert np.linalg.norm(g.samples - f.samples) / np.linalg.norm(f.samples) < 1e-12
    assert c.energy() == pytest.approx(f.norm2() ** 2, rel=1e-12)


def test_analysis_drops_mean(small1, system1, rng):
    f = random_band_limited(small1, rng, zero_mean=False)
    assert abs(f.mean()) > 1e-6
    g = synthesize(analyze(f, system1), system1)
    np.testing.assert_allclose(g.samples, f.samples - f.mean(), atol=1e-12)


def test_single_generator_analyses_to_unit_entry(small1, system1):
    f = wavelet_function(small1, (1,), 2, (7,), system1)
    entries = [(idx, v) for idx, v in analyze(f, system1).entries() if abs(v) > 1e-12]
    assert len(entries) == 1
    (idx, v), = entries
    assert (idx.label, idx.j, idx.k) == ((1,), 2, (7,)) and v == pytest.approx(1.0, abs=1e-12)


@given(st.integers(0, 2**32 - 1), st.floats(0.05, 1.0))
@settings(max_examples=25, deadline=None)
def test_synthesis_analysis_identity_on_random_fields(seed, density):
    spec = GridSpec(1, 3, 8)
    c = random_field(spec, np.random.default_rng(seed), density, include_father=True)
    back = analyze(synthesize(c))
    for (label, j), values in c.channels.items():
        if not any(label):
            # constants have equal scaling coefficients and analysis removes them
            values = values - values.mean()
        got = back.channels.get((label, j), np.zeros_like(values))
        np.testing.assert_allclose(got, values, atol=1e-12)


@given(st.integers(0, 2**32 - 1), st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False))
@settings(max_examples=25, deadline=None)
def test_analysis_is_linear(seed, alpha):
    spec = GridSpec(1, 3, 8)
    r = np.random.default_rng(seed)
    f, g = random_band_limited(spec, r), random_band_limited(spec, r)
    lhs = analyze(f * alpha + g)
    a, b = analyze(f), analyze(g)
    for key in lhs.channels:
        want = alpha * a.channels.get(key, 0) + b.channels.get(key, 0)
        np.testing.assert_allclose(lhs.channels[key], want, atol=1e-11 * (1 + abs(alpha)))


def test_separable_analysis_matches_full(small2, system1, system2):
    spec1 = GridSpec(1, small2.period_exp, small2.grid_exp)
    u = wavelet_function(spec1, (0,), 0, (1,), system1) + 0.3 * wavelet_function(spec1, (1,), 1, (2,), system1)
    v = wavelet_function(spec1, (0,), -1, (0,), system1)
    full = GridFunction(small2, np.multiply.outer(u.samples, v.samples))
    a = analyze(full, system2)
    b = analyze_separable([u, v], small2, system1)
    assert a.channels.keys() == b.channels.keys()
    for key in a.channels:
        np.testing.assert_allclose(a.channels[key], b.channels[key], atol=1e-14)


# -- coefficient fields --------------------------------------------------------


def test_field_validation(small1):
    with pytest.raises(ValueError):
        CoefficientField(small1, {((1,), 9): np.zeros(512)})
    with pytest.raises(ValueError):
        CoefficientField(small1, {((0,), 0): np.zeros(8)})
    with pytest.raises(ValueError):
        CoefficientField(small1, {((1,), 0): np.zeros(3)})


def test_field_helpers(small1):
    c = CoefficientField.from_entries(small1, {((1,), 0, 3): 2.0, ((1,), 1, 1): -1.0, ((0,), -2, 1): 0.5})
    assert len(c) == 3 and c.scales() == [0, 1] and c.scales(include_father=True) == [-2, 0, 1]
    assert c.energy() == pytest.approx(5.25)
    assert len(c.mother()) == 2 and c.scaled(2.0).energy() == pytest.approx(21.0)
    assert c.same_entries(c.scaled(1.0)) and not c.same_entries(c.mother())
    assert [idx.j for idx, _ in c.entries()] == [-2, 0, 1]


def test_window_operators(small1, rng):
    c = random_field(small1, rng, 0.5, include_father=True)
    assert project_P_sN(c, 2, 3).scales() == [-1, 0, 1, 2]
    assert project_Qj(c, 1).scales() == [1]
    assert op_T1(c, 2, 0, 3).is_empty and op_T2(c, 2, 4, 3).is_empty
    assert op_T1(c, 2, 2, 3).scales() == [1, 2] and op_T2(c, 2, 2, 3).scales() == [-1, 0]
    # T1 + T2 recovers the window for every split point
    for t in range(5):
        merged = op_T1(c, 2, t, 3).energy() + op_T2(c, 2, t, 3).energy()
        assert merged == pytest.approx(project_P_sN(c, 2, 3).energy())
    with pytest.raises(ValueError):
        op_T1(c, 2, 5, 3)


def test_band_cutoff_keeps_inputs_in_range(rng):
    spec = GridSpec.default(1)
    f = random_band_limited(spec, rng)
    m = np.abs(np.fft.fftfreq(spec.size, 1.0 / spec.size))
    assert np.abs(f.spectrum()[m > band_cutoff(spec)]).max() < 1e-12
    assert abs(f.spectrum()[0]) < 1e-12 and np.abs(f.samples.imag).max() == 0.0


# -- scaling-function projections and lattice sums --------------------------------


def test_father_projection_is_projection(small1, system1, rng):
    f = random_band_limited(small1, rng, zero_mean=False)
    p = father_projection(f, -1, system1)
    pp = father_projection(p, -1, system1)
    np.testing.assert_allclose(pp.samples, p.samples, atol=1e-12)
    # orthogonal: the residual is orthogonal to the range
    assert abs((f - p).inner(p)) < 1e-11 * f.norm2() ** 2
    # dense route: sum of <f, phi_k> phi_k over the scale -1 translates
    dense = sum(
        f.inner(GridFunction(small1, phi)) * phi
        for phi in (torus_wavelet_oracle(small1, system1, (0,), -1, (k,)) for k in range(4))
    )
    np.testing.assert_allclose(p.samples, dense, atol=1e-12)


def test_father_lattice_sums(system1):
    xs = np.array([0.0, 0.25, 0.5, 0.8])
    ks = np.arange(-64, 65)
    # Poisson summation: the signed sum sum_k phi(x - k) is sqrt(2 pi) Phi(0) = 1
    signed = np.array([system1.scaling(x - ks).sum() for x in xs])
    np.testing.assert_allclose(signed, 1.0, atol=1e-6)
    absolute = father_lattice_sum(xs, 64, system1)
    assert np.all(absolute >= signed - 1e-12) and np.all(absolute < 3.0)
    # periodic in x with period 1
    np.testing.assert_allclose(father_lattice_sum(xs + 1.0, 64, system1), absolute, atol=1e-6)
