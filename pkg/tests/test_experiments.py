import math

import numpy as np
import pytest
from scipy import integrate

from tlwavelab.daubechies import daubechies_scaling
from tlwavelab.experiments import (
    LacunaryBase,
    conjugate_exponent,
    duality_pairing_check,
    inclusion_demo,
    job_rng,
    lacunary_terms,
    pairing_terms,
    riesz_char_check,
    select_shift,
    support_premise,
    trivial_fs_decomposition,
)
from tlwavelab.grid import GridSpec, random_band_limited, wavelet_function
from tlwavelab.riesz import NonzeroMeanError, riesz_apply


@pytest.fixture(scope="module")
def scaling16():
    return daubechies_scaling(16, 12)


def test_job_rng_streams():
    a = job_rng(7, "x").standard_normal(4)
    np.testing.assert_array_equal(a, job_rng(7, "x").standard_normal(4))
    assert not np.array_equal(a, job_rng(7, "y").standard_normal(4))
    assert not np.array_equal(a, job_rng(8, "x").standard_normal(4))


def test_conjugate_exponent():
    assert conjugate_exponent(2.0) == 2.0
    assert conjugate_exponent(4.0) == pytest.approx(4.0 / 3.0)


def test_shift_selection(scaling16):
    shift, table = select_shift(scaling16)
    assert shift == 4
    # half width 15.5 needs 2^M >= 15.5
    assert [row[2] for row in table] == [support_premise(scaling16, m) for m in range(1, 7)]
    assert all(math.isnan(row[1]) for row in table[:3])


def test_kernel_constant_two_routes(scaling16):
    base = LacunaryBase(scaling16, 4)
    lo, hi = base.support
    assert lo > 0
    value, _ = integrate.quad(lambda y: float(base(y)) / y, lo, hi, limit=500, points=np.arange(lo, hi, 1.0))
    assert base.kernel_constant() == pytest.approx(-value, abs=1e-6)
    assert base.kernel_constant() < -1e-3
    # left of the support, R_1 Phi(0) reduces to the kernel constant over pi
    assert base.hilbert(0.0)[0] == pytest.approx(base.kernel_constant() / math.pi, rel=1e-12)


def test_lacunary_terms_sum_dilates(scaling16):
    base = LacunaryBase(scaling16, 4)
    spec = GridSpec(1, 4, 12)
    f = lacunary_terms(spec, base, [2, 4])
    x = spec.coordinates()
    np.testing.assert_allclose(f.samples.real, base(4 * x) + base(16 * x))


def test_inclusion_demo_small():
    rep = inclusion_demo(2.0, j_floor=-6)
    assert rep.checks["truncated_norm_grows_linearly"] and rep.checks["l1_spread_below_1pct"]
    header, rows = rep.series["shells"]
    assert header[0] == "m" and [r[0] for r in rows] == list(range(2, 7))
    assert all(np.diff([r[1] for r in rows]) > 0)
    with pytest.raises(ValueError):
        inclusion_demo(1.5)
    with pytest.raises(ValueError):
        inclusion_demo(2.0, j_floor=-2)


def test_riesz_char_small():
    spec = GridSpec(1, 3, 8)
    rep = riesz_char_check(spec, 2.0, trials=4, seed=1, budget=1e9)
    assert rep.passed and rep.results["count"] == 4
    assert rep.results["rescale_error"] < 1e-10
    tight = riesz_char_check(spec, 2.0, trials=4, seed=1, budget=1.0)
    assert not tight.checks["spread_within_budget"]


def test_duality_small():
    rep = duality_pairing_check(GridSpec(1, 3, 8), 2.0, trials=3, seed=2)
    assert rep.passed
    assert len(rep.series["pairs"][1]) == 6
    assert rep.results["C_double"] >= rep.results["C_trials"]


def test_trivial_decomposition(rng):
    spec = GridSpec(2, 2, 6)
    f = random_band_limited(spec, rng)
    comps, rep = trivial_fs_decomposition(f)
    assert rep.results["reconstruction_error"] < 1e-12
    assert any("NOT guaranteed" in n for n in rep.notes)
    recon = sum(riesz_apply(ell, comps[ell]).samples for ell in range(1, 3))
    np.testing.assert_allclose(recon, f.samples, atol=1e-12)
    with pytest.raises(NonzeroMeanError):
        trivial_fs_decomposition(random_band_limited(spec, rng, zero_mean=False))


def test_pairing_singletons(system1):
    spec = GridSpec(1, 3, 8)
    psi = wavelet_function(spec, (1,), 1, (3,), system1)
    same = pairing_terms(psi * 2.0, psi * 2.0, 2.0, system1)
    assert same["pairing"] == pytest.approx(4.0, abs=1e-12)
    assert same["pairing"] <= same["we1q_f"] * same["dual_g"] * 10
    # disjoint coefficient supports pair to zero
    other = wavelet_function(spec, (1,), 2, (3,), system1)
    assert pairing_terms(psi, other, 2.0, system1)["pairing"] < 1e-14
