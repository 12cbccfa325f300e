"""Scripted experiments: counterexamples, norm-equivalence ratios and pairings.

Every experiment returns an ``ExperimentReport`` holding JSON-ready scalars,
CSV-ready series and named boolean checks.  Randomness comes from
``job_rng(seed, name)`` so reports are reproducible bit for bit.
"""
from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .daubechies import daubechies_scaling
from .grid import (
    GridFunction,
    GridSpec,
    analyze,
    analyze_separable,
    random_field,
    synthesize,
    wavelet_function,
)
from .meyer import default_system
from .norms import (
    RatioStats,
    f01q_norm,
    f0infq_functional,
    h1_norm,
    l1_norm,
    linf_norm,
    we1q_norm,
)
from .riesz import NonzeroMeanError, riesz_apply


def job_rng(seed, name):
    """Generator for one named job, derived from the run seed."""
    return np.random.default_rng([int(seed), zlib.crc32(name.encode())])


@dataclass
class ExperimentReport:
    name: str
    params: dict
    results: dict
    series: dict = field(default_factory=dict)  # name -> (header, rows)
    checks: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return all(self.checks.values())

    def to_dict(self):
        return {
            "name": self.name,
            "params": self.params,
            "results": self.results,
            "checks": self.checks,
            "passed": self.passed,
            "notes": self.notes,
        }


def conjugate_exponent(q):
    return q / (q - 1.0)


def _relative_spread(values):
    values = np.asarray(values, dtype=float)
    mean = values.mean()
    return float(np.abs(values - mean).max() / mean)


# -- father tensor and the divergence of its F01q norm ---------------------------


def _inclusion_grid(m, pad, dim, j_top):
    period_exp = m + pad
    return GridSpec(dim, period_exp, period_exp + 2, j_lo=-m, j_hi=j_top)


def inclusion_demo(q=2.0, j_floor=-9, dim=1, m_min=2, pad=4, j_top=None, max_period_exp=18, system=None):
    """Coarse-scale behaviour of the coefficients of the scale-0 scaling tensor.

    For each depth ``m`` the tensor is analysed on a torus of period
    ``2^(m + pad)`` with coarsest wavelet scale ``-m``.  Reported: the ratios
    ``|c_{j,0}| / 2^{Dj/2}`` on the label with all wavelet factors, the
    truncated F01q norm against ``m`` with a linear fit, and the L1 norm.
    """
    if q < 2:
        raise ValueError("q must be at least 2")
    if j_floor >= -3:
        raise ValueError("j_floor must be below -3")
    if dim not in (1, 2):
        raise ValueError("dimension must be 1 or 2")
    depth = -j_floor
    if depth + pad > max_period_exp:
        raise ValueError(f"j_floor={j_floor} needs period exponent {depth + pad} > {max_period_exp}")
    if j_top is None:
        j_top = 0 if dim == 1 else -2
    m_min = max(m_min, 1 - j_top)
    system1 = default_system(1) if system is None else system.with_dim(1)
    mother_all = (1,) * dim
    rows, ratio_rows = [], []
    for m in range(m_min, depth + 1):
        spec = _inclusion_grid(m, pad, dim, j_top)
        spec1 = GridSpec(1, spec.period_exp, spec.grid_exp, spec.j_lo, spec.j_hi)
        factor = wavelet_function(spec1, (0,), 0, (0,), system1)
        if dim == 1:
            c = analyze(factor, system1, spec1)
        else:
            c = analyze_separable([factor] * dim, spec, system1)
        l1 = l1_norm(factor) ** dim
        truncated = f01q_norm(c.mother(), q)
        rows.append((m, truncated, l1))
        if m == depth:
            for j in range(j_top, j_floor - 1, -1):
                value = c.channels.get((mother_all, j))
                coeff = abs(value[(0,) * dim]) if value is not None else 0.0
                ratio_rows.append((j, coeff / 2.0 ** (dim * j / 2.0)))
    ms = np.array([r[0] for r in rows], dtype=float)
    norms = np.array([r[1] for r in rows])
    fit = stats.linregress(ms, norms)
    r2 = float(fit.rvalue**2)
    increments = np.diff(norms).tolist()
    check_js = [r for r in ratio_rows if j_floor <= r[0] <= -5]
    ratio_spread = _relative_spread([r[1] for r in check_js]) if check_js else math.nan
    l1_values = [r[2] for r in rows]
    l1_spread = _relative_spread(l1_values)
    psi0 = abs(float(system1.wavelet(0.0))) ** dim
    report = ExperimentReport(
        name="inclusion",
        params={"q": q, "j_floor": j_floor, "dim": dim, "m_min": m_min, "pad": pad, "j_top": j_top},
        results={
            "slope": float(fit.slope),
            "intercept": float(fit.intercept),
            "r_squared": r2,
            "ratio_spread": ratio_spread,
            "ratio_mean": float(np.mean([r[1] for r in check_js])) if check_js else math.nan,
            "psi0_power": psi0,
            "l1_spread": l1_spread,
            "l1_mean": float(np.mean(l1_values)),
        },
        series={
            "shells": (("m", "truncated_f01q", "increment", "l1"), [
                (m, n, (n - rows[i - 1][1]) if i else math.nan, l1) for i, (m, n, l1) in enumerate(rows)
            ]),
            "coefficient_ratios": (("j", "ratio"), ratio_rows),
        },
    )
    report.results["increments"] = increments
    report.checks = {
        "coefficient_ratio_spread_below_5pct": bool(ratio_spread < 0.05),
        "truncated_norm_grows_linearly": bool(fit.slope > 0 and r2 > 0.9),
        "l1_spread_below_1pct": bool(l1_spread < 0.01),
    }
    return report


# -- lacunary sum of a dilated Daubechies bump --------------------------------------


@dataclass(frozen=True)
class LacunaryBase:
    """``Phi(x) = Phi0(x - 2^{M+1})`` with ``Phi0`` the centred scaling function."""

    scaling: object
    shift_exp: int

    @property
    def centre(self):
        return 2.0 ** (self.shift_exp + 1)

    @property
    def half_width(self):
        lo, hi = self.scaling.support
        return (hi - lo) / 2.0

    @property
    def support(self):
        return self.centre - self.half_width, self.centre + self.half_width

    def __call__(self, x):
        return self.scaling(np.asarray(x) - self.centre + self.half_width)

    def samples(self):
        return self.scaling.x - self.half_width + self.centre, self.scaling.values

    def kernel_constant(self):
        """``-int Phi(y) / y dy`` (the support sits in ``y > 0``)."""
        y, v = self.samples()
        return float(-(v / y).sum() * self.scaling.step)

    def hilbert(self, x):
        """Real-line ``R_1 Phi(x) = -(1/pi) int Phi(y) / (y - x) dy`` for ``x`` left of the support."""
        y, v = self.samples()
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return np.array([-(v / (y - xv)).sum() * self.scaling.step / math.pi for xv in x])


def support_premise(scaling, shift_exp):
    half = (scaling.support[1] - scaling.support[0]) / 2.0
    return half <= 2.0**shift_exp


def select_shift(scaling, candidates=range(1, 7), margin=1e-3):
    """Smallest shift exponent meeting the support premise with kernel constant below ``-margin``."""
    table = []
    chosen = None
    for m in candidates:
        ok = support_premise(scaling, m)
        # a support reaching y <= 0 would make the kernel integral singular
        value = LacunaryBase(scaling, m).kernel_constant() if ok else math.nan
        table.append((m, value, ok))
        if chosen is None and ok and value < -margin:
            chosen = m
    return chosen, table


def calibrate_radius(base, samples=257):
    """Largest ``r <= 2^{M-1}`` with ``R_1 Phi <= R_1 Phi(0) / 2`` on ``[-r, r]``."""
    limit = 2.0 ** (base.shift_exp - 1)
    xs = np.linspace(-limit, limit, samples)
    values = base.hilbert(xs)
    threshold = base.hilbert(0.0)[0] / 2.0
    bad = np.abs(xs[values > threshold])
    return float(limit if bad.size == 0 else bad.min() * 0.99), float(threshold * 2.0)


def lacunary_terms(spec, base, scales):
    x = spec.coordinates()
    total = np.zeros(spec.size)
    for j in scales:
        total += base(2.0**j * x)
    return GridFunction(spec, total)


def lacunary_demo(
    q_prime=2.0,
    term_counts=range(1, 9),
    order=16,
    levels=12,
    grid_exp=22,
    system=None,
):
    """Partial sums ``f_m = sum_{i<=m} Phi(2^{2i} x)`` in one dimension.

    Reports ``|f_m|_inf``, the F0inf,q' functional, ``sup |R_1 f_m|`` on
    ``|x| <= delta 2^{-2m}``, the kernel constant and coefficient decay
    below scale 0.  The period equals ``2^M`` so every term fits the torus.
    """
    if not 1.0 < q_prime <= 2.0:
        raise ValueError("q_prime must lie in (1, 2]")
    system = default_system(1) if system is None else system.with_dim(1)
    scaling = daubechies_scaling(order, levels)
    shift, shift_table = select_shift(scaling)
    if shift is None:
        raise ValueError(
            "no shift exponent in 1..6 gives a negative kernel constant with the support "
            "premise; adjust the shift range or the filter order"
        )
    base = LacunaryBase(scaling, shift)
    constant = base.kernel_constant()
    radius, r1_at_zero = calibrate_radius(base)
    spec = GridSpec(1, shift, grid_exp)
    guard = spec.max_scale
    notes = []
    rows, decay_rows = [], []
    for m in sorted(term_counts):
        if 2 * m > guard:
            notes.append(f"term count {m} skipped: finest scale {2 * m} exceeds the Nyquist guard {guard}")
            continue
        f = lacunary_terms(spec, base, range(2, 2 * m + 1, 2))
        c = analyze(f, system)
        carleson = f0infq_functional(c, q_prime)
        r1 = riesz_apply(1, f).samples.real
        x = spec.coordinates()
        dist = np.minimum(x, spec.period - x)
        near = dist <= radius * 2.0 ** (-2 * m)
        blowup = float(np.abs(r1[near]).max())
        rows.append((m, linf_norm(f), carleson, blowup, int(near.sum())))
        for j in range(spec.j_lo, 0):
            values = c.channels.get(((1,), j))
            peak = float(np.abs(values).max()) if values is not None else 0.0
            decay_rows.append((m, j, peak / 2.0**j))
    ms = [r[0] for r in rows]
    linf = [r[1] for r in rows]
    carl = [r[2] for r in rows]
    blow = [r[3] for r in rows]
    late = [b for m, b in zip(ms, blow) if m >= 3]
    increasing = all(b2 > b1 for b1, b2 in zip(late, late[1:])) and len(late) >= 2
    fit = stats.linregress(ms, blow) if len(ms) >= 2 else None
    report = ExperimentReport(
        name="lacunary",
        params={"q_prime": q_prime, "term_counts": ms, "order": order, "levels": levels, "grid_exp": grid_exp},
        results={
            "shift_exponent": shift,
            "kernel_constant": constant,
            "kernel_constant_table": [list(t) for t in shift_table],
            "hilbert_at_zero": r1_at_zero,
            "radius": radius,
            "period_exp": spec.period_exp,
            "linf_spread": _relative_spread(linf),
            "f0infq_spread": _relative_spread(carl),
            "blowup_slope": float(fit.slope) if fit else math.nan,
            "per_term_lower_bound": abs(r1_at_zero) / 2.0,
        },
        series={
            "partial_sums": (("m", "linf", "f0infq", "sup_abs_r1_near_0", "points"), rows),
            "coefficient_decay": (("m", "j", "max_abs_coeff_over_2^j"), decay_rows),
        },
        notes=notes,
    )
    report.checks = {
        "kernel_constant_below_minus_1e-3": bool(constant < -1e-3),
        "linf_spread_below_1pct": bool(report.results["linf_spread"] < 0.01),
        "f0infq_spread_below_10pct": bool(report.results["f0infq_spread"] < 0.10),
        "riesz_sup_strictly_increasing": bool(increasing),
    }
    return report


# -- Riesz characterisation and pairings ---------------------------------------------


def _random_series(spec, rng, density, system):
    while True:
        c = random_field(spec, rng, density)
        if not c.is_empty:
            return c, synthesize(c, system)


def riesz_sum_we1q(f, q, system):
    """``sum_{l=0}^D |R_l f|_{WE1q}``."""
    total = 0.0
    for ell in range(f.spec.dim + 1):
        g = riesz_apply(ell, f)
        total += we1q_norm(analyze(g, system), g, q, system, check=False).value
    return total


def riesz_char_check(spec=None, q=2.0, trials=50, seed=0, density=0.3, system=None, budget=None):
    """Ratios ``sum_l |R_l f|_{WE1q} / |f|_{F01q}`` over seeded random series.

    With ``budget`` set, the max/min spread of the ratios must not exceed it.
    """
    if q < 2:
        raise ValueError("q must be at least 2")
    spec = GridSpec.default(1) if spec is None else spec
    system = default_system(spec.dim) if system is None else system
    rng = job_rng(seed, f"riesz-char/q={q}")
    ratios = []
    rescale_error = math.nan
    for trial in range(trials):
        c, f = _random_series(spec, rng, density, system)
        ratio = riesz_sum_we1q(f, q, system) / f01q_norm(c, q)
        ratios.append(ratio)
        if trial == 0:
            alpha = 3.7
            scaled = riesz_sum_we1q(f * alpha, q, system) / f01q_norm(c.scaled(alpha), q)
            rescale_error = abs(scaled - ratio) / ratio
    st = RatioStats.from_values(ratios)
    report = ExperimentReport(
        name="riesz-char",
        params={"q": q, "trials": trials, "seed": seed, "density": density, "grid": _grid_params(spec),
                "budget": budget},
        results={**st.summary(), "rescale_error": rescale_error},
        series={"ratios": (("trial", "ratio"), list(enumerate(ratios)))},
    )
    report.checks = {
        "ratios_positive_finite": bool(trials == 0 or (st.min > 0 and math.isfinite(st.max))),
        "rescale_invariant": bool(trials == 0 or rescale_error <= 1e-10),
    }
    if budget is not None:
        report.checks["spread_within_budget"] = bool(trials == 0 or st.spread <= budget)
    return report


def _grid_params(spec):
    return {"dim": spec.dim, "period_exp": spec.period_exp, "grid_exp": spec.grid_exp, "j_lo": spec.j_lo, "j_hi": spec.j_hi}


def pairing_terms(f, g, q, system):
    """Pairing and both sides of the bounds for one pair of zero-mean series."""
    qp = conjugate_exponent(q)
    cf, cg = analyze(f, system), analyze(g, system)
    pairing = abs(f.inner(g))
    we = we1q_norm(cf, f, q, system, check=False).value
    dual = linf_norm(g) + f0infq_functional(cg, qp)
    return {
        "pairing": pairing,
        "we1q_f": we,
        "dual_g": dual,
        "h1_f": h1_norm(cf),
        "bmo_g": f0infq_functional(cg, 2.0),
    }


def duality_pairing_check(spec=None, q=2.0, trials=50, seed=0, density=0.3, system=None):
    """Empirical constants in ``|<f, g>| <= C WE1q(f) (Linf(g) + F0inf,q'(g))``.

    Runs ``2 * trials`` pairs from one seeded stream and compares the
    constant of the first half with that of the whole run.
    """
    if q < 2:
        raise ValueError("q must be at least 2")
    spec = GridSpec.default(1) if spec is None else spec
    system = default_system(spec.dim) if system is None else system
    rng = job_rng(seed, f"duality/q={q}")
    rows = []
    for trial in range(2 * trials):
        _, f = _random_series(spec, rng, density, system)
        _, h = _random_series(spec, rng, density, system)
        # partly aligned pairs, otherwise random pairings nearly cancel
        g = f * float(rng.random()) + h
        t = pairing_terms(f, g, q, system)
        ratio = t["pairing"] / (t["we1q_f"] * t["dual_g"])
        h1_bmo = t["pairing"] / (t["h1_f"] * t["bmo_g"])
        rows.append((trial, t["pairing"], t["we1q_f"], t["dual_g"], ratio, h1_bmo))
    first = [r[4] for r in rows[:trials]]
    both = [r[4] for r in rows]
    c_n = max(first) if first else math.nan
    c_2n = max(both) if both else math.nan
    h1_const = max((r[5] for r in rows), default=math.nan)
    stability = c_2n / c_n if trials else math.nan
    report = ExperimentReport(
        name="duality",
        params={"q": q, "q_prime": conjugate_exponent(q), "trials": trials, "seed": seed, "density": density,
                "grid": _grid_params(spec)},
        results={"C_trials": c_n, "C_double": c_2n, "stability": stability, "C_h1_bmo": h1_const},
        series={"pairs": (("trial", "pairing", "we1q_f", "linf_plus_f0infq_g", "ratio", "h1_bmo_ratio"), rows)},
    )
    report.checks = {
        "constant_finite": bool(trials == 0 or math.isfinite(c_2n)),
        "constant_stable_within_2x": bool(trials == 0 or stability <= 2.0),
        "h1_bmo_constant_finite": bool(trials == 0 or math.isfinite(h1_const)),
    }
    return report


def trivial_fs_decomposition(f, q_prime=2.0, system=None, mean_tol=1e-12):
    """``f = f0 + sum_l R_l f_l`` with ``f0 = 0`` and ``f_l = -R_l f``.

    This is the trivial decomposition; boundedness of the components is not
    guaranteed, and the report says so.
    """
    system = default_system(f.spec.dim) if system is None else system
    scale = max(float(np.abs(f.samples).max()), 1.0)
    if abs(f.mean()) > mean_tol * scale:
        raise NonzeroMeanError("decomposition needs a zero-mean input (xi=0 bin must vanish)")
    components = [GridFunction.zeros(f.spec)]
    recon = np.zeros(f.spec.shape, complex)
    for ell in range(1, f.spec.dim + 1):
        comp = -riesz_apply(ell, f)
        components.append(comp)
        recon += riesz_apply(ell, comp).samples
    error = float(np.linalg.norm(recon - f.samples) / max(np.linalg.norm(f.samples), 1e-300))
    rows = []
    for ell, comp in enumerate(components):
        c = analyze(comp, system)
        rows.append((ell, linf_norm(comp), f0infq_functional(c, q_prime)))
    report = ExperimentReport(
        name="fs-trivial",
        params={"q_prime": q_prime, "grid": _grid_params(f.spec)},
        results={"reconstruction_error": error},
        series={"components": (("ell", "linf", "f0infq"), rows)},
        notes=["trivial decomposition; boundedness of components NOT guaranteed"],
    )
    report.checks = {"reconstruction_within_1e-10": bool(error <= 1e-10)}
    return components, report


__all__ = [
    "ExperimentReport",
    "LacunaryBase",
    "calibrate_radius",
    "conjugate_exponent",
    "duality_pairing_check",
    "inclusion_demo",
    "job_rng",
    "lacunary_demo",
    "lacunary_terms",
    "pairing_terms",
    "riesz_char_check",
    "riesz_sum_we1q",
    "select_shift",
    "trivial_fs_decomposition",
]
