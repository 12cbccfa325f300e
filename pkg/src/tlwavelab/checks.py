"""Invariant suite shared by ``tlwavelab verify`` and ``tlwavelab wavelet build``."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .grid import (
    GridSpec,
    analyze,
    father_projection,
    father_summability_check,
    random_band_limited,
    synthesize,
    wavelet_function,
    wavelet_spectrum,
)
from .meyer import (
    INV_SQRT_2PI,
    PHI_FLAT_EDGE,
    PHI_ZERO_EDGE,
    PSI_HIGH_EDGE,
    PSI_LOW_EDGE,
    MeyerSystem,
    default_system,
    mother_labels,
    wavelet_at_zero_bound,
)
from .norms import l1_norm
from .riesz import adjacent_scale_controls, near_diagonal_gram, riesz_apply, square_sum_error


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    threshold: float | None
    detail: str = ""
    relation: str = "<="

    @property
    def summary(self):
        """Readable form such as ``partition identity max err < 1e-9``."""
        words = self.name.replace("_", " ")
        if self.threshold is None:
            return words
        if self.threshold == 0 and self.relation == "<=":
            return f"{words} == 0"
        op = "<" if self.relation == "<=" else ">"
        return f"{words} {op} {_short(self.threshold)}"

    def to_dict(self):
        return {
            "name": self.name,
            "summary": self.summary,
            "passed": self.passed,
            "value": self.value,
            "threshold": self.threshold,
            "detail": self.detail,
        }


def _short(x):
    if x == 0 or 1e-3 <= abs(x) < 1e4:
        return f"{x:g}"
    mantissa, exponent = f"{x:e}".split("e")
    mantissa = mantissa.rstrip("0").rstrip(".")
    return f"{mantissa}e{int(exponent)}"


def _le(name, value, threshold, detail=""):
    return CheckResult(name, bool(value <= threshold), float(value) + 0.0, threshold, detail, "<=")


def _ge(name, value, threshold, detail=""):
    return CheckResult(name, bool(value >= threshold), float(value) + 0.0, threshold, detail, ">=")


# -- profile checks ------------------------------------------------------------------


def partition_identity_error(system, samples=10_000):
    xi = np.linspace(0.0, 2.0 * np.pi, samples)
    err = system.scaling_spectrum(xi) ** 2 + system.scaling_spectrum(xi - 2.0 * np.pi) ** 2 - 1.0 / (2.0 * np.pi)
    return float(np.abs(err).max())


def profile_checks(system):
    xi = np.linspace(-3.0 * np.pi, 3.0 * np.pi, 20_001)
    phi = system.scaling_spectrum(xi)
    flat = np.abs(xi) <= PHI_FLAT_EDGE
    outside = np.abs(xi) >= PHI_ZERO_EDGE
    psi = system.wavelet_spectrum(xi)
    psi_zero = (np.abs(xi) <= PSI_LOW_EDGE - 1e-12) | (np.abs(xi) >= PSI_HIGH_EDGE + 1e-12)
    u = np.linspace(0.0, 1.0, 4001)
    g = system.bump(u)
    zero = wavelet_at_zero_bound(system)
    return [
        _le("partition_identity_max_err", partition_identity_error(system), 1e-9, "10^4 samples on [0, 2pi]"),
        _le("phi_even_max_err", float(np.abs(phi - system.scaling_spectrum(-xi)).max()), 0.0),
        _le("phi_range_violation", float(max(-phi.min(), phi.max() - INV_SQRT_2PI, 0.0)), 1e-15),
        _le("phi_flat_part_max_err", float(np.abs(phi[flat] - INV_SQRT_2PI).max()), 1e-15),
        _le("phi_outside_support_max", float(np.abs(phi[outside]).max()), 0.0),
        _le("psi_hat_outside_annulus_max", float(np.abs(psi[psi_zero]).max()), 0.0),
        _le("bump_monotonicity_violation", float(max(0.0, -np.diff(g).min())), 2.0 * system.quad_tol),
        _le("bump_symmetry_max_err", float(np.abs(g + g[::-1] - 1.0).max()), 2.0 * max(system.quad_tol, 1e-15)),
        _ge(
            "wavelet_at_zero_magnitude_margin",
            zero.margin,
            -1e-6,
            f"psi(0)={zero.psi0:.12f}, bound={zero.bound:.12f}; sign of psi(0) is "
            f"{'positive' if zero.psi0 > 0 else 'negative'}",
        ),
    ]


# -- grid checks ---------------------------------------------------------------------


def parseval_and_round_trip(spec, system, rng, count):
    parseval, roundtrip = 0.0, 0.0
    for _ in range(count):
        f = random_band_limited(spec, rng)
        c = analyze(f, system)
        energy = f.norm2() ** 2
        parseval = max(parseval, abs(c.energy() - energy) / energy)
        g = synthesize(c, system)
        roundtrip = max(roundtrip, float(np.linalg.norm(g.samples - f.samples) / np.linalg.norm(f.samples)))
    return parseval, roundtrip


def random_index(spec, rng):
    labels = mother_labels(spec.dim)
    j = int(rng.integers(spec.j_lo, spec.j_hi + 1))
    label = labels[rng.integers(len(labels))]
    k = tuple(int(v) for v in rng.integers(0, spec.translations(j), size=spec.dim))
    return label, j, k


def gram_error(spec, system, rng, pairs):
    """Largest ``|<psi_i, psi_i'> - delta|`` over random pairs (a third of them diagonal)."""
    cache = {}

    def spectrum(index):
        if index not in cache:
            cache[index] = wavelet_spectrum(spec, index[0], index[1], index[2], system)
        return cache[index]

    worst = 0.0
    volume = spec.period**spec.dim
    for n in range(pairs):
        a = random_index(spec, rng)
        if n % 3 == 0:
            b = a
        elif n % 3 == 1:
            # same scale, neighbouring translation: the most overlapping case
            k = tuple((v + int(rng.integers(-2, 3))) % spec.translations(a[1]) for v in a[2])
            b = (a[0], a[1], k)
        else:
            b = random_index(spec, rng)
        inner = np.vdot(spectrum(b), spectrum(a)) / volume
        worst = max(worst, abs(inner - (1.0 if a == b else 0.0)))
        if len(cache) > 64:
            cache.clear()
    return float(worst)


def far_scale_pairs(spec):
    return [(j, jt) for j in spec.scales for jt in spec.scales if abs(j - jt) >= 2]


def near_diagonality(spec, system, rng, samples):
    pairs = far_scale_pairs(spec)
    if not pairs:
        return 0.0
    worst = 0.0
    per_pair = max(1, samples // len(pairs))
    for j, jt in pairs:
        worst = max(worst, near_diagonal_gram(spec, j, jt, per_pair, rng, system))
    return worst


def anti_self_adjoint_error(spec, rng, count):
    worst = 0.0
    for _ in range(count):
        f = random_band_limited(spec, rng)
        g = random_band_limited(spec, rng)
        for ell in range(1, spec.dim + 1):
            lhs = riesz_apply(ell, f).inner(g)
            rhs = -f.inner(riesz_apply(ell, g))
            worst = max(worst, abs(lhs - rhs) / (f.norm2() * g.norm2()))
    return worst


def father_lattice_checks(system1, dim):
    xs = np.linspace(0.0, 1.0, 9)
    base64 = father_summability_check(xs, 64, system1)
    base128 = father_summability_check(xs, 128, system1)
    results = [
        _le("father_lattice_sum_truncation_change", abs(base128 - base64), 1e-6, f"sum at radius 64: {base64:.10f}"),
    ]
    if dim == 2:
        pts = np.array([[x, y] for x in (0.0, 0.5) for y in (0.0, 0.25)])
        double = father_summability_check(pts, 32, system1)
        product = max(
            father_summability_check(np.array([p[0]]), 32, system1)
            * father_summability_check(np.array([p[1]]), 32, system1)
            for p in pts
        )
        results.append(_le("father_lattice_sum_product_err", abs(double - product) / product, 1e-12))
    return results


def father_projection_checks(spec, system, rng):
    j0 = spec.j_lo
    label = (0,) * spec.dim
    inside = wavelet_function(spec, label, j0, (1,) * spec.dim, system)
    idem = father_projection(inside, j0, system)
    err = float(np.linalg.norm(idem.samples - inside.samples) / np.linalg.norm(inside.samples))
    ratios = []
    # localised inputs are the hard case for an L1 bound
    fine = max(j0, spec.j_hi - 1)
    for _ in range(5):
        k = tuple(int(v) for v in rng.integers(0, spec.translations(fine), size=spec.dim))
        f = wavelet_function(spec, label, fine, k, system)
        ratios.append(l1_norm(father_projection(f, j0, system)) / l1_norm(f))
    ratio = max(ratios)
    return [
        _le("father_projection_idempotence_err", err, 1e-9),
        _le("father_projection_l1_ratio", ratio, 10.0, "empirical constant in the L1 bound"),
    ]


def grid_checks(spec, system, seed=0, jobs=1, sizes=None):
    """Run the grid and operator invariants; results are in a fixed order."""
    sizes = {"parseval": 10, "gram": 200, "diag": 100, "controls": 20, "square": 20, "adjoint": 5} | (sizes or {})
    system1 = system.with_dim(1)

    def rng(name):
        from .experiments import job_rng

        return job_rng(seed, f"verify/{name}")

    def parseval_job():
        p, r = parseval_and_round_trip(spec, system, rng("parseval"), sizes["parseval"])
        return [_le("parseval_rel_err", p, 1e-9), _le("round_trip_rel_err", r, 1e-9)]

    def gram_job():
        return [_le("gram_orthonormality_err", gram_error(spec, system, rng("gram"), sizes["gram"]), 1e-8)]

    def diag_job():
        worst = near_diagonality(spec, system, rng("diag"), sizes["diag"])
        j = max(spec.j_lo, min(0, spec.j_hi - 1))
        controls = adjacent_scale_controls(spec, j, sizes["controls"], rng("controls"), system)
        return [
            _le("riesz_far_scale_gram_max", worst, 1e-12, "pairs with |j - j~| >= 2, all l <= D"),
            _ge("riesz_adjacent_scale_control_min", float(controls.min()), 1e-6, f"scales {j}, {j + 1}"),
        ]

    def square_job():
        r = rng("square")
        worst = max(square_sum_error(random_band_limited(spec, r)) for _ in range(sizes["square"]))
        return [
            _le("riesz_square_sum_rel_err", worst, 1e-10),
            _le("riesz_anti_self_adjoint_err", anti_self_adjoint_error(spec, r, sizes["adjoint"]), 1e-10),
        ]

    def father_job():
        return father_lattice_checks(system1, spec.dim) + father_projection_checks(spec, system, rng("father"))

    jobs_list = [parseval_job, gram_job, diag_job, square_job, father_job]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(lambda fn: fn(), jobs_list))
    else:
        parts = [fn() for fn in jobs_list]
    return [item for part in parts for item in part]


def verify_suite(spec=None, quad_tol=None, seed=0, jobs=1, sizes=None):
    spec = GridSpec.default(1) if spec is None else spec
    if quad_tol is None:
        system = default_system(spec.dim)
    else:
        system = MeyerSystem(dim=spec.dim, quad_tol=quad_tol)
    return profile_checks(system.with_dim(1)) + grid_checks(spec, system, seed, jobs, sizes)


def all_passed(results):
    return all(r.passed for r in results)


def finite_or_none(x):
    return x if isinstance(x, (int, float)) and math.isfinite(x) else None
