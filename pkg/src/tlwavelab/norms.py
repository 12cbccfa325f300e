"""Norms and functionals computed from wavelet coefficients and grid samples.

Coefficients are L2-normalised, so the cube weights read

    F01q:    integral of ( sum [2^{jD/2} |c| chi_Q]^q )^{1/q}
    F0infq:  sup_Q ( |Q|^{-1} sum_{Q_{j,k} in Q} 2^{jD(q/2-1)} |c|^q )^{1/q}

with ``Q_{j,k}`` the dyadic cube of side ``2^{-j}`` at ``2^{-j} k`` on the
torus.  Both are evaluated exactly on the finest dyadic mesh carrying a
coefficient: the first by refining coarse-to-fine, the second by a single
fine-to-coarse pass over the ``2^D``-ary cube tree.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from .grid import _same_spec, analyze, project_Qj, random_field, synthesize
from .meyer import default_system


def _check_q(q, allow_inf=False):
    q = float(q)
    if not (1.0 < q < math.inf) and not (allow_inf and q == math.inf):
        raise ValueError(f"q={q} outside (1, inf)")
    return q


@dataclass(frozen=True)
class RatioStats:
    values: tuple = ()

    @classmethod
    def from_values(cls, values):
        return cls(tuple(float(v) for v in values))

    @property
    def count(self):
        return len(self.values)

    @property
    def min(self):
        return min(self.values) if self.values else math.nan

    @property
    def max(self):
        return max(self.values) if self.values else math.nan

    @property
    def mean(self):
        return float(np.mean(self.values)) if self.values else math.nan

    @property
    def spread(self):
        """``max / min``, the empirical equivalence constant."""
        return self.max / self.min if self.values and self.min > 0 else math.nan

    def summary(self):
        return {"count": self.count, "min": self.min, "max": self.max, "mean": self.mean, "spread": self.spread}


@dataclass
class NormReport:
    name: str
    value: float
    q: float | None = None
    window: tuple | None = None
    witness: dict = field(default_factory=dict)
    notes: str = ""

    NAMES = ("L1", "Linf", "F01q", "F0infq", "H1", "WE1q", "WEinfq", "Min1q", "Sum1q-upper")

    def __post_init__(self):
        if self.name not in self.NAMES:
            raise ValueError(f"unknown norm name {self.name}")
        if not self.value >= 0:
            raise ValueError("norm values are non-negative")

    def to_dict(self):
        out = asdict(self)
        out["window"] = list(self.window) if self.window is not None else None
        return out


# -- function-side norms ------------------------------------------------------------


def l1_norm(f):
    return float(np.abs(f.samples).sum() * f.spec.cell_volume)


def linf_norm(f):
    return float(np.abs(f.samples).max())


# -- coefficient-side norms ---------------------------------------------------------


def _scale_weights(c, power_of_abs, weight_exp):
    """Per-scale cube arrays ``sum_label 2^{j D weight_exp} |c|^power_of_abs``."""
    dim = c.spec.dim
    out = {}
    for (label, j), values in c.channels.items():
        term = np.abs(values) ** power_of_abs * 2.0 ** (j * dim * weight_exp)
        out[j] = out[j] + term if j in out else term
    return dict(sorted(out.items()))


def _refine(arr, times):
    for axis in range(arr.ndim):
        arr = np.repeat(arr, 2**times, axis=axis)
    return arr


def _coarsen(arr):
    """Sum each block of ``2^D`` children into its parent cube."""
    shape = []
    for n in arr.shape:
        shape += [n // 2, 2]
    return arr.reshape(shape).sum(axis=tuple(range(1, 2 * arr.ndim, 2)))


def f01q_norm(c, q):
    """Integral of the ``l^q``-in-scale square-type function over the torus."""
    q = _check_q(q)
    per_scale = _scale_weights(c, q, q / 2.0)
    if not per_scale:
        return 0.0
    acc, level = None, None
    for j, term in per_scale.items():
        acc = term if acc is None else _refine(acc, j - level) + term
        level = j
    cell = 2.0 ** (-level * c.spec.dim)
    return float(np.sum(acc ** (1.0 / q)) * cell)


class CarlesonValue(NamedTuple):
    value: float
    j: int
    k: tuple


def f0infq_functional(c, q, with_witness=False):
    """Supremum over dyadic cubes up to the whole torus of the Carleson-type average.

    Ties go to the coarsest cube, then the smallest translation.
    """
    q = _check_q(q)
    per_scale = _scale_weights(c, q, q / 2.0 - 1.0)
    dim = c.spec.dim
    top = -c.spec.period_exp
    if not per_scale:
        result = CarlesonValue(0.0, top, (0,) * dim)
        return result if with_witness else 0.0
    finest = max(per_scale)
    tree = per_scale[finest].copy()
    best = None
    for j in range(finest, top - 1, -1):
        if j != finest:
            tree = _coarsen(tree)
            if j in per_scale:
                tree = tree + per_scale[j]
        averages = tree * 2.0 ** (j * dim)
        flat = int(np.argmax(averages))
        peak = float(averages.flat[flat])
        if best is None or peak >= best[0]:
            best = (peak, j, tuple(int(i) for i in np.unravel_index(flat, averages.shape)))
    result = CarlesonValue(best[0] ** (1.0 / q), best[1], best[2])
    return result if with_witness else result.value


def h1_norm(c):
    """Wavelet square-function value (the ``q = 2`` case of ``f01q_norm``)."""
    return f01q_norm(c, 2.0)


# -- window norms ---------------------------------------------------------------


class WindowValue(NamedTuple):
    value: float
    s: int
    N: int
    t: int


class _SliceCache:
    """Memoised slice quantities keyed by the populated part of a scale range."""

    def __init__(self, c, system, coef_norm, func_norm):
        self.mother = c.mother()
        self.scales = self.mother.scales()
        self.system = system
        self.coef_norm = coef_norm
        self.func_norm = func_norm
        self._coef, self._func = {}, {}

    def _key(self, lo, hi):
        present = tuple(j for j in self.scales if lo <= j <= hi)
        return present

    def _slice(self, key):
        keep = set(key)
        return self.mother.select(lambda label, j: j in keep)

    def coef(self, lo, hi):
        key = self._key(lo, hi)
        if not key:
            return 0.0
        if key not in self._coef:
            self._coef[key] = self.coef_norm(self._slice(key))
        return self._coef[key]

    def func(self, lo, hi):
        key = self._key(lo, hi)
        if not key:
            return 0.0
        if key not in self._func:
            self._func[key] = self.func_norm(synthesize(self._slice(key), self.system))
        return self._func[key]


def window_ranges(spec):
    """All ``(s, N)`` enumerated by the window norms."""
    for s in range(spec.j_lo - 1, spec.j_hi + 2):
        for n in range(1, spec.j_hi - spec.j_lo + 3):
            yield s, n


def _check_pair(c, f, system):
    _same_spec(c.spec, f.spec)
    recon = synthesize(c, system).samples
    target = f.samples - f.samples.mean()
    scale = max(float(np.linalg.norm(target)), 1e-300)
    if np.linalg.norm(recon - target) > 1e-6 * scale + 1e-12:
        raise ValueError("coefficient field does not match the grid function")


def we1q_norm(c, f, q, system=None, check=True):
    """``sup_{s,N} min_t [ F01q(T1 slice) + L1(T2 slice) ]`` with its realising window.

    The min over ``t`` keeps the smallest ``t`` on ties; the sup keeps the
    first window in ``(s, N)`` lexicographic order.
    """
    q = _check_q(q)
    system = default_system(c.spec.dim) if system is None else system
    if check:
        _check_pair(c, f, system)
    cache = _SliceCache(c, system, lambda part: f01q_norm(part, q), l1_norm)
    best = WindowValue(0.0, c.spec.j_lo - 1, 1, 0)
    first = True
    for s, n in window_ranges(c.spec):
        inner = None
        for t in range(n + 2):
            upper = cache.coef(s - t + 1, s) if t > 0 else 0.0
            lower = cache.func(s - n, s - t) if t < n + 1 else 0.0
            value = upper + lower
            if inner is None or value < inner[0]:
                inner = (value, t)
        if first or inner[0] > best.value:
            best = WindowValue(inner[0], s, n, inner[1])
            first = False
    return best


def weinfq_norm(c, f, q, system=None, check=True):
    """``sup_{s,N} sup_t [ F0infq(T1 slice) + Linf(T2 slice) ]`` with its realising window."""
    q = _check_q(q)
    system = default_system(c.spec.dim) if system is None else system
    if check:
        _check_pair(c, f, system)
    cache = _SliceCache(c, system, lambda part: f0infq_functional(part, q), linf_norm)
    best = None
    for s, n in window_ranges(c.spec):
        for t in range(n + 2):
            upper = cache.coef(s - t + 1, s) if t > 0 else 0.0
            lower = cache.func(s - n, s - t) if t < n + 1 else 0.0
            value = upper + lower
            if best is None or value > best.value:
                best = WindowValue(value, s, n, t)
    return best


def min_1q(c, f, q):
    """``min(|f|_L1, |f|_F01q)``, the norm of the union space."""
    return min(l1_norm(f), f01q_norm(c, q))


class SplitBound(NamedTuple):
    value: float
    split: str
    cutoff: int | None


def sum_space_upper(c, f, q, system=None):
    """Upper bound for the ``L1 + F01q`` inf-convolution norm.

    Minimises over the two trivial splittings and every scale cutoff ``tau``
    sending the wavelet scales on one side of ``tau`` to the ``F01q`` part
    and the rest of ``f`` (scaling channel and mean included) to ``L1``.
    This is never claimed to be the infimum itself.
    """
    q = _check_q(q)
    system = default_system(c.spec.dim) if system is None else system
    candidates = [SplitBound(l1_norm(f), "all-L1", None), SplitBound(f01q_norm(c, q), "all-F01q", None)]
    for tau in c.mother().scales():
        for side in ("fine", "coarse"):
            if side == "fine":
                part = c.select(lambda label, j: any(label) and j >= tau)
            else:
                part = c.select(lambda label, j: not any(label) or j <= tau)
            rest = f - synthesize(part, system)
            candidates.append(SplitBound(l1_norm(rest) + f01q_norm(part, q), f"{side}-to-F01q", tau))
    return min(candidates, key=lambda b: b.value)


def qj_h1_ratio(spec, q, trials, rng, density=0.3, system=None):
    """Sampled ``H1(Q_j f) / WE1q(f)`` over random wavelet series and scales."""
    q = _check_q(q)
    if q < 2:
        raise ValueError("q must be at least 2")
    system = default_system(spec.dim) if system is None else system
    values = []
    for _ in range(trials):
        c = random_field(spec, rng, density)
        if c.is_empty:
            continue
        f = synthesize(c, system)
        denom = we1q_norm(c, f, q, system, check=False).value
        if denom <= 0:
            continue
        for j in c.scales():
            values.append(h1_norm(project_Qj(c, j)) / denom)
    return RatioStats.from_values(values)


def norm_report(which, c, f, q, system=None):
    """Evaluate one named norm as a ``NormReport``."""
    which = which.lower()
    if which == "l1":
        return NormReport("L1", l1_norm(f))
    if which == "linf":
        return NormReport("Linf", linf_norm(f))
    if which == "h1":
        return NormReport("H1", h1_norm(c), q=2.0)
    if which == "f01q":
        return NormReport("F01q", f01q_norm(c, q), q=q)
    if which == "f0infq":
        res = f0infq_functional(c, q, with_witness=True)
        return NormReport("F0infq", res.value, q=q, witness={"j": res.j, "k": list(res.k)})
    if which in ("we1q", "weinfq"):
        fn = we1q_norm if which == "we1q" else weinfq_norm
        res = fn(c, f, q, system)
        name = "WE1q" if which == "we1q" else "WEinfq"
        return NormReport(name, res.value, q=q, window=(res.s, res.N, res.t))
    if which == "min1q":
        return NormReport("Min1q", min_1q(c, f, q), q=q)
    if which == "sum1q":
        res = sum_space_upper(c, f, q, system)
        return NormReport(
            "Sum1q-upper",
            res.value,
            q=q,
            witness={"split": res.split, "cutoff": res.cutoff},
            notes="upper bound over scale-cutoff splittings, not the exact infimum",
        )
    raise ValueError(f"unknown norm {which!r}")


def analyze_and_report(which, f, q, system=None):
    c = analyze(f, system)
    return norm_report(which, c, f, q, system)


__all__ = [
    "CarlesonValue",
    "NormReport",
    "RatioStats",
    "SplitBound",
    "WindowValue",
    "analyze_and_report",
    "f01q_norm",
    "f0infq_functional",
    "h1_norm",
    "l1_norm",
    "linf_norm",
    "min_1q",
    "norm_report",
    "qj_h1_ratio",
    "sum_space_upper",
    "we1q_norm",
    "weinfq_norm",
    "window_ranges",
]
