"""Conditional-expectation operator, L_p norms and the hypercontractivity parameter delta(D).

``delta(D)`` is the largest ``delta <= 1`` with

    ||T f||_q <= ||f||_p   for all f,   p = 2 - delta,  q = (2 - delta) / (1 - delta),

where ``(T f)(x) = E[f(y) | x]`` and norms are taken under the marginals. There
is no closed form in general, so it is bracketed numerically: a refutation is a
re-checkable witness function, while "holds" only means the search found none.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .model import JointDistribution

VIOLATION_MARGIN = 1e-12
MAX_TENSOR_SIZE = 4096
MAX_GRID_BITS = 12


@dataclass(frozen=True, eq=False)
class WeightedFunction:
    """Real function on a finite set together with the measure its norms use."""

    values: np.ndarray
    measure: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        m = np.asarray(self.measure, dtype=float)
        if v.shape != m.shape or v.ndim != 1:
            raise ValueError(f"values {v.shape} and measure {m.shape} must be equal-length vectors")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "measure", m)


def apply_operator(dist: JointDistribution, f: WeightedFunction) -> WeightedFunction:
    """``(T f)(x) = sum_y D(x, y) f(y) / D_X(x)``, a function on X under ``D_X``."""
    if f.values.shape[0] != dist.shape[1]:
        raise ValueError(f"function has {f.values.shape[0]} entries, Y has {dist.shape[1]}")
    return WeightedFunction(dist.transition @ f.values, dist.marginal_x)


def lp_norm(f: WeightedFunction, p: float) -> float:
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p!r}")
    a = np.abs(f.values)
    support = f.measure > 0
    if math.isinf(p):
        return float(a[support].max(initial=0.0))
    m = a.max(initial=0.0)
    if m == 0:
        return 0.0
    return float(m * (f.measure @ (a / m) ** p) ** (1.0 / p))


def exponents(delta: float) -> tuple[float, float]:
    """``(p, q) = (2 - delta, 2 + delta / (1 - delta))``; ``(1, inf)`` at ``delta = 1``."""
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta={delta!r} outside [0, 1]")
    if delta == 1.0:
        return 1.0, math.inf
    return 2.0 - delta, (2.0 - delta) / (1.0 - delta)


def _log_norms(h: np.ndarray, w: np.ndarray, p: float) -> np.ndarray:
    a = np.abs(h)
    m = a.max(axis=1)
    out = np.full(len(h), -np.inf)
    nz = m > 0
    if math.isinf(p):
        out[nz] = np.log(m[nz])
        return out
    r = a[nz] / m[nz, None]
    out[nz] = np.log(m[nz]) + np.log((r**p) @ w) / p
    return out


def _log_norm_grads(h: np.ndarray, w: np.ndarray, p: float) -> np.ndarray:
    a = np.abs(h)
    m = a.max(axis=1)
    m_safe = np.where(m > 0, m, 1.0)
    if math.isinf(p):
        g = np.zeros_like(h)
        idx = np.argmax(a, axis=1)
        rows = np.arange(len(h))
        g[rows, idx] = np.sign(h[rows, idx]) / m_safe
        return g
    r = a / m_safe[:, None]
    s = (r**p) @ w
    return w * r ** (p - 1) * np.sign(h) / (m_safe * np.where(s > 0, s, 1.0))[:, None]


def log_ratio(dist: JointDistribution, fs: np.ndarray, delta: float) -> np.ndarray:
    """``log ||T f||_q - log ||f||_p`` for each row of ``fs``; positive means violation."""
    p, q = exponents(delta)
    fs = np.atleast_2d(fs)
    return _ratio(_log_norms(fs @ dist.transition.T, dist.marginal_x, q), _log_norms(fs, dist.marginal_y, p))


def _ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    # f = 0 gives -inf - -inf; treat as no violation
    with np.errstate(invalid="ignore"):
        r = num - den
    return np.where(np.isnan(r), -np.inf, r)


@dataclass(frozen=True)
class ContractionCheck:
    ok: bool
    counterexample: np.ndarray | None = None

    def __bool__(self):
        return self.ok


def contraction_check(dist: JointDistribution, p: float, trials: int = 1000, seed=None) -> ContractionCheck:
    """Sample random ``f`` and confirm ``||T f||_p <= ||f||_p`` up to 1e-12."""
    rng = np.random.default_rng(seed)
    fs = rng.standard_normal((trials, dist.shape[1]))
    fs[: trials // 4] = np.abs(fs[: trials // 4])
    lhs = np.exp(_log_norms(fs @ dist.transition.T, dist.marginal_x, p))
    rhs = np.exp(_log_norms(fs, dist.marginal_y, p))
    bad = np.flatnonzero(lhs > rhs + 1e-12)
    if len(bad):
        return ContractionCheck(False, fs[bad[0]])
    return ContractionCheck(True)


@dataclass(frozen=True)
class OptimizerConfig:
    """Multi-start projected gradient ascent of the log norm ratio on the L2 sphere."""

    starts: int = 64
    max_iter: int = 500
    grad_tol: float = 1e-10
    seed: int = 0
    margin: float = VIOLATION_MARGIN


def indicator_grid(dist: JointDistribution, rng: np.random.Generator) -> np.ndarray:
    """Indicators ``I_S``, centered ``I_S - nu(S)`` and signed ``2 I_S - 1`` of subsets of Y.

    All nonempty proper subsets when ``|Y| <= 12``; otherwise singletons plus
    a random sample.
    """
    k = dist.shape[1]
    if k <= MAX_GRID_BITS:
        masks = np.array([s for s in product((0.0, 1.0), repeat=k)])[1:-1]
    else:
        masks = np.vstack([np.eye(k), (rng.random((512, k)) < 0.5).astype(float)])
    if len(masks) == 0:
        return np.zeros((0, k))
    centered = masks - (masks @ dist.marginal_y)[:, None]
    return np.vstack([masks, centered, 2 * masks - 1])


def _starts(dist: JointDistribution, n_starts: int, rng: np.random.Generator) -> np.ndarray:
    k = dist.shape[1]
    n_ind = min(n_starts // 4, 2 * k)
    n_const = (n_starts - n_ind) // 2
    n_gauss = n_starts - n_ind - n_const
    ind = np.vstack([np.eye(k), np.eye(k) - dist.marginal_y])[:n_ind]
    scales = np.array([0.05, 0.2, 0.5, 1.0])[np.arange(n_const) % 4][:, None]
    const = 1.0 + scales * rng.standard_normal((n_const, k))
    gauss = rng.standard_normal((n_gauss, k))
    return np.vstack([ind, const, gauss])


def _normalize(fs: np.ndarray, w: np.ndarray) -> np.ndarray:
    norms = np.sqrt((fs**2) @ w)
    return fs / np.where(norms > 0, norms, 1.0)[:, None]


def _ascend(dist: JointDistribution, fs: np.ndarray, delta: float, cfg: OptimizerConfig):
    """Batched gradient ascent; stops early once any start shows a violation."""
    p, q = exponents(delta)
    T = dist.transition
    mu, nu = dist.marginal_x, dist.marginal_y

    def value(f):
        return _ratio(_log_norms(f @ T.T, mu, q), _log_norms(f, nu, p))

    def grad(f):
        return _log_norm_grads(f @ T.T, mu, q) @ T - _log_norm_grads(f, nu, p)

    fs = _normalize(fs, nu)
    val = value(fs)
    step = np.ones(len(fs))
    active = np.ones(len(fs), dtype=bool)
    for _ in range(cfg.max_iter):
        if (val > cfg.margin).any():
            break
        g = grad(fs)
        gn = np.sqrt((g**2).sum(axis=1))
        active &= (gn > cfg.grad_tol) & (step > 1e-14)
        if not active.any():
            break
        cand = _normalize(fs + step[:, None] * g, nu)
        cval = value(cand)
        ok = active & (cval >= val + 1e-4 * step * gn**2)
        fs[ok] = cand[ok]
        val[ok] = cval[ok]
        step = np.where(ok, np.minimum(step * 2.0, 1e6), np.where(active, step * 0.5, step))
    return fs, val


@dataclass(frozen=True)
class HoldsResult:
    """Outcome of the search at one ``delta``; ``witness`` is set iff refuted."""

    delta: float
    holds: bool
    witness: np.ndarray | None = None
    log_ratio: float = -math.inf

    def __bool__(self):
        return self.holds


def holds_at_delta(dist: JointDistribution, delta: float, config: OptimizerConfig | None = None) -> HoldsResult:
    cfg = config or OptimizerConfig()
    exponents(delta)
    rng = np.random.default_rng(cfg.seed)
    grid = indicator_grid(dist, rng)
    if len(grid):
        vals = log_ratio(dist, grid, delta)
        i = int(np.argmax(vals))
        if vals[i] > cfg.margin:
            return HoldsResult(delta, False, grid[i], float(vals[i]))
    fs, vals = _ascend(dist, _starts(dist, cfg.starts, rng), delta, cfg)
    i = int(np.argmax(vals))
    best = float(vals[i])
    if best > cfg.margin:
        return HoldsResult(delta, False, fs[i], best)
    return HoldsResult(delta, True, None, best)


@dataclass(frozen=True)
class DeltaEstimate:
    """Bracket ``lower <= delta(D) <= upper`` as found by the search.

    ``upper`` is certified whenever ``witness`` is present: the witness violates
    the defining inequality at ``upper`` (and hence at every larger delta).
    ``lower`` is the largest delta at which no violation was found.
    """

    lower: float
    upper: float
    witness: np.ndarray | None
    tolerance: float
    evaluations: list = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self):
        if not 0.0 <= self.lower <= self.upper <= 1.0:
            raise ValueError(f"invalid bracket [{self.lower}, {self.upper}]")


def delta_estimate(dist: JointDistribution, tol: float = 1e-3, config: OptimizerConfig | None = None) -> DeltaEstimate:
    """Bisection on delta; valid because the defining inequality is monotone in delta."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    cfg = config or OptimizerConfig()
    top = holds_at_delta(dist, 1.0, cfg)
    evals = [top]
    if top.holds:
        return DeltaEstimate(1.0, 1.0, None, tol, evals)
    lower, upper, witness = 0.0, 1.0, top.witness
    while upper - lower > tol:
        mid = 0.5 * (lower + upper)
        res = holds_at_delta(dist, mid, cfg)
        evals.append(res)
        if res.holds:
            lower = mid
        else:
            upper, witness = mid, res.witness
    return DeltaEstimate(lower, upper, witness, tol, evals)


def _check_unit(name, v):
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"{name}={v!r} outside [0, 1]")


def indicator_deviation_norm(mu: float, delta: float) -> float:
    """Closed form of ``||I_A - mu||_{2 - delta}`` for a set of measure ``mu``."""
    _check_unit("mu", mu)
    _check_unit("delta", delta)
    r = 2.0 - delta
    return (mu * (1 - mu) ** r + mu**r * (1 - mu)) ** (1.0 / r)


def rect_bound(mu: float, nu: float, delta: float) -> float:
    """Upper bound on ``Pr[x in A, y in B]`` for sets of measure at most ``mu``, ``nu``."""
    _check_unit("nu", nu)
    return mu * nu + indicator_deviation_norm(mu, delta) * indicator_deviation_norm(nu, delta)


def rect_bound_asymptotic(mu: float, nu: float, delta: float) -> float:
    """Leading term ``(mu nu)^(1 / (2 - delta))`` of the bound for vanishing mu, nu."""
    _check_unit("mu", mu)
    _check_unit("nu", nu)
    _check_unit("delta", delta)
    return (mu * nu) ** (1.0 / (2.0 - delta))


def gk_deficit(logx: float, logy: float, delta: float, n: int, a: float, b: float, c: float) -> float:
    """``|a| + |b| + (2 - delta)|c| - (log|X| + log|Y|) n``.

    Negative values mean the message lengths violate the leading-order
    common-information inequality for a uniform-marginal source.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    _check_unit("delta", delta)
    return a + b + (2.0 - delta) * c - (logx + logy) * n


def tensor(d1: JointDistribution, d2: JointDistribution, max_size: int = MAX_TENSOR_SIZE) -> JointDistribution:
    """Product distribution on ``(X1 x X2) x (Y1 x Y2)``; pair ``(i, j)`` has index ``i * |2| + j``."""
    rows = d1.shape[0] * d2.shape[0]
    cols = d1.shape[1] * d2.shape[1]
    if rows > max_size or cols > max_size:
        raise MemoryError(f"tensor product would be {rows}x{cols}, limit {max_size}")
    p = np.kron(d1.probs, d2.probs)
    return JointDistribution(p / p.sum())
