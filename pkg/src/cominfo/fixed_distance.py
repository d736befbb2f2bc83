"""The Hamming fixed-distance graph G_{n,d} and the binary symmetric coupling D_{n,eps}.

Curve functions (``lambda_lower``, ``lambda_upper``, ``profile_region``) are the
n -> infinity limiting expressions with all o(1) terms dropped. Anything that
materializes a graph works with an exact integer distance ``d`` instead of a
real ``eps``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np

from .model import BipartiteGraph, JointDistribution, Rectangle, popcount

MAX_BITS = 22
MAX_EDGES = 1 << 24
TABLE_EPS = (0.1, 0.2, 0.3, 0.4)


def binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"binary_entropy: p={p!r} outside [0, 1]")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def entropy_inverse(h: float, branch: str = "lower", tol: float = 0.0) -> float:
    """Solve ``H(p) = h`` on ``[0, 1/2]`` (``branch="lower"``) or ``[1/2, 1]``.

    Bisects until the bracket is at most ``tol`` wide, or (the default) until
    it stops shrinking in double precision.
    """
    if not 0.0 <= h <= 1.0:
        raise ValueError(f"entropy_inverse: h={h!r} outside [0, 1]")
    if branch not in ("lower", "upper"):
        raise ValueError("branch must be 'lower' or 'upper'")
    lo, hi = 0.0, 0.5
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        if binary_entropy(mid) < h:
            lo = mid
        else:
            hi = mid
    p = 0.5 * (lo + hi)
    return p if branch == "lower" else 1.0 - p


@dataclass(frozen=True)
class FixedDistanceSpec:
    """``n``-bit strings joined when their Hamming distance is exactly ``d``."""

    n: int
    d: int

    def __post_init__(self):
        if self.n < 1 or not 0 < self.d <= self.n:
            raise ValueError(f"need n >= 1 and 0 < d <= n, got n={self.n}, d={self.d}")

    @property
    def eps(self) -> float:
        return self.d / self.n

    @property
    def num_edges(self) -> int:
        return (1 << self.n) * math.comb(self.n, self.d)


def weight_masks(n: int, w: int) -> np.ndarray:
    """All ``n``-bit integers of Hamming weight ``w``, increasing."""
    if not 0 <= w <= n:
        return np.zeros(0, dtype=np.int64)
    masks = [sum(1 << i for i in c) for c in combinations(range(n), w)]
    return np.sort(np.asarray(masks, dtype=np.int64))


def build_fixed_graph(spec: FixedDistanceSpec) -> BipartiteGraph:
    if spec.n > MAX_BITS or spec.num_edges > MAX_EDGES:
        raise MemoryError(
            f"G(n={spec.n}, d={spec.d}) has {spec.num_edges} edges; materialization limit is "
            f"n <= {MAX_BITS} and {MAX_EDGES} edges"
        )
    size = 1 << spec.n
    xs = np.arange(size, dtype=np.int64)
    ys = np.sort(xs[:, None] ^ weight_masks(spec.n, spec.d)[None, :], axis=1)
    edges = np.stack([np.repeat(xs, ys.shape[1]), ys.ravel()], axis=1)
    return BipartiteGraph(size, size, edges)


@dataclass(frozen=True)
class SphereRectangle:
    rectangle: Rectangle
    count: int
    brute_count: int | None = None


def sphere_count(n: int, d: int, w: int) -> int:
    """Edges of G_{n,d} inside ``C x C``, ``C`` = weight-``w`` strings."""
    if d % 2:
        raise ValueError(f"sphere rectangle needs even distance, got d={d}")
    h = d // 2
    return math.comb(n, w) * math.comb(w, h) * math.comb(n - w, h)


def sphere_brute_count(n: int, d: int, w: int) -> int:
    c = weight_masks(n, w)
    if len(c) ** 2 > 1 << 27:
        raise MemoryError("sphere too large for brute-force counting")
    if not len(c):
        return 0
    return int(np.count_nonzero(popcount(c[:, None] ^ c[None, :]) == d))


def sphere_rectangle(spec: FixedDistanceSpec, w: int, brute: bool | None = None) -> SphereRectangle:
    """``C x C`` with ``C`` the weight-``w`` strings, plus its closed-form edge count.

    The brute-force count is attached when ``brute`` is true, or by default
    whenever ``n <= 14``.
    """
    if not 0 <= w <= spec.n:
        raise ValueError(f"weight {w} outside [0, {spec.n}]")
    count = sphere_count(spec.n, spec.d, w)
    c = weight_masks(spec.n, w)
    if brute is None:
        brute = spec.n <= 14
    bc = sphere_brute_count(spec.n, spec.d, w) if brute else None
    return SphereRectangle(Rectangle(tuple(c), tuple(c)), count, bc)


def bsc_distribution(n: int, eps: float) -> JointDistribution:
    """D_{n,eps}: ``x`` uniform on n bits, each bit of ``y`` flipped independently w.p. ``eps``."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError("eps must lie in [0, 1]")
    if n > 12:
        raise MemoryError("D_{n,eps} is materialized only for n <= 12")
    xs = np.arange(1 << n)
    dist = popcount(xs[:, None] ^ xs[None, :])
    with np.errstate(divide="ignore", invalid="ignore"):
        probs = np.where(dist == 0, 1.0, eps**dist) * np.where(dist == n, 1.0, (1 - eps) ** (n - dist))
    return JointDistribution(probs / (1 << n))


def sample_bsc_pair(n: int, eps: float, seed=None, count: int | None = None):
    """Draw ``(x, y)`` bit arrays from D_{n,eps}; shape ``(n,)`` or ``(count, n)``."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError("eps must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    shape = (n,) if count is None else (count, n)
    x = rng.integers(0, 2, size=shape, dtype=np.uint8)
    flips = (rng.random(shape) < eps).astype(np.uint8)
    return x, x ^ flips


def _fold(eps: float) -> float:
    # G_{n,eps} and G_{n,1-eps} are isomorphic via y -> complement(y)
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps={eps!r} outside (0, 1)")
    return min(eps, 1.0 - eps)


def seam(eps: float) -> float:
    """``H(1 - sqrt(1 - eps))``: where the lower bound switches formula."""
    return binary_entropy(1.0 - math.sqrt(1.0 - _fold(eps)))


def _sphere_exponent(eps: float, alpha: float) -> float:
    return alpha * binary_entropy(min(1.0, eps / (2 * alpha))) + (1 - alpha) * binary_entropy(
        min(1.0, eps / (2 * (1 - alpha)))
    )


def lambda_lower_cases(eps: float, tau: float) -> tuple[float, float]:
    """Both branches of the Lambda lower bound, regardless of which one applies.

    Returns ``(subsampled, sphere)``; ``sphere`` is ``nan`` when the sphere
    construction is infeasible at this ``tau`` (``eps / 2 alpha > 1``).
    """
    e = _fold(eps)
    if not 0.0 < tau < 1.0:
        raise ValueError(f"tau={tau!r} outside (0, 1)")
    h = binary_entropy(e)
    subsampled = -(1 + h - 2 * tau)
    alpha = entropy_inverse(tau, "lower")
    if e / (2 * alpha) > 1.0:
        return subsampled, math.nan
    return subsampled, -(1 + h - tau - _sphere_exponent(e, alpha))


def lambda_lower(eps: float, tau: float) -> float:
    subsampled, sphere = lambda_lower_cases(eps, tau)
    if tau < seam(eps):
        return subsampled
    if math.isnan(sphere):
        raise ArithmeticError("sphere branch infeasible above the seam")
    return sphere


def lambda_upper(eps: float, tau: float) -> float:
    e = _fold(eps)
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau={tau!r} outside [0, 1]")
    return -(1 - tau) / (1 - e)


@dataclass(frozen=True)
class ProfileRegion:
    """Per-``tau`` kappa thresholds for the triple ``(tau n, tau n, kappa n)``.

    Below ``kappa_excluded_below`` the triple is outside the profile; above
    ``kappa_included_above`` it is inside.
    """

    tau: float
    kappa_excluded_below: float
    kappa_included_above: float
    main_exclusion: float
    trivial_exclusion_sides: float
    trivial_exclusion_edges: float
    constructive_inclusion: float
    trivial_inclusion_min: float
    trivial_inclusion_all: float


def profile_region(eps: float, tau: float) -> ProfileRegion:
    h = binary_entropy(_fold(eps))
    main = -lambda_upper(eps, tau)
    sides = 1 - tau
    edges = 1 + h - 2 * tau
    constructive = -lambda_lower(eps, tau)
    incl_min = 1 + h - tau
    incl_all = 2 - 2 * tau
    return ProfileRegion(
        tau=tau,
        kappa_excluded_below=max(main, sides, edges),
        kappa_included_above=min(constructive, incl_min, incl_all),
        main_exclusion=main,
        trivial_exclusion_sides=sides,
        trivial_exclusion_edges=edges,
        constructive_inclusion=constructive,
        trivial_inclusion_min=incl_min,
        trivial_inclusion_all=incl_all,
    )


@dataclass(frozen=True)
class BoundCurve:
    parameter: str
    grid: tuple[float, ...]
    values: tuple[float, ...]
    tag: str

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ValueError("grid must be strictly increasing")
        if len(self.grid) != len(self.values):
            raise ValueError("grid and values differ in length")


CURVE_COLUMNS = (
    ("trivial_exclusion_sides", "trivial-lower"),
    ("trivial_exclusion_edges", "trivial-lower"),
    ("main_exclusion", "main-upper"),
    ("constructive_inclusion", "main-lower"),
    ("trivial_inclusion_min", "trivial-upper"),
    ("trivial_inclusion_all", "trivial-upper"),
)


def profile_curves(eps: float, grid) -> list[BoundCurve]:
    grid = tuple(float(t) for t in grid)
    regions = [profile_region(eps, t) for t in grid]
    return [
        BoundCurve("tau", grid, tuple(getattr(r, col) for r in regions), tag) for col, tag in CURVE_COLUMNS
    ]


def parse_grid(text: str) -> np.ndarray:
    """``"A:B:STEP"`` -> points ``A, A+STEP, ...`` up to and including ``B``."""
    a, b, step = (float(v) for v in text.split(":"))
    if step <= 0 or b < a:
        raise ValueError(f"bad grid {text!r}")
    k = int(math.floor((b - a) / step + 1e-9))
    return a + step * np.arange(k + 1)


def eps_table(eps_values=TABLE_EPS) -> list[dict]:
    return [{"eps": e, "inv_one_minus_eps": 1.0 / (1.0 - e), "c_eps": "unavailable"} for e in eps_values]


def emit_curves(eps: float, grid, out) -> tuple[Path, Path]:
    """Write the profile-bound curves to ``out`` and the 1/(1-eps) table beside it.

    Returns the two paths; the table goes to ``<stem>_table.csv``.
    """
    out = Path(out)
    grid = np.asarray(grid, dtype=float)
    grid = grid[(grid > 0) & (grid < 1)]
    curves = profile_curves(eps, grid)
    with out.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["tau"] + [col for col, _ in CURVE_COLUMNS])
        for i, t in enumerate(grid):
            w.writerow([f"{t:.12g}"] + [f"{c.values[i]:.12g}" for c in curves])
    table = out.with_name(out.stem + "_table.csv")
    with table.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=["eps", "inv_one_minus_eps", "c_eps"])
        w.writeheader()
        for row in eps_table():
            w.writerow({**row, "inv_one_minus_eps": f"{row['inv_one_minus_eps']:.12g}"})
    return out, table


def edge_probability(spec: FixedDistanceSpec, eps: float | None = None) -> float:
    """D_{n,eps}-mass of a single edge of G_{n,d}."""
    e = spec.eps if eps is None else eps
    return 2.0 ** (-spec.n) * e**spec.d * (1 - e) ** (spec.n - spec.d)


def hypercontractive_rect_upper(spec: FixedDistanceSpec, a_cap: int, b_cap: int) -> int:
    """Upper bound on edges of G_{n,d} in any ``a_cap x b_cap`` rectangle.

    Every edge carries the same D_{n,d/n} mass, so dividing the rectangle-mass
    bound (with ``delta(D_{n,eps}) = 1 - |1 - 2 eps|``) by that mass bounds the
    edge count. Also capped by the trivial ``a_cap * C(n, d)`` and ``a_cap * b_cap``.
    """
    from .hypercontractivity import rect_bound

    size = 1 << spec.n
    a_cap, b_cap = min(a_cap, size), min(b_cap, size)
    delta = 1.0 - abs(1.0 - 2.0 * spec.eps)
    mass = rect_bound(a_cap / size, b_cap / size, delta)
    hc = math.floor(mass / edge_probability(spec) * (1 + 1e-12))
    deg = math.comb(spec.n, spec.d)
    return int(min(hc, min(a_cap, b_cap) * deg, a_cap * b_cap))
