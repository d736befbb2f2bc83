"""Acceptance criteria, one test each.

Every test appends a ``PASS``/``FAIL`` line to the session report (printed in
the terminal summary). Running this file directly prints the same lines
without pytest: ``python3 tests/test_acceptance.py``.
"""

import csv
import itertools
import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import block_degenerate, components_bfs, random_distribution, random_graph, random_support  # noqa: E402

from cominfo.covering import HypercubeSampler, codec_from_cover, min_cover_size, random_cover, verify_witness  # noqa: E402
from cominfo.fixed_distance import (  # noqa: E402
    FixedDistanceSpec,
    binary_entropy,
    bsc_distribution,
    build_fixed_graph,
    emit_curves,
    entropy_inverse,
    lambda_lower,
    lambda_upper,
    parse_grid,
    profile_region,
    seam,
    sphere_rectangle,
)
from cominfo.hypercontractivity import (  # noqa: E402
    WeightedFunction,
    delta_estimate,
    indicator_deviation_norm,
    lp_norm,
    rect_bound,
    tensor,
)
from cominfo.model import BipartiteGraph, ProfileTriple, degenerate_check  # noqa: E402
from cominfo.random_graphs import (  # noqa: E402
    DensityTarget,
    RandomMatrixSpec,
    chernoff_bound,
    degree_check,
    sample_matrix,
    scan_rectangle_density,
)
from cominfo.rectangles import max_rect_exact, profile_excluded  # noqa: E402

TOL = 1e-3


def _line(num, name, ok, detail):
    return f"[{'PASS' if ok else 'FAIL'}] {num:>3} {name}: {detail}"


# ---------------------------------------------------------------- criteria


def two_point_inequality():
    t0 = time.perf_counter()
    worst = math.inf
    ok = True
    for eps in np.round(np.arange(0.05, 0.46, 0.05), 2):
        up = delta_estimate(bsc_distribution(1, eps), TOL).upper
        worst = min(worst, up - (2 * eps - 2e-3))
        ok &= up >= 2 * eps - 2e-3
    up0 = delta_estimate(bsc_distribution(1, 0.0), TOL).upper
    lo_half = delta_estimate(bsc_distribution(1, 0.5), TOL).lower
    secs = time.perf_counter() - t0
    ok = ok and up0 <= 1e-3 and lo_half >= 1 - 1e-3 and secs < 60
    detail = f"min(upper - (2eps - 2e-3)) = {worst:.2e}; eps=0 upper {up0:.4g}; eps=0.5 lower {lo_half:.4g}; {secs:.1f}s"
    return ok, detail


def positivity_iff_connected():
    rng = np.random.default_rng(20)
    suite = []
    for k in range(50):
        shape = (3, 3) if k % 2 == 0 else (4, 4)
        suite.append(random_distribution(rng, shape, random_support(rng, shape, rng.uniform(0.35, 0.9))))
    for k in range(10):
        suite.append(block_degenerate(rng, (3, 3) if k % 2 == 0 else (4, 4)))
    wrong, n_deg = [], 0
    for i, d in enumerate(suite):
        degenerate = components_bfs(d.probs) >= 2
        assert degenerate == degenerate_check(d)
        est = delta_estimate(d, TOL)
        n_deg += degenerate
        good = (est.upper <= TOL and est.upper - est.lower <= TOL) if degenerate else est.lower > 0
        if not good:
            wrong.append((i, est.lower, est.upper))
    return not wrong, f"{len(suite) - n_deg} connected / {n_deg} degenerate, misclassified: {wrong or 'none'}"


def rectangle_bound_exhaustive():
    rng = np.random.default_rng(30)
    violations, checked, norm_err = 0, 0, 0.0
    for k in range(20):
        shape = tuple(rng.integers(2, 6, 2))
        support = random_support(rng, shape, 0.7) if k % 3 == 0 else None
        d = random_distribution(rng, shape, support)
        lower = delta_estimate(d, TOL).lower
        ax = np.array(list(itertools.product((0.0, 1.0), repeat=shape[0])))
        by = np.array(list(itertools.product((0.0, 1.0), repeat=shape[1])))
        mass = ax @ d.probs @ by.T
        # the full set has measure exactly 1; summing marginals can give 1 - 1e-16,
        # which the (1 - mu)^(1/(2 - delta)) term amplifies to ~1e-8
        mu = np.where(ax.all(axis=1), 1.0, ax @ d.marginal_x)
        nu = np.where(by.all(axis=1), 1.0, by @ d.marginal_y)
        for i, j in itertools.product(range(len(ax)), range(len(by))):
            m, n = min(mu[i], 1.0), min(nu[j], 1.0)
            checked += 1
            violations += mass[i, j] > rect_bound(m, n, lower) + 1e-9
        for i in range(len(ax)):
            for delta in (0.0, lower, 0.5, 1.0):
                f = WeightedFunction(ax[i] - mu[i], d.marginal_x)
                norm_err = max(norm_err, abs(lp_norm(f, 2 - delta) - indicator_deviation_norm(min(mu[i], 1.0), delta)))
    ok = violations == 0 and norm_err <= 1e-12
    return ok, f"{checked} rectangles, {violations} violations; max norm-formula error {norm_err:.1e}"


def tensorization():
    rng = np.random.default_rng(40)
    worst = math.inf
    for k in range(20):
        s1 = (2, 2) if k % 2 == 0 else (3, 3)
        s2 = (2, 2) if k % 4 < 2 else (3, 3)
        d1 = random_distribution(rng, s1)
        d2 = random_distribution(rng, s2)
        lo = min(delta_estimate(d1, TOL).lower, delta_estimate(d2, TOL).lower)
        up = delta_estimate(tensor(d1, d2), TOL).upper
        worst = min(worst, up - (lo - 2 * TOL))
    return worst >= 0, f"min(upper(tensor) - (min lower - 2 tol)) = {worst:.2e} over 20 pairs"


def sphere_counts_and_lambda_order():
    cases, mismatches = 0, 0
    for n in range(2, 15):
        for d in range(2, n + 1, 2):
            spec = FixedDistanceSpec(n, d)
            for w in range(n + 1):
                s = sphere_rectangle(spec, w, brute=True)
                cases += 1
                mismatches += s.count != s.brute_count
    bad = 0
    grid = [(e, t) for e in np.linspace(0.01, 0.99, 40) for t in np.linspace(0.02, 0.98, 25)]
    for e, t in grid:
        bad += lambda_lower(e, t) > lambda_upper(e, t)
    ok = mismatches == 0 and bad == 0
    return ok, f"{cases} sphere cases, {mismatches} mismatches; {len(grid)}-point grid, {bad} order violations"


def reference_column(tmp_dir):
    _, table = emit_curves(0.2, parse_grid("0.1:0.9:0.1"), Path(tmp_dir) / "curves.csv")
    rows = list(csv.DictReader(table.open()))
    got = [float(r["inv_one_minus_eps"]) for r in rows]
    exact = [1 / (1 - e) for e in (0.1, 0.2, 0.3, 0.4)]
    ok = [round(v, 2) for v in got] == [1.11, 1.25, 1.43, 1.67] and np.allclose(got, exact, atol=1e-9)
    return ok, "1/(1-eps) = " + ", ".join(f"{v:.6g}" for v in got)


def profile_regime():
    eps = entropy_inverse(0.5)
    h = binary_entropy(eps)
    taus = np.linspace(0.001, 0.999, 999)
    dominated = all(profile_region(eps, t).main_exclusion > profile_region(eps, t).trivial_exclusion_sides for t in taus)
    s = seam(eps)
    tight = [t for t in taus if t < s]
    err = max(abs(profile_region(eps, t).constructive_inclusion - (1 + h - 2 * t)) for t in tight)
    ok = dominated and err <= 1e-9 and abs(1 + h - 1.5) <= 1e-9
    return ok, f"eps = {eps:.6f}; main > trivial on {len(taus)} taus: {dominated}; max |incl - (1+H-2tau)| = {err:.1e} on {len(tight)} taus below {s:.4f}"


def randomized_cover():
    t0 = time.perf_counter()
    spec = FixedDistanceSpec(10, 4)
    g = build_fixed_graph(spec)
    w = math.ceil(0.3 * spec.n)
    base = sphere_rectangle(spec, w, brute=False)
    gamma = math.ceil(math.log2(g.num_edges / base.count))
    m = math.ceil(2**gamma * math.log(g.num_edges))
    rng = np.random.default_rng(0)
    successes, codec_ok = 0, True
    for seed in range(100):
        c = random_cover(g, HypercubeSampler(spec.n), base.rectangle, m, seed, gamma)
        if not c.is_complete():
            continue
        successes += 1
        verify_witness(g, c)
        codec = codec_from_cover(c)
        a, b, cc = codec.encode_all()
        codec_ok &= bool((codec.f_table[cc, a] == g.edges[:, 0]).all() and (codec.g_table[cc, b] == g.edges[:, 1]).all())
        for x, y in g.edges[rng.integers(0, g.num_edges, 20)]:
            codec_ok &= codec.decode(*codec.encode(int(x), int(y))) == (x, y)
    secs = time.perf_counter() - t0
    ok = successes >= 50 and codec_ok and secs < 120
    return ok, f"w={w}, K={base.count}, gamma={gamma}, m={m}: {successes}/100 complete, codec ok: {codec_ok}; {secs:.1f}s"


def _graphs_up_to_six(rng):
    for r, c in itertools.product(range(1, 7), repeat=2):
        if r * c <= 9:
            for bits in range(1 << (r * c)):
                mask = np.array([(bits >> i) & 1 for i in range(r * c)], dtype=bool).reshape(r, c)
                yield BipartiteGraph.from_edges(r, c, np.argwhere(mask))
        else:
            for _ in range(25):
                yield random_graph(rng, r, c, rng.uniform(0.15, 0.95))


def exclusion_soundness():
    rng = np.random.default_rng(90)
    graphs = excluded = contradictions = 0
    for g in _graphs_up_to_six(rng):
        graphs += 1
        for a, b in itertools.product((1, 2, 4), repeat=2):
            r = max_rect_exact(g, a, b).count
            need = None
            for gamma in range(4):
                t = ProfileTriple(math.log2(a), math.log2(b), gamma)
                if profile_excluded(g, t, r):
                    excluded += 1
                    need = min_cover_size(g, a, b) if need is None else need
                    contradictions += need <= 2**gamma
    return contradictions == 0, f"{graphs} graphs, {excluded} excluded triples, {contradictions} contradictions"


def _sample_stats():
    target = DensityTarget(0.5, 0.75)
    n_bits, rho = 6, 1.5
    spec = RandomMatrixSpec.from_bits(n_bits, rho)
    thr = target.threshold(n_bits, rho)
    dens, degs, maxima = 0, 0, []
    for seed in range(100):
        g = sample_matrix(RandomMatrixSpec(spec.side, spec.ones, seed))
        scan = scan_rectangle_density(g, target.side(n_bits), "sampled", 10_000, seed=seed)
        maxima.append(scan.max_ones)
        dens += scan.max_ones < thr
        degs += degree_check(g).threshold_ok
    return target, thr, dens, degs, maxima


_STATS = {}


def _stats():
    if not _STATS:
        _STATS["v"] = _sample_stats()
    return _STATS["v"]


def density_scan():
    target, thr, dens, _, maxima = _stats()
    detail = (
        f"eps={target.resolved_eps(1.5)}, threshold {thr:.2f}, sampled max in [{min(maxima)}, {max(maxima)}]; "
        f"{dens}/100 seeds below threshold (need >= 95)"
    )
    return dens >= 95, detail


def degree_threshold():
    _, _, _, degs, _ = _stats()
    return degs >= 99, f"{degs}/100 seeds with all rows and columns <= 16 (need >= 99)"


def chernoff_grid():
    checked = violations = 0
    for n in range(1, 31):
        for p in np.linspace(0.05, 0.95, 19):
            for delta in (0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0):
                mu = n * p
                k = math.ceil((1 + delta) * mu - 1e-12)
                exact = sum(math.comb(n, j) * p**j * (1 - p) ** (n - j) for j in range(k, n + 1))
                checked += 1
                violations += exact > chernoff_bound(mu, delta) * (1 + 1e-12)
    return violations == 0, f"{checked} (n, p, delta) triples, {violations} violations"


CRITERIA = [
    ("1", "two-point inequality", two_point_inequality),
    ("2", "delta > 0 iff support connected", positivity_iff_connected),
    ("3", "rectangle bound, exhaustive", rectangle_bound_exhaustive),
    ("4", "tensorization", tensorization),
    ("5", "sphere counts and Lambda order", sphere_counts_and_lambda_order),
    ("6", "1/(1-eps) reference column", reference_column),
    ("7", "profile regime at H(eps) = 1/2", profile_regime),
    ("8", "randomized cover and codec", randomized_cover),
    ("9", "exclusion soundness", exclusion_soundness),
    ("10a", "Chernoff vs exact tails", chernoff_grid),
    ("10b", "rectangle density at N = 64", density_scan),
    ("10c", "degree threshold at N = 64", degree_threshold),
]


def _run(num, report, *args):
    name, fn = next((n, f) for k, n, f in CRITERIA if k == num)
    ok, detail = fn(*args)
    line = _line(num, name, ok, detail)
    report.append(line)
    print(line)
    assert ok, line


def test_two_point_inequality(report):
    _run("1", report)


def test_delta_positive_iff_connected(report):
    _run("2", report)


def test_rectangle_bound_exhaustive(report):
    _run("3", report)


def test_tensorization(report):
    _run("4", report)


def test_sphere_counts_and_lambda_order(report):
    _run("5", report)


def test_reference_column(report, tmp_path):
    _run("6", report, tmp_path)


def test_profile_regime(report):
    _run("7", report)


def test_randomized_cover(report):
    _run("8", report)


def test_exclusion_soundness(report):
    _run("9", report)


def test_chernoff_dominates_exact_tails(report):
    _run("10a", report)


def test_rectangle_density_at_n6(report):
    _run("10b", report)


def test_degree_threshold_at_n6(report):
    _run("10c", report)


if __name__ == "__main__":
    import tempfile

    failed = 0
    with tempfile.TemporaryDirectory() as tmp:
        for num, name, fn in CRITERIA:
            ok, detail = fn(tmp) if fn is reference_column else fn()
            failed += not ok
            print(_line(num, name, ok, detail), flush=True)
    sys.exit(1 if failed else 0)
