"""End-to-end acceptance checks, one per numbered criterion.

Each test prints a single PASS/FAIL line (bypassing capture) and then asserts,
so the verdict summary is visible in any pytest run.  Criterion 6's large-panel
half is expected to fail: the quantity it targets is dominated by overlap
events far too rare to register in the prescribed number of Monte Carlo
samples, so an honest estimator cannot reach the stated magnitude.  See the
project notes for the full analysis.
"""

import itertools
import math

import numpy as np

from densequery.bounds import (
    CONJECTURALLY_HARD,
    EASY,
    HARD,
    IMPOSSIBLE,
    NON_ADAPTIVE_MODE,
    PhasePoint,
    chi_square_overlap_estimate,
    classify_phase,
    planted_count_bound,
)
from densequery.detectors import ScanConfig, DegreeConfig, scan_statistic_exact
from densequery.divergences import (
    Bernoulli,
    DistributionPair,
    chi_square,
    kl,
    kl_bernoulli,
)
from densequery.harness import SCAN, DEGREE, TrialConfig, estimate_risk
from densequery.model import H1, ModelParams, sample_instance
from densequery.oracle import BudgetedOracle
from densequery.strategies import clique_pattern_plan, uniform_plan


def report(num: int, ok: bool, detail: str) -> bool:
    line = f"[ACCEPTANCE] criterion {num}: {'PASS' if ok else 'FAIL'} ({detail})"
    print(line, flush=True)
    from conftest import ACCEPTANCE_LINES

    ACCEPTANCE_LINES.append(line)
    return ok


def bern_pair(p, q):
    return DistributionPair(Bernoulli(p), Bernoulli(q))


def test_criterion_1_divergence_exactness():
    ok = abs(chi_square(bern_pair(1.0, 0.5)) - 1.0) < 1e-12
    ok &= abs(kl(bern_pair(1.0, 0.5), base=2) - 1.0) < 1e-12
    rng = np.random.default_rng(1)
    for _ in range(1000):
        p = float(rng.uniform(0.0, 1.0))
        q = float(rng.uniform(0.01, 0.99))
        c = chi_square(bern_pair(p, q))
        d = kl(bern_pair(p, q))
        ok &= c >= 0.0 and d >= 0.0
        ok &= (c == 0.0) == (p == q)
        ok &= (d == 0.0) == (p == q)
        ok &= abs(chi_square(bern_pair(p, p))) < 1e-15
    assert report(1, ok, "chi-square and base-2 KL exact at (1, 0.5); "
                  "1000-draw identity suite")


def test_criterion_2_planted_count_concentration():
    n, k, budget, trials = 100, 10, 1000, 10_000
    params = ModelParams.bernoulli(n, k, 1.0, 0.5)
    counts = np.empty(trials)
    for t in range(trials):
        inst = sample_instance(params, H1, t)
        oracle = BudgetedOracle(inst, budget)
        uniform_plan(n, budget, seed=t + 1).execute(oracle)
        counts[t] = oracle.planted_query_count()
    expected = budget * k * (k - 1) / (n * (n - 1))  # 9.0909...
    se = counts.std(ddof=1) / math.sqrt(trials)
    mean_ok = abs(counts.mean() - expected) < 3 * se
    bound = planted_count_bound(budget, n, k, 0.1, NON_ADAPTIVE_MODE)
    exceed = float(np.mean(counts > bound))
    tail_ok = exceed <= 0.12
    assert report(2, mean_ok and tail_ok,
                  f"mean {counts.mean():.4f} vs {expected:.4f} (3se={3*se:.4f}); "
                  f"P(count > {bound:.3g}) = {exceed:.4g} <= 0.12")


def scan_risk(M, trials=200, seed=11):
    det = ScanConfig(sample_size=M, epsilon=0.2)
    cfg = TrialConfig(params=ModelParams.bernoulli(100, 50, 1.0, 0.5),
                      detector=SCAN, detector_cfg=det, budget=det.budget(),
                      trials=trials, master_seed=seed)
    return estimate_risk(cfg)


def test_criterion_3_scan_separation():
    big = scan_risk(20)
    small = scan_risk(10)
    low_ok = big.risk <= 0.2
    gap = small.risk - big.risk
    width = (big.half_width_95_type1 + big.half_width_95_type2
             + small.half_width_95_type1 + small.half_width_95_type2)
    sep_ok = gap > width
    assert report(3, low_ok and sep_ok,
                  f"risk(M=20) = {big.risk:.3f} <= 0.2; "
                  f"risk(M=10) - risk(M=20) = {gap:.3f} > CI width {width:.3f}")


def test_criterion_4_degree_separation():
    det = DegreeConfig(panel_size=2000, probe_count=400, epsilon=0.1)
    cfg = TrialConfig(params=ModelParams.bernoulli(10_000, 1000, 1.0, 0.5),
                      detector=DEGREE, detector_cfg=det, budget=det.budget(),
                      trials=100, master_seed=13)
    est = estimate_risk(cfg)
    ok = est.risk <= 0.1
    assert report(4, ok, f"risk = {est.risk:.3f} <= 0.1 at 100 paired trials")


def test_criterion_5_budget_monotonicity():
    grid = [10, 14, 17, 20]
    estimates = [scan_risk(m, seed=17) for m in grid]
    ok = True
    details = []
    for prev, cur in zip(estimates, estimates[1:]):
        width = (prev.half_width_95_type1 + prev.half_width_95_type2
                 + cur.half_width_95_type1 + cur.half_width_95_type2)
        ok &= cur.risk <= prev.risk + width
        details.append(f"{prev.risk:.3f}->{cur.risk:.3f}")
    assert report(5, ok, "risk over M grid {10,14,17,20}: " + ", ".join(details))


def test_criterion_6_overlap_estimator_small_pattern():
    plan = clique_pattern_plan(2000, 30, seed=5)
    mean, stderr = chi_square_overlap_estimate(plan, 2000, 40, 1.0, 100_000, seed=5)
    ok = mean < 0.1
    assert report(6, ok, f"small-panel overlap estimate {mean:.3g} "
                  f"(se {stderr:.2g}) < 0.1")


def test_criterion_6_overlap_estimator_large_pattern():
    # Expected to fail honestly: the target magnitude lives in overlap events
    # whose probability is far below 1/samples, so the sample mean sits orders
    # of magnitude under it.  Documented in the project notes.
    plan = clique_pattern_plan(2000, 500, seed=5)
    mean, stderr = chi_square_overlap_estimate(plan, 2000, 40, 1.0, 100_000, seed=6)
    ok = mean >= 1.0
    assert report(6, ok, f"large-panel overlap estimate {mean:.3g} "
                  f"(se {stderr:.2g}) >= 1"), (
        "known limitation: the heavy tail of the overlap distribution is "
        "unobservable at this sample size; see notes"
    )


def test_criterion_7_hypergeometric_tail_dominance():
    rng = np.random.default_rng(7)
    samples = 1_000_000
    ok = True
    worst = math.inf
    for n in (50, 100, 500):
        for k in (5, 10, 50):
            if k > n:
                continue
            draws = rng.hypergeometric(k, n - k, k, size=samples)
            rho = k / n
            for h in range(math.ceil(k * rho), k + 1):
                emp = float(np.mean(draws >= h))
                se = math.sqrt(max(emp * (1 - emp), 1e-12) / samples)
                bound = math.exp(-k * kl_bernoulli(h / k, rho))
                ok &= bound >= emp - 5 * se
                worst = min(worst, bound - emp)
    assert report(7, ok, f"analytic bound dominates empirical tails on the "
                  f"full grid (worst margin {worst:.3g})")


def brute_force_scan(adjacency, n0):
    best = -math.inf
    for combo in itertools.combinations(range(adjacency.shape[0]), n0):
        total = sum(adjacency[a, b] for a, b in itertools.combinations(combo, 2))
        best = max(best, total)
    return best


def test_criterion_8_oracle_and_enumerator_equivalence():
    rng = np.random.default_rng(8)
    ok = True
    for _ in range(100):
        m = int(rng.integers(4, 13))
        n0 = int(rng.integers(2, m))
        upper = np.triu(rng.random((m, m)) < rng.uniform(0.2, 0.8), k=1)
        adj = upper.astype(float) + upper.T
        ok &= scan_statistic_exact(adj, n0) == brute_force_scan(adj, n0)
    params = ModelParams.bernoulli(20, 8, 0.8, 0.4)
    pairs = [(i, j) for i in range(12) for j in range(i + 1, 12)]
    for replay in range(100):
        inst = sample_instance(params, H1, replay)
        o1 = BudgetedOracle(inst, len(pairs))
        o2 = BudgetedOracle(inst, len(pairs))
        order = rng.permutation(len(pairs))
        m1 = {pr: o1.query(*pr) for pr in pairs}
        m2 = {pairs[t]: o2.query(*pairs[t]) for t in order}
        ok &= m1 == m2 and o1.used == o2.used
    assert report(8, ok, "exact scan statistic matches a naive enumerator on "
                  "100 instances; oracle invariant under 100 permuted replays")


def test_criterion_9_phase_diagram():
    points = [(1.8, 0.6, EASY), (0.5, 0.6, IMPOSSIBLE),
              (1.0, 0.6, CONJECTURALLY_HARD), (1.5, 0.4, HARD)]
    ok = all(classify_phase(PhasePoint(alpha=a, beta=b)) == lbl
             for a, b, lbl in points)
    labels = {IMPOSSIBLE, CONJECTURALLY_HARD, HARD, EASY}

    def expected(alpha, beta):
        if alpha <= 2 - 2 * beta:
            return IMPOSSIBLE
        if beta <= 0.5:
            return HARD
        if alpha <= 3 - 3 * beta:
            return CONJECTURALLY_HARD
        return EASY

    for beta in np.linspace(0.0025, 0.9975, 200):
        for alpha in np.linspace(0.005, 1.995, 200):
            got = classify_phase(PhasePoint(alpha=float(alpha), beta=float(beta)))
            ok &= got in labels and got == expected(alpha, beta)
    assert report(9, ok, "four reference points plus a 200x200 grid with "
                  "boundaries at a=2-2b, a=3-3b, b=1/2")
