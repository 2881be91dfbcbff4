"""Acceptance criteria, one test each.

Every test records a single PASS/FAIL line (value, threshold, runtime); the
lines are echoed together at the end of the pytest run. Runtime limits are
part of each criterion.
"""
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from superstab.criteria import (condition_margin_p, find_lambda_max, full_report,
                                paper_bracket_root, series_B)
from superstab.integrals import (IntegrationSettings, ip_bound_dd, ip_closed_form_d1,
                                 ip_monte_carlo)
from superstab.lattice import ToyLatticeInstance, compositions, distinct_permutations
from superstab.potentials import (PotentialFamily, PotentialTerm, paper_catalog,
                                  paper_example_family, vp_cube_lower_bound)
from superstab.verify import (GENERATORS, appendix_check, binomial_bounds_check,
                              final_estimate_check, lemma1_check, lemma2_check,
                              random_configuration, superstability_falsifier)

WITNESS = 0.29874


def record(n, ok, msg, elapsed, limit):
    ok = bool(ok) and elapsed < limit
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {msg}  [{elapsed:.2f}s < {limit}s]"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def fam():
    return paper_example_family()


def test_criterion_01_exact_i3(fam):
    t0 = time.perf_counter()
    est = ip_closed_form_d1(fam, 3)
    record(1, est.exact == Fraction(477, 20480),
           f"I3 closed form = {est.exact} (want 477/20480 exactly)", time.perf_counter() - t0, 1)


def test_criterion_02_monte_carlo_dominance(fam):
    t0 = time.perf_counter()
    mc = ip_monte_carlo(fam, 3, IntegrationSettings(samples=10**6, seed=42))
    bound = 477 / 20480
    rel = mc.std_error / mc.value
    ok = mc.value <= bound + 3 * mc.std_error and rel < 0.02
    record(2, ok, f"MC I3 = {mc.value:.6f} +- {mc.std_error:.2g} (rel {rel:.2%}) "
                  f"vs 477/20480 + 3 sigma = {bound + 3 * mc.std_error:.6f}",
           time.perf_counter() - t0, 60)


def test_criterion_03_paper_witness(fam):
    t0 = time.perf_counter()
    margin = condition_margin_p(fam, 3, WITNESS, "paper")
    lam_star = find_lambda_max(fam, 3, 1e-6, "paper")
    root = paper_bracket_root()
    ok = margin >= 0 and lam_star >= WITNESS and abs(lam_star - root) <= 1e-6
    record(3, ok, f"margin(0.29874) = {margin:.6g} >= 0; lambda* = {lam_star:.7f} "
                  f"(Brent root {root:.7f}) >= 0.29874", time.perf_counter() - t0, 1)


def test_criterion_04_closed_form_zero(fam):
    t0 = time.perf_counter()
    v = vp_cube_lower_bound(fam, 3, Fraction(1, 2))
    record(4, v == 0 and isinstance(v, Fraction),
           f"V_3 cube bound at lambda=1/2 = {v} as {type(v).__name__} (want exact 0)",
           time.perf_counter() - t0, 1)


def test_criterion_05_lemmas():
    t0 = time.perf_counter()
    l1 = l2 = bad = 0
    for seed in range(1, 101):
        L = 3 + seed % 3
        for p in (3, 4):
            inst = ToyLatticeInstance.random(seed, L, p)
            l1 += 1
            bad += not lemma1_check(inst).passed
            for j in (2, 3):
                for comp in compositions(p, j):
                    for order in distinct_permutations(comp):
                        l2 += 1
                        bad += not lemma2_check(inst, order).passed
    record(5, bad == 0, f"{l1} lemma-1 and {l2} lemma-2 checks on 100 seeds, "
                        f"p in {{3,4}}, L in {{3,4,5}}: {bad} violations",
           time.perf_counter() - t0, 300)


def test_criterion_06_appendix_and_binomials():
    t0 = time.perf_counter()
    rng = np.random.default_rng(0)
    bad = mismatched_tight = 0
    for _ in range(1000):
        j = int(rng.integers(1, 6))
        a = [Fraction(int(v), 1000) for v in rng.integers(1, 10001, size=j)]
        m = [int(v) for v in rng.integers(1, 7, size=j)]
        r = appendix_check(a, m)
        bad += not r.passed
        mismatched_tight += r.details["first_tight"] != (len(set(a)) == 1)
    eq = appendix_check([Fraction(7, 3)] * 5, [1, 2, 3, 4, 6])
    binom = binomial_bounds_check(30)
    ok = (bad == 0 and mismatched_tight == 0 and eq.passed and eq.details["first_tight"]
          and binom.passed)
    record(6, ok, f"appendix: {bad} violations in 1000 draws, equality case tight="
                  f"{eq.details['first_tight']}; binomial n<=30: {binom.lhs} violations",
           time.perf_counter() - t0, 10)


def test_criterion_07_final_estimate(fam):
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    bad = {"paper": 0, "majorant": 0}
    for i in range(1000):
        pts = random_configuration(rng, GENERATORS[i % len(GENERATORS)], 0.29, 1, 25)
        for src in bad:
            bad[src] += not final_estimate_check(fam, pts, 3, 0.29, src).passed
    record(7, not any(bad.values()),
           f"1000 configurations at lambda=0.29, violations {bad}", time.perf_counter() - t0, 120)


def test_criterion_08_falsifier(fam):
    t0 = time.perf_counter()
    rep = full_report(fam, 0.29, ip_source="paper")
    run = superstability_falsifier(fam, rep.A2, rep.B, 0.29, trials=10_000, seed=42)
    corrupt = superstability_falsifier(fam, rep.A2, 0.0, 0.29, trials=200, seed=42)
    ok = rep.verdict == "superstable" and run.passed and not corrupt.passed
    record(8, ok, f"A={rep.A2:.4g}, B={rep.B:.4g}: {run.details['violations']} violations in "
                  f"10^4 trials (worst margin {run.details['worst_margin']:.4g}); "
                  f"B=0 run found {corrupt.details['violations']}", time.perf_counter() - t0, 300)


def test_criterion_09_ball_bound():
    t0 = time.perf_counter()
    fam2 = PotentialFamily(2, {2: PotentialTerm(2, 1, 0, 6, 4), 3: PotentialTerm(3, 1, 1, 12, 6)})
    mc = ip_monte_carlo(fam2, 3, IntegrationSettings(samples=10**6, seed=42))
    bound = ip_bound_dd(fam2, 3)
    record(9, mc.value <= bound.value + 3 * mc.std_error,
           f"d=2 MC I3 = {mc.value:.5f} +- {mc.std_error:.2g} <= ball bound {bound.value:.5f}",
           time.perf_counter() - t0, 60)


def test_criterion_10_catalog_series():
    t0 = time.perf_counter()
    s = series_B(paper_catalog(0.1, 8), 1.0, tail_tol=1e-6)
    positive = all(t > 0 for t in s.terms)
    decreasing = all(b < a for a, b in zip(s.terms, s.terms[1:]))
    record(10, positive and decreasing and s.tail_flag,
           f"terms p=3..8: {', '.join(f'{t:.3g}' for t in s.terms)}; tail_flag={s.tail_flag} "
           f"(complete sum, p_cap = p_max; last/sum = {s.terms[-1] / s.series_sum:.2g})",
           time.perf_counter() - t0, 30)
