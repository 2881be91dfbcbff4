import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import IntegrationWarning, dblquad

from superstab.integrals import (IntegrationSettings, IpEstimate, TranscriptionGuardError,
                                 a4_spot_check, ball_volume, guarded_closed_form, ip_bound_dd,
                                 ip_closed_form_d1, ip_lattice, ip_majorant_d1, ip_monte_carlo)
from superstab.potentials import FamilyError, PotentialFamily, PotentialTerm, paper_catalog

SMALL = IntegrationSettings(samples=100_000, seed=42)


def fam_with(p, d, A, B, m, n):
    terms = {q: PotentialTerm(q, 1, 0, q * d + 2, q * d) for q in range(2, p)}
    terms[p] = PotentialTerm(p, A, B, m, n)
    return PotentialFamily(d, terms)


def test_ball_volume_examples():
    assert ball_volume(1, 1) == pytest.approx(2)
    assert ball_volume(2, 1) == pytest.approx(math.pi)
    assert ball_volume(3, 2) == pytest.approx(32 * math.pi / 3)
    with pytest.raises(ValueError):
        ball_volume(0, 1)


@given(st.integers(1, 6), st.floats(0.01, 100))
def test_ball_volume_scaling(d, R):
    assert ball_volume(1, R) == pytest.approx(2 * R)
    assert ball_volume(d, R) / ball_volume(d, 1) == pytest.approx(R ** d, rel=1e-12)


def test_closed_form_paper_value(p3_only):
    est = ip_closed_form_d1(p3_only, 3)
    assert est.exact == Fraction(477, 20480)
    assert est.method == "closed-form-bound" and est.std_error == 0
    assert ip_closed_form_d1(p3_only, 3).exact == est.exact  # reproducible, no floats
    assert ip_closed_form_d1(p3_only, 3, "primed").exact == Fraction(184671, 901120)


def test_closed_form_zero_without_attraction():
    fam = fam_with(3, 1, 1, 0, 12, 6)
    assert ip_closed_form_d1(fam, 3).value == 0


def test_closed_form_rejects_bad_inputs():
    with pytest.raises(FamilyError):
        ip_closed_form_d1(fam_with(3, 1, 1, 1, Fraction(25, 2), 6), 3)
    with pytest.raises(FamilyError):
        ip_closed_form_d1(fam_with(3, 2, 1, 1, 12, 6), 3)


def test_closed_form_negative_on_catalog_trips_guard():
    cat = paper_catalog(0.1, 5)
    with pytest.raises(TranscriptionGuardError):
        ip_closed_form_d1(cat, 4)


def _i3_by_quadrature():
    def f(y, x):
        S = abs(x) + abs(y) + abs(x - y)
        return 0.0 if S <= 1 else S ** -6 - S ** -12
    total = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        for lo, hi in [(-np.inf, 0), (0, np.inf)]:
            total += dblquad(f, lo, hi, lambda x: -np.inf, lambda x: x, epsabs=1e-11)[0]
            total += dblquad(f, lo, hi, lambda x: x, lambda x: np.inf, epsabs=1e-11)[0]
    return total


def test_true_i3_is_nine_fortieths(p3_only):
    # two-dimensional quadrature over the plane, independent of the diameter argument
    q = _i3_by_quadrature()
    assert q == pytest.approx(0.225, abs=1e-6)
    assert ip_majorant_d1(p3_only, 3).exact == Fraction(9, 40)
    assert Fraction(477, 20480) < Fraction(9, 40) / 9


def test_majorant_dominates_monte_carlo_on_catalog():
    cat = paper_catalog(0.1, 6)
    for p in range(2, 7):
        mc = ip_monte_carlo(cat, p, SMALL)
        bound = ip_majorant_d1(cat, p).value
        assert mc.value <= bound + 3 * mc.std_error, p


def test_p2_closed_form_matches_majorant(paper_family):
    a = ip_closed_form_d1(paper_family, 2).value
    b = ip_majorant_d1(paper_family, 2).value
    assert a == pytest.approx(b, rel=1e-12)


def test_monte_carlo_agrees_with_exact_i3(p3_only):
    mc = ip_monte_carlo(p3_only, 3, SMALL)
    assert mc.method == "monte-carlo" and mc.std_error > 0
    assert abs(mc.value - 0.225) < 4 * mc.std_error
    assert mc.std_error / mc.value < 0.02


def test_monte_carlo_deterministic(p3_only):
    a = ip_monte_carlo(p3_only, 3, SMALL)
    b = ip_monte_carlo(p3_only, 3, SMALL)
    assert a == b


def test_monte_carlo_same_with_and_without_numba(p3_only, monkeypatch):
    a = ip_monte_carlo(p3_only, 3, SMALL)
    monkeypatch.setenv("SUPERSTAB_NUMBA", "0")
    b = ip_monte_carlo(p3_only, 3, SMALL)
    assert b.value == pytest.approx(a.value, rel=1e-12)


def test_monte_carlo_error_shrinks(p3_only):
    a = ip_monte_carlo(p3_only, 3, IntegrationSettings(samples=100_000, seed=3))
    b = ip_monte_carlo(p3_only, 3, IntegrationSettings(samples=200_000, seed=3))
    assert b.std_error / a.std_error == pytest.approx(1 / math.sqrt(2), rel=0.15)


def test_monte_carlo_zero_without_attraction():
    est = ip_monte_carlo(fam_with(3, 1, 1, 0, 12, 6), 3, SMALL)
    assert est.value == 0 and est.std_error == 0


def test_settings_validation():
    with pytest.raises(ValueError):
        IntegrationSettings(samples=999)
    with pytest.raises(ValueError):
        IntegrationSettings(shards=0)
    with pytest.raises(ValueError):
        IntegrationSettings(truncation_radius=-1.0)


@pytest.mark.parametrize("d,p,n,m", [(2, 3, 6, 12), (3, 3, 7, 12), (2, 4, 7, 10), (2, 2, 3, 4)])
def test_ball_bound_dominates_monte_carlo(d, p, n, m):
    fam = fam_with(p, d, 1, 1, m, n)
    mc = ip_monte_carlo(fam, p, SMALL)
    bound = ip_bound_dd(fam, p)
    assert bound.method == "ball-bound"
    assert 0 < mc.value <= bound.value + 3 * mc.std_error


def test_ball_bound_requires_convergence():
    fam = PotentialFamily(2, {2: PotentialTerm(2, 1, 0, 4, 3), 3: PotentialTerm(3, 1, 1, 12, 4.5)})
    fam.terms[3] = PotentialTerm(3, 1, 1, 12, 4)  # bypass validation to reach the guard
    with pytest.raises(FamilyError):
        ip_bound_dd(fam, 3)


def test_guard_trips_on_worked_example(p3_only):
    with pytest.raises(TranscriptionGuardError, match="exceeds"):
        guarded_closed_form(p3_only, 3, SMALL)


def test_guard_passes_where_bound_is_sound(paper_family):
    closed, mc = guarded_closed_form(paper_family, 2, SMALL)
    assert closed.method == "closed-form-bound"
    assert mc.value <= closed.value + 3 * mc.std_error


def test_ip_lattice_scaling(p3_only):
    assert ip_lattice(p3_only, 3, 1, "paper") == Fraction(477, 20480)
    assert ip_lattice(p3_only, 3, 0.29874, "paper") == pytest.approx(0.26098, abs=5e-6)
    a = ip_lattice(p3_only, 3, Fraction(1, 3))
    assert ip_lattice(p3_only, 3, Fraction(1, 6)) == 4 * a
    with pytest.raises(ValueError):
        ip_lattice(p3_only, 3, 1, "nonsense")


def test_estimate_round_trip(p3_only):
    est = ip_closed_form_d1(p3_only, 3)
    d = est.to_dict()
    assert d["rational"] == {"num": 477, "den": 20480}
    assert IpEstimate.from_dict(d) == est
    with pytest.raises(ValueError):
        IpEstimate(3, 1, -1.0, "monte-carlo")


def test_a4_spot_check_finite(p3_only):
    out = a4_spot_check(p3_only, 3, 2, clusters=3, settings=IntegrationSettings(samples=5000))
    assert len(out) == 3
    assert all(math.isfinite(v) and v >= 0 for _, v, _ in out)
