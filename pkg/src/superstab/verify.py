"""Independent oracles for the lemmas, the per-p energy estimate and the inequalities it uses."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np

from .config import Configuration, PartitionSpec, occupancy
from .energy import p_body_energy, stability_rhs, total_energy
from .integrals import ip_lattice
from .lattice import ToyLatticeInstance, lemma1_sides, lemma2_sides
from .potentials import PotentialFamily, vp_cube_lower_bound

TOL = 1e-9


def _num(x):
    if x is None:
        return None
    if isinstance(x, Rational):
        x = Fraction(x)
        return {"num": x.numerator, "den": x.denominator, "value": float(x)}
    return float(x)


@dataclass
class ViolationReport:
    """Outcome of one oracle comparison ``lhs <= rhs`` (within ``tol``)."""

    name: str
    lhs: object
    rhs: object
    passed: bool
    seed: int | None = None
    witness: object = None
    details: dict = field(default_factory=dict)

    @classmethod
    def compare(cls, name, lhs, rhs, tol=TOL, **kw):
        return cls(name, lhs, rhs, bool(lhs <= rhs + tol), **kw)

    def to_dict(self):
        return {"name": self.name, "seed": self.seed, "lhs": _num(self.lhs),
                "rhs": _num(self.rhs), "passed": self.passed,
                "witness": self.witness, "details": self.details}


def lemma1_check(inst: ToyLatticeInstance, tol: float = TOL) -> ViolationReport:
    """Composition sum of I^{k_1|{k_2..k_j}} against I^{1|p-1}, at the worst cube."""
    worst = None
    for cube in range(inst.L):
        lhs, rhs = lemma1_sides(inst, cube)
        if worst is None or lhs - rhs > worst[0] - worst[1]:
            worst = (lhs, rhs, cube)
    lhs, rhs, cube = worst
    return ViolationReport.compare("lemma1", lhs, rhs, tol, seed=inst.seed,
                                   witness={"cube": cube, "p": inst.p, "L": inst.L})


def lemma2_check(inst: ToyLatticeInstance, composition, tol: float = TOL) -> ViolationReport:
    lhs, rhs = lemma2_sides(inst, composition)
    return ViolationReport.compare(
        "lemma2", lhs, rhs, tol, seed=inst.seed,
        witness={"composition": list(composition), "occupancy": list(inst.occupancy),
                 "p": inst.p, "L": inst.L})


def final_estimate_check(fam: PotentialFamily, gamma, p: int, lam,
                         ip_source: str = "majorant", tol: float = TOL) -> ViolationReport:
    """Per-p lower estimate of U^(p) against direct enumeration.

    bound = sum_{|g_D| >= p} |g_D|^p (V_p^p/p^p - p I) - p I sum_{k<p} k^(p-1) |g|,
    with I the surrogate I_p^{1|p-1}. Passes iff bound <= U^(p) + tol.
    """
    if not isinstance(gamma, Configuration):
        gamma = Configuration.from_points(gamma, fam.d)
    if len(gamma) > 25:
        raise ValueError("final estimate check is limited to |gamma| <= 25")
    vpl = float(vp_cube_lower_bound(fam, p, lam))
    ipl = float(ip_lattice(fam, p, lam, ip_source))
    occ = occupancy(gamma, PartitionSpec(float(lam), fam.d))
    per_cube = vpl / p ** p - p * ipl
    bound = (sum(c ** p * per_cube for c in occ.values() if c >= p)
             - p * ipl * sum(k ** (p - 1) for k in range(1, p)) * len(gamma))
    energy = p_body_energy(fam, gamma, p)
    return ViolationReport.compare("final_estimate", bound, energy, tol,
                                   details={"p": p, "lambda": float(lam), "n_points": len(gamma),
                                            "max_occupancy": max(occ.values(), default=0)})


def appendix_check(a, m, tol: float = TOL) -> ViolationReport:
    """prod a_i^m_i <= (1/M) sum m_i a_i^M <= sum a_i^M with M = sum m_i.

    Exact when every a_i is rational. ``details['first_tight']`` flags equality
    in the first inequality (which happens iff all a_i coincide).
    """
    if len(a) != len(m) or not a:
        raise ValueError("a and m need equal, nonzero length")
    if any(not x > 0 for x in a) or any(int(k) != k or k < 1 for k in m):
        raise ValueError("need a_i > 0 and positive integer m_i")
    exact = all(isinstance(x, Rational) for x in a)
    a = [Fraction(x) for x in a] if exact else [float(x) for x in a]
    m = [int(k) for k in m]
    M = sum(m)
    prod = math.prod(x ** k for x, k in zip(a, m))
    mean = sum(k * x ** M for x, k in zip(a, m)) / (Fraction(M) if exact else M)
    top = sum(x ** M for x in a)
    tol = 0 if exact else tol
    first_tight = prod == mean if exact else math.isclose(prod, mean, rel_tol=1e-12)
    ok = prod <= mean + tol and mean <= top + tol
    return ViolationReport("appendix", prod, mean, bool(ok),
                           witness={"a": [_num(x) for x in a], "m": m},
                           details={"upper": _num(top), "first_tight": bool(first_tight),
                                    "exact": exact})


def binomial_bounds_check(n_max: int) -> ViolationReport:
    """n^k/k^k <= C(n, k) <= n^k/k! for all 1 <= k <= n <= n_max, in exact arithmetic."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    bad = []
    checked = 0
    for n in range(1, n_max + 1):
        for k in range(1, n + 1):
            c = math.comb(n, k)
            lo, hi = Fraction(n ** k, k ** k), Fraction(n ** k, math.factorial(k))
            checked += 1
            if not lo <= c <= hi:
                bad.append([n, k])
    return ViolationReport("binomial_bounds", len(bad), 0, not bad,
                           witness=bad[0] if bad else None,
                           details={"n_max": n_max, "pairs_checked": checked})


GENERATORS = ("box", "cluster", "dumbbell", "grid")


def random_configuration(rng, kind: str, lam: float, d: int, max_points: int = 30):
    """One falsifier trial: points shaped by ``kind`` (see ``GENERATORS``)."""
    if kind == "box":
        n = int(rng.integers(2, min(max_points, 25) + 1))
        side = lam * rng.uniform(0.5, 4.0) * n ** (1 / d)
        return rng.uniform(-side / 2, side / 2, size=(n, d))
    if kind == "cluster":
        n = int(rng.integers(2, max_points + 1))
        r = rng.integers(-3, 4, size=d)
        return lam * (r - 0.5 + rng.uniform(0.0, 1.0, size=(n, d)))
    if kind == "dumbbell":
        n1 = int(rng.integers(1, max_points // 2 + 1))
        n2 = int(rng.integers(1, max_points // 2 + 1))
        gap = np.zeros(d)
        gap[0] = lam * rng.integers(1, 6)
        a = lam * (rng.uniform(0.0, 1.0, size=(n1, d)) - 0.5)
        b = lam * (rng.uniform(0.0, 1.0, size=(n2, d)) - 0.5) + gap
        return np.concatenate([a, b])
    if kind == "grid":
        per_axis = max(2, int(rng.integers(2, max(3, int(round(max_points ** (1 / d)))) + 1)))
        h = lam * rng.uniform(0.2, 2.5)
        axes = [np.arange(per_axis) * h] * d
        pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)[:max_points]
        return pts + rng.normal(0.0, 0.01 * h, size=pts.shape)
    raise ValueError(f"unknown generator {kind!r}")


def superstability_falsifier(fam: PotentialFamily, A, B, lam, m_exp=2, trials: int = 10_000,
                             seed: int = 0, p_cap: int | None = None, kinds=GENERATORS,
                             tol: float = TOL) -> ViolationReport:
    """Random search for U(gamma) < A sum |g_D|^m_exp - B |gamma|.

    Generators cycle through ``kinds``; the report carries the violation count,
    the worst margin U - rhs and the configuration attaining it.
    """
    if not A > 0:
        raise ValueError("A must be positive")
    rng = np.random.default_rng(seed)
    spec = PartitionSpec(float(lam), fam.d)
    worst = None
    violations = 0
    counts = {k: 0 for k in kinds}
    for i in range(trials):
        kind = kinds[i % len(kinds)]
        pts = random_configuration(rng, kind, float(lam), fam.d)
        gamma = Configuration(pts, fam.d)
        U = total_energy(fam, gamma, p_cap).total
        rhs = stability_rhs(occupancy(gamma, spec), float(A), float(B), m_exp)
        margin = U - rhs
        if margin < -tol:
            violations += 1
            counts[kind] += 1
        if worst is None or margin < worst[0]:
            worst = (margin, U, rhs, i, kind, pts)
    margin, U, rhs, i, kind, pts = worst
    return ViolationReport(
        "superstability_falsifier", rhs, U, violations == 0, seed=seed,
        witness={"trial": i, "generator": kind, "points": pts.tolist()},
        details={"trials": trials, "violations": violations, "violations_by_generator": counts,
                 "worst_margin": margin, "A": float(A), "B": float(B), "lambda": float(lam),
                 "m_exp": m_exp})
