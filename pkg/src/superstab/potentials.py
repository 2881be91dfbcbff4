"""Inverse-power-sum p-body potentials.

``V_p(x_1..x_p) = A_p / S^m(p) - B_p / S^n(p)`` where ``S`` is the sum of all
pairwise Euclidean distances of the p points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np

from ._exact import as_exact, is_exact, power
from .config import PartitionSpec, cube_index


class FamilyError(ValueError):
    pass


@dataclass(frozen=True)
class PotentialTerm:
    p: int
    A: float
    B: float
    m: float
    n: float

    def threshold(self):
        """``S`` at which ``V_p`` changes sign; ``inf`` when ``B == 0``."""
        if self.B == 0:
            return math.inf
        return power(Fraction(self.A) / Fraction(self.B) if is_exact(self.A, self.B)
                     else self.A / self.B, _inv(self.m - self.n))


def _inv(e):
    return Fraction(1) / Fraction(e) if isinstance(e, Rational) else 1.0 / e


@dataclass(frozen=True)
class PotentialFamily:
    d: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.d < 1:
            raise FamilyError("dimension must be >= 1")
        if not self.terms:
            raise FamilyError("family needs at least the p=2 term")
        p_max = max(self.terms)
        missing = [p for p in range(2, p_max + 1) if p not in self.terms]
        if missing:
            raise FamilyError(f"missing per_p entries for p={missing}")
        for p, t in self.terms.items():
            if t.p != p:
                raise FamilyError(f"term keyed {p} describes p={t.p}")
            if not t.A > 0:
                raise FamilyError(f"A_{p} must be positive")
            if t.B < 0:
                raise FamilyError(f"B_{p} must be nonnegative")
            if not t.m > t.n:
                raise FamilyError(f"need m({p}) > n({p})")
            if not t.n > (p - 1) * self.d:
                raise FamilyError(f"integrability needs n({p}) > (p-1)d = {(p - 1) * self.d}")

    @property
    def p_max(self) -> int:
        return max(self.terms)

    def term(self, p: int) -> PotentialTerm:
        if p not in self.terms:
            raise FamilyError(f"p={p} outside 2..{self.p_max}")
        return self.terms[p]

    @classmethod
    def from_rows(cls, d, rows) -> "PotentialFamily":
        terms = {}
        for r in rows:
            t = PotentialTerm(int(r["p"]), as_exact(r["A"]), as_exact(r["B"]),
                              as_exact(r["m"]), as_exact(r["n"]))
            if t.p in terms:
                raise FamilyError(f"duplicate entry for p={t.p}")
            terms[t.p] = t
        return cls(int(d), terms)

    def to_rows(self):
        return [{"p": t.p, "A": t.A, "B": t.B, "m": t.m, "n": t.n}
                for t in sorted(self.terms.values(), key=lambda t: t.p)]


@dataclass(frozen=True)
class PairwiseSumCoefficients:
    lower: int
    upper: int


def pairwise_sum_coefficients(p: int, d: int) -> PairwiseSumCoefficients:
    """Constants with ``lower*diam <= S <= upper*diam`` for any p points."""
    if d == 1:
        h = p // 2
        return PairwiseSumCoefficients(p - 1, (p - h) * h)
    return PairwiseSumCoefficients(p - 1, p * (p - 1) // 2)


def catalog_b_bound(p: int, epsilon: float) -> float:
    return p ** ((p - 4) / 2 - epsilon) / 2 ** ((2 * p - 1) / 2)


def paper_catalog(epsilon=0.1, p_max=8, d=1, b_scale=Fraction(1, 2)) -> PotentialFamily:
    """n(p)=p, m(p)=p+1, A_p=((p-[p/2])[p/2])^(p+1), B_p = b_scale * bound."""
    if not epsilon > 0:
        raise FamilyError("epsilon must be positive")
    if not 0 < b_scale < 1:
        raise FamilyError("b_scale must lie in (0, 1)")
    terms = {}
    for p in range(2, p_max + 1):
        h = p // 2
        terms[p] = PotentialTerm(p, ((p - h) * h) ** (p + 1),
                                 float(b_scale) * catalog_b_bound(p, epsilon), p + 1, p)
    return PotentialFamily(d, terms)


def paper_example_family(epsilon=0.1, b_scale=Fraction(1, 2)) -> PotentialFamily:
    """Worked p=3 example (A=B=1, m=12, n=6) with the catalog pair term."""
    pair = paper_catalog(epsilon, 2, 1, b_scale).terms[2]
    return PotentialFamily(1, {2: pair, 3: PotentialTerm(3, 1, 1, 12, 6)})


def _as_points(points, d=None):
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    if d is not None and pts.shape[1] != d:
        raise FamilyError(f"points have dimension {pts.shape[1]}, family has d={d}")
    return pts


def pairwise_sum(points) -> float:
    pts = _as_points(points)
    if pts.shape[0] < 2:
        raise ValueError("pairwise sum needs at least two points")
    total = 0.0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            total += math.dist(pts[i], pts[j])
    return total


def _vp_of_s(t: PotentialTerm, S):
    if S == 0:
        return math.inf
    return t.A / S ** t.m - t.B / S ** t.n


def eval_vp(fam: PotentialFamily, p: int, points) -> float:
    t = fam.term(p)
    pts = _as_points(points, fam.d)
    if pts.shape[0] != p:
        raise FamilyError(f"expected {p} points, got {pts.shape[0]}")
    return float(_vp_of_s(t, pairwise_sum(pts)))


def vp_negative_part(fam, p, points) -> float:
    return min(0.0, eval_vp(fam, p, points))


def vp_positive_part(fam, p, points) -> float:
    return max(0.0, eval_vp(fam, p, points))


def primed_coefficients(fam: PotentialFamily, p: int):
    """``A'_p = A_p/upper^m``, ``B'_p = B_p/lower^n``; exact when the inputs are."""
    t = fam.term(p)
    c = pairwise_sum_coefficients(p, fam.d)
    return t.A / power(c.upper, t.m), t.B / power(c.lower, t.n)


def _diameter(lam, d):
    r = math.isqrt(d)
    if r * r == d:
        return as_exact(lam) * r
    return float(lam) * math.sqrt(d)


def vp_cube_lower_bound(fam: PotentialFamily, p: int, lam):
    """Lower bound of ``V_p`` over p-tuples inside one cube of rib ``lam``.

    Uses ``h(D) = A'/D^m - B'/D^n`` at ``D = min(lam*sqrt(d), D*)`` where ``D*``
    minimises ``h``; for ``lam*sqrt(d) <= D*`` this is ``h(lam*sqrt(d))``.
    """
    if not lam > 0:
        raise ValueError("cube rib must be positive")
    t = fam.term(p)
    Ap, Bp = primed_coefficients(fam, p)
    D = _diameter(lam, fam.d)
    if Bp != 0:
        # h'(D) < 0 iff D^(m-n) < m A' / (n B')
        crit = (Fraction(t.m) * Ap / (Fraction(t.n) * Bp)
                if is_exact(t.m, t.n, Ap, Bp) else t.m * Ap / (t.n * Bp))
        if power(D, t.m - t.n) > crit:
            D = power(crit, _inv(t.m - t.n))
    return Ap / power(D, t.m) - Bp / power(D, t.n)


def max_lambda_for_A3(fam: PotentialFamily) -> float:
    """Largest rib with ``V_p >= 0`` for every p-tuple inside one cube."""
    best = math.inf
    for p, t in fam.terms.items():
        if t.B == 0:
            continue
        c = pairwise_sum_coefficients(p, fam.d)
        best = min(best, float(t.threshold()) / (c.upper * math.sqrt(fam.d)))
    return best


@dataclass
class AxiomReport:
    p: int
    trials: int
    seed: int
    lam: float
    passed: bool
    failures: list = field(default_factory=list)

    def to_dict(self):
        return {"p": self.p, "trials": self.trials, "seed": self.seed, "lam": self.lam,
                "passed": self.passed, "failures": self.failures}


def _close(t: PotentialTerm, S: float, a: float, b: float, rtol: float) -> bool:
    if math.isinf(a) or math.isinf(b):
        return a == b
    # scale by the size of the two competing terms, not by V (which may cancel)
    return abs(a - b) <= rtol * (t.A / S ** t.m + t.B / S ** t.n)


def axiom_spot_check(fam: PotentialFamily, p: int, trials: int = 100, seed: int = 0,
                     lam: float | None = None, rtol: float = 1e-12) -> AxiomReport:
    """Seeded checks of symmetry, translation invariance and small-distance repulsion.

    Failures are collected, the first offending tuple of each kind is reported.
    With ``lam`` above the A3 limit the repulsion check is done at ``lam`` itself
    so the report can flag it.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    fam.term(p)
    rng = np.random.default_rng(seed)
    lam_a3 = max_lambda_for_A3(fam)
    if lam is None:
        lam = lam_a3 if math.isfinite(lam_a3) else 1.0
    spec = PartitionSpec(float(lam), fam.d)
    scale = 3.0 * (float(fam.term(p).threshold()) if fam.term(p).B else 1.0)
    failures = []
    seen = set()

    def fail(kind, **info):
        if kind not in seen:
            seen.add(kind)
            failures.append({"kind": kind, **info})

    t = fam.term(p)
    for _ in range(trials):
        x = rng.uniform(-scale, scale, size=(p, fam.d))
        v = eval_vp(fam, p, x)
        S = pairwise_sum(x)
        perm = rng.permutation(p)
        if not _close(t, S, v, eval_vp(fam, p, x[perm]), rtol):
            fail("symmetry", points=x.tolist(), permutation=perm.tolist())
        a = rng.uniform(-scale, scale, size=fam.d)
        if not _close(t, S, v, eval_vp(fam, p, x + a), rtol):
            fail("translation", points=x.tolist(), shift=a.tolist())
        r = rng.integers(-5, 6, size=fam.d)
        y = spec.lam * (r - 0.5 + rng.uniform(0.0, 1.0, size=(p, fam.d)))
        if cube_index(tuple(y[0]), spec) != cube_index(tuple(y[-1]), spec):
            continue
        vy = eval_vp(fam, p, y)
        if vy < 0:
            fail("repulsion", points=y.tolist(), value=vy, lam=spec.lam, lam_A3=lam_a3)
    return AxiomReport(p, trials, seed, float(lam), not failures, failures)
