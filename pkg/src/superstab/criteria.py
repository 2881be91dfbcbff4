"""Sufficient conditions for (super)stability and the resulting constants.

Per-p condition: ``V_p^p(cube)/p^p - p * I_p^{1|p-1} >= 0``; the constant is
``B = B2 + sum_{p>2} p^(p+1) I_p^{1|p-1}``. ``I_p^{1|p-1}`` is replaced by the
integral-limit surrogate ``I_p / lam^((p-1)d)`` throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from scipy.optimize import brentq

from ._exact import decode_number, encode_number
from .integrals import IP_SOURCES, IntegrationSettings, ip_lattice, ip_monte_carlo
from .potentials import PotentialFamily, max_lambda_for_A3, vp_cube_lower_bound

VERDICTS = ("stable", "superstable", "strong-superstable", "inconclusive")
SURROGATE_NOTE = "I_p^{1|p-1} ~ I_p / lambda^((p-1)d) (integral limit of the lattice sum)"


class CriteriaError(ValueError):
    pass


def _check_source(source):
    if source not in IP_SOURCES:
        raise ValueError(f"ip source must be one of {IP_SOURCES}")


def _margin(fam, p, lam, ip_source):
    vpl = vp_cube_lower_bound(fam, p, lam)
    ipl = ip_lattice(fam, p, lam, ip_source)
    return vpl, ipl, vpl / p ** p - p * ipl


def condition_margin_p(fam: PotentialFamily, p: int, lam, ip_source: str = "majorant"):
    """Left side of the per-p condition; nonnegative iff it holds at ``lam``."""
    _check_source(ip_source)
    if p <= 2:
        raise CriteriaError("the per-p condition is for p > 2")
    lam_a3 = max_lambda_for_A3(fam)
    if lam > lam_a3:
        raise CriteriaError(f"lambda={float(lam)} exceeds the repulsion limit {lam_a3}")
    return _margin(fam, p, lam, ip_source)[2]


@dataclass(frozen=True)
class SeriesResult:
    series_sum: float
    tail_flag: bool
    B_increment: float
    terms: tuple = ()


def series_B(fam: PotentialFamily, lam, p_cap: int | None = None, tail_tol: float = 1e-6,
             ip_source: str = "majorant") -> SeriesResult:
    """Partial sum of ``p^(p+1) I_p^{1|p-1}`` over ``3 <= p <= p_cap``.

    ``tail_flag`` is true when the sum is complete (``p_cap == p_max``; the
    family has no terms beyond) or, for a genuine truncation, when the terms
    decrease and the last one is below ``tail_tol`` times the partial sum.
    """
    _check_source(ip_source)
    p_cap = fam.p_max if p_cap is None else p_cap
    if p_cap > fam.p_max:
        raise CriteriaError(f"p_cap={p_cap} exceeds p_max={fam.p_max}")
    terms = tuple(p ** (p + 1) * ip_lattice(fam, p, lam, ip_source) for p in range(3, p_cap + 1))
    total = sum(terms, Fraction(0) if all(isinstance(t, Fraction) for t in terms) else 0.0)
    if not terms or p_cap == fam.p_max or total == 0:
        flag = True
    else:
        decreasing = all(b < a for a, b in zip(terms, terms[1:]))
        flag = decreasing and terms[-1] < tail_tol * total
    return SeriesResult(total, flag, total, terms)


@dataclass(frozen=True)
class PairConstants:
    A2: float
    B2: float
    lam: float


def pair_constants(fam: PotentialFamily, lam, ip_source: str = "majorant") -> PairConstants:
    """``A2 = V_2^2/4 - 2 I_2``, ``B2 = 2 I_2 + A2`` (the ``+A2`` covers singleton cubes)."""
    _check_source(ip_source)
    vpl = vp_cube_lower_bound(fam, 2, lam)
    ipl = ip_lattice(fam, 2, lam, ip_source)
    A2 = vpl / 4 - 2 * ipl
    if not A2 > 0:
        raise CriteriaError(f"pair part not certified at lambda={float(lam)}: A2={float(A2):.6g}")
    return PairConstants(A2, 2 * ipl + A2, lam)


@dataclass(frozen=True)
class PairHypothesis:
    """User-asserted class of the pair energy, used only to name the verdict."""

    cls: str = "superstable"
    exponent: float = 2.0

    def __post_init__(self):
        if self.cls not in VERDICTS[:3]:
            raise ValueError(f"pair class must be one of {VERDICTS[:3]}")
        if self.cls == "strong-superstable" and not self.exponent > 2:
            raise ValueError("strong superstability needs an exponent > 2")


def _feasible(fam, lam, p_cap, ip_source):
    try:
        pair_constants(fam, lam, ip_source)
    except CriteriaError:
        return False
    return all(_margin(fam, p, lam, ip_source)[2] >= 0 for p in range(3, p_cap + 1))


def binding_p(fam: PotentialFamily, lam, p_cap: int | None = None, ip_source: str = "majorant"):
    """The p > 2 with the smallest margin at ``lam`` (None without p > 2 terms)."""
    p_cap = fam.p_max if p_cap is None else p_cap
    ps = range(3, p_cap + 1)
    return min(ps, key=lambda p: _margin(fam, p, lam, ip_source)[2], default=None)


def find_lambda_max(fam: PotentialFamily, p_cap: int | None = None, tol: float = 1e-6,
                    ip_source: str = "majorant") -> float:
    """Largest feasible rib up to the repulsion limit, by halving then bisection.

    Returns the lower end of the final bracket, so the result itself is feasible.
    """
    _check_source(ip_source)
    if not tol > 0:
        raise ValueError("tol must be positive")
    p_cap = fam.p_max if p_cap is None else p_cap
    hi = max_lambda_for_A3(fam)
    if not math.isfinite(hi):
        raise CriteriaError("no repulsion limit (all B_p = 0); every rib is admissible")
    if _feasible(fam, hi, p_cap, ip_source):
        return float(hi)
    lo = hi / 2
    for _ in range(200):
        if _feasible(fam, lo, p_cap, ip_source):
            break
        hi, lo = lo, lo / 2
    else:
        raise CriteriaError("no feasible lambda found")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _feasible(fam, mid, p_cap, ip_source):
            lo = mid
        else:
            hi = mid
    return float(lo)


# the p=3 worked example written out: V/27 - 3 I_3 / lam^2 with I_3 = 477/20480
PAPER_BRACKET = (Fraction(1, 110592), Fraction(1, 1728), Fraction(1431, 20480))
PAPER_B_TERM = Fraction(1431, 4096)
PAPER_LAMBDA = 0.29874


def paper_bracket(lam: float) -> float:
    a, b, c = PAPER_BRACKET
    return float(a) / lam ** 12 - float(b) / lam ** 6 - float(c) / lam ** 2


def paper_bracket_root(lo: float = 0.1, hi: float = 0.5, tol: float = 1e-12) -> float:
    """Root of the worked-example bracket via Brent's method (independent of bisection)."""
    return brentq(paper_bracket, lo, hi, xtol=tol)


@dataclass(frozen=True)
class MarginEntry:
    p: int
    vpp_lower: float
    ip_lattice: float
    margin: float

    def to_dict(self):
        return {"p": self.p, "vpp_lower": encode_number(self.vpp_lower),
                "ip_lattice": encode_number(self.ip_lattice), "margin": encode_number(self.margin)}

    @classmethod
    def from_dict(cls, d):
        return cls(d["p"], decode_number(d["vpp_lower"]), decode_number(d["ip_lattice"]),
                   decode_number(d["margin"]))


_NUMERIC = ("series_sum", "B", "A2", "B2")


@dataclass
class ConditionReport:
    lam: float
    entries: list
    series_terms: list
    series_sum: float
    tail_flag: bool
    B: float | None
    A2: float
    B2: float | None
    verdict: str
    ip_source: str = "majorant"
    notes: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)
    monte_carlo: dict = field(default_factory=dict)

    def to_dict(self):
        out = {"lambda": encode_number(self.lam), "ip_source": self.ip_source,
               "surrogate": SURROGATE_NOTE,
               "per_p": [e.to_dict() for e in self.entries],
               "series_terms": [encode_number(t) for t in self.series_terms],
               "tail_flag": self.tail_flag, "verdict": self.verdict,
               "notes": list(self.notes), "provenance": dict(self.provenance)}
        for k in _NUMERIC:
            v = getattr(self, k)
            out[k] = None if v is None else encode_number(v)
        if self.monte_carlo:
            out["monte_carlo"] = {str(p): e for p, e in self.monte_carlo.items()}
        return out

    @classmethod
    def from_dict(cls, d):
        num = {k: None if d[k] is None else decode_number(d[k]) for k in _NUMERIC}
        return cls(lam=decode_number(d["lambda"]),
                   entries=[MarginEntry.from_dict(e) for e in d["per_p"]],
                   series_terms=[decode_number(t) for t in d["series_terms"]],
                   tail_flag=d["tail_flag"], verdict=d["verdict"],
                   ip_source=d.get("ip_source", "majorant"), notes=list(d.get("notes", [])),
                   provenance=dict(d.get("provenance", {})),
                   monte_carlo={int(p): e for p, e in d.get("monte_carlo", {}).items()},
                   **num)


def full_report(fam: PotentialFamily, lam, p_cap: int | None = None,
                settings: IntegrationSettings | None = None, ip_source: str = "majorant",
                pair_hypothesis: PairHypothesis | None = None,
                tail_tol: float = 1e-6) -> ConditionReport:
    """Margins, series, constants and a verdict at one cube rib.

    With ``settings`` the Monte Carlo I_p of every p is attached for comparison.
    Margins above the repulsion limit are still recorded, with an inconclusive verdict.
    """
    _check_source(ip_source)
    if not lam > 0:
        raise ValueError("cube rib must be positive")
    p_cap = fam.p_max if p_cap is None else p_cap
    notes = []
    analytic = "paper" if ip_source == "paper" else "closed-form"
    lam_a3 = max_lambda_for_A3(fam)
    if lam > lam_a3:
        notes.append(f"lambda exceeds the repulsion limit {lam_a3:.6g}")

    entries = [MarginEntry(p, *_margin(fam, p, lam, ip_source)) for p in range(3, p_cap + 1)]
    series = series_B(fam, lam, p_cap, tail_tol, ip_source)
    if not series.tail_flag:
        notes.append("series truncation not certified (tail_flag false)")

    vpl2 = vp_cube_lower_bound(fam, 2, lam)
    ipl2 = ip_lattice(fam, 2, lam, ip_source)
    A2 = vpl2 / 4 - 2 * ipl2
    B2 = B = None
    if A2 > 0:
        B2 = 2 * ipl2 + A2
        B = B2 + series.series_sum
    else:
        notes.append("pair part not certified: A2 <= 0")

    bad = [e.p for e in entries if e.margin < 0]
    if bad:
        notes.append(f"condition fails at p={bad}")
    ok = not bad and series.tail_flag and A2 > 0 and lam <= lam_a3
    verdict = (pair_hypothesis.cls if pair_hypothesis else "superstable") if ok else "inconclusive"

    mc = {}
    if settings is not None:
        for p in range(2, p_cap + 1):
            mc[p] = ip_monte_carlo(fam, p, settings).to_dict()

    provenance = {"lambda": "input", "per_p.vpp_lower": "closed-form",
                  "per_p.ip_lattice": analytic, "per_p.margin": analytic,
                  "series_terms": analytic, "series_sum": analytic, "A2": analytic,
                  "B2": analytic, "B": analytic, "verdict": "closed-form"}
    if mc:
        provenance["monte_carlo"] = "monte-carlo"
    return ConditionReport(lam, entries, list(series.terms), series.series_sum, series.tail_flag,
                           B, A2, B2, verdict, ip_source, notes, provenance, mc)
