"""Total and p-body energies by exhaustive subset enumeration."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .config import Configuration, OccupancyMap, occupancy_power_sum
from .kernels import p_body_energy_kernel
from .potentials import FamilyError, PotentialFamily

MAX_POINTS = 40
MAX_PCAP = 6


class SizeGuardError(ValueError):
    pass


def _as_config(gamma, d):
    if isinstance(gamma, Configuration):
        if gamma.dimension != d:
            raise FamilyError(f"configuration is {gamma.dimension}-d, family is {d}-d")
        return gamma
    return Configuration.from_points(gamma, d)


def p_body_energy(fam: PotentialFamily, gamma, p: int) -> float:
    """Sum of V_p over all p-subsets of ``gamma``; ``inf`` on a fully coincident subset."""
    if p < 2:
        raise ValueError("p must be >= 2")
    cfg = _as_config(gamma, fam.d)
    if len(cfg) < p:
        return 0.0
    t = fam.term(p)
    return p_body_energy_kernel(cfg.points, p, t.A, t.B, t.m, t.n)


@dataclass(frozen=True)
class EnergyBreakdown:
    per_p: dict = field(default_factory=dict)
    total: float = 0.0
    n_points: int = 0

    def to_dict(self):
        return {"n_points": self.n_points, "total": self.total,
                "per_p": {str(p): v for p, v in sorted(self.per_p.items())}}


def total_energy(fam: PotentialFamily, gamma, p_cap: int | None = None,
                 allow_large: bool = False) -> EnergyBreakdown:
    """U(gamma) = sum of U^(p) for 2 <= p <= p_cap.

    Enumeration costs sum_p C(|gamma|, p); the default guard is |gamma| <= 40
    and p_cap <= 6, lifted by ``allow_large``.
    """
    cfg = _as_config(gamma, fam.d)
    p_cap = fam.p_max if p_cap is None else p_cap
    if p_cap > fam.p_max:
        raise FamilyError(f"p_cap={p_cap} exceeds p_max={fam.p_max}")
    if not allow_large and (len(cfg) > MAX_POINTS or p_cap > MAX_PCAP):
        raise SizeGuardError(
            f"enumeration guard: |gamma|={len(cfg)} (max {MAX_POINTS}), "
            f"p_cap={p_cap} (max {MAX_PCAP}); pass allow_large to override")
    per_p = {p: p_body_energy(fam, cfg, p) for p in range(2, p_cap + 1)}
    vals = list(per_p.values())
    total = math.inf if any(v == math.inf for v in vals) else math.fsum(vals)
    return EnergyBreakdown(per_p, total, len(cfg))


def stability_rhs(occ: OccupancyMap, A, B, m_exp=2):
    """``A * sum |gamma_D|^m_exp - B |gamma|``; ``A=0`` gives the plain stability form."""
    if A < 0 or B < 0:
        raise ValueError("A and B must be nonnegative")
    n = sum(occ.values())
    return A * occupancy_power_sum(occ, m_exp) - B * n
