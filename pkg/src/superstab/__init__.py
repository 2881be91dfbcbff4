"""Stability and superstability checks for many-body potentials on cube partitions."""
from importlib.metadata import PackageNotFoundError, version

from .config import (Configuration, DimensionError, PartitionSpec, cube_index, cube_indices,
                     occupancy, occupancy_power_sum)
from .criteria import (ConditionReport, CriteriaError, PairConstants, PairHypothesis,
                       condition_margin_p, find_lambda_max, full_report, pair_constants, series_B)
from .energy import EnergyBreakdown, p_body_energy, stability_rhs, total_energy
from .integrals import (IntegrationSettings, IpEstimate, TranscriptionGuardError, ball_volume,
                        ip_bound_dd, ip_closed_form_d1, ip_lattice, ip_majorant_d1, ip_monte_carlo)
from .potentials import (FamilyError, PotentialFamily, PotentialTerm, eval_vp, max_lambda_for_A3,
                         pairwise_sum, paper_catalog, paper_example_family, vp_cube_lower_bound)

try:
    __version__ = version("superstab")
except PackageNotFoundError:  # pragma: no cover
    __version__ = "0+unknown"
