"""Exact divergences, k-cuts, privacy regions and DP conversion laws on finite spaces."""

from divkit.convert import (
    ConversionResult,
    divergence_to_dp_check,
    hellinger_to_dp,
    rdp_to_dp,
    rdp_to_dp_mironov,
    rdp_to_dp_refined,
    rdp_to_dp_tangent,
)
from divkit.core import (
    BvnDecomposition,
    Channel,
    DeterministicRule,
    Dist,
    bvn_decompose,
    compose,
    dirac,
    pushforward,
)
from divkit.divergences import (
    DivergenceSpec,
    QuasiConvexFn,
    WeightFn,
    eps_divergence,
    evaluate,
    f_divergence,
    f_sup_divergence,
    hellinger,
    kl,
    max_divergence,
    renyi,
    total_variation,
)
from divkit.errors import CapacityError, DivkitError, DomainError, NumericError, SamplingError
from divkit.kcut import CutResult, counterexample_pair, generatedness_gap, k_cut
from divkit.mechanisms import PrivacyClaim, RandomizedResponse, check_claim, error_cloud, mech_output
from divkit.normal import phi, phi_inv
from divkit.regions import ErrorPoint, RegionSpec, ht_check, region_contains, region_contains_region

__version__ = "0.1.0"
