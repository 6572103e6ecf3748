"""Mutual authentication from one-time polynomial-hash MACs.

A library for the key-revealing mutual-authentication round (one one-time key
per round instead of two), with exact enumeration tools that verify its
composable security bound, attack-rate estimators, multi-round budget
calculators, and a framed TCP transport for running rounds between real peers.
"""

from .asu2 import (
    AuthKey,
    CheckReport,
    FamilyParams,
    MessageBlocks,
    check_asu2,
    failure_key,
    gf_mul,
    tag,
)
from .keys import KeyDistribution, KeyPool, biased_distribution, epsilon_perfectness, trace_distance
from .protocol import AliceSession, BobSession, Response, RoundOutcome, run_round
from .adversary import (
    AdversaryStrategy,
    Channel,
    RateEstimate,
    estimate_impersonation,
    estimate_response_forge,
    estimate_substitution,
)
from .uc import (
    BOTTOM,
    DistinguisherStrategy,
    JointDistribution,
    exact_uc_distance,
    ideal_exec,
    max_distance_search,
    real_exec,
)
from .budget import BudgetParams, BudgetRow, awr_table, crossover_report, straightforward_table

__version__ = "0.1.0"
