"""Distributed beamforming and achievable rate regions for two-way relay networks.

Single-antenna relays amplify and forward the superposed signals of two
sources; each source removes its own contribution before decoding. The
package computes optimal relay weights (closed form for reciprocal
channels, SDP relaxation with bisection otherwise), sweeps rate regions,
and ships brute-force oracles plus a symbol-level simulator for checking.
"""

from .channel import (
    ChannelRealization,
    EffectiveChannels,
    Individual,
    SumPower,
    SystemConfig,
    effective_channels,
    rate_pair,
    relay_powers,
    simulate_link,
    snr_pair,
    snr_to_rate,
)
from .errors import (
    ContractViolation,
    DegenerateChannelError,
    DimensionError,
    NumericalFailure,
    ParameterError,
)
from .experiment import ExperimentConfig, gen_channels, run_experiment
from .heuristics import equal_power, greedy_phase, max_power
from .nonreciprocal import (
    BisectionConfig,
    RateProfile,
    bisect_individual,
    bisect_sum_power,
    rank_one_reduce,
    randomize_rank_one,
    solve_nonreciprocal,
)
from .reciprocal import (
    beam_from_amplitudes,
    phase_align,
    wsismin_individual,
    wsismin_sum_power,
)
from .region import RegionEstimate, convex_hull, map_u, pareto_filter, sweep_nonreciprocal, sweep_reciprocal

__version__ = "0.1.0"

__all__ = [
    "ChannelRealization",
    "EffectiveChannels",
    "Individual",
    "SumPower",
    "SystemConfig",
    "effective_channels",
    "rate_pair",
    "relay_powers",
    "simulate_link",
    "snr_pair",
    "snr_to_rate",
    "ContractViolation",
    "DegenerateChannelError",
    "DimensionError",
    "NumericalFailure",
    "ParameterError",
    "ExperimentConfig",
    "gen_channels",
    "run_experiment",
    "equal_power",
    "greedy_phase",
    "max_power",
    "BisectionConfig",
    "RateProfile",
    "bisect_individual",
    "bisect_sum_power",
    "rank_one_reduce",
    "randomize_rank_one",
    "solve_nonreciprocal",
    "beam_from_amplitudes",
    "phase_align",
    "wsismin_individual",
    "wsismin_sum_power",
    "RegionEstimate",
    "convex_hull",
    "map_u",
    "pareto_filter",
    "sweep_nonreciprocal",
    "sweep_reciprocal",
]
