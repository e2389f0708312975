"""Equilibria of a two-player trading game with cursed beliefs and Knightian uncertainty."""

__version__ = "0.1.0"

from .bands import (
    BandValidationError,
    CdfCurve,
    DistributionBand,
    band_from_dict,
    builtin_band,
    load_band,
    make_parametrized_band,
    normalize_band,
    zero_uncertainty_band,
)
from .best_response import BestResponseQuery, best_response
from .equilibria import (
    EquilibriumResult,
    iterate_maxmin_rational,
    solve_all_ckne,
    solve_ambiguous_ckne,
    solve_ambiguous_cursed_uncursed,
    solve_bne,
    solve_cursed_no_uncertainty,
    solve_cursed_uncursed,
    solve_knight_nash_cutoff,
    solve_partial,
    solve_symmetric_ckne,
)
from .oracle import GeneralStrategy, bruteforce_min_value, grid_best_response, simulate_game, verify_equilibrium
from .roots import ConvergenceError
from .valuation import CutoffStrategy, ValueQuery
from .welfare import welfare_report

__all__ = [
    "band_from_dict",
    "BandValidationError",
    "best_response",
    "BestResponseQuery",
    "bruteforce_min_value",
    "builtin_band",
    "CdfCurve",
    "ConvergenceError",
    "CutoffStrategy",
    "DistributionBand",
    "EquilibriumResult",
    "GeneralStrategy",
    "grid_best_response",
    "iterate_maxmin_rational",
    "load_band",
    "make_parametrized_band",
    "normalize_band",
    "simulate_game",
    "solve_all_ckne",
    "solve_ambiguous_ckne",
    "solve_ambiguous_cursed_uncursed",
    "solve_bne",
    "solve_cursed_no_uncertainty",
    "solve_cursed_uncursed",
    "solve_knight_nash_cutoff",
    "solve_partial",
    "solve_symmetric_ckne",
    "ValueQuery",
    "verify_equilibrium",
    "welfare_report",
    "zero_uncertainty_band",
]
