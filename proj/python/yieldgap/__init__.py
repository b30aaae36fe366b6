"""Profit-maximizing input plans for wheat farms and their life-cycle impacts."""

from ._core import (
    ConfigError,
    CycleError,
    Decision,
    DomainError,
    Error,
    Farm,
    MissingEntryError,
    ParseError,
    StressFactor,
    assess,
    conditional_yield,
    conditional_yields,
    convex_hull,
    fit_frontier,
    load_farms,
    nw_frontier,
    one_factor_solution,
    optimal_inputs,
    required_input,
    run_scenario,
)

__all__ = [name for name in dir() if not name.startswith("_")]
