"""Simulator and tile-set compiler for asynchronous signal-passing tile
self-assembly: model core, exploration engines, construction generators
and verification oracles."""

from .model import (
    Action,
    Assembly,
    GlueSpec,
    GlueState,
    STAMSystem,
    Side,
    TileInstance,
    TileType,
    canonical_form,
    glue_transition_valid,
    single_tile_assembly,
    system_from_types,
    validate_system,
)
from .dynamics import (
    Move,
    apply_pending_action,
    binding_graph,
    bond_strength,
    break_apart,
    combine,
    enumerate_breaks,
    enumerate_combinations,
    is_tau_stable,
)
from .engine import Trace, explore, replay, run_stochastic

__all__ = [
    "Action",
    "Assembly",
    "GlueSpec",
    "GlueState",
    "STAMSystem",
    "Side",
    "TileInstance",
    "TileType",
    "Move",
    "Trace",
    "apply_pending_action",
    "binding_graph",
    "bond_strength",
    "break_apart",
    "canonical_form",
    "combine",
    "enumerate_breaks",
    "enumerate_combinations",
    "explore",
    "glue_transition_valid",
    "is_tau_stable",
    "replay",
    "run_stochastic",
    "single_tile_assembly",
    "system_from_types",
    "validate_system",
]

__version__ = "0.1.0"
