"""Core data model for signal-passing tile systems.

Tiles are unit squares with per-side sets of glues.  A glue carries a type
name, an integer strength and one of three states (latent / on / off).
Binding a glue fires the owning tile's transition function, which queues
state-change requests (actions) into the tile instance's pending multiset.
Everything here is an immutable value; dynamics produce new assemblies
rather than mutating old ones.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, Mapping, Optional, Sequence


class GlueState(IntEnum):
    LATENT = 0
    ON = 1
    OFF = 2


_STATE_NAMES = {GlueState.LATENT: "latent", GlueState.ON: "on", GlueState.OFF: "off"}
_STATE_BY_NAME = {v: k for k, v in _STATE_NAMES.items()}

#: The only legal state changes.  OFF is absorbing; ON can be reached once.
VALID_GLUE_TRANSITIONS = frozenset(
    {
        (GlueState.LATENT, GlueState.ON),
        (GlueState.LATENT, GlueState.OFF),
        (GlueState.ON, GlueState.OFF),
    }
)


def glue_transition_valid(frm: GlueState, to: GlueState) -> bool:
    """True iff `frm -> to` is a legal glue (or label) state change."""
    return (frm, to) in VALID_GLUE_TRANSITIONS


def state_name(s: GlueState) -> str:
    return _STATE_NAMES[GlueState(s)]


def state_from_name(name: str) -> GlueState:
    return _STATE_BY_NAME[name]


class Side(IntEnum):
    N = 0
    E = 1
    S = 2
    W = 3


SIDE_NAMES = {Side.N: "N", Side.E: "E", Side.S: "S", Side.W: "W"}
SIDE_BY_NAME = {v: k for k, v in SIDE_NAMES.items()}
#: Lattice offset of the neighbour a given side faces.
SIDE_VECTORS = {Side.N: (0, 1), Side.E: (1, 0), Side.S: (0, -1), Side.W: (-1, 0)}
OPPOSITE = {Side.N: Side.S, Side.S: Side.N, Side.E: Side.W, Side.W: Side.E}

GLUE = "glue"
LABEL = "label"


@dataclass(frozen=True, order=True)
class Action:
    """A queued request to flip one glue or label to ON or OFF.

    ``side`` is None for label actions.  LATENT is never a valid target.
    """

    kind: str  # GLUE or LABEL
    side: Optional[int]  # Side value, None for labels
    target: str  # glue type name or label name
    new_state: int  # GlueState.ON or GlueState.OFF

    def __post_init__(self):
        if self.new_state == GlueState.LATENT:
            raise ValueError("LATENT is never an action target")


def glue_on(side: Side, target: str) -> Action:
    return Action(GLUE, int(side), target, int(GlueState.ON))


def glue_off(side: Side, target: str) -> Action:
    return Action(GLUE, int(side), target, int(GlueState.OFF))


def label_on(target: str) -> Action:
    return Action(LABEL, None, target, int(GlueState.ON))


def label_off(target: str) -> Action:
    return Action(LABEL, None, target, int(GlueState.OFF))


@dataclass(frozen=True)
class GlueSpec:
    """One glue slot on one side of a tile type."""

    side: int
    name: str
    strength: int = 1
    init_state: int = int(GlueState.LATENT)


class TileType:
    """An active tile type: per-side glues, labels and a transition function.

    ``delta`` maps (side, glue_name) -> sequence of Actions queued when that
    glue binds.  Undefined pairs yield no actions.
    """

    __slots__ = (
        "name",
        "glue_specs",
        "labels",
        "delta",
        "slot_index",
        "slots_by_side",
        "label_names",
        "label_index",
        "init_glue_states",
        "init_label_states",
    )

    def __init__(
        self,
        name: str,
        glues: Sequence[GlueSpec] = (),
        labels: Mapping[str, int] | Sequence[tuple[str, int]] = (),
        delta: Mapping[tuple[int, str], Sequence[Action]] | None = None,
    ):
        self.name = name
        self.glue_specs: tuple[GlueSpec, ...] = tuple(glues)
        if isinstance(labels, Mapping):
            labels = tuple(sorted(labels.items()))
        self.labels: tuple[tuple[str, int], ...] = tuple(labels)
        self.delta: dict[tuple[int, str], tuple[Action, ...]] = {
            (int(s), g): tuple(acts) for (s, g), acts in (delta or {}).items()
        }
        self.slot_index: dict[tuple[int, str], int] = {}
        self.slots_by_side: dict[int, list[int]] = {int(s): [] for s in Side}
        for i, spec in enumerate(self.glue_specs):
            key = (int(spec.side), spec.name)
            if key not in self.slot_index:  # duplicates caught by validation
                self.slot_index[key] = i
            self.slots_by_side[int(spec.side)].append(i)
        self.label_names = tuple(l for l, _ in self.labels)
        self.label_index = {l: i for i, l in enumerate(self.label_names)}
        self.init_glue_states = tuple(GlueState(s.init_state) for s in self.glue_specs)
        self.init_label_states = tuple(GlueState(st) for _, st in self.labels)

    def actions_for(self, side: int, glue_name: str) -> tuple[Action, ...]:
        return self.delta.get((int(side), glue_name), ())

    def glues_on_side(self, side: int) -> list[GlueSpec]:
        return [self.glue_specs[i] for i in self.slots_by_side[int(side)]]

    def max_glues_per_side(self) -> int:
        return max((len(v) for v in self.slots_by_side.values()), default=0)

    def __repr__(self):
        return f"TileType({self.name!r})"


class TileInstance:
    """A placed copy of a tile type with its own state and pending multiset."""

    __slots__ = ("type", "glue_states", "label_states", "pending", "_key")

    def __init__(
        self,
        type: TileType,
        glue_states: tuple[int, ...] | None = None,
        label_states: tuple[int, ...] | None = None,
        pending: tuple[Action, ...] = (),
    ):
        self.type = type
        self.glue_states = (
            tuple(type.init_glue_states) if glue_states is None else glue_states
        )
        self.label_states = (
            tuple(type.init_label_states) if label_states is None else label_states
        )
        self.pending = tuple(sorted(pending))
        self._key = None

    def key(self):
        """Full-state identity (type plus glue/label states plus pending)."""
        if self._key is None:
            self._key = (
                self.type.name,
                self.glue_states,
                self.label_states,
                self.pending,
            )
        return self._key

    def glue_state(self, side: int, glue_name: str) -> GlueState:
        i = self.type.slot_index.get((int(side), glue_name))
        if i is None:
            return GlueState.LATENT
        return GlueState(self.glue_states[i])

    def label_state(self, label: str) -> GlueState:
        i = self.type.label_index.get(label)
        if i is None:
            return GlueState.LATENT
        return GlueState(self.label_states[i])

    def with_glue_state(self, slot: int, st: GlueState) -> "TileInstance":
        gs = list(self.glue_states)
        gs[slot] = int(st)
        return TileInstance(self.type, tuple(gs), self.label_states, self.pending)

    def with_pending(self, pending: Iterable[Action]) -> "TileInstance":
        return TileInstance(
            self.type, self.glue_states, self.label_states, tuple(pending)
        )

    def __repr__(self):
        return f"TileInstance({self.type.name!r}, pending={len(self.pending)})"


Coord = tuple[int, int]


class Assembly:
    """A finite placement of tile instances on the integer lattice."""

    __slots__ = ("tiles", "_canonical", "_bonds", "_exposed")

    def __init__(self, tiles: Mapping[Coord, TileInstance]):
        self.tiles: dict[Coord, TileInstance] = dict(tiles)
        self._canonical = None
        self._bonds = None
        self._exposed = None

    def __len__(self):
        return len(self.tiles)

    def positions(self):
        return self.tiles.keys()

    def replace(self, pos: Coord, inst: TileInstance) -> "Assembly":
        tiles = dict(self.tiles)
        tiles[pos] = inst
        return Assembly(tiles)

    def translated(self, dx: int, dy: int) -> "Assembly":
        return Assembly({(x + dx, y + dy): t for (x, y), t in self.tiles.items()})

    def canonical_key(self):
        """Translation-normalized full-state key (cached)."""
        if self._canonical is None:
            ox, oy = min(self.tiles)
            items = tuple(
                sorted(
                    ((x - ox, y - oy), t.key()) for (x, y), t in self.tiles.items()
                )
            )
            self._canonical = items
        return self._canonical

    def canonical_hash(self) -> str:
        return hashlib.sha256(repr(self.canonical_key()).encode()).hexdigest()[:24]

    def has_pending(self) -> bool:
        return any(t.pending for t in self.tiles.values())

    def pending_count(self) -> int:
        return sum(len(t.pending) for t in self.tiles.values())

    def __eq__(self, other):
        return isinstance(other, Assembly) and self.canonical_key() == other.canonical_key()

    def __hash__(self):
        return hash(self.canonical_key())

    def __repr__(self):
        return f"Assembly(size={len(self.tiles)})"


def canonical_form(a: Assembly) -> tuple[Assembly, str]:
    """Translate ``a`` so its minimal occupied coordinate sits at the origin.

    Returns the translated assembly and a stable hash over its full state
    (positions, types, glue/label states and pending multisets).
    """
    if not a.tiles:
        raise ValueError("empty assembly")
    ox, oy = min(a.tiles)
    moved = a if (ox, oy) == (0, 0) else a.translated(-ox, -oy)
    return moved, a.canonical_hash()


def single_tile_assembly(tt: TileType) -> Assembly:
    return Assembly({(0, 0): TileInstance(tt)})


@dataclass
class STAMSystem:
    """An initial assembly set plus a temperature."""

    tile_types: dict[str, TileType]
    initial_assemblies: list[Assembly]
    temperature: int = 1
    name: str = ""

    def singleton_types(self) -> list[TileType]:
        return [t for t in self.tile_types.values()]


def system_from_types(
    types: Sequence[TileType],
    temperature: int = 1,
    extra_assemblies: Sequence[Assembly] = (),
    name: str = "",
) -> STAMSystem:
    """System whose initial set is one singleton per type plus extras."""
    tmap = {t.name: t for t in types}
    initial = [single_tile_assembly(t) for t in types]
    initial.extend(extra_assemblies)
    return STAMSystem(tmap, initial, temperature, name)


def validate_system(system: STAMSystem) -> list[str]:
    """Check every type and initial assembly against the model's rules.

    Returns a list of human-readable violations; empty means valid.
    Violations are data, not exceptions.
    """
    from . import dynamics  # deferred: avoids an import cycle

    out: list[str] = []
    if system.temperature < 1:
        out.append("temperature must be a positive integer")
    for tt in system.tile_types.values():
        seen: set[tuple[int, str]] = set()
        for spec in tt.glue_specs:
            key = (spec.side, spec.name)
            side = SIDE_NAMES[Side(spec.side)]
            if key in seen:
                out.append(f"{tt.name}: duplicate glue type {spec.name!r} on side {side}")
            seen.add(key)
            if spec.strength < 1:
                out.append(f"{tt.name}: glue {spec.name!r} on {side} has strength < 1")
            if spec.init_state == GlueState.OFF:
                out.append(
                    f"{tt.name}: glue {spec.name!r} on {side} has invalid initial state off"
                )
        for label, st in tt.labels:
            if st == GlueState.OFF:
                out.append(f"{tt.name}: label {label!r} has invalid initial state off")
        for (side, gname), actions in tt.delta.items():
            side_n = SIDE_NAMES[Side(side)]
            if (side, gname) not in tt.slot_index:
                out.append(
                    f"{tt.name}: delta keyed on absent glue {gname!r} side {side_n}"
                )
            for act in actions:
                if act.new_state == GlueState.LATENT:
                    out.append(f"{tt.name}: action targets LATENT state")
                if act.kind == GLUE:
                    if (act.side, act.target) not in tt.slot_index:
                        out.append(
                            f"{tt.name}: action targets absent glue {act.target!r} "
                            f"side {SIDE_NAMES[Side(act.side)]}"
                        )
                else:
                    if act.target not in tt.label_index:
                        out.append(f"{tt.name}: action targets absent label {act.target!r}")
    for idx, asm in enumerate(system.initial_assemblies):
        if not asm.tiles:
            out.append(f"initial assembly #{idx} is empty")
            continue
        for pos, inst in asm.tiles.items():
            if inst.type.name not in system.tile_types:
                out.append(f"initial assembly #{idx}: unknown type {inst.type.name!r}")
            if inst.pending:
                out.append(f"initial assembly #{idx}: tile at {pos} has nonempty pending set")
            for i, st in enumerate(inst.glue_states):
                if st == GlueState.OFF:
                    spec = inst.type.glue_specs[i]
                    out.append(
                        f"initial assembly #{idx}: tile at {pos} glue {spec.name!r} starts off"
                    )
        if len(asm) > 1 and not dynamics.is_tau_stable(asm, system.temperature):
            out.append(f"initial assembly #{idx} is not tau-stable")
    return out
