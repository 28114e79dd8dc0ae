"""Producibility transitions: combination, breaking, glue and label actions.

Bond semantics: two abutting glues bind iff they have equal type and
strength and both are ON.  A *bond event* (new pair formed, whether by a
combination or by a pending action switching a glue ON next to an ON
partner) fires both tiles' transition functions, appending their outputs
to the respective pending multisets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

import networkx as nx

from .model import (
    GLUE,
    LABEL,
    OPPOSITE,
    SIDE_VECTORS,
    Action,
    Assembly,
    Coord,
    GlueState,
    Side,
    TileInstance,
    glue_transition_valid,
)

COMBINE = "combine"
BREAK = "break"
GLUE_ACTION = "glue_action"
LABEL_ACTION = "label_action"


@dataclass(frozen=True)
class Move:
    """One enabled transition in a universe of assemblies.

    ``targets`` holds the operand assembly indices/ids (scheduler-defined);
    payload fields depend on ``kind``.
    """

    kind: str
    targets: tuple
    offset: Optional[Coord] = None  # COMBINE: translation applied to second operand
    pos: Optional[Coord] = None  # GLUE/LABEL action position
    action: Optional[Action] = None
    part: Optional[frozenset] = None  # BREAK: positions of the split-off part


def _matched_pairs(a: TileInstance, b: TileInstance, side_a: Side):
    """Glue names matched ON-to-ON between tile a's side and b's facing side."""
    out = []
    side_b = OPPOSITE[side_a]
    for i in a.type.slots_by_side[int(side_a)]:
        if a.glue_states[i] != GlueState.ON:
            continue
        spec = a.type.glue_specs[i]
        j = b.type.slot_index.get((int(side_b), spec.name))
        if j is None:
            continue
        spec_b = b.type.glue_specs[j]
        if spec_b.strength == spec.strength and b.glue_states[j] == GlueState.ON:
            out.append((spec.name, spec.strength))
    return out


def bond_strength(a: Assembly, p: Coord, q: Coord) -> int:
    """Total strength of ON-ON matched glues between adjacent occupied p, q."""
    if p not in a.tiles or q not in a.tiles:
        raise ValueError(f"positions {p}, {q} must be occupied")
    dx, dy = q[0] - p[0], q[1] - p[1]
    side = {v: s for s, v in SIDE_VECTORS.items()}.get((dx, dy))
    if side is None:
        raise ValueError(f"positions {p}, {q} are not lattice-adjacent")
    return sum(s for _, s in _matched_pairs(a.tiles[p], a.tiles[q], side))


def binding_graph(a: Assembly) -> nx.Graph:
    """Weighted graph over occupied positions; edges are positive bonds."""
    g = nx.Graph()
    g.add_nodes_from(a.positions())
    for (x, y), inst in a.tiles.items():
        for side in (Side.N, Side.E):  # each undirected pair once
            dx, dy = SIDE_VECTORS[side]
            q = (x + dx, y + dy)
            other = a.tiles.get(q)
            if other is None:
                continue
            w = sum(s for _, s in _matched_pairs(inst, other, side))
            if w > 0:
                g.add_edge((x, y), q, weight=w)
    return g


def _bond_graph_cached(a: Assembly) -> nx.Graph:
    if a._bonds is None:
        a._bonds = binding_graph(a)
    return a._bonds


def is_tau_stable(a: Assembly, tau: int) -> bool:
    """True iff every cut of the binding graph has strength >= tau."""
    if not a.tiles:
        raise ValueError("empty assembly")
    if len(a) == 1:
        return True
    g = _bond_graph_cached(a)
    if not nx.is_connected(g):
        return False
    if tau == 1:
        return True
    cut, _ = nx.stoer_wagner(g)
    return cut >= tau


def _exposed_on_glues(a: Assembly):
    """(pos, side, name, strength) for every ON glue facing an empty cell."""
    if a._exposed is None:
        out = []
        for (x, y), inst in a.tiles.items():
            for side in Side:
                dx, dy = SIDE_VECTORS[side]
                if (x + dx, y + dy) in a.tiles:
                    continue
                for i in inst.type.slots_by_side[int(side)]:
                    if inst.glue_states[i] == GlueState.ON:
                        spec = inst.type.glue_specs[i]
                        out.append(((x, y), side, spec.name, spec.strength))
        a._exposed = out
    return a._exposed


def enumerate_combinations(a: Assembly, b: Assembly, tau: int) -> list[Coord]:
    """Translation vectors v such that a and b+v combine tau-stably.

    Candidates come from aligning each exposed ON glue of `a` with each
    matching exposed ON glue of `b` on the complementary side; any
    combining translation must bind at least one such pair.
    """
    cands: set[Coord] = set()
    b_by: dict[tuple[int, str, int], list[Coord]] = {}
    for pos, side, name, s in _exposed_on_glues(b):
        b_by.setdefault((int(side), name, s), []).append(pos)
    for (ax, ay), side, name, s in _exposed_on_glues(a):
        dx, dy = SIDE_VECTORS[side]
        for (bx, by) in b_by.get((int(OPPOSITE[side]), name, s), ()):
            cands.add((ax + dx - bx, ay + dy - by))
    out = []
    for (vx, vy) in cands:
        if any((x + vx, y + vy) in a.tiles for (x, y) in b.tiles):
            continue
        strength = 0
        for (bx, by), inst in b.tiles.items():
            p = (bx + vx, by + vy)
            for side in Side:
                dx, dy = SIDE_VECTORS[side]
                q = (p[0] + dx, p[1] + dy)
                other = a.tiles.get(q)
                if other is not None:
                    strength += sum(s for _, s in _matched_pairs(inst, other, side))
        if strength >= tau:
            out.append((vx, vy))
    return sorted(out)


def _fire(inst: TileInstance, side: Side, glue_name: str) -> TileInstance:
    acts = inst.type.actions_for(int(side), glue_name)
    if not acts:
        return inst
    return inst.with_pending(inst.pending + acts)


def combine(a: Assembly, b: Assembly, v: Coord, tau: int = 1) -> Assembly:
    """Union of `a` and `b` translated by `v`; fires deltas of all newly
    bound glue pairs across the interface, in deterministic order."""
    vx, vy = v
    tiles: dict[Coord, TileInstance] = dict(a.tiles)
    for (bx, by), inst in b.tiles.items():
        p = (bx + vx, by + vy)
        if p in tiles:
            raise ValueError(f"overlap at {p}")
        tiles[p] = inst
    new_pos = {(bx + vx, by + vy) for (bx, by) in b.tiles}
    strength = 0
    events: list[tuple[Coord, Side, str]] = []
    for p in sorted(new_pos):
        inst = tiles[p]
        for side in Side:
            dx, dy = SIDE_VECTORS[side]
            q = (p[0] + dx, p[1] + dy)
            if q in new_pos or q not in tiles:
                continue
            for name, s in _matched_pairs(inst, tiles[q], side):
                strength += s
                events.append((p, side, name))
                events.append((q, OPPOSITE[side], name))
    if strength < tau:
        raise ValueError(f"interface strength {strength} below temperature {tau}")
    for p, side, name in sorted(events, key=lambda e: (e[0], int(e[1]), e[2])):
        tiles[p] = _fire(tiles[p], side, name)
    return Assembly(tiles)


def apply_pending_action(a: Assembly, p: Coord, act: Action) -> Assembly:
    """Execute one instance of `act` from the pending multiset of the tile
    at `p`.  Invalid transitions remove the action without a state change.
    Switching a glue ON next to a matching ON glue is a bond event and
    fires both deltas."""
    inst = a.tiles.get(p)
    if inst is None:
        raise ValueError(f"no tile at {p}")
    if act not in inst.pending:
        raise ValueError(f"action {act} not pending at {p}")
    remaining = list(inst.pending)
    remaining.remove(act)
    new_state = GlueState(act.new_state)
    if act.kind == LABEL:
        li = inst.type.label_index.get(act.target)
        cur = GlueState(inst.label_states[li]) if li is not None else None
        labels = list(inst.label_states)
        if li is not None and glue_transition_valid(cur, new_state):
            labels[li] = int(new_state)
        new_inst = TileInstance(inst.type, inst.glue_states, tuple(labels), tuple(remaining))
        return a.replace(p, new_inst)

    si = inst.type.slot_index.get((act.side, act.target))
    glues = list(inst.glue_states)
    bond_formed = False
    if si is not None and glue_transition_valid(GlueState(glues[si]), new_state):
        glues[si] = int(new_state)
        if new_state == GlueState.ON:
            side = Side(act.side)
            dx, dy = SIDE_VECTORS[side]
            q = (p[0] + dx, p[1] + dy)
            other = a.tiles.get(q)
            if other is not None:
                spec = inst.type.glue_specs[si]
                j = other.type.slot_index.get((int(OPPOSITE[side]), spec.name))
                if (
                    j is not None
                    and other.type.glue_specs[j].strength == spec.strength
                    and other.glue_states[j] == GlueState.ON
                ):
                    bond_formed = True
    new_inst = TileInstance(inst.type, tuple(glues), inst.label_states, tuple(remaining))
    out = a.replace(p, new_inst)
    if bond_formed:
        side = Side(act.side)
        dx, dy = SIDE_VECTORS[side]
        q = (p[0] + dx, p[1] + dy)
        out = out.replace(p, _fire(out.tiles[p], side, act.target))
        out = out.replace(q, _fire(out.tiles[q], OPPOSITE[side], act.target))
    return out


def enumerate_breaks(a: Assembly, tau: int, exhaustive_bound: int = 24) -> list[frozenset]:
    """Bipartitions along cuts of strength < tau.

    At tau=1 these are exactly the connected components of the positive
    binding graph (one part per component).  For tau>1, small assemblies
    are searched exhaustively for connected sub-tau cuts; larger ones are
    only probed via a global min-cut witness.
    """
    if len(a) <= 1:
        return []
    g = _bond_graph_cached(a)
    comps = [frozenset(c) for c in nx.connected_components(g)]
    if len(comps) > 1:
        # one bipartition per component (component vs rest), complements merged
        out = []
        seen = set()
        for c in comps:
            rest = frozenset(a.tiles) - c
            key = frozenset(min((sorted(c), sorted(rest))))
            if key not in seen:
                seen.add(key)
                out.append(key)
        return sorted(out, key=sorted)
    if tau == 1:
        return []
    cut, (s1, _) = nx.stoer_wagner(g)
    if cut >= tau:
        return []
    if len(a) > exhaustive_bound:
        return [frozenset(s1)]
    out = []
    seen = set()
    positions = sorted(a.tiles)
    anchor = positions[0]
    rest = positions[1:]
    for mask in range(1 << len(rest)):
        part = {anchor} | {rest[i] for i in range(len(rest)) if mask >> i & 1}
        comp = set(positions) - part
        if not comp:
            continue
        weight = sum(
            d["weight"]
            for u, v, d in g.edges(data=True)
            if (u in part) != (v in part)
        )
        if weight >= tau:
            continue
        if not nx.is_connected(g.subgraph(part)) or not nx.is_connected(g.subgraph(comp)):
            continue
        key = frozenset(part)
        if key not in seen:
            seen.add(key)
            out.append(key)
    return sorted(out, key=sorted)


def break_apart(a: Assembly, part: frozenset) -> tuple[Assembly, Assembly]:
    """Split `a` along a bipartition; all tile state carries over."""
    if not part or not (set(a.tiles) - set(part)):
        raise ValueError("partition must be a proper nonempty split")
    if not set(part) <= set(a.tiles):
        raise ValueError("partition references unoccupied positions")
    left = Assembly({p: a.tiles[p] for p in a.tiles if p in part})
    right = Assembly({p: a.tiles[p] for p in a.tiles if p not in part})
    return left, right


def assembly_moves(a: Assembly, tau: int, target=0) -> list[Move]:
    """GLUE/LABEL action and BREAK moves available within one assembly."""
    out: list[Move] = []
    for pos in sorted(a.tiles):
        inst = a.tiles[pos]
        for act in sorted(set(inst.pending)):
            kind = GLUE_ACTION if act.kind == GLUE else LABEL_ACTION
            out.append(Move(kind, (target,), pos=pos, action=act))
    for part in enumerate_breaks(a, tau):
        out.append(Move(BREAK, (target,), part=part))
    return out
