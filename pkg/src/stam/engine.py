"""Exploration engines: exhaustive canonicalized BFS and a seeded
stochastic scheduler with a fairness guarantee.

Both treat the system's initial assemblies as an infinite supply (the
2HAM convention); exploration works over canonical representatives, the
scheduler over a concrete pool of instances.
"""

from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional

from .model import Assembly, STAMSystem, canonical_form, validate_system
from .dynamics import (
    BREAK,
    COMBINE,
    GLUE_ACTION,
    LABEL_ACTION,
    Move,
    apply_pending_action,
    assembly_moves,
    break_apart,
    combine,
    enumerate_combinations,
)


def _exposure_signature(a: Assembly):
    from .dynamics import _exposed_on_glues

    return {(int(side), name, s) for _, side, name, s in _exposed_on_glues(a)}


def _signatures_compatible(sig_a, sig_b) -> bool:
    from .model import OPPOSITE, Side

    for side, name, s in sig_a:
        if (int(OPPOSITE[Side(side)]), name, s) in sig_b:
            return True
    return False


@dataclass
class ExploreRecord:
    assembly: Assembly
    parents: tuple[str, ...]  # canonical hashes of the producing operands
    via: str  # move kind that first produced it ("initial" for seeds)
    depth: int = 0


@dataclass
class ExploreResult:
    records: dict[str, ExploreRecord]
    terminal: set[str]
    truncated_size: bool = False
    truncated_states: bool = False

    @property
    def truncated(self) -> bool:
        return self.truncated_size or self.truncated_states

    def assemblies(self) -> list[Assembly]:
        return [r.assembly for r in self.records.values()]

    def terminal_assemblies(self) -> list[Assembly]:
        return [self.records[h].assembly for h in sorted(self.terminal)]


def explore(
    system: STAMSystem,
    max_assembly_size: int = 64,
    max_states: int = 100_000,
) -> ExploreResult:
    """Breadth-first closure of the initial set under all moves,
    deduplicated by canonical form and truncated at the given bounds.

    Terminality is *bounded*: an assembly is marked terminal when it has no
    pending action, no break, and no combination with any member of the
    explored set (including itself).
    """
    problems = validate_system(system)
    if problems:
        raise ValueError("invalid system: " + "; ".join(problems[:5]))
    tau = system.temperature
    records: dict[str, ExploreRecord] = {}
    queue: deque[str] = deque()
    result = ExploreResult(records, set())

    def add(a: Assembly, parents, via, depth) -> None:
        a, h = canonical_form(a)
        if h in records:
            return
        if len(records) >= max_states:
            result.truncated_states = True
            return
        records[h] = ExploreRecord(a, tuple(parents), via, depth)
        queue.append(h)

    for asm in system.initial_assemblies:
        add(asm, (), "initial", 0)

    processed: list[str] = []
    while queue:
        h = queue.popleft()
        rec = records[h]
        a = rec.assembly
        for mv in assembly_moves(a, tau):
            if mv.kind == BREAK:
                left, right = break_apart(a, mv.part)
                add(left, (h,), BREAK, rec.depth + 1)
                add(right, (h,), BREAK, rec.depth + 1)
            else:
                add(apply_pending_action(a, mv.pos, mv.action), (h,), mv.kind, rec.depth + 1)
        processed.append(h)
        sig_a = _exposure_signature(a)
        for h2 in processed:
            b = records[h2].assembly
            if len(a) + len(b) > max_assembly_size:
                if enumerate_combinations(a, b, tau):
                    result.truncated_size = True
                continue
            if not _signatures_compatible(sig_a, _exposure_signature(b)):
                continue
            for v in enumerate_combinations(a, b, tau):
                add(combine(a, b, v, tau), (h, h2), COMBINE, max(rec.depth, records[h2].depth) + 1)

    # bounded terminality relative to the explored set
    combinable: set[str] = set()
    hashes = sorted(records)
    sigs = {h: _exposure_signature(records[h].assembly) for h in hashes}
    for i, h1 in enumerate(hashes):
        a = records[h1].assembly
        if a.has_pending():
            combinable.add(h1)
    for i, h1 in enumerate(hashes):
        a = records[h1].assembly
        for h2 in hashes[i:]:
            if h1 in combinable and h2 in combinable:
                continue
            if not _signatures_compatible(sigs[h1], sigs[h2]):
                continue
            if enumerate_combinations(a, records[h2].assembly, tau):
                combinable.add(h1)
                combinable.add(h2)
    for h, rec in records.items():
        a = rec.assembly
        if h in combinable or a.has_pending():
            continue
        if assembly_moves(a, tau):
            continue
        result.terminal.add(h)
    return result


@dataclass
class TraceStep:
    step: int
    kind: str
    payload: dict
    consumed: int = 0  # tiles drawn from the infinite supply
    detached: tuple[int, ...] = ()  # sizes of parts split off by a break

    def to_json(self) -> str:
        d = {
            "step": self.step,
            "kind": self.kind,
            "consumed": self.consumed,
            "detached": list(self.detached),
        }
        d.update(self.payload)
        return json.dumps(d, sort_keys=True)


@dataclass
class Trace:
    seed: int
    max_steps: int
    fairness_window: int
    steps: list[TraceStep] = field(default_factory=list)
    final_pool: list[Assembly] = field(default_factory=list)
    final_hash: str = ""
    exhausted: bool = False  # no moves remained before max_steps

    def universe_hash(self) -> str:
        import hashlib

        hs = sorted(a.canonical_hash() for a in self.final_pool)
        return hashlib.sha256("|".join(hs).encode()).hexdigest()[:24]

    def write_jsonl(self, path) -> None:
        with open(path, "w") as f:
            f.write(
                json.dumps(
                    {
                        "seed": self.seed,
                        "max_steps": self.max_steps,
                        "fairness_window": self.fairness_window,
                        "final_hash": self.final_hash,
                    }
                )
                + "\n"
            )
            for s in self.steps:
                f.write(s.to_json() + "\n")


def _move_key(mv: Move, pool_hashes: list[str], supply_hashes: list[str]) -> str:
    def name(t):
        kind, idx = t
        return ("S:" + supply_hashes[idx]) if kind == "s" else ("P:" + pool_hashes[idx])

    parts = [mv.kind] + [name(t) for t in mv.targets]
    if mv.offset is not None:
        parts.append(str(mv.offset))
    if mv.pos is not None:
        parts.append(str(mv.pos))
    if mv.action is not None:
        parts.append(repr(mv.action))
    if mv.part is not None:
        parts.append(str(sorted(mv.part)))
    return "\x1f".join(parts)


def run_stochastic(
    system: STAMSystem,
    seed: int = 0,
    max_steps: int = 1000,
    fairness_window: int = 1000,
    snapshot_interval: int = 0,
    snapshot_cb: Optional[Callable[[int, list[Assembly]], None]] = None,
    stop_condition: Optional[Callable[[list[Assembly]], bool]] = None,
) -> Trace:
    """Seeded uniform-random scheduler over the universe of assemblies.

    Deterministic given (system, seed, max_steps, fairness_window).  A move
    whose key stays continuously enabled for `fairness_window` steps is
    prioritized, so queued deactivations cannot starve.  The initial
    assemblies form an infinite supply; combining with supply records
    tile consumption without depleting anything.
    """
    problems = validate_system(system)
    if problems:
        raise ValueError("invalid system: " + "; ".join(problems[:5]))
    tau = system.temperature
    rng = random.Random(seed)
    supply: list[Assembly] = [canonical_form(a)[0] for a in system.initial_assemblies]
    supply_hashes = [a.canonical_hash() for a in supply]
    pool: list[Assembly] = []
    trace = Trace(seed, max_steps, fairness_window)
    ages: dict[str, int] = {}
    unary_cache: dict[int, list[Move]] = {}
    combo_cache: dict[tuple[int, int], list] = {}

    def unary_moves(idx: int) -> list[Move]:
        a = pool[idx]
        if id(a) not in unary_cache:
            unary_cache[id(a)] = assembly_moves(a, tau)
        return [
            Move(m.kind, (("p", idx),), pos=m.pos, action=m.action, part=m.part)
            for m in unary_cache[id(a)]
        ]

    def combos(a: Assembly, b: Assembly) -> list:
        key = (id(a), id(b))
        if key not in combo_cache:
            combo_cache[key] = enumerate_combinations(a, b, tau)
        return combo_cache[key]

    step_no = 0
    while step_no < max_steps:
        pool_hashes = [a.canonical_hash() for a in pool]
        moves: list[Move] = []
        for i in range(len(pool)):
            moves.extend(unary_moves(i))
        operands = [(("p", i), pool[i]) for i in range(len(pool))] + [
            (("s", i), supply[i]) for i in range(len(supply))
        ]
        for ai in range(len(operands)):
            ta, a = operands[ai]
            for bi in range(ai, len(operands)):
                tb, b = operands[bi]
                if ai == bi and ta[0] == "p":
                    continue  # a concrete instance cannot combine with itself
                for v in combos(a, b):
                    moves.append(Move(COMBINE, (ta, tb), offset=v))
                if ai != bi:
                    for v in combos(b, a):
                        moves.append(Move(COMBINE, (tb, ta), offset=v))
        if not moves:
            trace.exhausted = True
            break
        keyed = sorted(
            ((_move_key(m, pool_hashes, supply_hashes), m) for m in moves),
            key=lambda km: km[0],
        )
        new_ages = {}
        for k, _ in keyed:
            new_ages[k] = ages.get(k, 0) + 1
        ages = new_ages
        overdue = [(k, m) for k, m in keyed if ages[k] >= fairness_window]
        pick_from = overdue if overdue else keyed
        key, mv = pick_from[rng.randrange(len(pick_from))]

        def take(t):
            kind, idx = t
            if kind == "s":
                return supply[idx], True
            return pool[idx], False

        payload: dict = {}
        consumed = 0
        detached: tuple[int, ...] = ()
        if mv.kind == COMBINE:
            a, a_sup = take(mv.targets[0])
            b, b_sup = take(mv.targets[1])
            result = canonical_form(combine(a, b, mv.offset, tau))[0]
            removed = []
            for t, sup, asm in ((mv.targets[0], a_sup, a), (mv.targets[1], b_sup, b)):
                if sup:
                    consumed += len(asm)
                else:
                    removed.append(t[1])
            for idx in sorted(set(removed), reverse=True):
                pool.pop(idx)
            pool.append(result)
            payload = {
                "a": a.canonical_hash(),
                "b": b.canonical_hash(),
                "a_supply": a_sup,
                "b_supply": b_sup,
                "offset": list(mv.offset),
                "result": result.canonical_hash(),
            }
        elif mv.kind == BREAK:
            idx = mv.targets[0][1]
            a = pool.pop(idx)
            left, right = break_apart(a, mv.part)
            left = canonical_form(left)[0]
            right = canonical_form(right)[0]
            pool.append(left)
            pool.append(right)
            detached = (len(left), len(right))
            payload = {
                "a": a.canonical_hash(),
                "part": sorted(map(list, mv.part)),
                "results": [left.canonical_hash(), right.canonical_hash()],
            }
        else:
            idx = mv.targets[0][1]
            a = pool[idx]
            result = canonical_form(apply_pending_action(a, mv.pos, mv.action))[0]
            pool[idx] = result
            payload = {
                "a": a.canonical_hash(),
                "pos": list(mv.pos),
                "action": {
                    "kind": mv.action.kind,
                    "side": mv.action.side,
                    "target": mv.action.target,
                    "set": "on" if mv.action.new_state == 1 else "off",
                },
                "result": result.canonical_hash(),
            }
        trace.steps.append(TraceStep(step_no, mv.kind, payload, consumed, detached))
        step_no += 1
        if snapshot_cb and snapshot_interval and step_no % snapshot_interval == 0:
            snapshot_cb(step_no, pool)
        if stop_condition and stop_condition(pool):
            break
    trace.final_pool = list(pool)
    trace.final_hash = trace.universe_hash()
    return trace


def replay(system: STAMSystem, trace_path) -> str:
    """Re-apply a recorded trace and return the resulting universe hash."""
    tau = system.temperature
    with open(trace_path) as f:
        header = json.loads(f.readline())
        steps = [json.loads(line) for line in f if line.strip()]
    supply = {a.canonical_hash(): a for a in (canonical_form(x)[0] for x in system.initial_assemblies)}
    pool: list[Assembly] = []

    def find(h: str, from_supply: bool) -> Assembly:
        if from_supply:
            return supply[h]
        for i, a in enumerate(pool):
            if a.canonical_hash() == h:
                return pool.pop(i)
        raise ValueError(f"replay: no pool assembly with hash {h}")

    from .model import Action

    for rec in steps:
        kind = rec["kind"]
        if kind == COMBINE:
            a = find(rec["a"], rec["a_supply"])
            b = find(rec["b"], rec["b_supply"])
            pool.append(canonical_form(combine(a, b, tuple(rec["offset"]), tau))[0])
        elif kind == BREAK:
            a = find(rec["a"], False)
            part = frozenset(tuple(p) for p in rec["part"])
            left, right = break_apart(a, part)
            pool.append(canonical_form(left)[0])
            pool.append(canonical_form(right)[0])
        else:
            a = find(rec["a"], False)
            ad = rec["action"]
            act = Action(
                ad["kind"], ad["side"], ad["target"], 1 if ad["set"] == "on" else 2
            )
            pool.append(canonical_form(apply_pending_action(a, tuple(rec["pos"]), act))[0])
    import hashlib

    hs = sorted(a.canonical_hash() for a in pool)
    return hashlib.sha256("|".join(hs).encode()).hexdigest()[:24]
