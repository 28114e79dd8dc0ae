"""JSON tile-set format.

Top level: {"temperature": int, "tile_types": [...], "initial_assemblies":
[...]}.  Each tile type lists per-side glues as {"type", "strength",
"state"}, labels likewise, and "delta" as a list of {"on_bind": {"side",
"glue"}, "actions": [{"kind", "side", "target", "set"}]}.  Assemblies list
tiles as {"x", "y", "type"} with optional per-glue/label state overrides.
"""

from __future__ import annotations

import json

from .model import (
    GLUE,
    Action,
    Assembly,
    GlueSpec,
    GlueState,
    STAMSystem,
    SIDE_BY_NAME,
    SIDE_NAMES,
    Side,
    TileInstance,
    TileType,
    state_from_name,
    state_name,
)


def system_to_dict(system: STAMSystem) -> dict:
    types = []
    for tt in system.tile_types.values():
        glues: dict[str, list] = {}
        for spec in tt.glue_specs:
            glues.setdefault(SIDE_NAMES[Side(spec.side)], []).append(
                {
                    "type": spec.name,
                    "strength": spec.strength,
                    "state": state_name(GlueState(spec.init_state)),
                }
            )
        delta = []
        for (side, gname), actions in sorted(tt.delta.items()):
            delta.append(
                {
                    "on_bind": {"side": SIDE_NAMES[Side(side)], "glue": gname},
                    "actions": [
                        {
                            "kind": a.kind,
                            **({"side": SIDE_NAMES[Side(a.side)]} if a.kind == GLUE else {}),
                            "target": a.target,
                            "set": "on" if a.new_state == GlueState.ON else "off",
                        }
                        for a in actions
                    ],
                }
            )
        types.append(
            {
                "name": tt.name,
                "glues": glues,
                "labels": [
                    {"name": l, "state": state_name(GlueState(s))} for l, s in tt.labels
                ],
                "delta": delta,
            }
        )
    assemblies = []
    for asm in system.initial_assemblies:
        tiles = []
        for (x, y), inst in sorted(asm.tiles.items()):
            entry: dict = {"x": x, "y": y, "type": inst.type.name}
            overrides = {}
            for i, st in enumerate(inst.glue_states):
                if st != inst.type.init_glue_states[i]:
                    spec = inst.type.glue_specs[i]
                    overrides[f"{SIDE_NAMES[Side(spec.side)]}:{spec.name}"] = state_name(
                        GlueState(st)
                    )
            if overrides:
                entry["glue_states"] = overrides
            lab = {}
            for i, st in enumerate(inst.label_states):
                if st != inst.type.init_label_states[i]:
                    lab[inst.type.label_names[i]] = state_name(GlueState(st))
            if lab:
                entry["label_states"] = lab
            tiles.append(entry)
        assemblies.append({"tiles": tiles})
    # singleton assemblies that are just "one of each type" stay implicit
    return {
        "name": system.name,
        "temperature": system.temperature,
        "tile_types": types,
        "initial_assemblies": assemblies,
    }


def system_from_dict(data: dict) -> STAMSystem:
    types: dict[str, TileType] = {}
    for td in data["tile_types"]:
        specs = []
        for side_name, glist in td.get("glues", {}).items():
            for g in glist:
                specs.append(
                    GlueSpec(
                        int(SIDE_BY_NAME[side_name]),
                        g["type"],
                        int(g.get("strength", 1)),
                        int(state_from_name(g.get("state", "latent"))),
                    )
                )
        labels = [
            (l["name"], int(state_from_name(l.get("state", "latent"))))
            for l in td.get("labels", [])
        ]
        delta = {}
        for entry in td.get("delta", []):
            key = (
                int(SIDE_BY_NAME[entry["on_bind"]["side"]]),
                entry["on_bind"]["glue"],
            )
            actions = []
            for a in entry["actions"]:
                actions.append(
                    Action(
                        a["kind"],
                        int(SIDE_BY_NAME[a["side"]]) if a["kind"] == GLUE else None,
                        a["target"],
                        int(GlueState.ON if a["set"] == "on" else GlueState.OFF),
                    )
                )
            delta[key] = tuple(actions)
        types[td["name"]] = TileType(td["name"], specs, labels, delta)
    assemblies = []
    for ad in data.get("initial_assemblies", []):
        tiles = {}
        for t in ad["tiles"]:
            tt = types[t["type"]]
            inst = TileInstance(tt)
            gs = list(inst.glue_states)
            for key, st in t.get("glue_states", {}).items():
                side_name, gname = key.split(":", 1)
                slot = tt.slot_index[(int(SIDE_BY_NAME[side_name]), gname)]
                gs[slot] = int(state_from_name(st))
            ls = list(inst.label_states)
            for lname, st in t.get("label_states", {}).items():
                ls[tt.label_index[lname]] = int(state_from_name(st))
            tiles[(int(t["x"]), int(t["y"]))] = TileInstance(tt, tuple(gs), tuple(ls))
        assemblies.append(Assembly(tiles))
    return STAMSystem(
        types, assemblies, int(data.get("temperature", 1)), data.get("name", "")
    )


def save_system(system: STAMSystem, path) -> None:
    with open(path, "w") as f:
        json.dump(system_to_dict(system), f, indent=1, sort_keys=True)


def load_system(path) -> STAMSystem:
    with open(path) as f:
        return system_from_dict(json.load(f))
