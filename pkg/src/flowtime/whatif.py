"""Scenario editing: probability rewiring and waiting-time adjustments.

A scenario is an ordered list of edits applied to a copy of the flow:

* ``set_probability(from, to, value)`` pins one transition probability
  and proportionally rescales the state's remaining out-probabilities.
  The state's out-edge waiting times are then uniformly time-dilated so
  the state's mean waiting time is unchanged: restructuring a process
  reroutes work, it does not change how long a state takes. (This also
  keeps express and full analysis consistent with each other.)
* ``scale_state_mean(state, factor)`` dilates every out-edge waiting
  model of the state (means and spreads) by the factor.
* ``set_edge_mean(from, to, hours)`` shifts one edge's waiting model so
  its mean lands on the given value (point mass if nothing was fitted).

The end-to-start structural transition is immutable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    ImmutableEdge,
    IrreducibilityBroken,
    RowDegenerate,
    UnknownEdge,
    UnknownState,
)
from .discovery import SemiMarkovFlow, StateKey


@dataclass(frozen=True)
class Edit:
    op: str  # set_probability | scale_state_mean | set_edge_mean
    source: StateKey | None = None
    target: StateKey | None = None
    state: StateKey | None = None
    value: float = 0.0

    def to_dict(self) -> dict:
        if self.op == "set_probability":
            return {
                "op": self.op,
                "from": self.source.to_json(),
                "to": self.target.to_json(),
                "value": self.value,
            }
        if self.op == "scale_state_mean":
            return {"op": self.op, "state": self.state.to_json(), "factor": self.value}
        return {
            "op": self.op,
            "from": self.source.to_json(),
            "to": self.target.to_json(),
            "hours": self.value,
        }

    @staticmethod
    def from_dict(data: dict) -> "Edit":
        op = data["op"]
        if op == "set_probability":
            value = float(data["value"])
            if not (0.0 <= value <= 1.0):
                raise ValueError(f"probability {value} outside [0, 1]")
            return Edit(
                op=op,
                source=StateKey.from_json(data["from"]),
                target=StateKey.from_json(data["to"]),
                value=value,
            )
        if op == "scale_state_mean":
            factor = float(data["factor"])
            if factor <= 0:
                raise ValueError(f"scale factor must be positive, got {factor}")
            return Edit(op=op, state=StateKey.from_json(data["state"]), value=factor)
        if op == "set_edge_mean":
            return Edit(
                op=op,
                source=StateKey.from_json(data["from"]),
                target=StateKey.from_json(data["to"]),
                value=float(data["hours"]),
            )
        raise ValueError(f"unknown edit op {op!r}")


@dataclass(frozen=True)
class Scenario:
    edits: tuple[Edit, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {"edits": [e.to_dict() for e in self.edits]}

    @staticmethod
    def from_dict(data: dict) -> "Scenario":
        return Scenario(edits=tuple(Edit.from_dict(e) for e in data.get("edits", [])))


def _resolve(flow: SemiMarkovFlow, key: StateKey) -> int:
    idx = flow.index.get(key)
    if idx is None:
        raise UnknownState(f"no state {key.label!r} in the flow")
    return idx


def _apply_set_probability(flow: SemiMarkovFlow, u: int, v: int, value: float) -> None:
    if u == flow.end:
        raise ImmutableEdge("the end state's return transition cannot be edited")
    row = flow.P[u]
    if v not in row:
        raise UnknownEdge(
            f"no transition {flow.states[u].label!r} -> {flow.states[v].label!r}"
        )
    old_mean = flow.state_mean_hours(u)

    sibling_mass = sum(p for j, p in row.items() if j != v)
    if sibling_mass == 0.0:
        if value == 1.0:
            return
        raise RowDegenerate(
            f"{flow.states[u].label!r} has no other out-transition to absorb "
            f"probability {1.0 - value}"
        )
    scale = (1.0 - value) / sibling_mass
    for j in list(row):
        row[j] = value if j == v else row[j] * scale
    for j in [j for j, p in row.items() if p == 0.0]:
        del row[j]
        del flow.edge_times[(u, j)]

    # preserve the state's mean waiting time by dilating its out-edges
    new_mean = flow.state_mean_hours(u)
    if new_mean > 0 and old_mean >= 0 and new_mean != old_mean:
        factor = old_mean / new_mean
        for j in row:
            flow.edge_times[(u, j)] = flow.edge_times[(u, j)].scaled(factor)


def _apply_scale_state_mean(flow: SemiMarkovFlow, i: int, factor: float) -> None:
    for j in flow.P.get(i, {}):
        if (i, j) == (flow.end, flow.start):
            continue  # structural zero stays zero either way
        flow.edge_times[(i, j)] = flow.edge_times[(i, j)].scaled(factor)


def _apply_set_edge_mean(flow: SemiMarkovFlow, u: int, v: int, hours: float) -> None:
    if (u, v) == (flow.end, flow.start):
        raise ImmutableEdge("the end-to-start transition carries no waiting time")
    if v not in flow.P.get(u, {}):
        raise UnknownEdge(
            f"no transition {flow.states[u].label!r} -> {flow.states[v].label!r}"
        )
    flow.edge_times[(u, v)] = flow.edge_times[(u, v)].with_mean(hours)


def apply_scenario(flow: SemiMarkovFlow, scenario: Scenario) -> SemiMarkovFlow:
    """Apply edits in order to a copy of the flow and revalidate it."""
    out = flow.copy()
    for edit in scenario.edits:
        if edit.op == "set_probability":
            u = _resolve(out, edit.source)
            v = _resolve(out, edit.target)
            _apply_set_probability(out, u, v, edit.value)
        elif edit.op == "scale_state_mean":
            _apply_scale_state_mean(out, _resolve(out, edit.state), edit.value)
        elif edit.op == "set_edge_mean":
            u = _resolve(out, edit.source)
            v = _resolve(out, edit.target)
            _apply_set_edge_mean(out, u, v, edit.value)
        else:
            raise ValueError(f"unknown edit op {edit.op!r}")
    try:
        out.validate()
    except ValueError as exc:
        raise IrreducibilityBroken(str(exc)) from None
    return out
