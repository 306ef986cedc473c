"""Guarded-command system models and explicit state-graph construction.

A model is a list of integer variables with finite ranges, a constant map
and a list of guarded commands.  A state (valuation) is one integer per
variable in declaration order.  ``step`` fires every enabled command once
(updates read the pre-state); states with no enabled command keep their
valuation, which materializes as a self-loop in the built graph so the
transition relation is total.

Models and built graphs are immutable after construction and safe to share
across threads for concurrent reads.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping

from .errors import EvalError, ModelError, StateExplosionError
from .expr import Expr, eval_expr, expr_names

Valuation = tuple[int, ...]

DEFAULT_STATE_BUDGET = 1_000_000


@dataclass(frozen=True)
class VarDecl:
    """One variable: finite range ``lo..hi`` and a declared initial value."""

    name: str
    lo: int
    hi: int
    init: int

    def __post_init__(self):
        if self.hi < self.lo:
            raise ModelError(f"variable '{self.name}': empty domain {self.lo}..{self.hi}")
        if not self.lo <= self.init <= self.hi:
            raise ModelError(
                f"variable '{self.name}': init out of bounds "
                f"({self.init} not in {self.lo}..{self.hi})"
            )


@dataclass(frozen=True)
class GuardedCommand:
    """``[label] guard -> updates``; an empty update list means ``skip``."""

    label: str | None
    guard: Expr
    updates: tuple[tuple[str, Expr], ...]

    def __post_init__(self):
        targets = [name for name, _ in self.updates]
        if len(targets) != len(set(targets)):
            raise ModelError(f"command [{self.label or ''}]: variable updated twice")

    def describe(self, index: int) -> str:
        return f"command #{index + 1}" + (f" [{self.label}]" if self.label else "")


@dataclass(frozen=True)
class SystemModel:
    constants: Mapping[str, int]
    variables: tuple[VarDecl, ...]
    commands: tuple[GuardedCommand, ...]
    init_constraint: Expr | None = None

    def __post_init__(self):
        if not self.variables:
            raise ModelError("model declares no variables")
        names = [v.name for v in self.variables]
        if len(names) != len(set(names)):
            raise ModelError("duplicate variable declaration")
        clash = set(names) & set(self.constants)
        if clash:
            raise ModelError(f"constant and variable share a name: {sorted(clash)}")
        declared = set(names) | set(self.constants)
        for i, cmd in enumerate(self.commands):
            unknown = expr_names(cmd.guard) - declared
            for _, rhs in cmd.updates:
                unknown |= expr_names(rhs) - declared
            if unknown:
                raise ModelError(
                    f"{cmd.describe(i)}: unknown identifier(s) {sorted(unknown)}"
                )
            for name, _ in cmd.updates:
                if name not in names:
                    raise ModelError(f"{cmd.describe(i)}: '{name}' is not a variable")
        if self.init_constraint is not None:
            unknown = expr_names(self.init_constraint) - declared
            if unknown:
                raise ModelError(f"init constraint: unknown identifier(s) {sorted(unknown)}")

    @property
    def var_names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def declared_init(self) -> Valuation:
        return tuple(v.init for v in self.variables)


def step(model: SystemModel, v: Valuation) -> list[Valuation]:
    """Successor valuations of ``v``: one per enabled command, deduplicated
    and sorted; ``[v]`` itself when no command is enabled.

    All update right-hand sides are evaluated against the pre-state, so
    updates within one command are simultaneous.
    """
    env = dict(zip(model.var_names, v))
    bounds = {decl.name: (decl.lo, decl.hi) for decl in model.variables}
    index = {decl.name: i for i, decl in enumerate(model.variables)}
    out: set[Valuation] = set()
    for i, cmd in enumerate(model.commands):
        enabled = eval_expr(cmd.guard, env, model.constants)
        if not isinstance(enabled, bool):
            raise ModelError(f"{cmd.describe(i)}: guard is not boolean")
        if not enabled:
            continue
        nxt = list(v)
        for name, rhs in cmd.updates:
            val = eval_expr(rhs, env, model.constants)
            if isinstance(val, bool):
                raise ModelError(f"{cmd.describe(i)}: update of '{name}' is not integer")
            lo, hi = bounds[name]
            if not lo <= val <= hi:
                raise ModelError(
                    f"{cmd.describe(i)}: update drives '{name}' to {val}, "
                    f"outside {lo}..{hi}"
                )
            nxt[index[name]] = val
        out.add(tuple(nxt))
    if not out:
        return [v]
    return sorted(out)


@dataclass
class StateGraph:
    """Explicit state graph: indexed valuations plus a total successor map.

    ``initial`` and every successor set refer to indices into ``states``.
    Instances are treated as immutable once constructed; the private
    fields lazily cache derived views used by the checker.
    """

    variables: tuple[str, ...]
    states: tuple[Valuation, ...]
    initial: frozenset[int]
    succ: tuple[frozenset[int], ...]
    _succ_masks: list[int] | None = field(default=None, init=False, repr=False, compare=False)
    _pred_lists: list[list[int]] | None = field(default=None, init=False, repr=False, compare=False)
    _var_index: dict[str, int] | None = field(default=None, init=False, repr=False, compare=False)

    @property
    def state_count(self) -> int:
        return len(self.states)

    @property
    def edge_count(self) -> int:
        return sum(len(s) for s in self.succ)

    def var_index(self, name: str) -> int:
        if self._var_index is None:
            self._var_index = {n: i for i, n in enumerate(self.variables)}
        try:
            return self._var_index[name]
        except KeyError:
            raise EvalError(f"unknown variable '{name}'") from None

    def succ_masks(self) -> list[int]:
        if self._succ_masks is None:
            self._succ_masks = [
                sum(1 << t for t in targets) for targets in self.succ
            ]
        return self._succ_masks

    def pred_lists(self) -> list[list[int]]:
        if self._pred_lists is None:
            preds: list[list[int]] = [[] for _ in self.states]
            for s, targets in enumerate(self.succ):
                for t in targets:
                    preds[t].append(s)
            self._pred_lists = preds
        return self._pred_lists


def _initial_valuations(model: SystemModel, budget: int) -> list[Valuation]:
    base = model.declared_init()
    if model.init_constraint is None:
        return [base]
    # Widening constraint: every domain valuation satisfying it is initial,
    # alongside the declared init vector.  Enumeration is bounded by the
    # state budget to keep degenerate constraints from running away.
    inits = {base}
    ranges = [range(v.lo, v.hi + 1) for v in model.variables]
    names = model.var_names
    for count, cand in enumerate(itertools.product(*ranges), start=1):
        if count > budget:
            raise StateExplosionError(
                f"state explosion: init constraint enumeration exceeded {budget} candidates"
            )
        if eval_expr(model.init_constraint, dict(zip(names, cand)), model.constants):
            inits.add(cand)
    return sorted(inits)


def build_graph(model: SystemModel, max_states: int = DEFAULT_STATE_BUDGET) -> StateGraph:
    """Breadth-first closure of the reachable state space.

    Deterministic: initial valuations are seeded in sorted order and each
    state's successors are explored in sorted order, so equal models yield
    bit-identical graphs.  Raises :class:`StateExplosionError` once more
    than ``max_states`` distinct states are discovered.
    """
    inits = _initial_valuations(model, max_states)
    index: dict[Valuation, int] = {}
    states: list[Valuation] = []
    succ: list[frozenset[int] | None] = []

    def intern(v: Valuation) -> int:
        found = index.get(v)
        if found is not None:
            return found
        if len(states) >= max_states:
            raise StateExplosionError(
                f"state explosion: more than {max_states} reachable states"
            )
        index[v] = len(states)
        states.append(v)
        succ.append(None)
        return len(states) - 1

    queue: deque[int] = deque(intern(v) for v in inits)
    while queue:
        i = queue.popleft()
        if succ[i] is not None:
            continue
        targets = []
        for nxt in step(model, states[i]):
            j = index.get(nxt)
            fresh = j is None
            if fresh:
                j = intern(nxt)
                queue.append(j)
            targets.append(j)
        succ[i] = frozenset(targets)
    return StateGraph(
        variables=model.var_names,
        states=tuple(states),
        initial=frozenset(index[v] for v in inits),
        succ=tuple(s if s is not None else frozenset() for s in succ),
    )
