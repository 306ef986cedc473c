"""Explicit-state CTL checking by bottom-up labeling.

Satisfaction sets are integer bitmasks over state indices.  Each operator
is computed from its children's sets: atoms filter valuations, boolean
connectives are set algebra, EX is the pre-image, EF a least fixpoint
computed as a backward frontier worklist over predecessor lists, and EG a
greatest fixpoint refined in at most ``|S|`` rounds.  AX, AF and AG go
through their existential duals, so only three temporal algorithms exist.

``sat`` walks the formula iteratively (no recursion), which keeps deeply
nested generated properties within interpreter limits.  It is a pure
function of immutable inputs and safe to call concurrently on a shared
graph.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from . import ctl
from .errors import EvalError
from .model import StateGraph, Valuation

_CMP = {
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


class StateSet:
    """Immutable set of state indices backed by one integer bitmask."""

    __slots__ = ("mask", "universe")

    def __init__(self, mask: int, universe: int):
        self.mask = mask
        self.universe = universe

    @classmethod
    def from_indices(cls, indices, universe: int) -> "StateSet":
        mask = 0
        for i in indices:
            if not 0 <= i < universe:
                raise ValueError(f"state index {i} outside 0..{universe - 1}")
            mask |= 1 << i
        return cls(mask, universe)

    def indices(self) -> tuple[int, ...]:
        return tuple(self)

    def complement(self) -> "StateSet":
        return StateSet(~self.mask & ((1 << self.universe) - 1), self.universe)

    def union(self, other: "StateSet") -> "StateSet":
        return StateSet(self.mask | other.mask, self.universe)

    def intersection(self, other: "StateSet") -> "StateSet":
        return StateSet(self.mask & other.mask, self.universe)

    def issubset(self, other: "StateSet") -> bool:
        return self.mask & ~other.mask == 0

    def __contains__(self, i: int) -> bool:
        return 0 <= i < self.universe and bool(self.mask >> i & 1)

    def __iter__(self):
        m = self.mask
        while m:
            low = m & -m
            yield low.bit_length() - 1
            m ^= low

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __bool__(self) -> bool:
        return self.mask != 0

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, StateSet)
            and self.mask == other.mask
            and self.universe == other.universe
        )

    def __hash__(self) -> int:
        return hash((self.mask, self.universe))

    def __repr__(self) -> str:
        return f"StateSet({{{', '.join(map(str, self))}}} of {self.universe})"


@dataclass(frozen=True)
class InitialFailure:
    """One initial state that misses the property, with the first top-level
    conjunct it violates (best-effort diagnostic)."""

    state: int
    valuation: Valuation
    conjunct: str


@dataclass(frozen=True)
class CheckReport:
    holds: bool
    failures: tuple[InitialFailure, ...] = ()


def _atom_mask(graph: StateGraph, atom: ctl.Atom) -> int:
    j = graph.var_index(atom.var)
    try:
        cmp = _CMP[atom.op]
    except KeyError:
        raise EvalError(f"unknown comparator '{atom.op}'") from None
    value = atom.value
    mask = 0
    for i, state in enumerate(graph.states):
        if cmp(state[j], value):
            mask |= 1 << i
    return mask


def _preimage(succ_masks: list[int], z: int) -> int:
    mask = 0
    for i, sm in enumerate(succ_masks):
        if sm & z:
            mask |= 1 << i
    return mask


def _backward_reach(graph: StateGraph, seed: int) -> int:
    # Least fixpoint Z = seed ∪ EX Z as a frontier worklist over predecessors.
    preds = graph.pred_lists()
    z = seed
    work = deque(StateSet(seed, graph.state_count))
    while work:
        t = work.popleft()
        for p in preds[t]:
            if not z >> p & 1:
                z |= 1 << p
                work.append(p)
    return z


def _eg_fixpoint(graph: StateGraph, seed: int) -> int:
    # Greatest fixpoint Z = seed ∩ EX Z; each unstable round drops a state,
    # so |S| + 1 rounds always suffice.
    succ_masks = graph.succ_masks()
    z = seed
    for _ in range(graph.state_count + 2):
        nz = 0
        m = z
        while m:
            low = m & -m
            i = low.bit_length() - 1
            m ^= low
            if succ_masks[i] & z:
                nz |= low
        if nz == z:
            return z
        z = nz
    raise AssertionError("EG fixpoint failed to stabilize within |S| rounds")


def sat(
    graph: StateGraph,
    formula: ctl.CtlFormula,
    cache: dict | None = None,
) -> StateSet:
    """Exact satisfaction set of ``formula`` over ``graph``.

    ``cache`` maps ``id(subformula)`` to ``(subformula, mask)`` and may be
    shared across calls on the same graph to reuse subformula results.
    """
    masks = cache if cache is not None else {}
    full = (1 << graph.state_count) - 1
    succ_masks = graph.succ_masks()
    stack = [formula]
    while stack:
        node = stack[-1]
        if id(node) in masks:
            stack.pop()
            continue
        kids = ctl.children(node)
        missing = [k for k in kids if id(k) not in masks]
        if missing:
            stack.extend(missing)
            continue
        stack.pop()

        if isinstance(node, ctl.TrueF):
            mask = full
        elif isinstance(node, ctl.FalseF):
            mask = 0
        elif isinstance(node, ctl.Atom):
            mask = _atom_mask(graph, node)
        elif isinstance(node, ctl.Not):
            mask = ~masks[id(node.child)][1] & full
        elif isinstance(node, ctl.And):
            mask = masks[id(node.left)][1] & masks[id(node.right)][1]
        elif isinstance(node, ctl.Or):
            mask = masks[id(node.left)][1] | masks[id(node.right)][1]
        elif isinstance(node, ctl.EX):
            mask = _preimage(succ_masks, masks[id(node.child)][1])
        elif isinstance(node, ctl.EF):
            mask = _backward_reach(graph, masks[id(node.child)][1])
        elif isinstance(node, ctl.EG):
            mask = _eg_fixpoint(graph, masks[id(node.child)][1])
        elif isinstance(node, ctl.AX):
            mask = ~_preimage(succ_masks, ~masks[id(node.child)][1] & full) & full
        elif isinstance(node, ctl.AF):
            mask = ~_eg_fixpoint(graph, ~masks[id(node.child)][1] & full) & full
        elif isinstance(node, ctl.AG):
            mask = ~_backward_reach(graph, ~masks[id(node.child)][1] & full) & full
        else:
            raise EvalError(f"not a CTL formula: {node!r}")
        masks[id(node)] = (node, mask)
    return StateSet(masks[id(formula)][1], graph.state_count)


def holds_initially(graph: StateGraph, formula: ctl.CtlFormula) -> CheckReport:
    """Existential verdict over the initial states: holds iff some initial
    state satisfies the formula.

    On failure, reports for each initial state the first top-level conjunct
    it violates, printed as text.
    """
    cache: dict = {}
    result = sat(graph, formula, cache)
    if any(i in result for i in graph.initial):
        return CheckReport(holds=True)
    parts = ctl.conjuncts(formula)
    failures = []
    for i in sorted(graph.initial):
        blame = None
        for part in parts:
            entry = cache.get(id(part))
            part_set = (
                StateSet(entry[1], graph.state_count)
                if entry is not None
                else sat(graph, part, cache)
            )
            if i not in part_set:
                blame = part
                break
        failures.append(
            InitialFailure(
                state=i,
                valuation=graph.states[i],
                conjunct=ctl.print_formula(blame if blame is not None else formula),
            )
        )
    return CheckReport(holds=False, failures=tuple(failures))
