"""Placement quality metrics.

The objective everywhere is a failure aggregate: entry i counts the
nodes whose failure would wipe out exactly rho - i replicas of a block,
so entry 0 counts total-loss events and the last entry counts harmless
ones. Aggregates compare lexicographically from entry 0; smaller is
safer. Signatures use the same indexing for block sizes instead of
failure counts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import ModelError
from .model import FailureModel, postorder


@dataclass(frozen=True)
class FailureAggregate:
    entries: tuple[int, ...]
    rho: int

    def __post_init__(self) -> None:
        if len(self.entries) != self.rho + 1:
            raise ValueError("aggregate must have rho + 1 entries")

    def __str__(self) -> str:
        return "<" + ",".join(str(v) for v in self.entries) + ">"


@dataclass(frozen=True)
class Signature:
    """Block-size census: entries[k] counts blocks of size rho - k."""

    entries: tuple[int, ...]
    rho: int

    def __post_init__(self) -> None:
        if len(self.entries) != self.rho + 1:
            raise ValueError("signature must have rho + 1 entries")

    def __str__(self) -> str:
        return "<" + ",".join(str(v) for v in self.entries) + ">"


@dataclass(frozen=True)
class Placement:
    leaves: frozenset[str]

    def __len__(self) -> int:
        return len(self.leaves)


@dataclass(frozen=True)
class MultiPlacement:
    blocks: tuple[frozenset[str], ...]

    def girth(self) -> int:
        return max((len(b) for b in self.blocks), default=0)


def _entries_of(value: object) -> tuple[int, ...]:
    if isinstance(value, (FailureAggregate, Signature)):
        return value.entries
    return tuple(value)  # type: ignore[arg-type]


def lex_cmp(a: object, b: object) -> int:
    """Return -1, 0, or 1 comparing two equal-length vectors from entry 0."""
    left = _entries_of(a)
    right = _entries_of(b)
    if len(left) != len(right):
        raise ValueError(f"length mismatch: {len(left)} vs {len(right)}")
    if left < right:
        return -1
    if left > right:
        return 1
    return 0


def parse_placement(text: str) -> Placement:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "leaves" not in doc:
        raise ModelError('placement document must be an object with a "leaves" array')
    raw = doc["leaves"]
    if not isinstance(raw, list) or not all(isinstance(x, str) for x in raw):
        raise ModelError('"leaves" must be an array of leaf ids')
    if len(set(raw)) != len(raw):
        raise ModelError("placement lists a leaf twice")
    return Placement(leaves=frozenset(raw))


def parse_multi_placement(text: str) -> MultiPlacement:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "blocks" not in doc:
        raise ModelError('multi-placement document must be an object with a "blocks" array')
    raw = doc["blocks"]
    if not isinstance(raw, list):
        raise ModelError('"blocks" must be an array of arrays of leaf ids')
    blocks = []
    for i, block in enumerate(raw):
        if not isinstance(block, list) or not all(isinstance(x, str) for x in block):
            raise ModelError(f"block {i} must be an array of leaf ids")
        if len(set(block)) != len(block):
            raise ModelError(f"block {i} lists a leaf twice")
        blocks.append(frozenset(block))
    return MultiPlacement(blocks=tuple(blocks))


def _check_leaves(model: FailureModel, leaves: frozenset[str]) -> None:
    for leaf in leaves:
        if leaf not in model.nodes:
            raise ModelError(f"placement names unknown node {leaf!r}")
        if not model.is_leaf(leaf):
            raise ModelError(f"placement names internal node {leaf!r}")


def failure_number(model: FailureModel, node_id: str, placement: Placement) -> int:
    """Count placement leaves inside the subtree of node_id."""
    if node_id not in model.nodes:
        raise ModelError(f"unknown node {node_id!r}")
    _check_leaves(model, placement.leaves)
    count = 0
    for leaf in placement.leaves:
        cursor: str | None = leaf
        while cursor is not None:
            if cursor == node_id:
                count += 1
                break
            cursor = model.parent(cursor)
    return count


def failure_numbers(model: FailureModel, placement: Placement) -> dict[str, int]:
    """Failure number of every node in one bottom-up pass."""
    _check_leaves(model, placement.leaves)
    fn = {node_id: 0 for node_id in model.nodes}
    for leaf in placement.leaves:
        fn[leaf] = 1
    for node_id in postorder(model):
        for child in model.children[node_id]:
            fn[node_id] += fn[child]
    return fn


def failure_aggregate(model: FailureModel, placement: Placement, rho: int) -> FailureAggregate:
    if rho < len(placement.leaves):
        raise ModelError(
            f"rho={rho} is smaller than the placement size {len(placement.leaves)}"
        )
    fn = failure_numbers(model, placement)
    entries = [0] * (rho + 1)
    for value in fn.values():
        entries[rho - value] += 1
    return FailureAggregate(entries=tuple(entries), rho=rho)


def multi_aggregate(model: FailureModel, mp: MultiPlacement) -> FailureAggregate:
    """Sum of per-block aggregates, all padded to the girth."""
    rho = mp.girth()
    counts: dict[str, int] = {}
    for block in mp.blocks:
        _check_leaves(model, block)
        for leaf in block:
            counts[leaf] = counts.get(leaf, 0) + 1
    for leaf, used in counts.items():
        if used > model.capacity(leaf):
            raise ModelError(
                f"leaf {leaf!r} holds {used} replicas but has capacity {model.capacity(leaf)}"
            )
    entries = [0] * (rho + 1)
    for block in mp.blocks:
        agg = failure_aggregate(model, Placement(leaves=block), rho)
        for i, v in enumerate(agg.entries):
            entries[i] += v
    return FailureAggregate(entries=tuple(entries), rho=rho)


def _subtree_leaves(model: FailureModel, node_id: str) -> set[str]:
    found: set[str] = set()
    stack = [node_id]
    while stack:
        cursor = stack.pop()
        kids = model.children[cursor]
        if not kids:
            found.add(cursor)
        else:
            stack.extend(kids)
    return found


def sub_signature(model: FailureModel, mp: MultiPlacement, node_id: str) -> Signature:
    """Signature of the multi-placement restricted to one subtree.

    Entry k counts blocks with exactly rho - k replicas inside the
    subtree, where rho is the girth of the full multi-placement, so
    sub-signatures of different nodes stay comparable.
    """
    if node_id not in model.nodes:
        raise ModelError(f"unknown node {node_id!r}")
    rho = mp.girth()
    below = _subtree_leaves(model, node_id)
    entries = [0] * (rho + 1)
    for block in mp.blocks:
        inside = len(block & below)
        entries[rho - inside] += 1
    return Signature(entries=tuple(entries), rho=rho)


def signature_of_sizes(sizes: list[int] | tuple[int, ...]) -> Signature:
    if not sizes:
        raise ModelError("sizes list is empty")
    for s in sizes:
        if isinstance(s, bool) or not isinstance(s, int) or s < 0:
            raise ModelError(f"block size must be a non-negative integer, got {s!r}")
    rho = max(sizes)
    entries = [0] * (rho + 1)
    for s in sizes:
        entries[rho - s] += 1
    return Signature(entries=tuple(entries), rho=rho)


def sig_stats(sig: Signature) -> tuple[int, int]:
    """Return (skew, girth): index spread of the support, and the
    largest represented block size. Both are 0 for an all-zero census."""
    nonzero = [i for i, v in enumerate(sig.entries) if v != 0]
    if not nonzero:
        return 0, 0
    skew = nonzero[-1] - nonzero[0]
    girth = sig.rho - nonzero[0]
    return skew, girth


def index_extent(sig: Signature) -> int:
    """Largest nonzero index (0 for an all-zero census). The raw
    counterpart of the size-based girth in sig_stats."""
    nonzero = [i for i, v in enumerate(sig.entries) if v != 0]
    return nonzero[-1] if nonzero else 0


def shift(vector: tuple[int, ...]) -> tuple[int, ...]:
    """Drop entry 0 and append a zero, keeping the length."""
    return vector[1:] + (0,)


def path_aggregate(
    model: FailureModel,
    from_node: str,
    to_node: str,
    placement: Placement,
    rho: int,
) -> FailureAggregate:
    """Aggregate restricted to the nodes on the path from_node -> to_node
    (both inclusive). to_node must be a descendant of from_node."""
    if from_node not in model.nodes:
        raise ModelError(f"unknown node {from_node!r}")
    if to_node not in model.nodes:
        raise ModelError(f"unknown node {to_node!r}")
    if rho < len(placement.leaves):
        raise ModelError(
            f"rho={rho} is smaller than the placement size {len(placement.leaves)}"
        )
    path = [to_node]
    cursor = to_node
    while cursor != from_node:
        parent = model.parent(cursor)
        if parent is None:
            raise ModelError(f"{to_node!r} is not a descendant of {from_node!r}")
        path.append(parent)
        cursor = parent
    fn = failure_numbers(model, placement)
    entries = [0] * (rho + 1)
    for node_id in path:
        entries[rho - fn[node_id]] += 1
    return FailureAggregate(entries=tuple(entries), rho=rho)
