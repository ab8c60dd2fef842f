"""Failure model: a forest of failure domains with capacitated servers.

A model is a rooted forest. Internal nodes are failure events (a row
losing power, a rack losing its uplink). Leaves are servers and carry a
positive replica capacity. The JSON wire format is::

    {"nodes": [{"id": "row1", "parent": null},
               {"id": "srv1", "parent": "row1", "capacity": 1},
               ...]}

Exactly the leaves carry "capacity". Node order in the file is
preserved and used as the child order everywhere downstream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import ModelError


@dataclass(frozen=True)
class Node:
    id: str
    parent: str | None
    capacity: int | None

    @property
    def kind(self) -> str:
        return "internal-event" if self.capacity is None else "leaf-server"


@dataclass
class FailureModel:
    """Validated forest with derived lookup tables."""

    nodes: dict[str, Node]
    roots: list[str] = field(default_factory=list)
    children: dict[str, list[str]] = field(default_factory=dict)
    leaves: list[str] = field(default_factory=list)

    def is_leaf(self, node_id: str) -> bool:
        return self.nodes[node_id].capacity is not None

    def capacity(self, node_id: str) -> int:
        cap = self.nodes[node_id].capacity
        if cap is None:
            raise ModelError(f"node {node_id!r} is not a leaf")
        return cap

    def parent(self, node_id: str) -> str | None:
        return self.nodes[node_id].parent

    def node_ids(self) -> list[str]:
        return list(self.nodes)

    def __len__(self) -> int:
        return len(self.nodes)


def _check_node_entry(entry: object, seen: dict[str, Node]) -> Node:
    if not isinstance(entry, dict):
        raise ModelError(f"node entry must be an object, got {type(entry).__name__}")
    unknown = set(entry) - {"id", "parent", "capacity"}
    if unknown:
        raise ModelError(f"unknown node fields: {sorted(unknown)}")
    node_id = entry.get("id")
    if not isinstance(node_id, str) or not node_id:
        raise ModelError(f"node id must be a non-empty string, got {node_id!r}")
    if node_id in seen:
        raise ModelError(f"duplicate node id {node_id!r}")
    parent = entry.get("parent")
    if parent is not None and not isinstance(parent, str):
        raise ModelError(f"parent of {node_id!r} must be a string or null")
    if parent == node_id:
        raise ModelError(f"node {node_id!r} is its own parent")
    capacity = entry.get("capacity")
    if capacity is not None:
        if isinstance(capacity, bool) or not isinstance(capacity, int):
            raise ModelError(f"capacity of {node_id!r} must be an integer")
        if capacity < 1:
            raise ModelError(f"capacity of {node_id!r} must be positive")
    return Node(id=node_id, parent=parent, capacity=capacity)


def parse_model(text: str) -> FailureModel:
    """Parse and validate the JSON wire format.

    Raises ModelError for structural problems: duplicate ids, unknown
    parents, capacity on an internal node or missing on a leaf, parent
    cycles, or an empty model.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "nodes" not in doc:
        raise ModelError('model document must be an object with a "nodes" array')
    raw_nodes = doc["nodes"]
    if not isinstance(raw_nodes, list):
        raise ModelError('"nodes" must be an array')
    if not raw_nodes:
        raise ModelError("model has no nodes")

    nodes: dict[str, Node] = {}
    for entry in raw_nodes:
        node = _check_node_entry(entry, nodes)
        nodes[node.id] = node

    children: dict[str, list[str]] = {node_id: [] for node_id in nodes}
    roots: list[str] = []
    for node in nodes.values():
        if node.parent is None:
            roots.append(node.id)
        else:
            if node.parent not in nodes:
                raise ModelError(f"node {node.id!r} has unknown parent {node.parent!r}")
            children[node.parent].append(node.id)

    for node in nodes.values():
        if node.capacity is not None and children[node.id]:
            raise ModelError(f"leaf {node.id!r} has capacity but also children")
        if node.capacity is None and not children[node.id]:
            raise ModelError(f"childless node {node.id!r} has no capacity")

    # Parent links could still form a cycle detached from every root.
    # Everything a root can reach is acyclic (each node has one parent),
    # so a full reachability sweep doubles as the cycle check.
    reached = 0
    stack = list(roots)
    while stack:
        node_id = stack.pop()
        reached += 1
        stack.extend(children[node_id])
    if reached != len(nodes):
        raise ModelError("model contains a parent cycle unreachable from any root")

    leaves = [node.id for node in nodes.values() if node.capacity is not None]
    return FailureModel(nodes=nodes, roots=roots, children=children, leaves=leaves)


def render_model(model: FailureModel) -> str:
    """Serialize back to the wire format, preserving node order."""
    entries = []
    for node in model.nodes.values():
        entry: dict[str, object] = {"id": node.id, "parent": node.parent}
        if node.capacity is not None:
            entry["capacity"] = node.capacity
        entries.append(entry)
    return json.dumps({"nodes": entries}, indent=2) + "\n"


@dataclass
class SubtreeStats:
    """Per-node subtree summaries, keyed by node id.

    min_depth_leaf maps each node to the id of a shallowest descendant
    leaf (first in child order on ties).
    """

    leaf_count: dict[str, int]
    capacity_sum: dict[str, int]
    min_depth_leaf: dict[str, str]


def postorder(model: FailureModel, starts: list[str] | None = None) -> list[str]:
    """Iterative postorder over the forest (children before parents)."""
    order: list[str] = []
    stack: list[tuple[str, bool]] = []
    for root in reversed(starts if starts is not None else model.roots):
        stack.append((root, False))
    while stack:
        node_id, expanded = stack.pop()
        if expanded:
            order.append(node_id)
            continue
        stack.append((node_id, True))
        for child in reversed(model.children[node_id]):
            stack.append((child, False))
    return order


def subtree_stats(model: FailureModel) -> SubtreeStats:
    depth: dict[str, int] = {}
    for root in model.roots:
        depth[root] = 0
        stack = [root]
        while stack:
            node_id = stack.pop()
            for child in model.children[node_id]:
                depth[child] = depth[node_id] + 1
                stack.append(child)

    leaf_count: dict[str, int] = {}
    capacity_sum: dict[str, int] = {}
    min_depth_leaf: dict[str, str] = {}
    for node_id in postorder(model):
        kids = model.children[node_id]
        if not kids:
            leaf_count[node_id] = 1
            capacity_sum[node_id] = model.capacity(node_id)
            min_depth_leaf[node_id] = node_id
            continue
        leaf_count[node_id] = sum(leaf_count[c] for c in kids)
        capacity_sum[node_id] = sum(capacity_sum[c] for c in kids)
        best = min(kids, key=lambda c: depth[min_depth_leaf[c]])
        min_depth_leaf[node_id] = min_depth_leaf[best]
    return SubtreeStats(
        leaf_count=leaf_count,
        capacity_sum=capacity_sum,
        min_depth_leaf=min_depth_leaf,
    )
