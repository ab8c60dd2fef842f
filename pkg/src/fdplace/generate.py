"""Seeded random model generation, shared by tests and the gen command."""

from __future__ import annotations

import json
import random

from .model import FailureModel, parse_model


def random_model(
    leaves: int,
    seed: int,
    max_fanout: int = 4,
    max_capacity: int = 1,
    roots: int = 1,
) -> FailureModel:
    """Build a random failure model with the given number of leaves.

    The same arguments always produce the same model. Occasional
    pass-through domains (one internal node wrapping another) are
    inserted so chain handling gets exercised.
    """
    if leaves < 1:
        raise ValueError(f"need at least one leaf, got {leaves}")
    if not 1 <= roots <= leaves:
        raise ValueError(f"roots must be in [1, {leaves}], got {roots}")
    if max_fanout < 2:
        raise ValueError(f"max_fanout must be at least 2, got {max_fanout}")
    if max_capacity < 1:
        raise ValueError(f"max_capacity must be at least 1, got {max_capacity}")

    rng = random.Random(seed)
    entries: list[dict] = []
    counts = {"domain": 0, "server": 0}

    def split(count: int, parts: int) -> list[int]:
        if parts == 1:
            return [count]
        cuts = sorted(rng.sample(range(1, count), parts - 1))
        sizes = []
        prev = 0
        for cut in cuts + [count]:
            sizes.append(cut - prev)
            prev = cut
        return sizes

    def build(count: int, parent: str | None) -> None:
        while rng.random() < 0.15:
            counts["domain"] += 1
            name = f"d{counts['domain']}"
            entries.append({"id": name, "parent": parent})
            parent = name
        if count == 1:
            counts["server"] += 1
            name = f"s{counts['server']}"
            entries.append(
                {"id": name, "parent": parent, "capacity": rng.randint(1, max_capacity)}
            )
            return
        counts["domain"] += 1
        name = f"d{counts['domain']}"
        entries.append({"id": name, "parent": parent})
        fanout = rng.randint(2, min(max_fanout, count))
        for part in split(count, fanout):
            build(part, name)

    for part in split(leaves, roots):
        build(part, None)
    return parse_model(json.dumps({"nodes": entries}))
