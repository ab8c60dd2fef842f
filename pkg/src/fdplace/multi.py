"""Multi-block placement with a bounded signature skew.

Block-size censuses (signatures) index sizes from the girth down, the
same way aggregates index failure counts. The solver restricts every
subtree's census to a window of delta + 1 adjacent size classes, builds
the table of census splits compatible with that bound (build_phi), and
runs a dynamic program over (node, census) states, merging children one
at a time.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass

from .errors import InfeasibleError, SkewOverrideError
from .metrics import FailureAggregate, MultiPlacement, Signature, signature_of_sizes
from .model import FailureModel, postorder, subtree_stats

Vector = tuple[int, ...]
Support = tuple[tuple[int, int, int], ...]


def band_cell_count(delta: int, d: int) -> int:
    """Number of matrix cells a split with diagonal offset d can touch
    inside a (delta+1) by (delta+1) window: the full square minus the
    two corner triangles cut off by the band d-1 <= p+q <= d+delta-1."""
    if delta < 0:
        raise ValueError(f"delta must be non-negative, got {delta}")
    if not 1 <= d <= delta + 1:
        raise ValueError(f"d must be in [1, {delta + 1}], got {d}")

    def tri(t: int) -> int:
        return t * (t + 1) // 2

    return (delta + 1) ** 2 - tri(d - 1) - tri(delta + 1 - d)


def enum_weak_compositions(n: int, k: int):
    """Yield all ways to write n as an ordered sum of k non-negative
    parts, in a reflected order where consecutive outputs differ in
    exactly two positions, one up by 1 and one down by 1."""
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    if k == 0:
        if n > 0:
            raise ValueError("cannot split a positive total into zero parts")
        yield ()
        return

    def gen(total: int, parts: int, forward: bool):
        if parts == 1:
            yield (total,)
            return
        heads = range(total + 1) if forward else range(total, -1, -1)
        for head in heads:
            sub = forward if head % 2 == 0 else not forward
            for rest in gen(total - head, parts - 1, sub):
                yield (head,) + rest

    yield from gen(n, k, True)


@dataclass
class PhiTable:
    """All ways to split an m-block census into two censuses whose
    merge gives it back, with every census obeying the skew bound.

    pairs maps a census to its set of (left, right) splits. supports
    maps (census, left, right) to the set of cell layouts (i, j, count)
    realizing that split: count blocks combine a size rho-i left part
    with a size rho-j right part.
    """

    m: int
    rho: int
    delta: int
    pairs: dict[Vector, set[tuple[Vector, Vector]]]
    supports: dict[tuple[Vector, Vector, Vector], set[Support]]


def build_phi(m: int, rho: int, delta: int) -> PhiTable:
    if m < 1:
        raise ValueError(f"m must be at least 1, got {m}")
    if not 1 <= delta <= rho:
        raise ValueError(f"delta must be in [1, {rho}], got {delta}")
    pairs: dict[Vector, set[tuple[Vector, Vector]]] = defaultdict(set)
    supports: dict[tuple[Vector, Vector, Vector], set[Support]] = defaultdict(set)
    top = rho - delta
    for a in range(top + 1):
        for b in range(top + 1):
            if a + b < top:
                continue
            for d in range(max(1, rho + 1 - a - b), delta + 2):
                cells = [
                    (a + p, b + q)
                    for p in range(delta + 1)
                    for q in range(delta + 1)
                    if d - 1 <= p + q <= d + delta - 1
                ]
                for comp in enum_weak_compositions(m, len(cells)):
                    support = tuple(
                        (i, j, v) for (i, j), v in zip(cells, comp) if v
                    )
                    row = [0] * (rho + 1)
                    col = [0] * (rho + 1)
                    diag = [0] * (rho + 1)
                    for i, j, v in support:
                        row[i] += v
                        col[j] += v
                        diag[i + j - rho] += v
                    sig = tuple(diag)
                    left = tuple(row)
                    right = tuple(col)
                    pairs[sig].add((left, right))
                    supports[(sig, left, right)].add(support)
    return PhiTable(m=m, rho=rho, delta=delta, pairs=dict(pairs), supports=dict(supports))


def target_signature(sizes: list[int] | tuple[int, ...]) -> tuple[Signature, int]:
    """Census of the requested block sizes plus the natural skew bound:
    the size spread, but at least 1."""
    sizes = tuple(sizes)
    if not sizes:
        raise InfeasibleError("no block sizes given")
    if any(s < 1 for s in sizes):
        raise InfeasibleError("every block size must be at least 1")
    sig = signature_of_sizes(sizes)
    delta = max(max(sizes) - min(sizes), 1)
    return sig, delta


def _signature_domain(m: int, rho: int, delta: int) -> list[Vector]:
    """Every census of m blocks over sizes 0..rho whose support spans at
    most delta + 1 adjacent classes, leading class first."""
    out: list[Vector] = []
    for start in range(rho + 1):
        width = min(delta + 1, rho + 1 - start)
        for comp in enum_weak_compositions(m - 1, width):
            entries = [0] * (rho + 1)
            entries[start] = comp[0] + 1
            for off in range(1, width):
                entries[start + off] = comp[off]
            out.append(tuple(entries))
    return out


def _stored(sig: Vector, rho: int) -> int:
    return sum((rho - k) * v for k, v in enumerate(sig))


def solve_multi(
    model: FailureModel,
    sizes: list[int] | tuple[int, ...],
    skew: int | None = None,
) -> tuple[FailureAggregate, MultiPlacement]:
    """Lexicographically optimal placement of blocks with the given
    sizes. skew widens the per-subtree census window beyond the natural
    bound; narrowing it below the natural bound is rejected."""
    target, natural = target_signature(sizes)
    sizes = tuple(sizes)
    m = len(sizes)
    rho = max(sizes)
    if skew is not None:
        if skew < natural:
            raise SkewOverrideError(
                f"skew {skew} is below the natural bound {natural} for these sizes"
            )
        delta = min(skew, rho)
    else:
        delta = min(natural, rho)

    stats = subtree_stats(model)
    total_capacity = sum(stats.capacity_sum[r] for r in model.roots)
    if sum(sizes) > total_capacity:
        raise InfeasibleError(
            f"total replicas {sum(sizes)} exceed total capacity {total_capacity}"
        )
    if rho > len(model.leaves):
        raise InfeasibleError(
            f"block size {rho} exceeds the {len(model.leaves)} available leaves"
        )

    phi = build_phi(m, rho, delta)
    domain = _signature_domain(m, rho, delta)
    sorted_pairs = {
        sig: sorted(phi.pairs.get(sig, ())) for sig in domain
    }

    tables: dict[str, dict[Vector, Vector]] = {}
    choice: dict[tuple[str | None, int, Vector], tuple[Vector, Vector]] = {}

    def merge_tables(
        node_key: str | None,
        left: dict[Vector, Vector],
        k: int,
        right: dict[Vector, Vector],
        cap_prefix: int,
    ) -> dict[Vector, Vector]:
        out: dict[Vector, Vector] = {}
        for sig in domain:
            if _stored(sig, rho) > cap_prefix:
                continue
            best: Vector | None = None
            best_pair: tuple[Vector, Vector] | None = None
            for lp, rp in sorted_pairs[sig]:
                lval = left.get(lp)
                if lval is None:
                    continue
                rval = right.get(rp)
                if rval is None:
                    continue
                cand = tuple(
                    lval[i] + rval[i] + sig[i] - lp[i] for i in range(rho + 1)
                )
                if best is None or cand < best:
                    best = cand
                    best_pair = (lp, rp)
            if best is not None:
                out[sig] = best
                choice[(node_key, k, sig)] = best_pair
        return out

    for u in postorder(model):
        kids = model.children[u]
        if not kids:
            cap = model.capacity(u)
            table: dict[Vector, Vector] = {}
            for ones in range(0, min(cap, m) + 1):
                entries = [0] * (rho + 1)
                entries[rho - 1] += ones
                entries[rho] += m - ones
                sig = tuple(entries)
                table[sig] = sig
            tables[u] = table
            continue
        first = tables[kids[0]]
        acc = {sig: tuple(v + s for v, s in zip(val, sig)) for sig, val in first.items()}
        cap_prefix = stats.capacity_sum[kids[0]]
        for k in range(2, len(kids) + 1):
            child = kids[k - 1]
            cap_prefix += stats.capacity_sum[child]
            acc = merge_tables(u, acc, k, tables[child], cap_prefix)
        tables[u] = acc

    if len(model.roots) == 1:
        root_key: str | None = model.roots[0]
        final = tables[model.roots[0]]
        value = final.get(target.entries)
    else:
        root_key = None
        first = tables[model.roots[0]]
        acc = {sig: tuple(v + s for v, s in zip(val, sig)) for sig, val in first.items()}
        cap_prefix = stats.capacity_sum[model.roots[0]]
        for k in range(2, len(model.roots) + 1):
            child = model.roots[k - 1]
            cap_prefix += stats.capacity_sum[child]
            acc = merge_tables(None, acc, k, tables[child], cap_prefix)
        raw = acc.get(target.entries)
        value = (
            tuple(raw[i] - target.entries[i] for i in range(rho + 1))
            if raw is not None
            else None
        )

    if value is None:
        raise InfeasibleError("no multi-placement with the target signature fits this model")

    # Walk the decisions back down, assigning each child its census.
    target_sig = target.entries
    sub_target: dict[str, Vector] = {}
    fold_steps: dict[str | None, list[tuple[Vector, Vector, Vector]]] = {}

    def kids_of(key: str | None) -> list[str]:
        return model.roots if key is None else model.children[key]

    walk: list[tuple[str | None, Vector]] = [(root_key, target_sig)]
    while walk:
        u, sig = walk.pop()
        kids = kids_of(u)
        if not kids:
            assert u is not None
            sub_target[u] = sig
            continue
        steps: list[tuple[Vector, Vector, Vector]] = []
        cur = sig
        for k in range(len(kids), 1, -1):
            lp, rp = choice[(u, k, cur)]
            steps.append((cur, lp, rp))
            walk.append((kids[k - 1], rp))
            cur = lp
        walk.append((kids[0], cur))
        fold_steps[u] = list(reversed(steps))

    # Build the blocks bottom up, pairing partial blocks cell by cell.
    def merge_blocks(
        left: list[frozenset[str]],
        right: list[frozenset[str]],
        key: tuple[Vector, Vector, Vector],
    ) -> list[frozenset[str]]:
        support = min(phi.supports[key])
        by_left: dict[int, deque[frozenset[str]]] = defaultdict(deque)
        by_right: dict[int, deque[frozenset[str]]] = defaultdict(deque)
        for blk in left:
            by_left[rho - len(blk)].append(blk)
        for blk in right:
            by_right[rho - len(blk)].append(blk)
        merged: list[frozenset[str]] = []
        for i, j, v in support:
            for _ in range(v):
                merged.append(by_left[i].popleft() | by_right[j].popleft())
        return merged

    blocks_of: dict[str, list[frozenset[str]]] = {}
    for u in postorder(model):
        kids = model.children[u]
        if not kids:
            sig = sub_target[u]
            singles = sig[rho - 1]
            blocks = [frozenset([u])] * singles + [frozenset()] * (m - singles)
            blocks_of[u] = blocks
            continue
        acc_blocks = blocks_of[kids[0]]
        for step, (sig, lp, rp) in enumerate(fold_steps[u]):
            acc_blocks = merge_blocks(acc_blocks, blocks_of[kids[step + 1]], (sig, lp, rp))
        blocks_of[u] = acc_blocks

    if root_key is None:
        final_blocks = blocks_of[model.roots[0]]
        for step, (sig, lp, rp) in enumerate(fold_steps[None]):
            final_blocks = merge_blocks(
                final_blocks, blocks_of[model.roots[step + 1]], (sig, lp, rp)
            )
    else:
        final_blocks = blocks_of[root_key]

    by_size: dict[int, deque[frozenset[str]]] = defaultdict(deque)
    for blk in final_blocks:
        by_size[len(blk)].append(blk)
    ordered = tuple(by_size[s].popleft() for s in sizes)
    agg = FailureAggregate(entries=value, rho=rho)
    return agg, MultiPlacement(blocks=ordered)
