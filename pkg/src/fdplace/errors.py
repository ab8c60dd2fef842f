"""Exception types shared across the package.

The CLI maps these onto process exit codes, so library code should
raise the most specific one that applies.
"""

from __future__ import annotations


class ModelError(ValueError):
    """Malformed model or placement input (bad JSON shape, unknown ids,
    capacity rules broken, cycles, and similar validation failures)."""


class InfeasibleError(ValueError):
    """The request cannot be satisfied on this model (too many replicas,
    a block larger than the leaf set, no placement with the target
    signature, and so on)."""


class GuardLimitError(RuntimeError):
    """An exhaustive oracle refused to run because the search space
    exceeds its guard bound."""


class SkewOverrideError(ValueError):
    """A requested skew bound is below the natural bound for the block
    sizes, which would make the target signature unreachable."""
