"""Block compositions, (intactness, depth) labels and the class-index codec."""

import hashlib
import json
from dataclasses import dataclass
from functools import lru_cache

from entstruct.core.exceptions import DomainError


@dataclass(frozen=True, slots=True)
class Composition:
    """Ordered block sizes of an n-qubit product of seed states."""

    n: int
    blocks: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.blocks or any(b < 1 for b in self.blocks) or sum(self.blocks) != self.n:
            raise DomainError(
                "Composition blocks must be positive and sum to n",
                "INVALID_COMPOSITION",
                {"n": self.n, "blocks": self.blocks}
            )


@dataclass(frozen=True, slots=True)
class StructureLabel:
    """Intactness m (number of blocks), depth d (largest block) and dense class index."""

    intactness: int
    depth: int
    class_index: int


def _require_positive(n: int) -> None:
    if n < 1:
        raise DomainError("Qubit count must be at least 1", "INVALID_QUBIT_COUNT", {"n": n})


@lru_cache(maxsize=32)
def enumerate_compositions(n: int) -> tuple[Composition, ...]:
    """All 2^(n-1) ordered compositions of n, lexicographic on block lists.

    Bit i of the mask (i < n-1) cuts between position i and i+1.
    """
    _require_positive(n)
    block_lists = []
    for mask in range(1 << (n - 1)):
        blocks = []
        size = 1
        for gap in range(n - 1):
            if mask >> gap & 1:
                blocks.append(size)
                size = 1
            else:
                size += 1
        blocks.append(size)
        block_lists.append(tuple(blocks))
    return tuple(Composition(n, blocks) for blocks in sorted(block_lists))


def compositions_by_recursion(n: int) -> set[tuple[int, ...]]:
    """P(n) = {[n]} U {cat(a, b) : a in P(i), b in P(n - i)} as a set of block tuples.

    Reference construction; exponential memory, only meant for small n.
    """
    _require_positive(n)
    table: dict[int, set[tuple[int, ...]]] = {}
    for size in range(1, n + 1):
        parts = {(size,)}
        for i in range(1, size):
            parts |= {a + b for a in table[i] for b in table[size - i]}
        table[size] = parts
    return table[n]


@lru_cache(maxsize=32)
def class_table(n: int) -> tuple[tuple[int, int], ...]:
    """Feasible (m, d) pairs, ceil(n/m) <= d <= n - m + 1, ascending lexicographically."""
    _require_positive(n)
    pairs = []
    for m in range(1, n + 1):
        lowest = -(-n // m)
        for d in range(lowest, n - m + 2):
            pairs.append((m, d))
    return tuple(pairs)


@lru_cache(maxsize=32)
def _index_of(n: int) -> dict[tuple[int, int], int]:
    return {pair: index for index, pair in enumerate(class_table(n))}


def class_index(n: int, intactness: int, depth: int) -> int:
    """Rank of (m, d) in class_table(n).

    Raises:
        DomainError: If (m, d) is not feasible for n
    """
    try:
        return _index_of(n)[(intactness, depth)]
    except KeyError:
        raise DomainError(
            "Infeasible (intactness, depth) pair",
            "INFEASIBLE_LABEL",
            {"n": n, "intactness": intactness, "depth": depth}
        ) from None


def class_pair(n: int, index: int) -> tuple[int, int]:
    """Inverse of class_index."""
    table = class_table(n)
    if not 0 <= index < len(table):
        raise DomainError("Class index out of range", "INVALID_CLASS_INDEX",
                          {"n": n, "index": index})
    return table[index]


def label_of(composition: Composition) -> StructureLabel:
    """Intactness = number of blocks, depth = largest block."""
    m = len(composition.blocks)
    d = max(composition.blocks)
    return StructureLabel(m, d, class_index(composition.n, m, d))


def closed_form_class_count(n: int) -> int:
    """(n^2 + 3n)/2 - 1 - sum_i ceil(n/i).

    Kept as a reference value; it is one less than len(class_table(n)) for every n,
    and class_table is what labels are drawn from.
    """
    _require_positive(n)
    return (n * n + 3 * n) // 2 - 1 - sum(-(-n // i) for i in range(1, n + 1))


def class_table_hash(n: int) -> str:
    """Stable digest of class_table(n), stored in model files."""
    payload = json.dumps([list(pair) for pair in class_table(n)])
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]
