"""MaxCut instances: random generation, cut evaluation, exhaustive oracle, file I/O."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .errors import CapacityError, InputError

MAX_ENUMERATION_QUBITS = 24

Edge = tuple[int, int, float]
BitstringLike = Union[str, Sequence[int], np.ndarray]


@dataclass(frozen=True)
class Graph:
    """Undirected weighted graph on vertices ``0..n-1``.

    Edges are canonicalized on construction: each is stored as ``(i, j, w)``
    with ``i < j`` and the list is sorted by ``(i, j)``.
    """

    n: int
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InputError(f"vertex count must be a positive integer, got {self.n!r}")
        canon = {}
        for edge in self.edges:
            i, j, w = int(edge[0]), int(edge[1]), float(edge[2])
            if i == j:
                raise InputError(f"self-loop on vertex {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise InputError(f"edge ({i}, {j}) out of range for n={self.n}")
            if not np.isfinite(w) or w < 0:
                raise InputError(f"edge ({i}, {j}) has invalid weight {w}")
            key = (min(i, j), max(i, j))
            if key in canon:
                raise InputError(f"duplicate edge {key}")
            canon[key] = w
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(
            self, "edges", tuple((i, j, w) for (i, j), w in sorted(canon.items()))
        )

    @property
    def total_weight(self) -> float:
        return float(sum(w for _, _, w in self.edges))

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, tuple((i, j, 1.0) for i in range(n) for j in range(i + 1, n)))

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls(n, tuple((i, (i + 1) % n, 1.0) for i in range(n)))

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls(n, tuple((i, i + 1, 1.0) for i in range(n - 1)))

    def is_connected(self) -> bool:
        adj = {v: set() for v in range(self.n)}
        for i, j, _ in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        seen, stack = {0}, [0]
        while stack:
            for u in adj[stack.pop()]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == self.n

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Return the graph with vertex ``v`` renamed to ``perm[v]``."""
        return Graph(self.n, tuple((perm[i], perm[j], w) for i, j, w in self.edges))


def as_bits(s: BitstringLike, n: int | None = None) -> np.ndarray:
    """Coerce a bitstring to an int8 array; for strings, character ``i`` is bit ``i``."""
    if isinstance(s, str):
        if set(s) - {"0", "1"}:
            raise InputError(f"bitstring {s!r} contains characters other than 0/1")
        bits = np.fromiter((int(c) for c in s), dtype=np.int8, count=len(s))
    else:
        bits = np.asarray(s, dtype=np.int8).ravel()
        if np.any((bits != 0) & (bits != 1)):
            raise InputError("bitstring entries must be 0 or 1")
    if n is not None and bits.size != n:
        raise InputError(f"bitstring has length {bits.size}, expected {n}")
    return bits


def bits_to_index(s: BitstringLike) -> int:
    """Basis index with bit ``i`` as the ``i``-th least significant bit."""
    return int(sum(int(b) << i for i, b in enumerate(as_bits(s))))


def index_to_bits(index: int, n: int) -> np.ndarray:
    return np.array([(index >> i) & 1 for i in range(n)], dtype=np.int8)


def random_graph(n: int, edge_prob: float, rng: np.random.Generator) -> Graph:
    """Erdos-Renyi graph with unit weights.

    Pairs are visited in ``(i, j)`` order with ``i < j``, drawing one uniform
    variate per pair, so the result is a function of the rng state alone.
    """
    if not 0.0 <= edge_prob <= 1.0:
        raise InputError(f"edge probability must lie in [0, 1], got {edge_prob}")
    if n < 1:
        raise InputError(f"vertex count must be >= 1, got {n}")
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < edge_prob:
                edges.append((i, j, 1.0))
    return Graph(n, tuple(edges))


def cut_value(g: Graph, s: BitstringLike) -> float:
    """Total weight of edges whose endpoints sit on different sides of ``s``."""
    bits = as_bits(s, g.n)
    return float(sum(w for i, j, w in g.edges if bits[i] != bits[j]))


def brute_force_maxcut(g: Graph) -> tuple[float, np.ndarray]:
    """Exhaustive MaxCut over all ``2**n`` partitions.

    Ties go to the partition with the smallest integer index (bit 0 least
    significant).
    """
    if g.n > MAX_ENUMERATION_QUBITS:
        raise CapacityError(f"n={g.n} exceeds enumeration limit {MAX_ENUMERATION_QUBITS}")
    idx = np.arange(1 << g.n, dtype=np.int64)
    cuts = np.zeros(idx.size)
    for i, j, w in g.edges:
        cuts += w * (((idx >> i) ^ (idx >> j)) & 1)
    best = int(np.argmax(cuts))
    return float(cuts[best]), index_to_bits(best, g.n)


def write_graph(path: Union[str, Path], g: Graph) -> None:
    lines = [f"{g.n} {len(g.edges)}"]
    lines += [f"{i} {j} {w:.17g}" for i, j, w in g.edges]
    Path(path).write_text("\n".join(lines) + "\n")


def read_graph(path: Union[str, Path]) -> Graph:
    rows = [ln.split() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not rows or len(rows[0]) != 2:
        raise InputError(f"{path}: missing 'n m' header")
    n, m = int(rows[0][0]), int(rows[0][1])
    body = rows[1:]
    if len(body) != m:
        raise InputError(f"{path}: header declares {m} edges, found {len(body)}")
    edges = []
    for row in body:
        if len(row) != 3:
            raise InputError(f"{path}: malformed edge line {' '.join(row)!r}")
        edges.append((int(row[0]), int(row[1]), float(row[2])))
    return Graph(n, tuple(edges))
