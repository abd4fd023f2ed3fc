"""Tournaments stored as dense boolean adjacency with packed bit rows."""

from functools import cached_property

import numpy as np

from .errors import (
    ConflictingPair,
    MissingPair,
    SameVertex,
    SelfLoop,
    TournamentError,
    VertexOutOfRange,
)
from .kernels import pack_rows

OUT = "out"
IN = "in"


class Tournament:
    """Immutable tournament on vertices ``0..n-1``.

    ``adjacency[x, y]`` is True iff x beat y.
    """

    def __init__(self, adjacency, *, _trusted=False):
        adj = np.array(adjacency, dtype=bool, copy=True)
        if not _trusted:
            check_tournament_matrix(adj)
        adj.setflags(write=False)
        self._adj = adj

    @property
    def order(self):
        return self._adj.shape[0]

    @property
    def adjacency(self):
        return self._adj

    @cached_property
    def out_bits(self):
        bits = pack_rows(self._adj)
        bits.setflags(write=False)
        return bits

    @cached_property
    def in_bits(self):
        bits = pack_rows(self._adj.T)
        bits.setflags(write=False)
        return bits

    def out_degrees(self):
        return self._adj.sum(axis=1)

    def in_degrees(self):
        return self._adj.sum(axis=0)

    def edges(self):
        xs, ys = np.nonzero(self._adj)
        return [(int(x), int(y)) for x, y in zip(xs, ys)]

    def __len__(self):
        return self.order

    def __eq__(self, other):
        if not isinstance(other, Tournament):
            return NotImplemented
        return np.array_equal(self._adj, other._adj)

    def __hash__(self):
        return hash((self.order, np.packbits(self._adj).tobytes()))

    def __repr__(self):
        return f"Tournament(order={self.order}, edges={len(self.edges())})"


def check_tournament_matrix(adj):
    if adj.ndim != 2 or adj.shape[0] != adj.shape[1] or adj.shape[0] < 1:
        raise TournamentError(f"adjacency must be a non-empty square matrix, got {adj.shape}")
    diag = np.flatnonzero(np.diag(adj))
    if diag.size:
        x = int(diag[0])
        raise SelfLoop(f"self loop at vertex {x}")
    both = adj & adj.T
    if both.any():
        x, y = (int(v) for v in np.argwhere(both)[0])
        raise ConflictingPair(f"both ({x},{y}) and ({y},{x}) present")
    neither = ~(adj | adj.T)
    np.fill_diagonal(neither, False)
    if neither.any():
        x, y = (int(v) for v in np.argwhere(neither)[0])
        raise MissingPair(f"pair {{{x},{y}}} has no orientation")


def _check_vertex(n, v):
    if not 0 <= v < n:
        raise VertexOutOfRange(f"vertex {v} not in 0..{n - 1}")


def build_tournament(n, edges):
    """Build a tournament from an explicit list of ``(winner, loser)`` pairs."""
    if n < 1:
        raise TournamentError("order must be positive")
    adj = np.zeros((n, n), dtype=bool)
    for x, y in edges:
        x, y = int(x), int(y)
        _check_vertex(n, x)
        _check_vertex(n, y)
        if x == y:
            raise SelfLoop(f"self loop at vertex {x}")
        if adj[y, x]:
            raise ConflictingPair(f"both ({x},{y}) and ({y},{x}) present")
        adj[x, y] = True
    return Tournament(adj)


def beats(t, x, y):
    n = t.order
    _check_vertex(n, x)
    _check_vertex(n, y)
    if x == y:
        raise SameVertex(f"beats({x}, {y}) is undefined")
    return bool(t.adjacency[x, y])


def neighborhood(t, x, direction=OUT):
    _check_vertex(t.order, x)
    if direction == OUT:
        row = t.adjacency[x]
    elif direction == IN:
        row = t.adjacency[:, x]
    else:
        raise ValueError(f"direction must be 'out' or 'in', not {direction!r}")
    return frozenset(int(v) for v in np.flatnonzero(row))


def random_adjacency(n, rng):
    """Orient each pair i < j by one fair bit drawn from ``rng``.

    Bits are consumed in row-major upper-triangle order; a set bit means
    i beats j.
    """
    iu, ju = np.triu_indices(n, k=1)
    coins = rng.integers(0, 2, size=iu.size, dtype=np.uint8).astype(bool)
    adj = np.zeros((n, n), dtype=bool)
    adj[iu[coins], ju[coins]] = True
    adj[ju[~coins], iu[~coins]] = True
    return adj


def random_tournament(n, seed):
    """Uniformly random tournament; numpy's PCG64 seeded with ``seed``."""
    if n < 1:
        raise TournamentError("order must be positive")
    rng = np.random.default_rng(seed)
    return Tournament(random_adjacency(n, rng), _trusted=True)


def transitive_tournament(n):
    """Vertex i beats every j > i."""
    return Tournament(np.triu(np.ones((n, n), dtype=bool), k=1))


# ---------------------------------------------------------------------------
# text formats


def to_edge_list(t):
    lines = [str(t.order)]
    lines += [f"{x} {y}" for x, y in t.edges()]
    return "\n".join(lines) + "\n"


def parse_edge_list(text):
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows or len(rows[0]) != 1:
        raise TournamentError("edge list must start with a line holding the order n")
    n = int(rows[0][0])
    edges = []
    for row in rows[1:]:
        if len(row) != 2:
            raise TournamentError(f"malformed edge line: {' '.join(row)!r}")
        edges.append((int(row[0]), int(row[1])))
    return build_tournament(n, edges)


def to_dot(t, name="T"):
    lines = [f"digraph {name} {{"]
    lines += [f"  {v};" for v in range(t.order)]
    lines += [f"  {x} -> {y};" for x, y in t.edges()]
    lines.append("}")
    return "\n".join(lines) + "\n"
