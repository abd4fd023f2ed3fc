"""Teaching dimensions of finite concept classes.

A teaching set for concept C is a set of instances on which every other
concept disagrees with C somewhere, so TD(C) is a minimum set cover: the
universe is the set of rival concepts and instance x covers the rivals that
label x differently from C. The solver below works on Python ints as
bitsets, which is plenty for classes of a few hundred concepts.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import CapExceeded, InstanceOutOfRange, MissingAssignment, TournamentError

DEFAULT_CAP = 12


class ConceptClass:
    """Distinct binary concepts over instances ``0..domain_size-1``.

    Stored as a read-only boolean matrix, one row per concept.
    """

    def __init__(self, domain_size, concepts):
        matrix = np.array(concepts, dtype=bool, copy=True)
        if matrix.ndim == 1 and matrix.size == 0:
            matrix = matrix.reshape(0, domain_size)
        if matrix.ndim != 2 or matrix.shape[1] != domain_size:
            raise TournamentError(f"every concept needs exactly {domain_size} entries")
        if matrix.shape[0] == 0:
            raise TournamentError("a concept class needs at least one concept")
        rows = [_row_to_int(r) for r in matrix]
        if len(set(rows)) != len(rows):
            raise TournamentError("concepts must be pairwise distinct")
        matrix.setflags(write=False)
        self.domain_size = int(domain_size)
        self.matrix = matrix
        self.rows = tuple(rows)

    def __len__(self):
        return self.matrix.shape[0]

    def concept(self, i):
        return frozenset(int(x) for x in np.flatnonzero(self.matrix[i]))

    def subclass(self, indices):
        return ConceptClass(self.domain_size, self.matrix[list(indices)])

    def __repr__(self):
        return f"ConceptClass(domain_size={self.domain_size}, concepts={len(self)})"


def _row_to_int(row):
    return sum(1 << int(x) for x in np.flatnonzero(row))


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def induced_class(t):
    """Concept x is the set of vertices x beat."""
    return ConceptClass(t.order, t.adjacency)


def concept_class_from_sets(domain_size, sets):
    matrix = np.zeros((len(sets), domain_size), dtype=bool)
    for i, s in enumerate(sets):
        for x in s:
            if not 0 <= x < domain_size:
                raise InstanceOutOfRange(f"instance {x} not in 0..{domain_size - 1}")
            matrix[i, x] = True
    return ConceptClass(domain_size, matrix)


def is_teaching_set(cls, index, instances):
    mask = sum(1 << int(x) for x in instances)
    mine = cls.rows[index]
    return all((mine ^ other) & mask for j, other in enumerate(cls.rows) if j != index)


@dataclass(frozen=True)
class TeachingSetResult:
    concept_index: int
    dimension: Optional[int]  # None when the minimum exceeds the cap
    witness: Optional[tuple]
    cap: int = DEFAULT_CAP

    @property
    def exceeds_cap(self):
        return self.dimension is None

    @property
    def lower_bound(self):
        return self.cap + 1 if self.dimension is None else self.dimension

    def as_dict(self):
        return {
            "concept": self.concept_index,
            "dimension": self.dimension,
            "witness": list(self.witness) if self.witness is not None else None,
            "exceeds_cap": self.exceeds_cap,
        }


class _Cover:
    """Set cover instance for one concept against all its rivals."""

    def __init__(self, cls, index):
        mine = cls.rows[index]
        rivals = [j for j in range(len(cls)) if j != index]
        self.n_inst = cls.domain_size
        # diff[r]: instances separating concept from rival r
        self.diff = [mine ^ cls.rows[j] for j in rivals]
        cover = [0] * self.n_inst
        for r, d in enumerate(self.diff):
            for x in _bits(d):
                cover[x] |= 1 << r
        self.cover = cover
        self.universe = (1 << len(rivals)) - 1

    def greedy(self):
        uncovered, picked = self.universe, []
        while uncovered:
            best = max(range(self.n_inst), key=lambda x: ((self.cover[x] & uncovered).bit_count(), -x))
            if not self.cover[best] & uncovered:
                return None
            picked.append(best)
            uncovered &= ~self.cover[best]
        return picked

    def lower_bound(self, uncovered, allowed, budget):
        """Cheap bound on the picks still needed; returns budget + 1 if hopeless."""
        if not uncovered:
            return 0
        gains = sorted(((self.cover[x] & uncovered).bit_count() for x in _bits(allowed)), reverse=True)
        need, total = 0, 0
        size = uncovered.bit_count()
        for gain in gains:
            if total >= size or gain == 0:
                break
            total += gain
            need += 1
        if total < size:
            return budget + 1
        # rivals whose separating sets are pairwise disjoint each need their own pick
        used, disjoint = 0, 0
        for r in sorted(_bits(uncovered), key=lambda r: (self.diff[r] & allowed).bit_count()):
            d = self.diff[r] & allowed
            if not d & used:
                used |= d
                disjoint += 1
        return max(need, disjoint)

    def feasible(self, uncovered, allowed, budget):
        """Can at most ``budget`` instances from ``allowed`` cover ``uncovered``?"""
        if not uncovered:
            return True
        if budget == 0:
            return False
        if self.lower_bound(uncovered, allowed, budget) > budget:
            return False
        # branch on the rival with the fewest separating instances left
        pivot = min(_bits(uncovered), key=lambda r: (self.diff[r] & allowed).bit_count())
        choices = sorted(_bits(self.diff[pivot] & allowed), key=lambda x: -(self.cover[x] & uncovered).bit_count())
        for x in choices:
            # later branches may not reuse x: those covers were already explored
            allowed &= ~(1 << x)
            if self.feasible(uncovered & ~self.cover[x], allowed, budget - 1):
                return True
        return False

    def minimum(self, cap):
        if not self.universe:
            return 0, ()
        everything = (1 << self.n_inst) - 1
        upper = self.greedy()
        upper = len(upper) if upper is not None else None
        size = None
        start = self.lower_bound(self.universe, everything, self.n_inst)
        stop = min(cap, upper - 1) if upper is not None else cap
        for d in range(max(1, start), stop + 1):
            if self.feasible(self.universe, everything, d):
                size = d
                break
        if size is None:
            if upper is None or upper > cap:
                return None, None
            size = upper
        return size, self._lex_smallest(size)

    def _lex_smallest(self, size):
        uncovered, chosen, start = self.universe, [], 0
        for pos in range(size):
            for x in range(start, self.n_inst):
                later = ((1 << self.n_inst) - 1) & ~((1 << (x + 1)) - 1)
                rest = uncovered & ~self.cover[x]
                if self.feasible(rest, later, size - pos - 1):
                    chosen.append(x)
                    uncovered, start = rest, x + 1
                    break
        return tuple(chosen)


def teaching_dim(index, cls, cap=DEFAULT_CAP):
    """Exact TD of one concept, or a "> cap" result when no small set exists."""
    if not 0 <= index < len(cls):
        raise IndexError(f"concept index {index} out of range")
    if cap < 0:
        raise ValueError("cap must be non-negative")
    size, witness = _Cover(cls, index).minimum(cap)
    return TeachingSetResult(index, size, witness, cap)


def all_teaching_dims(cls, cap=DEFAULT_CAP):
    return [teaching_dim(i, cls, cap) for i in range(len(cls))]


def td_min(cls, cap=DEFAULT_CAP):
    best = None
    for i in range(len(cls)):
        # only a strictly smaller set can improve the minimum
        limit = cap if best is None else best - 1
        if limit < 0:
            break
        res = teaching_dim(i, cls, limit)
        if not res.exceeds_cap:
            best = res.dimension
    if best is None:
        raise CapExceeded(f"every concept needs more than {cap} instances", cap + 1)
    return best


def td_max(cls, cap=DEFAULT_CAP):
    worst = 0
    for i in range(len(cls)):
        res = teaching_dim(i, cls, cap)
        if res.exceeds_cap:
            raise CapExceeded(f"concept {i} needs more than {cap} instances", cap + 1)
        worst = max(worst, res.dimension)
    return worst


@dataclass(frozen=True)
class RtdTrace:
    layers: tuple  # of (td_min value, frozenset of original concept indices)

    @property
    def rtd(self):
        return max(value for value, _ in self.layers)

    def as_dict(self):
        return {
            "rtd": self.rtd,
            "layers": [{"td_min": v, "removed": sorted(s)} for v, s in self.layers],
        }


def rtd(cls, cap=DEFAULT_CAP):
    """Peel off every easiest-to-teach concept, layer by layer."""
    remaining = list(range(len(cls)))
    layers = []
    while remaining:
        sub = cls.subclass(remaining)
        dims = [teaching_dim(i, sub, cap) for i in range(len(sub))]
        finite = [r.dimension for r in dims if not r.exceeds_cap]
        if not finite:
            raise CapExceeded(
                f"after {len(layers)} layers every remaining concept needs more than {cap} instances",
                cap + 1,
            )
        value = min(finite)
        removed = frozenset(remaining[r.concept_index] for r in dims if r.dimension == value)
        layers.append((value, removed))
        remaining = [i for i in remaining if i not in removed]
    return RtdTrace(tuple(layers))


@dataclass(frozen=True)
class NcTeacher:
    assignment: dict = field(default_factory=dict)

    @property
    def max_size(self):
        return max((len(s) for s in self.assignment.values()), default=0)

    def as_dict(self):
        return {str(i): sorted(s) for i, s in sorted(self.assignment.items())}


def canonical_nc_teacher(t):
    """Teach the concept of vertex x with the single instance x."""
    return NcTeacher({x: frozenset({x}) for x in range(t.order)})


def verify_nc_teacher(cls, teacher):
    """Return ``(True, None)`` or ``(False, (i, j))`` for the first clashing pair."""
    masks = []
    for i in range(len(cls)):
        if i not in teacher.assignment:
            raise MissingAssignment(f"no teaching set assigned to concept {i}")
        mask = 0
        for x in teacher.assignment[i]:
            if not 0 <= x < cls.domain_size:
                raise InstanceOutOfRange(f"instance {x} not in 0..{cls.domain_size - 1}")
            mask |= 1 << int(x)
        masks.append(mask)
    rows = cls.rows
    for i in range(len(cls)):
        for j in range(i + 1, len(cls)):
            if not (rows[i] ^ rows[j]) & (masks[i] | masks[j]):
                return False, (i, j)
    return True, None


def nctd_of_induced(t):
    cls = induced_class(t)
    ok, pair = verify_nc_teacher(cls, canonical_nc_teacher(t))
    if not ok:
        raise AssertionError(f"canonical teacher clashes on {pair}")
    if len(cls) < 2:
        return 0
    empty = NcTeacher({i: frozenset() for i in range(len(cls))})
    ok, _ = verify_nc_teacher(cls, empty)
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# concept-matrix text format: "|X| |C|" then one 0/1 row per concept


def to_concept_matrix(cls):
    lines = [f"{cls.domain_size} {len(cls)}"]
    lines += ["".join("1" if v else "0" for v in row) for row in cls.matrix]
    return "\n".join(lines) + "\n"


def parse_concept_matrix(text):
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise TournamentError("empty concept matrix")
    head = lines[0].split()
    if len(head) != 2:
        raise TournamentError("concept matrix header must be '|X| |C|'")
    domain, count = int(head[0]), int(head[1])
    rows = []
    for ln in lines[1:]:
        digits = ln.replace(" ", "")
        if len(digits) != domain or set(digits) - {"0", "1"}:
            raise TournamentError(f"bad concept row {ln!r}")
        rows.append([c == "1" for c in digits])
    if len(rows) != count:
        raise TournamentError(f"header promises {count} concepts, found {len(rows)}")
    return ConceptClass(domain, np.array(rows, dtype=bool).reshape(count, domain))
