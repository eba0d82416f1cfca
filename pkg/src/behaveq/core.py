"""Exact-arithmetic and relation-lattice kernel.

Everything downstream (system families, equivalence engines, quotients,
logics) is built on four small value types: finite labelled carriers,
bit-matrix relations, exact rational subspaces in reduced row-echelon
form, and finite join-semilattices.  All values are immutable after
construction and all operations are pure, so they are safe to share
across threads.

Rationals are `fractions.Fraction` (re-exported as `Rational`): always
in lowest terms, positive denominator, arbitrary-precision integers,
never floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Iterator, Sequence

Rational = Fraction

Vector = tuple[Fraction, ...]

# Full-powerset carriers above this size are refused unless the caller
# raises the cap explicitly.  2^12 states make a 16 Mi-bit relation.
DEFAULT_POWERSET_CAP = 12


class MalformedFunction(ValueError):
    """A reindexing function hits indices outside its codomain."""


class DimensionMismatch(ValueError):
    """Vectors or matrices with incompatible ambient dimensions."""


class CapExceeded(ValueError):
    """A construction would blow past its configured size cap."""


def bits(mask: int) -> Iterator[int]:
    """Positions of set bits, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return mask.bit_count()


def as_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise DimensionMismatch(f"not an exact rational: {value!r}")


def format_rational(q: Fraction) -> str:
    """Canonical text form: bare integer, else 'p/q'."""
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Carrier:
    """Ordered finite set of uniquely labelled elements."""

    names: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            dup = sorted(n for n in set(self.names) if self.names.count(n) > 1)
            raise ValueError(f"duplicate carrier labels: {dup}")

    @cached_property
    def _index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise ValueError(f"unknown label {label!r}") from None

    def label(self, i: int) -> str:
        return self.names[i]

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)


def subset_label(base: Carrier, mask: int) -> str:
    """Canonical label of a subset of `base`, members in carrier order."""
    return "{" + ",".join(base.names[i] for i in bits(mask)) + "}"


def parse_subset_label(base: Carrier, text: str) -> int:
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ValueError(f"subset must be written '{{x,y}}', got {text!r}")
    body = text[1:-1].strip()
    mask = 0
    if body:
        for part in body.split(","):
            mask |= 1 << base.index(part.strip())
    return mask


def powerset_carrier(base: Carrier, cap: int = DEFAULT_POWERSET_CAP) -> Carrier:
    """Carrier of all subsets of `base`, masks 0..2^n-1 in numeric order."""
    n = len(base)
    if n > cap:
        raise CapExceeded(f"powerset carrier over {n} elements exceeds cap {cap}")
    return Carrier(tuple(subset_label(base, m) for m in range(1 << n)))


@dataclass(frozen=True)
class BitRel:
    """Binary relation on 0..size-1 stored as per-row bitmasks."""

    size: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.size:
            raise ValueError("row count does not match carrier size")
        valid = (1 << self.size) - 1
        for i, row in enumerate(self.rows):
            if row & ~valid:
                raise ValueError(f"row {i} has bits outside the carrier")

    @classmethod
    def empty(cls, size: int) -> "BitRel":
        return cls(size, (0,) * size)

    @classmethod
    def full(cls, size: int) -> "BitRel":
        return cls(size, ((1 << size) - 1,) * size)

    @classmethod
    def identity(cls, size: int) -> "BitRel":
        return cls(size, tuple(1 << i for i in range(size)))

    @classmethod
    def from_pairs(cls, size: int, pairs: Iterable[tuple[int, int]]) -> "BitRel":
        rows = [0] * size
        for i, j in pairs:
            if not (0 <= i < size and 0 <= j < size):
                raise ValueError(f"pair ({i},{j}) outside carrier of size {size}")
            rows[i] |= 1 << j
        return cls(size, tuple(rows))

    def has(self, i: int, j: int) -> bool:
        return bool(self.rows[i] >> j & 1)

    def pairs(self) -> Iterator[tuple[int, int]]:
        for i, row in enumerate(self.rows):
            for j in bits(row):
                yield i, j

    def count(self) -> int:
        return sum(row.bit_count() for row in self.rows)

    def __and__(self, other: "BitRel") -> "BitRel":
        if self.size != other.size:
            raise DimensionMismatch("relation sizes differ")
        return BitRel(self.size, tuple(a & b for a, b in zip(self.rows, other.rows)))

    def __or__(self, other: "BitRel") -> "BitRel":
        if self.size != other.size:
            raise DimensionMismatch("relation sizes differ")
        return BitRel(self.size, tuple(a | b for a, b in zip(self.rows, other.rows)))

    def __le__(self, other: "BitRel") -> bool:
        return self.size == other.size and all(
            a & ~b == 0 for a, b in zip(self.rows, other.rows)
        )

    def is_equivalence(self) -> bool:
        for i in range(self.size):
            if not self.has(i, i):
                return False
        for i, row in enumerate(self.rows):
            for j in bits(row):
                if not self.has(j, i):
                    return False
                if self.rows[j] & ~row:
                    return False
        return True

    def classes(self) -> tuple[tuple[int, ...], ...]:
        """Equivalence classes, each sorted, ordered by least member."""
        if not self.is_equivalence():
            raise ValueError("relation is not an equivalence")
        seen = 0
        out = []
        for i in range(self.size):
            if seen >> i & 1:
                continue
            cls = tuple(bits(self.rows[i]))
            for j in cls:
                seen |= 1 << j
            out.append(cls)
        return tuple(out)


@dataclass(frozen=True)
class GfpResult:
    """Greatest fixpoint plus the number of step applications taken."""

    relation: object
    iterations: int


def gfp(step: Callable, top, *, debug: bool = False) -> GfpResult:
    """Greatest R <= top with R <= step(R), by Kleene iteration from the top.

    `step` must be monotone w.r.t. inclusion; that is the caller's
    obligation.  With debug=True the images along the descending chain
    are checked to be descending too, which catches most monotonicity
    bugs cheaply.  Termination is guaranteed on any finite lattice.
    """
    cur = top
    prev_image = None
    iterations = 0
    while True:
        iterations += 1
        image = step(cur)
        if debug and prev_image is not None and not (image <= prev_image):
            raise ValueError("step operator is not monotone along the iteration chain")
        prev_image = image
        nxt = cur & image
        if nxt == cur:
            return GfpResult(cur, iterations)
        cur = nxt


def rel_pullback(rel: BitRel, fn: Sequence[int]) -> BitRel:
    """Reindex `rel` along a total function given as a table.

    (i, j) is in the result iff (fn[i], fn[j]) is in `rel`.
    """
    for i, v in enumerate(fn):
        if not (0 <= v < rel.size):
            raise MalformedFunction(f"fn[{i}] = {v} outside carrier of size {rel.size}")
    rows = []
    for i in range(len(fn)):
        src = rel.rows[fn[i]]
        row = 0
        for j, v in enumerate(fn):
            if src >> v & 1:
                row |= 1 << j
        rows.append(row)
    return BitRel(len(fn), tuple(rows))


def _rref(rows: list[list[Fraction]]) -> tuple[list[tuple[Fraction, ...]], list[int]]:
    """In-place reduced row echelon form; returns (pivot rows, pivot columns)."""
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot_row = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        lead = rows[r][c]
        rows[r] = [v / lead for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return [tuple(row) for row in rows[:r]], pivots


@dataclass(frozen=True)
class Subspace:
    """Subspace of Q^dim with a canonical reduced row-echelon basis.

    Two subspaces are equal iff their canonical bases are identical, so
    dataclass equality is semantic equality.
    """

    dim: int
    basis: tuple[Vector, ...]

    @property
    def rank(self) -> int:
        return len(self.basis)

    def contains(self, vector: Sequence) -> bool:
        return subspace_contains(self, vector)

    def is_zero(self) -> bool:
        return not self.basis


def echelonize(vectors: Iterable[Sequence], dim: int | None = None) -> Subspace:
    """Canonical basis of the span of `vectors`.

    `dim` is required when the list is empty; otherwise it must agree
    with the vectors' shared length.
    """
    rows = [[as_rational(v) for v in vec] for vec in vectors]
    if rows:
        widths = {len(r) for r in rows}
        if len(widths) != 1:
            raise DimensionMismatch(f"mixed vector lengths {sorted(widths)}")
        width = widths.pop()
        if dim is not None and dim != width:
            raise DimensionMismatch(f"vectors have length {width}, expected {dim}")
        dim = width
    elif dim is None:
        raise DimensionMismatch("empty span needs an explicit ambient dimension")
    basis, _ = _rref(rows)
    return Subspace(dim, tuple(basis))


def subspace_contains(space: Subspace, vector: Sequence) -> bool:
    """Exact membership test by elimination against the canonical basis."""
    v = [as_rational(x) for x in vector]
    if len(v) != space.dim:
        raise DimensionMismatch(f"vector length {len(v)}, ambient {space.dim}")
    for row in space.basis:
        lead = next(c for c, val in enumerate(row) if val)
        f = v[lead]
        if f:
            v = [a - f * b for a, b in zip(v, row)]
    return all(x == 0 for x in v)


def nullspace(rows: Iterable[Sequence], dim: int) -> Subspace:
    """All v with row . v = 0 for every row, as a canonical subspace."""
    mat = [[as_rational(v) for v in row] for row in rows]
    for row in mat:
        if len(row) != dim:
            raise DimensionMismatch(f"row length {len(row)}, expected {dim}")
    basis, pivots = _rref(mat)
    free = [c for c in range(dim) if c not in pivots]
    vecs = []
    for f in free:
        v = [Fraction(0)] * dim
        v[f] = Fraction(1)
        for row, c in zip(basis, pivots):
            v[c] = -row[f]
        vecs.append(v)
    return echelonize(vecs, dim)


def orthogonal_tests(space: Subspace) -> tuple[Vector, ...]:
    """Vectors z such that v in `space` iff v . z = 0 for all z."""
    return nullspace(space.basis, space.dim).basis


def preimage_subspace(matrix: Sequence[Sequence], space: Subspace) -> Subspace:
    """{v | v . matrix in space} for a dom x cod matrix, row-vector convention."""
    mat = [[as_rational(x) for x in row] for row in matrix]
    dom = len(mat)
    for row in mat:
        if len(row) != space.dim:
            raise DimensionMismatch("matrix codomain does not match subspace")
    constraints = []
    for z in orthogonal_tests(space):
        constraints.append([sum(mat[i][j] * z[j] for j in range(space.dim))
                            for i in range(dom)])
    return nullspace(constraints, dom)


def mat_vec(vector: Sequence, matrix: Sequence[Sequence]) -> Vector:
    """v . M with v a row vector."""
    v = [as_rational(x) for x in vector]
    if len(v) != len(matrix):
        raise DimensionMismatch("vector length does not match matrix rows")
    cols = len(matrix[0]) if matrix else 0
    return tuple(sum(v[i] * as_rational(matrix[i][j]) for i in range(len(v)))
                 for j in range(cols))


def dot(u: Sequence, v: Sequence) -> Fraction:
    if len(u) != len(v):
        raise DimensionMismatch("vector lengths differ")
    return sum((as_rational(a) * as_rational(b) for a, b in zip(u, v)), Fraction(0))


@dataclass(frozen=True)
class Semilattice:
    """Finite join-semilattice given by an explicit join table.

    `table[i][j]` is the index of join(i, j); `bottom` is the unit.
    Use `create` to get the laws verified exhaustively; raw construction
    is allowed so that ill-formed tables can be diagnosed by
    `diagnostics` instead of an exception.
    """

    names: tuple[str, ...]
    table: tuple[tuple[int, ...], ...]
    bottom: int

    @classmethod
    def create(cls, names, table, bottom) -> "Semilattice":
        lat = cls(tuple(names), tuple(tuple(row) for row in table), bottom)
        problems = lat.diagnostics()
        if problems:
            raise ValueError(problems[0])
        return lat

    @classmethod
    def boolean(cls) -> "Semilattice":
        return cls(("0", "1"), ((0, 1), (1, 1)), 0)

    @classmethod
    def from_join(cls, values, join, bottom, label) -> tuple["Semilattice", dict]:
        """Close `values` plus `bottom` under a join function.

        Elements are ordered by their labels, so the result is canonical
        regardless of generation order.  Returns the lattice and a map
        from closed value to element index.
        """
        closed = {bottom} | set(values)
        while True:
            extra = set()
            for a in closed:
                for b in closed:
                    j = join(a, b)
                    if j not in closed:
                        extra.add(j)
            if not extra:
                break
            closed |= extra
        ordered = sorted(closed, key=label)
        idx = {v: i for i, v in enumerate(ordered)}
        table = tuple(tuple(idx[join(a, b)] for b in ordered) for a in ordered)
        lat = cls.create(tuple(label(v) for v in ordered), table, idx[bottom])
        return lat, idx

    def join(self, i: int, j: int) -> int:
        return self.table[i][j]

    def join_all(self, items: Iterable[int]) -> int:
        out = self.bottom
        for i in items:
            out = self.table[out][i]
        return out

    def diagnostics(self) -> list[str]:
        n = len(self.names)
        probs = []
        if len(self.table) != n or any(len(row) != n for row in self.table):
            return [f"join table is not {n}x{n}"]
        for i in range(n):
            for j in range(n):
                if not (0 <= self.table[i][j] < n):
                    return [f"join({self.names[i]},{self.names[j]}) out of range"]
        if not (0 <= self.bottom < n):
            return ["bottom element out of range"]
        for i in range(n):
            if self.table[i][i] != i:
                probs.append(f"join not idempotent at {self.names[i]}")
        for i in range(n):
            for j in range(i + 1, n):
                if self.table[i][j] != self.table[j][i]:
                    probs.append(
                        f"join not commutative at ({self.names[i]},{self.names[j]})")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if self.table[self.table[i][j]][k] != self.table[i][self.table[j][k]]:
                        probs.append(
                            "join not associative at "
                            f"({self.names[i]},{self.names[j]},{self.names[k]})")
                        return probs
        for i in range(n):
            if self.table[self.bottom][i] != i:
                probs.append(f"bottom is not a unit at {self.names[i]}")
        return probs

    def __len__(self) -> int:
        return len(self.names)
