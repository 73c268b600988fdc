"""Exact integer matrices, Smith normal form and finitely generated abelian groups.

Presentation convention used throughout the package: a group is the cokernel of
an integer matrix acting by column span on Z^rows.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd
from typing import Iterable, Optional, Sequence

from sympy import factorint

from .errors import CompositionNotZero, IllDefinedMap

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IntegerMatrix:
    """Immutable row-major matrix of Python integers."""

    rows: int
    cols: int
    entries: tuple = ()

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} entries, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntegerMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged matrix rows")
        return cls(len(rows), cols, tuple(int(x) for r in rows for x in r))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> "IntegerMatrix":
        columns = [list(c) for c in columns]
        for c in columns:
            if len(c) != rows:
                raise ValueError("column length does not match row count")
        return cls(rows, len(columns), tuple(int(columns[j][i]) for i in range(rows) for j in range(len(columns))))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntegerMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "IntegerMatrix":
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def diagonal(cls, values: Sequence[int], rows: Optional[int] = None, cols: Optional[int] = None) -> "IntegerMatrix":
        rows = len(values) if rows is None else rows
        cols = len(values) if cols is None else cols
        data = [[0] * cols for _ in range(rows)]
        for i, v in enumerate(values):
            data[i][i] = int(v)
        return cls.from_rows(data, cols)

    @classmethod
    def scalar(cls, n: int, value: int) -> "IntegerMatrix":
        return cls.diagonal([value] * n)

    def __getitem__(self, index):
        i, j = index
        return self.entries[i * self.cols + j]

    def to_lists(self) -> list:
        return [list(self.entries[i * self.cols:(i + 1) * self.cols]) for i in range(self.rows)]

    def column(self, j: int) -> list:
        return [self.entries[i * self.cols + j] for i in range(self.rows)]

    def columns(self) -> list:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "IntegerMatrix":
        return IntegerMatrix.from_columns(self.to_lists(), self.cols)

    def __matmul__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        a = self.to_lists()
        b = other.to_lists()
        out = []
        for i in range(self.rows):
            row = [0] * other.cols
            for k, x in enumerate(a[i]):
                if x:
                    bk = b[k]
                    for j in range(other.cols):
                        row[j] += x * bk[j]
            out.append(row)
        return IntegerMatrix.from_rows(out, other.cols)

    def __add__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        self._same_shape(other)
        return IntegerMatrix(self.rows, self.cols, tuple(x + y for x, y in zip(self.entries, other.entries)))

    def __sub__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        self._same_shape(other)
        return IntegerMatrix(self.rows, self.cols, tuple(x - y for x, y in zip(self.entries, other.entries)))

    def __neg__(self) -> "IntegerMatrix":
        return self.scaled(-1)

    def scaled(self, factor: int) -> "IntegerMatrix":
        return IntegerMatrix(self.rows, self.cols, tuple(factor * x for x in self.entries))

    def _same_shape(self, other: "IntegerMatrix"):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")

    def is_zero(self) -> bool:
        return not any(self.entries)

    def select_rows(self, indices: Sequence[int]) -> "IntegerMatrix":
        data = self.to_lists()
        return IntegerMatrix.from_rows([data[i] for i in indices], self.cols)

    def select_cols(self, indices: Sequence[int]) -> "IntegerMatrix":
        cols = self.columns()
        return IntegerMatrix.from_columns([cols[j] for j in indices], self.rows)

    def hstack(self, *others: "IntegerMatrix") -> "IntegerMatrix":
        cols = self.columns()
        for o in others:
            if o.rows != self.rows:
                raise ValueError("hstack needs equal row counts")
            cols.extend(o.columns())
        return IntegerMatrix.from_columns(cols, self.rows)

    def to_json(self) -> list:
        return self.to_lists()


def block_diagonal(blocks: Sequence[IntegerMatrix]) -> IntegerMatrix:
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    data = [[0] * cols for _ in range(rows)]
    r0 = c0 = 0
    for b in blocks:
        for i, row in enumerate(b.to_lists()):
            data[r0 + i][c0:c0 + b.cols] = row
        r0 += b.rows
        c0 += b.cols
    return IntegerMatrix.from_rows(data, cols)


def block_matrix(row_sizes: Sequence[int], col_sizes: Sequence[int], blocks: dict) -> IntegerMatrix:
    """Assemble a matrix from ``{(block_row, block_col): IntegerMatrix}``; missing blocks are zero."""
    row_offsets = [sum(row_sizes[:k]) for k in range(len(row_sizes))]
    col_offsets = [sum(col_sizes[:k]) for k in range(len(col_sizes))]
    rows, cols = sum(row_sizes), sum(col_sizes)
    data = [[0] * cols for _ in range(rows)]
    for (bi, bj), block in blocks.items():
        if (block.rows, block.cols) != (row_sizes[bi], col_sizes[bj]):
            raise ValueError(f"block {(bi, bj)} has wrong shape")
        for i, row in enumerate(block.to_lists()):
            for j, x in enumerate(row):
                if x:
                    data[row_offsets[bi] + i][col_offsets[bj] + j] += x
    return IntegerMatrix.from_rows(data, cols)


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

class _Decomposition:
    """S = U·M·V together with U^-1 and V^-1, all as mutable lists."""

    def __init__(self, m: IntegerMatrix):
        self.nr, self.nc = m.rows, m.cols
        self.a = m.to_lists()
        self.u = _identity_lists(self.nr)
        self.u_inv = _identity_lists(self.nr)
        self.v = _identity_lists(self.nc)
        self.v_inv = _identity_lists(self.nc)
        self.rank = 0
        self.pivots = 0
        self._reduce()

    # row_dst += f * row_src
    def _row_add(self, dst, src, f):
        for mat in (self.a, self.u):
            rs, rd = mat[src], mat[dst]
            for j, x in enumerate(rs):
                if x:
                    rd[j] += f * x
        for row in self.u_inv:
            row[src] -= f * row[dst]

    # col_dst += f * col_src
    def _col_add(self, dst, src, f):
        for mat in (self.a, self.v):
            for row in mat:
                if row[src]:
                    row[dst] += f * row[src]
        rd, rs = self.v_inv[src], self.v_inv[dst]
        for j, x in enumerate(rs):
            if x:
                rd[j] -= f * x

    def _swap_rows(self, i, j):
        if i == j:
            return
        for mat in (self.a, self.u):
            mat[i], mat[j] = mat[j], mat[i]
        for row in self.u_inv:
            row[i], row[j] = row[j], row[i]

    def _swap_cols(self, i, j):
        if i == j:
            return
        for mat in (self.a, self.v):
            for row in mat:
                row[i], row[j] = row[j], row[i]
        self.v_inv[i], self.v_inv[j] = self.v_inv[j], self.v_inv[i]

    def _negate_row(self, i):
        self.a[i] = [-x for x in self.a[i]]
        self.u[i] = [-x for x in self.u[i]]
        for row in self.u_inv:
            row[i] = -row[i]

    def _smallest(self, t):
        best = None
        best_val = 0
        for i in range(t, self.nr):
            row = self.a[i]
            for j in range(t, self.nc):
                x = row[j]
                if x and (best is None or abs(x) < best_val):
                    best, best_val = (i, j), abs(x)
        return best

    def _move_pivot(self, t):
        pivot = self._smallest(t)
        if pivot is None:
            return False
        self._swap_rows(t, pivot[0])
        self._swap_cols(t, pivot[1])
        self.pivots += 1
        return True

    def _reduce(self):
        a = self.a
        t = 0
        while t < min(self.nr, self.nc):
            if not self._move_pivot(t):
                break
            while True:
                p = a[t][t]
                dirty = False
                for i in range(t + 1, self.nr):
                    if a[i][t]:
                        self._row_add(i, t, -(a[i][t] // p))
                        dirty = dirty or a[i][t] != 0
                for j in range(t + 1, self.nc):
                    if a[t][j]:
                        self._col_add(j, t, -(a[t][j] // p))
                        dirty = dirty or a[t][j] != 0
                if dirty:
                    self._move_pivot(t)
                    continue
                bad_row = next(
                    (i for i in range(t + 1, self.nr)
                     if any(a[i][j] % p for j in range(t + 1, self.nc))),
                    None,
                )
                if bad_row is None:
                    break
                self._row_add(t, bad_row, 1)
            if a[t][t] < 0:
                self._negate_row(t)
            t += 1
        self.rank = t

    def diagonal(self) -> list:
        return [self.a[i][i] for i in range(self.rank)]


def _identity_lists(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _matrix(lists, cols) -> IntegerMatrix:
    return IntegerMatrix.from_rows(lists, cols)


def smith_normal_form(m: IntegerMatrix) -> tuple:
    """
    Diagonalise an integer matrix by unimodular row and column operations.

    Pivots are chosen as the entry of smallest nonzero absolute value, ties
    broken by lowest (row, col).

    Returns:
        (S, U, V) with S = U·M·V, U and V unimodular, S diagonal with a
        nonnegative divisibility chain on the diagonal.
    """
    dec = _Decomposition(m)
    logger.debug("SNF %dx%d rank %d after %d pivots", m.rows, m.cols, dec.rank, dec.pivots)
    return _matrix(dec.a, m.cols), _matrix(dec.u, m.rows), _matrix(dec.v, m.cols)


def kernel_basis(m: IntegerMatrix) -> IntegerMatrix:
    """Columns form a Z-basis of {x : m·x = 0}."""
    dec = _Decomposition(m)
    v = _matrix(dec.v, m.cols)
    return v.select_cols(range(dec.rank, m.cols))


def image_basis(m: IntegerMatrix) -> IntegerMatrix:
    """Columns form a Z-basis of the column span of m."""
    dec = _Decomposition(m)
    u_inv = _matrix(dec.u_inv, m.rows)
    cols = u_inv.columns()
    return IntegerMatrix.from_columns([[s * x for x in cols[i]] for i, s in enumerate(dec.diagonal())], m.rows)


class LatticeSolver:
    """Solves basis·c = y for many right-hand sides against one fixed matrix."""

    def __init__(self, basis: IntegerMatrix):
        self.basis = basis
        self._dec = _Decomposition(basis)
        self._u = self._dec.u
        self._v = self._dec.v
        self._diag = self._dec.diagonal()

    def solve(self, y: Sequence[int]) -> Optional[list]:
        n = self.basis.rows
        if len(y) != n:
            raise ValueError("right-hand side has wrong length")
        uy = [sum(self._u[i][k] * y[k] for k in range(n) if y[k]) for i in range(n)]
        w = [0] * self.basis.cols
        for i, s in enumerate(self._diag):
            if uy[i] % s:
                return None
            w[i] = uy[i] // s
        if any(uy[len(self._diag):]):
            return None
        return [sum(self._v[j][k] * w[k] for k in range(len(w)) if w[k]) for j in range(self.basis.cols)]

    def contains(self, y: Sequence[int]) -> bool:
        return self.solve(y) is not None

    def coordinates(self, m: IntegerMatrix) -> IntegerMatrix:
        """Coordinates of every column of m; raises ValueError if one is outside the lattice."""
        coords = []
        for col in m.columns():
            c = self.solve(col)
            if c is None:
                raise ValueError("column outside lattice")
            coords.append(c)
        return IntegerMatrix.from_columns(coords, self.basis.cols)


def solve_integral(basis: IntegerMatrix, y: Sequence[int]) -> Optional[list]:
    return LatticeSolver(basis).solve(y)


# ---------------------------------------------------------------------------
# Finitely generated abelian groups
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FGAbelianGroup:
    """Canonical form Z^free_rank ⊕ Z/d_1 ⊕ … ⊕ Z/d_k with d_1 | d_2 | … | d_k."""

    free_rank: int = 0
    torsion: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        if self.free_rank < 0:
            raise ValueError("free rank must be nonnegative")
        for d in self.torsion:
            if d < 2:
                raise ValueError(f"invariant factor {d} < 2")
        for d, e in zip(self.torsion, self.torsion[1:]):
            if e % d:
                raise ValueError(f"invariant factors {self.torsion} break the divisibility chain")

    @classmethod
    def trivial(cls) -> "FGAbelianGroup":
        return cls()

    @classmethod
    def free(cls, rank: int) -> "FGAbelianGroup":
        return cls(rank)

    @classmethod
    def cyclic(cls, n: int) -> "FGAbelianGroup":
        """Z/n, with Z/0 = Z and Z/1 = 0."""
        return cls.from_invariants([n])

    @classmethod
    def from_invariants(cls, orders: Iterable[int]) -> "FGAbelianGroup":
        """Direct sum of Z/n over ``orders`` (0 meaning Z), normalised."""
        orders = [abs(int(n)) for n in orders]
        return cokernel(IntegerMatrix.diagonal(orders))

    def direct_sum(self, *others: "FGAbelianGroup") -> "FGAbelianGroup":
        orders = [0] * self.free_rank + list(self.torsion)
        for o in others:
            orders += [0] * o.free_rank + list(o.torsion)
        return FGAbelianGroup.from_invariants(orders)

    def __add__(self, other: "FGAbelianGroup") -> "FGAbelianGroup":
        return self.direct_sum(other)

    def power(self, k: int) -> "FGAbelianGroup":
        return FGAbelianGroup.from_invariants(([0] * self.free_rank + list(self.torsion)) * k)

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def is_finite(self) -> bool:
        return self.free_rank == 0

    def is_free(self) -> bool:
        return not self.torsion

    def order(self) -> Optional[int]:
        """Order of a finite group; None when the group is infinite."""
        if self.free_rank:
            return None
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def elementary_divisors(self) -> tuple:
        """Sorted prime powers of the torsion part."""
        out = []
        for d in self.torsion:
            out += [int(p) ** e for p, e in factorint(d).items()]
        return tuple(sorted(out))

    def primary_partitions(self) -> dict:
        """Prime -> exponents in decreasing order."""
        parts = {}
        for d in self.torsion:
            for p, e in factorint(d).items():
                parts.setdefault(int(p), []).append(int(e))
        return {p: sorted(es, reverse=True) for p, es in sorted(parts.items())}

    def presentation(self) -> "Presentation":
        return Presentation.of(self)

    def to_json(self) -> dict:
        return {"rank": self.free_rank, "torsion": list(self.torsion)}

    @classmethod
    def from_json(cls, data: dict) -> "FGAbelianGroup":
        return cls.from_invariants([0] * int(data.get("rank", 0)) + list(data.get("torsion", [])))

    def __str__(self):
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank:
            parts.append(f"Z^{self.free_rank}")
        for d in self.torsion:
            parts.append(f"Z/{d}")
        return " + ".join(parts) if parts else "0"


def cokernel(m: IntegerMatrix) -> FGAbelianGroup:
    """Canonical form of Z^rows / column-span(m)."""
    dec = _Decomposition(m)
    diag = dec.diagonal()
    return FGAbelianGroup(m.rows - dec.rank, tuple(d for d in diag if d > 1))


def iso_check(a: FGAbelianGroup, b: FGAbelianGroup) -> bool:
    return a == b


def mod_m_and_torsion(a: FGAbelianGroup, m: int) -> tuple:
    """Cokernel and kernel of multiplication by m on a."""
    if m < 1:
        raise ValueError("m must be positive")
    reduced = [m] * a.free_rank + [gcd(d, m) for d in a.torsion]
    killed = [gcd(d, m) for d in a.torsion]
    return FGAbelianGroup.from_invariants(reduced), FGAbelianGroup.from_invariants(killed)


# ---------------------------------------------------------------------------
# Presentations and maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Presentation:
    """The group Z^generators / column-span(relations)."""

    generators: int
    relations: IntegerMatrix = None

    def __post_init__(self):
        if self.relations is None:
            object.__setattr__(self, "relations", IntegerMatrix.zeros(self.generators, 0))
        if self.relations.rows != self.generators:
            raise ValueError("relation matrix must have one row per generator")

    @classmethod
    def free(cls, n: int) -> "Presentation":
        return cls(n)

    @classmethod
    def cyclic(cls, n: int) -> "Presentation":
        if n == 1:
            return cls(0)
        if n == 0:
            return cls(1)
        return cls(1, IntegerMatrix.from_rows([[n]]))

    @classmethod
    def of(cls, group: FGAbelianGroup) -> "Presentation":
        """Standard presentation: free generators first, then one per invariant factor."""
        n = group.free_rank + len(group.torsion)
        cols = []
        for k, d in enumerate(group.torsion):
            col = [0] * n
            col[group.free_rank + k] = d
            cols.append(col)
        return cls(n, IntegerMatrix.from_columns(cols, n))

    @cached_property
    def group(self) -> FGAbelianGroup:
        return cokernel(self.relations)

    @cached_property
    def solver(self) -> LatticeSolver:
        return LatticeSolver(self.relations)

    def is_trivial(self) -> bool:
        return self.group.is_trivial()

    def contains_relation(self, vector: Sequence[int]) -> bool:
        """Whether ``vector`` represents zero in the group."""
        if not any(vector):
            return True
        return self.solver.contains(vector)

    def direct_sum(self, *others: "Presentation") -> "Presentation":
        parts = (self,) + others
        return Presentation(sum(p.generators for p in parts), block_diagonal([p.relations for p in parts]))


def standardize(p: Presentation) -> tuple:
    """
    Change of generators onto ``Presentation.of(p.group)``.

    Returns:
        (to_std, from_std): integer matrices such that to_std carries p's
        generators to standard ones and from_std goes back, both well defined
        on the groups and mutually inverse there.
    """
    dec = _Decomposition(p.relations)
    diag = dec.diagonal()
    free_rows = list(range(dec.rank, p.generators))
    torsion_rows = [i for i, d in enumerate(diag) if d > 1]
    order = free_rows + torsion_rows
    u = _matrix(dec.u, p.generators)
    u_inv = _matrix(dec.u_inv, p.generators)
    return u.select_rows(order), u_inv.select_cols(order)


def direct_sum_presentations(parts: Sequence[Presentation]) -> Presentation:
    if not parts:
        return Presentation(0)
    return parts[0].direct_sum(*parts[1:])


@dataclass(frozen=True)
class GroupMap:
    """Homomorphism between presented groups given on generators."""

    source: Presentation
    target: Presentation
    matrix: IntegerMatrix
    check: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        if (self.matrix.rows, self.matrix.cols) != (self.target.generators, self.source.generators):
            raise ValueError(
                f"map matrix is {self.matrix.rows}x{self.matrix.cols}, "
                f"expected {self.target.generators}x{self.source.generators}"
            )
        if self.check:
            image = self.matrix @ self.source.relations
            for col in image.columns():
                if not self.target.contains_relation(col):
                    raise IllDefinedMap("matrix does not carry relations of the source into the target relations")

    @classmethod
    def zero(cls, source: Presentation, target: Presentation) -> "GroupMap":
        return cls(source, target, IntegerMatrix.zeros(target.generators, source.generators), check=False)

    @classmethod
    def identity(cls, p: Presentation) -> "GroupMap":
        return cls(p, p, IntegerMatrix.identity(p.generators), check=False)

    def compose(self, first: "GroupMap") -> "GroupMap":
        """self ∘ first."""
        return GroupMap(first.source, self.target, self.matrix @ first.matrix, check=False)

    def __add__(self, other: "GroupMap") -> "GroupMap":
        return GroupMap(self.source, self.target, self.matrix + other.matrix, check=False)

    def __sub__(self, other: "GroupMap") -> "GroupMap":
        return GroupMap(self.source, self.target, self.matrix - other.matrix, check=False)

    def scaled(self, factor: int) -> "GroupMap":
        return GroupMap(self.source, self.target, self.matrix.scaled(factor), check=False)

    def is_zero(self) -> bool:
        return all(self.target.contains_relation(col) for col in self.matrix.columns())

    def kernel(self) -> FGAbelianGroup:
        return homology_at(GroupMap.zero(Presentation(0), self.source), self)

    def cokernel(self) -> FGAbelianGroup:
        return cokernel(self.target.relations.hstack(self.matrix))

    def is_injective(self) -> bool:
        return self.kernel().is_trivial()

    def is_surjective(self) -> bool:
        return self.cokernel().is_trivial()

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()


def preimage_lattice(f: GroupMap) -> IntegerMatrix:
    """Basis of {x ∈ Z^gens(source) : f(x) = 0 in the target}."""
    n = f.source.generators
    rel = f.target.relations
    if rel.cols == 0 or f.matrix.rows == 0:
        return kernel_basis(f.matrix) if f.matrix.rows else IntegerMatrix.identity(n)
    joint = kernel_basis(f.matrix.hstack(-rel))
    projected = joint.select_rows(range(n))
    return image_basis(projected)


@dataclass(frozen=True)
class Subquotient:
    """ker(d_out)/im(d_in) as a presentation on a basis of the kernel lattice."""

    presentation: Presentation
    basis: IntegerMatrix

    @property
    def group(self) -> FGAbelianGroup:
        return self.presentation.group

    @cached_property
    def solver(self) -> LatticeSolver:
        return LatticeSolver(self.basis)

    def coordinates(self, vectors: IntegerMatrix) -> IntegerMatrix:
        return self.solver.coordinates(vectors)


def subquotient(d_in: GroupMap, d_out: GroupMap) -> Subquotient:
    if d_in.target.generators != d_out.source.generators:
        raise ValueError("maps do not meet at a common group")
    middle = d_out.source
    if not d_out.compose(d_in).is_zero():
        raise CompositionNotZero("d_out ∘ d_in is not zero")
    basis = preimage_lattice(d_out)
    solver = LatticeSolver(basis)
    denominators = d_in.matrix.hstack(middle.relations)
    relations = solver.coordinates(denominators)
    return Subquotient(Presentation(basis.cols, relations), basis)


def homology_at(d_in: GroupMap, d_out: GroupMap) -> FGAbelianGroup:
    """ker(d_out)/im(d_in) in canonical form."""
    return subquotient(d_in, d_out).group


def induced_map(f: GroupMap, source: Subquotient, target: Subquotient) -> GroupMap:
    """Map on subquotients induced by f, computed on witness bases."""
    coords = target.coordinates(f.matrix @ source.basis)
    return GroupMap(source.presentation, target.presentation, coords)
