"""Modules and complexes with an action of the group of order two.

Group cohomology uses the 2-periodic free resolution of Z over Z[G]:
applying Hom(−, M) turns every term into M and the maps into σ−1 and σ+1
alternately, starting with σ−1.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

from .chain import CochainComplex, FilteredComplex, cohomology
from .errors import EquivarianceError, InvalidInvolution, InvariantViolation, UnstableTruncation
from .znf import (
    FGAbelianGroup,
    GroupMap,
    IntegerMatrix,
    LatticeSolver,
    Presentation,
    block_diagonal,
    block_matrix,
    direct_sum_presentations,
    homology_at,
    preimage_lattice,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InvolutiveModule:
    underlying: Presentation
    sigma: GroupMap

    def __post_init__(self):
        if self.sigma.source.generators != self.underlying.generators or \
                self.sigma.target.generators != self.underlying.generators:
            raise InvalidInvolution("involution does not act on the module")
        if not (self.sigma.compose(self.sigma) - GroupMap.identity(self.underlying)).is_zero():
            raise InvalidInvolution("sigma∘sigma is not the identity")

    @classmethod
    def from_matrix(cls, presentation: Presentation, sigma: IntegerMatrix) -> "InvolutiveModule":
        return cls(presentation, GroupMap(presentation, presentation, sigma))

    @classmethod
    def trivial(cls, rank: int = 1) -> "InvolutiveModule":
        p = Presentation.free(rank)
        return cls(p, GroupMap.identity(p))

    @classmethod
    def sign(cls, rank: int = 1) -> "InvolutiveModule":
        p = Presentation.free(rank)
        return cls(p, GroupMap.identity(p).scaled(-1))

    @classmethod
    def regular(cls) -> "InvolutiveModule":
        """Z[G] with σ swapping the two basis elements."""
        return cls.from_matrix(Presentation.free(2), IntegerMatrix.from_rows([[0, 1], [1, 0]]))

    @classmethod
    def cyclic(cls, m: int, inversion: bool = False) -> "InvolutiveModule":
        """Z/m with trivial action, or with x ↦ −x when ``inversion`` is set."""
        p = Presentation.cyclic(m)
        return cls.from_matrix(p, IntegerMatrix.scalar(p.generators, -1 if inversion else 1))

    @classmethod
    def of_group(cls, group: FGAbelianGroup, sign: int = 1) -> "InvolutiveModule":
        p = Presentation.of(group)
        return cls.from_matrix(p, IntegerMatrix.scalar(p.generators, sign))

    @property
    def group(self) -> FGAbelianGroup:
        return self.underlying.group

    @property
    def generators(self) -> int:
        return self.underlying.generators

    def direct_sum(self, *others: "InvolutiveModule") -> "InvolutiveModule":
        parts = (self,) + others
        p = direct_sum_presentations([m.underlying for m in parts])
        return InvolutiveModule(p, GroupMap(p, p, block_diagonal([m.sigma.matrix for m in parts]), check=False))

    def plus_one(self) -> GroupMap:
        return self.sigma + GroupMap.identity(self.underlying)

    def minus_one(self) -> GroupMap:
        return self.sigma - GroupMap.identity(self.underlying)


@dataclass(frozen=True)
class GComplex:
    """Bounded complex of involutive modules with equivariant differentials."""

    lowest_degree: int
    terms: tuple
    differentials: tuple

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "differentials", tuple(self.differentials))
        # validates shapes and d∘d = 0
        self.underlying()
        for k, d in enumerate(self.differentials):
            s, t = self.terms[k], self.terms[k + 1]
            if not (d.compose(s.sigma) - t.sigma.compose(d)).is_zero():
                raise EquivarianceError(self.lowest_degree + k)

    @classmethod
    def concentrated(cls, module: InvolutiveModule, degree: int = 0) -> "GComplex":
        return cls(degree, [module], [])

    @classmethod
    def from_matrices(cls, lowest_degree: int, terms: Sequence[InvolutiveModule],
                      matrices: Sequence[IntegerMatrix]) -> "GComplex":
        diffs = [GroupMap(terms[k].underlying, terms[k + 1].underlying, m) for k, m in enumerate(matrices)]
        return cls(lowest_degree, terms, diffs)

    @classmethod
    def empty(cls, lowest_degree: int = 0) -> "GComplex":
        return cls(lowest_degree, [], [])

    @property
    def top_degree(self) -> int:
        return self.lowest_degree + len(self.terms) - 1

    @property
    def width(self) -> int:
        return max(len(self.terms) - 1, 0)

    def term(self, n: int) -> InvolutiveModule:
        if self.lowest_degree <= n <= self.top_degree:
            return self.terms[n - self.lowest_degree]
        p = Presentation(0)
        return InvolutiveModule(p, GroupMap.identity(p))

    def differential(self, n: int) -> GroupMap:
        if self.lowest_degree <= n < self.top_degree:
            return self.differentials[n - self.lowest_degree]
        return GroupMap.zero(self.term(n).underlying, self.term(n + 1).underlying)

    def underlying(self) -> CochainComplex:
        return CochainComplex(self.lowest_degree, [m.underlying for m in self.terms], self.differentials)


def group_cohomology(module: InvolutiveModule, p: int) -> FGAbelianGroup:
    """H^p(G, M) from the periodic resolution."""
    if p < 0:
        raise ValueError("group cohomology degree must be nonnegative")
    if p == 0:
        return module.minus_one().kernel()
    if p % 2 == 0:
        return homology_at(module.plus_one(), module.minus_one())
    return homology_at(module.minus_one(), module.plus_one())


def _horizontal(module: InvolutiveModule, column: int) -> IntegerMatrix:
    return (module.minus_one() if column % 2 == 0 else module.plus_one()).matrix


def _cells(c: GComplex, columns: int, total: int) -> list:
    """(column, degree) pairs of total degree ``total`` with column in [0, columns]."""
    return [(total - i, i) for i in range(c.lowest_degree, c.top_degree + 1) if 0 <= total - i <= columns]


def _total_term(c: GComplex, columns: int, total: int) -> Presentation:
    return direct_sum_presentations([c.term(i).underlying for _, i in _cells(c, columns, total)])


def _total_differential(c: GComplex, columns: int, total: int) -> IntegerMatrix:
    """d_total = d_h + (−1)^column · d_C from total degree ``total`` to ``total + 1``."""
    src, dst = _cells(c, columns, total), _cells(c, columns, total + 1)
    index = {cell: k for k, cell in enumerate(dst)}
    blocks = {}
    for a, (j, i) in enumerate(src):
        if (j + 1, i) in index:
            blocks[(index[(j + 1, i)], a)] = _horizontal(c.term(i), j)
        if (j, i + 1) in index:
            blocks[(index[(j, i + 1)], a)] = c.differential(i).matrix.scaled(-1 if j % 2 else 1)
    return block_matrix(
        [c.term(i).generators for _, i in dst],
        [c.term(i).generators for _, i in src],
        blocks,
    )


def _hypercohomology_with(c: GComplex, n: int, columns: int) -> FGAbelianGroup:
    terms = {t: _total_term(c, columns, t) for t in (n - 1, n, n + 1)}
    d_in = GroupMap(terms[n - 1], terms[n], _total_differential(c, columns, n - 1), check=False)
    d_out = GroupMap(terms[n], terms[n + 1], _total_differential(c, columns, n), check=False)
    return homology_at(d_in, d_out)


def truncation_columns(c: GComplex, n: int) -> int:
    return c.width + abs(n) + abs(c.lowest_degree) + 2


def hypercohomology(c: GComplex, n: int) -> FGAbelianGroup:
    """
    H^n(G, C) as the cohomology of the column-truncated total complex.

    Raises:
        UnstableTruncation: one more column of padding changed the answer.
    """
    if not c.terms:
        return FGAbelianGroup.trivial()
    columns = truncation_columns(c, n)
    first = _hypercohomology_with(c, n, columns)
    second = _hypercohomology_with(c, n, columns + 1)
    if first != second:
        raise UnstableTruncation(f"H^{n}: {first} with {columns} columns, {second} with {columns + 1}")
    logger.debug("H^%d(G, C) = %s (%d columns)", n, first, columns)
    return first


def resolution_double_complex(c: GComplex, columns: int) -> FilteredComplex:
    """
    Total complex of Hom(periodic resolution, C) on columns 0..``columns``.

    The filtration index of a generator is its column, so the associated
    spectral sequence has E_2^{p,q} = H^p(G, H^q(C)) within the window.
    """
    if any(m.underlying.relations.cols for m in c.terms):
        raise ValueError("filtered resolution complexes need free terms")
    lo = c.lowest_degree
    hi = c.top_degree + columns
    mats, ranks, filtration = [], [], {}
    for t in range(lo, hi + 1):
        cells = _cells(c, columns, t)
        ranks.append(sum(c.term(i).generators for _, i in cells))
        filtration[t] = tuple(j for j, i in cells for _ in range(c.term(i).generators))
        if t < hi:
            mats.append(_total_differential(c, columns, t))
    return FilteredComplex(CochainComplex.free(lo, mats, ranks, validate=False), filtration)


def _sublattice_term(module: InvolutiveModule, basis: IntegerMatrix) -> tuple:
    """The subgroup spanned by ``basis`` (a lattice containing the relations) as a module."""
    solver = LatticeSolver(basis)
    relations = solver.coordinates(module.underlying.relations)
    p = Presentation(basis.cols, relations)
    sigma = solver.coordinates(module.sigma.matrix @ basis)
    return InvolutiveModule(p, GroupMap(p, p, sigma, check=False)), solver


def truncate(c: GComplex, i: int) -> GComplex:
    """
    Good truncation τ≤i: cycles in degree i, nothing above.

    Raises:
        InvariantViolation: H^n of the result differs from H^n(C) for some n ≤ i.
    """
    if i >= c.top_degree:
        return c
    if i < c.lowest_degree:
        return GComplex.empty(c.lowest_degree)
    cycles, solver = _sublattice_term(c.term(i), preimage_lattice(c.differential(i)))
    keep = i - c.lowest_degree
    terms = list(c.terms[:keep]) + [cycles]
    diffs = list(c.differentials[:keep])
    if keep:
        last = c.differentials[keep - 1]
        diffs[-1] = GroupMap(last.source, cycles.underlying, solver.coordinates(last.matrix), check=False)
    t = GComplex(c.lowest_degree, terms, diffs)
    _check_truncation(c, t, i)
    return t


def _check_truncation(c: GComplex, t: GComplex, i: int):
    before, after = c.underlying(), t.underlying()
    for n in range(c.lowest_degree, i + 1):
        a, b = cohomology(after, n), cohomology(before, n)
        if a != b:
            raise InvariantViolation(f"truncation at {i} changed H^{n}: {a} vs {b}")


def lemma54_check(c: GComplex, i: int) -> bool:
    """Whether truncating at i leaves H^n(G, −) unchanged for every n ≤ i."""
    t = truncate(c, i)
    for n in range(c.lowest_degree, i + 1):
        a, b = hypercohomology(t, n), hypercohomology(c, n)
        if a != b:
            logger.debug("truncation at %d changed H^%d: %s vs %s", i, n, a, b)
            return False
    return True


def invariant_subcomplex(c: GComplex) -> CochainComplex:
    """C^G = ker(σ−1) degreewise with the restricted differentials."""
    bases = [preimage_lattice(m.minus_one()) for m in c.terms]
    subs = [_sublattice_term(m, b) for m, b in zip(c.terms, bases)]
    diffs = []
    for k, d in enumerate(c.differentials):
        (src, _), (dst, solver) = subs[k], subs[k + 1]
        diffs.append(GroupMap(src.underlying, dst.underlying, solver.coordinates(d.matrix @ bases[k]), check=False))
    return CochainComplex(c.lowest_degree, [s.underlying for s, _ in subs], diffs)


def invariant_cohomology(c: GComplex, n: int) -> FGAbelianGroup:
    """H^n(C^G)."""
    if not c.terms:
        return FGAbelianGroup.trivial()
    return cohomology(invariant_subcomplex(c), n)


_FREE_MODULES = ("trivial", "sign", "regular")
_TORSION_MODULES = ((4, True), (3, False), (2, False))


def _free_module(kind: str) -> InvolutiveModule:
    return {"trivial": InvolutiveModule.trivial, "sign": InvolutiveModule.sign,
            "regular": InvolutiveModule.regular}[kind]()


def _random_matrix(rng, rows: int, cols: int, bound: int) -> IntegerMatrix:
    values = rng.integers(-bound, bound + 1, size=rows * cols)
    return IntegerMatrix(rows, cols, tuple(int(x) for x in values))


def _equivariant_map(rng, source: InvolutiveModule, target: InvolutiveModule, bound: int) -> IntegerMatrix:
    a = _random_matrix(rng, target.generators, source.generators, bound)
    conjugate = target.sigma.matrix @ a @ source.sigma.matrix
    if conjugate == a:
        return a
    small = _random_matrix(rng, target.generators, source.generators, max(bound // 2, 1))
    return small + target.sigma.matrix @ small @ source.sigma.matrix


_DIFFERENCE = IntegerMatrix.from_rows([[1, -1], [-1, 1]])
_NORM = IntegerMatrix.from_rows([[1, 1], [1, 1]])


def _chain_piece(rng, span: int) -> tuple:
    """
    (modules, matrices) of an equivariant chain with composable nonzero maps.

    Either Z[G] → Z[G] → … alternating 1−σ and 1+σ (each scaled by 1 or 2),
    or M → Z/4 → Z/2 by ×2 then reduction, with M = Z and trivial action or
    M = Z with the sign action and Z/4 carrying the inversion.
    """
    if span > 3 or rng.random() < 0.5:
        start = int(rng.integers(0, 2))
        mats = []
        for j in range(span - 1):
            base = _DIFFERENCE if (start + j) % 2 == 0 else _NORM
            mats.append(base.scaled(int(rng.integers(1, 3))))
        return [InvolutiveModule.regular() for _ in range(span)], mats
    inversion = bool(rng.random() < 0.5)
    head = InvolutiveModule.sign() if inversion else InvolutiveModule.trivial()
    modules = [head, InvolutiveModule.cyclic(4, inversion), InvolutiveModule.cyclic(2)]
    return modules, [IntegerMatrix.from_rows([[2]]), IntegerMatrix.from_rows([[1]])]


def random_gcomplex(rng, max_rank: int = 3, max_length: int = 4, entry_bound: int = 3,
                    lowest_degree: Optional[int] = None) -> GComplex:
    """
    Random bounded G-complex for property tests.

    Built as a direct sum of equivariant two-term pieces M_s → M_t over the
    trivial, sign and regular modules, longer chains with composable nonzero
    maps (see _chain_piece), and torsion modules (Z/4 with inversion, Z/3,
    Z/2) sitting alone in one degree. At most ``max_rank`` generators per
    degree and matrix entries in [−entry_bound, entry_bound].
    """
    length = int(rng.integers(1, max_length + 1))
    lo = int(rng.integers(-1, 2)) if lowest_degree is None else lowest_degree
    budget = [max_rank] * length
    terms = [[] for _ in range(length)]
    blocks = [[] for _ in range(length - 1)]

    for _ in range(int(rng.integers(1, 2 * length + 1))):
        k = int(rng.integers(0, length))
        roll = rng.random()
        if roll < 0.2 and budget[k] >= 1:
            m, inversion = _TORSION_MODULES[int(rng.integers(0, len(_TORSION_MODULES)))]
            terms[k].append(InvolutiveModule.cyclic(m, inversion))
            budget[k] -= 1
            continue
        if 0.35 <= roll < 0.55 and k + 2 < length:
            modules, mats = _chain_piece(rng, int(rng.integers(3, length - k + 1)))
            if all(m.generators <= budget[k + j] for j, m in enumerate(modules)):
                for j, m in enumerate(modules):
                    terms[k + j].append(m)
                    budget[k + j] -= m.generators
                for j, a in enumerate(mats):
                    blocks[k + j].append((len(terms[k + j]) - 1, len(terms[k + j + 1]) - 1, a))
            continue
        source = _free_module(_FREE_MODULES[int(rng.integers(0, 3))])
        if k == length - 1 or roll < 0.35:
            if source.generators <= budget[k]:
                terms[k].append(source)
                budget[k] -= source.generators
            continue
        target = _free_module(_FREE_MODULES[int(rng.integers(0, 3))])
        if source.generators > budget[k] or target.generators > budget[k + 1]:
            continue
        terms[k].append(source)
        terms[k + 1].append(target)
        budget[k] -= source.generators
        budget[k + 1] -= target.generators
        blocks[k].append((len(terms[k]) - 1, len(terms[k + 1]) - 1,
                          _equivariant_map(rng, source, target, entry_bound)))

    modules = [_sum_modules(t) for t in terms]
    diffs = []
    for k in range(length - 1):
        row_sizes = [m.generators for m in terms[k + 1]]
        col_sizes = [m.generators for m in terms[k]]
        mat = block_matrix(row_sizes, col_sizes, {(t, s): a for s, t, a in blocks[k]})
        diffs.append(GroupMap(modules[k].underlying, modules[k + 1].underlying, mat, check=False))
    return GComplex(lo, modules, diffs)


def _sum_modules(parts: list) -> InvolutiveModule:
    if not parts:
        p = Presentation(0)
        return InvolutiveModule(p, GroupMap.identity(p))
    return parts[0].direct_sum(*parts[1:])
