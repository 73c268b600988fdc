"""Bounded cochain complexes and a solver for finite windows of long exact sequences."""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .errors import CompositionNotZero, InconsistentTemplate
from .znf import (
    FGAbelianGroup,
    GroupMap,
    IntegerMatrix,
    Presentation,
    block_matrix,
    homology_at,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CochainComplex:
    """C^lowest → C^lowest+1 → … with differentials[k] leaving degree lowest+k."""

    lowest_degree: int
    terms: tuple
    differentials: tuple
    validate: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "differentials", tuple(self.differentials))
        if self.terms and len(self.differentials) != len(self.terms) - 1:
            raise ValueError("need one differential between each pair of consecutive terms")
        for k, d in enumerate(self.differentials):
            if d.source.generators != self.terms[k].generators or d.target.generators != self.terms[k + 1].generators:
                raise ValueError(f"differential {k} does not match the terms")
        if self.validate:
            for k in range(len(self.differentials) - 1):
                if not self.differentials[k + 1].compose(self.differentials[k]).is_zero():
                    raise CompositionNotZero(f"d∘d ≠ 0 at degree {self.lowest_degree + k}")

    @classmethod
    def free(cls, lowest_degree: int, matrices: Sequence[IntegerMatrix], ranks: Optional[Sequence[int]] = None,
             validate: bool = True) -> "CochainComplex":
        """Complex of free groups from its coboundary matrices."""
        if ranks is None:
            ranks = [m.cols for m in matrices] + ([matrices[-1].rows] if matrices else [])
        terms = [Presentation.free(r) for r in ranks]
        diffs = [GroupMap(terms[k], terms[k + 1], m, check=False) for k, m in enumerate(matrices)]
        return cls(lowest_degree, terms, diffs, validate)

    @property
    def top_degree(self) -> int:
        return self.lowest_degree + len(self.terms) - 1

    def term(self, n: int) -> Presentation:
        if self.lowest_degree <= n <= self.top_degree:
            return self.terms[n - self.lowest_degree]
        return Presentation(0)

    def differential(self, n: int) -> GroupMap:
        """d^n: C^n → C^{n+1}, zero outside the support."""
        if self.lowest_degree <= n < self.top_degree:
            return self.differentials[n - self.lowest_degree]
        return GroupMap.zero(self.term(n), self.term(n + 1))

    def is_free(self) -> bool:
        return all(t.relations.cols == 0 for t in self.terms)


def cohomology(c: CochainComplex, n: int) -> FGAbelianGroup:
    return homology_at(c.differential(n - 1), c.differential(n))


def mapping_cone(source: CochainComplex, target: CochainComplex, components: dict) -> CochainComplex:
    """
    Cone of a chain map f: source → target.

    cone^n = source^{n+1} ⊕ target^n with d(a, b) = (−d a, f a + d b).
    ``components`` maps each degree to the GroupMap f^n; missing degrees are zero.
    """
    lo = min(source.lowest_degree - 1, target.lowest_degree)
    hi = max(source.top_degree - 1, target.top_degree)

    def f(n):
        return components.get(n) or GroupMap.zero(source.term(n), target.term(n))

    terms = [source.term(n + 1).direct_sum(target.term(n)) for n in range(lo, hi + 1)]
    diffs = []
    for n in range(lo, hi):
        a_out, b_out = source.term(n + 2), target.term(n + 1)
        a_in, b_in = source.term(n + 1), target.term(n)
        blocks = {
            (0, 0): -source.differential(n + 1).matrix,
            (1, 0): f(n + 1).matrix,
            (1, 1): target.differential(n).matrix,
        }
        m = block_matrix([a_out.generators, b_out.generators], [a_in.generators, b_in.generators], blocks)
        diffs.append(GroupMap(terms[n - lo], terms[n + 1 - lo], m))
    return CochainComplex(lo, terms, diffs)


def identity_cone(c: CochainComplex) -> CochainComplex:
    return mapping_cone(c, c, {n: GroupMap.identity(c.term(n)) for n in range(c.lowest_degree, c.top_degree + 1)})


@dataclass(frozen=True)
class FilteredComplex:
    """Free cochain complex with a decreasing filtration given per generator.

    ``filtration[n][k]`` is the filtration index of generator k in degree n;
    F^p C^n is spanned by the generators with index ≥ p.
    """

    complex: CochainComplex
    filtration: dict

    def __post_init__(self):
        if not self.complex.is_free():
            raise ValueError("filtered complexes must have free terms")
        for n in range(self.complex.lowest_degree, self.complex.top_degree + 1):
            if len(self.filtration.get(n, ())) != self.complex.term(n).generators:
                raise ValueError(f"filtration labels missing in degree {n}")

    def labels(self, n: int) -> tuple:
        return tuple(self.filtration.get(n, ()))


# ---------------------------------------------------------------------------
# Long exact sequence windows
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Known:
    group: Presentation

    @classmethod
    def of(cls, group: FGAbelianGroup) -> "Known":
        return cls(Presentation.of(group))


@dataclass(frozen=True)
class Unknown:
    label: str


@dataclass(frozen=True)
class GradedPieces:
    """A group known only through a subgroup and the quotient by it."""

    sub: FGAbelianGroup
    quot: FGAbelianGroup

    def total(self) -> FGAbelianGroup:
        """The split candidate sub ⊕ quot."""
        return self.sub.direct_sum(self.quot)

    def order(self) -> Optional[int]:
        a, b = self.sub.order(), self.quot.order()
        return None if a is None or b is None else a * b

    def nonzero(self) -> list:
        return [g for g in (self.sub, self.quot) if not g.is_trivial()]

    def to_json(self) -> dict:
        return {"sub": self.sub.to_json(), "quot": self.quot.to_json()}


@dataclass(frozen=True)
class Determined:
    group: FGAbelianGroup


@dataclass(frozen=True)
class Undetermined:
    reason: str = ""


Resolution = Union[Determined, GradedPieces, Undetermined]


@dataclass(frozen=True)
class ExactTemplate:
    """slots[0] → slots[1] → … asserted exact at every interior slot.

    ``maps[k]`` goes from slot k to slot k+1 and is a GroupMap or None (unknown).
    Known maps need both end slots Known.
    """

    slots: tuple
    maps: tuple

    def __post_init__(self):
        object.__setattr__(self, "slots", tuple(self.slots))
        object.__setattr__(self, "maps", tuple(self.maps))
        if len(self.maps) != max(len(self.slots) - 1, 0):
            raise ValueError("template needs one map slot between consecutive group slots")
        for k, m in enumerate(self.maps):
            if m is None:
                continue
            a, b = self.slots[k], self.slots[k + 1]
            if not (isinstance(a, Known) and isinstance(b, Known)):
                raise ValueError(f"known map {k} touches an unknown slot")
            if m.source.generators != a.group.generators or m.target.generators != b.group.generators:
                raise ValueError(f"map {k} does not match its slots")

    def _known_trivial(self, k: int) -> bool:
        return 0 <= k < len(self.slots) and isinstance(self.slots[k], Known) and self.slots[k].group.is_trivial()

    def _group(self, k: int) -> Optional[FGAbelianGroup]:
        if 0 <= k < len(self.slots) and isinstance(self.slots[k], Known):
            return self.slots[k].group.group
        return None

    def _map(self, k: int) -> Optional[GroupMap]:
        if 0 <= k < len(self.maps):
            return self.maps[k]
        return None


def _embeds(a: FGAbelianGroup, b: FGAbelianGroup) -> bool:
    """Whether a is isomorphic to a subgroup of b."""
    if a.free_rank > b.free_rank:
        return False
    pa, pb = a.primary_partitions(), b.primary_partitions()
    for p, exps in pa.items():
        other = pb.get(p, [])
        if len(exps) > len(other):
            return False
        if any(x > y for x, y in zip(exps, other)):
            return False
    return True


def _check_consistency(t: ExactTemplate):
    for k in range(1, len(t.slots) - 1):
        slot = t.slots[k]
        if not isinstance(slot, Known):
            continue
        d_in, d_out = t._map(k - 1), t._map(k)
        if d_in is not None and d_out is not None:
            if not d_out.compose(d_in).is_zero() or not homology_at(d_in, d_out).is_trivial():
                raise InconsistentTemplate(f"sequence is not exact at slot {k}")
            continue
        if t._known_trivial(k - 1):
            if d_out is not None and not d_out.is_injective():
                raise InconsistentTemplate(f"slot {k} must inject into slot {k + 1}")
            target = t._group(k + 1)
            if d_out is None and target is not None and not _embeds(slot.group.group, target):
                raise InconsistentTemplate(f"{slot.group.group} cannot inject into {target} (slot {k})")
            if t._known_trivial(k + 1) and not slot.group.is_trivial():
                raise InconsistentTemplate(f"slot {k} is flanked by zeros but nonzero")
        if t._known_trivial(k + 1) and d_in is not None and not d_in.is_surjective():
            raise InconsistentTemplate(f"slot {k - 1} must surject onto slot {k}")


def _incoming_image(t: ExactTemplate, k: int) -> Optional[FGAbelianGroup]:
    """im(slot k-1 → slot k) ≅ slot_{k-1} / im(slot_{k-2} → slot_{k-1})."""
    if k - 1 < 0:
        return None
    if t._known_trivial(k - 1):
        return FGAbelianGroup.trivial()
    a = t._group(k - 1)
    if a is None or k - 1 == 0:
        return None
    before = t._map(k - 2)
    if before is not None:
        return before.cokernel()
    if t._known_trivial(k - 2):
        return a
    return None


def _outgoing_image(t: ExactTemplate, k: int) -> Optional[FGAbelianGroup]:
    """im(slot k → slot k+1) ≅ ker(slot_{k+1} → slot_{k+2})."""
    if k + 1 >= len(t.slots):
        return None
    if t._known_trivial(k + 1):
        return FGAbelianGroup.trivial()
    b = t._group(k + 1)
    if b is None or k + 1 == len(t.slots) - 1:
        return None
    after = t._map(k + 1)
    if after is not None:
        return after.kernel()
    if t._known_trivial(k + 2):
        return b
    return None


def solve_exact(t: ExactTemplate) -> list:
    """
    Resolve every Unknown slot of an exact template.

    Returns:
        list of (label, Resolution). Determined only when one graded piece
        vanishes; GradedPieces whenever both are nonzero (the extension is
        never guessed); Undetermined when a piece is out of reach.
    """
    _check_consistency(t)
    out = []
    for k, slot in enumerate(t.slots):
        if not isinstance(slot, Unknown):
            continue
        if k == 0 or k == len(t.slots) - 1:
            out.append((slot.label, Undetermined("end slot carries no exactness constraint")))
            continue
        sub = _incoming_image(t, k)
        quot = _outgoing_image(t, k)
        if sub is None or quot is None:
            out.append((slot.label, Undetermined("neighbouring data insufficient")))
        elif sub.is_trivial():
            out.append((slot.label, Determined(quot)))
        elif quot.is_trivial():
            out.append((slot.label, Determined(sub)))
        else:
            out.append((slot.label, GradedPieces(sub, quot)))
        logger.debug("slot %s resolved to %s", slot.label, out[-1][1])
    return out


def resolution_pieces(r: Resolution) -> GradedPieces:
    """Normalise a resolution to graded pieces (Determined A becomes (A, 0))."""
    if isinstance(r, GradedPieces):
        return r
    if isinstance(r, Determined):
        return GradedPieces(r.group, FGAbelianGroup.trivial())
    raise InconsistentTemplate(f"slot left undetermined: {r.reason}")
