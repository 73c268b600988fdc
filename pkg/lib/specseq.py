"""
Bounded cohomological spectral sequences.

A page E_r holds groups E_r^{p,q} on a closed window and differentials
d_r: E_r^{p,q} → E_r^{p+r,q−r+1}. Pages built from a filtered complex keep it
as their origin and compute every later page exactly; pages read from JSON
carry only their stated differentials.
"""

import logging
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Optional

from .chain import FilteredComplex, cohomology
from .errors import (
    InputError,
    LemmaViolation,
    MismatchAt,
    NonCollapsing,
    NonCommutingMorphism,
    NotFreeAction,
)
from .gmod import group_cohomology, resolution_double_complex
from .realcx import (
    KRCoefficientSystem,
    LocalWeight,
    RealComplex,
    bredon_cochain_complex,
    cochain_gcomplex,
    cohomology_module,
    fixed_subcomplex,
)
from .znf import (
    FGAbelianGroup,
    GroupMap,
    IntegerMatrix,
    LatticeSolver,
    Presentation,
    block_matrix,
    induced_map,
    kernel_basis,
    standardize,
    subquotient,
)

logger = logging.getLogger(__name__)

_EMPTY = Presentation(0)


@dataclass(frozen=True)
class Page:
    r: int
    window: tuple
    entries: dict
    differentials: dict
    origin: Optional[FilteredComplex] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "window", tuple(int(w) for w in self.window))
        p_min, p_max, q_min, q_max = self.window
        if p_min > p_max or q_min > q_max:
            raise InputError(f"empty window {self.window}")
        for spot in self.entries:
            if not self.in_window(spot):
                raise InputError(f"entry at {spot} lies outside the window")
        for spot, d in self.differentials.items():
            target = self.target_of(spot)
            if not (self.in_window(spot) and self.in_window(target)):
                raise InputError(f"differential at {spot} leaves the window")
            if d.source.generators != self.entry(*spot).generators or \
                    d.target.generators != self.entry(*target).generators:
                raise InputError(f"differential at {spot} does not match its entries")
        for spot, d in self.differentials.items():
            after = self.differentials.get(self.target_of(spot))
            if after is not None and not after.compose(d).is_zero():
                raise InputError(f"d∘d ≠ 0 starting at {spot}")

    @property
    def p_range(self) -> range:
        return range(self.window[0], self.window[1] + 1)

    @property
    def q_range(self) -> range:
        return range(self.window[2], self.window[3] + 1)

    def in_window(self, spot) -> bool:
        p, q = spot
        return self.window[0] <= p <= self.window[1] and self.window[2] <= q <= self.window[3]

    def spots(self) -> list:
        return [(p, q) for p in self.p_range for q in self.q_range]

    def target_of(self, spot) -> tuple:
        return spot[0] + self.r, spot[1] - self.r + 1

    def source_of(self, spot) -> tuple:
        return spot[0] - self.r, spot[1] + self.r - 1

    def entry(self, p: int, q: int) -> Presentation:
        return self.entries.get((p, q), _EMPTY)

    def group(self, p: int, q: int) -> FGAbelianGroup:
        return self.entry(p, q).group

    def differential(self, p: int, q: int) -> GroupMap:
        d = self.differentials.get((p, q))
        if d is None:
            return GroupMap.zero(self.entry(p, q), self.entry(*self.target_of((p, q))))
        return d

    def nonzero_spots(self) -> list:
        return sorted(s for s, e in self.entries.items() if not e.is_trivial())

    def is_degenerate(self) -> bool:
        """Whether every d_r on this page vanishes."""
        return all(d.is_zero() for d in self.differentials.values())

    def to_json(self) -> dict:
        entries = [{"p": p, "q": q, "group": self.group(p, q).to_json()} for p, q in self.nonzero_spots()]
        diffs = []
        for (p, q), d in sorted(self.differentials.items()):
            if d.is_zero():
                continue
            to_std, _ = standardize(d.target)
            _, from_std = standardize(d.source)
            diffs.append({"p": p, "q": q, "matrix": (to_std @ d.matrix @ from_std).to_json()})
        return {
            "r": self.r,
            "window": {"p": [self.window[0], self.window[1]], "q": [self.window[2], self.window[3]]},
            "entries": entries,
            "differentials": diffs,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Page":
        try:
            r = int(data["r"])
            window = (*data["window"]["p"], *data["window"]["q"])
            entries = {
                (int(e["p"]), int(e["q"])): Presentation.of(FGAbelianGroup.from_json(e["group"]))
                for e in data.get("entries", [])
            }
            raw = [(int(d["p"]), int(d["q"]), d["matrix"]) for d in data.get("differentials", [])]
        except (KeyError, TypeError, ValueError) as e:
            raise InputError(f"malformed page JSON ({type(e).__name__}: {e})")
        if r < 1:
            raise InputError("page index must be at least 1")
        if len(window) != 4:
            raise InputError("window needs p and q ranges [lo, hi]")
        diffs = {}
        for p, q, rows in raw:
            src = entries.get((p, q), _EMPTY)
            dst = entries.get((p + r, q - r + 1), _EMPTY)
            matrix = IntegerMatrix.from_rows(rows, src.generators) if rows else IntegerMatrix.zeros(dst.generators, src.generators)
            diffs[(p, q)] = GroupMap(src, dst, matrix)
        return cls(r, window, entries, diffs)


# ---------------------------------------------------------------------------
# Pages of a filtered complex
# ---------------------------------------------------------------------------

class _FilteredLattices:
    """Z_s^{p,n} = {x ∈ F^p C^n : dx ∈ F^{p+s} C^{n+1}} as explicit bases, memoised."""

    def __init__(self, origin: FilteredComplex):
        self.origin = origin
        self.c = origin.complex
        self._memo = {}

    def cycles(self, s: int, p: int, n: int) -> IntegerMatrix:
        key = (s, p, n)
        if key not in self._memo:
            self._memo[key] = self._cycles(s, p, n)
        return self._memo[key]

    def _cycles(self, s, p, n):
        labels = self.origin.labels(n)
        support = [k for k, a in enumerate(labels) if a >= p]
        rows = [k for k, a in enumerate(self.origin.labels(n + 1)) if a < p + s]
        if rows and support:
            restricted = self.c.differential(n).matrix.select_rows(rows).select_cols(support)
            local = kernel_basis(restricted)
        else:
            local = IntegerMatrix.identity(len(support))
        out = [[0] * local.cols for _ in labels]
        for k, row in zip(support, local.to_lists()):
            out[k] = row
        return IntegerMatrix.from_rows(out, local.cols)


def _window_of(origin: FilteredComplex) -> tuple:
    c = origin.complex
    labels = [a for n in range(c.lowest_degree, c.top_degree + 1) for a in origin.labels(n)]
    p_min, p_max = (min(labels), max(labels)) if labels else (0, 0)
    return p_min, p_max, c.lowest_degree - p_max, max(c.top_degree - p_min, c.lowest_degree - p_max)


def filtered_page(origin: FilteredComplex, r: int) -> Page:
    """E_r^{p,q} = Z_r^{p,n} / (Z_{r−1}^{p+1,n} + d Z_{r−1}^{p−r+1,n−1}), n = p + q."""
    if r < 1:
        raise ValueError("page index must be at least 1")
    lat = _FilteredLattices(origin)
    c = origin.complex
    window = _window_of(origin)
    p_min, p_max = window[0], window[1]
    entries, solvers, bases = {}, {}, {}
    for n in range(c.lowest_degree, c.top_degree + 1):
        for p in range(p_min, p_max + 1):
            z = lat.cycles(r, p, n)
            if z.cols == 0:
                continue
            dz = c.differential(n - 1).matrix @ lat.cycles(r - 1, p - r + 1, n - 1)
            solver = LatticeSolver(z)
            relations = solver.coordinates(lat.cycles(r - 1, p + 1, n).hstack(dz))
            entry = Presentation(z.cols, relations)
            if entry.is_trivial():
                continue
            spot = (p, n - p)
            entries[spot], solvers[spot], bases[spot] = entry, solver, z
    diffs = {}
    for (p, q), z in bases.items():
        target = (p + r, q - r + 1)
        if target not in entries:
            continue
        image = c.differential(p + q).matrix @ z
        d = GroupMap(entries[(p, q)], entries[target], solvers[target].coordinates(image), check=False)
        if not d.is_zero():
            diffs[(p, q)] = d
    logger.debug("E_%d: %d nonzero entries, %d nonzero differentials", r, len(entries), len(diffs))
    return Page(r, window, entries, diffs, origin)


def _turn_with_witnesses(page: Page) -> tuple:
    entries, witnesses = {}, {}
    for spot in page.spots():
        if page.entry(*spot).generators == 0:
            continue
        incoming = page.differential(*page.source_of(spot)) if page.in_window(page.source_of(spot)) \
            else GroupMap.zero(_EMPTY, page.entry(*spot))
        sq = subquotient(incoming, page.differential(*spot))
        if not sq.group.is_trivial():
            entries[spot], witnesses[spot] = sq.presentation, sq
    return Page(page.r + 1, page.window, entries, {}), witnesses


def turn_page(page: Page) -> Page:
    """
    E_{r+1} = ker d_r / im d_r spotwise.

    Pages with an origin get their d_{r+1} from it; standalone pages carry no
    information about d_{r+1}, which is therefore zero.
    """
    if page.origin is not None:
        return filtered_page(page.origin, page.r + 1)
    return _turn_with_witnesses(page)[0]


def stable_index(page: Page) -> int:
    """Beyond this index every d_r leaves the window."""
    return max(page.r, page.window[1] - page.window[0] + 1)


def run_to_infinity(page: Page) -> Page:
    if page.origin is not None:
        r = stable_index(page)
        return page if r == page.r else filtered_page(page.origin, r)
    while not page.is_degenerate():
        page = turn_page(page)
    return page


def _connecting_pairs(page: Page, degrees: Optional[Iterable[int]] = None) -> list:
    """(source, target) nonzero spots that some d_{r'} with r' ≥ r could connect."""
    spots = page.nonzero_spots()
    wanted = None if degrees is None else set(degrees)
    out = []
    for s in spots:
        for t in spots:
            if sum(t) != sum(s) + 1 or t[0] - s[0] < page.r:
                continue
            if wanted is None or sum(s) in wanted or sum(t) in wanted:
                out.append((s, t))
    return out


def collapse_certificate(page: Page) -> bool:
    """True when every d_{r'} (r' ≥ r) has a zero source or target for bidegree reasons."""
    return not _connecting_pairs(page)


def degree_certificate(page: Page, n: int) -> bool:
    """
    True when every d_{r'} (r' ≥ r) into or out of total degree n vanishes:
    zero source, zero target, or a finite source mapping to a free target.
    """
    for s, t in _connecting_pairs(page, [n]):
        if not (page.group(*s).is_finite() and page.group(*t).is_free()):
            logger.debug("degree %d: possible differential %s -> %s", n, s, t)
            return False
    return True


def abutment_graded(page: Page, n: int) -> list:
    """Nonzero E^{p,n−p} in increasing p; extensions are not resolved."""
    return [page.group(p, n - p) for p in page.p_range if not page.group(p, n - p).is_trivial()]


# ---------------------------------------------------------------------------
# Morphisms and the comparison argument
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SSMorphism:
    source: Page
    target: Page
    components: dict

    def __post_init__(self):
        if self.source.origin is not None or self.target.origin is not None:
            raise InputError("morphisms are defined between standalone pages")
        if self.source.r != self.target.r:
            raise InputError("morphism pages must share the page index")
        for spot, f in self.components.items():
            if f.source.generators != self.source.entry(*spot).generators or \
                    f.target.generators != self.target.entry(*spot).generators:
                raise InputError(f"component at {spot} does not match the entries")
        for spot in self.spots():
            t = self.source.target_of(spot)
            left = self.component(*t).compose(self.source.differential(*spot))
            right = self.target.differential(*spot).compose(self.component(*spot))
            if not (left - right).is_zero():
                raise NonCommutingMorphism(f"f∘d ≠ d∘f at {spot}")

    def spots(self) -> list:
        return sorted(set(self.source.spots()) | set(self.target.spots()))

    def component(self, p: int, q: int) -> GroupMap:
        f = self.components.get((p, q))
        if f is None:
            return GroupMap.zero(self.source.entry(p, q), self.target.entry(p, q))
        return f


@dataclass(frozen=True)
class Confirmed:
    source: Page
    target: Page
    through: int

    def to_json(self) -> dict:
        return {"verdict": "confirmed", "through": self.through, "r": self.source.r,
                "source": self.source.to_json(), "target": self.target.to_json()}


@dataclass(frozen=True)
class HypothesisFailed:
    spot: tuple
    reason: str

    def to_json(self) -> dict:
        return {"verdict": "hypothesis_failed", "spot": list(self.spot), "reason": self.reason}


def _first_failure(f: SSMorphism, n_max: int) -> Optional[tuple]:
    for spot in f.spots():
        n = sum(spot)
        if n <= n_max and not f.component(*spot).is_isomorphism():
            return spot, f"not an isomorphism in total degree {n}"
        if n == n_max + 1 and not f.component(*spot).is_injective():
            return spot, f"not injective in total degree {n}"
    return None


def _turn_morphism(f: SSMorphism) -> SSMorphism:
    src, src_w = _turn_with_witnesses(f.source)
    tgt, tgt_w = _turn_with_witnesses(f.target)
    components = {}
    for spot in src_w:
        if spot in tgt_w:
            components[spot] = induced_map(f.component(*spot), src_w[spot], tgt_w[spot])
    return SSMorphism(src, tgt, components)


def compare(f: SSMorphism, n_max: int, r0: int):
    """
    Comparison of bounded spectral sequences.

    If f is an isomorphism in total degrees ≤ n_max and injective in degree
    n_max + 1 on E_{r0}, the same holds on every later page and at E_∞.

    Returns:
        Confirmed with both E_∞ pages, or HypothesisFailed naming the spot.

    Raises:
        LemmaViolation: the property was lost while propagating.
    """
    if f.source.r != r0:
        raise InputError(f"morphism lives on E_{f.source.r}, not E_{r0}")
    failure = _first_failure(f, n_max)
    if failure is not None:
        return HypothesisFailed(*failure)
    while not (f.source.is_degenerate() and f.target.is_degenerate()):
        f = _turn_morphism(f)
        failure = _first_failure(f, n_max)
        if failure is not None:
            raise LemmaViolation(f"E_{f.source.r} at {failure[0]}: {failure[1]}")
    return Confirmed(f.source, f.target, n_max)


def morphism_to_json(f: SSMorphism) -> dict:
    maps = []
    for (p, q), m in sorted(f.components.items()):
        to_std, _ = standardize(m.target)
        _, from_std = standardize(m.source)
        maps.append({"p": p, "q": q, "matrix": (to_std @ m.matrix @ from_std).to_json()})
    return {"source": f.source.to_json(), "target": f.target.to_json(), "maps": maps}


def morphism_from_json(data: dict) -> SSMorphism:
    try:
        source, target = Page.from_json(data["source"]), Page.from_json(data["target"])
        raw = [(int(m["p"]), int(m["q"]), m["matrix"]) for m in data.get("maps", [])]
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"malformed morphism JSON ({type(e).__name__}: {e})")
    components = {}
    for p, q, rows in raw:
        src, dst = source.entry(p, q), target.entry(p, q)
        matrix = IntegerMatrix.from_rows(rows, src.generators) if rows else IntegerMatrix.zeros(dst.generators, src.generators)
        components[(p, q)] = GroupMap(src, dst, matrix)
    return SSMorphism(source, target, components)


# ---------------------------------------------------------------------------
# Random pages for the comparison fuzz
# ---------------------------------------------------------------------------

_RANDOM_ORDERS = (0, 0, 2, 2, 3, 4, 1, 1)


def _cyclic_order(p: Presentation) -> int:
    """n with p ≅ Z/n (0 for Z) for one-generator standard presentations."""
    return p.relations[0, 0] if p.relations.cols else 0


def _random_cyclic_map(rng, source: Presentation, target: Presentation) -> Optional[GroupMap]:
    a, b = _cyclic_order(source), _cyclic_order(target)
    x = int(rng.integers(-3, 4))
    if a and not b:
        return None
    if a and b:
        x *= b // gcd(a, b)
    m = GroupMap(source, target, IntegerMatrix.from_rows([[x]]))
    return None if m.is_zero() else m


def random_page(rng, window: tuple = (0, 3, -3, 0), r: int = 2, density: float = 0.5,
                min_degree: Optional[int] = None) -> Page:
    """Page of cyclic groups with random, non-chaining d_r.

    ``min_degree`` keeps every entry in total degree ≥ min_degree.
    """
    p_min, p_max, q_min, q_max = window
    entries = {}
    for p in range(p_min, p_max + 1):
        for q in range(q_min, q_max + 1):
            if min_degree is not None and p + q < min_degree:
                continue
            order = _RANDOM_ORDERS[int(rng.integers(0, len(_RANDOM_ORDERS)))]
            if order != 1:
                entries[(p, q)] = Presentation.cyclic(order)
    used, diffs = set(), {}
    for spot in sorted(entries):
        target = (spot[0] + r, spot[1] - r + 1)
        if target not in entries or spot in used or target in used or rng.random() > density:
            continue
        d = _random_cyclic_map(rng, entries[spot], entries[target])
        if d is not None:
            diffs[spot] = d
            used.update({spot, target})
    return Page(r, window, entries, diffs)


def direct_sum_page(a: Page, b: Page) -> tuple:
    """(a ⊕ b, inclusion of a) for pages on the same window and index."""
    if a.window != b.window or a.r != b.r:
        raise InputError("direct sums need equal windows and page indices")
    entries = {}
    for spot in set(a.entries) | set(b.entries):
        entries[spot] = a.entry(*spot).direct_sum(b.entry(*spot))
    diffs = {}
    for spot in set(a.differentials) | set(b.differentials):
        t = a.target_of(spot)
        m = block_matrix(
            [a.entry(*t).generators, b.entry(*t).generators],
            [a.entry(*spot).generators, b.entry(*spot).generators],
            {(0, 0): a.differential(*spot).matrix, (1, 1): b.differential(*spot).matrix},
        )
        diffs[spot] = GroupMap(entries[spot], entries[t], m, check=False)
    total = Page(a.r, a.window, entries, diffs)
    inclusion = {}
    for spot, e in a.entries.items():
        n, k = e.generators, b.entry(*spot).generators
        m = block_matrix([n, k], [n], {(0, 0): IntegerMatrix.identity(n)})
        inclusion[spot] = GroupMap(e, entries[spot], m, check=False)
    return total, SSMorphism(a, total, inclusion)


def _touched(page: Page) -> set:
    return set(page.differentials) | {page.target_of(s) for s in page.differentials}


def random_extension(rng, page: Page, n_max: int, coupling: float = 0.5, scaling: float = 0.5) -> SSMorphism:
    """
    Morphism from ``page`` into an extension of it by Q, Q in total degrees > n_max.

    The target is page ⊕ Q except that some differentials run from a spot of
    Q into ``page`` (a non-split extension), and some free spots of ``page``
    in degrees > n_max that no differential touches map by ×2 or ×3 instead
    of the identity. Every such change sits above n_max, so the morphism is
    an isomorphism through n_max and injective in n_max + 1.
    """
    extra = random_page(rng, page.window, page.r, min_degree=n_max + 1)
    total, inclusion = direct_sum_page(page, extra)
    diffs = dict(total.differentials)
    coupled = set()
    busy, extra_busy = _touched(page), _touched(extra)
    for s in sorted(extra.entries):
        t = page.target_of(s)
        if s in extra_busy or t not in page.entries or t in page.differentials or not page.in_window(t):
            continue
        if rng.random() > coupling:
            continue
        c = _random_cyclic_map(rng, extra.entry(*s), page.entry(*t))
        if c is None:
            continue
        blocks = {(0, 1): c.matrix}
        if s in page.differentials:
            blocks[(0, 0)] = page.differentials[s].matrix
        m = block_matrix(
            [page.entry(*t).generators, extra.entry(*t).generators],
            [page.entry(*s).generators, extra.entry(*s).generators],
            blocks,
        )
        diffs[s] = GroupMap(total.entries[s], total.entries[t], m, check=False)
        coupled.add(t)
    target = Page(total.r, total.window, total.entries, diffs)
    components = dict(inclusion.components)
    for spot, e in page.entries.items():
        if sum(spot) <= n_max or spot in busy or spot in coupled or e.relations.cols:
            continue
        if rng.random() > scaling:
            continue
        k = int(rng.integers(2, 4))
        m = block_matrix([1, extra.entry(*spot).generators], [1], {(0, 0): IntegerMatrix.from_rows([[k]])})
        components[spot] = GroupMap(e, total.entries[spot], m, check=False)
    return SSMorphism(page, target, components)


def random_defect(rng, page: Page, n_max: int) -> Optional[tuple]:
    """
    (morphism, spot): the identity of ``page`` made zero or ×2 at one spot of
    total degree ≤ n_max + 1 that no differential touches, or None if there
    is no such spot.
    """
    busy = _touched(page)
    candidates = [s for s in page.nonzero_spots() if sum(s) <= n_max + 1 and s not in busy]
    if not candidates:
        return None
    spot = candidates[int(rng.integers(0, len(candidates)))]
    components = {s: GroupMap.identity(e) for s, e in page.entries.items()}
    e = page.entry(*spot)
    if e.relations.cols or sum(spot) == n_max + 1:
        del components[spot]
    else:
        components[spot] = GroupMap(e, e, IntegerMatrix.scalar(e.generators, 2))
    return SSMorphism(page, page, components), spot


# ---------------------------------------------------------------------------
# Assembled E_2 pages
# ---------------------------------------------------------------------------

KR_DEGREES = tuple(range(-7, 1))


def ahss_window(x: RealComplex) -> tuple:
    dim = max(x.dimension, 0)
    return 0, dim, -7 - dim, 0


def assemble_ahss(x: RealComplex, system: Optional[KRCoefficientSystem] = None,
                  degrees: Optional[Iterable[int]] = None) -> Page:
    """
    E_2^{p,q} = H_G^p(X; KR^q) ⇒ KR^{p+q}(X), differentials set to zero.

    Raises:
        NonCollapsing: the page does not collapse for bidegree reasons (or,
            with ``degrees``, some differential touching those degrees may
            be nonzero).
    """
    system = system or KRCoefficientSystem.standard()
    window = ahss_window(x)
    entries, by_residue = {}, {}
    for q in range(window[2], window[3] + 1):
        residue = q % 8
        if residue not in by_residue:
            c = bredon_cochain_complex(x, system, q)
            by_residue[residue] = [cohomology(c, p) for p in range(window[0], window[1] + 1)]
        for p, group in zip(range(window[0], window[1] + 1), by_residue[residue]):
            if not group.is_trivial():
                entries[(p, q)] = Presentation.of(group)
    page = Page(2, window, entries, {})
    if degrees is None:
        if not collapse_certificate(page):
            raise NonCollapsing("Bredon spectral sequence may have nonzero differentials")
    else:
        for n in degrees:
            if not degree_certificate(page, n):
                raise NonCollapsing(f"differentials may touch total degree {n}")
    return page


def cartan_leray_columns(x: RealComplex) -> int:
    return 2 * max(x.dimension, 0) + 4


def assemble_cartan_leray(x: RealComplex, weight: LocalWeight, columns: Optional[int] = None) -> Page:
    """
    E_2^{p,q} = H^p(G, H^q(X; Z(i))) ⇒ H^{p+q}(X/G; Z(i)) for a free involution.

    The page is backed by the column-filtered total complex of the periodic
    resolution, so later pages are exact. Entries in columns p ≤ dim X + 2
    are checked against group cohomology of H^q(X) with its involution.
    """
    if fixed_subcomplex(x).simplices:
        raise NotFreeAction("Cartan–Leray needs X^G = ∅")
    columns = columns or cartan_leray_columns(x)
    origin = resolution_double_complex(cochain_gcomplex(x, weight), columns)
    page = filtered_page(origin, 2)
    for q in range(x.dimension + 1):
        module = cohomology_module(x, q, weight)
        for p in range(min(x.dimension + 3, columns)):
            expected = group_cohomology(module, p)
            if page.group(p, q) != expected:
                raise MismatchAt(p + q, page.group(p, q), expected)
    return page


def cartan_leray_abutment(x: RealComplex, weight: LocalWeight) -> dict:
    """
    Graded pieces of H^n(X/G; Z(i)) for 0 ≤ n ≤ dim X.

    Columns above dim X + 2 form a subcomplex concentrated in total degrees
    > dim X + 2, so dropping them leaves these degrees and their filtration
    unchanged.
    """
    page = assemble_cartan_leray(x, weight, columns=x.dimension + 3)
    final = filtered_page(page.origin, x.dimension + 2) if x.dimension + 2 > page.r else page
    return {n: abutment_graded(final, n) for n in range(x.dimension + 1)}
