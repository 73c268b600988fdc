"""
Finite simplicial complexes with a simplicial involution.

Simplices are sorted vertex tuples; the global vertex order fixes every
orientation and incidence sign. A RealComplex is *regular* when each simplex
mapped to itself by the involution is fixed vertex by vertex.
"""

import logging
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, product
from typing import Iterable, Optional, Sequence

import numpy as np

from .chain import CochainComplex, cohomology
from .errors import (
    DegenerateRadius,
    InvalidRealComplex,
    NotFreeAction,
    NotOnVariety,
    UnsupportedParams,
)
from .gmod import GComplex, InvolutiveModule, invariant_subcomplex
from .znf import (
    FGAbelianGroup,
    GroupMap,
    IntegerMatrix,
    Presentation,
    block_matrix,
    direct_sum_presentations,
    induced_map,
    subquotient,
)

logger = logging.getLogger(__name__)

INPUT_TOLERANCE = 1e-12
OUTPUT_TOLERANCE = 1e-9


def _permutation_sign(values: Sequence[int]) -> int:
    sign = 1
    values = list(values)
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            if values[i] > values[j]:
                sign = -sign
    return sign


def _faces(simplex: tuple):
    """(index, face) pairs with face_i dropping the i-th vertex."""
    for i in range(len(simplex)):
        yield i, simplex[:i] + simplex[i + 1:]


@dataclass(frozen=True)
class SimplicialComplex:
    simplices: frozenset

    @classmethod
    def from_facets(cls, facets: Iterable[Iterable[int]]) -> "SimplicialComplex":
        """Face closure of ``facets`` (the empty simplex is never included)."""
        out = set()
        for facet in facets:
            facet = tuple(sorted(set(int(v) for v in facet)))
            for k in range(1, len(facet) + 1):
                out.update(combinations(facet, k))
        return cls(frozenset(out))

    @cached_property
    def vertices(self) -> tuple:
        return tuple(sorted({v for s in self.simplices for v in s}))

    @cached_property
    def dimension(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    @cached_property
    def _by_dim(self) -> dict:
        out = {}
        for s in self.simplices:
            out.setdefault(len(s) - 1, []).append(s)
        return {k: sorted(v) for k, v in out.items()}

    def simplices_of_dim(self, k: int) -> list:
        return self._by_dim.get(k, [])

    @cached_property
    def _index(self) -> dict:
        return {s: i for k in self._by_dim for i, s in enumerate(self._by_dim[k])}

    def index(self, simplex: tuple) -> int:
        return self._index[simplex]

    def count(self, k: int) -> int:
        return len(self.simplices_of_dim(k))

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * self.count(k) for k in range(self.dimension + 1))

    def coboundary(self, k: int) -> IntegerMatrix:
        """δ: C^k → C^{k+1}, (δφ)(σ) = Σ_i (−1)^i φ(face_i σ)."""
        rows = [[0] * self.count(k) for _ in range(self.count(k + 1))]
        for r, s in enumerate(self.simplices_of_dim(k + 1)):
            for i, f in _faces(s):
                rows[r][self.index(f)] += (-1) ** i
        return IntegerMatrix.from_rows(rows, self.count(k))

    def cochain_complex(self) -> CochainComplex:
        n = self.dimension
        if n < 0:
            return CochainComplex(0, [], [])
        return CochainComplex.free(0, [self.coboundary(k) for k in range(n)], [self.count(k) for k in range(n + 1)])


@dataclass(frozen=True)
class LocalWeight:
    """Weight i of the local system Z(i); only the parity is kept."""

    i: int

    def __post_init__(self):
        object.__setattr__(self, "i", int(self.i) % 2)

    @property
    def sign(self) -> int:
        """Action of the involution on Z(i)."""
        return -1 if self.i else 1

    @property
    def is_even(self) -> bool:
        return self.i == 0


@dataclass(frozen=True)
class RealComplex:
    """Simplicial complex on vertices 0..n−1 with a vertex involution ``tau``."""

    complex: SimplicialComplex
    tau: tuple

    def __post_init__(self):
        object.__setattr__(self, "tau", tuple(int(v) for v in self.tau))

    @classmethod
    def from_facets(cls, facets: Iterable[Iterable[int]], tau: Sequence[int]) -> "RealComplex":
        return cls(SimplicialComplex.from_facets(facets), tuple(tau))

    @property
    def vertex_count(self) -> int:
        return len(self.tau)

    @property
    def dimension(self) -> int:
        return self.complex.dimension

    def apply(self, simplex: tuple) -> tuple:
        return tuple(sorted(self.tau[v] for v in simplex))

    def orientation_sign(self, simplex: tuple) -> int:
        """Sign ε with τ_*[s] = ε·[τ s]."""
        return _permutation_sign([self.tau[v] for v in simplex])

    def is_fixed(self, simplex: tuple) -> bool:
        return all(self.tau[v] == v for v in simplex)

    def validated(self) -> "RealComplex":
        violation = find_violation(self)
        if violation is not None:
            raise InvalidRealComplex(*violation)
        return self

    def to_json(self) -> dict:
        facets = sorted(s for s in self.complex.simplices if not any(
            set(s) < set(t) for t in self.complex.simplices_of_dim(len(s))))
        return {"vertices": self.vertex_count, "simplices": [list(s) for s in facets], "tau": list(self.tau)}

    @classmethod
    def from_json(cls, data: dict) -> "RealComplex":
        try:
            n = int(data["vertices"])
            tau = [int(v) for v in data.get("tau", range(n))]
            simplices = [list(s) for s in data["simplices"]]
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidRealComplex(None, f"malformed complex JSON ({e})")
        if len(tau) != n:
            raise InvalidRealComplex(None, "tau must list one image per vertex")
        for s in simplices:
            if any(not 0 <= v < n for v in s):
                raise InvalidRealComplex(s, "vertex index out of range")
        return cls.from_facets(simplices, tau)


def find_violation(x: RealComplex) -> Optional[tuple]:
    """First (simplex, reason) breaking the RealComplex invariants, or None."""
    n = x.vertex_count
    for v, w in enumerate(x.tau):
        if not 0 <= w < n or x.tau[w] != v:
            return (v,), "tau is not an involution of the vertex set"
    for k in range(x.dimension + 1):
        for s in x.complex.simplices_of_dim(k):
            image = x.apply(s)
            if image not in x.complex.simplices:
                return s, "tau does not map this simplex to a simplex"
            if image == s and not x.is_fixed(s):
                return s, "invariant simplex is not fixed vertexwise"
    return None


def validate(x: RealComplex) -> bool:
    violation = find_violation(x)
    if violation is not None:
        logger.debug("invalid real complex: %s %s", *violation)
    return violation is None


def barycentric_subdivide(x: RealComplex) -> RealComplex:
    """Vertices are the simplices of x; simplices are chains of faces."""
    cells = sorted(x.complex.simplices, key=lambda s: (len(s), s))
    label = {s: k for k, s in enumerate(cells)}
    chains = {}

    def chains_ending(s):
        if s not in chains:
            out = [(s,)]
            for k in range(1, len(s)):
                for f in combinations(s, k):
                    out.extend(c + (s,) for c in chains_ending(f))
            chains[s] = out
        return chains[s]

    facets = [[label[c] for c in chain] for s in cells for chain in chains_ending(s)]
    tau = [label[x.apply(s)] for s in cells]
    return RealComplex.from_facets(facets, tau)


def fixed_subcomplex(x: RealComplex) -> SimplicialComplex:
    return SimplicialComplex(frozenset(s for s in x.complex.simplices if x.is_fixed(s)))


@dataclass(frozen=True)
class QuotientComplex:
    """Cellular structure of X/G: one cell per orbit, represented by its smaller simplex."""

    source: RealComplex

    def representative(self, simplex: tuple) -> tuple:
        return min(simplex, self.source.apply(simplex))

    @cached_property
    def cells(self) -> dict:
        out = {}
        for k in range(self.source.dimension + 1):
            out[k] = [s for s in self.source.complex.simplices_of_dim(k) if self.representative(s) == s]
        return out

    @cached_property
    def _index(self) -> dict:
        return {s: i for k in self.cells for i, s in enumerate(self.cells[k])}

    def orbit(self, simplex: tuple) -> tuple:
        """Orbit map: simplex ↦ (dimension, cell index)."""
        return len(simplex) - 1, self._index[self.representative(simplex)]

    def count(self, k: int) -> int:
        return len(self.cells.get(k, []))

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * self.count(k) for k in self.cells)

    def is_orientable_surface(self) -> bool:
        """Orientability test for quotients of free actions on closed surfaces."""
        if self.source.dimension != 2:
            raise ValueError("orientability is only decided for surfaces")
        return cohomology(self.cochain_complex(LocalWeight(0)), 2).free_rank == 1

    def cochain_complex(self, weight: LocalWeight) -> CochainComplex:
        """Equivariant cochains Hom_G(C_*(X), Z(i)) on orbit cells."""
        x = self.source
        if not weight.is_even and any(x.is_fixed(s) for s in x.complex.simplices):
            raise NotFreeAction("odd weights need a free action on the orbit cells")
        dim = x.dimension
        if dim < 0:
            return CochainComplex(0, [], [])
        mats = []
        for k in range(dim):
            rows = [[0] * self.count(k) for _ in range(self.count(k + 1))]
            for r, s in enumerate(self.cells[k + 1]):
                for i, f in _faces(s):
                    rep = self.representative(f)
                    coefficient = 1 if rep == f else weight.sign * x.orientation_sign(rep)
                    rows[r][self._index[rep]] += (-1) ** i * coefficient
            mats.append(IntegerMatrix.from_rows(rows, self.count(k)))
        return CochainComplex.free(0, mats, [self.count(k) for k in range(dim + 1)])


def quotient(x: RealComplex) -> QuotientComplex:
    return QuotientComplex(x)


def pullback_matrix(x: RealComplex, k: int) -> IntegerMatrix:
    """T on C^k: (Tφ)(s) = ε(s)·φ(τ s)."""
    cplx = x.complex
    rows = [[0] * cplx.count(k) for _ in range(cplx.count(k))]
    for r, s in enumerate(cplx.simplices_of_dim(k)):
        rows[r][cplx.index(x.apply(s))] = x.orientation_sign(s)
    return IntegerMatrix.from_rows(rows, cplx.count(k))


def cochain_gcomplex(x: RealComplex, weight: LocalWeight = LocalWeight(0)) -> GComplex:
    """C^*(X; Z(i)) with σ = (−1)^i·T."""
    cplx = x.complex
    terms = []
    for k in range(cplx.dimension + 1):
        p = Presentation.free(cplx.count(k))
        terms.append(InvolutiveModule(p, GroupMap(p, p, pullback_matrix(x, k).scaled(weight.sign), check=False)))
    return GComplex(0, terms, cplx.cochain_complex().differentials)


def invariant_cochain_complex(x: RealComplex, weight: LocalWeight) -> CochainComplex:
    return invariant_subcomplex(cochain_gcomplex(x, weight))


def twisted_cohomology(x: RealComplex, weight: LocalWeight, p: int, route: str = "quotient") -> FGAbelianGroup:
    """
    H^p(X/G; Z(i)) for a free involution.

    ``route`` selects the orbit-cell complex ("quotient") or the invariant
    cochains ker(T − (−1)^i) ("invariant").
    """
    if fixed_subcomplex(x).simplices:
        raise NotFreeAction("twisted cohomology needs X^G = ∅")
    if route == "invariant":
        return cohomology(invariant_cochain_complex(x, weight), p)
    if route == "quotient":
        return cohomology(quotient(x).cochain_complex(weight), p)
    raise ValueError(f"unknown route {route!r}")


def cohomology_module(x: RealComplex, q: int, weight: LocalWeight = LocalWeight(0)) -> InvolutiveModule:
    """H^q(X; Z) with the involution induced by (−1)^i·T."""
    gc = cochain_gcomplex(x, weight)
    sq = subquotient(gc.differential(q - 1), gc.differential(q))
    sigma = induced_map(gc.term(q).sigma, sq, sq)
    return InvolutiveModule(sq.presentation, sigma)


# ---------------------------------------------------------------------------
# KR coefficient system and Bredon cochains
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KRCoefficientSystem:
    """KU^* on free orbits, KO^* on fixed orbits, complexification between them.

    ``ko`` lists KO^{−k}(pt) for k = 0..7 and ``ku`` lists KU^{−k}(pt) for k = 0, 1.
    """

    ko: tuple
    ku: tuple

    def __post_init__(self):
        if len(self.ko) != 8 or len(self.ku) != 2:
            raise ValueError("KO needs period 8 and KU period 2")

    @classmethod
    def standard(cls) -> "KRCoefficientSystem":
        from .krtables import ko_point, ku_point

        return cls(tuple(ko_point(-k) for k in range(8)), tuple(ku_point(-k) for k in range(2)))

    def fixed_value(self, q: int) -> Presentation:
        return Presentation.of(self.ko[(-q) % 8])

    def free_value(self, q: int) -> Presentation:
        return Presentation.of(self.ku[(-q) % 2])

    def involution(self, q: int) -> IntegerMatrix:
        """ψ on KU^q: (−1)^k on KU^{−2k}."""
        n = self.free_value(q).generators
        return IntegerMatrix.scalar(n, -1 if (q // 2) % 2 else 1)

    def complexification(self, q: int) -> IntegerMatrix:
        """c: KO^q → KU^q (identity on KO^{8k}, ×2 on KO^{8k+4}, zero on torsion)."""
        src, dst = self.fixed_value(q), self.free_value(q)
        m = [[0] * src.generators for _ in range(dst.generators)]
        if src.generators and dst.generators and self.ko[(-q) % 8].free_rank:
            m[0][0] = 1 if q % 8 == 0 else 2
        return IntegerMatrix.from_rows(m, src.generators)


def bredon_cochain_complex(x: RealComplex, system: KRCoefficientSystem, q: int) -> CochainComplex:
    """C_G^*(X; KR^q) on orbit cells."""
    quo = quotient(x)
    dim = x.dimension
    if dim < 0:
        return CochainComplex(0, [], [])

    def value(s):
        return system.fixed_value(q) if x.is_fixed(s) else system.free_value(q)

    terms = []
    for k in range(dim + 1):
        terms.append(direct_sum_presentations([value(s) for s in quo.cells[k]]))
    diffs = []
    for k in range(dim):
        entries = {}
        for r, s in enumerate(quo.cells[k + 1]):
            for i, f in _faces(s):
                rep = quo.representative(f)
                c = quo._index[rep]
                if x.is_fixed(s):
                    m = IntegerMatrix.identity(system.fixed_value(q).generators)
                elif x.is_fixed(rep):
                    m = system.complexification(q)
                elif rep == f:
                    m = IntegerMatrix.identity(system.free_value(q).generators)
                else:
                    m = system.involution(q).scaled(x.orientation_sign(rep))
                m = m.scaled((-1) ** i)
                entries[(r, c)] = entries[(r, c)] + m if (r, c) in entries else m
        mat = block_matrix(
            [value(s).generators for s in quo.cells[k + 1]],
            [value(s).generators for s in quo.cells[k]],
            entries,
        )
        diffs.append(GroupMap(terms[k], terms[k + 1], mat))
    return CochainComplex(0, terms, diffs)


# ---------------------------------------------------------------------------
# Model builders
# ---------------------------------------------------------------------------

def sphere_trivial(d: int) -> RealComplex:
    """Boundary of the (d+1)-simplex with the identity involution."""
    if d < 0:
        raise UnsupportedParams(f"sphere dimension must be nonnegative, got {d}")
    verts = range(d + 2)
    return RealComplex.from_facets(combinations(verts, d + 1), list(verts)).validated()


def sphere_antipodal(d: int) -> RealComplex:
    """Boundary of the (d+1)-dimensional cross-polytope; vertices 2k, 2k+1 antipodal."""
    if d < 0:
        raise UnsupportedParams(f"sphere dimension must be nonnegative, got {d}")
    facets = [[2 * k + e for k, e in enumerate(choice)] for choice in product((0, 1), repeat=d + 1)]
    tau = [v + 1 if v % 2 == 0 else v - 1 for v in range(2 * d + 2)]
    return RealComplex.from_facets(facets, tau).validated()


# Six-vertex projective plane with triangle 012 stellarly subdivided by vertex 6,
# so that 016 and 235 are disjoint.
_PROJECTIVE_PLANE = (
    (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 1, 5), (1, 2, 4), (1, 3, 4),
    (1, 3, 5), (2, 3, 5), (2, 4, 5), (0, 1, 6), (1, 2, 6), (0, 2, 6),
)
_LEFT = (0, 1, 6)
_RIGHT = (2, 3, 5)


def nonorientable_surface(h: int) -> SimplicialComplex:
    """Connected sum of h ≥ 1 projective planes."""
    if h < 1:
        raise UnsupportedParams("need at least one projective plane")
    ids = {}
    for copy in range(h):
        for v in range(7):
            if copy and v in _LEFT:
                ids[(copy, v)] = ids[(copy - 1, _RIGHT[_LEFT.index(v)])]
            else:
                ids[(copy, v)] = len(set(ids.values()))
    facets = []
    for copy in range(h):
        for t in _PROJECTIVE_PLANE:
            if (copy and t == _LEFT) or (copy < h - 1 and t == _RIGHT):
                continue
            facets.append([ids[(copy, v)] for v in t])
    return SimplicialComplex.from_facets(facets)


def _edge_sign(triangle: tuple, edge: tuple) -> int:
    return (-1) ** next(i for i, f in _faces(triangle) if f == edge)


def _star_orientations(surface: SimplicialComplex) -> dict:
    """Per vertex v, a coherent orientation sign for each triangle of star(v)."""
    triangles = surface.simplices_of_dim(2)
    by_edge = {}
    for t in triangles:
        for _, e in _faces(t):
            by_edge.setdefault(e, []).append(t)
    out = {}
    for v in surface.vertices:
        star = [t for t in triangles if v in t]
        signs = {star[0]: 1}
        queue = deque([star[0]])
        while queue:
            t = queue.popleft()
            for _, e in _faces(t):
                if v not in e:
                    continue
                for u in by_edge[e]:
                    if u != t and u not in signs:
                        signs[u] = -signs[t] * _edge_sign(t, e) * _edge_sign(u, e)
                        queue.append(u)
        out[v] = signs
    return out


def orientation_double_cover(surface: SimplicialComplex) -> RealComplex:
    """Lift (v, ±) has index 2v or 2v+1; the deck involution swaps them."""
    stars = _star_orientations(surface)
    index = {v: k for k, v in enumerate(surface.vertices)}
    facets = []
    for t in surface.simplices_of_dim(2):
        for theta in (1, -1):
            facets.append([2 * index[v] + (0 if theta * stars[v][t] == 1 else 1) for v in t])
    tau = [w + 1 if w % 2 == 0 else w - 1 for w in range(2 * len(index))]
    return RealComplex.from_facets(facets, tau)


def surface_free(g: int) -> RealComplex:
    """Genus-g surface with a free orientation-reversing involution (quotient χ = 1 − g)."""
    if g < 0:
        raise UnsupportedParams(f"genus must be nonnegative, got {g}")
    return orientation_double_cover(nonorientable_surface(g + 1)).validated()


def _grid_disk_with_holes(g: int) -> tuple:
    """Triangulated 5-row strip of squares with g square holes; returns (triangles, boundary vertex set)."""
    rows, cols = 5, max(3 * g + 2, 2)
    holes = {(2, 3 * k + 2) for k in range(g)}

    def vid(r, c):
        return r * (cols + 1) + c

    boundary = set()
    for r in range(rows + 1):
        for c in range(cols + 1):
            if r in (0, rows) or c in (0, cols):
                boundary.add(vid(r, c))
    for r, c in holes:
        boundary.update({vid(r, c), vid(r, c + 1), vid(r + 1, c), vid(r + 1, c + 1)})
    triangles = []
    for r in range(rows):
        for c in range(cols):
            if (r, c) in holes:
                continue
            tl, tr, bl, br = vid(r, c), vid(r, c + 1), vid(r + 1, c), vid(r + 1, c + 1)
            if tl not in boundary or br not in boundary:
                triangles += [(tl, br, tr), (tl, br, bl)]
            else:
                triangles += [(tr, bl, tl), (tr, bl, br)]
    return triangles, boundary


def surface_reflection(g: int) -> RealComplex:
    """Double of a planar surface with g + 1 boundary circles; the fixed set is the boundary."""
    if g < 0:
        raise UnsupportedParams(f"genus must be nonnegative, got {g}")
    triangles, boundary = _grid_disk_with_holes(g)
    used = sorted({v for t in triangles for v in t})
    ids = {}
    for v in used:
        ids[(v, 0)] = len(ids)
        if v not in boundary:
            ids[(v, 1)] = len(ids)
    tau = [0] * len(ids)
    for (v, side), k in ids.items():
        tau[k] = k if v in boundary else ids[(v, 1 - side)]
    facets = []
    for t in triangles:
        for side in (0, 1):
            facets.append([ids[(v, side)] if v not in boundary else ids[(v, 0)] for v in t])
    return RealComplex.from_facets(facets, tau).validated()


def graph_model(lam: int) -> RealComplex:
    """
    One-dimensional G-complexes for affine curves with ``lam`` real components.

    lam = 0 is a free 4-cycle; otherwise a fixed hub h is joined to each of
    lam fixed triangles by a circle h–u–c–τu–h reflected by the involution.
    """
    if lam < 0:
        raise UnsupportedParams(f"number of real components must be nonnegative, got {lam}")
    if lam == 0:
        return RealComplex.from_facets([(0, 1), (1, 2), (2, 3), (0, 3)], [2, 3, 0, 1]).validated()
    hub = 0
    edges, tau = [], [0]
    for _ in range(lam):
        u, u_bar, c0, c1, c2 = range(len(tau), len(tau) + 5)
        tau += [u_bar, u, c0, c1, c2]
        edges += [(hub, u), (u, c0), (hub, u_bar), (u_bar, c0), (c0, c1), (c1, c2), (c0, c2)]
    return RealComplex.from_facets(edges, tau).validated()


MODEL_BUILDERS = {
    "sphere_trivial": ("d", sphere_trivial),
    "sphere_antipodal": ("d", sphere_antipodal),
    "surface_free": ("g", surface_free),
    "surface_reflection": ("g", surface_reflection),
    "graph_model": ("lam", graph_model),
}


def build_model(kind: str, params: dict) -> RealComplex:
    if kind not in MODEL_BUILDERS:
        raise UnsupportedParams(f"unknown model {kind!r}; choose from {sorted(MODEL_BUILDERS)}")
    name, builder = MODEL_BUILDERS[kind]
    if name not in params:
        raise UnsupportedParams(f"model {kind} needs parameter {name!r}")
    try:
        value = int(params[name])
    except (TypeError, ValueError):
        raise UnsupportedParams(f"parameter {name!r} must be an integer")
    x = builder(value)
    logger.debug("built %s(%s=%d): %d vertices, dimension %d", kind, name, value, x.vertex_count, x.dimension)
    return x


# ---------------------------------------------------------------------------
# The retraction of V(C) onto the real sphere
# ---------------------------------------------------------------------------

def sphere_retraction(z, t: float) -> np.ndarray:
    """
    h_t(z) = (a + i·t·b) / R(t) with z = a + i·b and R(t)² = Σa² − t²Σb².

    Raises:
        NotOnVariety: Σ z_j² differs from 1.
        DegenerateRadius: R(t)² ≤ 0.
    """
    z = np.asarray(z, dtype=complex)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    if abs(np.sum(z * z) - 1.0) > INPUT_TOLERANCE:
        raise NotOnVariety(f"sum of squares is {np.sum(z * z)}, expected 1")
    a, b = z.real, z.imag
    radius_sq = float(np.sum(a * a) - t * t * np.sum(b * b))
    if radius_sq <= 0.0:
        raise DegenerateRadius(f"R(t)^2 = {radius_sq} at t = {t}")
    return (a + 1j * t * b) / np.sqrt(radius_sq)


def sample_variety_point(rng, d: int, spread: float = 2.0) -> np.ndarray:
    """Random z ∈ C^{d+1} with Σ z_j² = 1."""
    b = rng.normal(scale=spread, size=d + 1)
    u = rng.normal(size=d + 1)
    norm_b = float(np.dot(b, b))
    if norm_b > 0:
        u = u - (np.dot(u, b) / norm_b) * b
    if np.linalg.norm(u) == 0:
        u = np.zeros(d + 1)
        u[0] = 1.0
    a = u / np.linalg.norm(u) * np.sqrt(1.0 + norm_b)
    return a + 1j * b
