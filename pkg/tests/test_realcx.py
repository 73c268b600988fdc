"""Tests for real simplicial complexes, twisted cohomology and the sphere retraction."""

import numpy as np
import pytest
import sys
from pathlib import Path

# Add parent to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from lib.chain import cohomology
from lib.errors import InvalidRealComplex, NotFreeAction, NotOnVariety, UnsupportedParams
from lib.gmod import group_cohomology
from lib.realcx import (
    KRCoefficientSystem,
    LocalWeight,
    RealComplex,
    SimplicialComplex,
    barycentric_subdivide,
    bredon_cochain_complex,
    build_model,
    cohomology_module,
    find_violation,
    fixed_subcomplex,
    graph_model,
    quotient,
    sample_variety_point,
    sphere_antipodal,
    sphere_retraction,
    sphere_trivial,
    surface_free,
    surface_reflection,
    twisted_cohomology,
    validate,
)
from lib.znf import FGAbelianGroup

Z = FGAbelianGroup.free(1)
Z2 = FGAbelianGroup.cyclic(2)
ZERO = FGAbelianGroup.trivial()


class TestRealComplex:
    """Tests for RealComplex validation and serialisation."""

    def test_swapped_edge_is_invalid(self):
        x = RealComplex.from_facets([(0, 1)], [1, 0])
        assert not validate(x)
        simplex, reason = find_violation(x)
        assert simplex == (0, 1)
        assert "fixed" in reason
        with pytest.raises(InvalidRealComplex):
            x.validated()

    def test_tau_must_be_involution(self):
        x = RealComplex.from_facets([(0, 1), (1, 2)], [1, 2, 0])
        assert not validate(x)

    def test_image_must_be_simplex(self):
        x = RealComplex.from_facets([(0, 1), (2, 3)], [0, 2, 1, 3])
        assert not validate(x)

    def test_json(self):
        x = sphere_antipodal(1)
        data = x.to_json()
        assert data["vertices"] == 4
        assert len(data["simplices"]) == 4
        assert RealComplex.from_json(data) == x

    @pytest.mark.parametrize("data", [
        {"simplices": [[0, 1]]},
        {"vertices": 2, "simplices": [[0, 1]], "tau": [0]},
        {"vertices": 2, "simplices": [[0, 5]]},
    ])
    def test_malformed_json(self, data):
        with pytest.raises(InvalidRealComplex):
            RealComplex.from_json(data)

    def test_local_weight_parity(self):
        assert LocalWeight(3).i == 1
        assert LocalWeight(3).sign == -1
        assert LocalWeight(-2).is_even


class TestBuilders:
    """Tests for the model builders."""

    @pytest.mark.parametrize("d", [0, 1, 2, 3])
    def test_spheres(self, d):
        chi = 1 + (-1) ** d
        assert sphere_trivial(d).complex.euler_characteristic() == chi
        x = sphere_antipodal(d)
        assert x.complex.euler_characteristic() == chi
        assert not fixed_subcomplex(x).simplices
        assert quotient(x).euler_characteristic() * 2 == chi

    def test_octahedron_subdivision(self):
        x = barycentric_subdivide(sphere_antipodal(2))
        assert len(x.complex.simplices_of_dim(2)) == 48
        assert validate(x)
        assert x.complex.euler_characteristic() == 2

    def test_subdivision_keeps_fixed_points(self):
        x = barycentric_subdivide(sphere_trivial(1))
        assert validate(x)
        assert fixed_subcomplex(x) == x.complex

    @pytest.mark.parametrize("g", [0, 1, 2])
    def test_surface_free(self, g):
        x = surface_free(g)
        assert x.complex.euler_characteristic() == 2 - 2 * g
        q = quotient(x)
        assert q.euler_characteristic() == 1 - g
        assert not q.is_orientable_surface()

    @pytest.mark.parametrize("g", [0, 1, 2])
    def test_surface_reflection(self, g):
        x = surface_reflection(g)
        assert x.complex.euler_characteristic() == 2 - 2 * g
        fixed = fixed_subcomplex(x)
        assert cohomology(fixed.cochain_complex(), 0) == Z.power(g + 1)
        assert cohomology(fixed.cochain_complex(), 1) == Z.power(g + 1)

    @pytest.mark.parametrize("lam", [0, 1, 3])
    def test_graph_model(self, lam):
        x = graph_model(lam)
        assert x.dimension == 1
        fixed = fixed_subcomplex(x)
        assert bool(fixed.simplices) == bool(lam)

    def test_build_model(self):
        assert build_model("sphere_antipodal", {"d": 2}) == sphere_antipodal(2)
        with pytest.raises(UnsupportedParams):
            build_model("torus", {"g": 1})
        with pytest.raises(UnsupportedParams):
            build_model("surface_free", {})
        with pytest.raises(UnsupportedParams):
            build_model("surface_free", {"g": "two"})
        with pytest.raises(UnsupportedParams):
            surface_free(-1)

    def test_orientability_needs_a_surface(self):
        with pytest.raises(ValueError):
            quotient(sphere_antipodal(1)).is_orientable_surface()


class TestTwistedCohomology:
    """Tests for twisted_cohomology and cohomology_module."""

    def test_projective_plane(self):
        x = sphere_antipodal(2)
        assert [twisted_cohomology(x, LocalWeight(0), p) for p in range(3)] == [Z, ZERO, Z2]
        assert [twisted_cohomology(x, LocalWeight(1), p) for p in range(3)] == [ZERO, Z2, Z]

    def test_circle_quotient(self):
        x = sphere_antipodal(1)
        assert [twisted_cohomology(x, LocalWeight(0), p) for p in range(2)] == [Z, Z]
        assert [twisted_cohomology(x, LocalWeight(1), p) for p in range(2)] == [ZERO, Z2]

    def test_klein_bottle(self):
        x = surface_free(1)
        assert [twisted_cohomology(x, LocalWeight(0), p) for p in range(3)] == [Z, Z, Z2]

    def test_klein_bottle_twisted(self):
        x = surface_free(1)
        assert [twisted_cohomology(x, LocalWeight(1), p) for p in range(3)] == [ZERO, Z + Z2, Z]

    @pytest.mark.parametrize("builder,arg", [
        (sphere_antipodal, 1), (sphere_antipodal, 2), (surface_free, 0), (graph_model, 0),
    ])
    def test_routes_agree(self, builder, arg):
        x = builder(arg)
        for i in (0, 1):
            for p in range(x.dimension + 1):
                assert twisted_cohomology(x, LocalWeight(i), p, route="invariant") == \
                    twisted_cohomology(x, LocalWeight(i), p, route="quotient")

    def test_needs_free_action(self):
        with pytest.raises(NotFreeAction):
            twisted_cohomology(surface_reflection(0), LocalWeight(0), 0)

    def test_unknown_route(self):
        with pytest.raises(ValueError):
            twisted_cohomology(sphere_antipodal(1), LocalWeight(0), 0, route="bredon")

    def test_antipodal_action_on_top_class(self):
        x = sphere_antipodal(2)
        assert cohomology_module(x, 0).minus_one().is_zero()
        top = cohomology_module(x, 2)
        assert top.group == Z
        assert top.plus_one().is_zero()

    def test_torus_first_cohomology_module(self):
        # the Klein-bottle deck involution acts on H^1 of the torus as diag(1, −1)
        h1 = cohomology_module(surface_free(1), 1)
        assert h1.group == Z.power(2)
        assert [group_cohomology(h1, p) for p in range(4)] == [Z, Z2, Z2, Z2]


class TestBredonComplex:
    """Tests for Bredon cochains with KR coefficients."""

    def test_trivial_sphere_is_ko_cohomology(self):
        system = KRCoefficientSystem.standard()
        x = sphere_trivial(2)
        assert cohomology(bredon_cochain_complex(x, system, 0), 2) == Z
        assert cohomology(bredon_cochain_complex(x, system, -1), 2) == Z2
        assert cohomology(bredon_cochain_complex(x, system, -3), 0) == ZERO

    def test_free_circle(self):
        system = KRCoefficientSystem.standard()
        c = bredon_cochain_complex(sphere_antipodal(1), system, 0)
        assert cohomology(c, 0) == Z
        assert cohomology(c, 1) == Z

    def test_period_lengths_checked(self):
        with pytest.raises(ValueError):
            KRCoefficientSystem((Z,) * 4, (Z, ZERO))


class TestSphereRetraction:
    """Tests for sphere_retraction."""

    def test_endpoints(self, rng):
        z = sample_variety_point(rng, 2)
        assert np.allclose(sphere_retraction(z, 1.0), z, atol=1e-9)
        real = sphere_retraction(z, 0.0)
        assert np.allclose(real.imag, 0.0)
        assert abs(np.linalg.norm(real.real) - 1.0) < 1e-9

    def test_stays_on_variety(self, rng):
        for _ in range(50):
            z = sample_variety_point(rng, 3)
            assert abs(np.sum(z * z) - 1.0) < 1e-9
            for t in np.linspace(0.0, 1.0, 11):
                w = sphere_retraction(z, float(t))
                assert abs(np.sum(w * w) - 1.0) < 1e-9

    def test_real_points_are_fixed(self):
        z = np.array([0.6, 0.8, 0.0])
        for t in (0.0, 0.5, 1.0):
            assert np.allclose(sphere_retraction(z, t), z)

    def test_off_variety(self):
        with pytest.raises(NotOnVariety):
            sphere_retraction([2.0, 0.0], 0.5)

    def test_tolerance_is_absolute(self):
        # Σ z² = 1 + 5e-11 on a point of norm² ≈ 201
        z = np.array([np.sqrt(101.0 + 5e-11), 10.0j])
        with pytest.raises(NotOnVariety):
            sphere_retraction(z, 0.5)

    def test_parameter_range(self):
        with pytest.raises(ValueError):
            sphere_retraction([1.0, 0.0], 1.5)

    def test_simplicial_complex_from_facets_closes_faces(self):
        k = SimplicialComplex.from_facets([(0, 1, 2)])
        assert k.count(0) == 3 and k.count(1) == 3 and k.count(2) == 1
