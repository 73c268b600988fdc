"""Tests for involutive modules, group cohomology and truncation."""

import pytest
import sys
from pathlib import Path

# Add parent to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from lib.errors import EquivarianceError, InvalidInvolution, InvariantViolation
from lib.gmod import (
    GComplex,
    InvolutiveModule,
    group_cohomology,
    hypercohomology,
    invariant_cohomology,
    lemma54_check,
    random_gcomplex,
    resolution_double_complex,
    truncate,
)
from lib.znf import FGAbelianGroup, IntegerMatrix, Presentation

Z = FGAbelianGroup.free(1)
Z2 = FGAbelianGroup.cyclic(2)
ZERO = FGAbelianGroup.trivial()


def times_two(module=None) -> GComplex:
    m = module or InvolutiveModule.trivial()
    return GComplex.from_matrices(0, [m, m], [IntegerMatrix.scalar(m.generators, 2)])


class TestInvolutiveModule:
    """Tests for InvolutiveModule construction."""

    def test_sigma_squared_checked(self):
        with pytest.raises(InvalidInvolution):
            InvolutiveModule.from_matrix(Presentation.free(1), IntegerMatrix.from_rows([[2]]))

    def test_sigma_checked_modulo_relations(self):
        # x ↦ 3x on Z/4 squares to 9x = x
        m = InvolutiveModule.from_matrix(Presentation.cyclic(4), IntegerMatrix.from_rows([[3]]))
        assert m.group == FGAbelianGroup.cyclic(4)

    def test_regular(self):
        m = InvolutiveModule.regular()
        assert m.generators == 2
        assert m.group == Z.power(2)

    def test_of_group(self):
        m = InvolutiveModule.of_group(FGAbelianGroup.from_invariants([0, 4]), sign=-1)
        assert m.group == FGAbelianGroup.from_invariants([0, 4])
        assert group_cohomology(m, 0) == Z2

    def test_direct_sum(self):
        m = InvolutiveModule.trivial().direct_sum(InvolutiveModule.sign(), InvolutiveModule.cyclic(4, inversion=True))
        assert m.group == FGAbelianGroup.from_invariants([0, 0, 4])


class TestGroupCohomology:
    """Tests for group_cohomology of Z/2."""

    def test_trivial_z(self):
        m = InvolutiveModule.trivial()
        assert [group_cohomology(m, p) for p in range(3)] == [Z, ZERO, Z2]

    def test_sign_z(self):
        m = InvolutiveModule.sign()
        assert [group_cohomology(m, p) for p in range(3)] == [ZERO, Z2, ZERO]

    def test_regular_is_acyclic(self):
        m = InvolutiveModule.regular()
        assert group_cohomology(m, 0) == Z
        for p in range(1, 5):
            assert group_cohomology(m, p).is_trivial()

    @pytest.mark.parametrize("m", [2, 4, 8, 16])
    def test_cyclic_with_inversion(self, m):
        assert group_cohomology(InvolutiveModule.cyclic(m, inversion=True), 2) == Z2

    def test_uniquely_two_divisible(self):
        m = InvolutiveModule.cyclic(3)
        for p in range(1, 5):
            assert group_cohomology(m, p).is_trivial()

    def test_two_periodic(self):
        for m in (InvolutiveModule.trivial(), InvolutiveModule.sign(2), InvolutiveModule.cyclic(4, True)):
            assert group_cohomology(m, 3) == group_cohomology(m, 1)
            assert group_cohomology(m, 4) == group_cohomology(m, 2)

    def test_negative_degree_rejected(self):
        with pytest.raises(ValueError):
            group_cohomology(InvolutiveModule.trivial(), -1)


class TestGComplex:
    """Tests for GComplex validation."""

    def test_equivariance_checked(self):
        with pytest.raises(EquivarianceError) as exc:
            GComplex.from_matrices(3, [InvolutiveModule.trivial(), InvolutiveModule.sign()],
                                   [IntegerMatrix.from_rows([[1]])])
        assert exc.value.degree == 3

    def test_width(self):
        c = times_two()
        assert c.top_degree == 1
        assert c.term(5).generators == 0


class TestHypercohomology:
    """Tests for hypercohomology."""

    def test_concentrated_matches_group_cohomology(self):
        c = GComplex.concentrated(InvolutiveModule.trivial())
        assert hypercohomology(c, 2) == Z2
        shifted = GComplex.concentrated(InvolutiveModule.trivial(), degree=1)
        for n in range(1, 5):
            assert hypercohomology(shifted, n) == group_cohomology(InvolutiveModule.trivial(), n - 1)

    def test_times_two(self):
        c = times_two()
        assert hypercohomology(c, 0) == ZERO
        assert hypercohomology(c, 1) == Z2
        assert hypercohomology(c, 2) == Z2

    def test_empty(self):
        assert hypercohomology(GComplex.empty(), 0) == ZERO

    def test_uniquely_two_divisible_matches_invariants(self):
        c = GComplex.concentrated(InvolutiveModule.cyclic(3))
        for n in range(3):
            assert hypercohomology(c, n) == invariant_cohomology(c, n)

    def test_double_complex_needs_free_terms(self):
        with pytest.raises(ValueError):
            resolution_double_complex(GComplex.concentrated(InvolutiveModule.cyclic(2)), 3)


class TestTruncation:
    """Tests for truncate and lemma54_check."""

    def test_zero_differentials(self):
        m = InvolutiveModule.trivial()
        zero = IntegerMatrix.zeros(1, 1)
        c = GComplex.from_matrices(0, [m, m, m], [zero, zero])
        t = truncate(c, 1)
        assert t.top_degree == 1
        assert t.term(1).group == Z

    def test_injective_differential(self):
        t = truncate(times_two(), 0)
        assert t.top_degree == 0
        assert t.term(0).generators == 0

    def test_above_top_is_identity(self):
        c = times_two()
        assert truncate(c, 3) is c

    def test_below_bottom_is_empty(self):
        assert not truncate(times_two(), -1).terms

    def test_lemma_on_times_two(self):
        assert lemma54_check(times_two(), 0)

    def test_lemma_on_zero_differentials(self):
        m = InvolutiveModule.sign()
        c = GComplex.from_matrices(0, [m, m], [IntegerMatrix.zeros(1, 1)])
        for i in range(-1, 3):
            assert lemma54_check(c, i)

    def test_result_is_checked(self, monkeypatch):
        monkeypatch.setattr("lib.gmod.preimage_lattice", lambda f: IntegerMatrix.identity(f.source.generators))
        with pytest.raises(InvariantViolation):
            truncate(times_two(), 0)

    def test_lemma_on_norm_chain(self):
        g = InvolutiveModule.regular()
        difference = IntegerMatrix.from_rows([[1, -1], [-1, 1]])
        norm = IntegerMatrix.from_rows([[1, 1], [1, 1]])
        c = GComplex.from_matrices(0, [g, g, g, g], [difference, norm, difference])
        for i in range(-1, 4):
            assert lemma54_check(c, i)

    def test_lemma_on_torsion_chain(self):
        terms = [InvolutiveModule.sign(), InvolutiveModule.cyclic(4, inversion=True), InvolutiveModule.cyclic(2)]
        c = GComplex.from_matrices(0, terms, [IntegerMatrix.from_rows([[2]]), IntegerMatrix.from_rows([[1]])])
        assert truncate(c, 1).term(1).group == Z2
        for i in range(-1, 3):
            assert lemma54_check(c, i)

    def test_random_complexes_have_composable_maps(self, rng):
        found = 0
        for _ in range(40):
            c = random_gcomplex(rng)
            pairs = zip(c.differentials, c.differentials[1:])
            found += any(not a.is_zero() and not b.is_zero() for a, b in pairs)
        assert found > 0

    def test_random_complexes(self, rng):
        for _ in range(10):
            c = random_gcomplex(rng)
            assert len(c.terms) <= 4
            assert all(t.generators <= 3 for t in c.terms)
            for i in range(c.lowest_degree - 1, c.top_degree + 1):
                assert lemma54_check(c, i)

    @pytest.mark.slow
    def test_two_hundred_random_complexes(self, rng):
        for _ in range(200):
            c = random_gcomplex(rng)
            for i in range(c.lowest_degree - 1, c.top_degree + 1):
                assert lemma54_check(c, i)
