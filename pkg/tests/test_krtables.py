"""Tests for coefficient tables, closed forms and the exact-sequence calculator."""

import pytest
import sys
from pathlib import Path

# Add parent to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from lib.chain import GradedPieces
from lib.errors import HarnackViolation, NotTabulated, UnsupportedParams
from lib.krtables import (
    GradedGroupTable,
    bott_boundary,
    brauer_severi_check,
    curve_affine_kr,
    curve_projective_kr,
    forced_sum,
    graded_order,
    ko_point,
    ko_table,
    ku_table,
    ku_point,
    mod_m_table,
    mv_gamma,
    mv_surface_kr,
    periodicity_check,
    simplicial_kr,
    sphere_ko,
    sphere_ko_mod,
)
from lib.realcx import sphere_trivial
from lib.znf import FGAbelianGroup

Z = FGAbelianGroup.free(1)
Z2 = FGAbelianGroup.cyclic(2)
ZERO = FGAbelianGroup.trivial()


class TestPointTables:
    """Tests for KO and KU of a point."""

    def test_ko_cycle(self):
        assert [ko_point(-k) for k in range(8)] == [Z, Z2, Z2, ZERO, Z, ZERO, ZERO, ZERO]
        assert ko_point(8) == Z
        assert ko_point(-9) == Z2

    def test_ku(self):
        assert ku_point(-2) == Z
        assert ku_point(3) == ZERO
        assert ku_table()[-5] == ZERO
        assert ku_table()[6] == Z

    def test_periodic_lookup(self):
        table = ko_table()
        assert table[-10] == Z2
        assert table[4] == Z
        assert table.has(100)

    def test_missing_period_degrees(self):
        with pytest.raises(ValueError):
            GradedGroupTable({0: Z, -1: ZERO}, 4)

    def test_json(self):
        table = curve_projective_kr(2, 0)
        data = table.to_json()
        assert data["period"] == 4
        assert data["values"]["-1"] == {"rank": 2, "torsion": [2]}
        assert GradedGroupTable.from_json(data) == table


class TestModM:
    """Tests for KO with Z/m coefficients."""

    def test_ko_mod_two(self):
        rows = mod_m_table(ko_table(), 2).rows
        assert rows[0] == GradedPieces(Z2, ZERO)
        assert rows[-2] == GradedPieces(Z2, Z2)
        assert rows[-3] == GradedPieces(ZERO, Z2)

    def test_modulus_checked(self):
        with pytest.raises(UnsupportedParams):
            mod_m_table(ko_table(), 1)

    def test_untabulated_degrees_skipped(self):
        table = mod_m_table(curve_affine_kr(1), 4)
        assert table.rows == {}

    def test_sphere_mod(self):
        # KO^0(S^1) = Z + Z/2 and KO^1(S^1) = KO^{-7}(S^1) = Z
        assert sphere_ko_mod(1, 0, 8) == GradedPieces(FGAbelianGroup.from_invariants([2, 8]), ZERO)
        assert sphere_ko_mod(0, 2, 2).order() == 16


class TestClosedForms:
    """Tests for the curve and sphere calculators."""

    def test_curve_without_real_points(self):
        table = curve_projective_kr(1, 0)
        assert [table[n] for n in (0, -1, -2, -3)] == [Z.power(2), Z + Z2, Z2, Z]
        assert table[-4] == Z.power(2)
        assert table.period == 4

    def test_m_curve(self):
        table = curve_projective_kr(2, 3)
        assert table[0] == Z.power(2) + Z2.power(2)
        assert table[-1] == Z.power(2) + Z2.power(4)
        with pytest.raises(NotTabulated):
            table[-2]

    def test_harnack_bound(self):
        with pytest.raises(HarnackViolation):
            curve_projective_kr(0, 5)
        with pytest.raises(UnsupportedParams):
            curve_projective_kr(-1, 0)

    def test_affine(self):
        table = curve_affine_kr(3)
        assert table[0] == Z + Z2.power(3)
        assert table[-6] == ZERO
        with pytest.raises(NotTabulated):
            table[-1]

    @pytest.mark.parametrize("d,n,expected", [
        (1, 0, Z + Z2),
        (2, 0, Z + Z2),
        (3, 0, Z),
        (4, 0, Z.power(2)),
        (8, 1, Z2.power(2)),
    ])
    def test_sphere_ko(self, d, n, expected):
        assert sphere_ko(d, n) == expected

    def test_sphere_dimension_checked(self):
        with pytest.raises(UnsupportedParams):
            sphere_ko(-1, 0)


class TestHelpers:
    """Tests for graded_order, forced_sum and periodicity_check."""

    def test_graded_order(self):
        assert graded_order([Z, Z2, Z2.power(2)]) == (1, 8)
        assert graded_order([]) == (0, 1)

    def test_forced_sum(self):
        assert forced_sum([Z, Z2]) == Z + Z2
        assert forced_sum([Z2, Z]) is None
        assert forced_sum([]) == ZERO

    def test_periodicity(self):
        assert periodicity_check(curve_projective_kr(3, 0))
        assert not periodicity_check(ko_table())
        assert periodicity_check(ko_table(), period=8)


class TestExactSequences:
    """Tests for the Bott boundary and the Mayer–Vietoris window."""

    def test_bott_boundary(self):
        assert bott_boundary(0).is_zero()
        assert bott_boundary(-1).is_zero()
        assert bott_boundary(-2).cokernel() == Z2
        assert bott_boundary(-4).is_surjective()
        assert bott_boundary(-6).is_surjective()

    def test_gamma_shape(self):
        gamma = mv_gamma(2, -2)
        assert gamma.source.generators == 1
        assert gamma.target.generators == 6

    @pytest.mark.parametrize("g", [0, 1, 2])
    def test_m_curves_match_closed_form(self, g):
        closed = curve_projective_kr(g, g + 1)
        pieces = mv_surface_kr(g, [0, -1])
        for n in (0, -1):
            assert graded_order(pieces[n].nonzero()) == graded_order([closed[n]])

    def test_sphere_window(self):
        pieces = mv_surface_kr(0, [0, -1])
        assert pieces[0].total() == Z.power(2)
        assert pieces[-1].total() == Z2.power(2)

    def test_torus_window(self):
        pieces = mv_surface_kr(1, [-1])
        assert pieces[-1].total() == Z + Z2.power(3)

    def test_genus_checked(self):
        with pytest.raises(UnsupportedParams):
            mv_surface_kr(-1, [0])


class TestSimplicial:
    """Tests for KR from the Bredon spectral sequence."""

    def test_two_points(self):
        table = simplicial_kr(sphere_trivial(0))
        assert table.period == 8
        assert table[0] == Z.power(2)
        assert table[-1] == Z2.power(2)
        assert table[-4] == Z.power(2)

    def test_selected_degrees_are_normalised(self):
        table = simplicial_kr(sphere_trivial(0), [8, -9])
        assert table.period is None
        assert sorted(table.values) == [-1, 0]

    def test_brauer_severi(self):
        report = brauer_severi_check(8)
        assert report["ok"]
        assert [row["degree"] for row in report["rows"]] == [0, -1, -2, -3]
        assert report["skipped"] == [row["degree"] for row in report["rows"] if "mod_m" not in row]

    def test_brauer_severi_reports_unforced_degrees(self, monkeypatch):
        import lib.krtables as krtables

        full = krtables.simplicial_kr

        def without_degree_minus_one(x, degrees=None, system=None):
            table = full(x, degrees, system)
            values = {n: g for n, g in table.values.items() if n != -1}
            return GradedGroupTable(values, None, table.pieces)

        monkeypatch.setattr(krtables, "simplicial_kr", without_degree_minus_one)
        report = brauer_severi_check(8)
        assert report["ok"]
        assert {-1, -2} <= set(report["skipped"])
        assert report["skipped"] == [row["degree"] for row in report["rows"] if "mod_m" not in row]
