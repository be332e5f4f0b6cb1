import math

import numpy as np
import pytest

from helmgrid_core.analysis.dispersion import (DispersionQuery, coarse_query, delta_and_R, dispersion_table,
                                               find_zero_curve, fold_intersections, identify_wave_vector,
                                               max_dispersion_error, radial_ratios, smallest_eigenvalue)
from helmgrid_core.analysis.lfa2d import build_patch, helmholtz_view
from helmgrid_core.discretization.mesh import ElementKind
from helmgrid_core.discretization.qsfem import zero_set_distance
from helmgrid_core.errors import SymbolError

FEW_DIRECTIONS = 19


class TestQueries:

    def test_wavenumber_from_ppw(self):
        assert DispersionQuery(scheme="fe", order=4, ppw=8.0).k == pytest.approx(math.pi)
        assert DispersionQuery(scheme="qsfem", ppw=8.0).k == pytest.approx(math.pi / 4)
        assert DispersionQuery(scheme="qsfem").label == "opt"
        assert DispersionQuery(order=6).label == "gal-6"

    def test_nyquist_limit(self):
        with pytest.raises(ValueError):
            DispersionQuery(ppw=2.0)

    def test_coarse_queries(self):
        fine = DispersionQuery(order=4, ppw=10.0)
        optimized = coarse_query(fine, "optimized_fd")
        assert optimized.scheme == "qsfem"
        assert optimized.ppw == 5.0
        galerkin = coarse_query(fine, "galerkin_p")
        assert (galerkin.scheme, galerkin.order, galerkin.ppw) == ("fe", 2, 5.0)
        with pytest.raises(SymbolError):
            coarse_query(DispersionQuery(scheme="qsfem"), "optimized_fd")


class TestWaveVectors:

    def test_small_theta_needs_no_folding(self):
        query = DispersionQuery(order=2, ppw=20.0)
        xi, alpha, error = identify_wave_vector((0.3, 0.4), query)
        assert alpha == (0, 0)
        assert xi == pytest.approx((0.3, 0.4))
        assert error == pytest.approx(abs(0.5 / query.k - 1.0))

    def test_folding_picks_shifted_representative(self):
        query = DispersionQuery(order=4, ppw=6.0)
        # k h > pi: the point of the circle on the positive x axis wraps around the torus
        theta = (query.k - 2.0 * math.pi, 0.0)
        xi, alpha, error = identify_wave_vector(theta, query)
        assert alpha == (1, 0)
        assert error == pytest.approx(0.0, abs=1e-12)

    def test_fold_points_only_when_underresolved(self):
        assert len(fold_intersections(DispersionQuery(order=2, ppw=10.0))) == 0
        assert len(fold_intersections(DispersionQuery(order=4, ppw=6.0))) > 0


class TestZeroCurve:

    def test_modes_are_zeros_of_the_symbol(self):
        query = DispersionQuery(order=2, ppw=10.0)
        view = helmholtz_view(build_patch(2), query.k)
        modes, missing = find_zero_curve(query, FEW_DIRECTIONS)
        assert missing == 0
        assert len(modes) >= FEW_DIRECTIONS
        for mode in modes:
            assert abs(smallest_eigenvalue(view.symbol(np.array(mode.theta)))) < 1e-10

    def test_second_order_elements_at_high_resolution(self):
        assert max_dispersion_error(DispersionQuery(order=2, ppw=20.0), FEW_DIRECTIONS) < 1e-2

    def test_square_symmetry(self):
        ratios = radial_ratios(DispersionQuery(order=2, ppw=8.0), FEW_DIRECTIONS)
        assert np.allclose(ratios, ratios[::-1], atol=1e-8)

    def test_scalar_symbol(self):
        assert smallest_eigenvalue(np.array(-2.5 + 0j)) == -2.5

    @pytest.mark.parametrize("ppw", [4.0, 8.0])
    def test_qsfem_matches_stencil_module(self, ppw):
        query = DispersionQuery(scheme="qsfem", ppw=ppw)
        expected = zero_set_distance(query.k, query.h) / query.k
        assert max_dispersion_error(query, 181) == pytest.approx(expected, rel=1e-6)
        assert expected < 1e-3

    def test_qsfem_usable_at_three_points(self):
        assert np.isfinite(max_dispersion_error(DispersionQuery(scheme="qsfem", ppw=3.0), FEW_DIRECTIONS))


class TestCoarseMismatch:

    def test_same_scheme_has_no_mismatch(self):
        query = DispersionQuery(order=2, ppw=8.0)
        delta, R = delta_and_R(query, query, 0.01, FEW_DIRECTIONS)
        assert np.allclose(delta, 0.0)
        assert R == 0.0

    def test_damping_must_be_positive(self):
        query = DispersionQuery(order=2, ppw=8.0)
        with pytest.raises(SymbolError):
            delta_and_R(query, query, 0.0, FEW_DIRECTIONS)

    def test_ratio_scales_with_damping(self):
        fine = DispersionQuery(order=4, ppw=10.0)
        coarse = coarse_query(fine, "galerkin_p")
        _, r_low = delta_and_R(fine, coarse, 0.01, FEW_DIRECTIONS)
        _, r_high = delta_and_R(fine, coarse, 0.02, FEW_DIRECTIONS)
        assert r_low == pytest.approx(2.0 * r_high)
        assert r_low > 0.0


class TestDispersionTable:

    def test_empty_table(self):
        assert dispersion_table([], [], include_qsfem=True) == []
        assert dispersion_table([2], [], include_qsfem=False) == []

    def test_rows(self):
        rows = dispersion_table([2], [10.0], n_directions=FEW_DIRECTIONS)
        assert [row["scheme"] for row in rows] == ["opt", "gal-2"]
        assert rows[0]["max_dispersion_error"] < rows[1]["max_dispersion_error"]


@pytest.mark.slow
class TestDispersionOrdering:

    PPW = [6.0, 8.0, 10.0, 14.0]

    def test_ordering_on_squares(self):
        rows = dispersion_table([2, 4, 6, 8], self.PPW, n_directions=91)
        by_scheme = {}
        for row in rows:
            by_scheme.setdefault(row["scheme"], []).append(row["max_dispersion_error"])
        at_eight = {scheme: errors[self.PPW.index(8.0)] for scheme, errors in by_scheme.items()}
        assert at_eight["opt"] < at_eight["gal-8"] < at_eight["gal-6"] < at_eight["gal-4"] < at_eight["gal-2"]
        for errors in by_scheme.values():
            assert all(a > b for a, b in zip(errors, errors[1:]))

    def test_triangles(self):
        rows = dispersion_table([2, 4], self.PPW, ElementKind.TRIANGLE, include_qsfem=False, n_directions=91)
        errors = [row["max_dispersion_error"] for row in rows if row["scheme"] == "gal-4"]
        assert all(a > b for a, b in zip(errors, errors[1:]))
