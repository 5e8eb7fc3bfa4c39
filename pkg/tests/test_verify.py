"""Verification checks: positive runs, negative controls, feature logic."""
from __future__ import annotations

import numpy as np
import pytest

from dploop.errors import TroughCountMismatch
from dploop.fields import Perturbation, assemble_fields
from dploop.modes import ModeSpec, SolitonSpec
from dploop.verify import (
    Grid,
    check_compact_pde,
    check_constitutive,
    check_det_consistency,
    check_drift_direction,
    check_dual_route_u,
    check_elasticity,
    check_factorization,
    check_loop_anatomy,
    check_x_map,
    run_suite,
)

SMALL = Grid(y_min=-15.0, y_max=15.0, n_y=120, times=(-2.0, 0.0, 2.0))


class TestGrid:
    def test_validation(self):
        with pytest.raises(ValueError):
            Grid(y_min=5.0, y_max=-5.0)
        with pytest.raises(ValueError):
            Grid(n_y=4)

    def test_probe_axis(self):
        g = Grid(y_min=-1.0, y_max=1.0, n_y=21)
        assert g.y[0] == -1.0 and g.y[-1] == 1.0 and len(g.y) == 21


class TestPositiveRuns:
    def test_background_field_trivial_residuals(self, preset_fields):
        """Far from every wave, q = kappa and u = 0 make the identities
        degenerate to 0 = 0."""
        fields = preset_fields["fig1"]
        far = Grid(y_min=300.0, y_max=320.0, n_y=32, times=(0.0,))
        assert check_compact_pde(fields, far).residual < 1e-15
        assert check_constitutive(fields, far).residual < 1e-12

    def test_full_suite_single_loop(self, preset_specs):
        grid = Grid(times=(0.0,))
        report = run_suite(preset_specs["fig1"], grid)
        assert report.passed, "\n".join(r.line() for r in report.results)

    def test_full_suite_mixed(self, preset_specs):
        grid = Grid(times=(-2.0, -0.5, 0.0, 0.5, 2.0))
        report = run_suite(preset_specs["fig5"], grid)
        assert report.passed, "\n".join(r.line() for r in report.results)

    def test_report_lines_format(self, preset_specs):
        import re

        report = run_suite(preset_specs["fig1"], Grid(times=(0.0,)))
        pattern = re.compile(
            r"^CHECK [a-z0-9-]+ residual=\d\.\d{6}e[+-]\d{2} tol=\d\.\de[+-]\d{2} (PASS|FAIL)$"
        )
        for line in report.lines():
            assert pattern.match(line), line


class TestNegativeControls:
    def test_corrupted_u_numerator_breaks_compact_pde(self, preset_specs):
        """A 1e-3 bump on one u-numerator coefficient must push the
        compact-form residual far over tolerance."""
        fields = assemble_fields(
            preset_specs["fig1"], perturb=Perturbation("h", (1,), 1e-3)
        )
        res = check_compact_pde(fields, SMALL)
        assert res.residual > 1e-5

    def test_sign_flipped_g2_breaks_constitutive(self, preset_specs):
        fields = assemble_fields(
            preset_specs["fig2"], perturb=Perturbation("g2", (1, 0), -2.0)
        )
        res = check_constitutive(fields, SMALL)
        assert res.residual > 1e-3

    def test_nu_perturbation_breaks_factorization(self, preset_specs):
        # the (1,1) coefficient of f_tilde carries 2 nu/(a1 a2)
        fields = assemble_fields(
            preset_specs["fig2"], perturb=Perturbation("f_tilde", (1, 1), 1e-6)
        )
        res = check_factorization(fields, SMALL)
        assert res.residual > 1e-8

    def test_perturbed_h_breaks_dual_route(self, preset_specs):
        fields = assemble_fields(
            preset_specs["fig5"], perturb=Perturbation("h", (1, 1), 1e-3)
        )
        res = check_dual_route_u(fields, n_probes=150)
        assert res.residual > 1e-7


class TestFeatures:
    def test_elasticity_single_mode_self_match(self, preset_specs):
        res = check_elasticity(preset_specs["fig1"], t_far=10.0, compare="pair")
        assert res.residual < 1e-12

    def test_elasticity_census_mismatch_during_collision(self, preset_specs):
        """The mixed pair forms a secondary crest mid-collision; the strict
        census refuses to pretend those frames are asymptotic."""
        with pytest.raises(TroughCountMismatch):
            check_elasticity(preset_specs["fig5"], t_far=0.12, compare="pair")

    def test_unknown_comparison_rejected(self, preset_specs):
        with pytest.raises(ValueError):
            check_elasticity(preset_specs["fig2"], t_far=10.0, compare="fancy")

    def test_drift_directions_two_loop(self, preset_specs):
        res = check_drift_direction(preset_specs["fig2"], (-10.0, -8.0))
        assert res.passed

    def test_drift_directions_mixed(self, preset_specs):
        res = check_drift_direction(preset_specs["fig5"], (-2.0, -1.0))
        assert res.passed

    def test_drift_single_smooth_moves_right(self):
        spec = SolitonSpec(0.91, [ModeSpec(0.91, +1)])
        assert spec.derived()[0].c < 0  # negative velocity: +x drift
        res = check_drift_direction(spec, (-2.0, 0.0))
        assert res.passed

    def test_drift_single_loop_moves_left(self, preset_specs):
        res = check_drift_direction(preset_specs["fig1"], (0.0, 2.0))
        assert res.passed

    def test_loop_anatomy_counts(self, preset_fields):
        grid1 = Grid(times=(0.0,))
        assert check_loop_anatomy(preset_fields["fig1"], grid1).passed
        grid2 = Grid(times=(-10.0,))
        assert check_loop_anatomy(preset_fields["fig2"], grid2).passed
        grid5 = Grid(times=(-2.0,))
        assert check_loop_anatomy(preset_fields["fig5"], grid5).passed


class TestXMap:
    def test_both_entries_pass_on_presets(self, preset_fields):
        for name in ("fig1", "fig4"):
            deriv, offset = check_x_map(preset_fields[name], Grid(times=(0.0, 1.5)))
            assert deriv.passed, deriv.line()
            assert offset.passed, offset.line()


class TestDetConsistency:
    def test_close_wavenumber_pair_needs_refinement(self, preset_specs):
        """fig2's tiny delta^2 sinks the determinant far below the entry
        scale; the check must still certify 1e-10 agreement."""
        res = check_det_consistency(preset_specs["fig2"], n_probes=400)
        assert res.passed, res.line()
