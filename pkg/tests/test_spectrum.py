import math

import numpy as np
import pytest

from rotspec import (
    IntegratorConfig,
    OperatorKind,
    RotationParams,
    assemble_spectrum,
    analytic_eigenfunction_residual,
    coefficients,
    curvature_bundle,
    discriminant,
    discriminant_curve,
    f_derivatives,
    lambda_grid,
    mode_index,
    scan_and_refine,
    sphere_eigen,
    audit_pruned,
    turning_rate,
)
from rotspec.checks import check_abel_identity, random_states
from rotspec.spectrum import _kernel_dim

EX1 = RotationParams(k=3, l=1, n=5)
EX2 = RotationParams(k=2, l=2, n=5)


# ---------------------------------------------------------------- modes --

def test_sphere_eigen_reference_values():
    assert sphere_eigen(0, 7) == (0.0, 1)
    assert sphere_eigen(1, 3) == (3.0, 4)
    assert sphere_eigen(2, 3) == (8.0, 9)
    assert sphere_eigen(3, 3) == (15.0, 16)
    assert sphere_eigen(4, 3) == (24.0, 25)


def test_sphere_eigen_circle_multiplicities():
    # dim 1: constants once, every higher level twice
    assert sphere_eigen(0, 1) == (0.0, 1)
    for j in range(1, 6):
        value, mult = sphere_eigen(j, 1)
        assert value == j * j
        assert mult == 2


def test_sphere_eigen_validation():
    with pytest.raises(ValueError):
        sphere_eigen(-1, 3)
    with pytest.raises(ValueError):
        sphere_eigen(2, 0)


def test_mode_index_fields():
    mode = mode_index(2, 1, EX1)
    assert mode.alpha == 2 * (3 + 2 - 1)
    assert mode.beta == 1.0
    assert mode.mult_k == 9
    assert mode.mult_l == 2


# --------------------------------------------------------- coefficients --

def test_mode00_zero_lambda_has_zero_q():
    mode = mode_index(0, 0, EX1)
    for state in random_states(50):
        _, q = coefficients(mode, OperatorKind.LAPLACE, 0.0, state, EX1)
        assert q == 0.0


def test_stability_shift_is_n_plus_shape_norm():
    mode = mode_index(1, 2, EX1)
    for state in random_states(200):
        p_l, q_l = coefficients(mode, OperatorKind.LAPLACE, 0.7, state, EX1)
        p_j, q_j = coefficients(mode, OperatorKind.JACOBI, 0.7, state, EX1)
        assert p_j == p_l
        K = turning_rate(state, EX1)
        _, _, one_plus = f_derivatives(state, K)
        shift = one_plus * (EX1.n + curvature_bundle(state, EX1).shape_norm_sq)
        assert q_j - q_l == pytest.approx(shift, rel=1e-12, abs=1e-12)


def test_first_order_coefficient_short_form_l1(profile_ex1):
    # with one circle factor, P collapses to
    # (1 + f'^2) * (-n*(f1 cos + f2 sin) + sin/f2)
    mode = mode_index(0, 0, EX1)
    t_half = profile_ex1.half_trajectory.u_end
    for idx in range(41):
        state = profile_ex1.state_at(t_half * idx / 40)
        P, _ = coefficients(mode, OperatorKind.LAPLACE, 0.0, state, EX1)
        c, s = math.cos(state.theta), math.sin(state.theta)
        xi1 = state.f1 * c + state.f2 * s
        _, _, one_plus = f_derivatives(state, turning_rate(state, EX1))
        assert P == pytest.approx(
            one_plus * (-EX1.n * xi1 + s / state.f2), abs=1e-9)


# --------------------------------------------------------- discriminant --

def test_delta00_vanishes_at_zero(profile_ex1):
    d, mono = discriminant(profile_ex1, mode_index(0, 0, EX1),
                           OperatorKind.LAPLACE, 0.0)
    assert abs(d) < 1e-6
    assert _kernel_dim(mono) == 1


def test_delta00_vanishes_at_n(profile_ex1):
    # eigenfunction: the first profile coordinate
    d, _ = discriminant(profile_ex1, mode_index(0, 0, EX1),
                        OperatorKind.LAPLACE, 5.0)
    assert abs(d) < 1e-6


def test_discriminant_published_samples(profile_ex1):
    d_end, _ = discriminant(profile_ex1, mode_index(0, 0, EX1),
                            OperatorKind.LAPLACE, 11.975)
    assert d_end == pytest.approx(1.1755, abs=5e-3)
    d_neg, _ = discriminant(profile_ex1, mode_index(1, 0, EX1),
                            OperatorKind.LAPLACE, 0.0)
    assert d_neg == pytest.approx(-273.76, abs=1.0)


def test_wronskian_matches_abel_prediction(profile_ex1):
    for kind in OperatorKind:
        assert check_abel_identity(profile_ex1, kind).measured < 1e-6


def test_batched_curve_matches_scalar_path(profile_ex1):
    mode = mode_index(1, 0, EX1)
    lams = np.array([0.0, 4.0, 8.5, 11.5])
    curve = discriminant_curve(profile_ex1, mode, OperatorKind.LAPLACE, lams)
    for lam, batched in zip(lams, curve.delta0):
        scalar, _ = discriminant(profile_ex1, mode, OperatorKind.LAPLACE,
                                 float(lam))
        assert batched == pytest.approx(scalar, rel=1e-7, abs=1e-7)


def test_deep_mode_renormalization_keeps_sign(profile_ex1):
    # far below the spectrum the canonical solutions overflow any fixed
    # scale; the renormalized discriminant must stay negative throughout
    mode = mode_index(0, 6, EX1)
    lams = np.linspace(-60.0, 1.0, 12)
    curve = discriminant_curve(profile_ex1, mode, OperatorKind.JACOBI, lams)
    assert np.all(curve.delta0 < 0)
    assert np.all(curve.scale_exponents > 0)


def test_extreme_lambda_renormalization(profile_ex1):
    d, mono = discriminant(profile_ex1, mode_index(0, 0, EX1),
                           OperatorKind.LAPLACE, -2000.0)
    assert mono.scale_exponent > 0
    assert d < 0


def test_lambda_grid_is_half_open():
    grid = lambda_grid(0.0, 12.0, 0.025)
    assert len(grid) == 480
    assert grid[0] == 0.0
    assert grid[-1] == pytest.approx(11.975)
    grid = lambda_grid(-60.0, 1.0, 0.025)
    assert grid[-1] < 1.0


# ------------------------------------------------------------- scanning --

def test_scan_mode00_laplace(profile_ex1):
    records = scan_and_refine(profile_ex1, mode_index(0, 0, EX1),
                              OperatorKind.LAPLACE, (0.0, 12.0))
    values = [r.value for r in records]
    assert values == pytest.approx([0.0, 5.0, 10.658388], abs=2e-6)
    assert all(r.kernel_dim == 1 for r in records)
    assert all(r.total_multiplicity == 1 for r in records)


def test_scan_mode10_laplace(profile_ex1):
    records = scan_and_refine(profile_ex1, mode_index(1, 0, EX1),
                              OperatorKind.LAPLACE, (4.0, 12.75))
    values = [r.value for r in records]
    assert values == pytest.approx([5.0, 10.073635149], abs=5e-6)
    assert all(r.total_multiplicity == 4 for r in records)


def test_scan_mode01_laplace(profile_ex1):
    records = scan_and_refine(profile_ex1, mode_index(0, 1, EX1),
                              OperatorKind.LAPLACE, (0.0, 12.0))
    values = [r.value for r in records]
    assert values == pytest.approx([5.0, 9.5961595], abs=5e-6)
    assert all(r.total_multiplicity == 2 for r in records)


def test_scan_mode11_laplace(profile_ex1):
    records = scan_and_refine(profile_ex1, mode_index(1, 1, EX1),
                              OperatorKind.LAPLACE, (0.0, 12.0))
    values = [r.value for r in records]
    assert values == pytest.approx([11.815175], abs=5e-6)
    assert records[0].total_multiplicity == 8


# ------------------------------------------------------------- assembly --

def test_laplace_assembly_bookkeeping(laplace_ex1):
    assert [m.pair for m in laplace_ex1.scanned_modes] == [
        (0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    assert sorted(m.pair for m in laplace_ex1.frontier_modes) == [
        (0, 2), (2, 0)]
    skipped = dict(laplace_ex1.skipped_modes)
    assert skipped[(3, 0)] == (2, 0)
    assert skipped[(0, 3)] == (0, 2)


def test_laplace_zero_belongs_to_base_mode(laplace_ex1):
    zero_group = laplace_ex1.groups[0]
    assert zero_group.value == pytest.approx(0.0, abs=1e-6)
    assert [r.mode.pair for r in zero_group.members] == [(0, 0)]


def test_jacobi_zero_modes(jacobi_ex1):
    null_group = [g for g in jacobi_ex1.groups
                  if abs(g.value) <= 1e-4][0]
    assert sorted(r.mode.pair for r in null_group.members) == [
        (0, 1), (1, 0), (1, 1)]
    assert [r.total_multiplicity
            for r in sorted(null_group.members,
                            key=lambda r: r.mode.pair)] == [2, 4, 8]


def test_jacobi_minus_n_decomposition(jacobi_ex1):
    minus_n = [g for g in jacobi_ex1.groups
               if abs(g.value + 5.0) < 1e-3][0]
    contributions = sorted((r.mode.pair, r.total_multiplicity)
                           for r in minus_n.members)
    assert contributions == [((0, 0), 1), ((0, 1), 2),
                             ((1, 0), 4), ((1, 1), 8)]
    assert minus_n.multiplicity == 15


def test_first_root_monotone_in_mode_order(jacobi_ex1):
    firsts = {}
    for group in jacobi_ex1.groups:
        for rec in group.members:
            pair = rec.mode.pair
            firsts[pair] = min(firsts.get(pair, math.inf), rec.value)
    for (i1, j1), v1 in firsts.items():
        for (i2, j2), v2 in firsts.items():
            if i1 <= i2 and j1 <= j2:
                assert v1 <= v2 + 1e-6


def test_group_members_are_tight(jacobi_ex1):
    for group in jacobi_ex1.groups:
        values = [r.value for r in group.members]
        assert max(values) - min(values) < 1e-3


def test_index_nullity_account_for_all_records(jacobi_ex1):
    below = sum(g.multiplicity for g in jacobi_ex1.groups
                if g.value < 1e-4)
    assert jacobi_ex1.stability_index + jacobi_ex1.nullity == below


def test_pruning_audit_confirms_rootless_frontier(profile_ex1, jacobi_ex1):
    audit = audit_pruned(profile_ex1, jacobi_ex1)
    for entry in audit.frontier:
        assert entry.roots == ()
    for entry in audit.skipped:
        assert entry.sign_changes == 0


def test_zero_membership_holds_for_other_profiles(profile_ex2):
    # the constant function puts 0 in the base Laplace mode of every
    # converged profile
    records = scan_and_refine(profile_ex2, mode_index(0, 0, EX2),
                              OperatorKind.LAPLACE, (0.0, 0.5))
    assert any(abs(r.value) < 1e-6 for r in records)


def test_parallel_assembly_matches_sequential(profile_ex1):
    seq = assemble_spectrum(profile_ex1, OperatorKind.LAPLACE, (9.0, 12.0))
    par = assemble_spectrum(profile_ex1, OperatorKind.LAPLACE, (9.0, 12.0),
                            jobs=2)
    assert [m.pair for m in seq.scanned_modes] == [
        m.pair for m in par.scanned_modes]
    assert [(g.value, g.multiplicity) for g in seq.groups] == [
        (g.value, g.multiplicity) for g in par.groups]


def test_continuity_refinement_inserts_points(profile_ex1):
    # scale-exponent transitions along a deep scan look like jumps; the
    # refinement pass may add points but must keep the grid sorted
    from rotspec.spectrum import _continuity_refined
    mode = mode_index(4, 0, EX1)
    lams = lambda_grid(-60.0, -40.0, 0.5)
    curve = discriminant_curve(profile_ex1, mode, OperatorKind.JACOBI, lams)
    out_lams, out_deltas = _continuity_refined(
        profile_ex1, mode, OperatorKind.JACOBI, lams, curve.delta0, 0.5,
        IntegratorConfig())
    assert len(out_lams) >= len(lams)
    assert np.all(np.diff(out_lams) > 0)
    assert len(out_lams) == len(out_deltas)


# -------------------------------------------------- analytic solutions --

def test_analytic_eigenfunction_residuals(profile_ex1, profile_ex2):
    for profile in (profile_ex1, profile_ex2):
        assert analytic_eigenfunction_residual(profile, "constant") == 0.0
        for branch in ("f1_mode00", "f_mode10", "f2_mode01"):
            assert analytic_eigenfunction_residual(profile, branch) < 1e-6


def test_analytic_eigenfunction_unknown_branch(profile_ex1):
    with pytest.raises(ValueError):
        analytic_eigenfunction_residual(profile_ex1, "nope")
