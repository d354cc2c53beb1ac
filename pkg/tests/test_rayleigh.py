"""Rayleigh solutions and the Wronskian: closed-form Couette oracles,
symmetry, quadrature honesty, root structure, and the bound suites."""

import math

import numpy as np
import pytest

from viscoshear import rayleigh as ray
from viscoshear._ode import integrate
from viscoshear.errors import StepFailure
from viscoshear.flow import eval_b_derivs
from viscoshear.spectrum import Grid, lowest_eigenpair


def w_couette_exact(k, c):
    """Closed form of the Couette Wronskian on the imaginary axis.

    With b = y the regular solution is phi = -ic cosh(ky) + sinh(ky)/k and
    the substitution u = tanh(ky) collapses the integral to -2k/(1+k^2c^2).
    """
    return -2.0 * k / (1.0 + k * k * c * c)


# ---------------------------------------------------------------------------
# integrator unit oracles
# ---------------------------------------------------------------------------


def test_rk45_linear_oscillator():
    lam = 1.5 - 2.3j
    y, _, _ = integrate(lambda t, y: lam * y, 0.0, 3.0, np.array([1.0 + 0j]), rtol=1e-11)
    exact = np.exp(lam * 3.0)
    assert abs(y[0] - exact) / abs(exact) <= 1e-9


def test_rk45_step_budget_raises():
    with pytest.raises(StepFailure):
        integrate(lambda t, y: -y, 0.0, 1.0, np.array([1.0 + 0j]), max_steps=3)


# ---------------------------------------------------------------------------
# Couette oracles
# ---------------------------------------------------------------------------


def test_couette_phi1_is_sinh(couette_state):
    ys = np.linspace(-10.0, 10.0, 161)
    for k in (0.5, 1.0, 2.0):
        sol = ray.solve_phi1(couette_state, k, ys)
        mask = np.abs(sol.ys) > 1e-9
        exact = np.sinh(k * sol.ys[mask]) / (k * sol.ys[mask])
        assert np.max(np.abs(sol.phi1[mask] - exact) / exact) <= 1e-8
        # spec literal: phi1(2) = sinh(2)/2 at k = 1
    sol = ray.solve_phi1(couette_state, 1.0, np.array([-2.0, 2.0]))
    i2 = int(np.argmin(np.abs(sol.ys - 2.0)))
    assert abs(sol.phi1[i2] - math.sinh(2.0) / 2.0) <= 1e-8


def test_phi1_invariants(ctx):
    sol = ray.solve_phi1(ctx.state_T, 1.0, np.linspace(-15, 15, 121))
    assert np.all(sol.phi1 >= 1.0 - 1e-9)
    assert np.all(sol.ys * sol.dphi1 >= -1e-10 * (1.0 + np.abs(sol.ys)))


def test_couette_wronskian_exact(couette_state):
    for (k, c) in [(1.0, 0.1), (1.0, 0.01), (0.7, 0.3), (1.3, 1e-4), (1.0, 1e-6), (2.0, 0.45)]:
        wv = ray.wronskian(couette_state, k, c)
        exact = w_couette_exact(k, c)
        assert abs(wv.W - exact) <= 1e-8 * abs(exact)
        assert wv.imag_ok()


def test_couette_boundary_value(couette_state):
    for k in (0.5, 1.0, 2.0):
        wb = ray.wronskian_boundary(couette_state, k)
        assert abs(wb.W.real + 2.0 * k) <= 1e-9 * 2.0 * k
        assert wb.W.imag == 0.0


def test_couette_has_no_roots(couette_state):
    for k in (0.2, 1.0, 2.0):
        assert ray.eigenvalue_for_k(couette_state, k) is None


def test_couette_phi2_closed_form(couette_state):
    k, c = 1.0, 0.05
    p1 = ray.solve_phi1(couette_state, k, np.linspace(-8, 8, 81))
    p2 = ray.solve_phi2(couette_state, k, c, p1)
    mask = np.abs(p1.ys) > 1e-5
    ys = p1.ys[mask]
    phi_exact = -1j * c * np.cosh(k * ys) + np.sinh(k * ys) / k
    phi2_exact = phi_exact / ((ys - 1j * c) * p1.phi1[mask])
    assert np.max(np.abs(p2.phi2[mask] - phi2_exact) / np.abs(phi2_exact)) <= 1e-7


def test_phi2_symmetry_and_trivial_case(ctx):
    k, c = 1.0, 1e-3
    p1 = ray.solve_phi1(ctx.state_T, k, np.linspace(-12, 12, 97))
    p2 = ray.solve_phi2(ctx.state_T, k, c, p1)
    assert np.max(np.abs(p2.phi2.real - p2.phi2.real[::-1])) <= 1e-8
    assert np.max(np.abs(p2.phi2.imag + p2.phi2.imag[::-1])) <= 1e-8
    p2_zero = ray.solve_phi2(ctx.state_T, k, 0.0, p1)
    assert np.all(p2_zero.phi2 == 1.0)
    with pytest.raises(ValueError):
        ray.solve_phi2(ctx.state_T, 2.0, c, p1)


def test_assemble_phi_checks_and_reflection(ctx):
    k, c = 1.0, 1e-3
    p1 = ray.solve_phi1(ctx.state_T, k, np.linspace(-12, 12, 97))
    p2 = ray.solve_phi2(ctx.state_T, k, c, p1)
    ys, phi = ray.assemble_phi(ctx.state_T, p1, p2, c)
    refl = np.abs(phi + np.conj(phi[::-1])) / (1.0 + np.abs(phi))
    assert np.max(refl) <= 1e-8
    # c_i = 0 vanishes at the critical point
    p2z = ray.solve_phi2(ctx.state_T, k, 0.0, p1)
    ys0, phi0 = ray.assemble_phi(ctx.state_T, p1, p2z, 0.0)
    assert abs(phi0[int(np.argmin(np.abs(ys0)))]) == 0.0


def test_assemble_phi_couette_closed_form(couette_state):
    k, c = 1.0, 0.05
    p1 = ray.solve_phi1(couette_state, k, np.linspace(-6, 6, 49))
    p2 = ray.solve_phi2(couette_state, k, c, p1)
    ys, phi = ray.assemble_phi(couette_state, p1, p2, c)
    exact = -1j * c * np.cosh(k * ys) + np.sinh(k * ys) / k
    assert np.max(np.abs(phi - exact) / (1.0 + np.abs(exact))) <= 1e-8


def test_quadrature_honesty(ctx, couette_state):
    # tightening the integrator tolerance moves W by less than quad_error
    for state, k, c in [(couette_state, 1.0, 0.02), (ctx.state_T, 1.0, 3e-4)]:
        base = ray.wronskian(state, k, c)
        tight = ray.wronskian(state, k, c, rtol=1e-11, atol=1e-14)
        assert abs(base.W - tight.W) <= base.quad_error


def test_det_check_reference_and_couette(ctx, couette_state):
    rep = ray.wronskian_det_check(couette_state, 1.0, 0.1, [-1.0, 1.0])
    assert rep.max_rel_dev <= 1e-6
    assert abs(rep.dets[0] - rep.dets[1]) <= 1e-6 * abs(rep.W)
    rep2 = ray.wronskian_det_check(ctx.state_T, 1.2, 0.01, [-1.0, 1.0])
    assert rep2.max_rel_dev <= 1e-6
    # near the root |W| -> 0, so agreement there is absolute-scale:
    rep3 = ray.wronskian_det_check(ctx.state_T, 1.0, ctx.torus.ci_at_k1 / 2, [-1.5, 0.5])
    assert np.max(np.abs(rep3.dets - rep3.dets[0])) <= 1e-9
    assert np.max(np.abs(rep3.dets - rep3.W)) <= 1e-6 * max(1.0, abs(rep3.W))


def test_wronskian_rejects_nonpositive_ci(ctx):
    with pytest.raises(ValueError):
        ray.wronskian(ctx.state_T, 1.0, 0.0)


def test_root_at_reference(ctx):
    rep = ctx.torus
    assert rep.ci_at_k1 is not None
    assert 5.0e-4 <= rep.ci_at_k1 <= 6.0e-4  # frozen regression band
    assert rep.root_residual <= 1e-10 * rep.w_scale


def test_boundary_consistency_with_limit(ctx):
    st = ctx.state_T
    wb = ray.wronskian_boundary(st, 1.0)
    w6 = ray.wronskian(st, 1.0, 1e-6)
    w3 = ray.wronskian(st, 1.0, 5e-7)
    richardson = 2.0 * w3.W.real - w6.W.real
    assert abs(richardson - wb.W.real) <= 1e-4 * abs(wb.W.real)


def test_boundary_vanishes_at_kstar(ctx):
    assert ctx.torus.boundary_residual <= 1e-4


def test_eigencurve_structure(ctx):
    curve = ctx.curve
    cis = [c for _, c, _ in curve.points]
    assert all(b < a for a, b in zip(cis, cis[1:]))
    assert all(s < 0 for _, s in curve.slope_samples)
    rel = abs(curve.k_zero - ctx.torus.kstarT) / ctx.torus.kstarT
    assert rel <= 1e-3


def test_partials_and_slope_composition(ctx):
    dk, dci = ctx.partials
    g0 = ctx.params.gamma0
    assert -20.0 <= dk <= -1.0 / 20.0
    assert -20.0 <= dci * g0 <= -1.0 / 20.0
    slope_ift = -dk / dci
    k_near, slope_curve = min(ctx.curve.slope_samples, key=lambda t: abs(t[0] - 1.0))
    assert abs(slope_ift - slope_curve) <= 0.2 * abs(slope_curve)


def test_phiB_construction(ctx, grid):
    state = ctx.state_T
    res = lowest_eigenpair(state, grid, want_mode=True)
    mode = ray.neutral_mode_phiB(state, res.kstar, grid)
    l2 = math.sqrt(np.sum((mode - res.mode) ** 2) * grid.spacing)
    assert l2 <= 1e-3
    # pre-normalization value at the origin
    raw = ray.neutral_mode_phiB(state, res.kstar, grid, normalized=False)
    _, b1, _, _ = eval_b_derivs(state, 0.0)
    mid = len(raw) // 2
    assert raw[mid] == -1.0 / b1
    h = grid.spacing
    assert abs(raw[mid - 1] - raw[mid]) <= 10.0 * h  # continuous through the origin
    # exponential decay beyond the plateau
    ys = grid.ys()
    tail = np.abs(ys) >= 1.0 / res.kstar
    envelope = 20.0 * math.sqrt(res.kstar) * np.exp(-res.kstar * np.abs(ys[tail]) / 20.0)
    assert np.all(np.abs(mode[tail]) <= envelope)


def test_bound_suites(ctx):
    ys = np.linspace(-20.0, 20.0, 401)
    state = ctx.state_T
    ci = ctx.torus.ci_at_k1
    p1 = ray.solve_phi1(state, 1.0, ys)
    p2 = ray.solve_phi2(state, 1.0, ci, p1)
    r1 = ray.phi1_bound_report(state, p1)
    assert r1.signs_ok
    assert all(c <= 50.0 for c in r1.constants.values())
    assert r1.constants["A4_envelope"] <= 10.0
    r2 = ray.phi2_bound_report(state, p1, p2, ci)
    assert all(c <= 50.0 for c in r2.constants.values())
    rphi = ray.phi_bound_report(state, p1, p2, ci)
    assert all(c <= 50.0 for c in rphi.constants.values())


def test_multiple_roots_detected(monkeypatch, couette_state):
    def fake_many(state, ks, cs, half_width=20.0, rtol=0, atol=0):
        cs = np.asarray(cs, float)
        w = np.cos(3.0 * np.log(cs / 1e-8)) + 0j  # several sign flips
        return w, np.zeros_like(cs)

    monkeypatch.setattr(ray, "wronskian_many", fake_many)
    with pytest.raises(ray.MultipleRoots):
        ray.eigenvalue_for_k(couette_state, 1.0)


def test_phiB_requires_wide_enough_domain(ctx):
    from viscoshear.errors import TailDominance

    with pytest.raises(TailDominance):
        ray.neutral_mode_phiB(ctx.state_T, 0.1, Grid(20.0, 513))
