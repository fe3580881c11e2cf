from __future__ import annotations

import math

import numpy as np
import pytest

from ringlab import leapfrog as lf
from ringlab.errors import DegeneratePairError, DomainError, NonPeriodicLevelError, SingularityError
from ringlab.leapfrog import TwoRingParams
from ringlab.reduced import ReducedState, integrate_reduced

P = TwoRingParams(2.0, 1.0, 1.0)


# --------------------------------------------------------------------------
# parameters and change of variables


def test_derived_parameters():
    assert P.a == 3.0
    assert np.array_equal(P.xstar, [0.0, 6.0])
    assert P.cstar == pytest.approx((6.0 / math.e) ** 2, rel=1e-15)


def test_dipole_rejected():
    with pytest.raises(DegeneratePairError):
        TwoRingParams(1.0, -1.0, 1.0)
    with pytest.raises(DegeneratePairError):
        lf.reduce_two_ring([0, 0], [1, 1], TwoRingParams(1.0, -1.0, 1.0))


def test_reduce_coincident_and_equal():
    p = np.array([0.3, -0.4])
    x, y = lf.reduce_two_ring(p, p, P)
    assert np.array_equal(x, [0.0, 0.0])
    assert np.allclose(y, p, rtol=0, atol=1e-16)
    _, y = lf.reduce_two_ring([0.0, 1.0], [2.0, 3.0], TwoRingParams(1.0, 1.0, 1.0))
    assert np.array_equal(y, [1.0, 2.0])


def test_reduce_expand_round_trip():
    rng = np.random.default_rng(5)
    for _ in range(100):
        z1, z2 = rng.normal(size=2), rng.normal(size=2)
        a1, a2 = rng.uniform(0.5, 3), rng.uniform(-0.4, 0.4)
        params = TwoRingParams(a1, a2, 1.0)
        back1, back2 = lf.expand_two_ring(*lf.reduce_two_ring(z1, z2, params), params)
        assert np.allclose(back1, z1, rtol=0, atol=4e-15)
        assert np.allclose(back2, z2, rtol=0, atol=4e-15)


# --------------------------------------------------------------------------
# Hamiltonian


def test_gradient_vanishes_at_equilibrium():
    h = 1e-6
    xs = P.xstar
    g1 = (lf.hamiltonian(xs + [h, 0], P) - lf.hamiltonian(xs - [h, 0], P)) / (2 * h)
    g2 = (lf.hamiltonian(xs + [0, h], P) - lf.hamiltonian(xs - [0, h], P)) / (2 * h)
    assert math.hypot(g1, g2) < 1e-6


def test_cstar_from_equilibrium_energy():
    c = math.exp(-4 * math.pi * lf.hamiltonian(P.xstar, P) / P.total)
    assert c == pytest.approx((2 * P.alpha * P.a / math.e) ** 2, rel=1e-14)


def test_equal_intensities_radial():
    params = TwoRingParams(1.3, 1.3, 0.7)
    r = 0.8
    vals = [lf.hamiltonian([r * math.cos(t), r * math.sin(t)], params) for t in np.linspace(0, 6, 7)]
    assert max(vals) - min(vals) < 1e-15
    with pytest.raises(SingularityError):
        lf.hamiltonian([0.0, 0.0], params)


def test_energy_constant_round_trip():
    for c in (1e-3, 0.7, 5.0):
        assert lf.c_e_from_energy(lf.energy_from_c_e(c, P), P) == pytest.approx(c, rel=1e-14)
    assert lf.level_constant([0.3, 0.4], P) == pytest.approx(
        math.exp(-4 * math.pi * lf.hamiltonian([0.3, 0.4], P) / P.total), rel=1e-14
    )


# --------------------------------------------------------------------------
# roots


@pytest.mark.parametrize("frac", [1e-8, 1e-3, 0.2, 0.5, 0.9, 0.999999])
def test_three_root_branch_ordering(frac):
    lv = lf.level_roots(frac * P.cstar, P)
    e1, e2, e3 = lv.roots
    assert lv.periodic
    assert e1 < 0 < e2 < P.xstar[1] < e3
    for r in lv.roots:
        assert abs(lf.radicand(r, lv.c_e, P)) <= 1e-9 * max(1.0, r * r)


@pytest.mark.parametrize("mult", [1.0 + 1e-6, 2.0, 100.0])
def test_single_root_branch(mult):
    lv = lf.level_roots(mult * P.cstar, P)
    assert not lv.periodic
    assert len(lv.roots) == 1 and lv.roots[0] < 0


def test_tangent_level():
    lv = lf.level_roots(P.cstar, P)
    assert not lv.periodic
    assert abs(lv.roots[1] - 6.0) <= 10 * lf.ROOT_TOL
    assert abs(lv.roots[2] - 6.0) <= 10 * lf.ROOT_TOL


def test_small_level_roots_near_sqrt():
    c = 1e-6 * P.cstar
    e1, e2, _ = lf.level_roots(c, P).roots
    assert e1 == pytest.approx(-math.sqrt(c), rel=1e-2)
    assert e2 == pytest.approx(math.sqrt(c), rel=1e-2)


def test_negative_kappa_reflects():
    q = TwoRingParams(1.0, 2.0, 1.0)
    lv_p = lf.level_roots(0.5 * P.cstar, P)
    lv_q = lf.level_roots(0.5 * q.cstar, q)
    assert q.cstar == pytest.approx(P.cstar)
    assert sorted(-r for r in lv_q.roots) == pytest.approx(sorted(lv_p.roots), rel=1e-13)
    assert lf.period(0.5 * q.cstar, q) == pytest.approx(lf.period(0.5 * P.cstar, P), rel=1e-10)


def test_level_roots_domain():
    with pytest.raises(DomainError):
        lf.level_roots(0.0, P)


# --------------------------------------------------------------------------
# periods


def test_period_small_level_asymptote():
    ratios = [lf.period(P.cstar / 10**j, P) / lf.planar_period(P.cstar / 10**j, P) for j in (1, 2, 3)]
    dev = [abs(r - 1) for r in ratios]
    assert dev[0] > dev[1] > dev[2]
    assert dev[2] < 1e-3


def test_period_planar_limit_in_alpha():
    energy = -0.3
    r_e = math.exp(-2 * math.pi * energy / P.total)
    target = 4 * math.pi**2 * r_e**2 / P.total
    errs = []
    for alpha in (10.0, 100.0, 1000.0):
        q = P.with_alpha(alpha)
        errs.append(abs(lf.period(lf.c_e_from_energy(energy, q), q) / target - 1))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-5


def test_period_matches_ode_return():
    c = 0.5 * P.cstar
    assert lf.first_return_time(c, P) == pytest.approx(lf.period(c, P), rel=1e-3)


def _max_jump(step):
    cs = P.cstar * 0.01 * (1 + step) ** np.arange(int(math.log(90) / math.log1p(step)) + 1)
    ts = np.array([lf.period(c, P) for c in cs])
    assert np.all(ts > 0) and np.all(np.isfinite(ts))
    assert np.all(np.diff(ts) > 0)
    return float(np.max(np.diff(ts) / ts[:-1]))


def test_period_continuity_along_sweep():
    # geometric sweep over [0.01, 0.9] C*; T_E grows at least linearly in C_E, so the
    # largest relative jump scales with the spacing instead of staying below it
    j1, j2 = _max_jump(0.01), _max_jump(0.005)
    assert j1 < 0.05
    assert 1.8 < j1 / j2 < 2.2


def test_non_periodic_level_has_no_period():
    with pytest.raises(NonPeriodicLevelError):
        lf.period(P.cstar, P)
    with pytest.raises(NonPeriodicLevelError):
        lf.period(3 * P.cstar, P)


def test_orbit_level_carries_period():
    lv = lf.orbit_level(0.3 * P.cstar, P)
    assert lv.period == pytest.approx(lf.period(0.3 * P.cstar, P))
    assert lf.orbit_level(2 * P.cstar, P).period is None


# --------------------------------------------------------------------------
# overtakings


def test_circular_orbit_two_crossings_per_period():
    q = TwoRingParams(1.0, 1.0, 1.0)
    d = 0.5
    tp = 2 * math.pi**2 * d**2 / 1.0  # relative angular speed a/(pi d^2)
    assert tp == pytest.approx(lf.planar_period(d * d, q))
    st = lf.orbit_state([0.0, d], q)
    for n in (1, 2, 3):
        traj = integrate_reduced(st, n * tp + 0.25 * tp, tp / 1000)
        assert len(lf.detect_overtakings(traj, q)) == 2 * n


def test_no_crossing_when_x1_positive():
    st = ReducedState([[1.0, 0.0], [0.0, 0.0]], [1.0, 0.5], 1.0)
    traj = integrate_reduced(st, 0.05, 1e-3)
    x = lf.relative_positions(traj)
    assert np.all(x[:, 0] > 0)
    assert lf.detect_overtakings(traj, TwoRingParams(1.0, 0.5, 1.0)) == []


@pytest.mark.parametrize("k", [1, 2, 3])
def test_leapfrog_level_crossings(k):
    c = 0.5 * P.cstar
    tp = lf.period(c, P)
    st = lf.orbit_state(lf.turning_point(lf.level_roots(c, P)), P)
    traj = integrate_reduced(st, k * tp + 0.5 * tp, tp / 1000)
    assert len(lf.detect_overtakings(traj, P)) >= 2 * k
    whole = integrate_reduced(st, k * tp + 0.25 * tp, tp / 1000)
    assert len(lf.detect_overtakings(whole, P)) % 2 == 0


def test_overtaking_floor_discards_slow_crossings():
    c = 0.5 * P.cstar
    tp = lf.period(c, P)
    st = lf.orbit_state(lf.turning_point(lf.level_roots(c, P)), P)
    traj = integrate_reduced(st, 1.5 * tp, tp / 500)
    assert lf.detect_overtakings(traj, P, floor=1e6) == []


# --------------------------------------------------------------------------
# alpha threshold


def test_alpha_threshold_certificate_recheck():
    cert = lf.alpha_threshold(0.25, -0.5, 1, 2.0, 1.0, bisections=20)
    assert cert.holds()
    again = lf.certify_alpha(cert.alpha, 0.25, -0.5, 1, 2.0, 1.0)
    assert again.c_e < again.cstar
    assert again.min_separation >= 4 * 0.25
    assert cert.k * again.period < again.horizon
    # just below the threshold one condition fails
    assert not lf.certify_alpha(cert.alpha * (1 - 1e-4), 0.25, -0.5, 1, 2.0, 1.0).holds()


def test_alpha_threshold_increases_with_k():
    a1 = lf.alpha_threshold(0.25, -0.5, 1, 2.0, 1.0, bisections=20).alpha
    a3 = lf.alpha_threshold(0.25, -0.5, 3, 2.0, 1.0, bisections=20).alpha
    assert a1 <= a3


def test_separation_nondecreasing_above_threshold():
    base = lf.alpha_threshold(0.25, -0.5, 1, 2.0, 1.0, bisections=20).alpha
    seps = [lf.certify_alpha(base * m, 0.25, -0.5, 1, 2.0, 1.0).min_separation for m in (1, 2, 4, 8, 16)]
    assert all(b >= a - 1e-9 for a, b in zip(seps, seps[1:]))
    r_e = math.exp(-2 * math.pi * -0.5 / 3.0)
    assert seps[-1] < r_e


def test_alpha_threshold_requires_radius():
    with pytest.raises(DomainError):
        lf.alpha_threshold(1.0, -0.5, 1, 2.0, 1.0)


# --------------------------------------------------------------------------
# phase portrait


LEVELS = [0.25 * P.cstar, 0.5 * P.cstar, 2.0 * P.cstar]


def test_portrait_components():
    curves = lf.phase_portrait(P, LEVELS, 100)
    closed = [c for c in curves if c.closed]
    assert len(closed) == 2
    assert len(curves) == 5
    assert all(c.level < P.cstar for c in closed)


def test_closed_curve_endpoints_are_roots():
    for c in lf.phase_portrait(P, LEVELS, 100):
        if not c.closed:
            continue
        e1, e2 = lf.closed_component(lf.level_roots(c.level, P))
        assert c.x2[0] == pytest.approx(e1, abs=1e-12)
        assert np.max(c.x2) == pytest.approx(e2, abs=1e-12)
        for r in (e1, e2):
            assert math.sqrt(max(lf.radicand(r, c.level, P), 0.0)) <= 1e-6


def test_closed_curves_encircle_origin_not_equilibrium():
    # closed orbits wind once around the singular point x = 0; x* is the saddle outside them
    for c in lf.phase_portrait(P, [0.01 * P.cstar, 0.3 * P.cstar, 0.9 * P.cstar], 200):
        if c.closed:
            assert abs(lf.winding_number(c, [0.0, 0.0])) == 1
            assert lf.winding_number(c, P.xstar) == 0


def test_supercritical_level_is_open():
    curves = lf.phase_portrait(P, [1.5 * P.cstar], 100)
    assert curves and not any(c.closed for c in curves)


def test_traced_points_lie_on_level():
    for c in lf.phase_portrait(P, LEVELS, 150):
        pts = c.points
        keep = np.hypot(pts[:, 0], pts[:, 1]) > 0
        vals = np.array([lf.level_constant(p, P) for p in pts[keep]])
        assert np.max(np.abs(vals / c.level - 1)) < 1e-8


def test_portrait_circular_case():
    q = TwoRingParams(1.0, 1.0, 1.0)
    curves = lf.phase_portrait(q, [0.25, 1.0], 64)
    assert [c.closed for c in curves] == [True, True]
    r = np.hypot(curves[1].x1, curves[1].x2)
    assert np.allclose(r, 1.0, atol=1e-12)
