import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from felab.classical import MixtureXi
from felab.parisi import (
    LOG2,
    ControlConfig,
    GridConfig,
    GridError,
    OptimizerConfig,
    StepZeta,
    ZetaError,
    ac_simulate,
    corollary_parisi_check,
    correction_integral,
    coupled_payoffs,
    log_2cosh,
    log_cosh,
    parisi_functional,
    parisi_minimize,
    parisi_pde_solve,
    zeta_combine,
)

SK = MixtureXi((0, 1))
MIXED = MixtureXi((0, 1, 0, 1))
ZERO = MixtureXi(())
FAST = OptimizerConfig(n_restarts=1)

# dense trapezoid nodes for E f(Z), independent of the solver's Gauss-Hermite rule
_Z = np.linspace(-40.0, 40.0, 100_001)
_W = np.exp(-0.5 * _Z**2) * (_Z[1] - _Z[0]) / math.sqrt(2 * math.pi)


def gaussian_mean(values):
    return float(np.sum(values * _W))


def e_log_cosh(v):
    return gaussian_mean(log_cosh(math.sqrt(v) * _Z))


# ---------------------------------------------------------------- StepZeta


def test_step_zeta_evaluation():
    z = StepZeta((0.0, 0.4, 1.0), (0.3, 0.8))
    assert z(0.0) == 0.3 and z(0.39) == 0.3
    assert z(0.4) == 0.8  # right-continuous
    assert z(1.0) == 0.8
    assert np.array_equal(z(np.array([0.1, 0.5])), [0.3, 0.8])


@pytest.mark.parametrize(
    "bps, vals",
    [((0.0, 1.0), (1.2,)), ((0.0, 0.5, 1.0), (0.8, 0.3)), ((0.1, 1.0), (0.5,)), ((0.0, 0.5, 0.5, 1.0), (0.1, 0.2, 0.3))],
)
def test_step_zeta_rejects(bps, vals):
    with pytest.raises(ZetaError):
        StepZeta(bps, vals)


def test_step_zeta_non_monotone_allowed_when_flagged():
    assert StepZeta((0.0, 0.5, 1.0), (0.8, 0.3), monotone=False).k == 2


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1, 2), min_size=1, max_size=4), st.data())
def test_from_raw_is_valid(values, data):
    bps = data.draw(st.lists(st.floats(-1, 2), min_size=len(values) - 1, max_size=len(values) - 1))
    z = StepZeta.from_raw(bps, values)
    assert z.breakpoints[0] == 0.0 and z.breakpoints[-1] == 1.0
    assert all(0 <= m <= 1 for m in z.values)
    assert list(z.values) == sorted(z.values)


# ---------------------------------------------------------------- PDE


def test_terminal_condition():
    sol = parisi_pde_solve(SK, StepZeta.constant(0.5))
    assert np.max(np.abs(sol.phi[-1] - np.log(np.cosh(sol.x)))) < 1e-14


def test_zero_mixture_pde():
    sol = parisi_pde_solve(ZERO, StepZeta.constant(0.5))
    assert sol.phi00 == 0.0
    assert parisi_functional(ZERO, StepZeta.constant(0.3)) == 0.0


@pytest.mark.parametrize("xi", [SK, MIXED, MixtureXi((0, 0.25)), MixtureXi((0, 0, 0.7))])
def test_zeta_one_closed_form(xi):
    # E cosh(aZ) = exp(a^2 / 2)
    sol = parisi_pde_solve(xi, StepZeta.constant(1.0))
    assert abs(sol.phi00 - xi.d1(1.0) / 2) < 1e-8
    assert abs(parisi_functional(xi, StepZeta.constant(1.0)) - xi(1.0) / 2) < 1e-8


@pytest.mark.parametrize("xi", [SK, MIXED, MixtureXi((0, 0.25))])
def test_zeta_zero_quadrature(xi):
    sol = parisi_pde_solve(xi, StepZeta.constant(0.0))
    assert abs(sol.phi00 - e_log_cosh(xi.d1(1.0))) < 1e-8


def test_sk_zeta_zero_functional():
    assert abs(parisi_functional(SK, StepZeta.constant(0.0)) - e_log_cosh(2.0)) < 1e-8


def test_two_step_nested_quadrature():
    zeta = StepZeta((0.0, 0.4, 1.0), (0.3, 0.8))
    v1, v2 = SK.d1(0.4), SK.d1(1.0) - SK.d1(0.4)
    m1, m2 = zeta.values
    # inner: (1/m2) log E cosh(y + sqrt(v2) Z)^m2 for each outer node y
    y = math.sqrt(v1) * _Z[::50]
    w_outer = np.exp(-0.5 * _Z[::50] ** 2)
    w_outer /= w_outer.sum()
    inner = np.array([math.log(gaussian_mean(np.cosh(yy + math.sqrt(v2) * _Z) ** m2)) / m2 for yy in y])
    oracle = math.log(np.sum(w_outer * np.exp(m1 * inner))) / m1
    assert abs(parisi_pde_solve(SK, zeta).phi00 - oracle) < 1e-8


def test_substeps_do_not_change_solution():
    zeta = StepZeta((0.0, 0.3, 0.7, 1.0), (0.1, 0.5, 0.9))
    a = parisi_pde_solve(MIXED, zeta)
    b = parisi_pde_solve(MIXED, zeta, GridConfig(dt_max=0.05))
    assert len(b.times) > len(a.times)
    assert abs(a.phi00 - b.phi00) < 1e-9


@pytest.mark.parametrize("xi", [SK, MIXED])
def test_grid_doubling(xi):
    zeta = StepZeta((0.0, 0.3, 0.7, 1.0), (0.1, 0.5, 0.9))
    a = parisi_pde_solve(xi, zeta).phi00
    b = parisi_pde_solve(xi, zeta, GridConfig().refined()).phi00
    assert abs(a - b) < 1e-7


def test_convexity_and_slope():
    sol = parisi_pde_solve(MIXED, StepZeta((0.0, 0.5, 1.0), (0.2, 0.7)), GridConfig(dt_max=0.1))
    second = sol.phi[:, 2:] - 2 * sol.phi[:, 1:-1] + sol.phi[:, :-2]
    assert second.min() >= -1e-8
    assert np.abs(sol.dphi).max() <= 1.0


def test_gradient_zeta_one():
    # zeta = 1 keeps Phi(t, x) = log cosh x + const, so d_x Phi = tanh x
    sol = parisi_pde_solve(SK, StepZeta.constant(1.0), GridConfig(dt_max=0.25))
    assert np.max(np.abs(sol.dphi[:, 1:-1] - np.tanh(sol.x[1:-1]))) < 1e-5


def test_grid_errors():
    with pytest.raises(GridError):
        GridConfig(nx=2048)
    with pytest.raises(GridError):
        GridConfig(nx=1025)
    with pytest.raises(GridError):
        GridConfig(n_nodes=32)
    with pytest.raises(GridError):
        parisi_pde_solve(MixtureXi((0, 16.0)), StepZeta.constant(0.5), GridConfig(half_width=10.0))
    with pytest.raises(ValueError):
        parisi_pde_solve(MixtureXi((0.5, 1.0)), StepZeta.constant(0.5))


def test_time_index():
    sol = parisi_pde_solve(SK, StepZeta.constant(0.5), GridConfig(dt_max=0.25))
    assert list(sol.times) == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert list(sol.time_index([0.0, 0.1, 0.2, 0.99])) == [0, 0, 1, 4]


def test_dump_csv(tmp_path):
    sol = parisi_pde_solve(SK, StepZeta.constant(0.5))
    path = tmp_path / "phi.csv"
    sol.dump_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,x,phi"
    assert len(lines) == 1 + 2 * len(sol.x)


# ---------------------------------------------------------------- functional


@pytest.mark.parametrize("xi", [SK, MIXED, MixtureXi((0, 0.3, 0.5))])
def test_correction_integral_vs_quad(xi):
    zeta = StepZeta((0.0, 0.2, 0.6, 1.0), (0.1, 0.4, 0.9))
    expected = 0.5 * sum(m * quad(lambda t: t * xi.d2(t), a, b)[0] for a, b, m in zeta.intervals())
    assert correction_integral(xi, zeta) == pytest.approx(expected, rel=1e-12)


# ---------------------------------------------------------------- zeta combination


def test_combine_equal_zetas():
    z = StepZeta((0.0, 0.3, 1.0), (0.2, 0.6))
    c = zeta_combine(SK, z, MIXED, z)
    t = np.linspace(0, 1, 101)
    assert np.allclose(c(t), z(t), atol=1e-15)


def test_combine_equal_mixtures_midpoint():
    z1 = StepZeta((0.0, 0.3, 1.0), (0.2, 0.6))
    z2 = StepZeta((0.0, 0.7, 1.0), (0.1, 0.9))
    c = zeta_combine(SK, z1, SK, z2)
    t = np.linspace(0, 1, 101)
    assert np.allclose(c(t), 0.5 * (z1(t) + z2(t)), atol=1e-15)


def test_combine_spot_values():
    c = zeta_combine(SK, StepZeta.constant(0.2), MixtureXi((0, 0, 0, 1)), StepZeta.constant(0.8))
    for t in (0.0, 0.5, 1.0):
        assert c(t) == pytest.approx((0.4 + 9.6 * t**2) / (2 + 12 * t**2), rel=1e-14)


def test_combine_right_limit_at_zero():
    c = zeta_combine(MixtureXi((0, 0, 1)), StepZeta.constant(0.2), MixtureXi((0, 0, 0, 1)), StepZeta.constant(0.8))
    assert c(0.0) == 0.2
    same = zeta_combine(MixtureXi((0, 0, 1)), StepZeta.constant(0.2), MixtureXi((0, 0, 3)), StepZeta.constant(0.8))
    assert same(0.0) == pytest.approx(0.65)


def test_combine_both_zero_rejected():
    with pytest.raises(ZetaError):
        zeta_combine(ZERO, StepZeta.constant(0.2), MixtureXi((1.0,)), StepZeta.constant(0.8))


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.floats(0, 2), min_size=3, max_size=4),
    st.lists(st.floats(0, 2), min_size=3, max_size=4),
    st.floats(0, 1),
    st.floats(0, 1),
    st.floats(0, 1),
)
def test_combine_range(c1, c2, a, b, split):
    xi1, xi2 = MixtureXi((0, 0.1) + tuple(c1)), MixtureXi((0, 0.1) + tuple(c2))
    z1 = StepZeta.from_raw([split], [a, b])
    z2 = StepZeta.constant(b)
    comb = zeta_combine(xi1, z1, xi2, z2)
    t = np.linspace(0, 1, 57)
    lo, hi = min(z1.values + z2.values), max(z1.values + z2.values)
    assert np.all(comb(t) >= lo - 1e-12) and np.all(comb(t) <= hi + 1e-12)
    step = comb.to_step(32)
    assert step.k >= 32 and not step.monotone


# ---------------------------------------------------------------- minimisation


def test_minimize_zero_mixture():
    zeta, value = parisi_minimize(ZERO, 2)
    assert value == 0.0


def test_minimize_rs_anchor():
    xi = MixtureXi((0, 0.09))
    res = parisi_minimize(xi, 2, FAST)
    anchors = [parisi_functional(xi, StepZeta.constant(m), FAST.grid) for m in (0.0, 1.0)]
    assert res.value <= min(anchors) + 1e-12
    assert abs(res.value - min(anchors)) < 1e-6
    assert abs(res.value - xi(1.0) / 2) < 1e-6


@pytest.mark.slow
def test_minimize_nesting_low_temperature():
    res = parisi_minimize(MixtureXi((0, 2)), 2, FAST)
    k1, k2 = res.values_by_k
    assert k2 <= k1 + 1e-8
    assert k2 < k1 - 1e-3  # the step class of size 2 strictly helps below the transition
    assert not res.flags


def test_minimize_k_range():
    with pytest.raises(ValueError):
        parisi_minimize(SK, 5)


# ---------------------------------------------------------------- stochastic control


def test_control_zero_mixture():
    est = ac_simulate(ZERO, StepZeta.constant(0.5), ControlConfig(n_paths=100, control="pde_feedback"))
    assert est.mean == 0.0 and est.stderr == 0.0


def test_control_zero_matches_quadrature():
    est = ac_simulate(SK, StepZeta.constant(0.5), ControlConfig(n_paths=100_000, seed=1))
    assert abs(est.mean - e_log_cosh(2.0)) <= 3 * est.stderr


def test_control_feedback_attains_phi():
    zeta = StepZeta((0.0, 0.5, 1.0), (0.3, 0.8))
    sol = parisi_pde_solve(SK, zeta, GridConfig(dt_max=1 / 256))
    fb = ac_simulate(SK, zeta, ControlConfig(n_paths=20_000, seed=2, control="pde_feedback"), solution=sol)
    const = ac_simulate(SK, zeta, ControlConfig(n_paths=20_000, seed=2, control="constant", u0=0.5))
    assert abs(fb.mean - sol.phi00) <= 3 * fb.stderr + 2e-3
    assert const.mean <= sol.phi00 + 3 * const.stderr
    assert fb.mean > const.mean


def test_control_config_validation():
    with pytest.raises(ValueError):
        ControlConfig(u0=1.5)
    with pytest.raises(ValueError):
        ControlConfig(n_steps=999)
    with pytest.raises(ValueError):
        ControlConfig(control="bang_bang")


def test_control_thread_independence():
    zeta = StepZeta.constant(0.5)
    a = ac_simulate(SK, zeta, ControlConfig(n_paths=20_000, seed=4, threads=1))
    b = ac_simulate(SK, zeta, ControlConfig(n_paths=20_000, seed=4, threads=3))
    assert a == b


# ---------------------------------------------------------------- corollary


def test_log_2cosh_subadditive_sweep():
    gen = np.random.default_rng(0)
    x, y = gen.normal(0, 5, 10_000), gen.normal(0, 5, 10_000)
    assert np.all(log_2cosh(x + y) <= log_2cosh(x) + log_2cosh(y) + 1e-12)


@given(st.floats(-50, 50), st.floats(-50, 50))
def test_log_2cosh_subadditive_property(x, y):
    assert log_2cosh(x + y) <= log_2cosh(x) + log_2cosh(y) + 1e-12


def test_corollary_zero_summand():
    rep = corollary_parisi_check(MixtureXi((0, 0.25)), ZERO, k=1, config=FAST)
    assert abs(rep.slack - LOG2) < 1e-8
    assert rep.F2 == 0.0 and rep.F12 == rep.F1
    assert rep.holds and rep.chain_holds


def test_corollary_rs_pair():
    xi = MixtureXi((0, 0.25))
    rep = corollary_parisi_check(xi, xi, k=1, config=FAST)
    F12, F1, F2, slack = rep
    # all three values are replica symmetric: F = xi(1) / 2
    assert F1 == pytest.approx(0.125, abs=1e-6) and F12 == pytest.approx(0.25, abs=1e-6)
    assert slack == pytest.approx(LOG2, abs=1e-6)
    assert rep.chain_holds


def test_coupled_paths_pathwise_bound():
    paths, mismatch = coupled_payoffs(
        SK, StepZeta((0.0, 0.5, 1.0), (0.2, 0.9)), MixtureXi((0, 0, 0, 0.5)), StepZeta.constant(0.6)
    )
    assert mismatch < 1e-10
    assert paths.max_excess <= 1e-12
