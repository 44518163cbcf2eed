import itertools
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate
from scipy.special import roots_hermitenorm

from felab.classical import (
    ClauseModel,
    MixtureXi,
    bernoulli_pm,
    brw_law,
    csp_law,
    discrete,
    ea_pattern,
    empirical_free_convolution,
    fixed_clause_sample,
    gaussian,
    general_variance_pspin_law,
    goe_law,
    grem_law,
    haar_orthogonal,
    ising_law,
    lattice_edges,
    mixed_pspin_law,
    multispecies_law,
    orth_inv_sk_law,
    perceptron_law,
    point_mass,
    point_spectrum,
    random_field_law,
    random_tree_automorphism,
    rfim_law,
    semicircle,
    spiked_matrix_law,
    two_atoms,
    two_replica_law,
    uniform,
    uniform_spectrum,
)
from felab.classical.rfim import spike_law
from felab.core import (
    HOLDS,
    LawError,
    StateMC,
    annealed_bound,
    deterministic_law,
    hypercube,
    partition_function,
    quenched_free_energy,
    scale_law,
    subadditivity_report,
    sum_laws,
    zero_law,
)
from felab.seeding import DISORDER, child, realization_seed, rng


def draws(law, states, n, seed=0):
    """Energies at fixed ``states`` over ``n`` independent realizations, shape (n, len(states))."""
    return np.array([law.sample(realization_seed(seed, 0, r)).energies(states) for r in range(n)])


def within(values, target, k=4.0):
    values = np.asarray(values, dtype=float)
    se = values.std(ddof=1) / math.sqrt(values.size)
    return abs(values.mean() - target) <= k * se + 1e-12


def gh_expect(f, n=120):
    x, w = roots_hermitenorm(n)
    return float(np.sum(w * f(x)) / np.sum(w))


# ---------------------------------------------------------------- xi


def test_xi_horner_matches_direct():
    xi = MixtureXi((0.3, 0.0, 1.5, 0.25))
    x = np.linspace(-1, 1, 11)
    direct = 0.3 * x + 1.5 * x**3 + 0.25 * x**4
    assert np.allclose(xi(x), direct, rtol=0, atol=1e-15)
    assert np.allclose(xi.d1(x), 0.3 + 4.5 * x**2 + x**3, atol=1e-15)
    assert np.allclose(xi.d2(x), 9 * x + 3 * x**2, atol=1e-15)
    assert xi(0.0) == 0.0 and xi(1.0) == pytest.approx(2.05)


def test_xi_rejects_negative():
    with pytest.raises(ValueError):
        MixtureXi((0.1, -1.0))


@given(st.lists(st.floats(0, 3), min_size=1, max_size=5), st.floats(0, 1), st.floats(0, 1))
def test_xi_integral_identity(coeffs, a, b):
    xi = MixtureXi(tuple(coeffs))
    val, _ = integrate.quad(lambda t: t * xi.d2(t), a, b)
    assert xi.t_d2_integral(a, b) == pytest.approx(val, abs=1e-10)


# ---------------------------------------------------------------- distributions


@pytest.mark.parametrize(
    "law",
    [gaussian(0.3, 2.0), bernoulli_pm(0.3), uniform(-1.0, 2.0), discrete([-1.0, 0.5, 2.0], [0.2, 0.5, 0.3])],
)
@pytest.mark.parametrize("t", [-1.5, 0.0, 0.7])
def test_log_mgf_against_quadrature(law, t):
    if law.kind == "gaussian":
        m, v = law.params
        val, _ = integrate.quad(lambda x: math.exp(t * x - (x - m) ** 2 / (2 * v)) / math.sqrt(2 * math.pi * v), -40, 40)
    elif law.kind == "bernoulli_pm":
        p = law.params[0]
        val = p * math.exp(t) + (1 - p) * math.exp(-t)
    elif law.kind == "uniform":
        a, b = law.params
        val, _ = integrate.quad(lambda x: math.exp(t * x) / (b - a), a, b)
    else:
        atoms, weights = law.params
        val = sum(w * math.exp(t * a) for a, w in zip(atoms, weights))
    assert law.log_mgf(t) == pytest.approx(math.log(val), rel=1e-10, abs=1e-12)


def test_sign_symmetry_flags():
    assert gaussian(0, 2).sign_symmetric and not gaussian(0.1, 1).sign_symmetric
    assert bernoulli_pm(0.5).sign_symmetric and not bernoulli_pm(0.6).sign_symmetric
    assert uniform(-2, 2).sign_symmetric and not uniform(-1, 2).sign_symmetric
    assert discrete([-1, 1, 0], [0.25, 0.25, 0.5]).sign_symmetric
    assert not discrete([-1, 2], [0.5, 0.5]).sign_symmetric


@pytest.mark.parametrize("law", [semicircle(1.5), two_atoms(0.7), uniform_spectrum(-1, 3), point_spectrum(2.0)])
def test_spectral_support_and_moments(law):
    x = law.sample(rng(1), 20000)
    lo, hi = law.support
    assert x.min() >= lo and x.max() <= hi
    for k in (1, 2, 4):
        assert within(x**k, law.moment(k)) or np.all(x**k == law.moment(k))


def test_semicircle_cdf_ks():
    law = semicircle(1.0)
    x = np.sort(law.sample(rng(2), 5000))
    ecdf = np.arange(1, x.size + 1) / x.size
    assert np.max(np.abs(ecdf - law.cdf(x))) < 0.03


# ---------------------------------------------------------------- trees


def test_brw_trivial():
    law = brw_law(2, 1, point_mass(0.0), 1.0)
    assert quenched_free_energy(law, n_disorder=5, seed=0).mean == 0.0


@pytest.mark.parametrize("nu", [gaussian(0, 1), bernoulli_pm(0.5), uniform(-1, 1)])
def test_brw_annealed(nu):
    depth, beta = 4, 0.7
    assert annealed_bound(brw_law(3, depth, nu, beta)) == pytest.approx((depth + 1) * nu.log_mgf(beta), rel=1e-14)


def test_brw_path_sum_includes_root():
    law = brw_law(2, 2, gaussian(0, 1), 1.0)
    ss = realization_seed(0, 0, 0)
    gen = rng(ss)
    x0, x1, x2 = gen.standard_normal(1), gen.standard_normal(2), gen.standard_normal(4)
    expected = [x0[0] + x1[w // 2] + x2[w] for w in range(4)]
    assert np.allclose(law.sample(ss).table(law.space), expected, atol=1e-15)


def test_brw_jensen_weak_disorder():
    law = brw_law(2, 3, gaussian(0, 1), 0.2)
    est = quenched_free_energy(law, n_disorder=2000, seed=4)
    assert est.mean <= annealed_bound(law) + 3 * est.stderr


def test_grem_identical_levels_match_brw():
    nu = gaussian(0, 1)
    a = draws(grem_law(2, 3, [nu] * 4), np.array([5]), 3000, seed=1)[:, 0]
    b = draws(brw_law(2, 3, nu), np.array([5]), 3000, seed=2)[:, 0]
    d = a.mean() - b.mean()
    assert abs(d) < 4 * math.sqrt(a.var() / a.size + b.var() / b.size)
    assert abs(a.var() - 4) < 4 * 4 * math.sqrt(2 / a.size)
    assert abs(b.var() - 4) < 4 * 4 * math.sqrt(2 / b.size)


def test_grem_two_level_variance():
    a, b = 0.6, 1.3
    law = grem_law(3, 1, [gaussian(0, a * a), gaussian(0, b * b)])
    h = draws(law, np.array([0, 2]), 10000)
    var = a * a + b * b
    for col in range(2):
        assert abs(h[:, col].var(ddof=1) - var) < 4 * var * math.sqrt(2 / 10000)


def test_grem_sum_adds_level_variances():
    u = [gaussian(0, 0.5), gaussian(0, 1.0), gaussian(0, 0.2)]
    v = [gaussian(0, 0.3), gaussian(0, 0.1), gaussian(0, 0.9)]
    total = sum_laws(grem_law(2, 2, u), grem_law(2, 2, v))
    h = draws(total, np.array([0, 1, 3]), 10000)
    # leaves 0, 1 share levels 0-1; leaves 0, 3 share the root only
    assert within(h[:, 0] ** 2, 0.8 + 1.1 + 1.1)
    assert within(h[:, 0] * h[:, 1], 0.8 + 1.1)
    assert within(h[:, 0] * h[:, 2], 0.8)


def test_grem_length_mismatch():
    with pytest.raises(LawError):
        grem_law(2, 3, [gaussian()] * 3)


def test_tree_size_guard():
    with pytest.raises(LawError):
        brw_law(2, 23, gaussian())


def test_tree_automorphism_preserves_ancestry():
    d, depth = 3, 3
    g = random_tree_automorphism(d, depth, rng(5))
    assert sorted(g) == list(range(d**depth))
    for w1, w2 in itertools.combinations(range(d**depth), 2):
        for level in range(1, depth + 1):
            same = w1 // d ** (depth - level) == w2 // d ** (depth - level)
            assert same == (g[w1] // d ** (depth - level) == g[w2] // d ** (depth - level))


def _paired_moments_equal(a, b, k=4.0):
    ok = True
    for power in (1, 2, 3):
        diff = a**power - b**power
        se = diff.std(ddof=1) / math.sqrt(diff.size)
        ok &= abs(diff.mean()) <= k * se + 1e-12
    return ok


def test_brw_tree_invariance():
    d, depth = 2, 3
    law = brw_law(d, depth, bernoulli_pm(0.3), 1.0)
    g = random_tree_automorphism(d, depth, rng(8))
    tables = np.array([law.sample(realization_seed(3, 0, r)).table(law.space) for r in range(1000)])
    pair = np.array([0, 1])
    a = tables[:, pair[0]] * tables[:, pair[1]]
    b = tables[:, g[pair[0]]] * tables[:, g[pair[1]]]
    assert _paired_moments_equal(tables[:, 0], tables[:, g[0]])
    assert _paired_moments_equal(a, b)
    # a permutation that is not an automorphism breaks the sibling correlation
    c = tables[:, 0] * tables[:, d**depth - 1]
    assert not _paired_moments_equal(a, c)


# ---------------------------------------------------------------- p-spin


def test_pspin_covariance_law():
    n, draws_n = 8, 100000
    xi = MixtureXi((0, 1, 0.5))
    law = mixed_pspin_law(n, xi)
    states = hypercube(n).sample(rng(21), 10)
    h = draws(law, states, draws_n, seed=7)
    for i in range(5):
        s1, s2 = states[2 * i], states[2 * i + 1]
        target = n * xi(float(s1 @ s2) / n)
        assert within(h[:, 2 * i] * h[:, 2 * i + 1], target)


def test_pspin_memory_guard():
    with pytest.raises(LawError):
        mixed_pspin_law(60, MixtureXi((0, 0, 0, 0, 1)))


def test_pspin_temperature_form():
    n = 8
    lb = lambda b: mixed_pspin_law(n, MixtureXi((0, 1)), b)  # noqa: E731
    rep = subadditivity_report(lb(0.5), lb(0.5), n_disorder=1000, seed=3, combined=lb(math.sqrt(0.5)))
    assert rep.verdict == HOLDS


def test_pspin_sum_in_distribution_equals_beta_combination():
    n = 5
    s = hypercube(n).sample(rng(1), 2)
    a = draws(sum_laws(mixed_pspin_law(n, MixtureXi((0, 1)), 0.5), mixed_pspin_law(n, MixtureXi((0, 1)), 0.5)), s, 5000, 1)
    target = 0.5 * n * MixtureXi((0, 1))(float(s[0] @ s[1]) / n)
    assert within(a[:, 0] * a[:, 1], target)


def test_spherical_pspin_covariance():
    n = 6
    xi = MixtureXi((0, 1, 0.3))
    law = mixed_pspin_law(n, xi, space="sphere")
    pts = law.space.sample(rng(4), 4)
    h = draws(law, pts, 20000, seed=2)
    for i in range(2):
        target = n * xi(float(pts[2 * i] @ pts[2 * i + 1]) / n)
        assert within(h[:, 2 * i] * h[:, 2 * i + 1], target)


def test_general_uniform_pattern_matches_mixed():
    n = 4
    var = {2: np.full((n, n), 0.7), 3: np.full((n, n, n), 0.2)}
    gen_law = general_variance_pspin_law(n, var)
    mix = mixed_pspin_law(n, MixtureXi((0, 0.7, 0.2)))
    s = np.array([[1, -1, 1, 1.0], [1, 1, -1, 1.0]])
    a = draws(gen_law, s, 10000, 1)
    b = draws(mix, s, 10000, 2)
    target = n * MixtureXi((0, 0.7, 0.2))(float(s[0] @ s[1]) / n)
    assert within(a[:, 0] * a[:, 1], target) and within(b[:, 0] * b[:, 1], target)
    assert annealed_bound(gen_law) == pytest.approx(annealed_bound(mix), rel=1e-14)


def test_ea_torus_variance():
    pattern = ea_pattern((2, 2))
    # 2x2 torus: horizontal edges (0,1), (2,3); vertical (0,2), (1,3)
    assert sorted(pattern[2]) == [(0, 1), (0, 2), (1, 3), (2, 3)]
    law = general_variance_pspin_law(4, pattern)
    oracle = sum(1.0 / 4 for _ in [(0, 1), (2, 3), (0, 2), (1, 3)])
    assert 2 * annealed_bound(law) == pytest.approx(oracle, rel=1e-14)
    h = draws(law, np.array([[1, -1, -1, 1.0]]), 10000)[:, 0]
    assert within(h**2, oracle)


def test_general_sum_of_patterns():
    p1 = {2: {(0, 1): 1.0, (1, 2): 0.5}}
    p2 = {2: {(0, 1): 0.25, (2, 0): 2.0}}
    both = {2: {(0, 1): 1.25, (1, 2): 0.5, (2, 0): 2.0}}
    total = sum_laws(general_variance_pspin_law(3, p1), general_variance_pspin_law(3, p2))
    direct = general_variance_pspin_law(3, both)
    s = np.array([[1, -1, 1.0], [1, 1, 1.0]])
    a, b = draws(total, s, 10000, 1), draws(direct, s, 10000, 2)
    for h in (a, b):
        assert within(h[:, 0] ** 2, 3.75 / 3)
        # overlap-dependent covariance: -1.25 - 0.5 + 2.0
        assert within(h[:, 0] * h[:, 1], (-1.25 - 0.5 + 2.0) / 3)


def test_general_negative_variance_rejected():
    with pytest.raises(LawError):
        general_variance_pspin_law(3, {2: {(0, 1): -1.0}})


def test_lattice_edges_small():
    assert lattice_edges((3,), periodic=True) == [(0, 1), (0, 2), (1, 2)]
    assert lattice_edges((3,), periodic=False) == [(0, 1), (1, 2)]
    assert len(lattice_edges((3, 3))) == 18


def test_multispecies_single_species_is_spherical_pspin():
    n = 6
    law = multispecies_law([n], {2: np.array([[1.0]]), 3: np.array([[[0.5]]])})
    pts = law.space.sample(rng(2), 2)
    h = draws(law, pts, 20000)
    assert within(h[:, 0] * h[:, 1], n * MixtureXi((0, 1, 0.5))(float(pts[0] @ pts[1]) / n))


def test_multispecies_zero_pattern():
    law = multispecies_law([3, 4], {2: np.zeros((2, 2))})
    est = quenched_free_energy(law, n_disorder=5, seed=0, state_mc=StateMC(50))
    assert est.mean == 0.0


def test_multispecies_asymmetric_rejected():
    with pytest.raises(LawError):
        multispecies_law([3, 3], {2: np.array([[1.0, 0.2], [0.5, 1.0]])})


def test_multispecies_pattern_subadditivity():
    pa = {2: np.array([[1.0, 0.3], [0.3, 0.5]])}
    pb = {2: np.array([[0.2, 0.6], [0.6, 1.0]])}
    la, lb = multispecies_law([6, 6], pa), multispecies_law([6, 6], pb)
    rep = subadditivity_report(la, lb, n_disorder=300, seed=1, state_mc=StateMC(2000))
    assert rep.verdict == HOLDS


def test_multispecies_variance_formula():
    sizes = [2, 3]
    pat = {2: np.array([[1.0, 0.4], [0.4, 2.0]])}
    law = multispecies_law(sizes, pat)
    pts = law.space.sample(rng(3), 1)
    h = draws(law, pts, 20000)[:, 0]
    n = 5
    oracle = (1.0 * 2 * 2 + 2 * 0.4 * 2 * 3 + 2.0 * 3 * 3) / n
    assert within(h**2, oracle)
    assert 2 * annealed_bound(law) == pytest.approx(oracle, rel=1e-14)


def test_two_replica_full_overlap():
    n = 6
    xi = MixtureXi((0, 1))
    law = two_replica_law(n, xi, 1.0, 0.8)
    twice = scale_law(mixed_pspin_law(n, xi, 0.8, space="sphere"), 2.0)
    mc = StateMC(500)
    a = quenched_free_energy(law, n_disorder=200, seed=2, state_mc=mc)
    b = quenched_free_energy(twice, n_disorder=200, seed=2, state_mc=mc)
    assert abs(a.mean - b.mean) <= 3 * math.hypot(a.total_stderr, b.total_stderr) + 1e-12


def test_two_replica_energy_is_sum_of_replicas():
    n = 5
    law = two_replica_law(n, MixtureXi((0, 1, 0.5)), 0.3)
    base = mixed_pspin_law(n, MixtureXi((0, 1, 0.5)), space="sphere")
    pairs = law.space.sample(rng(0), 3)
    ss = realization_seed(0, 0, 0)
    h, hb = law.sample(ss), base.sample(ss)
    assert np.allclose(h.energies(pairs), hb.energies(pairs[:, :n]) + hb.energies(pairs[:, n:]), atol=1e-12)


def test_two_replica_variance_vector_subadditivity():
    n, R = 8, 0.3
    l1 = two_replica_law(n, MixtureXi((0, 0.5)), R)
    l2 = two_replica_law(n, MixtureXi((0, 0.2, 0.4)), R)
    rep = subadditivity_report(l1, l2, n_disorder=300, seed=5, state_mc=StateMC(2000))
    assert rep.verdict == HOLDS


def test_two_replica_bad_overlap():
    with pytest.raises(ValueError):
        two_replica_law(4, MixtureXi((0, 1)), 1.2)


# ---------------------------------------------------------------- Haar / orthogonally invariant


def test_haar_orthogonality():
    o = haar_orthogonal(12, 3)
    assert np.max(np.abs(o.T @ o - np.eye(12))) < 1e-10


def test_haar_one_dimensional_signs():
    signs = np.array([haar_orthogonal(1, s)[0, 0] for s in range(10000)])
    assert set(np.unique(signs)) <= {-1.0, 1.0}
    assert within(signs, 0.0, k=3.0)


def test_haar_first_entry_second_moment():
    gen = rng(12)
    x = np.array([haar_orthogonal(8, gen)[0, 0] ** 2 for _ in range(100000)])
    assert within(x, 1 / 8, k=3.0)


def test_orth_inv_point_masses():
    n = 6
    zero = orth_inv_sk_law(n, point_spectrum(0.0), 1.0)
    assert quenched_free_energy(zero, n_disorder=5, seed=1).mean == 0.0
    lam, beta = 0.7, 1.3
    est = quenched_free_energy(orth_inv_sk_law(n, point_spectrum(lam), beta), n_disorder=5, seed=1)
    assert est.mean == pytest.approx(beta * lam * n, abs=1e-10)


def test_orth_inv_subadditivity():
    l1 = orth_inv_sk_law(8, semicircle(1.0), 0.8)
    l2 = orth_inv_sk_law(8, two_atoms(1.0), 0.8)
    rep = subadditivity_report(l1, l2, n_disorder=1000, seed=2)
    assert rep.verdict == HOLDS


def test_free_convolution_neutral_element():
    nu = semicircle(1.0)
    out = empirical_free_convolution(nu, point_spectrum(0.0), 1024, seed=3)
    x = np.sort(out.params[0])
    ecdf = np.arange(1, x.size + 1) / x.size
    assert np.max(np.abs(ecdf - nu.cdf(x))) < 0.05


def test_free_convolution_semicircle_moments():
    m2, m4 = [], []
    for seed in range(8):
        out = empirical_free_convolution(semicircle(1.0), semicircle(1.0), 1024, seed=seed)
        m2.append(out.moment(2))
        m4.append(out.moment(4))
    m2, m4 = np.array(m2), np.array(m4)
    assert within(m2, 2.0, k=3.0)
    # semicircle of variance 2: fourth moment 2 * 2^2
    assert abs(m4.mean() - 8.0) < 0.05 * 8.0


def test_free_convolution_small_dimension_rejected():
    with pytest.raises(ValueError):
        empirical_free_convolution(semicircle(), semicircle(), 100, seed=0)


def test_free_convolution_subadditivity():
    n, beta = 10, 0.5
    nu1, nu2 = semicircle(1.0), uniform_spectrum(-1.0, 1.0)
    conv = empirical_free_convolution(nu1, nu2, 1024, seed=11)
    l1, l2, l12 = (orth_inv_sk_law(n, nu, beta) for nu in (nu1, nu2, conv))
    rep = subadditivity_report(l1, l2, n_disorder=300, seed=4, combined=l12)
    assert rep.slack >= -3 * rep.combined_stderr - 0.05 * n


# ---------------------------------------------------------------- CSPs


def test_csp_alpha_zero():
    law = csp_law(6, ClauseModel(3, 0.0))
    assert quenched_free_energy(law, n_disorder=4, seed=0).mean == 0.0


@pytest.mark.parametrize("k", [2, 3])
def test_single_clause_closed_form(k):
    n, beta = 5, 20.0
    model = ClauseModel(k, 0.0)
    idx = np.arange(k).reshape(1, k)
    signs = np.ones((1, k))
    sample = fixed_clause_sample(model, idx, signs, beta)
    lz = partition_function(sample, hypercube(n)).value
    assert lz == pytest.approx(math.log(1 - 2.0**-k * (1 - math.exp(-beta))), abs=1e-12)


def test_ksat_violation_rule():
    model = ClauseModel(3, 0.0)
    sample = fixed_clause_sample(model, [[0, 1, 2]], [[1, -1, 1]], 1.0)
    # violated iff every literal s_l * sigma_l is -1
    assert sample.evaluate(np.array([-1, 1, -1, 1.0])) == -1.0
    assert sample.evaluate(np.array([-1, -1, -1, 1.0])) == 0.0


def test_nae_violation_rule():
    model = ClauseModel(3, 0.0, clause_type="nae_ksat")
    sample = fixed_clause_sample(model, [[0, 1, 2]], [[1, 1, 1]], 1.0)
    assert sample.evaluate(np.array([1, 1, 1.0])) == -1.0
    assert sample.evaluate(np.array([-1, -1, -1.0])) == -1.0
    assert sample.evaluate(np.array([1, -1, 1.0])) == 0.0


def test_csp_alpha_subadditivity():
    n, k = 12, 3
    l1 = csp_law(n, ClauseModel(k, 1.0))
    l2 = csp_law(n, ClauseModel(k, 1.0))
    rep = subadditivity_report(l1, l2, n_disorder=500, seed=1, combined=csp_law(n, ClauseModel(k, 2.0)))
    assert rep.verdict == HOLDS


def test_csp_mgf_against_mc():
    law = csp_law(8, ClauseModel(3, 0.5, m_mode="poisson"), 1.5)
    s = np.array([[1, -1, 1, 1, -1, -1, 1, 1.0]])
    e = draws(law, s, 20000)[:, 0]
    assert within(np.exp(e), math.exp(law.marginal_log_mgf(1.0)))
    assert law.params["poisson_truncation_prob"] < 1e-12


def test_custom_table_validation():
    with pytest.raises(LawError):
        ClauseModel(2, 1.0, clause_type="custom", table=(1.0, -0.1, 0.0, 0.0))
    with pytest.raises(LawError):
        ClauseModel(2, 1.0, clause_type="custom", table=(1.0, 0.0))


def test_perceptron_zero_phi():
    law = perceptron_law(6, 1.0, "zero")
    assert quenched_free_energy(law, n_disorder=4, seed=0).mean == 0.0


def test_perceptron_square_matches_enumeration():
    n, alpha, beta, count, seed = 8, 0.5, 0.3, 1000, 6
    law = perceptron_law(n, alpha, "square", beta)
    est = quenched_free_energy(law, n_disorder=count, seed=seed)
    states = np.array(list(itertools.product((1.0, -1.0), repeat=n)))
    oracle = []
    for r in range(count):
        g = rng(child(realization_seed(seed, 0, r), DISORDER)).standard_normal((4, n))
        e = -beta * np.array([sum(float(gj @ s) ** 2 for gj in g) for s in states])
        m = e.max()
        oracle.append(m + math.log(np.exp(e - m).sum()) - n * math.log(2))
    assert np.max(np.abs(est.values - np.array(oracle))) < 1e-12


def test_perceptron_alpha_subadditivity():
    n = 10
    l1 = perceptron_law(n, 0.5, "relu_neg", 0.5)
    rep = subadditivity_report(l1, l1, n_disorder=300, seed=2, combined=perceptron_law(n, 1.0, "relu_neg", 0.5))
    assert rep.verdict == HOLDS


def test_perceptron_negative_phi_rejected():
    with pytest.raises(LawError):
        perceptron_law(4, 1.0, lambda x: np.sin(x))


def test_perceptron_mgf_against_mc():
    law = perceptron_law(5, 0.4, "relu_neg", 0.2)
    s = np.ones((1, 5))
    e = draws(law, s, 20000)[:, 0]
    assert within(np.exp(e), math.exp(law.marginal_log_mgf(1.0)))


# ---------------------------------------------------------------- RFIM and spiked matrix


def test_rfim_field_free_energy():
    beta = 0.8
    law = random_field_law(5, gaussian(0, 1), beta)
    est = quenched_free_energy(law, n_disorder=4000, seed=9)
    assert within(est.values, 5 * gh_expect(lambda x: np.log(np.cosh(beta * x))))


def test_rfim_zero_coupling_is_field_only():
    law = rfim_law((2, 3), gaussian(0, 1), J0=0.0, beta=0.7)
    field, _ = law.parts
    ss = realization_seed(0, 0, 3)
    assert np.array_equal(law.sample(ss).table(law.space), field.sample(child(ss, 0)).table(law.space))


def test_rfim_split_subadditivity():
    law = rfim_law((3, 3), gaussian(0, 1), J0=1.0, beta=0.5)
    field, ising = law.parts
    # only the field is invariant, which is enough: no warning expected
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        rep = subadditivity_report(field, ising, n_disorder=1000, seed=3)
    assert rep.verdict == HOLDS


def test_rfim_rejects_asymmetric_field():
    with pytest.raises(LawError):
        rfim_law((2, 2), gaussian(0.5, 1), 1.0)


def test_ising_energy():
    law = ising_law((2, 2), 1.0, 1.0)
    assert law.sample(0).evaluate(np.ones(4)) == 4.0


def test_spiked_snr_zero_reduces_to_noise():
    n = 6
    s = hypercube(n).sample(rng(1), 2)
    a = draws(spiked_matrix_law(n, snr=0.0), s, 10000, 1)
    b = draws(goe_law(n), s, 10000, 2)
    for h in (a, b):
        assert within(h[:, 0] ** 2, 2 * n)
        assert within(h[:, 0] * h[:, 1], 2 * float(s[0] @ s[1]) ** 2 / n)


def test_spike_only_maximum():
    n = 8
    law = spiked_matrix_law(n, noise="none", spike="uniform_cube", beta=1.0, snr=1.0)
    ss = realization_seed(0, 0, 0)
    table = law.sample(ss).table(law.space)
    assert table.max() == n * n
    v = 1.0 - 2.0 * rng(child(ss, 1)).integers(0, 2, n)
    states = law.space.all_states()
    top = states[table == n * n]
    assert len(top) == 2 and all(np.array_equal(t, v) or np.array_equal(t, -v) for t in top)


def test_spiked_split_subadditivity():
    law = spiked_matrix_law(10, beta=0.3, snr=0.05)
    noise, spike = law.parts
    rep = subadditivity_report(noise, spike, n_disorder=500, seed=6)
    assert rep.verdict == HOLDS


@pytest.mark.parametrize("kind", ["uniform_cube", "uniform_sphere"])
def test_spike_mgf_against_mc(kind):
    n = 6
    law = spike_law(n, kind, 0.02, hypercube(n))
    e = draws(law, np.ones((1, n)), 20000)[:, 0]
    assert within(np.exp(e), math.exp(law.marginal_log_mgf(1.0)))


# ---------------------------------------------------------------- invariance suite


Z2N_LAWS = {
    "mixed_pspin": lambda: mixed_pspin_law(6, MixtureXi((0.3, 1.0, 0.5))),
    "ea": lambda: general_variance_pspin_law(6, ea_pattern((2, 3))),
    "ksat": lambda: csp_law(6, ClauseModel(3, 1.0), 1.0),
    "nae_ksat": lambda: csp_law(6, ClauseModel(3, 1.0, clause_type="nae_ksat"), 1.0),
    "perceptron": lambda: perceptron_law(6, 1.0, "relu_neg", 0.5),
    "random_field": lambda: random_field_law(6, bernoulli_pm(0.5), 1.0),
    "orth_inv_sk": lambda: orth_inv_sk_law(6, uniform_spectrum(-1, 2), 1.0),
    "spiked": lambda: spiked_matrix_law(6, snr=0.3),
}


@pytest.mark.parametrize("name", sorted(Z2N_LAWS))
def test_z2n_invariance(name):
    law = Z2N_LAWS[name]()
    assert "Z2^N" in law.symmetry
    gen = rng(31)
    n = law.space.dim
    s = 1.0 - 2.0 * gen.integers(0, 2, n)
    flip = 1.0 - 2.0 * gen.integers(0, 2, n)
    flip[0] = -1.0
    h = draws(law, np.stack([s, flip * s]), 1000, seed=13)
    assert _paired_moments_equal(h[:, 0], h[:, 1])


def test_invariance_check_detects_asymmetric_law():
    fixed = deterministic_law(hypercube(4), lambda st: st[:, 0] + 0.0)
    noisy = sum_laws(random_field_law(4, gaussian(0, 1), 0.3), fixed)
    s = np.ones(4)
    h = draws(noisy, np.stack([s, -s]), 1000, seed=1)
    assert not _paired_moments_equal(h[:, 0], h[:, 1])


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32))
def test_zero_law_any_space(seed):
    law = zero_law(hypercube(3))
    assert quenched_free_energy(law, n_disorder=2, seed=seed).mean == 0.0
