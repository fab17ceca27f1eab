import cmath
import math

import numpy as np
import pytest
from numpy.polynomial import polynomial as npoly

from matcert import interp, linalg
from matcert.errors import ConditioningError, ConditioningWarning, DerivativeOrderError
from oracles import similarity_problem


def _newton_to_power(p: interp.NewtonPolynomial):
    """Expand the Newton form to power-basis coefficients (test helper)."""
    coeffs = np.array([p.coeffs[-1]], dtype=complex)
    for k in range(len(p.coeffs) - 2, -1, -1):
        coeffs = npoly.polymul(coeffs, np.array([-p.nodes.values[k], 1.0], dtype=complex))
        coeffs = npoly.polyadd(coeffs, np.array([p.coeffs[k]], dtype=complex))
    return coeffs


def test_node_set_basics():
    ns = interp.NodeSet([0, 1j, 0])
    assert ns.m == 3
    assert ns.multiplicity(0) == 2
    assert list(ns) == [0, 1j, 0]
    with pytest.raises(ValueError):
        interp.NodeSet([])
    with pytest.raises(ValueError):
        interp.NodeSet([complex("nan")])


def test_divided_differences_single_node():
    p = interp.divided_differences(interp.EXP, interp.NodeSet([0]))
    assert p.coeffs == (1 + 0j,)


def test_divided_differences_confluent_pair():
    p = interp.divided_differences(interp.EXP, interp.NodeSet([0, 0]))
    assert p.coeffs == (1 + 0j, 1 + 0j)


def test_divided_differences_two_nodes():
    p = interp.divided_differences(interp.EXP, interp.NodeSet([0, 1]))
    # direct formula (f(1) - f(0)) / (1 - 0)
    assert p.coeffs[1] == pytest.approx(math.e - 1, rel=1e-15)


def test_divided_differences_vs_integral_oracle():
    nodes = [0, 0.5, 1.0]
    p = interp.divided_differences(interp.EXP, interp.NodeSet(nodes))
    oracle = interp.dd_integral_oracle(interp.EXP, nodes)
    assert abs(p.coeffs[2] - oracle) <= 1e-6


def test_integral_oracle_examples():
    assert interp.dd_integral_oracle(interp.EXP, [0, 0]) == pytest.approx(1.0, abs=1e-12)
    assert interp.dd_integral_oracle(interp.EXP, [0, 1]) == pytest.approx(math.e - 1, abs=1e-8)
    fsq = interp.polynomial_function([0, 0, 1])
    assert interp.dd_integral_oracle(fsq, [0.2, 1 + 2j, -1]) == pytest.approx(1.0, abs=1e-10)


def test_integral_oracle_limits():
    with pytest.raises(ValueError):
        interp.dd_integral_oracle(interp.EXP, [])
    with pytest.raises(ValueError):
        interp.dd_integral_oracle(interp.EXP, [0, 1, 2, 3, 4, 5])


def test_oracle_equivalence_random():
    rng = np.random.default_rng(21)
    for _ in range(8):
        m = int(rng.integers(2, 5))
        nodes = [complex(*rng.uniform(-0.7, 0.7, 2)) for _ in range(m)]
        p = interp.divided_differences(interp.EXP, interp.NodeSet(nodes))
        oracle = interp.dd_integral_oracle(interp.EXP, sorted(
            nodes, key=lambda z: (z.real, z.imag)))
        assert abs(p.coeffs[-1] - oracle) <= 1e-6


def test_leading_coefficient_permutation_invariant():
    rng = np.random.default_rng(22)
    nodes = [complex(*rng.uniform(-1, 1, 2)) for _ in range(6)]
    lead = interp.divided_differences(interp.EXP, interp.NodeSet(nodes)).coeffs[-1]
    for _ in range(5):
        perm = list(rng.permutation(len(nodes)))
        shuffled = [nodes[i] for i in perm]
        lead2 = interp.divided_differences(interp.EXP, interp.NodeSet(shuffled)).coeffs[-1]
        assert abs(lead - lead2) <= 1e-10


def test_hermite_conditions():
    rng = np.random.default_rng(23)
    for _ in range(5):
        base = [complex(*rng.uniform(-0.8, 0.8, 2)) for _ in range(3)]
        mults = [int(rng.integers(1, 4)) for _ in range(3)]
        nodes = [z for z, m in zip(base, mults) for _ in range(m)]
        p = interp.divided_differences(interp.EXP, interp.NodeSet(nodes))
        power = _newton_to_power(p)
        for z, mult in zip(base, mults):
            d = power
            for j in range(mult):
                value = npoly.polyval(z, d)
                assert abs(value - cmath.exp(z)) <= 1e-9
                d = npoly.polyder(d)


def test_remainder_identity():
    rng = np.random.default_rng(24)
    nodes = [complex(*rng.uniform(-1, 1, 2)) for _ in range(4)]
    p = interp.divided_differences(interp.EXP, interp.NodeSet(nodes))
    for _ in range(5):
        z = complex(*rng.uniform(-1, 1, 2))
        lhs = cmath.exp(z) - interp.newton_eval_scalar(p, z)
        extended = interp.divided_differences(
            interp.EXP, interp.NodeSet(nodes + [z])).coeffs[-1]
        rhs = interp.omega_at_scalar(interp.NodeSet(nodes), z) * extended
        assert abs(lhs - rhs) <= 1e-9


def test_polynomial_exactness():
    rng = np.random.default_rng(25)
    coeffs = [1.0, -2.0, 0.5j, 0.25]
    f = interp.polynomial_function(coeffs)
    nodes = interp.NodeSet([0, 1, -1, 2j, 0.5])
    p = interp.divided_differences(f, nodes)
    for _ in range(10):
        z = complex(*rng.uniform(-2, 2, 2))
        expected = f.scalar_eval(z)
        assert abs(interp.newton_eval_scalar(p, z) - expected) <= 1e-10 * max(1.0, abs(expected))
    diag = np.diag([0.5, -1.0 + 1j, 2.0])
    pa = interp.newton_eval_matrix(p, diag)
    expected = np.diag([f.scalar_eval(z) for z in np.diag(diag)])
    assert np.allclose(pa, expected, atol=1e-10)


def test_newton_eval_scalar_examples():
    p = interp.divided_differences(interp.EXP, interp.NodeSet([2, 5, 7]))
    assert interp.newton_eval_scalar(p, p.nodes.values[0]) == p.coeffs[0]
    p2 = interp.divided_differences(interp.EXP, interp.NodeSet([0, 0]))
    assert interp.newton_eval_scalar(p2, 0.3) == pytest.approx(1.3, rel=1e-15)


def test_chebyshev_interpolation_error_matches_reference():
    # frozen reference: max |e^x - p(x)| over [0, 1] for 10 first-kind
    # Chebyshev nodes on [-1, 1] is 0.60e-9
    p = interp.divided_differences(interp.EXP, interp.chebyshev_nodes(10))
    grid = np.linspace(0.0, 1.0, 1001)
    err = max(abs(math.exp(x) - interp.newton_eval_scalar(p, x)) for x in grid)
    assert err == pytest.approx(0.60e-9, rel=0.05)


def test_newton_eval_matrix_examples():
    p_const = interp.divided_differences(interp.EXP, interp.NodeSet([0.5]))
    out = interp.newton_eval_matrix(p_const, np.zeros((3, 3)))
    assert np.array_equal(out, math.exp(0.5) * np.eye(3))
    nodes = interp.NodeSet([0.4, -0.2, 1j])
    p = interp.divided_differences(interp.EXP, nodes)
    diag = np.diag([0.1, -0.3 + 0.2j])
    got = interp.newton_eval_matrix(p, diag)
    expected = np.diag([interp.newton_eval_scalar(p, z) for z in np.diag(diag)])
    assert np.allclose(got, expected, atol=1e-14)


def test_newton_eval_matrix_exact_interpolation():
    rng = np.random.default_rng(26)
    t, eigs, a = similarity_problem(rng, 3, kappa_max=1e3)
    p = interp.divided_differences(interp.EXP, interp.NodeSet(eigs))
    ref = (t * np.exp(eigs)[None, :]) @ np.linalg.inv(t)
    kappa = np.linalg.cond(t, 2)
    assert linalg.spectral_norm(interp.newton_eval_matrix(p, a) - ref) <= 1e-8 * kappa


def test_omega_examples():
    nodes = interp.NodeSet([1, -1])
    assert interp.omega_at_scalar(nodes, 1) == 0
    assert interp.omega_at_scalar(nodes, 0) == -1
    single = interp.NodeSet([0.5j])
    assert not np.any(interp.omega_at_matrix(single, 0.5j * np.eye(3)))
    diag = np.diag([0.2, 1.5j])
    got = interp.omega_at_matrix(nodes, diag)
    expected = np.diag([interp.omega_at_scalar(nodes, z) for z in np.diag(diag)])
    assert np.allclose(got, expected, atol=1e-15)


def test_omega_cayley_hamilton():
    rng = np.random.default_rng(27)
    t, eigs, a = similarity_problem(rng, 4, kappa_max=1e3)
    nodes = interp.NodeSet(eigs)
    om = interp.omega_at_matrix(nodes, a)
    budget = 1.0
    for z in eigs:
        budget *= linalg.spectral_norm(a - z * np.eye(4))
    assert linalg.spectral_norm(om) <= 1e-8 * budget


def test_omega_chebyshev_sup_norm():
    nodes = interp.chebyshev_nodes(10)
    grid = np.linspace(-1.0, 1.0, 20001)
    sup = max(abs(interp.omega_at_scalar(nodes, x)) for x in grid)
    assert sup == pytest.approx(2.0 ** -9, abs=1e-6)


def test_chebyshev_nodes_examples():
    assert abs(interp.chebyshev_nodes(1).values[0]) <= 1e-15
    two = interp.chebyshev_nodes(2).values
    assert two[0] == pytest.approx(-math.sqrt(2) / 2, rel=1e-15)
    assert two[1] == pytest.approx(math.sqrt(2) / 2, rel=1e-15)
    ten = interp.chebyshev_nodes(10, (0.0, 2.0)).values
    assert all(x.real < y.real for x, y in zip(ten, ten[1:]))
    assert all(0.0 < z.real < 2.0 for z in ten)
    with pytest.raises(ValueError):
        interp.chebyshev_nodes(3, (1.0, 1.0))
    with pytest.raises(ValueError):
        interp.chebyshev_nodes(0)


def test_taylor_nodes_examples():
    p = interp.divided_differences(interp.EXP, interp.taylor_nodes(0, 3))
    assert p.coeffs == (1 + 0j, 1 + 0j, 0.5 + 0j)
    fsq = interp.polynomial_function([0, 0, 1])
    p2 = interp.divided_differences(fsq, interp.taylor_nodes(1, 3))
    for z in (0.3, -2 + 1j, 4):
        assert abs(interp.newton_eval_scalar(p2, z) - z * z) <= 1e-12 * max(1.0, abs(z) ** 2)
    p3 = interp.divided_differences(interp.EXP, interp.taylor_nodes(2.0, 1))
    assert interp.newton_eval_scalar(p3, 123.0) == pytest.approx(math.exp(2.0), rel=1e-15)


def test_near_coincident_warning():
    with pytest.warns(ConditioningWarning):
        interp.divided_differences(interp.EXP, interp.NodeSet([0, 1e-10, 1]))


def test_coefficient_growth_guard():
    f = interp.polynomial_function([0, 0, 1e200])
    with pytest.raises(ConditioningError):
        interp.divided_differences(f, interp.NodeSet([0, 1, 2]))


def test_derivative_order_error():
    limited = interp.AnalyticFunction(
        name="exp_capped",
        scalar_eval=cmath.exp,
        scalar_derivative=lambda k, z: cmath.exp(z),
        matrix_nth_derivative=lambda k, a: linalg.matrix_exp(a),
        max_order=1,
    )
    with pytest.raises(DerivativeOrderError):
        interp.divided_differences(limited, interp.NodeSet([0, 0, 0]))
    with pytest.raises(DerivativeOrderError):
        interp.dd_integral_oracle(limited, [0, 0.5, 1])


def test_exp_function_contract():
    assert interp.EXP.scalar_derivative(0, 0.5j) == interp.EXP.scalar_eval(0.5j)
    a = np.diag([0.3, -0.1])
    assert np.array_equal(interp.EXP.matrix_nth_derivative(4, a),
                          linalg.matrix_exp(a))


def test_node_file_roundtrip(tmp_path):
    nodes = interp.NodeSet([0, 1 + 2j, -0.25j])
    path = tmp_path / "nodes.txt"
    interp.write_node_file(path, nodes)
    assert interp.read_node_file(path) == nodes
    bad = tmp_path / "bad.txt"
    bad.write_text("1 2 3\n")
    with pytest.raises(ValueError):
        interp.read_node_file(bad)
