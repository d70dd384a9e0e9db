import numpy as np
import pytest

from src.numerics.errors import ConstructionError
from src.numerics.euler import density_wave_ic, prim_to_cons
from src.numerics.means import MeanKind
from src.numerics.sbp1d import (
    Equation,
    OperatorFamily,
    Semidiscretization1D,
    build_operator,
    entropy_rate,
    entropy_rate_terms,
    lobatto_derivative,
    lobatto_nodes_weights,
    node_rows,
    operator_rows,
    rhs,
    total_entropy,
)
from src.numerics.twopoint import FluxId

OPERATORS = [
    ("fd2", 16, None),
    ("fd4", 16, None),
    ("cg", 4, 3),
    ("dg", 4, 3),
    ("dg", 1, 4),
]


def _operator(family, count, degree, domain=(0.0, 2.0)):
    return build_operator(family, count, domain=domain, degree=degree)


def test_fd2_four_nodes():
    op = build_operator("fd2", 4)
    expected = np.array([
        [0.0, 1.0, 0.0, -1.0],
        [-1.0, 0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0, 1.0],
        [1.0, 0.0, -1.0, 0.0],
    ])
    np.testing.assert_array_equal(op.D, expected)
    np.testing.assert_array_equal(op.M, 0.5 * np.eye(4))
    np.testing.assert_array_equal(op.nodes, [0.0, 0.5, 1.0, 1.5])


@pytest.mark.parametrize("family,count,degree", OPERATORS)
def test_constants_are_annihilated(family, count, degree):
    op = _operator(family, count, degree)
    assert np.max(np.abs(op.D @ np.ones(op.size))) <= 1e-12 * np.max(np.abs(op.D))


@pytest.mark.parametrize("family,count,degree", OPERATORS)
def test_summation_by_parts(family, count, degree):
    op = _operator(family, count, degree)
    assert op.sbp_defect() <= 1e-13
    assert np.all(op.mass > 0.0)
    assert np.sum(op.mass) == pytest.approx(2.0, rel=1e-14)


def test_fd4_convergence_order():
    errors = []
    for n in (16, 32, 64):
        op = build_operator("fd4", n)
        x = op.nodes
        errors.append(np.max(np.abs(op.D @ np.sin(np.pi * x) - np.pi * np.cos(np.pi * x))))
    orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    np.testing.assert_allclose(orders, 4.0, atol=0.2)


def test_lobatto_nodes_and_weights():
    x, w = lobatto_nodes_weights(1)
    np.testing.assert_array_equal(x, [-1.0, 1.0])
    np.testing.assert_allclose(w, [1.0, 1.0], rtol=1e-15)

    x, w = lobatto_nodes_weights(4)
    r = np.sqrt(3.0 / 7.0)
    np.testing.assert_allclose(x, [-1.0, -r, 0.0, r, 1.0], atol=1e-15)
    np.testing.assert_allclose(w, [0.1, 49.0 / 90.0, 32.0 / 45.0, 49.0 / 90.0, 0.1], rtol=1e-14)

    with pytest.raises(ConstructionError):
        lobatto_nodes_weights(0)


def test_lobatto_derivative_is_exact_for_polynomials():
    x, _ = lobatto_nodes_weights(5)
    D = lobatto_derivative(x)
    for k in range(1, 6):
        np.testing.assert_allclose(D @ x ** k, k * x ** (k - 1), atol=1e-12)


def test_construction_errors():
    with pytest.raises(ConstructionError):
        build_operator("fd2", 3)
    with pytest.raises(ConstructionError):
        build_operator("cg", 1, degree=3)
    with pytest.raises(ConstructionError):
        build_operator("dg", 4)
    with pytest.raises(ConstructionError):
        build_operator("fd4", 16, domain=(1.0, 1.0))
    with pytest.raises(ValueError):
        build_operator("spectral", 16)


def test_cg_and_dg_sizes():
    assert build_operator("cg", 4, degree=3).size == 12
    dg = build_operator("dg", 4, degree=3)
    assert dg.size == 16
    assert dg.element_width == 0.5
    semi = Semidiscretization1D(dg)
    assert semi.cfl_length() == pytest.approx(0.5 / 7.0, rel=1e-15)
    fd = Semidiscretization1D(build_operator("fd2", 8))
    assert fd.cfl_length() == pytest.approx(0.25, rel=1e-14)


@pytest.mark.parametrize("family,count,degree", OPERATORS)
def test_arithmetic_mean_recovers_plain_derivative(family, count, degree, rng):
    op = _operator(family, count, degree)
    semi = Semidiscretization1D(op, volume_flux=MeanKind.ARITHMETIC)
    u = rng.uniform(0.5, 2.0, op.size)
    scale = np.max(np.abs(op.D)) * np.max(np.abs(u))
    np.testing.assert_allclose(rhs(semi, u), -op.D @ u, atol=1e-12 * scale)


@pytest.mark.parametrize("family,count,degree", OPERATORS)
def test_arithmetic_mean_advection_is_linear(family, count, degree):
    op = _operator(family, count, degree)
    semi = Semidiscretization1D(op, volume_flux=MeanKind.ARITHMETIC)
    x = op.nodes
    u = 2.0 + np.sin(np.pi * x)
    v = 3.0 + np.cos(2 * np.pi * x)
    alpha, beta = 0.7, 1.9
    combined = rhs(semi, alpha * u + beta * v)
    scale = np.max(np.abs(op.D)) * np.max(np.abs(alpha * u + beta * v))
    np.testing.assert_allclose(combined, alpha * rhs(semi, u) + beta * rhs(semi, v), atol=1e-12 * scale)


@pytest.mark.parametrize("family,count,degree", OPERATORS)
@pytest.mark.parametrize("kind", list(MeanKind))
def test_constant_state_is_stationary(family, count, degree, kind):
    op = _operator(family, count, degree)
    semi = Semidiscretization1D(op, volume_flux=kind)
    assert np.max(np.abs(rhs(semi, np.full(op.size, 1.7)))) <= 1e-12 * np.max(np.abs(op.D))


@pytest.mark.parametrize("family,count,degree", OPERATORS)
@pytest.mark.parametrize("kind", [MeanKind.ARITHMETIC, MeanKind.LOGARITHMIC])
def test_paired_entropy_is_conserved(family, count, degree, kind):
    op = _operator(family, count, degree)
    semi = Semidiscretization1D(op, volume_flux=kind)
    x = op.nodes
    u = 2.0 + np.sin(np.pi * x) + 0.3 * np.cos(3 * np.pi * x)
    terms = entropy_rate_terms(semi, u)
    assert abs(entropy_rate(semi, u)) <= 1e-12 * max(1.0, np.sum(np.abs(terms)))
    assert np.isfinite(total_entropy(semi, u))


@pytest.mark.parametrize("family,count,degree", OPERATORS)
def test_advection_conserves_mass(family, count, degree, rng):
    op = _operator(family, count, degree)
    semi = Semidiscretization1D(op, volume_flux=MeanKind.GEOMETRIC)
    u = rng.uniform(0.5, 2.0, op.size)
    du = rhs(semi, u)
    assert abs(op.mass @ du) <= 1e-12 * np.max(np.abs(op.D)) * op.size


def _euler_state(op, gas):
    x = op.nodes
    q = np.stack([1.0 + 0.5 * np.sin(np.pi * x), 0.3 + 0.1 * np.cos(np.pi * x), 1.0 + 0.2 * np.sin(2 * np.pi * x)])
    return prim_to_cons(q, gas).ravel()


@pytest.mark.parametrize("family,count,degree", OPERATORS)
def test_euler_ranocha_conserves_entropy(family, count, degree, gas):
    op = _operator(family, count, degree)
    semi = Semidiscretization1D(op, Equation.EULER1D, FluxId.RANOCHA, gas=gas)
    u = _euler_state(op, gas)
    terms = entropy_rate_terms(semi, u)
    assert abs(entropy_rate(semi, u)) <= 1e-11 * max(1.0, np.sum(np.abs(terms)))

    du = semi.shaped(rhs(semi, u))
    totals = du @ op.mass
    assert np.max(np.abs(totals)) <= 1e-11 * np.max(np.abs(op.D)) * op.size


@pytest.mark.parametrize("family,count,degree", OPERATORS)
@pytest.mark.parametrize("flux", [FluxId.RANOCHA, FluxId.SHIMA])
def test_euler_density_wave_keeps_pressure_equilibrium(family, count, degree, flux, gas):
    op = _operator(family, count, degree, domain=(-1.0, 1.0))
    semi = Semidiscretization1D(op, Equation.EULER1D, flux, gas=gas)
    u = density_wave_ic(op.nodes, gas, dim=1).ravel()
    du = semi.shaped(rhs(semi, u))
    scale = np.max(np.abs(op.D)) * 20.0
    np.testing.assert_allclose(du[1], 0.1 * du[0], atol=1e-12 * scale)
    np.testing.assert_allclose(du[2], 0.005 * du[0], atol=1e-12 * scale)


def test_euler_rejects_hll_volume_flux(gas):
    with pytest.raises(ConstructionError):
        Semidiscretization1D(build_operator("fd2", 8), Equation.EULER1D, FluxId.HLL, gas=gas)
    semi = Semidiscretization1D(build_operator("dg", 2, degree=2), Equation.EULER1D, FluxId.SHIMA, FluxId.HLL, gas=gas)
    assert semi.surface_flux is FluxId.HLL
    assert semi.size == 18


def test_default_surface_flux_and_entropy():
    semi = Semidiscretization1D(build_operator("fd2", 8), volume_flux="logarithmic")
    assert semi.surface_flux is MeanKind.LOGARITHMIC
    assert semi.advection_entropy == "log"


def test_dump_rows():
    op = build_operator(OperatorFamily.FD2, 4)
    rows = list(operator_rows(op))
    assert len(rows) == 8 + 4
    assert rows[0] == ("D", 0, 1, 1.0)
    assert ("M", 3, 3, 0.5) in rows
    assert list(node_rows(op))[1] == ("x", 1, 1, 0.5)
