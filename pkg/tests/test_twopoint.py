import numpy as np
import pytest

from src.numerics.euler import HartenEntropy, entropy_variables, flux_potential, physical_flux, prim_to_cons
from src.numerics.errors import NonConvexEntropyError
from src.numerics.means import logmean
from src.numerics.twopoint import (
    PEP_DENSITIES,
    FluxId,
    check_flux,
    ec_energy_relation_residual,
    ec_residual,
    evaluate,
    harten_density_average,
    harten_ec_residual,
    harten_scan,
    harten_trial,
    kep_residual,
    momentum_relation_residual,
    pep_constants,
    pep_spread,
    ranocha_energy_decomposition,
    sample_states,
    solve_harten_density,
)


def cons(gas, *prim):
    return prim_to_cons(np.array(prim, dtype=float), gas)


@pytest.mark.parametrize("flux", list(FluxId))
def test_consistency(flux, gas):
    u = cons(gas, 1.0, 0.1, 20.0)
    np.testing.assert_allclose(evaluate(flux, u, u, gas), [0.1, 20.01, 7.0005], rtol=1e-14)
    u2 = cons(gas, 1.3, -0.4, 0.2, 3.0)
    for d in (0, 1):
        np.testing.assert_allclose(evaluate(flux, u2, u2, gas, d), physical_flux(u2, gas, d), rtol=1e-14, atol=1e-15)


@pytest.mark.parametrize("flux", [f for f in FluxId if f.is_volume_flux])
def test_symmetry(flux, gas, rng):
    uL = sample_states(rng, 100, gas)
    uR = sample_states(rng, 100, gas)
    np.testing.assert_allclose(evaluate(flux, uL, uR, gas), evaluate(flux, uR, uL, gas), rtol=1e-14, atol=1e-14)


def _random_2d_states(rng, gas, count=50):
    q = np.stack([np.exp(rng.uniform(np.log(0.1), np.log(10.0), count)),
                  rng.uniform(-2.0, 2.0, count),
                  rng.uniform(-2.0, 2.0, count),
                  np.exp(rng.uniform(np.log(0.1), np.log(100.0), count))])
    return prim_to_cons(q, gas)


@pytest.mark.parametrize("flux", list(FluxId))
def test_rotational_consistency_2d(flux, gas, rng):
    uL = _random_2d_states(rng, gas)
    uR = _random_2d_states(rng, gas)

    # quarter turn: y becomes the normal axis, -x the tangential one
    def to_normal_frame(u):
        return np.stack([u[0], u[2], -u[1], u[3]])

    def from_normal_frame(f):
        return np.stack([f[0], -f[2], f[1], f[3]])

    along_y = evaluate(flux, uL, uR, gas, direction=1)
    rotated = from_normal_frame(evaluate(flux, to_normal_frame(uL), to_normal_frame(uR), gas, direction=0))
    scale = np.max(np.abs(along_y))
    np.testing.assert_allclose(along_y, rotated, rtol=1e-13, atol=1e-13 * scale)


@pytest.mark.parametrize("flux", list(FluxId))
def test_2d_flux_reduces_to_1d_without_transverse_velocity(flux, gas, rng):
    uL = _random_2d_states(rng, gas)
    uR = _random_2d_states(rng, gas)
    uL[2] = 0.0
    uR[2] = 0.0
    flux_2d = evaluate(flux, uL, uR, gas, direction=0)
    flux_1d = evaluate(flux, uL[[0, 1, 3]], uR[[0, 1, 3]], gas)
    np.testing.assert_allclose(flux_2d[[0, 1, 3]], flux_1d, rtol=1e-14, atol=1e-14 * np.max(np.abs(flux_1d)))
    np.testing.assert_array_equal(flux_2d[2], 0.0)


def test_shima_hand_values(gas):
    f = evaluate(FluxId.SHIMA, cons(gas, 1.0, 0.1, 20.0), cons(gas, 1.98, 0.1, 20.0), gas)
    np.testing.assert_allclose(f, [0.149, 20.0149, 7.000745], rtol=1e-14)


def test_ranocha_hand_values(gas):
    f = evaluate(FluxId.RANOCHA, cons(gas, 1.0, 0.1, 20.0), cons(gas, 1.98, 0.1, 20.0), gas)
    f_rho = logmean(1.0, 1.98) * 0.1
    np.testing.assert_allclose(f, [f_rho, 0.1 * f_rho + 20.0, 0.005 * f_rho + 7.0], rtol=1e-14)
    assert ec_energy_relation_residual(FluxId.RANOCHA, 20.0, 0.1, 1.0, 1.98, gas) <= 1e-12


def test_ranocha_decomposition_sums_to_energy_flux(gas, rng):
    uL = sample_states(rng, 50, gas)
    uR = sample_states(rng, 50, gas)
    pep_form, correction = ranocha_energy_decomposition(uL, uR, gas)
    scale = np.max(np.abs(pep_form) + np.abs(correction))
    np.testing.assert_allclose(pep_form + correction, evaluate(FluxId.RANOCHA, uL, uR, gas)[2],
                               rtol=1e-12, atol=1e-12 * scale)

    # constant pressure: the correction vanishes
    pep_form, correction = ranocha_energy_decomposition(cons(gas, 0.3, 0.5, 4.0), cons(gas, 2.1, -0.2, 4.0), gas)
    assert abs(correction) <= 1e-13 * abs(pep_form)


def test_ec_residual_vanishes_for_equal_states(gas):
    u = cons(gas, 0.7, 0.3, 2.0)
    for flux in FluxId:
        assert ec_residual(flux, u, u, gas) == 0.0
        assert kep_residual(flux, u, u, gas) <= 1e-14


def test_randomized_property_report(gas):
    ranocha = check_flux(FluxId.RANOCHA, 1000, 42, gas)
    assert ranocha.ec_residual <= 1e-11
    assert ranocha.kep_residual <= 1e-13
    assert ranocha.pep_momentum_spread <= 1e-12
    assert ranocha.pep_energy_spread <= 1e-12
    assert ranocha.declared == {"ec": True, "kep": True, "pep": True}

    shima = check_flux(FluxId.SHIMA, 1000, 42, gas)
    assert shima.kep_residual <= 1e-13
    assert max(shima.pep_momentum_spread, shima.pep_energy_spread) <= 1e-12

    central = check_flux(FluxId.CENTRAL, 200, 42, gas)
    assert central.kep_residual > 1e-6


def test_shima_is_not_entropy_conservative(gas):
    residual = ec_residual(FluxId.SHIMA, cons(gas, 1.0, 0.1, 20.0), cons(gas, 2.0, 0.3, 10.0), gas)
    assert abs(residual) > 1e-6
    assert ec_energy_relation_residual(FluxId.SHIMA, 20.0, 0.1, 1.0, 4.0, gas) > 1e-6


def test_central_is_not_kinetic_energy_preserving(gas):
    assert kep_residual(FluxId.CENTRAL, cons(gas, 1.0, 0.1, 20.0), cons(gas, 2.0, 0.3, 10.0), gas) > 1e-6


def test_pep_constants(gas):
    for flux in (FluxId.RANOCHA, FluxId.SHIMA, FluxId.CENTRAL):
        c1, c2 = pep_constants(flux, 20.0, 0.1, PEP_DENSITIES, gas)
        np.testing.assert_allclose(c1, 20.0, rtol=1e-13)
        np.testing.assert_allclose(c2, gas.gamma / (gas.gamma - 1.0) * 20.0 * 0.1, rtol=1e-13)
        assert momentum_relation_residual(flux, 20.0, 0.1, 0.02, 1.98, gas) <= 1e-12
    assert pep_spread(FluxId.SHIMA, 20.0, 0.1, [1.0], gas) == (0.0, 0.0)


def test_kuya_breaks_pressure_equilibrium(gas):
    _, energy_spread = pep_spread(FluxId.KUYA, 20.0, 0.1, PEP_DENSITIES, gas)
    assert energy_spread > 1e-3
    report = check_flux(FluxId.KUYA, 200, 0, gas)
    assert report.kep_residual <= 1e-13


def test_ec_energy_relation_at_rest(gas):
    assert ec_energy_relation_residual(FluxId.RANOCHA, 20.0, 0.0, 1.0, 1.98, gas) == 0.0


def test_harten_trial_standard_entropy(gas):
    h = HartenEntropy.standard()
    rho_p = solve_harten_density(h, gas, 1.0, 1.0, 2.0)
    # standard entropy: rho / p is the constrained quantity
    assert rho_p == pytest.approx(2.0, rel=1e-12)
    trial = harten_trial(h, gas, 1.0, 1.0, 2.0)
    assert abs(trial.residual) > 1e-6
    assert harten_ec_residual(h, gas, 1.3, 1.3, 2.0, 2.0) == 0.0


def test_harten_closed_form_matches_full_residual(gas):
    h = HartenEntropy.alpha_family(1.0)
    rho_p = solve_harten_density(h, gas, 1.2, 3.0, 0.9)
    v = 0.7
    uL = cons(gas, 1.2, v, 3.0)
    uR = cons(gas, rho_p, v, 0.9)
    # an arithmetic-density flux that keeps p and v in equilibrium: shima's density flux
    f = evaluate(FluxId.SHIMA, uL, uR, gas)
    wL = entropy_variables(uL, gas, h)
    wR = entropy_variables(uR, gas, h)
    jump_w = wR - wL
    # with v and h' rho / p constant the momentum and energy entries of [w] cancel against v
    scale = np.abs(jump_w[0]) + 1.0
    assert abs(jump_w[1] + v * jump_w[2]) <= 1e-12 * scale
    closed = harten_ec_residual(h, gas, 1.2, rho_p, 3.0, 0.9, velocity=v)
    full = np.sum(jump_w * f) - (flux_potential(uR, gas, h) - flux_potential(uL, gas, h))
    assert closed == pytest.approx(full, rel=1e-9, abs=1e-12)


def test_harten_density_average(gas):
    rhoL, rhoR = np.array([0.4, 1.0, 2.5]), np.array([1.7, 3.0, 0.6])
    standard = harten_density_average(HartenEntropy.standard(), gas, rhoL, rhoR, 5.0)
    np.testing.assert_allclose(standard, logmean(rhoL, rhoR) / gas.gamma, rtol=1e-12)
    arithmetic = harten_density_average(HartenEntropy.alpha_family(-2.0 * gas.gamma), gas, rhoL, rhoR, 5.0)
    np.testing.assert_allclose(arithmetic, 0.5 * (rhoL + rhoR) / gas.gamma, rtol=1e-12)


@pytest.mark.parametrize("h", [HartenEntropy.standard(), HartenEntropy.alpha_family(0.5),
                               HartenEntropy.alpha_family(1.0), HartenEntropy.alpha_family(2.0)])
def test_harten_scan_witnesses_incompatibility(h, gas):
    result = harten_scan(h, gas, 1000, seed=0)
    assert result.solvable > 0
    assert result.witness_fraction >= 0.99


def test_harten_scan_rejects_non_convex_entropy(gas):
    with pytest.raises(NonConvexEntropyError):
        harten_scan(HartenEntropy.alpha_family(-1.0), gas, 5, seed=0)


def test_harten_scan_is_deterministic_across_threads(gas):
    h = HartenEntropy.alpha_family(1.0)
    serial = harten_scan(h, gas, 64, seed=7)
    threaded = harten_scan(h, gas, 64, seed=7, threads=4)
    assert serial.counterexamples == threaded.counterexamples
