"""Operator identities: Stokes, convection, damping, pumping, combined drift."""

import math

import numpy as np
import pytest

from brinkflow import operators as ops
from brinkflow import spectral as sp
from brinkflow.solver import taylor_green_ic


def random_field(seed, cutoff=6, dim=2, decay=1.5):
    return sp.random_divergence_free(dim, cutoff, np.random.default_rng(seed), decay=decay)


def sin_x2_field(cutoff=6):
    m = 2 * cutoff + 1
    coeffs = np.zeros((2, m, m), dtype=complex)
    coeffs[0, 0, 1] = -0.5j
    coeffs[0, 0, m - 1] = 0.5j
    return sp.SpectralField(coeffs, cutoff)


def test_params_validation():
    with pytest.raises(ValueError, match="q < r"):
        ops.OperatorParams(mu=0.1, alpha=-0.5, beta=1.0, r=2.0, q=3.0)
    with pytest.raises(ValueError, match="mu"):
        ops.OperatorParams(mu=0.0, alpha=0.0, beta=1.0, r=3.0, q=2.0)
    with pytest.raises(ValueError, match="r must be"):
        ops.OperatorParams(mu=0.1, alpha=0.0, beta=1.0, r=0.5, q=0.2)
    ops.OperatorParams(mu=0.1, alpha=0.0, beta=0.0, r=3.0, q=2.0)  # undamped oracle runs


def test_stokes_examples():
    tg = taylor_green_ic(1.0, cutoff=6)
    out = ops.stokes_apply(tg)
    assert np.abs(out.coeffs - 2.0 * tg.coeffs).max() < 1e-15

    m = 13
    coeffs = np.zeros((2, m, m), dtype=complex)
    coeffs[1, 2, 1] = 1.0  # |k|^2 = 5; not divergence-free but A is diagonal
    single = sp.SpectralField(coeffs, 6)
    assert ops.stokes_apply(single).coeffs[1, 2, 1] == pytest.approx(5.0)

    y = random_field(23)
    pairing = sp.h_inner(ops.stokes_apply(y), y)
    assert pairing == pytest.approx(sp.norm(y, "V") ** 2, rel=1e-12)


def test_trilinear_antisymmetry_and_cancellation():
    rng = np.random.default_rng(101)
    for _ in range(20):
        p = sp.random_divergence_free(2, 6, rng)
        q = sp.random_divergence_free(2, 6, rng)
        s = sp.random_divergence_free(2, 6, rng)
        scale = max(abs(ops.trilinear_b(p, q, s)), 1e-8)
        assert abs(ops.trilinear_b(p, q, q)) < 1e-10 * max(scale, 1.0)
        assert abs(ops.trilinear_b(p, q, s) + ops.trilinear_b(p, s, q)) < 1e-10 * max(scale, 1.0)
    zero = sp.SpectralField(np.zeros_like(p.coeffs), 6)
    assert ops.trilinear_b(zero, q, s) == 0.0


def test_convection_taylor_green_is_gradient():
    tg = taylor_green_ic(1.0, cutoff=8)
    assert sp.norm(ops.convection_B(tg), "H") < 1e-10
    zero = sp.SpectralField(np.zeros_like(tg.coeffs), 8)
    assert sp.norm(ops.convection_B(zero), "H") == 0.0


def test_convection_energy_neutral():
    for seed in range(5):
        y = random_field(seed)
        power = sp.h_inner(ops.convection_B(y), y)
        assert abs(power) < 1e-12 * max(sp.norm(y, "H") ** 3, 1.0)


def test_damping_identity_at_r_one():
    y = random_field(31)
    out = ops.damping_C(y, 1.0)
    assert np.abs(out.coeffs - y.coeffs).max() < 1e-13


def test_damping_pairing_closed_form():
    p = sin_x2_field()
    assert ops.damping_pairing(p, 3.0) == pytest.approx(3 * math.pi**2 / 2, rel=1e-12)
    assert ops.damping_pairing(p, 3.0) == pytest.approx(sp.lp_norm(p, 4.0) ** 4, rel=1e-13)
    zero = sp.SpectralField(np.zeros_like(p.coeffs), p.cutoff)
    assert sp.norm(ops.damping_C(zero, 3.0), "H") == 0.0


def test_pumping_mirrors_damping():
    p = sin_x2_field()
    out_c = ops.damping_C(p, 3.0)
    out_ct = ops.pumping_Ctilde(p, 3.0)
    assert np.abs(out_c.coeffs - out_ct.coeffs).max() == 0.0
    y = random_field(37)
    assert np.abs(ops.pumping_Ctilde(y, 1.0).coeffs - y.coeffs).max() < 1e-13


def test_monotonicity_gap_properties():
    y = random_field(41)
    lhs, rhs = ops.monotonicity_gap(y, y, 3.0)
    assert lhs == 0.0 and rhs == 0.0
    rng = np.random.default_rng(43)
    for _ in range(10):
        p = sp.random_divergence_free(2, 6, rng)
        q = sp.random_divergence_free(2, 6, rng)
        lhs, rhs = ops.monotonicity_gap(p, q, 3.0)
        scale = max(lhs, 1.0)
        assert lhs >= rhs - 1e-10 * scale
        assert rhs >= -1e-12 * scale


def test_monotonicity_gap_constant_fields():
    # constant-direction fields make the gap computable by hand
    a, b, r = 1.3, -0.4, 3.0
    n_grid = 8
    pa = sp.PhysicalField(np.stack([np.full((n_grid, n_grid), a), np.zeros((n_grid, n_grid))]))
    pb = sp.PhysicalField(np.stack([np.full((n_grid, n_grid), b), np.zeros((n_grid, n_grid))]))
    lhs, rhs = ops.monotonicity_gap(pa, pb, r)
    area = (2 * math.pi) ** 2
    assert lhs == pytest.approx((a**3 - b**3) * (a - b) * area, rel=1e-12)
    assert rhs == pytest.approx(0.5 * (a**2 + b**2) * (a - b) ** 2 * area, rel=1e-12)
    assert lhs >= rhs


def test_damping_local_lipschitz_bound():
    rng = np.random.default_rng(47)
    r = 3.0
    grid = ops.oversample_grid_size(6)
    for _ in range(10):
        p = sp.random_divergence_free(2, 6, rng)
        q = sp.random_divergence_free(2, 6, rng)
        lhs, _ = ops.monotonicity_gap(p, q, r)
        np_norm = sp.lp_norm(p, r + 1, grid=grid)
        nq_norm = sp.lp_norm(q, r + 1, grid=grid)
        diff = sp.SpectralField(p.coeffs - q.coeffs, 6)
        bound = r * (np_norm + nq_norm) ** (r - 1.0) * sp.lp_norm(diff, r + 1, grid=grid) ** 2
        assert lhs <= bound * (1 + 1e-10)


@pytest.mark.parametrize("r", [3.0, 5.0])
def test_convection_interpolation_bound(r):
    # |b(p,p,s)| <= ||p||_{r+1}^{(r+1)/(r-1)} ||p||_H^{(r-3)/(r-1)} ||s||_V
    rng = np.random.default_rng(53)
    grid = ops.dealias_grid_size(6)
    for _ in range(8):
        p = sp.random_divergence_free(2, 6, rng)
        s = sp.random_divergence_free(2, 6, rng)
        b = abs(ops.trilinear_b(p, p, s, grid=grid))
        bound = (
            sp.lp_norm(p, r + 1, grid=grid) ** ((r + 1) / (r - 1))
            * sp.norm(p, "H") ** ((r - 3) / (r - 1))
            * sp.norm(s, "V")
        )
        assert b <= bound * (1 + 1e-9)


def test_three_dimensional_identities():
    rng = np.random.default_rng(77)
    for _ in range(5):
        y = sp.random_divergence_free(3, 4, rng)
        v = sp.random_divergence_free(3, 4, rng)
        s = sp.random_divergence_free(3, 4, rng)
        assert abs(sp.h_inner(ops.convection_B(y), y)) < 1e-11
        assert abs(ops.trilinear_b(y, v, s) + ops.trilinear_b(y, s, v)) < 1e-11
        pairing = ops.damping_pairing(y, 3.0)
        assert pairing == pytest.approx(sp.lp_norm(y, 4.0, grid=ops.oversample_grid_size(4)) ** 4, rel=1e-12)
        lhs, rhs = ops.monotonicity_gap(y, v, 3.0)
        assert lhs >= rhs >= 0.0


def test_trilinear_rejects_insufficient_grid():
    rng = np.random.default_rng(79)
    p = sp.random_divergence_free(2, 6, rng)
    with pytest.raises(ValueError, match="insufficient"):
        ops.trilinear_b(p, p, p, grid=14)
    with pytest.raises(ValueError, match="insufficient"):
        ops.convection_B(p, grid=14)


def test_drift_examples():
    params = ops.OperatorParams(mu=0.3, alpha=0.0, beta=0.0, r=3.0, q=2.0)
    tg = taylor_green_ic(1.0, cutoff=8)
    out = ops.drift_F(tg, params)
    assert np.abs(out.coeffs - 2 * 0.3 * tg.coeffs).max() < 1e-10

    zero = sp.SpectralField(np.zeros_like(tg.coeffs), 8)
    assert sp.norm(ops.drift_F(zero, params), "H") == 0.0


def test_drift_pairing_identity():
    params = ops.OperatorParams(mu=0.2, alpha=-0.7, beta=1.3, r=3.0, q=2.0)
    grid = ops.oversample_grid_size(6)
    for seed in range(5):
        y = random_field(seed + 60)
        expected = (
            params.mu * sp.norm(y, "V") ** 2
            + params.alpha * sp.lp_norm(y, params.q + 1, grid=grid) ** (params.q + 1)
            + params.beta * sp.lp_norm(y, params.r + 1, grid=grid) ** (params.r + 1)
        )
        assert ops.drift_pairing(y, params) == pytest.approx(expected, rel=1e-12)
        direct = sp.h_inner(ops.drift_F(y, params), y)
        assert direct == pytest.approx(expected, rel=1e-9)
