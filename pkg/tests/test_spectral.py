"""Spectral representation: projection, transforms, norms, smoothing filter."""

import math

import numpy as np
import pytest

from brinkflow import spectral as sp
from brinkflow.solver import taylor_green_ic


def grid_coords(n_grid, dim=2):
    x = np.arange(n_grid) * 2.0 * np.pi / n_grid
    return np.meshgrid(*([x] * dim), indexing="ij")


def test_leray_idempotent_on_divergence_free():
    rng = np.random.default_rng(7)
    y = sp.random_divergence_free(2, 6, rng)
    again = sp.leray_project(y.coeffs, 6)
    assert np.abs(again.coeffs - y.coeffs).max() < 1e-14


def test_leray_annihilates_gradient_mode():
    m = 2 * 4 + 1
    raw = np.zeros((2, m, m), dtype=complex)
    raw[0, 2, 1] = 2.0  # coefficients parallel to k = (2, 1)
    raw[1, 2, 1] = 1.0
    out = sp.leray_project(raw, 4)
    assert np.abs(out.coeffs).max() < 1e-15


def test_leray_hand_example():
    # raw = (1, 1) at k = (1, 0): I - k k^T/|k|^2 keeps only the (0, 1) part
    m = 2 * 4 + 1
    raw = np.zeros((2, m, m), dtype=complex)
    raw[0, 1, 0] = 1.0
    raw[1, 1, 0] = 1.0
    out = sp.leray_project(raw, 4)
    assert out.coeffs[0, 1, 0] == pytest.approx(0.0, abs=1e-15)
    assert out.coeffs[1, 1, 0] == pytest.approx(1.0, abs=1e-15)


def test_leray_zero_mean_and_self_adjoint():
    rng = np.random.default_rng(11)
    m = 2 * 5 + 1
    shape = (2, m, m)

    def herm(arr):
        return 0.5 * (arr + np.conj(sp._conjugate_partner(arr)))

    a = herm(rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    b = herm(rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    pa = sp.leray_project(a, 5)
    pb = sp.leray_project(b, 5)
    assert np.abs(pa.coeffs[(slice(None), 0, 0)]).max() == 0.0
    lhs = np.sum(pa.coeffs * np.conj(b)).real
    rhs = np.sum(a * np.conj(pb.coeffs)).real
    assert lhs == pytest.approx(rhs, rel=1e-12)
    # contraction in H
    assert np.sum(np.abs(pa.coeffs) ** 2) <= np.sum(np.abs(a) ** 2) + 1e-15


def test_to_physical_zero_and_single_mode():
    m = 2 * 4 + 1
    zero = sp.SpectralField(np.zeros((2, m, m), dtype=complex), 4)
    assert np.abs(sp.to_physical(zero, 16).values).max() == 0.0

    coeffs = np.zeros((2, m, m), dtype=complex)
    coeffs[1, 1, 0] = 0.5
    coeffs[1, m - 1, 0] = 0.5
    u = sp.to_physical(sp.SpectralField(coeffs, 4), 16)
    x1, _ = grid_coords(16)
    assert np.abs(u.values[1] - np.cos(x1)).max() < 1e-13
    assert np.abs(u.values[0]).max() < 1e-15


def test_taylor_green_grid_values():
    tg = taylor_green_ic(1.0, cutoff=8)
    u = sp.to_physical(tg, 32)
    x1, x2 = grid_coords(32)
    exact = np.stack([np.sin(x1) * np.cos(x2), -np.cos(x1) * np.sin(x2)])
    assert np.abs(u.values - exact).max() < 1e-12


def test_round_trip_identity():
    rng = np.random.default_rng(3)
    y = sp.random_divergence_free(2, 10, rng)
    back = sp.to_spectral(sp.to_physical(y, 24), 10)
    scale = np.abs(y.coeffs).max()
    assert np.abs(back.coeffs - y.coeffs).max() < 1e-12 * scale


def test_to_physical_rejects_small_grid():
    tg = taylor_green_ic(1.0, cutoff=8)
    with pytest.raises(ValueError, match="too small"):
        sp.to_physical(tg, 16)


def test_product_field_energy_at_modes_one_and_three():
    # u2(x) = sin(x1) sin(2 x1) = (cos x1 - cos 3 x1)/2 lives on modes 1 and 3
    n_grid = 32
    x1, _ = grid_coords(n_grid)
    vals = np.stack([np.zeros_like(x1), np.sin(x1) * np.sin(2 * x1)])
    f = sp.to_spectral(vals, 8)
    k = sp.lattice_wavevectors(2, 8)
    mags = np.abs(f.coeffs[1])
    for k1 in range(-8, 9):
        expected = 0.25 if abs(k1) in (1, 3) else 0.0
        assert mags[k1 % 17, 0] == pytest.approx(expected, abs=1e-14)
    assert np.abs(f.coeffs[0]).max() < 1e-15
    assert float(np.sum(np.abs(k[1]) * mags)) < 1e-13  # no x2 dependence


def test_norms_closed_forms():
    tg = taylor_green_ic(1.0, cutoff=6)
    assert sp.norm(tg, "H") == pytest.approx(math.sqrt(2 * math.pi**2), rel=1e-13)
    assert sp.norm(tg, "V") == pytest.approx(math.sqrt(4 * math.pi**2), rel=1e-13)

    m = 2 * 6 + 1
    coeffs = np.zeros((2, m, m), dtype=complex)
    coeffs[0, 0, 1] = -0.5j
    coeffs[0, 0, m - 1] = 0.5j  # (sin x2, 0)
    p = sp.SpectralField(coeffs, 6)
    assert sp.lp_norm(p, 4) ** 4 == pytest.approx(3 * math.pi**2 / 2, rel=1e-12)

    zero = sp.SpectralField(np.zeros_like(coeffs), 6)
    for kind in ("H", "V"):
        assert sp.norm(zero, kind) == 0.0
    assert sp.norm(zero, "Lp", p=3) == 0.0


def test_lp_norm_rejects_p_below_one():
    tg = taylor_green_ic(1.0, cutoff=4)
    with pytest.raises(ValueError, match="p >= 1"):
        sp.norm(tg, "Lp", p=0.5)


def test_parseval_spectral_vs_grid():
    rng = np.random.default_rng(5)
    y = sp.random_divergence_free(2, 8, rng)
    phys = sp.to_physical(y, 40)
    assert sp.norm(phys, "H") == pytest.approx(sp.norm(y, "H"), rel=1e-10)
    assert sp.norm(phys, "V") == pytest.approx(sp.norm(y, "V"), rel=1e-10)


def test_to_spectral_projection_flag():
    n_grid = 24
    x1, x2 = grid_coords(n_grid)
    vals = np.stack([np.cos(x1 + 2 * x2), np.sin(x1 - x2)])  # not solenoidal
    raw = sp.to_spectral(vals, 6)
    assert raw.max_divergence() > 1e-3
    projected = sp.to_spectral(vals, 6, project=True)
    assert projected.max_divergence() < 1e-14


def test_smoothing_filter_self_adjoint_not_projection():
    rng = np.random.default_rng(29)
    a = sp.random_divergence_free(2, 6, rng)
    b = sp.random_divergence_free(2, 6, rng)
    fa, fb = sp.smoothing_filter(a, 3), sp.smoothing_filter(b, 3)
    assert sp.h_inner(fa, b) == pytest.approx(sp.h_inner(a, fb), rel=1e-12)
    # applying it twice keeps shrinking: a smoother, not a projection
    twice = sp.smoothing_filter(fa, 3)
    assert sp.norm(fa - twice, "H") > 1e-3 * sp.norm(fa, "H")


def test_smoothing_filter_examples():
    m = 2 * 6 + 1
    zero = sp.SpectralField(np.zeros((2, m, m), dtype=complex), 6)
    assert np.abs(sp.smoothing_filter(zero, 3).coeffs).max() == 0.0

    coeffs = np.zeros((2, m, m), dtype=complex)
    coeffs[1, 1, 0] = 0.5
    coeffs[1, m - 1, 0] = 0.5
    y = sp.SpectralField(coeffs, 6)
    # gain exp(-|k|^2/n) on retained modes; |k|^2 = 1 clears the n = 2 cutoff
    out = sp.smoothing_filter(y, 2)
    assert out.coeffs[1, 1, 0] == pytest.approx(0.5 * math.exp(-0.5), rel=1e-14)
    # the cutoff is strict: |k|^2 = 1 is not below n^2 = 1
    assert np.abs(sp.smoothing_filter(y, 1).coeffs).max() == 0.0

    with pytest.raises(ValueError):
        sp.smoothing_filter(y, 0)


def test_smoothing_filter_truncates_at_n_squared():
    m = 2 * 6 + 1
    coeffs = np.zeros((2, m, m), dtype=complex)
    coeffs[1, 2, 0] = 1.0  # |k|^2 = 4 >= n^2 for n = 2
    y = sp.SpectralField(coeffs, 6)
    assert np.abs(sp.smoothing_filter(y, 2).coeffs).max() == 0.0


def test_smoothing_filter_norm_nonincreasing_and_convergent():
    rng = np.random.default_rng(13)
    y = sp.random_divergence_free(2, 8, rng, decay=1.0)
    h0 = sp.norm(y, "H")
    v0 = sp.norm(y, "V")
    errs = []
    for n in range(1, 17):
        fy = sp.smoothing_filter(y, n)
        assert sp.norm(fy, "H") <= h0 + 1e-14
        assert sp.norm(sp.smoothing_filter(fy, n), "V") <= v0 + 1e-14
        errs.append(sp.norm(y - fy, "H"))
    assert all(a > b for a, b in zip(errs[:-1], errs[1:]))
    assert errs[-1] < 0.25 * errs[0]


def test_basis_modes_orthonormal_divergence_free():
    for dim in (2, 3):
        fields = [sp.basis_mode(dim, 4, i) for i in range(8)]
        for i, fi in enumerate(fields):
            assert fi.max_divergence() < 1e-14
            assert fi.max_reality_defect() < 1e-14
            for j, fj in enumerate(fields):
                want = 1.0 if i == j else 0.0
                assert sp.h_inner(fi, fj) == pytest.approx(want, abs=1e-12)


def test_snapshot_round_trip(tmp_path):
    rng = np.random.default_rng(17)
    y = sp.random_divergence_free(3, 3, rng)
    path = tmp_path / "field.json"
    sp.save_field(y, path)
    back = sp.load_field(path)
    assert back.cutoff == y.cutoff and back.dim == y.dim
    assert np.array_equal(back.coeffs, y.coeffs)


def test_field_immutability_and_arithmetic():
    tg = taylor_green_ic(2.0, cutoff=4)
    with pytest.raises(ValueError):
        tg.coeffs[0, 0, 0] = 1.0
    combo = 0.5 * tg - taylor_green_ic(1.0, cutoff=4)
    assert np.abs(combo.coeffs).max() < 1e-15
