"""Spatial operators of the damped-and-pumped incompressible flow system.

Four operators act on a velocity field y:

    stokes A       : y_hat(k) -> |k|^2 y_hat(k)          (diffusion, diagonal)
    convection B   : (y . grad) y                         (quadratic, dealiased)
    damping C      : |y|^{r-1} y, r >= 1                  (pointwise power)
    pumping Ctilde : |y|^{q-1} y, 1 <= q < r              (pointwise power)

and combine into the drift  F(y) = mu*A y + B(y) + alpha*Ctilde(y) + beta*C(y).

Nonlinear terms are evaluated pseudo-spectrally.  The quadratic term uses a
grid of at least 3n+1 points per axis so that the retained modes and all
quadrature pairings of triple products are alias-free; the power terms use a
grid oversampled 2x relative to the cutoff (4n+2 points, exact for the
quartic pairing at r = 3).  Operator outputs are Leray-projected so every
returned field satisfies the divergence-free invariants; the scalar pairings
<C(y), y> etc. are taken on the grid before projection, which is equivalent
for divergence-free inputs and avoids one source of quadrature noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import (
    PhysicalField,
    SpectralField,
    analyze,
    good_fft_size,
    grid_quadrature_weight,
    lattice_k2,
    lattice_wavevectors,
    leray_project,
    synthesize,
    _leray_raw,
)


@dataclass(frozen=True)
class OperatorParams:
    """Physical coefficients: viscosity mu, pumping alpha (typically < 0),
    damping beta, damping exponent r >= 1, pumping exponent 1 <= q < r."""

    mu: float
    alpha: float
    beta: float
    r: float
    q: float

    def __post_init__(self):
        errors = self.validation_errors()
        if errors:
            raise ValueError("; ".join(errors))

    def validation_errors(self) -> list[str]:
        errs = []
        if not self.mu > 0:
            errs.append(f"mu must be > 0, got {self.mu}")
        if not self.beta >= 0:
            # beta = 0 is admitted so the undamped oracle runs exist;
            # estimates that need beta > 0 enforce it at the call site
            errs.append(f"beta must be >= 0, got {self.beta}")
        if not self.r >= 1:
            errs.append(f"r must be >= 1, got {self.r}")
        if not 1 <= self.q:
            errs.append(f"q must be >= 1, got {self.q}")
        if not self.q < self.r:
            errs.append(f"q < r required, got q={self.q}, r={self.r}")
        return errs


def dealias_grid_size(cutoff: int) -> int:
    """Grid making quadratic products alias-free on retained modes (>= 3n+1)."""
    return good_fft_size(3 * cutoff + 1)


def oversample_grid_size(cutoff: int) -> int:
    """2x-oversampled grid for the non-polynomial power terms (>= 4n+2)."""
    return good_fft_size(4 * cutoff + 2)


# ---------------------------------------------------------------------------
# linear operator


def stokes_apply(y: SpectralField) -> SpectralField:
    """A y: multiply each mode by its eigenvalue |k|^2; <A y, y> = ||y||_V^2."""
    k2 = lattice_k2(y.dim, y.cutoff)
    return SpectralField(y.coeffs * k2, y.cutoff)


# ---------------------------------------------------------------------------
# convection


def _gradients_on_grid(y: SpectralField, grid: int) -> np.ndarray:
    """grad[i, j] = d y_j / d x_i sampled on the grid."""
    k = lattice_wavevectors(y.dim, y.cutoff)
    d = y.dim
    grads = np.empty((d, d) + (grid,) * d)
    for i in range(d):
        grads[i] = synthesize(1j * k[i] * y.coeffs, y.cutoff, grid)
    return grads


def _convection_values(y_vals: np.ndarray, grads: np.ndarray) -> np.ndarray:
    """(y . grad) y on the grid from sampled values and gradients."""
    return np.einsum("i...,ij...->j...", y_vals, grads)


def trilinear_b(p: SpectralField, q: SpectralField, s: SpectralField, grid: int | None = None) -> float:
    """b(p, q, s) = integral of (p . grad) q . s by alias-free quadrature.

    Satisfies b(p, q, s) = -b(p, s, q) and b(p, q, q) = 0 to roundoff for
    divergence-free inputs.
    """
    if not (p.cutoff == q.cutoff == s.cutoff and p.dim == q.dim == s.dim):
        raise ValueError("trilinear form needs fields on a common lattice")
    n_grid = grid if grid is not None else dealias_grid_size(p.cutoff)
    if n_grid < 3 * p.cutoff + 1:
        raise ValueError(f"grid {n_grid} insufficient for alias-free triple products (need >= {3 * p.cutoff + 1})")
    p_vals = synthesize(p.coeffs, p.cutoff, n_grid)
    grads = _gradients_on_grid(q, n_grid)
    s_vals = synthesize(s.coeffs, s.cutoff, n_grid)
    conv = _convection_values(p_vals, grads)
    w = grid_quadrature_weight(p.dim, n_grid)
    return float(np.sum(conv * s_vals) * w)


def convection_B(y: SpectralField, grid: int | None = None) -> SpectralField:
    """Leray-projected spectral image of (y . grad) y."""
    n_grid = grid if grid is not None else dealias_grid_size(y.cutoff)
    if n_grid < 3 * y.cutoff + 1:
        raise ValueError(f"grid {n_grid} insufficient for dealiased convection")
    y_vals = synthesize(y.coeffs, y.cutoff, n_grid)
    conv = _convection_values(y_vals, _gradients_on_grid(y, n_grid))
    hat = analyze(conv, y.cutoff)
    return leray_project(hat, y.cutoff)


# ---------------------------------------------------------------------------
# power nonlinearities


def vector_power(values: np.ndarray, expo: float) -> np.ndarray:
    """|u|^{expo-1} u pointwise, with |u|^0 := 1 so expo = 1 is the identity."""
    if expo == 1.0:
        return values
    mag = np.sqrt(np.sum(values * values, axis=0))
    return values * mag ** (expo - 1.0)


def magnitude_power(values: np.ndarray, expo: float) -> np.ndarray:
    """|u|^expo pointwise with 0^0 := 1."""
    mag2 = np.sum(values * values, axis=0)
    if expo == 0.0:
        return np.ones_like(mag2)
    return mag2 ** (expo / 2.0)


def damping_C(y: SpectralField, r: float, grid: int | None = None, project: bool = True) -> SpectralField:
    """C(y) = |y|^{r-1} y evaluated on the oversampled grid, truncated back.

    <C(y), y> equals ||y||_{L^{r+1}}^{r+1} in the same grid quadrature when
    the pairing is taken before projection (see `damping_pairing`).
    """
    if r < 1:
        raise ValueError(f"exponent must be >= 1, got {r}")
    n_grid = grid if grid is not None else oversample_grid_size(y.cutoff)
    vals = synthesize(y.coeffs, y.cutoff, n_grid)
    hat = analyze(vector_power(vals, r), y.cutoff)
    if project:
        hat = _leray_raw(hat, y.dim, y.cutoff)
    return SpectralField(hat, y.cutoff)


def pumping_Ctilde(y: SpectralField, q: float, grid: int | None = None, project: bool = True) -> SpectralField:
    """Ctilde(y) = |y|^{q-1} y; same contract as damping_C."""
    return damping_C(y, q, grid=grid, project=project)


def damping_pairing(y: SpectralField, r: float, grid: int | None = None) -> float:
    """<C(y), y> by grid quadrature; equals the L^{r+1} power integral."""
    n_grid = grid if grid is not None else oversample_grid_size(y.cutoff)
    vals = synthesize(y.coeffs, y.cutoff, n_grid)
    w = grid_quadrature_weight(y.dim, n_grid)
    return float(np.sum(magnitude_power(vals, r + 1.0)) * w)


def _values_on_common_grid(p, q_field, grid: int | None):
    if isinstance(p, PhysicalField) and isinstance(q_field, PhysicalField):
        if p.grid_size != q_field.grid_size or p.dim != q_field.dim:
            raise ValueError("physical fields must share a grid")
        return p.values, q_field.values, p.dim, p.grid_size
    if isinstance(p, SpectralField) and isinstance(q_field, SpectralField):
        p._check_compatible(q_field)
        n_grid = grid if grid is not None else oversample_grid_size(p.cutoff)
        return (
            synthesize(p.coeffs, p.cutoff, n_grid),
            synthesize(q_field.coeffs, q_field.cutoff, n_grid),
            p.dim,
            n_grid,
        )
    raise TypeError("p and q must both be SpectralField or both PhysicalField")


def monotonicity_gap(p, q_field, r: float, grid: int | None = None) -> tuple[float, float]:
    """Monotonicity check for the damping operator.

    Returns (lhs, rhs) with

        lhs = <C(p) - C(q), p - q>
        rhs = 1/2 || |p|^{(r-1)/2} (p-q) ||_H^2 + 1/2 || |q|^{(r-1)/2} (p-q) ||_H^2

    The inequality lhs >= rhs >= 0 holds pointwise on the grid, so the
    quadrature versions satisfy it up to roundoff.
    """
    if r < 1:
        raise ValueError(f"exponent must be >= 1, got {r}")
    pv, qv, dim, n_grid = _values_on_common_grid(p, q_field, grid)
    w = grid_quadrature_weight(dim, n_grid)
    diff = pv - qv
    lhs = float(np.sum((vector_power(pv, r) - vector_power(qv, r)) * diff) * w)
    diff2 = np.sum(diff * diff, axis=0)
    rhs = float(
        0.5 * np.sum(magnitude_power(pv, r - 1.0) * diff2) * w
        + 0.5 * np.sum(magnitude_power(qv, r - 1.0) * diff2) * w
    )
    return lhs, rhs


# ---------------------------------------------------------------------------
# combined drift


def drift_F(y: SpectralField, params: OperatorParams, grid: int | None = None) -> SpectralField:
    """F(y) = mu*A y + B(y) + alpha*Ctilde(y) + beta*C(y), Leray-projected.

    The three nonlinear terms are formed on one oversampled grid (which also
    satisfies the dealiasing requirement for the quadratic term) and
    transformed back together.
    """
    n_grid = grid if grid is not None else oversample_grid_size(y.cutoff)
    if n_grid < 3 * y.cutoff + 1:
        raise ValueError("grid insufficient for dealiased convection")
    vals = synthesize(y.coeffs, y.cutoff, n_grid)
    nl = _convection_values(vals, _gradients_on_grid(y, n_grid))
    if params.alpha != 0.0:
        nl = nl + params.alpha * vector_power(vals, params.q)
    if params.beta != 0.0:
        nl = nl + params.beta * vector_power(vals, params.r)
    hat = analyze(nl, y.cutoff)
    k2 = lattice_k2(y.dim, y.cutoff)
    hat += params.mu * k2 * y.coeffs
    return SpectralField(_leray_raw(hat, y.dim, y.cutoff), y.cutoff)


def drift_pairing(y: SpectralField, params: OperatorParams, grid: int | None = None) -> float:
    """<F(y), y> = mu ||y||_V^2 + alpha ||y||_{L^{q+1}}^{q+1} + beta ||y||_{L^{r+1}}^{r+1}.

    The convection term contributes nothing; the power pairings are taken on
    the oversampled grid before projection.
    """
    n_grid = grid if grid is not None else oversample_grid_size(y.cutoff)
    vals = synthesize(y.coeffs, y.cutoff, n_grid)
    w = grid_quadrature_weight(y.dim, n_grid)
    k2 = lattice_k2(y.dim, y.cutoff)
    visc = params.mu * float((2.0 * np.pi) ** y.dim * np.sum(k2 * np.abs(y.coeffs) ** 2))
    pump = params.alpha * float(np.sum(magnitude_power(vals, params.q + 1.0)) * w)
    damp = params.beta * float(np.sum(magnitude_power(vals, params.r + 1.0)) * w)
    return visc + pump + damp
