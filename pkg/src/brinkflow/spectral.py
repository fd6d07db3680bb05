"""Divergence-free Fourier representation of velocity fields on [0, 2pi)^d.

State lives on the truncated integer wavevector lattice |k_i| <= cutoff,
stored in FFT index order along every axis (frequencies 0, 1, ..., n,
-n, ..., -1).  A valid field is real in physical space (Hermitian
coefficients), divergence-free (k . u_hat(k) = 0), and mean-free
(u_hat(0) = 0).  `leray_project` enforces the last two; transforming a real
collocation grid guarantees the first.

Norm conventions, with |D| = (2pi)^d the torus volume:

    ||u||_H^2  = (2pi)^d * sum_k |u_hat(k)|^2          (Parseval)
    ||u||_V^2  = (2pi)^d * sum_k |k|^2 |u_hat(k)|^2
    ||u||_Lp^p = sum over grid cells of |u(x)|^p * (2pi/N)^d
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
import scipy.fft as _fft

TWO_PI = 2.0 * np.pi


# ---------------------------------------------------------------------------
# lattice helpers


@lru_cache(maxsize=None)
def lattice_wavevectors(dim: int, cutoff: int) -> np.ndarray:
    """Integer wavevectors, shape (dim, 2n+1, ..., 2n+1), FFT index order."""
    if dim not in (2, 3):
        raise ValueError(f"dim must be 2 or 3, got {dim}")
    if cutoff < 1:
        raise ValueError(f"cutoff must be >= 1, got {cutoff}")
    m = 2 * cutoff + 1
    freqs = np.fft.fftfreq(m, d=1.0 / m).astype(np.int64)  # 0..n, -n..-1
    axes = np.meshgrid(*([freqs] * dim), indexing="ij")
    k = np.stack(axes).astype(np.float64)
    k.setflags(write=False)
    return k


@lru_cache(maxsize=None)
def lattice_k2(dim: int, cutoff: int) -> np.ndarray:
    """|k|^2 on the lattice; eigenvalue of the Stokes operator per mode."""
    k = lattice_wavevectors(dim, cutoff)
    k2 = np.sum(k * k, axis=0)
    k2.setflags(write=False)
    return k2


@lru_cache(maxsize=None)
def _embed_indices(dim: int, cutoff: int, grid: int):
    """Index tuple placing the (2n+1)^d lattice into an N^d FFT array."""
    n = cutoff
    idx = np.concatenate([np.arange(0, n + 1), np.arange(grid - n, grid)])
    return np.ix_(*([idx] * dim))


def good_fft_size(m: int) -> int:
    """Smallest 5-smooth integer >= m (fast FFT length)."""
    n = max(int(m), 1)
    while True:
        v = n
        for p in (2, 3, 5):
            while v % p == 0:
                v //= p
        if v == 1:
            return n
        n += 1


# ---------------------------------------------------------------------------
# field containers


@dataclass(frozen=True)
class SpectralField:
    """Truncated Fourier coefficients of a real vector field.

    coeffs has shape (dim, 2n+1, ..., 2n+1), complex128, FFT index order.
    Instances are immutable; the coefficient array is marked read-only.
    """

    coeffs: np.ndarray
    cutoff: int

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        dim = c.shape[0]
        m = 2 * self.cutoff + 1
        if dim not in (2, 3) or c.shape != (dim,) + (m,) * dim:
            raise ValueError(f"coeffs shape {c.shape} inconsistent with cutoff {self.cutoff}")
        if not c.flags.writeable and c is self.coeffs:
            return
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def dim(self) -> int:
        return self.coeffs.shape[0]

    def __add__(self, other: "SpectralField") -> "SpectralField":
        self._check_compatible(other)
        return SpectralField(self.coeffs + other.coeffs, self.cutoff)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        self._check_compatible(other)
        return SpectralField(self.coeffs - other.coeffs, self.cutoff)

    def __mul__(self, scalar) -> "SpectralField":
        return SpectralField(self.coeffs * complex(scalar), self.cutoff)

    __rmul__ = __mul__

    def __neg__(self) -> "SpectralField":
        return SpectralField(-self.coeffs, self.cutoff)

    def _check_compatible(self, other: "SpectralField") -> None:
        if self.cutoff != other.cutoff or self.dim != other.dim:
            raise ValueError("fields live on different lattices")

    def max_divergence(self) -> float:
        """max_k |k . u_hat(k)|, zero to machine precision for valid fields."""
        k = lattice_wavevectors(self.dim, self.cutoff)
        return float(np.abs(np.sum(k * self.coeffs, axis=0)).max())

    def max_reality_defect(self) -> float:
        """max_k |u_hat(-k) - conj(u_hat(k))|."""
        return float(np.abs(_conjugate_partner(self.coeffs) - np.conj(self.coeffs)).max())


@dataclass(frozen=True)
class PhysicalField:
    """Real vector field sampled on the uniform N^d collocation grid."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        dim = v.shape[0]
        if dim not in (2, 3) or any(s != v.shape[1] for s in v.shape[1:]):
            raise ValueError(f"values shape {v.shape} is not (dim, N, ..., N)")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    @property
    def grid_size(self) -> int:
        return self.values.shape[1]


def _conjugate_partner(coeffs: np.ndarray) -> np.ndarray:
    """Coefficient array re-indexed k -> -k (FFT order: reverse then roll)."""
    out = coeffs
    for ax in range(1, coeffs.ndim):
        out = np.roll(np.flip(out, axis=ax), 1, axis=ax)
    return out


# ---------------------------------------------------------------------------
# projection and transforms


def leray_project(raw, cutoff: int | None = None) -> SpectralField:
    """Project raw coefficients onto divergence-free, mean-free fields.

    Per mode applies I - k k^T / |k|^2 and zeroes k = 0.  The projection is
    idempotent and self-adjoint in the H inner product, and preserves the
    Hermitian (reality) symmetry when the input has it.
    """
    if isinstance(raw, SpectralField):
        coeffs, cutoff = raw.coeffs, raw.cutoff
    else:
        coeffs = np.asarray(raw, dtype=np.complex128)
        if cutoff is None:
            cutoff = (coeffs.shape[1] - 1) // 2
    dim = coeffs.shape[0]
    out = _leray_raw(np.array(coeffs), dim, cutoff)
    return SpectralField(out, cutoff)


def _leray_raw(coeffs: np.ndarray, dim: int, cutoff: int) -> np.ndarray:
    k = lattice_wavevectors(dim, cutoff)
    k2 = lattice_k2(dim, cutoff)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(k2 > 0, np.sum(k * coeffs, axis=0) / np.where(k2 > 0, k2, 1.0), 0.0)
    out = coeffs - k * s
    out[(slice(None),) + (0,) * dim] = 0.0
    return out


def to_physical(field: SpectralField, grid: int) -> PhysicalField:
    """Synthesize the field on an N^d collocation grid, N >= 2*cutoff + 1."""
    vals = synthesize(field.coeffs, field.cutoff, grid)
    return PhysicalField(vals)


def synthesize(coeffs: np.ndarray, cutoff: int, grid: int) -> np.ndarray:
    """Raw inverse transform onto an N^d grid; returns float64 values."""
    dim = coeffs.shape[0]
    if grid < 2 * cutoff + 1:
        raise ValueError(f"grid {grid} too small to resolve cutoff {cutoff} (need >= {2 * cutoff + 1})")
    big = np.zeros((dim,) + (grid,) * dim, dtype=np.complex128)
    big[(slice(None),) + _embed_indices(dim, cutoff, grid)] = coeffs
    vals = _fft.ifftn(big, axes=tuple(range(1, dim + 1))) * grid**dim
    imag = float(np.abs(vals.imag).max())
    scale = float(np.abs(vals.real).max())
    if imag > 1e-8 * (1.0 + scale):
        raise ValueError(f"field is not real (max imaginary part {imag:.3e}); reality symmetry broken")
    return np.ascontiguousarray(vals.real)


def to_spectral(phys, cutoff: int, project: bool = False) -> SpectralField:
    """Forward transform of a collocation grid, truncated to the lattice.

    With project=True the result is additionally Leray-projected.
    """
    values = phys.values if isinstance(phys, PhysicalField) else np.asarray(phys, dtype=np.float64)
    coeffs = analyze(values, cutoff)
    if project:
        coeffs = _leray_raw(coeffs, values.shape[0], cutoff)
    return SpectralField(coeffs, cutoff)


def analyze(values: np.ndarray, cutoff: int) -> np.ndarray:
    """Raw forward transform, truncated to the (2n+1)^d lattice."""
    dim = values.shape[0]
    grid = values.shape[1]
    if grid < 2 * cutoff + 1:
        raise ValueError(f"grid {grid} cannot resolve cutoff {cutoff}")
    hat = _fft.fftn(values, axes=tuple(range(1, dim + 1))) / grid**dim
    return np.ascontiguousarray(hat[(slice(None),) + _embed_indices(dim, cutoff, grid)])


# ---------------------------------------------------------------------------
# norms and inner products


def h_inner(a: SpectralField, b: SpectralField) -> float:
    """H (L^2) inner product of two real fields, computed spectrally."""
    a._check_compatible(b)
    return float(TWO_PI ** a.dim * np.sum(a.coeffs * np.conj(b.coeffs)).real)


def grid_quadrature_weight(dim: int, grid: int) -> float:
    return (TWO_PI / grid) ** dim


def norm(field, kind: str, p: float | None = None, grid: int | None = None) -> float:
    """Norm of a field: kind in {"H", "V", "Vdual", "Lp"}.

    H works for spectral and physical fields (Parseval vs. quadrature);
    V and Vdual are spectral; Lp synthesizes spectral input on an
    oversampled grid (or uses the given PhysicalField's own grid).
    """
    if kind == "Lp":
        if p is None or p < 1:
            raise ValueError(f"Lp norm needs p >= 1, got {p}")
        return lp_norm(field, p, grid=grid)
    if isinstance(field, PhysicalField):
        if kind == "H":
            w = grid_quadrature_weight(field.dim, field.grid_size)
            return float(np.sqrt(np.sum(field.values**2) * w))
        if kind in ("V", "Vdual"):
            # full-spectrum gradient quadrature of the grid samples (the
            # sign-ambiguous Nyquist mode of even grids is dropped)
            full = to_spectral(field, (field.grid_size - 1) // 2)
            return norm(full, kind)
        raise TypeError(f"norm kind {kind!r} needs a SpectralField")
    if kind == "H":
        return float(np.sqrt(TWO_PI ** field.dim * np.sum(np.abs(field.coeffs) ** 2)))
    if kind == "V":
        k2 = lattice_k2(field.dim, field.cutoff)
        return float(np.sqrt(TWO_PI ** field.dim * np.sum(k2 * np.abs(field.coeffs) ** 2)))
    if kind == "Vdual":
        k2 = lattice_k2(field.dim, field.cutoff)
        safe = np.where(k2 > 0, k2, 1.0)
        mag2 = np.sum(np.abs(field.coeffs) ** 2, axis=0)
        return float(np.sqrt(TWO_PI ** field.dim * np.sum(np.where(k2 > 0, mag2 / safe, 0.0))))
    raise ValueError(f"unknown norm kind {kind!r}")


def lp_norm(field, p: float, grid: int | None = None) -> float:
    """L^p norm by grid quadrature of |u(x)| (Euclidean vector magnitude)."""
    if isinstance(field, PhysicalField):
        vals = field.values
        n_grid = field.grid_size
        dim = field.dim
    else:
        dim = field.dim
        n_grid = grid if grid is not None else good_fft_size(4 * field.cutoff + 2)
        vals = synthesize(field.coeffs, field.cutoff, n_grid)
    mag2 = np.sum(vals * vals, axis=0)
    w = grid_quadrature_weight(dim, n_grid)
    return float((np.sum(mag2 ** (p / 2.0)) * w) ** (1.0 / p))


# ---------------------------------------------------------------------------
# smoothing filter


def smoothing_filter(field: SpectralField, n: int) -> SpectralField:
    """Spectral smoother: gain exp(-|k|^2 / n) on modes with |k|^2 < n^2, else 0.

    Self-adjoint with gains <= 1, hence H- and V-norm nonincreasing, but not
    a projection (no gain equals 1 except at k = 0).
    """
    if int(n) != n or n < 1:
        raise ValueError(f"filter parameter must be a positive integer, got {n}")
    n = int(n)
    k2 = lattice_k2(field.dim, field.cutoff)
    gains = np.where(k2 < n * n, np.exp(-k2 / n), 0.0)
    return SpectralField(field.coeffs * gains, field.cutoff)


# ---------------------------------------------------------------------------
# deterministic basis modes and random fields


@lru_cache(maxsize=None)
def _ordered_wavevectors(dim: int, cutoff: int) -> tuple:
    """Lex-positive representatives of +/-k pairs, sorted by (|k|^2, k)."""
    ks = []
    rng = range(-cutoff, cutoff + 1)
    grids = np.meshgrid(*([list(rng)] * dim), indexing="ij")
    flat = np.stack([g.ravel() for g in grids], axis=1)
    for row in flat:
        k = tuple(int(v) for v in row)
        if all(v == 0 for v in k):
            continue
        nz = next(v for v in k if v != 0)
        if nz < 0:
            continue
        ks.append(k)
    ks.sort(key=lambda k: (sum(v * v for v in k), k))
    return tuple(ks)


def _polarizations(k: tuple) -> list[np.ndarray]:
    kv = np.array(k, dtype=np.float64)
    if len(k) == 2:
        e = np.array([-kv[1], kv[0]]) / np.linalg.norm(kv)
        return [e]
    # 3D: deterministic orthonormal pair normal to k
    axis = int(np.argmin(np.abs(kv)))
    a = np.zeros(3)
    a[axis] = 1.0
    e1 = np.cross(kv, a)
    e1 = e1 / np.linalg.norm(e1)
    e2 = np.cross(kv / np.linalg.norm(kv), e1)
    return [e1, e2]


def basis_mode(dim: int, cutoff: int, index: int) -> SpectralField:
    """index-th real divergence-free basis field, orthonormal in H.

    Ordering: wavevectors by (|k|^2, lexicographic), one representative per
    +/-k pair, then polarization, then cosine before sine.
    """
    count = 0
    for k in _ordered_wavevectors(dim, cutoff):
        for e in _polarizations(k):
            for phase in ("cos", "sin"):
                if count == index:
                    return _pure_mode(dim, cutoff, k, e, phase)
                count += 1
    raise ValueError(f"basis index {index} exceeds lattice capacity")


def _pure_mode(dim: int, cutoff: int, k: tuple, e: np.ndarray, phase: str) -> SpectralField:
    m = 2 * cutoff + 1
    coeffs = np.zeros((dim,) + (m,) * dim, dtype=np.complex128)
    idx_pos = tuple(v % m for v in k)
    idx_neg = tuple((-v) % m for v in k)
    amp = 1.0 / (np.sqrt(2.0) * TWO_PI ** (dim / 2.0))
    if phase == "cos":
        cpos = amp * e
        cneg = amp * e
    else:
        cpos = -1j * amp * e
        cneg = 1j * amp * e
    for c in range(dim):
        coeffs[(c,) + idx_pos] = cpos[c]
        coeffs[(c,) + idx_neg] = cneg[c]
    return SpectralField(coeffs, cutoff)


def random_divergence_free(
    dim: int,
    cutoff: int,
    rng: np.random.Generator,
    decay: float = 2.0,
    norm_h: float | None = 1.0,
) -> SpectralField:
    """Seeded random real divergence-free field with (1+|k|^2)^-decay spectrum."""
    m = 2 * cutoff + 1
    shape = (dim,) + (m,) * dim
    raw = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    k2 = lattice_k2(dim, cutoff)
    raw *= (1.0 + k2) ** (-decay)
    raw = 0.5 * (raw + np.conj(_conjugate_partner(raw)))
    field = leray_project(raw, cutoff)
    if norm_h is not None:
        h = norm(field, "H")
        if h > 0:
            field = field * (norm_h / h)
    return field


# ---------------------------------------------------------------------------
# snapshot persistence (JSON, schema documented in the README)


def field_to_dict(field: SpectralField) -> dict:
    modes = []
    k = lattice_wavevectors(field.dim, field.cutoff)
    flat_k = k.reshape(field.dim, -1).T
    flat_c = field.coeffs.reshape(field.dim, -1).T
    for kv, cv in zip(flat_k, flat_c):
        if np.all(cv == 0):
            continue
        modes.append(
            {
                "k": [int(v) for v in kv],
                "re": [float(x.real) for x in cv],
                "im": [float(x.imag) for x in cv],
            }
        )
    return {"dim": field.dim, "cutoff": field.cutoff, "modes": modes}


def field_from_dict(data: dict) -> SpectralField:
    dim = int(data["dim"])
    cutoff = int(data["cutoff"])
    m = 2 * cutoff + 1
    coeffs = np.zeros((dim,) + (m,) * dim, dtype=np.complex128)
    for mode in data["modes"]:
        idx = tuple(int(v) % m for v in mode["k"])
        for c in range(dim):
            coeffs[(c,) + idx] = complex(mode["re"][c], mode["im"][c])
    return SpectralField(coeffs, cutoff)


def save_field(field: SpectralField, path) -> None:
    Path(path).write_text(json.dumps(field_to_dict(field)) + "\n", encoding="utf-8")


def load_field(path) -> SpectralField:
    return field_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
