"""Time integration of the regularized Galerkin system on the torus.

The semi-discrete system for the spectral state y is

    dy/dt = f(t) - F(y) - P[ theta_eps(y) ],      F = mu*A + B + alpha*Ctilde + beta*C,

restricted to divergence-free, mean-free modes (P is the Leray projection,
applied componentwise to the grid image of the regularized law).  The stiff
diagonal part mu*|k|^2 is integrated exactly through an integrating factor;
everything else is explicit at Runge-Kutta stage values (IFRK4 default,
IFRK2 optional).

Every step appends one ledger row

    t, ||y||_H^2, ||y||_V^2, ||y||_{L^{r+1}}^{r+1}, ||y||_{L^{q+1}}^{q+1},
    <f, y>, sum_i integral theta_eps(y_i) y_i dx

with all grid quantities evaluated on the same oversampled collocation grid
the dynamics use, so the discrete energy identity is exact up to time
discretization.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.fft as _fft

from . import laws as _laws
from . import operators as _ops
from . import spectral as _sp
from .operators import OperatorParams
from .spectral import SpectralField

TWO_PI = 2.0 * np.pi


class BlowUpError(RuntimeError):
    """State became non-finite; carries the time and last finite H-norm."""

    def __init__(self, t: float, h_norm2: float, ledger: "EnergyLedger | None" = None):
        super().__init__(f"solution blew up at t = {t:.6g} (last finite ||y||_H^2 = {h_norm2:.6g})")
        self.t = t
        self.h_norm2 = h_norm2
        self.partial_ledger = ledger


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ForcingSpec:
    """Forcing f(t) = amplitude * cos(omega * t) * profile.

    kinds: "zero"; "taylor_green" (the vortex profile, 2D only); "modes"
    (explicit list of (k, complex amplitude per component), Hermitian part
    taken and Leray-projected).
    """

    kind: str = "zero"
    amplitude: float = 0.0
    omega: float = 0.0
    modes: tuple = ()

    def scale(self, t: float) -> float:
        return self.amplitude * math.cos(self.omega * t)


@dataclass(frozen=True)
class InitialConditionSpec:
    """Initial state: "taylor_green", "random", "zero", "modes", or "snapshot"."""

    kind: str = "taylor_green"
    amplitude: float = 1.0
    seed: int = 0
    decay: float = 2.0
    path: str = ""
    modes: tuple = ()


@dataclass(frozen=True)
class SimConfig:
    dim: int = 2
    params: OperatorParams = field(default_factory=lambda: OperatorParams(0.1, -0.5, 1.0, 3.0, 2.0))
    cutoff: int = 32
    grid: int = 96
    dt: float = 1e-3
    T: float = 1.0
    epsilon: float = 0.1
    law: str = "zigzag"
    scheme: str = "IFRK4"
    seed: int = 0
    forcing: ForcingSpec = field(default_factory=ForcingSpec)
    ic: InitialConditionSpec = field(default_factory=InitialConditionSpec)
    law_nodes: int = 4096
    law_xi_max: float = 0.0  # 0 -> automatic max(10, 4*phi)
    snapshot_count: int = 64

    def validation_errors(self) -> list[str]:
        errs = []
        if self.dim not in (2, 3):
            errs.append(f"dim must be 2 or 3, got {self.dim}")
        if self.cutoff < 1:
            errs.append(f"cutoff must be >= 1, got {self.cutoff}")
        if self.grid < 2 * self.cutoff + 1:
            errs.append(f"grid {self.grid} cannot resolve cutoff {self.cutoff} (need >= {2 * self.cutoff + 1})")
        if not self.dt > 0:
            errs.append(f"dt must be > 0, got {self.dt}")
        if self.T < 0:
            errs.append(f"T must be >= 0, got {self.T}")
        if self.T > 0 and self.dt > self.T:
            errs.append(f"dt = {self.dt} exceeds horizon T = {self.T}")
        try:
            guard = self.dt * self.params.mu * self.cutoff**2
            if guard > 50.0:
                errs.append(f"stability guard dt*mu*n^2 = {guard:.3g} exceeds 50")
            errs.extend(self.params.validation_errors())
        except Exception as exc:  # params may itself be malformed
            errs.append(str(exc))
        if not self.epsilon > 0:
            errs.append(f"epsilon must be > 0, got {self.epsilon}")
        if self.scheme not in ("IFRK4", "IFRK2"):
            errs.append(f"scheme must be IFRK4 or IFRK2, got {self.scheme!r}")
        if self.law_nodes < 16:
            errs.append("law_nodes must be >= 16")
        if self.snapshot_count < 1:
            errs.append("snapshot_count must be >= 1")
        if self.law not in ("", "none", "zero", "zigzag") and not Path(self.law).exists():
            errs.append(f"law file {self.law!r} does not exist")
        if self.ic.kind == "snapshot" and not Path(self.ic.path).exists():
            errs.append(f"initial-condition snapshot {self.ic.path!r} does not exist")
        return errs

    def validate(self) -> "SimConfig":
        errs = self.validation_errors()
        if errs:
            raise ValueError("; ".join(errs))
        return self


# ---------------------------------------------------------------------------
# construction of laws, forcing, initial conditions


def build_law(cfg: SimConfig) -> _laws.PiecewiseAffineLaw | None:
    """Resolve cfg.law to a law object; None means theta == 0 (skipped)."""
    name = cfg.law
    if name in ("", "none", "zero"):
        return None
    if name == "zigzag":
        return _laws.zigzag_example()
    return _laws.load_law(name)


def build_regularized(cfg: SimConfig) -> _laws.RegularizedLaw | None:
    law = build_law(cfg)
    if law is None:
        return None
    xi_max = cfg.law_xi_max if cfg.law_xi_max > 0 else None
    return _laws.mollify(law, cfg.epsilon, xi_max=xi_max, nodes=cfg.law_nodes)


def taylor_green_ic(amplitude: float, cutoff: int = 16) -> SpectralField:
    """2D vortex (sin x1 cos x2, -cos x1 sin x2) * amplitude; exactly
    divergence-free, and a steady Euler flow (its self-advection is a
    gradient, so the projected convection vanishes)."""
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    m = 2 * cutoff + 1
    coeffs = np.zeros((2, m, m), dtype=np.complex128)
    quarter = 0.25j * amplitude
    # u1 = sin x1 cos x2, u2 = -cos x1 sin x2, assembled from the four
    # (+-1, +-1) modes
    entries = {
        (1, 1): (-quarter, quarter),
        (-1, -1): (quarter, -quarter),
        (1, -1): (-quarter, -quarter),
        (-1, 1): (quarter, quarter),
    }
    for (k1, k2), (c1, c2) in entries.items():
        coeffs[0, k1 % m, k2 % m] = c1
        coeffs[1, k1 % m, k2 % m] = c2
    return SpectralField(coeffs, cutoff)


def _modes_to_field(dim: int, cutoff: int, modes) -> SpectralField:
    m = 2 * cutoff + 1
    coeffs = np.zeros((dim,) + (m,) * dim, dtype=np.complex128)
    for k, comps in modes:
        idx = tuple(int(v) % m for v in k)
        for c in range(dim):
            coeffs[(c,) + idx] = complex(comps[c])
    herm = 0.5 * (coeffs + np.conj(_sp._conjugate_partner(coeffs)))
    return _sp.leray_project(herm, cutoff)


def build_forcing_profile(cfg: SimConfig) -> SpectralField | None:
    f = cfg.forcing
    if f.kind == "zero" or f.amplitude == 0.0:
        return None
    if f.kind == "taylor_green":
        if cfg.dim != 2:
            raise ValueError("taylor_green forcing requires dim = 2")
        return taylor_green_ic(1.0, cfg.cutoff)
    if f.kind == "modes":
        return _modes_to_field(cfg.dim, cfg.cutoff, f.modes)
    raise ValueError(f"unknown forcing kind {f.kind!r}")


def build_initial_state(cfg: SimConfig) -> SpectralField:
    ic = cfg.ic
    if ic.kind == "zero":
        m = 2 * cfg.cutoff + 1
        return SpectralField(np.zeros((cfg.dim,) + (m,) * cfg.dim, dtype=np.complex128), cfg.cutoff)
    if ic.kind == "taylor_green":
        if cfg.dim != 2:
            raise ValueError("taylor_green initial condition requires dim = 2")
        return taylor_green_ic(ic.amplitude, cfg.cutoff)
    if ic.kind == "random":
        # the run seed and the IC seed both feed the stream, so either knob
        # reproduces or varies the draw
        rng = np.random.default_rng((cfg.seed, ic.seed))
        return _sp.random_divergence_free(cfg.dim, cfg.cutoff, rng, decay=ic.decay, norm_h=ic.amplitude)
    if ic.kind == "modes":
        return _modes_to_field(cfg.dim, cfg.cutoff, ic.modes)
    if ic.kind == "snapshot":
        raw = _sp.load_field(ic.path)
        if raw.dim != cfg.dim:
            raise ValueError("snapshot dimension mismatch")
        if raw.cutoff != cfg.cutoff:
            raw = _retruncate(raw, cfg.cutoff)
        return _sp.leray_project(raw.coeffs, cfg.cutoff)
    raise ValueError(f"unknown initial condition kind {ic.kind!r}")


def _retruncate(fieldv: SpectralField, cutoff: int) -> SpectralField:
    """Restrict or zero-pad a field to a different cutoff."""
    m_new = 2 * cutoff + 1
    out = np.zeros((fieldv.dim,) + (m_new,) * fieldv.dim, dtype=np.complex128)
    n_common = min(cutoff, fieldv.cutoff)
    src = _sp._embed_indices(fieldv.dim, n_common, 2 * fieldv.cutoff + 1)
    dst = _sp._embed_indices(fieldv.dim, n_common, m_new)
    out[(slice(None),) + dst] = fieldv.coeffs[(slice(None),) + src]
    return SpectralField(out, cutoff)


# ---------------------------------------------------------------------------
# right-hand side engine


@dataclass
class StepDiagnostics:
    E_H2: float
    E_V2: float
    E_Lr: float
    E_Lq: float
    E_L4: float
    work_f: float
    work_theta: float
    chi_H2: float


class RhsEngine:
    """Evaluates the explicit part of the dynamics on a shared grid.

    The single oversampled grid (>= 4n+2 points per axis) keeps the
    quadratic term alias-free on retained modes and the power pairings
    consistent between the dynamics and the energy ledger.
    """

    def __init__(self, cfg: SimConfig, reg_law: _laws.RegularizedLaw | None = None):
        cfg.validate()
        self.cfg = cfg
        self.dim = cfg.dim
        self.cutoff = cfg.cutoff
        self.params = cfg.params
        self.grid = _ops.oversample_grid_size(cfg.cutoff)
        self.k = _sp.lattice_wavevectors(cfg.dim, cfg.cutoff)
        self.k2 = _sp.lattice_k2(cfg.dim, cfg.cutoff)
        self.inv_k2 = np.where(self.k2 > 0, 1.0 / np.where(self.k2 > 0, self.k2, 1.0), 0.0)
        self.weight = _sp.grid_quadrature_weight(cfg.dim, self.grid)
        self.reg_law = reg_law if reg_law is not None else build_regularized(cfg)
        profile = build_forcing_profile(cfg)
        self.forcing_coeffs = None if profile is None else profile.coeffs
        self.forcing = cfg.forcing
        self.volume = TWO_PI**cfg.dim
        self._embed = _sp._embed_indices(cfg.dim, cfg.cutoff, self.grid)
        self._axes = tuple(range(1, cfg.dim + 1))
        self._scratch = None
        # synthesis stack: y first, then i*k_i * y per direction
        self._ik = np.ascontiguousarray(1j * self.k)

    def _synth_batch(self, stack: np.ndarray) -> np.ndarray:
        """Batched inverse transform onto the work grid (no reality check).

        Reuses one scratch buffer; engine instances therefore serve one
        thread at a time (studies build an engine per worker).
        """
        if self._scratch is None or self._scratch.shape[0] < stack.shape[0]:
            self._scratch = np.zeros((stack.shape[0],) + (self.grid,) * self.dim, dtype=np.complex128)
        big = self._scratch[: stack.shape[0]]
        big.fill(0.0)
        big[(slice(None),) + self._embed] = stack
        vals = _fft.ifftn(big, axes=self._axes)
        vals *= self.grid**self.dim
        return np.ascontiguousarray(vals.real)

    def _project(self, hat: np.ndarray) -> np.ndarray:
        s = np.sum(self.k * hat, axis=0) * self.inv_k2
        hat -= self.k * s
        hat[(slice(None),) + (0,) * self.dim] = 0.0
        return hat

    def forcing_raw(self, t: float) -> np.ndarray | None:
        if self.forcing_coeffs is None:
            return None
        return self.forcing.scale(t) * self.forcing_coeffs

    def forcing_vdual2(self, t: float) -> float:
        """||f(t)||_{V'}^2 for the a-priori bound."""
        if self.forcing_coeffs is None:
            return 0.0
        safe = np.where(self.k2 > 0, self.k2, 1.0)
        mag2 = np.sum(np.abs(self.forcing_coeffs) ** 2, axis=0)
        base = float(self.volume * np.sum(np.where(self.k2 > 0, mag2 / safe, 0.0)))
        return self.forcing.scale(t) ** 2 * base

    def nonlinear(self, raw: np.ndarray, t: float, collect: bool = False, collect_chi: bool = False):
        """Explicit rhs terms (everything but diffusion) plus optional ledger data.

        Returns (rhs_raw, diag, chi_grid): rhs_raw = f_hat - P[hat of
        ((y.grad)y + alpha|y|^{q-1}y + beta|y|^{r-1}y + theta_eps(y))].
        """
        p = self.params
        d = self.dim
        stack = np.concatenate([raw] + [self._ik[i] * raw for i in range(d)], axis=0)
        fields = self._synth_batch(stack)
        u = fields[:d]
        grads = fields[d:].reshape((d, d) + fields.shape[1:])
        with np.errstate(over="ignore", invalid="ignore"):
            flux = np.einsum("i...,ij...->j...", u, grads)
            mag2 = np.sum(u * u, axis=0)
            if p.alpha != 0.0:
                flux += p.alpha * (u * _half_power(mag2, p.q - 1.0))
            if p.beta != 0.0:
                flux += p.beta * (u * _half_power(mag2, p.r - 1.0))
        chi = None
        if self.reg_law is not None:
            chi = np.stack([self.reg_law(u[c]) for c in range(d)])
            flux += chi
        hat = _fft.fftn(flux, axes=self._axes)
        hat = -np.ascontiguousarray(hat[(slice(None),) + self._embed]) / self.grid**self.dim
        hat = self._project(hat)
        f_raw = self.forcing_raw(t)
        if f_raw is not None:
            hat += f_raw
        diag = None
        if collect:
            # overflow here is benign: it only happens on the way to a
            # blow-up, which the stepper reports from the state check
            with np.errstate(over="ignore", invalid="ignore"):
                w = self.weight
                e_h2 = float(self.volume * np.sum(np.abs(raw) ** 2))
                e_v2 = float(self.volume * np.sum(self.k2 * np.abs(raw) ** 2))
                e_lr = float(np.sum(_half_power(mag2, p.r + 1.0)) * w)
                e_lq = float(np.sum(_half_power(mag2, p.q + 1.0)) * w)
                e_l4 = float(np.sum(mag2 * mag2) * w)
                work_f = 0.0 if f_raw is None else float(self.volume * np.sum(f_raw * np.conj(raw)).real)
                if chi is None:
                    work_theta, chi_h2 = 0.0, 0.0
                else:
                    work_theta = float(np.sum(chi * u) * w)
                    chi_h2 = float(np.sum(chi * chi) * w)
            diag = StepDiagnostics(e_h2, e_v2, e_lr, e_lq, e_l4, work_f, work_theta, chi_h2)
        return hat, diag, (chi if collect_chi else None)

    def full_rhs(self, raw: np.ndarray, t: float) -> np.ndarray:
        nl, _, _ = self.nonlinear(raw, t)
        return nl - self.params.mu * self.k2 * raw


def _half_power(mag2: np.ndarray, expo: float) -> np.ndarray:
    """|u|^expo from |u|^2 with the 0^0 := 1 convention."""
    if expo == 0.0:
        return np.ones_like(mag2)
    if expo == 2.0:
        return mag2
    return mag2 ** (expo / 2.0)


def rhs(y: SpectralField, t: float, cfg: SimConfig, engine: RhsEngine | None = None) -> SpectralField:
    """Full right-hand side f(t) - F(y) - P[theta_eps(y)] as a field."""
    eng = engine if engine is not None else RhsEngine(cfg)
    out = eng.full_rhs(np.array(y.coeffs), t)
    if not np.all(np.isfinite(out)):
        raise BlowUpError(t, float(TWO_PI**y.dim * np.sum(np.abs(y.coeffs) ** 2)))
    return SpectralField(out, y.cutoff)


# ---------------------------------------------------------------------------
# stepping


class Stepper:
    """Marches one trajectory with an integrating-factor Runge-Kutta scheme."""

    def __init__(self, cfg: SimConfig, initial: SpectralField | None = None,
                 engine: RhsEngine | None = None):
        self.cfg = cfg.validate()
        self.engine = engine if engine is not None else RhsEngine(cfg)
        state0 = initial if initial is not None else build_initial_state(cfg)
        if state0.cutoff != cfg.cutoff or state0.dim != cfg.dim:
            raise ValueError("initial state lattice mismatch")
        self.state = _sp._leray_raw(np.array(state0.coeffs), cfg.dim, cfg.cutoff)
        self.steps_taken = 0
        self.dt = cfg.dt
        mu_k2 = cfg.params.mu * self.engine.k2
        self.e_half = np.exp(-mu_k2 * (self.dt / 2.0))
        self.e_full = self.e_half * self.e_half
        self._cached_k1 = None

    @property
    def t(self) -> float:
        # multiplicative clock: keeps sample times exactly reproducible
        # across runs and free of additive drift
        return self.steps_taken * self.dt

    def collect(self, collect_chi: bool = False):
        """Evaluate the rhs at the current state, caching it for the next step."""
        k1, diag, chi = self.engine.nonlinear(self.state, self.t, collect=True, collect_chi=collect_chi)
        self._cached_k1 = k1
        return diag, chi

    def field(self) -> SpectralField:
        return SpectralField(np.array(self.state), self.cfg.cutoff)

    def advance(self) -> None:
        y, dt, t = self.state, self.dt, self.t
        eng = self.engine
        e1, e2 = self.e_half, self.e_full
        if self._cached_k1 is not None:
            k1 = self._cached_k1
            self._cached_k1 = None
        else:
            k1, _, _ = eng.nonlinear(y, t)
        if self.cfg.scheme == "IFRK2":
            k2_, _, _ = eng.nonlinear(e1 * (y + 0.5 * dt * k1), t + 0.5 * dt)
            new = e2 * y + dt * (e1 * k2_)
        else:
            k2_, _, _ = eng.nonlinear(e1 * (y + 0.5 * dt * k1), t + 0.5 * dt)
            k3, _, _ = eng.nonlinear(e1 * y + 0.5 * dt * k2_, t + 0.5 * dt)
            k4, _, _ = eng.nonlinear(e2 * y + dt * (e1 * k3), t + dt)
            new = e2 * y + (dt / 6.0) * (e2 * k1 + 2.0 * e1 * (k2_ + k3) + k4)
        if not np.all(np.isfinite(new)):
            with np.errstate(over="ignore", invalid="ignore"):
                last = float(self.engine.volume * np.nansum(np.abs(y) ** 2))
            raise BlowUpError(t + dt, last)
        self.state = new
        self.steps_taken += 1


# ---------------------------------------------------------------------------
# ledger and trajectory containers


LEDGER_COLUMNS = ("t", "E_H2", "E_V2", "E_Lr", "E_Lq", "work_f", "work_theta")


@dataclass
class EnergyLedger:
    """Per-step time series. Column meanings match LEDGER_COLUMNS; chi_H2 and
    E_L4 ride along for diagnostics but are not part of the CSV contract."""

    t: np.ndarray
    E_H2: np.ndarray
    E_V2: np.ndarray
    E_Lr: np.ndarray
    E_Lq: np.ndarray
    work_f: np.ndarray
    work_theta: np.ndarray
    chi_H2: np.ndarray
    E_L4: np.ndarray

    def __post_init__(self):
        if len(self.t) > 1 and np.any(np.diff(self.t) <= 0):
            raise ValueError("ledger times must be strictly increasing")
        for name in ("E_H2", "E_V2", "E_Lr", "E_Lq"):
            arr = getattr(self, name)
            if np.any(arr < 0):
                raise ValueError(f"ledger column {name} has negative entries")

    def to_csv(self, path) -> None:
        with Path(path).open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(LEDGER_COLUMNS)
            cols = [getattr(self, c) for c in LEDGER_COLUMNS]
            for row in zip(*cols):
                writer.writerow([repr(float(v)) for v in row])

    @classmethod
    def from_csv(cls, path) -> "EnergyLedger":
        with Path(path).open("r", encoding="utf-8", newline="") as handle:
            reader = csv.reader(handle)
            header = next(reader)
            if tuple(header) != LEDGER_COLUMNS:
                raise ValueError(f"unexpected ledger header {header}")
            rows = [[float(v) for v in row] for row in reader]
        arr = np.array(rows, dtype=np.float64).reshape(-1, len(LEDGER_COLUMNS))
        cols = {name: arr[:, i] for i, name in enumerate(LEDGER_COLUMNS)}
        zeros = np.zeros(len(arr))
        return cls(chi_H2=zeros, E_L4=zeros.copy(), **cols)


@dataclass
class TrajectorySample:
    """State snapshot; interior samples carry neighbors for centered
    time differences and the grid image of the selection chi = theta_eps(y)."""

    t: float
    state: SpectralField
    state_prev: SpectralField | None = None
    state_next: SpectralField | None = None
    chi: np.ndarray | None = None


@dataclass
class Trajectory:
    cfg: SimConfig
    initial_state: SpectralField
    final_state: SpectralField
    times: np.ndarray
    samples: list[TrajectorySample]

    def interior_samples(self) -> list[TrajectorySample]:
        return [s for s in self.samples if s.state_prev is not None and s.state_next is not None]


@dataclass
class SimulationResult:
    trajectory: Trajectory
    ledger: EnergyLedger


def integrate(cfg: SimConfig, initial: SpectralField | None = None,
              reg_law: _laws.RegularizedLaw | None = None) -> SimulationResult:
    """March from the projected initial condition to T, recording the ledger
    every step and state/chi snapshots at the configured cadence."""
    cfg.validate()
    engine = RhsEngine(cfg, reg_law=reg_law)
    stepper = Stepper(cfg, initial=initial, engine=engine)
    steps = int(round(cfg.T / cfg.dt)) if cfg.T > 0 else 0
    cadence = max(1, steps // cfg.snapshot_count) if steps else 1

    rows = []
    samples: list[TrajectorySample] = []
    initial_state = stepper.field()
    pending: TrajectorySample | None = None
    prev_state: SpectralField | None = None
    try:
        for m in range(steps + 1):
            want_chi = m % cadence == 0 or m == steps
            diag, chi = stepper.collect(collect_chi=want_chi)
            rows.append((stepper.t, diag))
            if want_chi:
                sample = TrajectorySample(t=stepper.t, state=stepper.field(), state_prev=prev_state, chi=chi)
                samples.append(sample)
                pending = sample if 0 < m < steps else None
            if m == steps:
                break
            prev_state = stepper.field()
            stepper.advance()
            if pending is not None:
                pending.state_next = stepper.field()
                pending = None
    except BlowUpError as exc:
        exc.partial_ledger = _rows_to_ledger(rows)
        raise

    ledger = _rows_to_ledger(rows)
    traj = Trajectory(
        cfg=cfg,
        initial_state=initial_state,
        final_state=stepper.field(),
        times=ledger.t,
        samples=samples,
    )
    return SimulationResult(trajectory=traj, ledger=ledger)


def _rows_to_ledger(rows) -> EnergyLedger:
    def col(getter):
        return np.array([getter(d) for _, d in rows], dtype=np.float64)

    return EnergyLedger(
        t=np.array([t for t, _ in rows], dtype=np.float64),
        E_H2=col(lambda d: d.E_H2),
        E_V2=col(lambda d: d.E_V2),
        E_Lr=col(lambda d: d.E_Lr),
        E_Lq=col(lambda d: d.E_Lq),
        work_f=col(lambda d: d.work_f),
        work_theta=col(lambda d: d.work_theta),
        chi_H2=col(lambda d: d.chi_H2),
        E_L4=col(lambda d: d.E_L4),
    )
