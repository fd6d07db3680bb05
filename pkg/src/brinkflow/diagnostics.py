"""Verification diagnostics over computed trajectories.

Four families of checks:

* energy balance: the per-step ledger must close the identity
  ||y(t)||_H^2 + 2 int (mu ||y||_V^2 + alpha ||y||_{q+1}^{q+1}
  + beta ||y||_{r+1}^{r+1} + <theta_eps(y), y>) ds
  = ||y0||_H^2 + 2 int <f, y> ds
  up to time-quadrature error (trapezoid on ledger samples).

* a-priori bound: the unconditional growth estimate with the Young constant
  kappa and the mollified law's sign constants; its margin must never go
  measurably negative.

* variational-inequality residual: against a set of divergence-free test
  fields, <dy/dt, v> + <F(y), v> + sum_i int j_i^0(y_i; v_i) >= <f, v>
  holds up to a computable gap from the centered time difference and the
  regularization's envelope band.

* uniqueness/contraction: the H-distance of two runs stays below the
  exponential envelope built from the constants varrho_1..varrho_5 and the
  law's one-sided Lipschitz defect K.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import laws as _laws
from . import spectral as _sp
from .operators import OperatorParams
from .solver import (
    EnergyLedger,
    RhsEngine,
    SimConfig,
    SimulationResult,
    Stepper,
    _retruncate,
    build_regularized,
    integrate,
)

TWO_PI = 2.0 * np.pi


class RegimeError(ValueError):
    """The requested estimate is outside its admissible parameter regime."""


# ---------------------------------------------------------------------------
# compensated time quadrature


def cumulative_trapezoid(t: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Cumulative trapezoid with Kahan-compensated accumulation."""
    out = np.empty_like(np.asarray(f, dtype=np.float64))
    out[0] = 0.0
    total = 0.0
    comp = 0.0
    for i in range(1, len(out)):
        inc = 0.5 * (f[i] + f[i - 1]) * (t[i] - t[i - 1])
        y = inc - comp
        s = total + y
        comp = (s - total) - y
        total = s
        out[i] = total
    return out


# ---------------------------------------------------------------------------
# energy equality


def energy_regime(dim: int, r: float) -> str:
    """Scope label for the energy identity: exact in 2D for r >= 1 and in 3D
    for r >= 3; advisory otherwise (still checked, the finite Galerkin
    dynamics are smooth regardless)."""
    if dim == 2 or (dim == 3 and r >= 3):
        return "exact-scope"
    return "advisory"


def energy_balance_residual(ledger: EnergyLedger, params: OperatorParams) -> np.ndarray:
    """Residual of the integrated energy identity at every ledger time.

    residual(t) = E_H2(t) - E_H2(0)
                  + 2 int_0^t (mu E_V2 + alpha E_Lq + beta E_Lr + work_theta) ds
                  - 2 int_0^t work_f ds

    Zero for the exact dynamics; trapezoid + Runge-Kutta error in practice,
    shrinking at second order in dt.
    """
    integrand = (
        params.mu * ledger.E_V2
        + params.alpha * ledger.E_Lq
        + params.beta * ledger.E_Lr
        + ledger.work_theta
        - ledger.work_f
    )
    return ledger.E_H2 - ledger.E_H2[0] + 2.0 * cumulative_trapezoid(ledger.t, integrand)


# ---------------------------------------------------------------------------
# a-priori bound


def young_kappa(params: OperatorParams) -> float:
    """kappa = ((q+1)/(beta (r+1)))^{(q+1)/(r-q)} * (r-q)/(r+1)."""
    r, q, beta = params.r, params.q, params.beta
    return ((q + 1.0) / (beta * (r + 1.0))) ** ((q + 1.0) / (r - q)) * ((r - q) / (r + 1.0))


@dataclass
class AprioriReport:
    times: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    margin: np.ndarray
    tolerance: np.ndarray
    passed: bool

    def to_dict(self) -> dict:
        return {
            "passed": bool(self.passed),
            "min_margin": float(self.margin.min()),
            "rhs_final": float(self.rhs[-1]),
            "lhs_final": float(self.lhs[-1]),
        }


def apriori_margin(ledger: EnergyLedger, cfg: SimConfig,
                   reg_law: _laws.RegularizedLaw | None = None,
                   tol_rel: float = 1e-6) -> AprioriReport:
    """Margin of the unconditional growth bound at every ledger time.

    lhs(t) = E_H2(t) + mu int E_V2 + beta int E_Lr
    rhs(t) = E_H2(0) + (1/mu) int ||f||_{V'}^2
             + kappa (2|alpha|)^{(r+1)/(r-q)} |D| T + sum_i 2 c1 c2 |D| T

    Contract: margin = rhs - lhs >= -tol_rel * rhs everywhere.
    """
    p = cfg.params
    if not p.beta > 0:
        raise RegimeError("the a-priori bound requires beta > 0")
    volume = TWO_PI**cfg.dim
    lhs = ledger.E_H2 + p.mu * cumulative_trapezoid(ledger.t, ledger.E_V2) \
        + p.beta * cumulative_trapezoid(ledger.t, ledger.E_Lr)
    horizon = cfg.T if cfg.T > 0 else 0.0
    alpha_term = 0.0
    if p.alpha != 0.0:
        alpha_term = young_kappa(p) * (2.0 * abs(p.alpha)) ** ((p.r + 1.0) / (p.r - p.q)) * volume * horizon
    law_term = 0.0
    if reg_law is None:
        reg_law = build_regularized(cfg)
    if reg_law is not None:
        c1, c2, _ = _laws.lemma_sign_constants(reg_law, cfg.dim)
        law_term = 2.0 * cfg.dim * c1 * c2 * volume * horizon
    f2 = forcing_vdual2_series(cfg, ledger.t)
    rhs = ledger.E_H2[0] + cumulative_trapezoid(ledger.t, f2) / p.mu + alpha_term + law_term
    margin = rhs - lhs
    tolerance = tol_rel * np.abs(rhs)
    return AprioriReport(
        times=ledger.t, lhs=lhs, rhs=rhs, margin=margin, tolerance=tolerance,
        passed=bool(np.all(margin >= -tolerance)),
    )


def forcing_vdual2_series(cfg: SimConfig, times: np.ndarray) -> np.ndarray:
    """||f(t)||_{V'}^2 sampled at the given times."""
    from .solver import build_forcing_profile

    profile = build_forcing_profile(cfg)
    if profile is None:
        return np.zeros(len(times))
    k2 = _sp.lattice_k2(cfg.dim, cfg.cutoff)
    safe = np.where(k2 > 0, k2, 1.0)
    mag2 = np.sum(np.abs(profile.coeffs) ** 2, axis=0)
    base = float(TWO_PI**cfg.dim * np.sum(np.where(k2 > 0, mag2 / safe, 0.0)))
    return np.array([cfg.forcing.scale(float(t)) ** 2 * base for t in times])


# ---------------------------------------------------------------------------
# Gronwall constants and the contraction study


@dataclass(frozen=True)
class GronwallConstants:
    """Constants of the two-solution Gronwall estimate.

    regime is one of "2D_r_ge_1", "3D_r_gt_3", "3D_r_eq_3_supercritical_viscosity".
    The exponential rate for the H-distance w(t) = ||y1 - y2||_H is

        2D:       (varrho1 + varrho2 + K) t + 27/(32 mu^3) int ||y2||_{L4}^4
        3D r > 3: (varrho1 + varrho2 + varrho3 + K) t
        3D r = 3: (varrho4 + varrho5 + K) t

    varrho1 and varrho2 are given by the same printed expression; the
    duplication is flagged rather than silently merged.
    """

    varrho1: float
    varrho2: float
    varrho3: float
    varrho4: float
    varrho5: float
    K: float
    regime: str
    twod_l4_factor: float = 0.0
    rho1_rho2_identical: bool = True

    def rate_constant(self) -> float:
        if self.regime == "2D_r_ge_1":
            return self.varrho1 + self.varrho2 + self.K
        if self.regime == "3D_r_gt_3":
            return self.varrho1 + self.varrho2 + self.varrho3 + self.K
        return self.varrho4 + self.varrho5 + self.K

    def to_dict(self) -> dict:
        return {
            "varrho1": self.varrho1,
            "varrho2": self.varrho2,
            "varrho3": self.varrho3,
            "varrho4": self.varrho4,
            "varrho5": self.varrho5,
            "K": self.K,
            "regime": self.regime,
            "rate_constant": self.rate_constant(),
            "twod_l4_factor": self.twod_l4_factor,
            "rho1_rho2_identical_as_printed": self.rho1_rho2_identical,
        }


def _rho12(params: OperatorParams) -> float:
    r, q, alpha, beta = params.r, params.q, params.alpha, params.beta
    if q == 1.0:
        # (q-1) base with vanishing exponent; taken as 0 here: the pumping
        # difference is then linear and carries no Young-split constant
        return 0.0
    base = 2.0 ** (q + 1.0) * q * abs(alpha) * (q - 1.0) / (beta * (r - 1.0))
    return ((r - q) / (r - 1.0)) * base ** ((q - 1.0) / (r - q))


def gronwall_constants(params: OperatorParams, dim: int, K: float) -> GronwallConstants:
    """Constants for the uniqueness estimate; raises RegimeError outside
    2D r >= 1, 3D r > 3, and 3D r = 3 with 2*beta*mu > 1."""
    r, q, mu, alpha, beta = params.r, params.q, params.mu, params.alpha, params.beta
    if K < 0:
        raise ValueError("K must be >= 0")
    if not beta > 0:
        raise RegimeError("the uniqueness estimate requires beta > 0")
    if dim == 2:
        rho = _rho12(params)
        return GronwallConstants(
            varrho1=rho, varrho2=rho, varrho3=0.0, varrho4=0.0, varrho5=0.0,
            K=K, regime="2D_r_ge_1", twod_l4_factor=27.0 / (32.0 * mu**3),
        )
    if dim != 3:
        raise RegimeError(f"dim must be 2 or 3, got {dim}")
    if r > 3.0:
        rho = _rho12(params)
        varrho3 = (1.0 / (4.0 * mu)) * ((r - 3.0) / (r - 1.0)) * (4.0 / (mu * beta * (r - 1.0))) ** (2.0 / (r - 3.0))
        return GronwallConstants(
            varrho1=rho, varrho2=rho, varrho3=varrho3, varrho4=0.0, varrho5=0.0,
            K=K, regime="3D_r_gt_3",
        )
    if r == 3.0:
        if not 2.0 * beta * mu > 1.0:
            raise RegimeError(
                f"uniqueness regime requires 2*beta*mu > 1 for d = r = 3; got 2*beta*mu = {2.0 * beta * mu:.6g}"
            )
        if q == 1.0:
            varrho4 = varrho5 = 0.0
        else:
            varrho4 = ((3.0 - q) / 2.0) * (2.0 ** (q - 1.0) * q * abs(alpha) * mu * (q - 1.0)) ** ((q - 1.0) / (3.0 - q))
            varrho5 = ((3.0 - q) / 2.0) * (
                2.0 ** (q - 1.0) * q * abs(alpha) * (q - 1.0) / (beta - 1.0 / (2.0 * mu))
            ) ** ((q - 1.0) / (3.0 - q))
        return GronwallConstants(
            varrho1=0.0, varrho2=0.0, varrho3=0.0, varrho4=varrho4, varrho5=varrho5,
            K=K, regime="3D_r_eq_3_supercritical_viscosity",
        )
    raise RegimeError(f"no uniqueness estimate for dim = 3 with r = {r} < 3")


def gronwall_constants_from_config(cfg: SimConfig) -> GronwallConstants:
    law = _laws.zigzag_example() if cfg.law == "zigzag" else None
    if cfg.law not in ("", "none", "zero", "zigzag"):
        law = _laws.load_law(cfg.law)
    K = 0.0 if law is None or law.K is None else law.K
    return gronwall_constants(cfg.params, cfg.dim, K)


@dataclass
class ContractionReport:
    times: np.ndarray
    w: np.ndarray
    envelope: np.ndarray
    constants: GronwallConstants
    delta: float
    passed: bool
    bit_identical: bool

    def to_dict(self) -> dict:
        return {
            "passed": bool(self.passed),
            "delta": self.delta,
            "bit_identical": bool(self.bit_identical),
            "w_final": float(self.w[-1]),
            "envelope_final": float(self.envelope[-1]),
            "constants": self.constants.to_dict(),
        }


def contraction_study(cfg: SimConfig, delta: float, perturbation_index: int = 0,
                      tol_rel: float = 1e-6) -> ContractionReport:
    """Integrate the configured run and a delta-perturbed twin in lockstep and
    compare their H-distance against the Gronwall envelope.

    The perturbation is delta times a unit-H basis mode.  delta = 0 must give
    bit-identical trajectories.
    """
    cfg.validate()
    constants = gronwall_constants_from_config(cfg)
    reg = build_regularized(cfg)
    engine = RhsEngine(cfg, reg_law=reg)
    base = Stepper(cfg, engine=engine)
    pert_init = base.field()
    if delta != 0.0:
        pert_init = pert_init + delta * _sp.basis_mode(cfg.dim, cfg.cutoff, perturbation_index)
    pert = Stepper(cfg, initial=pert_init, engine=engine)

    steps = int(round(cfg.T / cfg.dt)) if cfg.T > 0 else 0
    volume = TWO_PI**cfg.dim
    times = np.empty(steps + 1)
    w = np.empty(steps + 1)
    l4 = np.empty(steps + 1)
    identical = True
    for m in range(steps + 1):
        diag, _ = base.collect()
        times[m] = base.t
        diff = base.state - pert.state
        identical = identical and bool(np.array_equal(base.state, pert.state))
        w[m] = math.sqrt(volume * float(np.sum(np.abs(diff) ** 2)))
        l4[m] = diag.E_L4
        if m == steps:
            break
        base.advance()
        pert.advance()

    rate = constants.rate_constant()
    exponent = rate * times
    if constants.regime == "2D_r_ge_1":
        exponent = exponent + constants.twod_l4_factor * cumulative_trapezoid(times, l4)
    # the data-dependent exponent easily exceeds the float ceiling for small
    # mu; the bound holds a fortiori there, so saturate instead of overflowing
    envelope = w[0] * np.exp(np.minimum(exponent, 700.0))
    if delta == 0.0:
        passed = identical and bool(np.all(w == 0.0))
    else:
        passed = bool(np.all(w <= envelope * (1.0 + tol_rel)))
    return ContractionReport(
        times=times, w=w, envelope=envelope, constants=constants,
        delta=delta, passed=passed, bit_identical=identical,
    )


# ---------------------------------------------------------------------------
# variational-inequality residual


@dataclass
class HVIRecord:
    t: float
    field_label: str
    margin: float
    gap: float
    envelope_gap: float
    defect_gap: float


@dataclass
class HVIReport:
    records: list[HVIRecord]
    passed: bool
    min_margin_plus_gap: float
    max_envelope_gap: float

    def to_dict(self) -> dict:
        return {
            "passed": bool(self.passed),
            "min_margin_plus_gap": self.min_margin_plus_gap,
            "max_envelope_gap": self.max_envelope_gap,
            "n_records": len(self.records),
        }


def default_test_fields(cfg: SimConfig, n_basis: int = 8, n_random: int = 4,
                        seed: int = 1234) -> list[tuple[str, _sp.SpectralField]]:
    """First basis modes plus seeded random divergence-free probes."""
    fields = [(f"basis{i}", _sp.basis_mode(cfg.dim, cfg.cutoff, i)) for i in range(n_basis)]
    rng = np.random.default_rng((cfg.seed, seed))
    for i in range(n_random):
        fields.append((f"random{i}", _sp.random_divergence_free(cfg.dim, cfg.cutoff, rng)))
    return fields


def hvi_residual(result: SimulationResult, cfg: SimConfig,
                 test_fields: list[tuple[str, _sp.SpectralField]] | None = None,
                 include_state: bool = True) -> HVIReport:
    """Inequality margin against each test field at each interior sample.

    margin(t, v) = <dy/dt, v> + <F(y), v> + sum_i int j_i^0(y_i; v_i) dx - <f, v>
                 = <defect, v> + sum_i int (j_i^0(y_i; v_i) - chi_i v_i) dx,

    where defect is the centered-difference error of dy/dt and chi is the
    recorded selection theta_eps(y).  The computable lower bound is -gap with
    gap = |<defect, v>| + sum_i int osc(y_i) |v_i| dx (envelope band padded by
    one law-table cell), so margin + gap >= 0 is the tested contract.
    """
    cfg.validate()
    reg = build_regularized(cfg)
    engine = RhsEngine(cfg, reg_law=reg)
    law = None if reg is None else reg.base
    samples = result.trajectory.interior_samples()
    fields = test_fields if test_fields is not None else default_test_fields(cfg)
    grid = engine.grid
    weight = engine.weight
    volume = engine.volume

    probes = []
    for label, v in fields:
        probes.append((label, v.coeffs, _sp.synthesize(v.coeffs, cfg.cutoff, grid)))

    records: list[HVIRecord] = []
    for s in samples:
        y_raw = s.state.coeffs
        u = _sp.synthesize(y_raw, cfg.cutoff, grid)
        chi = s.chi if s.chi is not None else np.zeros_like(u)
        dcdt = (s.state_next.coeffs - s.state_prev.coeffs) / (2.0 * cfg.dt)
        defect = dcdt - engine.full_rhs(np.array(y_raw), s.t)
        osc = lower = upper = None
        if reg is not None:
            osc = np.stack([reg.oscillation_gap(u[c]) for c in range(cfg.dim)])
            bounds = [_laws.envelopes(law, u[c], 0.0) for c in range(cfg.dim)]
            lower = np.stack([b[0] for b in bounds])
            upper = np.stack([b[1] for b in bounds])
        candidates = list(probes)
        if include_state:
            candidates = candidates + [("state", y_raw, u)]
        for label, v_raw, v_vals in candidates:
            defect_pair = float(volume * np.sum(defect * np.conj(v_raw)).real)
            if law is None:
                j0_minus_chiv = 0.0
                env_gap = 0.0
            else:
                j0 = float(np.sum(np.where(v_vals >= 0.0, upper * v_vals, lower * v_vals)) * weight)
                chiv = float(np.sum(chi * v_vals) * weight)
                j0_minus_chiv = j0 - chiv
                env_gap = float(np.sum(osc * np.abs(v_vals)) * weight)
            margin = defect_pair + j0_minus_chiv
            gap = abs(defect_pair) + env_gap
            records.append(HVIRecord(t=s.t, field_label=label, margin=margin, gap=gap,
                                     envelope_gap=env_gap, defect_gap=abs(defect_pair)))

    if not records:
        return HVIReport(records=[], passed=True, min_margin_plus_gap=0.0, max_envelope_gap=0.0)
    slack = [rec.margin + rec.gap for rec in records]
    scale = max(1.0, max(abs(rec.margin) for rec in records))
    passed = min(slack) >= -1e-10 * scale
    return HVIReport(
        records=records,
        passed=bool(passed),
        min_margin_plus_gap=float(min(slack)),
        max_envelope_gap=float(max(rec.envelope_gap for rec in records)),
    )


# ---------------------------------------------------------------------------
# convergence (ladder) study


@dataclass
class LadderEntry:
    kind: str
    coarse: float
    fine: float
    distance: float


@dataclass
class ConvergenceReport:
    entries: list[LadderEntry]
    cauchy_ok: bool
    empirical_rates: dict

    def to_dict(self) -> dict:
        return {
            "entries": [
                {"kind": e.kind, "coarse": e.coarse, "fine": e.fine, "distance": e.distance}
                for e in self.entries
            ],
            "cauchy_ok": bool(self.cauchy_ok),
            "empirical_rates": self.empirical_rates,
        }


def _solution_samples(cfg: SimConfig) -> tuple[np.ndarray, list[_sp.SpectralField]]:
    result = integrate(cfg)
    ts = np.array([s.t for s in result.trajectory.samples])
    return ts, [s.state for s in result.trajectory.samples]


def _sampled_distance(ta, sa, tb, sb, cutoff: int, dim: int) -> float:
    """L^2(0,T;H) distance on the common sample times, coarser mode set."""
    common = np.intersect1d(np.round(ta, 12), np.round(tb, 12))
    ia = {round(float(t), 12): i for i, t in enumerate(ta)}
    ib = {round(float(t), 12): i for i, t in enumerate(tb)}
    ts, vals = [], []
    for t in common:
        key = round(float(t), 12)
        fa = _retruncate(sa[ia[key]], cutoff)
        fb = _retruncate(sb[ib[key]], cutoff)
        diff = fa - fb
        ts.append(float(t))
        vals.append(TWO_PI**dim * float(np.sum(np.abs(diff.coeffs) ** 2)))
    ts = np.array(ts)
    vals = np.array(vals)
    if len(ts) < 2:
        return math.sqrt(float(vals.sum())) if len(ts) else 0.0
    return math.sqrt(float(cumulative_trapezoid(ts, vals)[-1]))


def convergence_study(cfg: SimConfig, n_ladder=(), eps_ladder=(), dt_ladder=(),
                      threads: int = 1) -> ConvergenceReport:
    """Empirical Cauchy rates along refinement ladders.

    Successive-solution distances in L^2(0,T;H) on shared sample times,
    restricted to the coarser mode set for the n ladder.  The report asserts
    a non-increasing trend and fits a rate; no analytic rate is claimed.
    Independent runs dispatch over `threads` workers.
    """
    entries: list[LadderEntry] = []
    rates: dict = {}

    def run_ladder(kind: str, values, make_cfg):
        if threads > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(lambda v: _solution_samples(make_cfg(v)), values))
        else:
            results = [_solution_samples(make_cfg(v)) for v in values]
        sols = [(v, ts, states) for v, (ts, states) in zip(values, results)]
        dists = []
        for (va, ta, sa), (vb, tb, sb) in zip(sols[:-1], sols[1:]):
            cutoff = min(cfg.cutoff if kind != "n" else int(min(va, vb)), cfg.cutoff)
            d = _sampled_distance(ta, sa, tb, sb, cutoff, cfg.dim)
            entries.append(LadderEntry(kind=kind, coarse=float(va), fine=float(vb), distance=d))
            dists.append(d)
        if len(dists) >= 2 and all(d > 0 for d in dists):
            rates[kind] = float(np.mean(np.log(np.array(dists[:-1]) / np.array(dists[1:]))))

    if len(n_ladder) >= 2:
        run_ladder("n", list(n_ladder), lambda v: replace(cfg, cutoff=int(v)))
    if len(eps_ladder) >= 2:
        run_ladder("eps", list(eps_ladder), lambda v: replace(cfg, epsilon=float(v)))
    if len(dt_ladder) >= 2:
        run_ladder("dt", list(dt_ladder), lambda v: replace(cfg, dt=float(v)))

    by_kind: dict[str, list[float]] = {}
    for e in entries:
        by_kind.setdefault(e.kind, []).append(e.distance)
    cauchy_ok = all(
        all(a >= b - 1e-12 for a, b in zip(ds[:-1], ds[1:])) for ds in by_kind.values()
    )
    return ConvergenceReport(entries=entries, cauchy_ok=cauchy_ok, empirical_rates=rates)
