"""TOML configuration loading, validation, and run manifests.

The resolved configuration is a pure-data dataclass; its canonical JSON
form is hashed (sha256, first 12 hex digits) to name run directories, so
identical configs land in identical directories and reproduce identical
ledgers byte for byte.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib as _toml  # py >= 3.11
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as _toml

from .operators import OperatorParams
from .solver import ForcingSpec, InitialConditionSpec, SimConfig


class ConfigError(Exception):
    """Aggregated configuration problems; .errors lists every message."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = list(errors)


@dataclass(frozen=True)
class StudyConfig:
    """Knobs for the diagnostic studies (not part of the simulation hash)."""

    energy_tol_rel: float = 1e-5
    apriori_tol_rel: float = 1e-6
    delta: float = 1e-6
    eps_ladder: tuple = (0.2, 0.1, 0.05, 0.025)
    n_ladder: tuple = ()
    dt_ladder: tuple = ()
    f_amplitudes: tuple = (0.0, 1.0, 10.0)
    hvi_seed: int = 1234


@dataclass
class LoadedConfig:
    sim: SimConfig
    study: StudyConfig
    warnings: list[str] = field(default_factory=list)


_TOP_KEYS = {
    "dim": int, "cutoff": int, "grid": int, "dt": float, "T": float,
    "epsilon": float, "law": str, "scheme": str, "seed": int,
    "law_nodes": int, "law_xi_max": float, "snapshot_count": int,
}
_PARAM_KEYS = {"mu": float, "alpha": float, "beta": float, "r": float, "q": float}
_FORCING_KEYS = {"kind": str, "amplitude": float, "omega": float, "modes": list}
_IC_KEYS = {"kind": str, "amplitude": float, "seed": int, "decay": float, "path": str, "modes": list}
_STUDY_KEYS = {
    "energy_tol_rel": float, "apriori_tol_rel": float, "delta": float,
    "eps_ladder": list, "n_ladder": list, "dt_ladder": list,
    "f_amplitudes": list, "hvi_seed": int,
}


def _coerce_section(raw: dict, schema: dict, section: str, errors: list[str]) -> dict:
    out = {}
    for key, value in raw.items():
        if key not in schema:
            errors.append(f"unknown key {section}{key!r}")
            continue
        want = schema[key]
        try:
            if want is float:
                out[key] = float(value)
            elif want is int:
                if isinstance(value, float) and not value.is_integer():
                    raise ValueError("not an integer")
                out[key] = int(value)
            elif want is str:
                if not isinstance(value, str):
                    raise ValueError("not a string")
                out[key] = value
            elif want is list:
                out[key] = list(value)
        except (TypeError, ValueError):
            errors.append(f"{section}{key} = {value!r} has the wrong type (expected {want.__name__})")
    return out


def _parse_modes(raw_modes, errors: list[str], section: str) -> tuple:
    modes = []
    for i, rec in enumerate(raw_modes):
        try:
            k = tuple(int(v) for v in rec["k"])
            re = [float(v) for v in rec.get("re", [])]
            im = [float(v) for v in rec.get("im", [0.0] * len(re))]
            comps = tuple(complex(a, b) for a, b in zip(re, im))
            modes.append((k, comps))
        except (KeyError, TypeError, ValueError):
            errors.append(f"{section}modes[{i}] must be a table with k, re, im arrays")
    return tuple(modes)


def config_from_dict(data: dict) -> LoadedConfig:
    """Build and validate the full configuration; raises ConfigError with
    every problem collected, not just the first."""
    errors: list[str] = []
    data = dict(data)
    params_raw = data.pop("params", {})
    forcing_raw = data.pop("forcing", {})
    ic_raw = data.pop("ic", {})
    study_raw = data.pop("study", {})

    top = _coerce_section(data, _TOP_KEYS, "", errors)
    par = _coerce_section(params_raw, _PARAM_KEYS, "params.", errors)
    fcg = _coerce_section(forcing_raw, _FORCING_KEYS, "forcing.", errors)
    icd = _coerce_section(ic_raw, _IC_KEYS, "ic.", errors)
    stu = _coerce_section(study_raw, _STUDY_KEYS, "study.", errors)

    if "modes" in fcg:
        fcg["modes"] = _parse_modes(fcg["modes"], errors, "forcing.")
    if "modes" in icd:
        icd["modes"] = _parse_modes(icd["modes"], errors, "ic.")
    for key in ("eps_ladder", "n_ladder", "dt_ladder", "f_amplitudes"):
        if key in stu:
            stu[key] = tuple(float(v) for v in stu[key])

    defaults = SimConfig()
    # bypass __post_init__ so invalid coefficients aggregate with the other
    # validation messages instead of raising first-fail
    params = object.__new__(OperatorParams)
    for name in _PARAM_KEYS:
        object.__setattr__(params, name, par.get(name, getattr(defaults.params, name)))

    sim = SimConfig(
        params=params,
        forcing=ForcingSpec(**fcg) if fcg else ForcingSpec(),
        ic=InitialConditionSpec(**icd) if icd else InitialConditionSpec(),
        **top,
    )
    errors.extend(sim.validation_errors())
    if errors:
        raise ConfigError(errors)

    warnings = []
    if sim.dim == 3 and sim.params.r == 3.0 and 2.0 * sim.params.beta * sim.params.mu <= 1.0:
        warnings.append(
            "a uniqueness study at d = r = 3 requires 2*beta*mu > 1; "
            f"this config has 2*beta*mu = {2.0 * sim.params.beta * sim.params.mu:.6g}"
        )
    return LoadedConfig(sim=sim, study=StudyConfig(**stu), warnings=warnings)


def apply_override(data: dict, entry: str) -> None:
    """Apply one 'dotted.path=value' override in place; values parse as JSON
    scalars with a bare-string fallback."""
    if "=" not in entry:
        raise ConfigError([f"override {entry!r} is not of the form key=value"])
    path, raw = entry.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node = data
    parts = path.strip().split(".")
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ConfigError([f"override path {path!r} crosses a non-table value"])
    node[parts[-1]] = value


def load_config(path: str | Path | None, overrides: tuple[str, ...] = ()) -> LoadedConfig:
    """Load a TOML file (missing path means all defaults), apply overrides,
    validate everything, and return the resolved configuration."""
    data: dict = {}
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ConfigError([f"config file {p} does not exist"])
        try:
            data = _toml.loads(p.read_text(encoding="utf-8"))
        except _toml.TOMLDecodeError as exc:
            raise ConfigError([f"TOML parse error: {exc}"]) from exc
    for entry in overrides:
        apply_override(data, entry)
    return config_from_dict(data)


# ---------------------------------------------------------------------------
# canonical form, hash, manifest


def config_to_dict(cfg: SimConfig) -> dict:
    return {
        "dim": cfg.dim,
        "cutoff": cfg.cutoff,
        "grid": cfg.grid,
        "dt": cfg.dt,
        "T": cfg.T,
        "epsilon": cfg.epsilon,
        "law": cfg.law,
        "scheme": cfg.scheme,
        "seed": cfg.seed,
        "law_nodes": cfg.law_nodes,
        "law_xi_max": cfg.law_xi_max,
        "snapshot_count": cfg.snapshot_count,
        "params": {
            "mu": cfg.params.mu, "alpha": cfg.params.alpha, "beta": cfg.params.beta,
            "r": cfg.params.r, "q": cfg.params.q,
        },
        "forcing": {
            "kind": cfg.forcing.kind, "amplitude": cfg.forcing.amplitude,
            "omega": cfg.forcing.omega,
            "modes": [
                {"k": list(k), "re": [c.real for c in comps], "im": [c.imag for c in comps]}
                for k, comps in cfg.forcing.modes
            ],
        },
        "ic": {
            "kind": cfg.ic.kind, "amplitude": cfg.ic.amplitude, "seed": cfg.ic.seed,
            "decay": cfg.ic.decay, "path": cfg.ic.path,
            "modes": [
                {"k": list(k), "re": [c.real for c in comps], "im": [c.imag for c in comps]}
                for k, comps in cfg.ic.modes
            ],
        },
    }


def config_hash(cfg: SimConfig) -> str:
    canon = json.dumps(config_to_dict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:12]


def write_manifest(run_dir: Path, cfg: SimConfig, command: str, tool_version: str,
                   wall_clock_s: float, outputs: list[str]) -> None:
    manifest = {
        "config_hash": config_hash(cfg),
        "command": command,
        "config": config_to_dict(cfg),
        "tool_version": tool_version,
        "wall_clock_s": wall_clock_s,
        "outputs": sorted(outputs),
    }
    (run_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
