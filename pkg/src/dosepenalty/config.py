"""Experiment configuration: INI file <-> ExperimentConfig <-> solver objects.

Every key has a default; an empty file gives the reference experiment on
[-1, 1] x (0, 1) with c = 0.01 and 256 x 256 grid points. Interval lists are
written as ``a b; c d``. Values of y0 and z are either one constant or a
comma-separated list with one value per spatial node.
"""

from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np

from .grid import ConfigurationError, build_grid, make_region, regions_overlap
from .heat import HeatModel
from .homotopy import HomotopySchedule
from .penalty import PenaltyConfig
from .ssn import DoseProblem, SsnSettings

Intervals = tuple[tuple[float, float], ...]

# section of each key in the file
SECTIONS = {
    "domain": ("x_left", "x_right", "T", "c", "nx", "nt", "y0", "control_pairing"),
    "regions": ("target", "target_exclude", "risk", "control"),
    "levels": ("U", "L", "u_min", "u_max"),
    "penalty": ("alpha", "beta1_tilde", "beta2_tilde", "beta_scaling", "z", "constraint_sum"),
    "schedule": ("reduction", "gamma_min_factor", "box_gamma_min_factor", "beta_sweep"),
    "solver": ("max_ssn", "residual_tol", "krylov_max", "krylov_tol", "ls_max_backtracks",
               "ls_factor", "max_stalled_steps"),
    "output": ("out_dir", "dvh_levels"),
}


@dataclass(frozen=True)
class ExperimentConfig:
    # domain
    x_left: float = -1.0
    x_right: float = 1.0
    T: float = 1.0
    c: float = 0.01
    nx: int = 256
    nt: int = 256
    y0: tuple[float, ...] = (0.0,)
    control_pairing: str = "nodal"
    # regions; the target is [-0.45, 0.45] with [-0.2, 0.2] removed
    target: Intervals = ((-0.45, 0.45),)
    target_exclude: Intervals = ((-0.2, 0.2),)
    risk: Intervals = ((-0.7, -0.55), (-0.2, 0.2), (0.55, 0.7))
    control: Intervals = ((-1.0, 1.0),)
    # levels and bounds
    U: float = 0.5
    L: float = 0.2
    u_min: float = 0.0
    u_max: float = 2.0
    # objective
    alpha: float = 0.0
    beta1_tilde: float = 1e5
    beta2_tilde: float = 1e5
    beta_scaling: str = "normalized"
    z: tuple[float, ...] = (0.0,)
    constraint_sum: str = "nodal"
    # continuation
    reduction: float = 0.5
    gamma_min_factor: float = 1e-10
    box_gamma_min_factor: float = 1e-7
    beta_sweep: tuple[float, ...] = (1e7, 1e8, 1e9, 1e10)
    # SSN / GMRES
    max_ssn: int = 100
    residual_tol: float = 1e-6
    krylov_max: int = 3000
    krylov_tol: float = 1e-10
    ls_max_backtracks: int = 30
    ls_factor: float = 0.5
    max_stalled_steps: int = 2
    # output
    out_dir: str = "results"
    dvh_levels: int = 200

    def __post_init__(self):
        if self.beta_scaling not in ("normalized", "raw"):
            raise ConfigurationError(f"[penalty] beta_scaling must be 'normalized' or 'raw', got {self.beta_scaling!r}")
        if self.dvh_levels < 2:
            raise ConfigurationError("[output] dvh_levels must be at least 2")
        for name in ("y0", "z"):
            n = len(getattr(self, name))
            if n not in (1, self.nx):
                raise ConfigurationError(f"{name} must be one constant or {self.nx} nodal values, got {n}")

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


# ---------------------------------------------------------------- text <-> values


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        if v and isinstance(v[0], tuple):
            return "; ".join(f"{a!r} {b!r}" for a, b in v)
        return ", ".join(repr(float(x)) for x in v)
    return str(v)


def _parse_intervals(text: str, key: str) -> Intervals:
    out = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        nums = part.replace(",", " ").split()
        if len(nums) != 2:
            raise ConfigurationError(f"[regions] {key}: interval {part!r} needs two endpoints")
        out.append((float(nums[0]), float(nums[1])))
    return tuple(out)


def _parse_values(text: str) -> tuple[float, ...]:
    vals = tuple(float(s) for s in text.replace(";", ",").split(",") if s.strip())
    if not vals:
        raise ValueError("empty list")
    return vals


def _parse(name: str, text: str, section: str):
    default = getattr(ExperimentConfig, name)
    try:
        if name in SECTIONS["regions"]:
            return _parse_intervals(text, name)
        if isinstance(default, tuple):
            return _parse_values(text)
        if isinstance(default, bool):
            return text.strip().lower() in ("1", "true", "yes", "on")
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
        return text.strip()
    except ValueError as exc:
        raise ConfigurationError(f"[{section}] {name}: cannot parse {text!r} ({exc})") from None


def to_sections(cfg: ExperimentConfig) -> dict[str, dict[str, str]]:
    values = asdict(cfg)
    return {sec: {k: _fmt(values[k]) for k in keys} for sec, keys in SECTIONS.items()}


def parse_sections(sections: dict[str, dict[str, str]]) -> ExperimentConfig:
    kw = {}
    for sec, items in sections.items():
        if sec not in SECTIONS:
            raise ConfigurationError(f"unknown section [{sec}]")
        for key, text in items.items():
            if key not in SECTIONS[sec]:
                raise ConfigurationError(f"unknown key {key!r} in section [{sec}]")
            kw[key] = _parse(key, text, sec)
    cfg = ExperimentConfig(**kw)
    validate(cfg)
    return cfg


def load_config(path=None) -> ExperimentConfig:
    """Read an INI file; omitted keys take the reference values. ``None`` gives the defaults."""
    if path is None:
        return validate(ExperimentConfig())
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"config file {path} does not exist")
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read(path)
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config file {path}: {exc}") from None
    return parse_sections({s: dict(cp[s]) for s in cp.sections()})


def write_config(path, cfg: ExperimentConfig) -> Path:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    cp.read_dict(to_sections(cfg))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        cp.write(fh)
    return path


# ---------------------------------------------------------------- solver objects


@dataclass(frozen=True, eq=False)
class Experiment:
    problem: DoseProblem
    penalty: PenaltyConfig
    settings: SsnSettings


def _nodal(values: tuple[float, ...], nx: int) -> np.ndarray:
    return np.full(nx, values[0]) if len(values) == 1 else np.asarray(values, dtype=float)


def build_experiment(cfg: ExperimentConfig) -> Experiment:
    g = build_grid(cfg.x_left, cfg.x_right, cfg.nx, cfg.T, cfg.nt)
    target = make_region(g, cfg.target, cfg.target_exclude)
    risk = make_region(g, cfg.risk)
    control = make_region(g, cfg.control)
    if regions_overlap(target, risk):
        raise ConfigurationError("[regions] target and risk regions overlap")
    for name, r in (("target", target), ("risk", risk)):
        if not r.measure > 0 or r.size == 0:
            raise ConfigurationError(f"[regions] {name} region is empty")
    model = HeatModel(g, cfg.c, _nodal(cfg.y0, cfg.nx), control, cfg.control_pairing)
    z = None
    if cfg.alpha > 0:
        z = np.broadcast_to(_nodal(cfg.z, cfg.nx), g.shape).copy()
    if cfg.beta_scaling == "normalized":
        beta1, beta2 = cfg.beta1_tilde / target.measure, cfg.beta2_tilde / risk.measure
    else:
        beta1, beta2 = cfg.beta1_tilde, cfg.beta2_tilde
    pen = PenaltyConfig(alpha=cfg.alpha, beta1=beta1, beta2=beta2, U=cfg.U, L=cfg.L,
                        u_min=cfg.u_min, u_max=cfg.u_max, constraint_sum=cfg.constraint_sum)
    settings = SsnSettings(cfg.max_ssn, cfg.residual_tol, cfg.krylov_max, cfg.krylov_tol,
                           cfg.ls_max_backtracks, cfg.ls_factor, cfg.max_stalled_steps)
    return Experiment(DoseProblem(model, target, risk, z), pen, settings)


def validate(cfg: ExperimentConfig) -> ExperimentConfig:
    """Check every invariant by building the solver objects once (cheap)."""
    build_experiment(cfg)
    HomotopySchedule(1.0, cfg.reduction, cfg.gamma_min_factor)
    HomotopySchedule(1.0, cfg.reduction, cfg.box_gamma_min_factor)
    return cfg


def field_names() -> list[str]:
    return [f.name for f in fields(ExperimentConfig)]
