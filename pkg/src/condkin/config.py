"""Run configuration as a flat ``dotted.key = value`` file."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .diagnostics import MultiscaleConfig, eps_window, rho_upper
from .dispersion import DispersionModel, DomainError
from .grid import ConfigError, GridSpec, InitProfile
from .integrator import StepControl
from .kernels import KernelParams

_FLOAT, _INT, _STR, _FLOATS, _INTS, _BOOL, _OPT_FLOAT = "float", "int", "str", "floats", "ints", "bool", "optfloat"

# dotted key -> (attribute, kind, default)
SCHEMA = {
    "dispersion.p": ("p", _FLOAT, 2.0),
    "dispersion.c": ("c", _FLOAT, 1.0),
    "couplings.c12": ("c12", _FLOAT, 1.0),
    "couplings.c22": ("c22", _FLOAT, 1.0),
    "couplings.c31": ("c31", _FLOAT, 0.5),
    "mu": ("mu", _FLOAT, 0.0),
    "grid.n_cells": ("n_cells", _INT, 96),
    "grid.omega_max": ("omega_max", _FLOAT, 3.0),
    "cutoff_n": ("cutoff_n", _FLOAT, 1.0),
    "ic.kind": ("ic_kind", _STR, "power_exp"),
    "ic.c_ini": ("c_ini", _FLOAT, 0.02),
    "ic.omega_s": ("omega_s", _FLOAT, math.inf),
    "ic.center": ("center", _FLOAT, 0.0),
    "ic.number": ("number", _FLOAT, 1.0),
    "time.t_end": ("t_end", _FLOAT, 10.0),
    "time.dt_init": ("dt_init", _FLOAT, 1e-4),
    "time.dt_max": ("dt_max", _FLOAT, 0.02),
    "time.safety": ("safety", _FLOAT, 0.1),
    "time.snapshot_stride": ("snapshot_stride", _INT, 25),
    "time.fixed_dt": ("fixed_dt", _BOOL, False),
    "diagnostics.alphas": ("alphas", _FLOATS, (0.5, 0.75)),
    "diagnostics.ladder_m_list": ("ladder_m_list", _INTS, (2, 3, 4, 5)),
    "diagnostics.multiscale.m_list": ("ms_m_list", _INTS, (2, 3, 4)),
    "diagnostics.multiscale.rho": ("ms_rho", _OPT_FLOAT, None),
    "diagnostics.multiscale.eps": ("ms_eps", _OPT_FLOAT, None),
    "diagnostics.multiscale.c_star": ("ms_c_star", _OPT_FLOAT, None),
    "output.dir": ("output_dir", _STR, "condkin_out"),
    "threads": ("threads", _INT, 0),
}


def _parse_value(key, kind, text):
    text = text.strip()
    try:
        if kind == _FLOAT:
            return float(text)
        if kind == _OPT_FLOAT:
            return None if text.lower() in ("auto", "none", "") else float(text)
        if kind == _INT:
            return int(text)
        if kind == _BOOL:
            low = text.lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(text)
            return low in ("true", "1", "yes")
        if kind == _FLOATS:
            return tuple(float(v) for v in text.split(",") if v.strip())
        if kind == _INTS:
            return tuple(int(v) for v in text.split(",") if v.strip())
        return text
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {text!r} as {kind}") from None


def _format_value(kind, v):
    if kind in (_FLOAT, _OPT_FLOAT):
        return "auto" if v is None else repr(float(v))
    if kind in (_FLOATS, _INTS):
        return ", ".join(repr(x) for x in v)
    if kind == _BOOL:
        return "true" if v else "false"
    return str(v)


@dataclass
class RunConfig:
    p: float = 2.0
    c: float = 1.0
    c12: float = 1.0
    c22: float = 1.0
    c31: float = 0.5
    mu: float = 0.0
    n_cells: int = 96
    omega_max: float = 3.0
    cutoff_n: float = 1.0
    ic_kind: str = "power_exp"
    c_ini: float = 0.02
    omega_s: float = math.inf
    center: float = 0.0
    number: float = 1.0
    t_end: float = 10.0
    dt_init: float = 1e-4
    dt_max: float = 0.02
    safety: float = 0.1
    snapshot_stride: int = 25
    fixed_dt: bool = False
    alphas: tuple = (0.5, 0.75)
    ladder_m_list: tuple = (2, 3, 4, 5)
    ms_m_list: tuple = (2, 3, 4)
    ms_rho: float | None = None
    ms_eps: float | None = None
    ms_c_star: float | None = None
    output_dir: str = "condkin_out"
    threads: int = 0

    # -- io ----------------------------------------------------------------
    @classmethod
    def parse(cls, text: str) -> "RunConfig":
        vals = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep:
                raise ConfigError(f"line {lineno}: expected 'key = value'")
            if key not in SCHEMA:
                raise ConfigError(f"{key}: unknown configuration key (line {lineno})")
            attr, kind, _ = SCHEMA[key]
            vals[attr] = _parse_value(key, kind, value)
        return cls(**vals)

    @classmethod
    def load(cls, path: str) -> "RunConfig":
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        return cls.parse(text)

    def dumps(self) -> str:
        return "".join(f"{key} = {_format_value(kind, getattr(self, attr))}\n"
                       for key, (attr, kind, _) in SCHEMA.items())

    # -- builders ------------------------------------------------------------
    def model(self) -> DispersionModel:
        try:
            return DispersionModel(self.p, self.c)
        except DomainError as exc:
            raise ConfigError(f"dispersion.p / dispersion.c: {exc}") from None

    def params(self) -> KernelParams:
        return KernelParams(self.c12, self.c22, self.c31, self.mu, self.cutoff_n)

    def grid(self) -> GridSpec:
        if self.n_cells < 8:
            raise ConfigError("grid.n_cells must be >= 8")
        return GridSpec(self.n_cells, self.omega_max)

    def profile(self) -> InitProfile:
        prof = InitProfile(self.ic_kind, self.c_ini, self.omega_s, self.number, self.center)
        prof.validate()
        return prof

    def control(self) -> StepControl:
        try:
            return StepControl(self.dt_init, self.dt_max, self.safety)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def multiscale(self) -> MultiscaleConfig:
        model = self.model()
        rho = self.ms_rho if self.ms_rho is not None else 0.5 * rho_upper(model, self.mu)
        if self.ms_eps is not None:
            eps = self.ms_eps
        else:
            lo, hi = eps_window(model, self.mu, rho)
            eps = 0.5 * (lo + hi)
        cfg = MultiscaleConfig(list(self.ms_m_list), rho, eps, self.ms_c_star)
        cfg.validate(model, self.mu)
        return cfg

    def validate(self) -> "RunConfig":
        spec = self.grid()
        params = self.params()
        params.check_grid(spec)
        self.model()
        self.profile()
        self.control()
        if not self.t_end >= 0:
            raise ConfigError("time.t_end must be >= 0")
        if self.snapshot_stride < 1:
            raise ConfigError("time.snapshot_stride must be >= 1")
        for a in self.alphas:
            if not 0.5 <= a < 1.0:
                raise ConfigError(f"diagnostics.alphas: {a} outside [0.5, 1)")
        if any(m < 1 for m in self.ladder_m_list):
            raise ConfigError("diagnostics.ladder_m_list entries must be >= 1")
        if self.threads < 0:
            raise ConfigError("threads must be >= 0 (0 = default)")
        self.multiscale()
        return self

