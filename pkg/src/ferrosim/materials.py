"""Device stack description, per-cell material masks, permittivity field,
and the plain-text run configuration (flat dotted keys, '#' comments).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .constants import ELECTRON_MASS, ELEMENTARY_CHARGE, EPS0
from .grid import Grid, ScalarField, ZRule, create_grid, exchange_ghosts
from .schedule import SteadyStateRule, SweepSchedule
from .tdgl import PolarizationBC

__all__ = [
    "ConfigError",
    "FerroelectricParams",
    "SemiconductorParams",
    "Layer",
    "DeviceStack",
    "SimConfig",
    "build_stack",
    "parse_config",
    "serialize_config",
    "default_fe_params",
    "default_sc_params",
]

# Standard-silicon band defaults (not from the source data set, see README):
# undoped Si at 300 K with the intrinsic Fermi level as the energy zero.
SILICON_GAP_J = 1.12 * ELEMENTARY_CHARGE


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class FerroelectricParams:
    alpha: float = -2.5e9       # V m / C
    beta: float = 6.0e10        # V m^5 / C^3
    gamma: float = 1.5e11       # V m^9 / C^5
    g11: float = 1.0e-9         # V m^3 / C
    g44: float = 1.0e-9         # V m^3 / C
    eps_fe: float = 24.0        # relative permittivity
    Gamma_kinetic: float = 100.0  # tabulated kinetic coefficient, applied verbatim

    def __post_init__(self):
        if self.alpha >= 0:
            raise ValueError("alpha must be negative for a ferroelectric")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.g11 <= 0 or self.g44 <= 0:
            raise ValueError("gradient coefficients must be positive")
        if self.eps_fe <= 0 or self.Gamma_kinetic <= 0:
            raise ValueError("eps_fe and Gamma_kinetic must be positive")

    def spontaneous_polarization(self) -> float:
        """Positive well location: positive root u of gamma u^2 + beta u + alpha = 0, P = sqrt(u)."""
        disc = self.beta**2 - 4.0 * self.gamma * self.alpha
        u = (-self.beta + math.sqrt(disc)) / (2.0 * self.gamma)
        return math.sqrt(u)


@dataclass(frozen=True)
class SemiconductorParams:
    me_eff: float = 1.08 * ELECTRON_MASS
    mp_eff: float = 0.81 * ELECTRON_MASS
    eps_sc: float = 11.7
    Ec: float = 0.5 * SILICON_GAP_J
    Ev: float = -0.5 * SILICON_GAP_J
    Nc: float | None = None  # None -> derived from me_eff and T
    Nv: float | None = None
    Nd_plus: float = 0.0
    Na_minus: float = 0.0
    T: float = 300.0
    statistics: str = "fermi_dirac"

    def __post_init__(self):
        if self.Ec <= self.Ev:
            raise ValueError("Ec must exceed Ev")
        if self.me_eff <= 0 or self.mp_eff <= 0:
            raise ValueError("effective masses must be positive")
        if self.T <= 0:
            raise ValueError("temperature must be positive")
        if self.Nd_plus < 0 or self.Na_minus < 0:
            raise ValueError("dopant densities must be nonnegative")
        if self.statistics not in ("fermi_dirac", "maxwell_boltzmann"):
            raise ValueError(f"unknown statistics {self.statistics!r}")


@dataclass(frozen=True)
class Layer:
    kind: str  # "ferroelectric" | "dielectric" | "semiconductor"
    thickness: float
    eps_rel: float = 0.0  # dielectric only; FE/SC carry eps in their params

    def __post_init__(self):
        if self.kind not in ("ferroelectric", "dielectric", "semiconductor"):
            raise ValueError(f"unknown layer kind {self.kind!r}")
        if self.thickness <= 0:
            raise ValueError("layer thickness must be positive")
        if self.kind == "dielectric" and self.eps_rel <= 0:
            raise ValueError("dielectric layer needs eps_rel > 0")


@dataclass
class DeviceStack:
    grid: Grid
    layers: tuple[Layer, ...]
    fe_params: FerroelectricParams
    sc_params: SemiconductorParams | None
    fe_mask: np.ndarray
    de_mask: np.ndarray
    sc_mask: np.ndarray
    eps_field: ScalarField          # eps0 * eps_r(r)
    z_ranges: tuple[tuple[str, int, int], ...]  # (kind, k_lo, k_hi) half-open
    fe_k_lo: int
    fe_k_hi: int                    # half-open upper cell bound of the FE layer
    z_int_fe_de: int | None         # z-index of the FE layer's first cell; the
                                    # interface face sits at z = z_int * dz

    @property
    def has_semiconductor(self) -> bool:
        return bool(np.any(self.sc_mask))

    def de_eps_below_fe(self) -> float:
        """Relative permittivity of the dielectric layer adjacent below the FE."""
        for kind, klo, khi in self.z_ranges:
            if kind == "dielectric" and khi == self.fe_k_lo:
                for ly in self.layers:
                    if ly.kind == "dielectric" and self._range_of(ly) == (klo, khi):
                        return ly.eps_rel
        raise ValueError("no dielectric layer adjacent below the ferroelectric")

    def _range_of(self, layer: Layer) -> tuple[int, int]:
        k = 0
        for ly, (kind, klo, khi) in zip(self.layers, self.z_ranges):
            if ly is layer:
                return (klo, khi)
            k = khi
        raise ValueError("layer not in stack")


def build_stack(layers, grid: Grid,
                fe_params: FerroelectricParams | None = None,
                sc_params: SemiconductorParams | None = None) -> DeviceStack:
    """Place layers bottom-to-top along z, build masks and the eps field."""
    layers = tuple(layers)
    fe_params = fe_params or FerroelectricParams()
    total = sum(ly.thickness for ly in layers)
    if not math.isclose(total, grid.Lz, rel_tol=1e-9):
        raise ValueError(f"layer thicknesses sum to {total} but Lz = {grid.Lz}")
    if sum(1 for ly in layers if ly.kind == "ferroelectric") == 0:
        raise ValueError("stack must contain a ferroelectric layer (P undefined otherwise)")
    if sum(1 for ly in layers if ly.kind == "ferroelectric") > 1:
        raise ValueError("multiple ferroelectric layers are not supported")
    if any(ly.kind == "semiconductor" for ly in layers) and sc_params is None:
        sc_params = SemiconductorParams()

    nx, ny, nz = grid.shape
    shape = grid.shape
    fe_mask = np.zeros(shape, dtype=bool)
    de_mask = np.zeros(shape, dtype=bool)
    sc_mask = np.zeros(shape, dtype=bool)
    eps = ScalarField.zeros(grid, ZRule.one_sided())
    z_ranges: list[tuple[str, int, int]] = []

    k = 0
    for idx, ly in enumerate(layers):
        ncells_f = ly.thickness / grid.dz
        ncells = round(ncells_f)
        if not math.isclose(ncells_f, ncells, rel_tol=1e-9, abs_tol=1e-12):
            raise ValueError(
                f"layer {idx} ({ly.kind}, {ly.thickness} m) is not an integer multiple of dz={grid.dz}")
        if k + ncells > nz:
            raise ValueError("layers exceed the grid extent along z")
        sl = (slice(None), slice(None), slice(k, k + ncells))
        if ly.kind == "ferroelectric":
            fe_mask[sl] = True
            eps_rel = fe_params.eps_fe
        elif ly.kind == "dielectric":
            de_mask[sl] = True
            eps_rel = ly.eps_rel
        else:
            sc_mask[sl] = True
            eps_rel = sc_params.eps_sc
        eps.interior[sl] = EPS0 * eps_rel
        z_ranges.append((ly.kind, k, k + ncells))
        k += ncells
    exchange_ghosts(eps)

    fe_rng = next(r for r in z_ranges if r[0] == "ferroelectric")
    fe_k_lo, fe_k_hi = fe_rng[1], fe_rng[2]
    z_int = fe_k_lo if fe_k_lo > 0 else None
    return DeviceStack(grid=grid, layers=layers, fe_params=fe_params, sc_params=sc_params,
                       fe_mask=fe_mask, de_mask=de_mask, sc_mask=sc_mask, eps_field=eps,
                       z_ranges=tuple(z_ranges), fe_k_lo=fe_k_lo, fe_k_hi=fe_k_hi,
                       z_int_fe_de=z_int)


# ---------------------------------------------------------------------------
# run configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SimConfig:
    nx: int
    ny: int
    nz: int
    dx: float
    dy: float
    dz: float
    layers: tuple[Layer, ...]
    fe: FerroelectricParams = field(default_factory=FerroelectricParams)
    sc: SemiconductorParams | None = None
    dt: float = 4.0e-13
    temporal_order: int = 2
    pol_bc: PolarizationBC = field(default_factory=lambda: PolarizationBC("surface_effect", 3.0e-9))
    poisson_tol: float = 1e-10
    max_vcycles: int = 60
    fixedpoint_tol: float = 1e-5
    fixedpoint_max_iters: int = 100
    sweep: SweepSchedule = field(default_factory=SweepSchedule)
    seed: int = 0
    init_kind: str = "random"   # random | uniform_value | gaussian_bump | stripe
    init_amplitude: float = 0.002
    init_value: float = 0.0
    init_sigma1: float = 5.0e-9
    init_sigma2: float = 2.0e-9
    init_z0: float | None = None
    init_stripe_width: float | None = None
    max_tile_cells: int = 1 << 22
    record_every: int = 0
    checkpoint_vapps: tuple[float, ...] = ()

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.temporal_order not in (1, 2):
            raise ValueError("temporal_order must be 1 or 2")
        for name in ("poisson_tol", "fixedpoint_tol"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must lie in (0, 1)")
        if self.init_kind not in ("random", "uniform_value", "gaussian_bump", "stripe"):
            raise ValueError(f"unknown init kind {self.init_kind!r}")

    def make_grid(self) -> Grid:
        return create_grid(self.nx, self.ny, self.nz, self.dx, self.dy, self.dz,
                           self.max_tile_cells)

    def make_stack(self, grid: Grid | None = None) -> DeviceStack:
        return build_stack(self.layers, grid or self.make_grid(), self.fe, self.sc)


# key table: name -> (kind, required, default). Defaults of None mean
# "inherit the dataclass default"; values are parsed per kind.
_KEYS: dict[str, tuple[str, bool]] = {
    "grid.nx": ("int", True), "grid.ny": ("int", True), "grid.nz": ("int", True),
    "grid.dx": ("float", True), "grid.dy": ("float", True), "grid.dz": ("float", True),
    "grid.max_tile_cells": ("int", False),
    "stack.layers": ("str", True),
    "fe.alpha": ("float", False), "fe.beta": ("float", False), "fe.gamma": ("float", False),
    "fe.g11": ("float", False), "fe.g44": ("float", False), "fe.eps": ("float", False),
    "fe.gamma_kinetic": ("float", False),
    "sc.me_eff": ("float", False), "sc.mp_eff": ("float", False), "sc.eps": ("float", False),
    "sc.ec": ("float", False), "sc.ev": ("float", False),
    "sc.nc": ("float", False), "sc.nv": ("float", False),
    "sc.nd_plus": ("float", False), "sc.na_minus": ("float", False),
    "sc.temperature": ("float", False), "sc.statistics": ("str", False),
    "time.dt": ("float", False), "time.order": ("int", False),
    "pol_bc.kind": ("str", False), "pol_bc.lambda": ("float", False),
    "poisson.tol": ("float", False), "poisson.max_vcycles": ("int", False),
    "fixedpoint.tol": ("float", False), "fixedpoint.max_iters": ("int", False),
    "sweep.waveform": ("str", False), "sweep.vmax": ("float", False),
    "sweep.points_per_quarter": ("int", False), "sweep.cycles": ("int", False),
    "sweep.hold_v": ("float", False), "sweep.values": ("floats", False),
    "settle.rel_change_tol": ("float", False), "settle.consecutive_steps": ("int", False),
    "settle.max_steps": ("int", False),
    "init.kind": ("str", False), "init.amplitude": ("float", False),
    "init.value": ("float", False), "init.sigma1": ("float", False),
    "init.sigma2": ("float", False), "init.z0": ("float", False),
    "init.stripe_width": ("float", False),
    "seed": ("int", False),
    "output.record_every": ("int", False),
    "output.checkpoint_vapps": ("floats", False),
}


def _parse_scalar(key: str, kind: str, raw: str):
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "floats":
            return tuple(float(tok) for tok in raw.split(",") if tok.strip())
        return raw
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse {raw!r} as {kind}") from exc


def _parse_layers(raw: str) -> tuple[Layer, ...]:
    """'kind:thickness[:eps]' items, comma-separated, bottom-to-top."""
    out = []
    for item in raw.split(","):
        parts = [p.strip() for p in item.strip().split(":")]
        if len(parts) < 2:
            raise ConfigError(f"stack.layers: malformed item {item!r}")
        kind = {"fe": "ferroelectric", "de": "dielectric", "sc": "semiconductor"}.get(
            parts[0], parts[0])
        try:
            thickness = float(parts[1])
            eps = float(parts[2]) if len(parts) > 2 else 0.0
        except ValueError as exc:
            raise ConfigError(f"stack.layers: bad number in {item!r}") from exc
        try:
            out.append(Layer(kind, thickness, eps))
        except ValueError as exc:
            raise ConfigError(f"stack.layers: {exc}") from exc
    return tuple(out)


def parse_config(text: str) -> SimConfig:
    """Parse the flat key/value document. Unknown keys are rejected."""
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _parse_scalar(key, _KEYS[key][0], raw)

    for key, (kind, required) in _KEYS.items():
        if required and key not in values:
            raise ConfigError(f"missing required key {key!r}")

    layers = _parse_layers(values["stack.layers"])  # type: ignore[arg-type]

    def take(key, default):
        return values.get(key, default)

    try:
        fe = FerroelectricParams(
            alpha=take("fe.alpha", -2.5e9), beta=take("fe.beta", 6.0e10),
            gamma=take("fe.gamma", 1.5e11), g11=take("fe.g11", 1.0e-9),
            g44=take("fe.g44", 1.0e-9), eps_fe=take("fe.eps", 24.0),
            Gamma_kinetic=take("fe.gamma_kinetic", 100.0))
    except ValueError as exc:
        raise ConfigError(f"fe.*: {exc}") from exc

    sc = None
    if any(ly.kind == "semiconductor" for ly in layers) or any(k.startswith("sc.") for k in values):
        try:
            d = SemiconductorParams()
            sc = SemiconductorParams(
                me_eff=take("sc.me_eff", d.me_eff), mp_eff=take("sc.mp_eff", d.mp_eff),
                eps_sc=take("sc.eps", d.eps_sc),
                Ec=take("sc.ec", d.Ec), Ev=take("sc.ev", d.Ev),
                Nc=values.get("sc.nc"), Nv=values.get("sc.nv"),
                Nd_plus=take("sc.nd_plus", 0.0), Na_minus=take("sc.na_minus", 0.0),
                T=take("sc.temperature", 300.0),
                statistics=take("sc.statistics", "fermi_dirac"))
        except ValueError as exc:
            raise ConfigError(f"sc.*: {exc}") from exc

    bc_kind = take("pol_bc.kind", "surface_effect")
    lam = values.get("pol_bc.lambda")
    if bc_kind in ("free", "zero") and lam is not None:
        raise ConfigError(f"pol_bc.lambda: not allowed with pol_bc.kind = {bc_kind}")
    if bc_kind == "surface_effect" and lam is None:
        lam = 3.0e-9
    try:
        pol_bc = PolarizationBC(bc_kind, lam)
    except ValueError as exc:
        raise ConfigError(f"pol_bc.*: {exc}") from exc

    try:
        settle = SteadyStateRule(
            rel_change_tol=take("settle.rel_change_tol", 1e-6),
            consecutive_steps=take("settle.consecutive_steps", 50),
            max_steps=take("settle.max_steps", 200_000))
        sweep = SweepSchedule(
            waveform=take("sweep.waveform", "hold"), vmax=take("sweep.vmax", 0.0),
            n_points_per_quarter=take("sweep.points_per_quarter", 20),
            hold_v=take("sweep.hold_v", 0.0), values=take("sweep.values", ()),
            cycles=take("sweep.cycles", 1), settle=settle)
    except ValueError as exc:
        raise ConfigError(f"sweep/settle: {exc}") from exc

    try:
        return SimConfig(
            nx=values["grid.nx"], ny=values["grid.ny"], nz=values["grid.nz"],
            dx=values["grid.dx"], dy=values["grid.dy"], dz=values["grid.dz"],
            layers=layers, fe=fe, sc=sc,
            dt=take("time.dt", 4.0e-13), temporal_order=take("time.order", 2),
            pol_bc=pol_bc,
            poisson_tol=take("poisson.tol", 1e-10),
            max_vcycles=take("poisson.max_vcycles", 60),
            fixedpoint_tol=take("fixedpoint.tol", 1e-5),
            fixedpoint_max_iters=take("fixedpoint.max_iters", 100),
            sweep=sweep, seed=take("seed", 0),
            init_kind=take("init.kind", "random"),
            init_amplitude=take("init.amplitude", 0.002),
            init_value=take("init.value", 0.0),
            init_sigma1=take("init.sigma1", 5.0e-9),
            init_sigma2=take("init.sigma2", 2.0e-9),
            init_z0=values.get("init.z0"),
            init_stripe_width=values.get("init.stripe_width"),
            max_tile_cells=take("grid.max_tile_cells", 1 << 22),
            record_every=take("output.record_every", 0),
            checkpoint_vapps=take("output.checkpoint_vapps", ()))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def serialize_config(cfg: SimConfig) -> str:
    """Emit a document that parse_config maps back to an equal SimConfig."""
    short = {"ferroelectric": "fe", "dielectric": "de", "semiconductor": "sc"}
    layer_str = ", ".join(
        f"{short[ly.kind]}:{ly.thickness!r}" + (f":{ly.eps_rel!r}" if ly.kind == "dielectric" else "")
        for ly in cfg.layers)
    lines = [
        f"grid.nx = {cfg.nx}", f"grid.ny = {cfg.ny}", f"grid.nz = {cfg.nz}",
        f"grid.dx = {cfg.dx!r}", f"grid.dy = {cfg.dy!r}", f"grid.dz = {cfg.dz!r}",
        f"grid.max_tile_cells = {cfg.max_tile_cells}",
        f"stack.layers = {layer_str}",
        f"fe.alpha = {cfg.fe.alpha!r}", f"fe.beta = {cfg.fe.beta!r}",
        f"fe.gamma = {cfg.fe.gamma!r}", f"fe.g11 = {cfg.fe.g11!r}",
        f"fe.g44 = {cfg.fe.g44!r}", f"fe.eps = {cfg.fe.eps_fe!r}",
        f"fe.gamma_kinetic = {cfg.fe.Gamma_kinetic!r}",
        f"time.dt = {cfg.dt!r}", f"time.order = {cfg.temporal_order}",
        f"pol_bc.kind = {cfg.pol_bc.kind}",
        f"poisson.tol = {cfg.poisson_tol!r}", f"poisson.max_vcycles = {cfg.max_vcycles}",
        f"fixedpoint.tol = {cfg.fixedpoint_tol!r}",
        f"fixedpoint.max_iters = {cfg.fixedpoint_max_iters}",
        f"sweep.waveform = {cfg.sweep.waveform}",
        f"sweep.points_per_quarter = {cfg.sweep.n_points_per_quarter}",
        f"sweep.cycles = {cfg.sweep.cycles}",
        f"settle.rel_change_tol = {cfg.sweep.settle.rel_change_tol!r}",
        f"settle.consecutive_steps = {cfg.sweep.settle.consecutive_steps}",
        f"settle.max_steps = {cfg.sweep.settle.max_steps}",
        f"init.kind = {cfg.init_kind}", f"init.amplitude = {cfg.init_amplitude!r}",
        f"init.value = {cfg.init_value!r}",
        f"init.sigma1 = {cfg.init_sigma1!r}", f"init.sigma2 = {cfg.init_sigma2!r}",
        f"seed = {cfg.seed}",
        f"output.record_every = {cfg.record_every}",
    ]
    if cfg.pol_bc.kind == "surface_effect":
        lines.insert(lines.index(f"pol_bc.kind = {cfg.pol_bc.kind}") + 1,
                     f"pol_bc.lambda = {cfg.pol_bc.lam!r}")
    if cfg.sweep.waveform == "triangular":
        lines.append(f"sweep.vmax = {cfg.sweep.vmax!r}")
    if cfg.sweep.waveform == "hold":
        lines.append(f"sweep.hold_v = {cfg.sweep.hold_v!r}")
    if cfg.sweep.waveform == "list":
        lines.append("sweep.values = " + ", ".join(repr(v) for v in cfg.sweep.values))
    if cfg.sc is not None:
        d = cfg.sc
        lines += [
            f"sc.me_eff = {d.me_eff!r}", f"sc.mp_eff = {d.mp_eff!r}",
            f"sc.eps = {d.eps_sc!r}", f"sc.ec = {d.Ec!r}", f"sc.ev = {d.Ev!r}",
            f"sc.nd_plus = {d.Nd_plus!r}", f"sc.na_minus = {d.Na_minus!r}",
            f"sc.temperature = {d.T!r}", f"sc.statistics = {d.statistics}",
        ]
        if d.Nc is not None:
            lines.append(f"sc.nc = {d.Nc!r}")
        if d.Nv is not None:
            lines.append(f"sc.nv = {d.Nv!r}")
    if cfg.init_z0 is not None:
        lines.append(f"init.z0 = {cfg.init_z0!r}")
    if cfg.init_stripe_width is not None:
        lines.append(f"init.stripe_width = {cfg.init_stripe_width!r}")
    if cfg.checkpoint_vapps:
        lines.append("output.checkpoint_vapps = " + ", ".join(repr(v) for v in cfg.checkpoint_vapps))
    return "\n".join(lines) + "\n"


def default_fe_params() -> FerroelectricParams:
    return FerroelectricParams()


def default_sc_params() -> SemiconductorParams:
    return SemiconductorParams()
