"""Run configurations, tabular datasets and the figure generators."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .errors import ConfigError
from .gain import absorption_at_gain_point, gain_closed, gain_numeric, gain_point
from .params import DEFAULT_Q, PhysicalParams, ReducedParams, reduce
from .response import dip_location, epsilon_T, epsilon_T_linearized, ideal_beta
from .transparency import (half_max_roots, ideal_dip_conditions, slope_max_and_product,
                           width_closed, width_numeric)

MODES = ("spectrum", "conditions", "width", "gain", "verify", "figure", "sweep")
FIGURES = (2, 3, 4, 5, 6, 7)
FORMATS = ("csv", "json")


@dataclass(frozen=True)
class GridSpec:
    min: float
    max: float
    count: int
    log: bool = False

    def __post_init__(self):
        if self.count < 2:
            raise ConfigError("grid.count must be >= 2")
        if not (math.isfinite(self.min) and math.isfinite(self.max)) or self.max <= self.min:
            raise ConfigError("grid needs finite min < max")
        if self.log and self.min <= 0:
            raise ConfigError("log grid needs min > 0")

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        parts = text.split(":")
        if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] not in ("log", "lin")):
            raise ConfigError(f"grid must look like min:max:count[:log], got {text!r}")
        try:
            return cls(float(parts[0]), float(parts[1]), int(parts[2]),
                       len(parts) == 4 and parts[3] == "log")
        except ValueError as exc:
            raise ConfigError(f"grid: {exc}") from None

    def values(self) -> np.ndarray:
        if self.log:
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one CLI run.

    ``reduced`` takes ``kappa``, ``omega_m`` and either ``gamma`` or ``Q``;
    ``physical`` takes the :class:`PhysicalParams` fields.  Exactly one of
    them may be set (neither means the defaults ``kappa = omega_m = 1``,
    ``Q = 1e4``).  ``beta`` is a number, ``"beta_o"`` or ``"beta_g"``; when
    omitted it is the drive implied by ``physical``, else ``beta_o``.
    """

    mode: str = "spectrum"
    reduced: dict | None = None
    physical: dict | None = None
    grid: GridSpec | None = None
    beta: float | str | None = None
    figure: int | None = None
    linearized: bool = False
    sweep: str = "kappa_ratio"
    suite: str = "closed-forms"
    format: str = "csv"
    out: str | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.reduced is not None and self.physical is not None:
            raise ConfigError("give either reduced or physical parameters, not both")
        if self.mode == "figure" and self.figure not in FIGURES:
            raise ConfigError("figure must be one of 2..7")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        if isinstance(self.beta, str) and self.beta not in ("beta_o", "beta_g"):
            raise ConfigError("beta must be a number, 'beta_o' or 'beta_g'")
        if isinstance(self.beta, (int, float)) and not (math.isfinite(self.beta) and self.beta >= 0):
            raise ConfigError("beta must be finite and >= 0")
        if self.sweep not in ("kappa_ratio", "Q"):
            raise ConfigError("sweep must be 'kappa_ratio' or 'Q'")
        if self.suite not in ("closed-forms", "oracle", "all"):
            raise ConfigError("suite must be closed-forms, oracle or all")

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        if "config" in d.get("meta", {}):   # a dataset written by this tool
            d = dict(d["meta"]["config"])
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        g = d.get("grid")
        if isinstance(g, str):
            d["grid"] = GridSpec.parse(g)
        elif isinstance(g, dict):
            try:
                d["grid"] = GridSpec(**g)
            except TypeError as exc:
                raise ConfigError(f"grid: {exc}") from None
        return cls(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("out")
        return d

    def reduced_params(self) -> ReducedParams:
        """Reduced parameters; ``beta`` is only set for a physical source."""
        if self.physical is not None:
            try:
                return reduce(PhysicalParams(**self.physical))
            except TypeError as exc:
                raise ConfigError(f"physical: {exc}") from None
        r = dict(self.reduced or {})
        unknown = set(r) - {"kappa", "gamma", "omega_m", "Q"}
        if unknown:
            raise ConfigError(f"unknown reduced fields: {sorted(unknown)}")
        omega_m = float(r.get("omega_m", 1.0))
        kappa = float(r.get("kappa", omega_m))
        if "gamma" in r and "Q" in r:
            raise ConfigError("give gamma or Q, not both")
        gamma = float(r["gamma"]) if "gamma" in r else omega_m / float(r.get("Q", DEFAULT_Q))
        try:
            return ReducedParams(kappa, gamma, omega_m)
        except ValueError as exc:
            raise ConfigError(f"reduced: {exc}") from None

    def resolve_beta(self, p: ReducedParams) -> float:
        if self.beta is None:
            return p.beta if self.physical is not None else ideal_beta(p)
        if self.beta == "beta_o":
            return ideal_beta(p)
        if self.beta == "beta_g":
            return gain_closed(p)[0]
        return float(self.beta)


@dataclass
class FigureDataset:
    columns: list[str]
    rows: np.ndarray
    figure: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=float)
        if self.rows.ndim != 2 or self.rows.shape[1] != len(self.columns):
            raise ValueError("rows must be 2-D with one column per name")

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.columns.index(name)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([format(float(v), ".17g") for v in row])
        return buf.getvalue()

    def to_dict(self) -> dict:
        meta = dict(self.meta)
        meta["figure"] = self.figure
        return {"meta": meta, "columns": list(self.columns),
                "rows": [[float(v) for v in row] for row in self.rows]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True, allow_nan=False) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "FigureDataset":
        meta = dict(d["meta"])
        figure = meta.pop("figure", None)
        rows = np.asarray(d["rows"], dtype=float).reshape(-1, len(d["columns"]))
        return cls(list(d["columns"]), rows, figure, meta)

    @classmethod
    def from_json(cls, text: str) -> "FigureDataset":
        return cls.from_dict(json.loads(text))

    def dump(self, fmt: str = "csv") -> str:
        return self.to_csv() if fmt == "csv" else self.to_json()

    def __eq__(self, other):
        return (isinstance(other, FigureDataset) and self.columns == other.columns
                and self.figure == other.figure and self.meta == other.meta
                and self.rows.shape == other.rows.shape and np.array_equal(self.rows, other.rows))


def _meta(p: ReducedParams, config: RunConfig | None, **extra) -> dict:
    m = {"parameters": {"kappa": p.kappa, "gamma": p.gamma, "omega_m": p.omega_m},
         "tool_version": __version__}
    if config is not None:
        m["config"] = config.to_dict()
        if m["config"]["grid"] is not None:
            m["config"]["grid"] = asdict(config.grid)
    m.update(extra)
    return m


def run_spectrum(config: RunConfig) -> FigureDataset:
    """Response on a grid of ``x/gamma`` (default: +-10 widths around the dip)."""
    p = config.reduced_params()
    beta = config.resolve_beta(p)
    p = p.with_beta(beta)
    grid = config.grid
    if grid is None:
        span = 10 * max(width_closed(p).approx, p.gamma) / p.gamma
        grid = GridSpec(dip_location(p) / p.gamma - span, dip_location(p) / p.gamma + span, 2001)
    s = grid.values()
    x = s * p.gamma
    e = epsilon_T(x, p)
    cols = ["x_over_gamma", "x", "re_epsT", "im_epsT"]
    data = [s, x, e.real, e.imag]
    variants = ["near-resonance"]
    if config.linearized:
        el = epsilon_T_linearized(x, p)
        cols += ["re_epsT_linearized", "im_epsT_linearized"]
        data += [el.real, el.imag]
        variants.append("linearized")
    meta = _meta(p, config, beta=beta, formula_variants=variants)
    return FigureDataset(cols, np.column_stack(data), None, meta)


def _one_row(names_values: dict, p, config, **extra) -> FigureDataset:
    cols = list(names_values)
    row = np.array([[float(v) for v in names_values.values()]])
    return FigureDataset(cols, row, None, _meta(p, config, **extra))


def run_conditions(config: RunConfig) -> FigureDataset:
    p = config.reduced_params()
    dc = ideal_dip_conditions(p)
    kmax, product = slope_max_and_product(p)
    return _one_row({"x_o": dc.xO, "x_o_over_gamma": dc.xO / p.gamma, "beta_o": dc.betaO,
                     "K_max": kmax, "K_max_times_width": product}, p, config)


def run_width(config: RunConfig) -> FigureDataset:
    p = config.reduced_params()
    wr = width_closed(p, numeric=True)
    y1, y2 = half_max_roots(p)
    g = p.gamma
    return _one_row({"exact_over_gamma": wr.exact / g, "approx_over_gamma": wr.approx / g,
                     "resolved_over_gamma": wr.resolvedLimit / g,
                     "numeric_over_gamma": wr.numeric / g,
                     "y1_over_gamma": y1 / g, "y2_over_gamma": y2 / g,
                     "valid_approx": wr.validityApprox, "valid_resolved": wr.validityResolved},
                    p, config)


def run_gain(config: RunConfig) -> FigureDataset:
    p = config.reduced_params()
    beta_g, g_max, valid = gain_closed(p)
    nb, nx, ng = gain_numeric(p)
    return _one_row({"x_g": gain_point(beta_g, p), "beta_g": beta_g, "G_max": g_max,
                     "numeric_beta": nb, "numeric_x": nx, "numeric_G": ng, "valid": valid},
                    p, config)


def run_sweep(config: RunConfig) -> FigureDataset:
    """Closed-form characteristics across ``kappa/omega_m`` or ``Q``."""
    base = config.reduced_params()
    grid = config.grid or (GridSpec(0.1, 10.0, 41, True) if config.sweep == "kappa_ratio"
                           else GridSpec(1e2, 1e6, 41, True))
    rows = []
    for v in grid.values():
        if config.sweep == "kappa_ratio":
            p = ReducedParams(v * base.omega_m, base.gamma, base.omega_m)
        else:
            p = ReducedParams(base.kappa, base.omega_m / v, base.omega_m)
        wr = width_closed(p)
        kmax, product = slope_max_and_product(p)
        beta_g, g_max, valid = gain_closed(p)
        rows.append([v, p.kappa / p.omega_m, p.Q, dip_location(p) / p.gamma, ideal_beta(p),
                     wr.exact / p.gamma, wr.approx / p.gamma, wr.resolvedLimit / p.gamma,
                     kmax * p.gamma, product, beta_g, g_max, float(valid)])
    cols = [config.sweep, "kappa_over_omega_m", "Q", "x_o_over_gamma", "beta_o",
            "width_exact_over_gamma", "width_approx_over_gamma", "width_resolved_over_gamma",
            "K_max_times_gamma", "K_max_times_width", "beta_g", "G_max", "gain_valid"]
    return FigureDataset(cols, np.array(rows), None, _meta(base, config))


# Figure parameter sets: Q = 1e4 and omega_m = 1 throughout.
_FIG_GRIDS = {
    2: GridSpec(-300.0, 300.0, 2401),
    3: GridSpec(-300.0, 300.0, 2401),
    4: GridSpec(-6.0, 6.0, 2001),
    5: GridSpec(-6.0, 6.0, 2001),
    6: GridSpec(1.0, 1.0e5, 2001, True),     # beta / beta_o
    7: GridSpec(-1000.0, 600.0, 3201),
}
_FIG_KAPPAS = {2: (0.2,), 3: (0.2,), 4: (2.0, 5.0), 5: (2.0, 5.0), 6: (4.0,), 7: (1.0, 2.0, 4.0)}


def _tag(k: float) -> str:
    return f"k{k:g}".replace(".", "p")


def run_figure(fig: int, grid: GridSpec | None = None, config: RunConfig | None = None) -> FigureDataset:
    """Data behind one of the spectra / gain figures (ids 2 to 7).

    2-5 show the response at ``beta_o`` (2/3: ``omega_m = 5 kappa``; 4/5:
    ``kappa = 2, 5 omega_m``), 6 the absorption at ``x_g`` against
    ``beta/kappa**2`` for ``kappa = 4 omega_m`` and 7 the response at
    ``beta_g`` for ``kappa = 1, 2, 4 omega_m``.  Each dataset carries both
    real and imaginary parts.
    """
    if fig not in FIGURES:
        raise ConfigError("figure must be one of 2..7")
    grid = grid or _FIG_GRIDS[fig]
    kappas = _FIG_KAPPAS[fig]
    params = [ReducedParams.from_ratio(k, Q=DEFAULT_Q) for k in kappas]
    s = grid.values()
    meta_curves = []
    if fig == 6:
        p = params[0]
        b = s * ideal_beta(p)
        re = absorption_at_gain_point(b, p)
        xg = gain_point(b, p)
        im = np.array([np.imag(epsilon_T(x, p.with_beta(bb))) for x, bb in zip(xg, b)])
        cols = ["beta_over_kappa2", "beta", "x_g", "re_epsT", "im_epsT"]
        data = [b / p.kappa ** 2, b, xg, re, im]
        meta_curves.append({"kappa": p.kappa, "x": "x_g(beta)", "beta_o": ideal_beta(p)})
    else:
        g = params[0].gamma
        x = s * g
        cols, data = ["x_over_gamma", "x"], [s, x]
        for k, p in zip(kappas, params):
            beta = gain_closed(p)[0] if fig == 7 else ideal_beta(p)
            e = epsilon_T(x, p.with_beta(beta))
            cols += [f"re_epsT_{_tag(k)}", f"im_epsT_{_tag(k)}"]
            data += [e.real, e.imag]
            meta_curves.append({"kappa": p.kappa, "beta": beta,
                                "beta_rule": "beta_g" if fig == 7 else "beta_o"})
    meta = _meta(params[0], config, curves=meta_curves, Q=DEFAULT_Q,
                 formula_variants=["near-resonance"], grid=asdict(grid))
    return FigureDataset(cols, np.column_stack(data), fig, meta)
