"""Parameter sweeps over the contour, named figure presets and result files."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from .evolution import ContourSpec, TrotterConfig
from .experiment import derive_seed, nearest_branch, run_experiment
from .theory import adiabaticity_epsilon, berry_phase_closed

log = logging.getLogger(__name__)

PI = math.pi
CSV_COLUMNS = ("sweep_value", "xi_plus", "xi_minus", "gamma_avg", "gamma_theory",
               "epsilon", "leakage", "stat_sigma", "seed")
VARIABLES = ("phi0", "theta0", "T")
FORMATS = ("csv", "json", "gnuplot")
_ESTIMATOR_NAMES = {"exact_arg": "exact_arg", "two_run": "two_run_tan"}


@dataclass(frozen=True)
class SweepConfig:
    vary: str
    grid: Tuple[float, ...]
    theta0: float = PI / 2
    phi0: float = PI
    T: float = 48 * PI
    segment_fractions: Tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)
    dt: float = 0.01 * PI
    order: int = 2
    field_sampling: Optional[str] = None
    mu_b: float = 1.0
    backend: str = "exact"
    shots: int = 1000
    seed: Optional[int] = None
    estimator: str = "exact_arg"
    output: Optional[str] = None
    format: str = "csv"

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(float(v) for v in self.grid))
        object.__setattr__(self, "segment_fractions",
                           tuple(float(f) for f in self.segment_fractions))
        if self.vary not in VARIABLES:
            raise ValueError(f"vary must be one of {VARIABLES}")
        if not self.grid:
            raise ValueError("empty sweep grid")
        steps = [b - a for a, b in zip(self.grid, self.grid[1:])]
        if not (all(s > 0 for s in steps) or all(s < 0 for s in steps)):
            raise ValueError("sweep grid must be strictly monotone")
        if len(self.segment_fractions) != 3 or min(self.segment_fractions) < 0 \
                or abs(sum(self.segment_fractions) - 1) > 1e-9:
            raise ValueError("segment_fractions must be three non-negative numbers summing to 1")
        if self.backend not in ("exact", "shots"):
            raise ValueError("backend must be 'exact' or 'shots'")
        if self.estimator not in _ESTIMATOR_NAMES:
            raise ValueError(f"estimator must be one of {tuple(_ESTIMATOR_NAMES)}")
        if self.backend == "shots":
            if self.estimator == "exact_arg":
                raise ValueError("the shots backend needs a count-based estimator (two_run)")
            if self.seed is None:
                raise ValueError("the shots backend needs a seed")
            if self.shots < 1:
                raise ValueError("shots must be >= 1")
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}")
        # validates dt/order/sampling
        self.trotter()
        for v in self.grid:
            self.contour(v)

    def trotter(self) -> TrotterConfig:
        return TrotterConfig(self.dt, self.order, self.field_sampling)

    def contour(self, value: float, polarity: int = 1) -> ContourSpec:
        params = {"theta0": self.theta0, "phi0": self.phi0, "T": self.T}
        params[self.vary] = value
        t1, t2, t3 = (f * params["T"] for f in self.segment_fractions)
        return ContourSpec(params["theta0"], params["phi0"], t1, t2, t3, polarity, self.mu_b)

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ResultRow:
    sweep_value: float
    xi_plus: float
    xi_minus: float
    gamma_avg: float
    gamma_theory: float
    epsilon: float
    leakage: float
    stat_sigma: Optional[float] = None
    seed: Optional[int] = None
    error: Optional[str] = field(default=None, compare=True)


def _grid(start: float, stop: float, n: int = 16) -> Tuple[float, ...]:
    # n evenly spaced points in (start, stop]
    return tuple(start + (stop - start) * k / n for k in range(1, n + 1))


def _fig6(T):
    return SweepConfig(vary="phi0", grid=_grid(0, 2 * PI), theta0=PI / 2, T=T, dt=0.01 * PI)


def _fig8():
    grid = tuple(PI + 0.005 if math.isclose(v, PI) else v for v in _grid(0, 2 * PI))
    return SweepConfig(vary="phi0", grid=grid, theta0=PI / 2, T=8 * PI,
                       segment_fractions=(0.25, 0.5, 0.25), dt=0.1 * PI,
                       backend="shots", shots=1000, seed=20251015, estimator="two_run")


PRESETS = {
    "fig6a": _fig6(48 * PI), "fig6b": _fig6(48 * PI),
    "fig6c": _fig6(12 * PI), "fig6d": _fig6(12 * PI),
    "fig6e": _fig6(6 * PI), "fig6f": _fig6(6 * PI),
    "fig7": SweepConfig(vary="theta0", grid=_grid(0, PI), phi0=PI / 2, T=48 * PI, dt=0.01 * PI),
    "fig8": _fig8(),
}
PRESETS.update({"fig6ab": PRESETS["fig6a"], "fig6cd": PRESETS["fig6c"],
                "fig6ef": PRESETS["fig6e"]})


def preset(name: str, **overrides) -> SweepConfig:
    try:
        base = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return replace(base, **overrides) if overrides else base


def _unwrap_along(raw: Sequence[float], theory: Sequence[float]) -> List[float]:
    """Continuity unwrapping, anchored at the grid end with the smaller |gamma|."""
    n = len(raw)
    order = list(range(n))
    if abs(theory[-1]) < abs(theory[0]):
        order.reverse()
    out = [math.nan] * n
    prev = None
    for i in order:
        if math.isnan(raw[i]):
            continue
        target = theory[i] if prev is None else prev
        out[i], _ = nearest_branch(raw[i], target)
        prev = out[i]
    return out


def run_sweep(cfg: SweepConfig) -> List[ResultRow]:
    """Run both polarities at every grid point and average the phases.

    Rows come back in grid order.  A failing grid point yields a row of
    NaNs carrying the error message instead of aborting the sweep.
    """
    trotter = cfg.trotter()
    estimator = _ESTIMATOR_NAMES[cfg.estimator]
    shots = cfg.shots if cfg.backend == "shots" else None
    raw = {1: [], -1: []}
    extras = []
    for i, value in enumerate(cfg.grid):
        contour = cfg.contour(value)
        gamma = berry_phase_closed(contour.theta0, contour.phi0)
        try:
            results = {}
            for p in (1, -1):
                seed = None if shots is None else derive_seed(cfg.seed, i, 1 if p == 1 else 2)
                results[p] = run_experiment(cfg.contour(value, p), trotter, estimator=estimator,
                                            shots=shots, seed=seed)
            for p in (1, -1):
                raw[p].append(results[p].xi)
            sigma = None
            if shots is not None:
                sigma = 0.5 * math.hypot(results[1].stat_sigma, results[-1].stat_sigma)
            leak = max(results[1].leakage, results[-1].leakage)
            extras.append((gamma, adiabaticity_epsilon(contour), leak, sigma, None))
        except (ValueError, ArithmeticError) as exc:
            log.warning("grid point %s=%r failed: %s", cfg.vary, value, exc)
            raw[1].append(math.nan)
            raw[-1].append(math.nan)
            extras.append((gamma, adiabaticity_epsilon(contour), math.nan, None, str(exc)))
    theory = [e[0] for e in extras]
    plus = _unwrap_along(raw[1], theory)
    minus = _unwrap_along(raw[-1], theory)
    rows = []
    for i, value in enumerate(cfg.grid):
        gamma, eps, leak, sigma, err = extras[i]
        rows.append(ResultRow(value, plus[i], minus[i], 0.5 * (plus[i] + minus[i]), gamma,
                              eps, leak, sigma, cfg.seed if shots is not None else None, err))
    return rows


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, int):
        return str(v)
    return format(v, ".12g")


def to_csv(rows: Sequence[ResultRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def to_json(rows: Sequence[ResultRow], cfg: Optional[SweepConfig] = None) -> str:
    doc = {"rows": [asdict(r) for r in rows]}
    if cfg is not None:
        doc["config"] = cfg.to_dict()
    return json.dumps(doc, indent=2) + "\n"


def rows_from_json(text: str) -> List[ResultRow]:
    return [ResultRow(**r) for r in json.loads(text)["rows"]]


def to_gnuplot(rows: Sequence[ResultRow], data_name: str, xlabel: str = "sweep value"):
    """Whitespace data block and a matching gnuplot script."""
    lines = ["# " + " ".join(CSV_COLUMNS)]
    for r in rows:
        lines.append(" ".join(_fmt(getattr(r, c)) or "NaN" for c in CSV_COLUMNS))
    data = "\n".join(lines) + "\n"
    script = "\n".join([
        "set key left bottom",
        f"set xlabel '{xlabel}'",
        "set ylabel 'phase (rad)'",
        f"plot '{data_name}' using 1:2 with points title 'xi+', \\",
        f"     '{data_name}' using 1:3 with points title 'xi-', \\",
        f"     '{data_name}' using 1:4 with linespoints title 'average', \\",
        f"     '{data_name}' using 1:5 with lines dashtype 2 title 'gamma(C)'",
        "",
    ])
    return data, script


def emit(rows: Sequence[ResultRow], fmt: str, path, cfg: Optional[SweepConfig] = None) -> List[Path]:
    """Write rows to ``path``; gnuplot also writes ``path`` with a ``.gp`` suffix.

    Returns the paths written.
    """
    if not rows:
        raise ValueError("empty sweep")
    path = Path(path)
    if fmt == "csv":
        outputs = {path: to_csv(rows)}
    elif fmt == "json":
        outputs = {path: to_json(rows, cfg)}
    elif fmt == "gnuplot":
        xlabel = cfg.vary if cfg is not None else "sweep value"
        data, script = to_gnuplot(rows, path.name, xlabel)
        outputs = {path: data, path.with_suffix(".gp"): script}
    else:
        raise ValueError(f"unknown format {fmt!r}")
    for p, text in outputs.items():
        with open(p, "w", newline="\n") as fh:
            fh.write(text)
    return list(outputs)
