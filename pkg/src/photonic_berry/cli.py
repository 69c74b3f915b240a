"""Command-line front end for parameter sweeps.

Example::

    photonic-berry --preset fig6ab --out fig6ab.csv
    photonic-berry --vary theta0 --grid 0.25pi:pi:8 --phi0 pi/2 --T 48pi --format json --out t.json

Angles and times accept plain numbers or simple expressions in ``pi``
(``pi/2``, ``0.01pi``, ``2*pi``).  A JSON ``--config`` file supplies any
:class:`SweepConfig` fields; flags override it, and ``--preset`` supplies
the base values under both.
"""

from __future__ import annotations

import argparse
import ast
import json
import math
import operator
import re
import sys
from typing import Optional, Sequence

import numpy as np

from .sweep import (FORMATS, PRESETS, ResultRow, SweepConfig, emit, preset, run_sweep,
                    to_csv)

__all__ = ["main", "parse_number", "parse_grid", "SweepConfig", "ResultRow", "run_sweep", "emit"]

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv, ast.USub: operator.neg, ast.UAdd: operator.pos}


def _eval(node):
    if isinstance(node, ast.Expression):
        return _eval(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id == "pi":
        return math.pi
    if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
        return _OPS[type(node.op)](_eval(node.left), _eval(node.right))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
        return _OPS[type(node.op)](_eval(node.operand))
    raise ValueError("unsupported expression")


def parse_number(text: str) -> float:
    """Evaluate ``'0.01pi'``, ``'pi/2'``, ``'3'`` and the like."""
    src = re.sub(r"(\d)\s*pi", r"\1*pi", text.strip())
    try:
        value = _eval(ast.parse(src, mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"cannot parse number {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"non-finite value {text!r}")
    return value


def parse_grid(text: str) -> tuple:
    """``a,b,c`` lists points; ``start:stop:n`` is ``n`` points from start to stop inclusive."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError("range grid must be start:stop:n")
        start, stop = parse_number(parts[0]), parse_number(parts[1])
        try:
            n = int(parts[2])
        except ValueError:
            raise argparse.ArgumentTypeError("grid point count must be an integer") from None
        if n < 1:
            raise argparse.ArgumentTypeError("grid point count must be >= 1")
        return tuple(float(v) for v in np.linspace(start, stop, n))
    return tuple(parse_number(p) for p in text.split(",") if p.strip())


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(2, _error_line("usage", message) + "\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="photonic-berry",
                description="Sweep the field contour and extract geometric phases.")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--config", help="JSON file with SweepConfig fields")
    p.add_argument("--vary", choices=("phi0", "theta0", "T"))
    p.add_argument("--grid", type=parse_grid)
    p.add_argument("--theta0", type=parse_number)
    p.add_argument("--phi0", type=parse_number)
    p.add_argument("--T", type=parse_number, dest="T")
    p.add_argument("--dt", type=parse_number)
    p.add_argument("--order", type=int, choices=(1, 2))
    p.add_argument("--backend", choices=("exact", "shots"))
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--estimator", choices=("exact_arg", "two_run"))
    p.add_argument("--out", dest="output", help="output path (CSV to stdout when omitted)")
    p.add_argument("--format", choices=FORMATS)
    return p


def config_from_args(args: argparse.Namespace) -> SweepConfig:
    values = {}
    if args.preset:
        values.update(preset(args.preset).to_dict())
    if args.config:
        with open(args.config) as fh:
            doc = json.load(fh)
        if not isinstance(doc, dict):
            raise ValueError("config file must hold a JSON object")
        values.update(doc)
    for key in ("vary", "grid", "theta0", "phi0", "T", "dt", "order", "backend", "shots",
                "seed", "estimator", "output", "format"):
        v = getattr(args, key)
        if v is not None:
            values[key] = v
    if "vary" not in values or "grid" not in values:
        raise ValueError("give --preset, or --vary and --grid")
    return SweepConfig.from_dict(values)


def _error_line(kind: str, message: str) -> str:
    return json.dumps({"status": "error", "type": kind, "message": message})


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        if not cfg.output and cfg.format != "csv":
            raise ValueError("--out is required for json and gnuplot output")
        rows = run_sweep(cfg)
        if cfg.output:
            written = emit(rows, cfg.format, cfg.output, cfg)
            failed = sum(r.error is not None for r in rows)
            print(json.dumps({"status": "ok", "rows": len(rows), "failed_rows": failed,
                              "files": [str(w) for w in written]}))
        else:
            sys.stdout.write(to_csv(rows))
    except (ValueError, TypeError) as exc:
        print(_error_line("invalid_config", str(exc)), file=sys.stderr)
        return 2
    except OSError as exc:
        print(_error_line("io", str(exc)), file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
