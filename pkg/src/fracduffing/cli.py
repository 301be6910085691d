"""Command-line front end: ``simulate``, ``converge`` and ``plot``.

Exit codes: 0 success, 2 configuration error, 3 solver abort, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

from fracduffing.abm import abm_solve
from fracduffing.efds import efds_solve
from fracduffing.errors import ConfigurationError, SolverDivergence
from fracduffing.io import (
    CSVFormatError,
    atomic_write_text,
    convergence_csv,
    diff_csv,
    read_trajectory,
    trajectory_csv,
)
from fracduffing.model import (
    Constant,
    GridSpec,
    Harmonic,
    Linear,
    Manufactured,
    NoForcing,
    OscillatorParams,
    Tabulated,
    validate_order,
)
from fracduffing.plotting import plot_svg
from fracduffing.verification import IC_MODES, Problem, convergence_study, exact_cubic

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 0, 2, 3, 4


def parse_order(text: str):
    """``const:<a>`` | ``linear:<a>:<slope>`` | ``table:<path>``."""
    kind, _, rest = text.partition(":")
    try:
        if kind == "const":
            return Constant(float(rest))
        if kind == "linear":
            a, slope = rest.split(":")
            return Linear(float(a), float(slope))
    except ValueError:
        raise ConfigurationError(f"malformed order spec {text!r}") from None
    if kind == "table":
        return _read_order_table(rest)
    raise ConfigurationError(f"unknown order spec {text!r}; use const:, linear: or table:")


def _read_order_table(path: str) -> Tabulated:
    nodes, values = [], []
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            for lineno, row in enumerate(csv.reader(fh), start=1):
                if not row or not "".join(row).strip():
                    continue
                try:
                    t, q = (float(c) for c in row[:2])
                except ValueError:
                    if lineno == 1:  # header
                        continue
                    raise ConfigurationError(f"{path}:{lineno}: expected 't,q'") from None
                nodes.append(t)
                values.append(q)
    except OSError as exc:
        raise ConfigurationError(f"cannot read order table: {exc}") from None
    return Tabulated(tuple(nodes), tuple(values), source=path)


@dataclass(frozen=True)
class RunConfig:
    scheme: str
    lam: float
    omega0_sq: float
    b: float
    delta: float
    omega: float
    x0: float
    y0: float
    z0: float
    T: float
    N: int
    order: str
    forcing: str
    out: str
    ic_mode: str
    formulation: str = "staggered"

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        x0, y0 = ns.x0, ns.y0
        if ns.forcing == "manufactured":
            px0, py0 = IC_MODES[ns.ic_mode]
            x0 = px0 if x0 is None else x0
            y0 = py0 if y0 is None else y0
        config = cls(
            scheme=ns.scheme,
            lam=ns.lam,
            omega0_sq=ns.omega0_sq,
            b=ns.b,
            delta=ns.delta,
            omega=ns.omega,
            x0=0.0 if x0 is None else x0,
            y0=0.0 if y0 is None else y0,
            z0=ns.z0,
            T=ns.T,
            N=ns.N,
            order=ns.order,
            forcing=ns.forcing,
            out=ns.out,
            ic_mode=ns.ic_mode,
            formulation=ns.formulation,
        )
        config.validate()
        return config

    def to_argv(self) -> list[str]:
        return [
            "--scheme", self.scheme,
            "--lambda", repr(self.lam),
            "--omega0-sq", repr(self.omega0_sq),
            "--b", repr(self.b),
            "--delta", repr(self.delta),
            "--omega", repr(self.omega),
            "--x0", repr(self.x0),
            "--y0", repr(self.y0),
            "--z0", repr(self.z0),
            "--T", repr(self.T),
            "--N", str(self.N),
            "--order", self.order,
            "--forcing", self.forcing,
            "--out", self.out,
            "--ic-mode", self.ic_mode,
            "--formulation", self.formulation,
        ]  # fmt: skip

    def params(self) -> OscillatorParams:
        return OscillatorParams(
            lam=self.lam,
            omega0_sq=self.omega0_sq,
            b=self.b,
            delta=self.delta,
            omega=self.omega,
            x0=self.x0,
            y0=self.y0,
            z0=self.z0,
        )

    def order_function(self):
        return parse_order(self.order)

    def forcing_spec(self):
        if self.forcing == "none":
            return NoForcing()
        if self.forcing == "harmonic":
            return Harmonic(self.delta, self.omega)
        return Manufactured(self.lam, self.order_function())

    def grid(self) -> GridSpec:
        return GridSpec(self.T, self.N)

    def validate(self) -> None:
        self.params()
        validate_order(self.order_function(), self.grid())

    def problem(self) -> Problem:
        manufactured = self.forcing == "manufactured"
        notes = [f"order={self.order}", f"T={self.T!r}"]
        if manufactured:
            notes.append(f"ic_mode={self.ic_mode} (x0={self.x0!r}, y0={self.y0!r})")
            if (self.x0, self.y0) != (0.0, 0.0):
                notes.append("x0, y0 do not match the exact solution t**3 (which needs 0, 0)")
            if (self.omega0_sq, self.b) != (1.0, 1.0):
                notes.append("manufactured forcing assumes omega0_sq = b = 1")
        return Problem(
            name="manufactured" if manufactured else self.forcing,
            params=self.params(),
            order=self.order_function(),
            forcing=self.forcing_spec(),
            T=self.T,
            exact=exact_cubic if manufactured else None,
            notes=tuple(notes),
        )

    def schemes(self) -> tuple[str, ...]:
        return ("efds", "abm") if self.scheme == "both" else (self.scheme,)


def _solver(name: str, formulation: str):
    if name == "efds":
        return efds_solve
    return lambda *args: abm_solve(*args, formulation=formulation)


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scheme", choices=("efds", "abm", "both"), default="both")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0, help="friction coefficient")
    p.add_argument("--omega0-sq", dest="omega0_sq", type=float, default=1.0)
    p.add_argument("--b", type=float, default=1.0, help="cubic stiffness coefficient")
    p.add_argument("--delta", type=float, default=1.0, help="forcing amplitude")
    p.add_argument("--omega", type=float, default=1.0, help="forcing frequency")
    p.add_argument("--x0", type=float, default=None)
    p.add_argument("--y0", type=float, default=None)
    p.add_argument("--z0", type=float, default=0.0)
    p.add_argument("--T", type=float, default=100.0)
    p.add_argument("--N", type=int, default=1800)
    p.add_argument("--order", default="linear:0.8:-0.005")
    p.add_argument("--forcing", choices=("none", "harmonic", "manufactured"), default="harmonic")
    p.add_argument("--out", default=".")
    p.add_argument(
        "--ic-mode",
        choices=tuple(IC_MODES),
        default="offset",
        help="default x0, y0 for the manufactured problem",
    )
    p.add_argument("--formulation", choices=("staggered", "duffing"), default="staggered")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracduffing",
        description="Variable-order fractional Duffing oscillator solvers",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="write trajectory CSVs")
    _add_run_flags(sim)

    conv = sub.add_parser("converge", help="write a convergence table CSV")
    _add_run_flags(conv)
    conv.add_argument("--n-start", dest="n_start", type=int, default=10)
    conv.add_argument("--levels", type=int, default=8)
    conv.add_argument("--mode", choices=("exact", "runge"), default="exact")

    plot = sub.add_parser("plot", help="render trajectory CSVs to SVG")
    plot.add_argument("inputs", nargs="+")
    plot.add_argument("--kind", choices=("oscillogram", "phase", "overlay"), default="oscillogram")
    plot.add_argument("--exact", choices=("none", "cubic"), default="none")
    plot.add_argument("--out", required=True, help="output SVG path")
    return parser


def _out_dir(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_simulate(config: RunConfig) -> list[Path]:
    args = (config.params(), config.order_function(), config.forcing_spec(), config.grid())
    schemes = config.schemes()
    with ThreadPoolExecutor(max_workers=len(schemes)) as pool:
        futures = [pool.submit(_solver(s, config.formulation), *args) for s in schemes]
        results = [f.result() for f in futures]

    out = _out_dir(config.out)
    written = []
    for scheme, traj in zip(schemes, results):
        path = out / f"trajectory_{scheme}.csv"
        atomic_write_text(path, trajectory_csv(traj))
        written.append(path)
    if len(results) == 2:
        path = out / "diff.csv"
        atomic_write_text(path, diff_csv(*results))
        written.append(path)
    return written


def cmd_converge(config: RunConfig, n_start: int, levels: int, mode: str) -> list[Path]:
    if levels < 2:
        raise ConfigurationError(f"--levels must be >= 2, got {levels}")
    if mode == "exact" and config.forcing != "manufactured":
        raise ConfigurationError("--mode exact needs --forcing manufactured")
    problem = config.problem()
    for k in range(levels):
        validate_order(problem.order, problem.grid(n_start * 2**k))
    solvers = {s: _solver(s, config.formulation) for s in config.schemes()}
    report = convergence_study(problem, n_start, levels, mode, config.schemes(), solvers)
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)

    out = _out_dir(config.out)
    csv_path = out / "convergence.csv"
    atomic_write_text(csv_path, convergence_csv(report))
    meta = {
        "mode": mode,
        "n_start": n_start,
        "levels": levels,
        "config": {k: v for k, v in asdict(config).items() if k != "out"},
        "notes": report.notes,
        "warnings": report.warnings,
    }
    meta_path = out / "convergence_meta.json"
    atomic_write_text(meta_path, json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return [csv_path, meta_path]


def cmd_plot(inputs: list[str], kind: str, out: str, exact: str = "none") -> Path:
    trajectories = [read_trajectory(p) for p in inputs]
    svg = plot_svg(trajectories, kind, exact=exact_cubic if exact == "cubic" else None)
    path = Path(out)
    atomic_write_text(path, svg)
    return path


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        if ns.command == "plot":
            cmd_plot(ns.inputs, ns.kind, ns.out, ns.exact)
            return EXIT_OK
        config = RunConfig.from_args(ns)
        if ns.command == "simulate":
            cmd_simulate(config)
        else:
            cmd_converge(config, ns.n_start, ns.levels, ns.mode)
    except (ConfigurationError, CSVFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverDivergence as exc:
        print(f"error: solver aborted at step {exc.step}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
