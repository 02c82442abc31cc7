"""
Command-line front end: `weylbound <subcommand> [options]`.

Exit codes: 0 on success, 1 on invalid input or an argument outside an operation's
domain, 2 when a quadrature, root or series did not reach its tolerance.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence

from rich.console import Console

from . import __version__
from .eigenfunction_bounds import (
    eigenfunction_bound,
    surface_gl_constant,
    surface_table,
    tanh_moment,
)
from .emit import FORMATS, ResultTable, emit
from .errors import ConvergenceError, ValidationError, WeylBoundError
from .geometry import Dimension, EigenfunctionQuery, HyperbolicSurface, LocalGeometry
from .heat_bounds import heat_trace_upper, local_heat_trace_upper, remainder_curve
from .log import get_logger, setup_logging
from .nu_constants import nu_cached, nu_table
from .specfun import QuadratureSpec
from .spectrum import Spectrum, parse_eigenvalue_file
from .utils import parse_grid
from .wave_kernel import (
    bump,
    counting_pairing,
    diagonal_value,
    kernel_even,
    kernel_odd,
    mehler_fock_roundtrip,
    shifted_to_unshifted,
)
from .weyl_counting import counting_table, g_norm, g_norm_oracle
from .zeta_determinant import DetQuery, det_bounds, sweep_det_bounds

log = get_logger(__name__)

COMMANDS = ("nu", "count", "eigfn", "heat", "heat-remainder", "detzeta", "verify-kernel")
_GLOBAL_KEYS = ("command", "format", "output", "tol", "seed_check", "verbose", "log_y")
_ROUNDTRIP_U = (0.0, 0.25, 0.5)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        raise ValidationError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="csv", help="Output format.")
    common.add_argument("--output", type=Path, default=None, help="Write here instead of stdout.")
    common.add_argument("--tol", default=None, help="ABS[,REL[,MAXSUB]]; overrides WEYLBOUND_TOL.")
    common.add_argument("--seed-check", action="store_true", dest="seed_check",
                        help="Run the self-checks for the subcommand first.")
    common.add_argument("-v", "--verbose", action="count", default=0)
    common.add_argument("--log-y", action="store_true", dest="log_y", help="Log-scale y (svg).")

    p = _Parser(
        prog="weylbound",
        description="Explicit local Weyl law bounds on hyperbolic manifolds.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("nu", parents=[common], help="Fourier-Tauberian constants nu_m.")
    s.add_argument("--m", type=int, default=None, help="Single m; all of 1..6 when omitted.")

    s = sub.add_parser("count", parents=[common], help="Two-sided local counting bounds.")
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--d", type=float, required=True, help="Twice the injectivity radius.")
    s.add_argument("--tau", type=float, default=None)
    s.add_argument("--grid", default=None, help="a:b:n grid of tau values.")
    s.add_argument("--refined", action="store_true", help="Sharper bounds for n = 2, 3, 4.")
    s.add_argument("--clamp", action="store_true", help="Clamp bounds at zero.")
    s.add_argument("--volume", type=float, default=None, help="Global bounds; --d is the systole.")

    s = sub.add_parser("eigfn", parents=[common], help="Pointwise eigenfunction bounds.")
    s.add_argument("--dim", type=int, default=2)
    s.add_argument("--d", type=float, default=None)
    s.add_argument("--lambda", dest="lam", default=None, help="lambda or an a:b:n grid.")
    s.add_argument("--deriv", type=int, default=0, choices=(0, 1, 2, 3))
    s.add_argument("--surface", action="store_true", help="Surface densities of order l.")
    s.add_argument("--l", type=int, default=None, help="Surface order 1..8.")
    s.add_argument("--table", action="store_true", help="Dump densities and G constants.")

    s = sub.add_parser("heat", parents=[common], help="Heat-trace upper bounds.")
    s.add_argument("--dim", type=int, default=2)
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--local", action="store_true", default=True)
    mode.add_argument("--global", dest="global_", action="store_true")
    s.add_argument("--d", type=float, default=None, help="Local d, or the systole with --global.")
    s.add_argument("--volume", type=float, default=None)
    s.add_argument("--t-grid", dest="t_grid", required=True, help="t or an a:b:n grid.")

    def add_surface_args(s: argparse.ArgumentParser) -> None:
        s.add_argument("--eigs", type=Path, required=True, help="Eigenvalue file (lambda^2).")
        s.add_argument("--c", type=float, required=True, help="Spectrum known up to c.")
        s.add_argument("--genus", type=int, default=2)
        s.add_argument("--systole", type=float, default=None, help="Defaults to the Bolza systole.")
        s.add_argument("--closed", action="store_true", help="Insert the eigenvalue 0 if absent.")
        s.add_argument("--sqrt-input", action="store_true", dest="sqrt_input")
        s.add_argument("--max-known", type=float, default=None, dest="max_known")

    s = sub.add_parser("heat-remainder", parents=[common],
                       help="R_t^c envelope and truncated trace.")
    add_surface_args(s)
    s.add_argument("--t-grid", dest="t_grid", default="0.05:2:40")

    s = sub.add_parser("detzeta", parents=[common], help="Bracket for det_zeta of the Laplacian.")
    add_surface_args(s)
    s.add_argument("--eps", type=float, default=None)
    s.add_argument("--T", type=float, default=None)
    s.add_argument("--sweep-eps", dest="sweep_eps", default=None, help="a:b:n grid of eps.")
    s.add_argument("--sweep-T", dest="sweep_T", default=None, help="a:b:n grid of T.")

    s = sub.add_parser("verify-kernel", parents=[common], help="Wave-kernel cross-checks.")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--a", type=float, default=1.0, help="Support of the bump test function.")
    s.add_argument("--k", type=float, default=1.0, help="Steepness of the bump.")
    s.add_argument("--roundtrip", action="store_true")
    return p


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: Dict[str, Any] = field(default_factory=dict)
    fmt: str = "csv"
    output: Optional[Path] = None
    tol: QuadratureSpec = field(default_factory=QuadratureSpec)
    seed_check: bool = False
    verbose: int = 0
    log_y: bool = False

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise ValidationError(f"Unknown subcommand {self.command!r}")
        if self.fmt not in FORMATS:
            raise ValidationError(f"Output format expected one of {FORMATS}, got {self.fmt!r}")

    @classmethod
    def from_namespace(
        cls, ns: argparse.Namespace, environ: Optional[Mapping[str, str]] = None
    ) -> "RunConfig":
        d = vars(ns)
        tol = QuadratureSpec.parse(d["tol"]) if d.get("tol") else QuadratureSpec.from_env(environ)
        params = {k: v for k, v in d.items() if k not in _GLOBAL_KEYS}
        return cls(
            command=d["command"], params=params, fmt=d.get("format", "csv"),
            output=d.get("output"), tol=tol, seed_check=bool(d.get("seed_check")),
            verbose=int(d.get("verbose") or 0), log_y=bool(d.get("log_y")),
        )

    def get(self, key: str, default: Any = None) -> Any:
        v = self.params.get(key)
        return default if v is None else v

    def require(self, key: str, flag: Optional[str] = None) -> Any:
        v = self.params.get(key)
        if v is None:
            raise ValidationError(f"{self.command}: {flag or '--' + key} is required")
        return v


# ---------- self-checks ----------

NU_REFERENCE = {2: 4.730040744862704, 3: 2.0 * math.pi, 4: 7.81870734}


def _check(name: str, value: float, reference: float, tol: float) -> None:
    if not abs(value - reference) <= tol:
        raise ValidationError(f"seed check '{name}' failed: {value!r} vs {reference!r}")
    log.debug("seed check %s ok: %.12g", name, value)


def seed_checks(cfg: RunConfig) -> None:
    _check("nu_2", nu_cached(2), NU_REFERENCE[2], 1e-8)
    _check("nu_3", nu_cached(3), NU_REFERENCE[3], 1e-8)
    _check("nu_4", nu_cached(4), NU_REFERENCE[4], 1e-7)
    _check("tanh_moment_1", tanh_moment(1), -17.0 / 960.0, 1e-10)
    _check("tanh_moment_2", tanh_moment(2), -407.0 / 40320.0, 1e-10)
    _check("G_2^2", surface_gl_constant(2), 29.0 / (1260.0 * math.pi), 1e-10)
    _check("G_2", g_norm_oracle(Dimension(2), cfg.tol), g_norm(Dimension(2)), 1e-9)


def _check_rows(table: ResultTable, lower: str, upper: str) -> None:
    for lo, up in zip(table.column(lower), table.column(upper)):
        if not lo <= up:
            raise ValidationError(f"seed check failed: {lower}={lo!r} exceeds {upper}={up!r}")


# ---------- subcommands ----------

def _progress(cfg: RunConfig, console: Console) -> Optional[Callable[[Dict], None]]:
    if cfg.verbose <= 0:
        return None

    def printer(evt: Dict) -> None:
        extra = " ".join(f"{k}={v}" for k, v in evt.items() if k not in ("phase", "pct"))
        console.print(f"[bold]{evt['phase']}[/bold] {evt['pct']:3d}% {extra}")
    return printer


def _grid(text: Any) -> List[float]:
    return parse_grid(str(text))


def _surface(cfg: RunConfig) -> HyperbolicSurface:
    systole = cfg.get("systole")
    if systole is None:
        return HyperbolicSurface(cfg.get("genus", 2), HyperbolicSurface.bolza().systole)
    return HyperbolicSurface(cfg.get("genus", 2), float(systole))


def _spectrum(cfg: RunConfig) -> Spectrum:
    f = parse_eigenvalue_file(
        cfg.require("eigs"), closed=bool(cfg.get("closed", False)),
        sqrt_input=bool(cfg.get("sqrt_input", False)), max_known=cfg.get("max_known"),
    )
    return f.parsed


def run_nu(cfg: RunConfig, console: Console) -> ResultTable:
    m = cfg.get("m")
    consts = nu_table() if m is None else nu_table((int(m),))
    rows = [[c.m, c.value, f"{c.value:.10f}"] for c in consts]
    return ResultTable(["m", "nu", "nu_10dp"], rows, {"command": "nu"})


def run_count(cfg: RunConfig, console: Console) -> ResultTable:
    dim = Dimension(cfg.require("dim"))
    geom = LocalGeometry(cfg.require("d"))
    if cfg.get("grid") is not None:
        taus = _grid(cfg.get("grid"))
    else:
        taus = [float(cfg.require("tau", "--tau or --grid"))]
    rows = counting_table(
        dim, geom, taus, refined=bool(cfg.get("refined", False)),
        clamp=bool(cfg.get("clamp", False)), volume=cfg.get("volume"),
        on_progress=_progress(cfg, console),
    )
    table = ResultTable(["tau", "lower", "upper"], [list(r) for r in rows],
                        {"command": "count", "n": dim.n, "d": geom.d,
                         "title": f"N(tau), n={dim.n}"})
    if cfg.seed_check:
        _check_rows(table, "lower", "upper")
    return table


def run_eigfn(cfg: RunConfig, console: Console) -> ResultTable:
    if cfg.get("surface") or cfg.get("table"):
        l = cfg.get("l")
        orders = tuple(range(1, 9)) if l is None else (int(l),)
        return ResultTable.from_records(surface_table(orders), {"command": "eigfn"})
    dim = Dimension(cfg.get("dim", 2))
    geom = LocalGeometry(cfg.require("d"))
    deriv = int(cfg.get("deriv", 0))
    lams = _grid(cfg.require("lam", "--lambda"))
    rows = [[lam, eigenfunction_bound(EigenfunctionQuery(lam, geom, dim), deriv)] for lam in lams]
    return ResultTable(["lambda", "bound"], rows,
                       {"command": "eigfn", "n": dim.n, "d": geom.d, "deriv": deriv})


def run_heat(cfg: RunConfig, console: Console) -> ResultTable:
    dim = Dimension(cfg.get("dim", 2))
    ts = _grid(cfg.require("t_grid", "--t-grid"))
    if cfg.get("global_"):
        volume, systole = float(cfg.require("volume")), float(cfg.require("d"))
        rows = [[t, heat_trace_upper(dim, volume, systole, t)] for t in ts]
    else:
        geom = LocalGeometry(cfg.require("d"))
        rows = [[t, local_heat_trace_upper(dim, geom, t)] for t in ts]
    table = ResultTable(["t", "upper"], rows, {"command": "heat", "n": dim.n})
    if cfg.seed_check and not all(r[1] > 0 for r in rows):
        raise ValidationError("seed check failed: heat-trace upper bound is not positive")
    return table


def run_heat_remainder(cfg: RunConfig, console: Console) -> ResultTable:
    surface = _surface(cfg)
    spectrum = _spectrum(cfg)
    c = float(cfg.require("c"))
    spectrum.check_complete(c)
    rows = remainder_curve(surface, spectrum, c, _grid(cfg.get("t_grid")),
                           on_progress=_progress(cfg, console))
    return ResultTable.from_records(rows, {
        "command": "heat-remainder", "c": c, "genus": surface.genus,
        "systole": surface.systole, "title": f"R_t^c for c={c:g}",
    })


def run_detzeta(cfg: RunConfig, console: Console) -> ResultTable:
    surface = _surface(cfg)
    spectrum = _spectrum(cfg)
    c = float(cfg.require("c"))
    meta = {"command": "detzeta", "genus": surface.genus, "systole": surface.systole}
    if cfg.get("sweep_eps") is not None or cfg.get("sweep_T") is not None:
        eps_grid = _grid(cfg.require("sweep_eps", "--sweep-eps"))
        T_grid = _grid(cfg.require("sweep_T", "--sweep-T"))
        rows = sweep_det_bounds(surface, spectrum, c, eps_grid, T_grid,
                                on_progress=_progress(cfg, console), spec=cfg.tol)
        table = ResultTable.from_records(rows, meta)
    else:
        q = DetQuery(surface, spectrum, c, float(cfg.require("eps")), float(cfg.require("T")))
        table = ResultTable.from_records([det_bounds(q, cfg.tol).as_dict()], meta)
    if cfg.seed_check:
        _check_rows(table, "det_lower", "det_upper")
    return table


def run_verify_kernel(cfg: RunConfig, console: Console) -> ResultTable:
    n = int(cfg.require("n"))
    if not 1 <= n <= 5:
        raise ValidationError(f"verify-kernel: --n expected 1..5, got {n}")
    g = bump(float(cfg.get("a", 1.0)), float(cfg.get("k", 1.0)))
    m = (n - 1) // 2
    rows: List[List[Any]] = []
    if n % 2:
        direct = kernel_odd(g, 0.0, m)
    else:
        direct = kernel_even(g, 0.0, m, cfg.tol)
    diag = diagonal_value(n, g.transform, g.support, cfg.tol)
    rows.append(["diagonal", direct, diag, abs(direct - diag)])
    if n >= 2:
        dim = Dimension(n)
        shifted = diagonal_value(dim, shifted_to_unshifted(g.transform, dim), g.support, cfg.tol)
        pairing = counting_pairing(dim, g.transform, g.support, cfg.tol)
        rows.append(["counting", shifted, pairing, abs(shifted - pairing)])
    if cfg.get("roundtrip"):
        kind = "odd_case" if n % 2 else "even_case"
        err = mehler_fock_roundtrip(m, kind, g, _ROUNDTRIP_U, on_progress=_progress(cfg, console))
        rows.append(["roundtrip", err, 0.0, err])
    return ResultTable(["check", "value", "reference", "abs_error"], rows,
                       {"command": "verify-kernel", "n": n, "g": g.label})


HANDLERS: Dict[str, Callable[[RunConfig, Console], ResultTable]] = {
    "nu": run_nu,
    "count": run_count,
    "eigfn": run_eigfn,
    "heat": run_heat,
    "heat-remainder": run_heat_remainder,
    "detzeta": run_detzeta,
    "verify-kernel": run_verify_kernel,
}


def _write(cfg: RunConfig, payload: bytes) -> None:
    if cfg.output is None:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
        return
    try:
        cfg.output.write_bytes(payload)
    except OSError as e:
        raise ValidationError(f"Cannot write output '{cfg.output}': {e}") from None


def dispatch(cfg: RunConfig, console: Optional[Console] = None) -> int:
    con = console or Console(file=sys.stderr, color_system="standard")
    try:
        if cfg.seed_check:
            seed_checks(cfg)
        table = HANDLERS[cfg.command](cfg, con)
        _write(cfg, emit(table, cfg.fmt, log_y=cfg.log_y))
    except ConvergenceError as e:
        log.error("%s", e)
        return 2
    except WeylBoundError as e:
        log.error("%s", e)
        return 1
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    console = Console(file=sys.stderr, color_system="standard")
    setup_logging(0, console)
    try:
        ns = build_parser().parse_args(argv)
        cfg = RunConfig.from_namespace(ns)
    except ValidationError as e:
        log.error("%s", e)
        return 1
    setup_logging(cfg.verbose, console)
    return dispatch(cfg, console)
