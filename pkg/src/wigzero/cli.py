"""Command-line entry point.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .certificates import PROPOSITIONS, certify
from .laguerre import laguerre_zeros
from .nodal_inverse import (
    default_grid,
    inverse_from_circles,
    negative_region_radius,
    nodal_scan,
    parity_constraint,
    rank_lower_bound,
    sign_up_bound,
)
from .phase_space import HermiteState
from .wigner_engine import fourier_selfmap_check, hlawatsch_nuttall_check, husimi_eval, wigner_eval

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
NORM_TOLERANCE = 1e-6


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    hbar: float = 1.0
    tolerance: float = 1e-10
    grid_size: int = 512
    grid_radius: float | None = None
    out: str | None = None
    fmt: str = "json"
    seed: int = 0
    timing: bool = False

    def __post_init__(self):
        if not (self.hbar > 0 and math.isfinite(self.hbar)):
            raise UsageError("--hbar must be positive")
        if not (0 < self.tolerance <= 1e-3):
            raise UsageError("--tol must lie in (0, 1e-3]")
        if self.grid_size < 16:
            raise UsageError("--grid-size must be at least 16")
        if self.grid_radius is not None and self.grid_radius <= 0:
            raise UsageError("--grid-radius must be positive")
        if self.fmt not in ("json", "csv"):
            raise UsageError("--format must be json or csv")


# ------------------------------------------------------------ serialization


def _emit(obj, indent: int = 0) -> str:
    """JSON with sorted keys and floats at 17 significant digits."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_emit(obj[k], indent + 1)}" for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + _emit(v, indent + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return format(v, ".17g") if math.isfinite(v) else "null"
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def dumps(obj) -> str:
    return _emit(obj) + "\n"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format(float(v), ".17g") if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _write(text: str, cfg: RunConfig) -> None:
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


# ------------------------------------------------------------ state input


def load_state(path, renormalize: bool = False, hbar: float | None = None) -> HermiteState:
    """Read a state JSON file; small norm drift (<= 1e-6) is absorbed, larger needs ``renormalize``."""
    try:
        record = json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read state file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"state file {path} is not valid JSON: {exc}") from exc
    if not isinstance(record, dict) or not isinstance(record.get("coeffs"), list):
        raise UsageError("state JSON needs a 'coeffs' list")
    if not record["coeffs"]:
        raise UsageError("state JSON has an empty coefficient list")
    if hbar is not None and "hbar" not in record:
        record = {**record, "hbar": hbar}
    try:
        probe = HermiteState.from_dict(record, renormalize=True)
        raw = np.array([complex(c.get("re", 0.0), c.get("im", 0.0)) if isinstance(c, dict) else complex(c)
                        for c in record["coeffs"]])
    except (ValueError, TypeError) as exc:
        raise UsageError(f"malformed state JSON: {exc}") from exc
    deviation = abs(float(np.linalg.norm(raw)) - 1.0)
    if deviation > NORM_TOLERANCE and not renormalize:
        raise UsageError(f"state norm deviates from 1 by {deviation:.3g}; rerun with --renormalize to rescale")
    return probe


# ------------------------------------------------------------ subcommands


def _cmd_eval(args, cfg: RunConfig) -> int:
    state = load_state(args.state, args.renormalize, cfg.hbar)
    fn = wigner_eval if args.kind == "wigner" else husimi_eval
    if args.point:
        pts = np.array(args.point, dtype=float)
    else:
        xs, ps = default_grid(state, cfg.grid_size, cfg.grid_radius)
        gx, gp = np.meshgrid(xs, ps, indexing="ij")
        pts = np.stack([gx.ravel(), gp.ravel()], axis=-1)
    vals = np.atleast_1d(fn(state, pts))
    status = EXIT_OK
    report = {"kind": args.kind, "state": state.to_dict(),
              "points": [[float(x), float(p), float(v)] for (x, p), v in zip(pts, vals)]}
    if args.hn is not None:
        res = hlawatsch_nuttall_check(state, args.hn, tol=min(cfg.tolerance, 1e-10))
        report["hlawatsch_nuttall_residual"] = res
        if res > 1e-6:
            status = EXIT_FAIL
    if args.fourier:
        try:
            chk = fourier_selfmap_check(state)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        report["fourier_selfmap_residual"] = chk.residual
        if not chk.consistent:
            status = EXIT_FAIL
    if cfg.fmt == "csv":
        _write(_csv_text(["x", "p", "value"], report["points"]), cfg)
    else:
        _write(dumps(report), cfg)
    return status


def _cmd_scan(args, cfg: RunConfig) -> int:
    state = load_state(args.state, args.renormalize, cfg.hbar)
    report = nodal_scan(state, cfg.grid_size, cfg.grid_radius)
    if args.grid_csv:
        xs, ps = default_grid(state, cfg.grid_size, cfg.grid_radius)
        gx, gp = np.meshgrid(xs, ps, indexing="ij")
        vals = wigner_eval(state, np.stack([gx, gp], axis=-1))
        Path(args.grid_csv).write_text(_csv_text(["x", "p", "value"], zip(gx.ravel(), gp.ravel(), vals.ravel())))
    if cfg.fmt == "csv":
        rows = [(c.center.x, c.center.p, c.radius, c.max_residual) for c in report.circles]
        _write(_csv_text(["center_x", "center_p", "radius", "max_residual"], rows), cfg)
    else:
        _write(dumps(report.to_dict()), cfg)
    return EXIT_OK


def _cmd_zeros(args, cfg: RunConfig) -> int:
    if args.n < 1 or args.alpha < 0:
        raise UsageError("need --n >= 1 and --alpha >= 0")
    zl = laguerre_zeros(args.n, args.alpha)
    rows = [(i, v, str(lo), str(hi)) for i, (v, (lo, hi)) in enumerate(zip(zl.values, zl.brackets))]
    if cfg.fmt == "csv":
        _write(_csv_text(["index", "value", "bracket_lo", "bracket_hi"], rows), cfg)
    else:
        out = {"n": args.n, "alpha": args.alpha, "zeros": list(zl.values),
               "brackets": [[lo, hi] for _, _, lo, hi in rows],
               "radii": [math.sqrt(cfg.hbar * v / 2.0) for v in zl.values], "hbar": cfg.hbar}
        _write(dumps(out), cfg)
    return EXIT_OK


def _cmd_certify(args, cfg: RunConfig) -> int:
    if args.nmax < 1 or args.mmax < 0:
        raise UsageError("need --nmax >= 1 and --mmax >= 0")
    cert = certify(args.prop, args.nmax, args.mmax, k_max=args.kmax, n_jobs=args.jobs)
    _write(dumps(cert.to_dict(timing=cfg.timing)), cfg)
    if not cert.passed:
        sys.stderr.write("counterexamples: " + json.dumps(cert.to_dict(False)["failures"][:20]) + "\n")
        return EXIT_FAIL
    return EXIT_OK


def _cmd_inverse(args, cfg: RunConfig) -> int:
    radii = list(args.radius or [])
    radii += [math.sqrt(q * cfg.hbar) for q in (args.radius_sq_over_hbar or [])]
    radii += [math.sqrt(s * cfg.hbar / 2.0) for s in (args.s or [])]
    if not radii:
        raise UsageError("give at least one --radius, --radius-sq-over-hbar or --s")
    if any(r <= 0 for r in radii):
        raise UsageError("radii must be positive")
    res = inverse_from_circles(radii, args.sigma, args.nmax, hbar=cfg.hbar, starts=args.starts, seed=cfg.seed,
                               tol=cfg.tolerance)
    out = res.to_dict()
    if out["certificate"] is not None and not cfg.timing:
        out["certificate"]["runtime_ms"] = None
    if cfg.fmt == "csv":
        rows = [(i, n, c.real, c.imag) for i, sol in enumerate(res.solutions) for n, c in enumerate(sol.coeffs)]
        _write(_csv_text(["solution", "n", "re", "im"], rows), cfg)
    else:
        _write(dumps(out), cfg)
    if res.certificate is not None and not res.certificate.passed:
        return EXIT_FAIL
    return EXIT_OK


def _cmd_bounds(args, cfg: RunConfig) -> int:
    out: dict = {"hbar": cfg.hbar}
    status = EXIT_OK
    if args.sign_up is not None:
        if args.sign_up < 1:
            raise UsageError("--sign-up needs a dimension >= 1")
        out["sign_up_bound"] = {"dimension": args.sign_up, "bound": sign_up_bound(args.sign_up, cfg.hbar)}
    if args.rank is not None:
        if args.rank <= 0:
            raise UsageError("--rank needs a positive radius")
        out["rank_lower_bound"] = {"radius": args.rank, "rank": rank_lower_bound(args.rank, cfg.hbar)}
    if args.parity is not None:
        try:
            par = parity_constraint(args.parity)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"--parity: {exc}") from exc
        out["parity"] = {"p": args.parity, "constraint": par.value}
    if args.state is not None:
        state = load_state(args.state, args.renormalize, cfg.hbar)
        sres = negative_region_radius(state, cfg.grid_size, cfg.grid_radius)
        out["negative_region"] = sres.to_dict()
        if sres.verdict != "pass":
            status = EXIT_FAIL
    if len(out) == 1:
        raise UsageError("bounds needs at least one of --sign-up, --rank, --parity, --state")
    _write(dumps(out), cfg)
    return status


# ------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--hbar", type=float, default=1.0)
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--grid-size", type=int, default=512)
    common.add_argument("--grid-radius", type=float, default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="write the artifact here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--renormalize", action="store_true", help="rescale a state whose norm is not 1")
    common.add_argument("--timing", action="store_true", help="record runtimes (makes output non-reproducible)")

    parser = argparse.ArgumentParser(prog="wigzero", description="Wigner nodal sets, certificates and inversion.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate W (or the Husimi function) at points or on a grid")
    p.add_argument("--state", required=True)
    p.add_argument("--point", nargs=2, type=float, action="append", metavar=("X", "P"))
    p.add_argument("--kind", choices=("wigner", "husimi"), default="wigner")
    p.add_argument("--hn", nargs=2, type=float, metavar=("X2", "P2"), help="also run the Hlawatsch-Nuttall identity at z2")
    p.add_argument("--fourier", action="store_true", help="also run the symplectic Fourier self-map check")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("scan", parents=[common], help="nodal scan: sign changes, circles, boundedness radius")
    p.add_argument("--state", required=True)
    p.add_argument("--grid-csv", default=None, help="also write the value grid as x,p,value CSV")
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("zeros", parents=[common], help="zeros of L_n^(alpha) with exact brackets")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=int, default=0)
    p.set_defaults(func=_cmd_zeros)

    p = sub.add_parser("certify", parents=[common], help="exact integer certificate for a proposition")
    p.add_argument("--prop", choices=PROPOSITIONS, required=True)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--mmax", type=int, required=True)
    p.add_argument("--kmax", type=int, default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("inverse", parents=[common], help="states vanishing on prescribed centered circles")
    p.add_argument("--radius", type=float, action="append")
    p.add_argument("--radius-sq-over-hbar", type=float, action="append", help="R^2/hbar of a circle")
    p.add_argument("--s", type=float, action="append", help="2 R^2/hbar of a circle")
    p.add_argument("--sigma", type=int, choices=(-1, 1), required=True)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--starts", type=int, default=64)
    p.set_defaults(func=_cmd_inverse)

    p = sub.add_parser("bounds", parents=[common], help="sign-uncertainty, rank and parity calculators")
    p.add_argument("--sign-up", type=int, default=None, metavar="DIM")
    p.add_argument("--rank", type=float, default=None, metavar="RADIUS")
    p.add_argument("--parity", default=None, metavar="P", help="rational p = 2R^2/hbar, e.g. 3 or 3/2")
    p.add_argument("--state", default=None, help="measure this state's negative region")
    p.set_defaults(func=_cmd_bounds)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        cfg = RunConfig(args.hbar, args.tol, args.grid_size, args.grid_radius, args.out, args.format, args.seed, args.timing)
        return args.func(args, cfg)
    except UsageError as exc:
        sys.stderr.write(f"wigzero: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
