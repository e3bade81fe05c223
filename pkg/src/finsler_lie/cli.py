"""Command-line front end: ``finsler-lie <command> ...``.

Exit codes: 0 ok, 1 theorem check failed, 2 parse/input error, 3 validation
failure, 4 non-integrable almost complex structure, 5 v = 0, 6 algebra not of
complex-group type, 7 numerical failure (pseudoconvexity, derivatives).
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import itertools
import json
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from . import algebra as alg_mod
from . import io as fio
from .classify import ClassifyConfig, classify, sample_directions, verify_complex_group_theorems
from .connection import check_operator_identity, linear_system_residual
from .curvature import curvature_block, curvature_operator_free
from .errors import (
    ClosureError,
    DomainError,
    FinslerLieError,
    InputError,
    IntegrabilityError,
    NumericalDerivativeError,
    ParameterError,
    PreconditionError,
    StronglyPseudoconvexViolation,
    ValidationError,
)
from .norm import TOL_JET, DiffConfig, euler_residuals
from .norm import builtin as norm_builtin

log = logging.getLogger("finsler_lie")

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_INVALID, EXIT_NIJENHUIS, EXIT_DOMAIN, EXIT_PRECONDITION, EXIT_NUMERIC = range(8)

_EXIT_FOR = (
    (InputError, EXIT_PARSE),
    (ParameterError, EXIT_PARSE),
    (ValidationError, EXIT_INVALID),
    (IntegrabilityError, EXIT_NIJENHUIS),
    (ClosureError, EXIT_NIJENHUIS),
    (DomainError, EXIT_DOMAIN),
    (PreconditionError, EXIT_PRECONDITION),
    (StronglyPseudoconvexViolation, EXIT_NUMERIC),
    (NumericalDerivativeError, EXIT_NUMERIC),
)


def exit_code_for(exc):
    for cls, code in _EXIT_FOR:
        if isinstance(exc, cls):
            return code
    return EXIT_NUMERIC


@dataclass(frozen=True)
class RunConfig:
    tol_structural: float = alg_mod.TOL_STRUCTURAL
    tol_jet: float = TOL_JET["dual"]
    tol_cls: float = 1e-7
    diff: str = "dual"
    fd_step: float | None = None
    samples: int = 16
    seed: int = 0
    format: str = "json"
    jobs: int = 1

    def __post_init__(self):
        if min(self.tol_structural, self.tol_jet, self.tol_cls) <= 0:
            raise ParameterError("tolerances must be positive")
        if self.samples < 1:
            raise ParameterError("--samples must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ParameterError("--seed must be a 64-bit unsigned integer")
        if self.jobs < 1:
            raise ParameterError("--jobs must be >= 1")

    @property
    def diff_config(self):
        return DiffConfig(self.diff, self.fd_step)

    @property
    def classify_config(self):
        return ClassifyConfig(self.tol_cls, self.samples, self.seed, self.diff_config)


class Report:
    """Command echo, input digests, result payload, residual table; duration kept apart."""

    def __init__(self, command, argv, config):
        self.payload = {
            "command": command,
            "argv": list(argv),
            "version": __version__,
            "config": asdict(config),
            "inputs": {},
            "result": None,
            "residuals": {},
            "error": None,
            "exit_code": EXIT_OK,
        }
        self._t0 = time.perf_counter()
        self.duration = None

    def add_input(self, role, src):
        self.payload["inputs"][role] = src.digest()

    def fail(self, exc):
        code = exit_code_for(exc)
        err = {"kind": getattr(exc, "kind", type(exc).__name__), "type": type(exc).__name__, "message": str(exc)}
        for attr in ("position", "worst_pair", "max_entry", "min_eigenvalue", "diagnostics"):
            val = getattr(exc, attr, None)
            if val is not None:
                err[attr] = val
        report = getattr(exc, "report", None)
        if report is not None:
            err["report"] = report.to_dict() if hasattr(report, "to_dict") else report
        self.payload["error"] = err
        self.payload["exit_code"] = code
        return code

    def finish(self):
        self.duration = time.perf_counter() - self._t0
        return self

    def to_json(self, include_duration=True):
        d = fio.jsonable(self.payload)
        if include_duration and self.duration is not None:
            d["duration_s"] = self.duration
        return json.dumps(d, indent=2)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def cmd_validate(args, cfg, rep):
    alg, src = fio.load_algebra(args.algebra)
    rep.add_input("algebra", src)
    if isinstance(alg, fio.RealInput):
        vr = alg_mod.validate_real(alg.algebra)
        result = {"type": "real", "dim": alg.algebra.dim, "validation": vr.to_dict()}
        if alg.I is not None:
            i2 = float(np.max(np.abs(alg.I @ alg.I + np.eye(alg.algebra.dim))))
            result["I_squared_residual"] = i2
            if i2 < cfg.tol_structural and vr.passed:
                nj = alg_mod.nijenhuis(alg.algebra, alg.I)
                result["nijenhuis_max"] = nj.max_entry
                result["integrable"] = nj.integrable
        rep.payload["residuals"] = {"antisymmetry": vr.antisymmetry, "jacobi": vr.jacobi}
        failed = vr.failures() + (["I_squared"] if result.get("I_squared_residual", 0.0) >= cfg.tol_structural else [])
    else:
        vr = alg_mod.validate_complex(alg)
        result = {"type": "complex", "n": alg.n, "name": alg.name, "validation": vr.to_dict()}
        ok, mag = alg_mod.is_complex_group_type(alg)
        result["is_complex_group_type"] = ok
        result["is_abelian"] = alg.is_abelian
        rep.payload["residuals"] = {"antisymmetry": vr.antisymmetry, "jacobi": vr.jacobi,
                                    "conjugation": vr.conjugation, "max_mixed": mag}
        failed = vr.failures()
    rep.payload["result"] = result
    if failed:
        raise ValidationError(f"validation failed: {', '.join(failed)}", vr)
    return EXIT_OK


def cmd_complexify(args, cfg, rep):
    real, src = fio.load_real_algebra(args.algebra)
    rep.add_input("algebra", src)
    if real.I is None:
        raise InputError(f"{src.name}: real algebra file has no almost complex structure 'I'", position="$.I")
    vr = alg_mod.validate_real(real.algebra)
    if not vr.passed:
        raise ValidationError(f"real algebra invalid: {', '.join(vr.failures())}", vr)
    try:
        out = alg_mod.complexify(real.algebra, real.I, weights=real.weights, basis=real.basis,
                                 name=real.algebra.name)
    except IntegrabilityError as exc:
        i, j = exc.worst_pair
        exc.worst_pair = [i + 1, j + 1]
        raise
    check = alg_mod.validate_complex(out)
    rep.payload["result"] = {"algebra": fio.complex_algebra_to_json(out),
                             "is_complex_group_type": alg_mod.is_complex_group_type(out)[0]}
    rep.payload["residuals"] = {
        "nijenhuis_max": alg_mod.nijenhuis(real.algebra, real.I).max_entry,
        "jacobi": check.jacobi,
        "conjugation": check.conjugation,
    }
    return EXIT_OK


def _load_pair(args, rep):
    alg, asrc = fio.load_complex_algebra(args.algebra)
    nm, nsrc = fio.load_norm(args.norm, alg.n)
    rep.add_input("algebra", asrc)
    rep.add_input("norm", nsrc)
    return alg, nm


def cmd_curvature(args, cfg, rep):
    alg, nm = _load_pair(args, rep)
    v = fio.parse_vector(args.v, alg.n)
    w = fio.parse_vector(args.w, alg.n) if args.w is not None else None
    dc = cfg.diff_config
    cd = curvature_block(alg, nm, v, dc)
    probe = w if w is not None else v
    if not np.any(probe):
        raise DomainError("bisectional curvature needs w != 0")
    free = curvature_operator_free(alg, nm, v, probe, dc)
    result = {
        "algebra": alg.name,
        "v": v,
        "K": cd.sectional(),
        "N": cd.N,
        "R_block": cd.R_block,
        "R_block_layout": "R_block[i][k][j] = R^i_{k jbar}",
    }
    residuals = {
        "operator_index_agreement": float(np.max(np.abs(free - cd.operator(probe)))),
        "sectional_imaginary_residue": abs(float(cd.bisectional_complex(v).imag)),
        "linear_system": linear_system_residual(alg, cd.jet, cd.N),
        "operator_identity": check_operator_identity(alg, cd.jet, probes=8, seed=cfg.seed),
        "euler": list(euler_residuals(cd.jet)),
    }
    if w is not None:
        b = cd.bisectional_complex(w)
        result["w"] = w
        result["B"] = float(b.real)
        residuals["bisectional_imaginary_residue"] = abs(float(b.imag))
    rep.payload["result"] = result
    rep.payload["residuals"] = residuals
    return EXIT_OK


def cmd_classify(args, cfg, rep):
    alg, nm = _load_pair(args, rep)
    r = classify(alg, nm, cfg.classify_config)
    d = r.to_dict()
    rep.payload["result"] = {"algebra": alg.name, "norm": nm.kind, "classification": d}
    rep.payload["residuals"] = {k: d[k] for k in ("kahler_residual", "weakly_kahler_residual",
                                                  "berwald_residual", "bisectional_max")}
    return EXIT_OK


def cmd_verify_theorems(args, cfg, rep):
    alg, nm = _load_pair(args, rep)
    t = verify_complex_group_theorems(alg, nm, cfg.classify_config)
    d = t.to_dict()
    rep.payload["result"] = {"algebra": alg.name, "norm": nm.kind, "theorems": d}
    rep.payload["residuals"] = {k: d[k] for k in ("gamma_max", "bisectional_max",
                                                  "torsion_vs_minus_half_lambda_residual",
                                                  "berwald_residual")}
    return EXIT_OK if t.passed else EXIT_FAIL


def _split_params(keys, norm_name):
    """Grid keys go to the norm template if they are norm parameters, otherwise to the algebra."""
    return {k: (k in fio.NORM_PARAMS and norm_name is not None) for k in keys}


def sweep_row(alg_spec, norm_spec, point, cfg):
    """One grid point: K range over sampled unit directions plus classification residuals."""
    row = {"params": dict(point)}
    try:
        a_name, a_par = fio.parse_builtin(alg_spec)
        n_name, n_par = fio.parse_builtin(norm_spec)
        to_norm = _split_params(point, n_name)
        a_par.update({k: v for k, v in point.items() if not to_norm[k]})
        n_par.update({k: v for k, v in point.items() if to_norm[k]})
        alg = alg_mod.builtin(a_name, **a_par)
        nm = norm_builtin(n_name, alg.n, **n_par)
        ks = [curvature_block(alg, nm, v, cfg.diff_config).sectional()
              for v in sample_directions(alg.n, cfg.samples, cfg.seed)]
        rep = classify(alg, nm, cfg.classify_config)
        row.update({
            "K_min": min(ks),
            "K_max": max(ks),
            "kahler_residual": rep.kahler_residual,
            "weakly_kahler_residual": rep.weakly_kahler_residual,
            "berwald_residual": rep.berwald_residual,
            "bisectional_max": rep.bisectional_max,
            "verdict_kahler": rep.verdict_kahler,
            "verdict_weakly_kahler": rep.verdict_weakly_kahler,
            "verdict_berwald": rep.verdict_berwald,
            "error": None,
        })
    except FinslerLieError as exc:
        row["error"] = {"kind": exc.kind, "type": type(exc).__name__, "message": str(exc)}
    return row


def cmd_sweep(args, cfg, rep):
    for spec in (args.algebra, args.norm):
        if not spec.startswith(fio.BUILTIN_PREFIX):
            raise InputError(f"sweep templates must be builtin pseudo-paths, got {spec!r}")
    rep.add_input("algebra", fio.read_source(args.algebra))
    rep.add_input("norm", fio.read_source(args.norm))
    grid = fio.parse_grid(args.grid)
    keys = [k for k, _ in grid]
    points = [dict(zip(keys, combo)) for combo in itertools.product(*(vals for _, vals in grid))]
    with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
        rows = list(pool.map(lambda p: sweep_row(args.algebra, args.norm, p, cfg), points))
    rep.payload["result"] = {"grid": dict(grid), "rows": rows}
    rep.payload["residuals"] = {"failed_rows": sum(r["error"] is not None for r in rows)}
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "complexify": cmd_complexify,
    "curvature": cmd_curvature,
    "classify": cmd_classify,
    "verify-theorems": cmd_verify_theorems,
    "sweep": cmd_sweep,
}


# --------------------------------------------------------------------------
# rendering
# --------------------------------------------------------------------------


def _flatten(obj, prefix=""):
    if isinstance(obj, dict) and set(obj) == {"re", "im"}:
        yield prefix, f"{obj['re']!r}{obj['im']:+}j"
    elif isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def render_csv(payload):
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    result = payload.get("result") or {}
    if payload["command"] == "sweep" and "rows" in result:
        flat = [dict(_flatten(r)) for r in result["rows"]]
        cols = list(dict.fromkeys(k for r in flat for k in r))
        w.writerow(cols)
        for r in flat:
            w.writerow([r.get(c, "") for c in cols])
    else:
        w.writerow(["key", "value"])
        for section in ("result", "residuals", "error"):
            for k, v in _flatten(payload.get(section) or {}, section):
                w.writerow([k, v])
    return buf.getvalue()


def render_markdown(payload, duration=None):
    lines = [f"# finsler-lie {payload['command']}", ""]
    for role, d in payload["inputs"].items():
        lines.append(f"- {role}: `{d['source']}` (sha256 `{d['sha256'][:16]}`)")
    lines.append(f"- exit code: {payload['exit_code']}")
    if duration is not None:
        lines.append(f"- duration: {duration:.3f} s")
    if payload.get("error"):
        lines += ["", "## Error", "", f"{payload['error']['type']}: {payload['error']['message']}"]
    if payload.get("residuals"):
        lines += ["", "## Residuals", "", "| name | value |", "|---|---|"]
        lines += [f"| {k} | {v} |" for k, v in _flatten(payload["residuals"])]
    if payload.get("result") is not None:
        lines += ["", "## Result", "", "| key | value |", "|---|---|"]
        lines += [f"| {k} | {v} |" for k, v in _flatten(payload["result"])]
    return "\n".join(lines) + "\n"


def render(report, fmt):
    if fmt == "json":
        return report.to_json() + "\n"
    payload = json.loads(report.to_json(include_duration=False))
    if fmt == "csv":
        return render_csv(payload)
    return render_markdown(payload, report.duration)


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-7, help="classification tolerance (default 1e-7)")
    common.add_argument("--diff", choices=("dual", "fd"), default="dual", help="differentiation engine")
    common.add_argument("--fd-step", type=float, default=None, help="fixed fd step (default: per-order optimum)")
    common.add_argument("--samples", type=int, default=16, help="quasi-random directions (default 16)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "md", "csv"), default="json")
    common.add_argument("--jobs", type=int, default=1, help="worker threads for sweep")
    common.add_argument("-o", "--output", default=None, help="write the report here instead of stdout")

    p = argparse.ArgumentParser(prog="finsler-lie", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="check antisymmetry, Jacobi, conjugation closure")
    s.add_argument("algebra", help="algebra JSON file or builtin:NAME?k=v")
    s = sub.add_parser("complexify", parents=[common], help="complexify a real algebra with its I")
    s.add_argument("algebra", help="real algebra JSON with 'I', or builtin:ch2 / su2_r?broken=1 ...")
    for name, text in (("curvature", "sectional / bisectional curvature at v"),
                       ("classify", "Kaehler / weakly-Kaehler / Berwald residuals"),
                       ("verify-theorems", "complex-Lie-group rigidity checks")):
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("algebra")
        s.add_argument("norm", help="norm JSON file or builtin:hermitian / builtin:perturbed?epsilon=0.1&p=2")
        if name == "curvature":
            s.add_argument("--v", required=True, help="direction, e.g. 1:0,0:0 or 1,0")
            s.add_argument("--w", default=None, help="second direction for B(v, w)")
    s = sub.add_parser("sweep", parents=[common], help="K range and residuals over a parameter grid")
    s.add_argument("algebra", help="builtin algebra template, e.g. builtin:ch2")
    s.add_argument("norm", help="builtin norm template, e.g. builtin:perturbed")
    s.add_argument("--grid", action="append", required=True, help="name=v1,v2,... (repeatable, or ';'-separated)")
    return p


def setup_logging():
    level = os.environ.get("FINSLER_LIE_LOG", "WARNING").strip().upper()
    level = int(level) if level.isdigit() else getattr(logging, level, logging.WARNING)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def main(argv=None):
    setup_logging()
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors already
        return int(exc.code or 0)
    try:
        cfg = RunConfig(
            tol_jet=TOL_JET[args.diff], tol_cls=args.tol, diff=args.diff, fd_step=args.fd_step,
            samples=args.samples, seed=args.seed, format=args.format, jobs=args.jobs,
        )
        DiffConfig(cfg.diff, cfg.fd_step)
    except ParameterError as exc:
        print(f"finsler-lie: error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    rep = Report(args.command, argv, cfg)
    try:
        code = COMMANDS[args.command](args, cfg, rep)
        rep.payload["exit_code"] = code
    except FinslerLieError as exc:
        code = rep.fail(exc)
        print(f"finsler-lie {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
    rep.finish()
    text = render(rep, cfg.format)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
