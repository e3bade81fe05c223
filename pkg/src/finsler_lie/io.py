"""JSON formats for algebras and norms, builtin pseudo-paths, CLI vector parsing.

File indices are 1-based; everything in memory is 0-based.  Complex numbers are
written as ``{"re": x, "im": y}``; Python's float repr is the shortest string
that round-trips, so serialization is lossless.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from urllib.parse import parse_qsl

import numpy as np

from . import algebra as alg_mod
from . import norm as norm_mod
from .algebra import ComplexifiedAlgebra, RealLieAlgebra
from .errors import InputError, ParameterError

BUILTIN_PREFIX = "builtin:"
NORM_PARAMS = frozenset({"epsilon", "p", "diag"})


@dataclass(frozen=True)
class Source:
    """Raw text of an input plus where it came from."""

    name: str
    text: str

    @property
    def sha256(self):
        return hashlib.sha256(self.text.encode()).hexdigest()

    @property
    def is_builtin(self):
        return self.name.startswith(BUILTIN_PREFIX)

    def digest(self):
        return {"source": self.name, "sha256": self.sha256}


def read_source(path) -> Source:
    path = str(path)
    if path.startswith(BUILTIN_PREFIX):
        return Source(path, path)
    try:
        return Source(path, Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc


def parse_builtin(spec):
    """``builtin:ch2?beta=1&gamma=2`` -> ``("ch2", {"beta": 1.0, "gamma": 2.0})``."""
    body = spec[len(BUILTIN_PREFIX):] if spec.startswith(BUILTIN_PREFIX) else spec
    name, _, query = body.partition("?")
    params = {}
    for key, val in parse_qsl(query, keep_blank_values=True, strict_parsing=bool(query)):
        params[key] = _param_value(key, val)
    return name.strip(), params


def _param_value(key, val):
    if key == "diag":
        return [float(t) for t in val.split(",")]
    try:
        num = float(val)
    except ValueError as exc:
        raise InputError(f"parameter {key}={val!r} is not a number") from exc
    if key in ("n", "p", "broken"):
        if num != int(num):
            raise ParameterError(f"parameter {key} must be an integer, got {val}")
        return int(num)
    return num


def format_builtin(name, params):
    if not params:
        return f"{BUILTIN_PREFIX}{name}"
    q = "&".join(f"{k}={','.join(map(repr, v)) if isinstance(v, list) else v}" for k, v in params.items())
    return f"{BUILTIN_PREFIX}{name}?{q}"


# --------------------------------------------------------------------------
# JSON helpers
# --------------------------------------------------------------------------


def loads(src: Source):
    try:
        return json.loads(src.text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{src.name}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
                         position=(exc.lineno, exc.colno)) from exc


def cjson(z):
    z = complex(z)
    return {"re": z.real + 0.0, "im": z.imag + 0.0}


def parse_complex(obj, where):
    if isinstance(obj, bool):
        raise InputError(f"{where}: expected a number, got {obj!r}", position=where)
    if isinstance(obj, (int, float)):
        z = complex(obj)
    elif isinstance(obj, dict) and "re" in obj:
        try:
            z = complex(float(obj["re"]), float(obj.get("im", 0.0)))
        except (TypeError, ValueError) as exc:
            raise InputError(f"{where}: bad complex number {obj!r}", position=where) from exc
    else:
        raise InputError(f"{where}: expected a number or {{'re','im'}}, got {obj!r}", position=where)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InputError(f"{where}: non-finite value", position=where)
    return z


def _index(entry, key, n, where):
    if key not in entry:
        raise InputError(f"{where}: missing index {key!r}", position=where)
    val = entry[key]
    if isinstance(val, bool) or not isinstance(val, int) or not 1 <= val <= n:
        raise InputError(f"{where}: index {key}={val!r} outside 1..{n}", position=where)
    return val - 1


def _require(d, key, where):
    if not isinstance(d, dict) or key not in d:
        raise InputError(f"{where}: missing field {key!r}", position=where)
    return d[key]


def jsonable(obj):
    """Convert numpy scalars/arrays (complex included) into plain JSON values."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return cjson(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else repr(f)
    return obj


# --------------------------------------------------------------------------
# algebras
# --------------------------------------------------------------------------


def complex_algebra_to_json(alg: ComplexifiedAlgebra):
    def rows(entries, keep):
        out = []
        for (i, j, k), val in sorted(entries):
            if keep(j, k):
                out.append({"i": i + 1, "j": j + 1, "k": k + 1, **cjson(val)})
        return out

    return {
        "n": alg.n,
        "name": alg.name,
        "lambda_hol": rows(alg.hol_entries, lambda j, k: j < k),
        "lambda_mixed_hol": rows(alg.mixed_hol_entries, lambda j, k: True),
        "lambda_mixed_anti": rows(alg.mixed_anti_entries, lambda j, k: True),
    }


def complex_algebra_from_json(d, origin="algebra"):
    n = _require(d, "n", origin)
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise InputError(f"{origin}.n: expected a positive integer, got {n!r}", position=f"{origin}.n")
    blocks = {}
    for key in ("lambda_hol", "lambda_mixed_hol", "lambda_mixed_anti"):
        arr = np.zeros((n, n, n), complex)
        entries = d.get(key, [])
        if not isinstance(entries, list):
            raise InputError(f"{origin}.{key}: expected a list", position=f"{origin}.{key}")
        for pos, e in enumerate(entries):
            where = f"{origin}.{key}[{pos}]"
            if not isinstance(e, dict):
                raise InputError(f"{where}: expected an object", position=where)
            i, j, k = (_index(e, t, n, where) for t in "ijk")
            val = parse_complex(e, where)
            if key == "lambda_hol":
                if j >= k:
                    raise InputError(f"{where}: lambda_hol entries need j < k (got j={j + 1}, k={k + 1})",
                                     position=where)
                arr[i, j, k] += val
                arr[i, k, j] -= val
            else:
                arr[i, j, k] += val
        blocks[key] = arr
    return ComplexifiedAlgebra.from_dense(
        blocks["lambda_hol"], blocks["lambda_mixed_hol"], blocks["lambda_mixed_anti"], d.get("name", "")
    )


@dataclass(frozen=True)
class RealInput:
    algebra: RealLieAlgebra
    I: np.ndarray | None
    weights: list | None = None
    basis: list | None = None


def real_algebra_to_json(alg: RealLieAlgebra, I=None, weights=None, basis=None):
    d = {
        "dim": alg.dim,
        "name": alg.name,
        "c": [{"k": k + 1, "i": i + 1, "j": j + 1, "val": float(v)} for (k, i, j), v in sorted(alg.entries)],
    }
    if I is not None:
        d["I"] = np.asarray(I, dtype=float).tolist()
    if weights is not None:
        d["weights"] = [float(w) for w in weights]
    if basis is not None:
        d["basis"] = [int(b) + 1 for b in basis]
    return d


def real_algebra_from_json(d, origin="algebra") -> RealInput:
    dim = _require(d, "dim", origin)
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise InputError(f"{origin}.dim: expected a positive integer, got {dim!r}", position=f"{origin}.dim")
    c = np.zeros((dim, dim, dim))
    entries = d.get("c", [])
    if not isinstance(entries, list):
        raise InputError(f"{origin}.c: expected a list", position=f"{origin}.c")
    for pos, e in enumerate(entries):
        where = f"{origin}.c[{pos}]"
        if not isinstance(e, dict):
            raise InputError(f"{where}: expected an object", position=where)
        k, i, j = (_index(e, t, dim, where) for t in "kij")
        val = parse_complex(_require(e, "val", where), where)
        if val.imag:
            raise InputError(f"{where}: real structure constants must be real", position=where)
        c[k, i, j] += val.real
    I = None
    if "I" in d:
        I = _real_matrix(d["I"], dim, f"{origin}.I")
    weights = d.get("weights")
    if weights is not None:
        weights = [parse_complex(w, f"{origin}.weights[{p}]").real for p, w in enumerate(weights)]
    basis = d.get("basis")
    if basis is not None:
        if not all(isinstance(b, int) and 1 <= b <= dim for b in basis):
            raise InputError(f"{origin}.basis: indices must lie in 1..{dim}", position=f"{origin}.basis")
        basis = [b - 1 for b in basis]
    return RealInput(RealLieAlgebra.from_dense(c, d.get("name", "")), I, weights, basis)


def _real_matrix(obj, dim, where):
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{where}: expected a {dim}x{dim} real matrix", position=where) from exc
    if arr.shape != (dim, dim) or not np.all(np.isfinite(arr)):
        raise InputError(f"{where}: expected a finite {dim}x{dim} real matrix, got shape {arr.shape}",
                         position=where)
    return arr


def _unwrap_report(d):
    """A CLI report carrying ``result.algebra`` is accepted wherever an algebra is."""
    if isinstance(d, dict) and "result" in d and isinstance(d["result"], dict) and "algebra" in d["result"]:
        return d["result"]["algebra"]
    return d


def load_algebra(path):
    """Return ``(algebra, source)`` where algebra is complexified or a :class:`RealInput`."""
    src = read_source(path)
    if src.is_builtin:
        name, params = parse_builtin(src.name)
        return alg_mod.builtin(name, **params), src
    d = _unwrap_report(loads(src))
    if not isinstance(d, dict):
        raise InputError(f"{src.name}: top level must be an object", position="$")
    if "n" in d:
        return complex_algebra_from_json(d, "$"), src
    if "dim" in d:
        return real_algebra_from_json(d, "$"), src
    raise InputError(f"{src.name}: neither a complex ('n') nor a real ('dim') algebra", position="$")


def load_complex_algebra(path):
    alg, src = load_algebra(path)
    if isinstance(alg, RealInput):
        raise InputError(f"{src.name}: expected a complexified algebra (field 'n'); "
                         "run `complexify` on real algebras first", position="$")
    return alg, src


def load_real_algebra(path):
    src = read_source(path)
    if src.is_builtin:
        name, params = parse_builtin(src.name)
        alg, I, kw = alg_mod.builtin_real(name, **params)
        return RealInput(alg, I, kw.get("weights"), kw.get("basis")), src
    d = loads(src)
    if not isinstance(d, dict) or "dim" not in d:
        raise InputError(f"{src.name}: expected a real algebra with fields 'dim', 'c', 'I'", position="$")
    return real_algebra_from_json(d, "$"), src


# --------------------------------------------------------------------------
# norms
# --------------------------------------------------------------------------


def _complex_matrix(obj, where):
    if not isinstance(obj, list) or not all(isinstance(r, list) for r in obj):
        raise InputError(f"{where}: expected a list of rows", position=where)
    rows = [[parse_complex(x, f"{where}[{a}][{b}]") for b, x in enumerate(r)] for a, r in enumerate(obj)]
    if len({len(r) for r in rows}) > 1:
        raise InputError(f"{where}: rows have different lengths", position=where)
    return np.asarray(rows, dtype=complex)


def norm_to_json(nm):
    d = {"kind": nm.kind}
    if nm.kind in ("hermitian", "perturbed_hermitian"):
        d["h"] = [[cjson(z) for z in row] for row in np.asarray(nm.h)]
    if nm.kind == "perturbed_hermitian":
        d["epsilon"] = float(nm.epsilon)
        d["p"] = int(nm.p)
    return d


def norm_from_json(d, n=None, origin="norm"):
    kind = _require(d, "kind", origin)
    if kind not in ("hermitian", "perturbed_hermitian"):
        raise InputError(f"{origin}.kind: unknown norm kind {kind!r}", position=f"{origin}.kind")
    h = _complex_matrix(_require(d, "h", origin), f"{origin}.h")
    if n is not None and h.shape != (n, n):
        raise InputError(f"{origin}.h: shape {h.shape} does not match algebra dimension {n}",
                         position=f"{origin}.h")
    if kind == "hermitian":
        return norm_mod.HermitianNorm(h)
    eps = parse_complex(d.get("epsilon", 0.1), f"{origin}.epsilon").real
    p = d.get("p", 2)
    return norm_mod.PerturbedHermitianNorm(h, eps, p)


def load_norm(path, n):
    src = read_source(path)
    if src.is_builtin:
        name, params = parse_builtin(src.name)
        return norm_mod.builtin(name, n, **params), src
    d = loads(src)
    if not isinstance(d, dict):
        raise InputError(f"{src.name}: top level must be an object", position="$")
    return norm_from_json(d, n, "$"), src


# --------------------------------------------------------------------------
# CLI vectors and grids
# --------------------------------------------------------------------------


def parse_vector(text, n=None):
    """``"1:0,0:0.5"`` (re:im pairs) or the real shorthand ``"1,0"``."""
    parts = [p.strip() for p in str(text).split(",")]
    out = []
    for pos, part in enumerate(parts):
        re_s, sep, im_s = part.partition(":")
        try:
            out.append(complex(float(re_s), float(im_s) if sep else 0.0))
        except ValueError as exc:
            raise InputError(f"vector component {pos + 1} ({part!r}) is not 're' or 're:im'",
                             position=pos + 1) from exc
    v = np.asarray(out, dtype=complex)
    if not np.all(np.isfinite(v)):
        raise InputError("vector has non-finite components")
    if n is not None and v.size != n:
        raise InputError(f"vector has {v.size} components, algebra dimension is {n}")
    return v


def parse_grid(specs):
    """``["beta=0.5,1,2", "gamma=1"]`` -> ordered list of parameter names and value lists."""
    grid = []
    for spec in specs:
        for chunk in filter(None, (s.strip() for s in spec.split(";"))):
            key, sep, vals = chunk.partition("=")
            key = key.strip()
            if not sep or not key or not vals.strip():
                raise InputError(f"grid entry {chunk!r} is not 'name=v1,v2,...'")
            if key in dict(grid):
                raise InputError(f"grid parameter {key!r} given twice")
            grid.append((key, [_param_value(key, v.strip()) for v in vals.split(",")]))
    if not grid:
        raise InputError("grid is empty")
    return grid
