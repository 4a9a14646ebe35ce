"""Matrix files, problem files and deterministic JSON.

Matrices: Matrix Market array format (``.mtx``) or comma separated rows
(``.csv``), chosen by extension.  Both writers emit 17 significant digits,
which round-trips every double exactly.

Problem files are INI-style::

    [problem]
    a = A.csv
    b = b.csv            ; optional, needed by ``solve``

    [splitting:jacobi]
    u = U_jacobi.csv
    a = A_other.csv      ; optional, overrides [problem] a for this splitting

    [multisplitting:two_blocks]
    parts = U1.csv:E1.csv, U2.csv:E2.csv

    [tolerances]          ; optional, any ToleranceConfig field
    sign_tol = 1e-12

    [solver]              ; optional, any SolveConfig field
    max_iters = 5000

The optional per-splitting ``a`` lets two systems with different
coefficient matrices share one file.  Relative paths are resolved against the problem file's directory.  A weight
file may hold the full ``n x n`` diagonal matrix or just its diagonal.
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np
import scipy.io

from .errors import SpecError
from .linalg import ToleranceConfig
from .solver import SolveConfig

__all__ = [
    "read_matrix",
    "write_matrix",
    "read_weight",
    "ProblemSpec",
    "load_spec",
    "dumps",
]

FORMATS = (".mtx", ".csv")


def _ext(path):
    ext = Path(path).suffix.lower()
    if ext not in FORMATS:
        raise SpecError(f"{path}: unsupported extension {ext!r}; use .mtx or .csv")
    return ext


def read_matrix(path):
    path = Path(path)
    ext = _ext(path)
    if not path.is_file():
        raise SpecError(f"{path}: no such file")
    try:
        if ext == ".mtx":
            data = scipy.io.mmread(str(path))
            data = data.toarray() if hasattr(data, "toarray") else np.asarray(data)
        else:
            data = np.loadtxt(path, delimiter=",", ndmin=2, dtype=float)
    except (ValueError, OSError) as exc:
        raise SpecError(f"{path}: {exc}") from None
    data = np.asarray(data, dtype=float)
    if data.ndim != 2 or data.size == 0:
        raise SpecError(f"{path}: expected a nonempty 2-D matrix")
    if not np.all(np.isfinite(data)):
        raise SpecError(f"{path}: non-finite entries")
    return data


def write_matrix(path, a):
    path = Path(path)
    ext = _ext(path)
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if ext == ".mtx":
        scipy.io.mmwrite(str(path), a, precision=17, symmetry="general")
    else:
        np.savetxt(path, a, fmt="%.17g", delimiter=",")


def read_weight(path, n):
    """Weight matrix from a file holding either ``diag(E)`` or ``E`` itself."""
    e = read_matrix(path)
    if e.shape == (n, n):
        return e
    if e.size == n and 1 in e.shape:
        return np.diag(e.ravel())
    raise SpecError(f"{path}: weight must be {n} x {n} or a vector of length {n}, got {e.shape}")


@dataclass
class ProblemSpec:
    source: Path
    a_path: str
    b_path: str | None = None
    splittings: dict = field(default_factory=dict)
    multisplittings: dict = field(default_factory=dict)
    tolerances: ToleranceConfig = field(default_factory=ToleranceConfig)
    solver: SolveConfig = field(default_factory=SolveConfig)
    overrides: dict = field(default_factory=dict)

    def resolve(self, rel):
        return (self.source.parent / rel).resolve()

    def echo(self):
        """Paths as written in the file, for reports."""
        return {
            "a": self.a_path,
            "b": self.b_path,
            "splittings": {k: dict(v) for k, v in self.splittings.items()},
            "multisplittings": {
                k: [{"u": u, "e": e} for u, e in parts] for k, parts in self.multisplittings.items()
            },
            "overrides": dict(self.overrides),
        }


def _coerce(cls, section, items):
    kinds = {f.name: f.type for f in fields(cls)}
    out = {}
    for key, raw in items:
        if key not in kinds:
            raise SpecError(f"[{section}]: unknown key {key!r}; known: {sorted(kinds)}")
        kind = str(kinds[key])
        try:
            if "bool" in kind:
                out[key] = raw.strip().lower() in ("1", "true", "yes", "on")
            elif "int" in kind:
                out[key] = int(raw)
            else:
                out[key] = float(raw)
        except ValueError:
            raise SpecError(f"[{section}] {key}: cannot parse {raw!r}") from None
    try:
        return cls(**out), out
    except ValueError as exc:
        raise SpecError(f"[{section}]: {exc}") from None


def load_spec(path) -> ProblemSpec:
    path = Path(path)
    if not path.is_file():
        raise SpecError(f"{path}: no such problem file")
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise SpecError(f"{path}: {exc}") from None

    if not cp.has_section("problem") or not cp.has_option("problem", "a"):
        raise SpecError(f"{path}: missing [problem] a = <matrix file>")
    spec = ProblemSpec(source=path, a_path=cp.get("problem", "a"))
    if cp.has_option("problem", "b"):
        spec.b_path = cp.get("problem", "b")

    seen = set()
    for section in cp.sections():
        kind, _, name = section.partition(":")
        kind, name = kind.strip(), name.strip()
        if kind in ("problem", "tolerances", "solver") and not name:
            continue
        if kind not in ("splitting", "multisplitting") or not name:
            raise SpecError(f"{path}: unknown section [{section}]")
        if name in seen:
            raise SpecError(f"{path}: duplicate name {name!r}")
        seen.add(name)
        if kind == "splitting":
            if not cp.has_option(section, "u"):
                raise SpecError(f"[{section}]: missing u = <matrix file>")
            entry = {"u": cp.get(section, "u")}
            if cp.has_option(section, "a"):
                entry["a"] = cp.get(section, "a")
            extra = set(cp.options(section)) - {"u", "a"}
            if extra:
                raise SpecError(f"[{section}]: unknown keys {sorted(extra)}")
            spec.splittings[name] = entry
        else:
            if not cp.has_option(section, "parts"):
                raise SpecError(f"[{section}]: missing parts = U.csv:E.csv, ...")
            parts = []
            for item in cp.get(section, "parts").split(","):
                u, sep, e = item.strip().partition(":")
                if not sep or not u.strip() or not e.strip():
                    raise SpecError(f"[{section}]: part {item.strip()!r} is not U_FILE:E_FILE")
                parts.append((u.strip(), e.strip()))
            spec.multisplittings[name] = parts

    if cp.has_section("tolerances"):
        spec.tolerances, raw = _coerce(ToleranceConfig, "tolerances", cp.items("tolerances"))
        spec.overrides.update({f"tolerances.{k}": v for k, v in raw.items()})
    if cp.has_section("solver"):
        spec.solver, raw = _coerce(SolveConfig, "solver", cp.items("solver"))
        spec.overrides.update({f"solver.{k}": v for k, v in raw.items()})
    return spec


def _num(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        return "null"
    text = "%.17g" % x
    if not any(ch in text for ch in ".en"):
        text += ".0"
    return text


def _render(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_, int, float, np.integer, np.floating)):
        return _num(obj)
    if isinstance(obj, str):
        import json

        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        return _render(obj.tolist(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{pad}{_render(str(k), indent, level + 1)}: {_render(obj[k], indent, level + 1)}"
            for k in sorted(obj, key=str)
        ]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_render(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _render(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=2):
    """JSON text with sorted keys and floats printed as ``%.17g``."""
    return _render(obj, indent, 0) + "\n"
