"""Command line front end: ``propersplit classify|solve|compare|induce``.

Exit codes
----------
0  success
2  unreadable or malformed input, bad arguments, unmet command preconditions
3  a declared splitting is not proper (projector residuals go to stderr)
4  the iteration did not converge, or ``I - H`` is not invertible
5  soundness alarm: theorem hypotheses hold but the conclusion fails, or an
   internal verification identity fails
6  a multisplitting violates the range condition (per-part residuals on stderr)
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .comparison import NEEDS_ALPHA, TheoremId, compare
from .errors import (
    BadWeights,
    DimensionMismatch,
    Diverging,
    MatrixMismatch,
    MissingAlpha,
    NonConvergence,
    NotProper,
    PreconditionFailed,
    RangeConditionFailed,
    SpecError,
    VerificationError,
    WeightMismatch,
)
from .fileio import dumps, load_spec, read_matrix, read_weight, write_matrix
from .multisplitting import (
    MultiComparison,
    compare_multisplittings,
    induced_splitting,
    make_multisplitting,
    range_residuals,
    verify_perea_lemma,
)
from .linalg import is_nonneg, spectral_radius
from .solver import solve_multi, solve_single
from .splitting import classify, is_semimonotone, make_splitting, verify_splitting_identities

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NOT_PROPER = 3
EXIT_NO_CONVERGENCE = 4
EXIT_ALARM = 5
EXIT_RANGE = 6

COMMANDS = ("classify", "solve", "compare", "induce")


class Exit(Exception):
    def __init__(self, code, message, detail=None):
        super().__init__(message)
        self.code = code
        self.detail = detail


class Problem:
    """Lazy loader for the matrices named in a problem file."""

    def __init__(self, spec):
        self.spec = spec
        self._cache = {}

    def matrix(self, rel):
        if rel not in self._cache:
            self._cache[rel] = read_matrix(self.spec.resolve(rel))
        return self._cache[rel]

    @property
    def a(self):
        return self.matrix(self.spec.a_path)

    def b(self):
        if self.spec.b_path is None:
            raise Exit(EXIT_PARSE, "solve needs [problem] b = <vector file>")
        b = self.matrix(self.spec.b_path)
        if 1 not in b.shape:
            raise Exit(EXIT_PARSE, f"b must be a vector, got shape {b.shape}")
        return b.reshape(-1, 1)

    def splitting(self, name):
        entry = self.spec.splittings[name]
        a = self.matrix(entry.get("a", self.spec.a_path))
        u = self.matrix(entry["u"])
        try:
            return make_splitting(a, u, self.spec.tolerances)
        except NotProper as exc:
            raise Exit(EXIT_NOT_PROPER, f"splitting {name!r}: {exc}", exc.residuals) from None
        except DimensionMismatch as exc:
            raise Exit(EXIT_PARSE, f"splitting {name!r}: {exc}") from None

    def multisplitting(self, name):
        a = self.a
        us, es = [], []
        for u_rel, e_rel in self.spec.multisplittings[name]:
            us.append(self.matrix(u_rel))
            es.append(read_weight(self.spec.resolve(e_rel), a.shape[1]))
        try:
            return make_multisplitting(a, us, es, self.spec.tolerances)
        except NotProper as exc:
            part = "" if exc.index is None else f" part {exc.index + 1}"
            raise Exit(EXIT_NOT_PROPER, f"multisplitting {name!r}{part}: {exc}", exc.residuals) from None
        except (BadWeights, DimensionMismatch) as exc:
            raise Exit(EXIT_PARSE, f"multisplitting {name!r}: {exc}") from None

    def kind(self, name):
        if name in self.spec.splittings:
            return "splitting"
        if name in self.spec.multisplittings:
            return "multisplitting"
        known = sorted(self.spec.splittings) + sorted(self.spec.multisplittings)
        raise Exit(EXIT_PARSE, f"unknown target {name!r}; known: {known}")


def _targets(problem, args, want, default_all):
    """Resolve ``--target`` names, defaulting to every declared object."""
    if args.target:
        names = list(args.target)
        for n in names:
            problem.kind(n)
        return names
    if default_all:
        return sorted(problem.spec.splittings) + sorted(problem.spec.multisplittings)
    names = sorted(problem.spec.splittings) + sorted(problem.spec.multisplittings)
    if len(names) == want:
        return names
    raise Exit(EXIT_PARSE, f"pass --target {want} time(s); the problem file declares {len(names)} objects")


def _identity_dict(rep):
    return {"residuals": rep.residuals, "passed": rep.passed, "min_abs_eig": rep.min_abs_eig, "ok": rep.ok}


def cmd_classify(problem, args):
    cfg = problem.spec.tolerances
    if not problem.spec.splittings and not problem.spec.multisplittings:
        raise Exit(EXIT_PARSE, "classify needs at least one splitting")
    out = {}
    for name in _targets(problem, args, 0, True):
        if problem.kind(name) == "splitting":
            s = problem.splitting(name)
            out[name] = {
                "kind": "splitting",
                "classification": classify(s, cfg).as_dict(),
                "identities": _identity_dict(verify_splitting_identities(s, cfg)),
                "semimonotone": is_semimonotone(s, cfg),
                "subspace_residuals": s.residuals,
            }
        else:
            ms = problem.multisplitting(name)
            try:
                rep = verify_perea_lemma(ms, cfg)
                weighted = {"residuals": rep.residuals, "passed": rep.passed, "ok": rep.ok}
            except PreconditionFailed:
                # identities are only claimed for weak regular parts
                weighted = None
            out[name] = {
                "kind": "multisplitting",
                "parts": [classify(s, cfg).as_dict() for s in ms.parts],
                "rho_h": spectral_radius(ms.h, cfg),
                "h_nonneg": is_nonneg(ms.h, cfg),
                "semimonotone": is_nonneg(ms.a_pinv, cfg),
                "range_residuals": range_residuals(ms),
                "weighted_identities": weighted,
            }
    return out, EXIT_OK


def cmd_solve(problem, args):
    names = _targets(problem, args, 1, False)
    if len(names) != 1:
        raise Exit(EXIT_PARSE, "solve needs exactly one target")
    name = names[0]
    cfg = problem.spec.solver
    if problem.kind(name) == "splitting":
        s = problem.splitting(name)
        rep = solve_single(s, problem.b(), cfg=cfg)
        scheme = "single"
        rho = s.rho(problem.spec.tolerances)
    else:
        ms = problem.multisplitting(name)
        rep = solve_multi(ms, problem.b(), cfg=cfg)
        scheme = "multi"
        rho = spectral_radius(ms.h, problem.spec.tolerances)
    out = {"target": name, "scheme": scheme, "rho": rho, "report": rep.as_dict()}
    return out, EXIT_OK if rep.converged else EXIT_NO_CONVERGENCE


def cmd_compare(problem, args):
    names = _targets(problem, args, 2, False)
    if len(names) != 2:
        raise Exit(EXIT_PARSE, f"compare needs exactly two targets, got {len(names)}")
    kinds = {problem.kind(n) for n in names}
    if len(kinds) != 1:
        raise Exit(EXIT_PARSE, "compare needs two splittings or two multisplittings")
    cfg = problem.spec.tolerances
    if args.theorem is None:
        raise Exit(EXIT_PARSE, "compare needs --theorem")
    try:
        if kinds == {"splitting"}:
            tid = TheoremId.parse(args.theorem)
            if tid in NEEDS_ALPHA and args.alpha is None:
                raise MissingAlpha(f"{tid.value} needs --alpha")
            s1, s2 = (problem.splitting(n) for n in names)
            verdict = compare(s1, s2, tid, args.alpha, cfg)
        else:
            mode = MultiComparison.parse(args.theorem)
            ms1, ms2 = (problem.multisplitting(n) for n in names)
            verdict = compare_multisplittings(ms1, ms2, mode, cfg)
    except (ValueError, MissingAlpha, MatrixMismatch, WeightMismatch) as exc:
        raise Exit(EXIT_PARSE, str(exc)) from None
    out = {"targets": names, "verdict": verdict.as_dict(), "sound": verdict.sound}
    return out, EXIT_OK if verdict.sound else EXIT_ALARM


def cmd_induce(problem, args):
    names = _targets(problem, args, 1, False)
    if len(names) != 1 or problem.kind(names[0]) != "multisplitting":
        raise Exit(EXIT_PARSE, "induce needs exactly one multisplitting target")
    name = names[0]
    ms = problem.multisplitting(name)
    cfg = problem.spec.tolerances
    try:
        ind = induced_splitting(ms, cfg)
    except RangeConditionFailed as exc:
        detail = {f"E_{k + 1}": r for k, r in enumerate(exc.residuals)}
        raise Exit(EXIT_RANGE, f"multisplitting {name!r}: {exc}", detail) from None
    except Diverging as exc:
        raise Exit(EXIT_NO_CONVERGENCE, f"multisplitting {name!r}: {exc}") from None
    except PreconditionFailed as exc:
        raise Exit(EXIT_PARSE, f"multisplitting {name!r}: {exc}") from None
    files = {}
    if args.out is not None:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        ext = Path(problem.spec.a_path).suffix.lower() or ".csv"
        for key, mat in (("b", ind.b), ("c", ind.c)):
            path = out_dir / f"{name}_{key.upper()}{ext}"
            write_matrix(path, mat)
            files[key] = path.name
    out = {
        "target": name,
        "b": np.asarray(ind.b).tolist(),
        "c": np.asarray(ind.c).tolist(),
        "files": files,
        "rho_h": ind.rho_h,
        "range_condition": ind.range_condition,
        "classification": ind.classification.as_dict(),
        "residuals": ind.residuals,
    }
    return out, EXIT_OK


HANDLERS = {"classify": cmd_classify, "solve": cmd_solve, "compare": cmd_compare, "induce": cmd_induce}


def build_parser():
    p = argparse.ArgumentParser(
        prog="propersplit",
        description="Proper splittings and multisplittings of rectangular systems.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--spec", required=True, help="problem file (INI format)")
    p.add_argument("--theorem", help="comparison theorem id, or BY_V / BY_UPINV for multisplittings")
    p.add_argument("--alpha", type=float, help="scaling constant for MAIN6, MAIN7 and MAIN8")
    p.add_argument("--target", action="append", help="splitting or multisplitting name; repeatable")
    p.add_argument("--out", help="directory for report.json and induced matrices")
    return p


def _emit(report, out_dir):
    text = dumps(report)
    if out_dir is None:
        sys.stdout.write(text)
    else:
        path = Path(out_dir)
        path.mkdir(parents=True, exist_ok=True)
        (path / "report.json").write_text(text, encoding="utf-8")


def run(argv=None):
    """Run the CLI and return the exit code instead of exiting."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_PARSE
    try:
        spec = load_spec(args.spec)
        problem = Problem(spec)
        results, code = HANDLERS[args.command](problem, args)
    except Exit as exc:
        print(f"propersplit: {exc}", file=sys.stderr)
        if exc.detail:
            for key in sorted(exc.detail):
                print(f"  {key}: {exc.detail[key]:.17g}", file=sys.stderr)
        return exc.code
    except SpecError as exc:
        print(f"propersplit: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except VerificationError as exc:
        print(f"propersplit: verification failed: {exc}", file=sys.stderr)
        return EXIT_ALARM
    except NonConvergence as exc:
        print(f"propersplit: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    report = {
        "command": args.command,
        "inputs": {"spec": Path(args.spec).name, **spec.echo()},
        "results": results,
        "version": __version__,
    }
    _emit(report, args.out)
    if code == EXIT_NO_CONVERGENCE:
        print("propersplit: iteration did not converge", file=sys.stderr)
    elif code == EXIT_ALARM:
        print("propersplit: soundness alarm, hypotheses hold but the conclusion fails", file=sys.stderr)
    return code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
