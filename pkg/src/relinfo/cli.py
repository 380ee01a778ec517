"""``relinfo`` command line: run scenario files, built-in scenarios and the property suite.

Exit codes: 0 when everything passes, 1 when an assertion or property fails
(or a scenario file is rejected), 2 for usage and I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from pathlib import Path
from typing import Sequence

from . import __version__, properties, sdl
from .facts import DEFAULT_TOL
from .scenarios import BUILTINS, ScenarioResult, run_builtin

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0 or v == float("inf"):
        raise argparse.ArgumentTypeError("tolerance must be a positive finite number")
    return v


def _samples(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 2:
        raise argparse.ArgumentTypeError("samples must be at least 2")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_positive_float, help="fact tolerance in bits")
    common.add_argument("--samples", type=_samples, help="number of samples in time sweeps")
    common.add_argument("--seed", type=_seed, help="seed for randomized suites (fallback: RELINFO_SEED)")
    common.add_argument("--out", type=Path, help="directory for report files")
    common.add_argument("--format", choices=("json", "csv", "both"),
                        help="report format (default: json; both for 'builtin appb')")

    p = argparse.ArgumentParser(prog="relinfo", description="Relative information and relative facts toolkit")
    p.add_argument("--version", action="version", version=f"relinfo {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", parents=[common], help="evaluate .sdl scenario files")
    run.add_argument("paths", nargs="+", type=Path)
    b = sub.add_parser("builtin", parents=[common], help="run a built-in scenario")
    b.add_argument("name", help=f"one of: {', '.join(BUILTINS)}")
    pr = sub.add_parser("props", parents=[common], help="run the randomized property suite")
    pr.add_argument("--trials", type=_samples, default=properties.DEFAULT_TRIALS)
    pr.add_argument("--replay", type=Path, help="re-check serialized fixtures instead of sampling")
    return p


# output ---------------------------------------------------------------------------


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class Emitter:
    """Sends report files to ``--out`` or, without it, report bodies to stdout."""

    def __init__(self, out: Path | None, fmt: str, stdout, stderr):
        self.out, self.fmt = out, fmt
        self.stdout, self.stderr = stdout, stderr

    @property
    def status(self):
        # status lines go to stdout when reports go to files, else to stderr
        return self.stdout if self.out is not None else self.stderr

    def emit(self, files: dict[str, str], kinds: dict[str, str]) -> None:
        for name, text in files.items():
            kind = kinds[name]
            if self.fmt != "both" and kind != self.fmt:
                continue
            if self.out is None:
                self.stdout.write(text)
            else:
                _write_atomic(self.out / name, text)


def _scenario_files(stem: str, res: ScenarioResult, command: str, extra: dict | None = None):
    doc = {"schema_version": SCHEMA_VERSION, "command": command, "version": __version__}
    doc.update(extra or {})
    doc["report"] = res.to_dict()
    files = {f"{stem}.json": _dumps(doc), f"{stem}_assertions.csv": res.assertions_csv()}
    kinds = {f"{stem}.json": "json", f"{stem}_assertions.csv": "csv"}
    for name, text in res.tables.items():
        files[f"{stem}_{name}"] = text
        kinds[f"{stem}_{name}"] = "csv"
    return files, kinds


def _summary(label: str, res: ScenarioResult) -> str:
    n = len(res.assertions)
    ok = n - len(res.failures)
    lines = [f"{'PASS' if res.passed else 'FAIL'} {label}: {ok}/{n} assertions"]
    for a in res.failures:
        lines.append(f"  failed: {a.description} (measured {a.measured}, tolerance {a.tolerance})")
    return "\n".join(lines) + "\n"


# commands ---------------------------------------------------------------------------------


def cmd_run(args, em: Emitter) -> int:
    code = EXIT_OK
    config = sdl.RunConfig(tol=args.tol, samples=args.samples)
    for path in args.paths:
        try:
            raw = path.read_bytes()
        except FileNotFoundError:
            em.stderr.write(f"{path}:1:1: error: file not found\n")
            code = max(code, EXIT_USAGE)
            continue
        except OSError as exc:
            em.stderr.write(f"{path}:1:1: error: cannot read file: {exc.strerror}\n")
            code = max(code, EXIT_USAGE)
            continue
        try:
            doc = sdl.parse(sdl.decode(raw))
            res = sdl.evaluate(doc, path.stem, config)
        except sdl.SdlError as exc:
            em.stderr.write(exc.format(str(path)) + "\n")
            code = max(code, EXIT_FAIL)
            continue
        files, kinds = _scenario_files(path.stem, res, "run", {"source": str(path)})
        em.emit(files, kinds)
        em.status.write(_summary(str(path), res))
        if not res.passed:
            code = max(code, EXIT_FAIL)
    return code


def cmd_builtin(args, em: Emitter) -> int:
    if args.name not in BUILTINS:
        em.stderr.write(f"relinfo: unknown builtin {args.name!r}; available: {', '.join(BUILTINS)}\n")
        return EXIT_USAGE
    res = run_builtin(args.name, args.tol if args.tol is not None else DEFAULT_TOL, args.samples or 1000)
    files, kinds = _scenario_files(args.name, res, "builtin")
    em.emit(files, kinds)
    em.status.write(_summary(args.name, res))
    return EXIT_OK if res.passed else EXIT_FAIL


def resolve_seed(arg: int | None, environ=os.environ) -> int:
    if arg is not None:
        return arg
    env = environ.get("RELINFO_SEED")
    if env is None or env == "":
        return properties.DEFAULT_SEED
    try:
        return _seed(env)
    except argparse.ArgumentTypeError as exc:
        raise UsageError(f"RELINFO_SEED: {exc}") from None


def _props_csv(report: properties.PropertyReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["property", "passed", "trials", "passed_trials"])
    for r in report.results:
        w.writerow([r.name, "true" if r.passed else "false", r.trials, r.passed_trials])
    return buf.getvalue()


def cmd_props(args, em: Emitter) -> int:
    if args.replay is not None:
        return _replay(args.replay, em)
    seed = resolve_seed(args.seed)
    report = properties.run_properties(seed=seed, trials=args.trials)
    doc = {"schema_version": SCHEMA_VERSION, "command": "props", "version": __version__, "report": report.to_dict()}
    files = {"props.json": _dumps(doc), "props.csv": _props_csv(report)}
    kinds = {"props.json": "json", "props.csv": "csv"}
    failures = [f for r in report.results for f in r.failures]
    if failures:
        files["props_failures.json"] = _dumps(failures)
        kinds["props_failures.json"] = "json"
    em.emit(files, kinds)
    em.status.write(f"seed {seed}, {args.trials} trials per property\n")
    em.status.write(report.text())
    if failures:
        where = em.out / "props_failures.json" if em.out is not None else "the JSON report"
        em.status.write(f"violating fixtures serialized to {where}; re-check with 'relinfo props --replay FILE'\n")
    return EXIT_OK if report.passed else EXIT_FAIL


def _replay(path: Path, em: Emitter) -> int:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        em.stderr.write(f"{path}:1:1: error: file not found\n")
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        em.stderr.write(f"{path}:1:1: error: cannot read fixture: {exc}\n")
        return EXIT_USAGE
    fixtures = data if isinstance(data, list) else [data]
    code = EXIT_OK
    for fx in fixtures:
        try:
            out = properties.replay(fx)
        except (KeyError, TypeError, ValueError) as exc:
            em.stderr.write(f"{path}:1:1: error: malformed fixture: {exc}\n")
            return EXIT_USAGE
        line = f"{'PASS' if out.passed else 'FAIL'} {fx['property']} trial {fx.get('trial')}: "
        line += json.dumps(properties.outcome_to_dict(out)["values"], sort_keys=True)
        em.stdout.write(line + "\n")
        if not out.passed:
            code = EXIT_FAIL
    return code


def main(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    fmt = args.format or ("both" if args.command == "builtin" and args.name == "appb" else "json")
    em = Emitter(args.out, fmt, stdout, stderr)
    try:
        if args.command == "run":
            return cmd_run(args, em)
        if args.command == "builtin":
            return cmd_builtin(args, em)
        return cmd_props(args, em)
    except UsageError as exc:
        stderr.write(f"relinfo: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        stderr.write(f"relinfo: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
