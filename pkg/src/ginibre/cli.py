"""Command-line front end.

Every verb prints one report, JSON (a single object) or CSV (header plus rows)::

    ginibre hole --n 2 --N 3 --r 1.0 --mc-samples 100000 --seed 7
    ginibre survival --n 1 --k 1 --r2 1.0
    ginibre validate theorem1 --n 2 --N 6 --draws 2000 --seed 11

Exit codes: 0 success, 2 usage error, 3 numerical-accuracy error,
4 statistical-validation failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import asdict, dataclass, field, replace
from typing import List, Optional

import numpy as np

from . import __version__
from .core import INF, AccuracyError, DomainError, EnsembleParams, GinibreError, LogProb, NonConvergenceError
from .ensemble import log_radial_density
from .hole import DEFAULT_TOL, hole_report
from .overcrowd import overcrowd_report
from .sampler import sample_eigen_moduli, sample_radii
from .special_fn import survival_asympt_log, survival_log
from .validation import PASS_LEVEL, validate_hole_asympt, validate_hole_mc, validate_theorem1

EXIT_OK, EXIT_USAGE, EXIT_ACCURACY, EXIT_STATISTICAL = 0, 2, 3, 4
VERBS = ("density", "survival", "hole", "overcrowd", "sample", "validate")
TARGETS = ("theorem1", "hole-mc", "hole-asympt")
UNDERFLOW_LOG = -700.0


class UsageError(GinibreError):
    def __init__(self, message: str, flag: str):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


@dataclass
class Command:
    verb: str
    params: EnsembleParams
    r: Optional[float] = None
    r2: Optional[float] = None
    k: Optional[int] = None
    m: Optional[int] = None
    grid: Optional[str] = None
    samples: Optional[int] = None
    seed: int = 0
    tol: float = DEFAULT_TOL
    format: str = "json"
    threads: int = 1
    target: Optional[str] = None
    draws: Optional[int] = None
    method: str = "radii"
    radii_n: Optional[int] = None

    def to_dict(self) -> dict:
        """Flat, fully resolved parameter set (``N`` is ``"inf"`` for the infinite ensemble)."""
        d = {"verb": self.verb, **self.params.to_dict()}
        d.update((k, v) for k, v in asdict(self).items() if k not in ("verb", "params"))
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Command":
        d = dict(d)
        params = EnsembleParams(d.pop("n"), parse_size(str(d.pop("N"))))
        return cls(params=params, **d)


def parse_size(text: str):
    if text.lower() in ("inf", "infinity", "infinite"):
        return INF
    return int(text)


def parse_grid(text: str) -> np.ndarray:
    """``"a:b:steps"`` -> ``steps`` evenly spaced points from ``a`` to ``b``."""
    try:
        a, b, steps = text.split(":")
        pts = np.linspace(float(a), float(b), int(steps))
    except ValueError:
        raise UsageError(f"expected a:b:steps, got {text!r}", "--grid") from None
    if pts.size < 1:
        raise UsageError("grid needs at least one step", "--grid")
    return pts


def _prob(lp: LogProb) -> dict:
    under = lp.log_value < UNDERFLOW_LOG
    return {
        "log_value": lp.log_value,
        "value": 0.0 if under else math.exp(lp.log_value),
        "underflow": under,
        "est_error": lp.est_error,
    }


def _need(value, flag: str):
    if value is None:
        raise UsageError("required for this verb", flag)
    return value


def _radius_values(cmd: Command, squared: bool) -> np.ndarray:
    if cmd.grid is not None:
        return parse_grid(cmd.grid)
    if squared:
        if cmd.r2 is not None:
            return np.array([cmd.r2])
        if cmd.r is not None:
            return np.array([cmd.r * cmd.r])
        raise UsageError("required for this verb (or --r / --grid)", "--r2")
    return np.array([_need(cmd.r, "--r")])


def _density(cmd: Command):
    k = _need(cmd.k, "--k")
    rows = []
    for x in _radius_values(cmd, squared=True):
        ld = log_radial_density(k, cmd.params.n, x)
        rows.append({"x": float(x), "log_density": ld, "density": math.exp(ld)})
    return {"rows": rows}, EXIT_OK


def _survival(cmd: Command):
    k = _need(cmd.k, "--k")
    n = cmd.params.n
    rows = []
    for r2 in _radius_values(cmd, squared=True):
        row = {"r2": float(r2), **_prob(survival_log(k, n, r2))}
        if r2 > 0:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                row["asympt_log"] = survival_asympt_log(k, n, math.sqrt(r2))
        rows.append(row)
    return {"rows": rows}, EXIT_OK


def _hole(cmd: Command):
    if cmd.samples and not cmd.params.finite:
        raise UsageError("Monte Carlo needs a finite --N", "--mc-samples")
    rows = []
    for r in _radius_values(cmd, squared=False):
        rep = hole_report(cmd.params, float(r), cmd.samples, cmd.seed, cmd.tol, cmd.threads)
        row = {"r": float(r), "exact_log": _prob(rep.exact_log)}
        for name in ("asympt_log", "lower_log", "upper_log", "truncation_rank", "mc_estimate", "mc_halfwidth"):
            value = getattr(rep, name)
            if value is not None:
                row[name] = value
        rows.append(row)
    return {"rows": rows}, EXIT_OK


def _overcrowd(cmd: Command):
    m = _need(cmd.m, "--m")
    r = _need(cmd.r, "--r")
    if cmd.params.finite:
        raise UsageError("overcrowding is defined for the infinite ensemble; use --N inf", "--N")
    rep = overcrowd_report(cmd.params.n, r, m, cmd.samples, cmd.seed, cmd.threads, cmd.tol)
    res = {"r": r, "m": m, "lower_log": rep.lower_log, "upper_log": rep.upper_log}
    res["normalized_upper"], res["normalized_lower"] = rep.normalized
    if rep.mc_estimate is not None:
        res["mc_estimate"], res["mc_halfwidth"] = rep.mc_estimate, rep.mc_halfwidth
    return res, EXIT_OK


def _sample(cmd: Command):
    if not cmd.params.finite:
        raise UsageError("sampling needs a finite --N", "--N")
    count = cmd.samples or 10
    if cmd.method == "matrix":
        batch = sample_eigen_moduli(cmd.params, count, cmd.seed) ** 2
    else:
        batch = sample_radii(cmd.params, count, cmd.seed).batch
    return {"method": cmd.method, "squared_radii": batch.tolist()}, EXIT_OK


def _validate(cmd: Command):
    target = _need(cmd.target, "target")
    if target == "theorem1":
        n, N = cmd.params.n, cmd.params.require_finite()
        res = validate_theorem1(n, N, cmd.draws or 2000, cmd.seed, cmd.radii_n)
        ok = res.passed(PASS_LEVEL)
        out = {"statistic": res.statistic, "p_value": res.p_value, "sizes": list(res.sizes),
               "level": PASS_LEVEL, "passed": ok}
    elif target == "hole-mc":
        r = _need(cmd.r, "--r")
        chk = validate_hole_mc(cmd.params, r, cmd.samples or 100000, cmd.seed, cmd.threads)
        ok = chk.passed()
        out = {"exact": chk.exact, "estimate": chk.estimate, "sigma": chk.sigma, "z": chk.z, "passed": ok}
    else:
        radii = [float(x) for x in _radius_values(cmd, squared=False)]
        gaps, ratios = validate_hole_asympt(cmd.params, radii)
        ok = len(ratios) > 0 and all(x < 1.0 for x in ratios)
        out = {"radii": radii, "gaps": gaps, "ratios": ratios, "passed": ok}
    return out, EXIT_OK if ok else EXIT_STATISTICAL


HANDLERS = {
    "density": _density,
    "survival": _survival,
    "hole": _hole,
    "overcrowd": _overcrowd,
    "sample": _sample,
    "validate": _validate,
}


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _flatten(d: dict, prefix: str = "") -> dict:
    out = {}
    for key, value in d.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            out.update(_flatten(value, name + "."))
        elif isinstance(value, (list, tuple)):
            out[name] = " ".join(_cell(v) for v in value)
        else:
            out[name] = value
    return out


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def to_csv(report: dict) -> str:
    res = report["results"]
    if "rows" in res:
        rows = [_flatten(r) for r in res["rows"]]
    elif "squared_radii" in res:
        rows = [{f"R2_{k + 1}": v for k, v in enumerate(draw)} for draw in res["squared_radii"]]
    else:
        rows = [_flatten(res)]
    header: List[str] = []
    for row in rows:
        header.extend(k for k in row if k not in header)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(row.get(h)) for h in header])
    return buf.getvalue()


_FLAG_NAMES = {"r": "--r", "r2": "--r2", "k": "--k", "m": "--m", "n": "--n", "N": "--N",
               "x": "--r2", "samples": "--mc-samples", "count": "--mc-samples", "tol": "--tol",
               "draws": "--draws"}


def _flag_for(message: str) -> str:
    word = message.split(" ", 1)[0].strip(":,")
    if word in _FLAG_NAMES:
        return _FLAG_NAMES[word]
    for token in message.replace(",", " ").split():
        if token in _FLAG_NAMES:
            return _FLAG_NAMES[token]
    return "unknown"


def build_report(cmd: Command):
    """Run ``cmd`` and return ``(report dict, exit code)``."""
    report = {
        "command": cmd.verb if cmd.verb != "validate" else f"validate {cmd.target}",
        "params": cmd.to_dict(),
        "results": {},
        "errors": [],
        "seed": cmd.seed,
        "version": __version__,
    }
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            report["results"], code = HANDLERS[cmd.verb](cmd)
        except UsageError as exc:
            report["errors"].append({"kind": "usage", "flag": exc.flag, "message": str(exc)})
            code = EXIT_USAGE
        except DomainError as exc:
            report["errors"].append({"kind": "usage", "flag": _flag_for(str(exc)), "message": str(exc)})
            code = EXIT_USAGE
        except (AccuracyError, NonConvergenceError) as exc:
            report["errors"].append({"kind": "accuracy", "message": str(exc), "est_error": exc.est_error})
            code = EXIT_ACCURACY
    for w in caught:
        report["errors"].append({"kind": "warning", "message": str(w.message)})
    return _jsonable(report), code


def run(cmd: Command):
    """Execute ``cmd``; returns ``(report text, exit code)``."""
    report, code = build_report(cmd)
    if cmd.format == "csv" and code in (EXIT_OK, EXIT_STATISTICAL):
        return to_csv(report), code
    return json.dumps(report, indent=2, allow_nan=False), code


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ginibre", description=__doc__.splitlines()[0])
    p.add_argument("verb", choices=VERBS)
    p.add_argument("target", nargs="?", choices=TARGETS, help="what to validate (validate only)")
    p.add_argument("--n", type=int, default=1, help="number of factor matrices")
    p.add_argument("--N", default="inf", help="matrix size, integer or 'inf'")
    p.add_argument("--r", type=float)
    p.add_argument("--r2", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--grid", help="a:b:steps")
    p.add_argument("--mc-samples", dest="samples", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--draws", type=int)
    p.add_argument("--method", choices=("radii", "matrix"), default="radii")
    p.add_argument("--radii-n", dest="radii_n", type=int, help="Gamma factors on the radii side (validate theorem1)")
    return p


def parse_command(argv) -> Command:
    args = make_parser().parse_args(argv)
    if args.verb == "validate" and args.target is None:
        raise UsageError("validate needs a target: " + ", ".join(TARGETS), "target")
    try:
        N = parse_size(args.N)
    except ValueError:
        raise UsageError(f"expected a positive integer or 'inf', got {args.N!r}", "--N") from None
    try:
        params = EnsembleParams(args.n, N)
    except ValueError as exc:
        raise UsageError(str(exc), "--n" if args.n < 1 else "--N") from None
    kw = vars(args)
    kw.pop("n")
    kw.pop("N")
    return Command(params=params, **kw)


def main(argv=None) -> int:
    try:
        cmd = parse_command(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text, code = run(cmd)
    sys.stdout.write(text if text.endswith("\n") else text + "\n")
    if code == EXIT_USAGE:
        print("usage error: see errors in report", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
