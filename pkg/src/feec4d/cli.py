"""Command-line verification front end.

    feec4d <dims|unisolvence|exactness|commute|traceids|pullback> [options]

Exit status: 0 when every case passes, 1 on a verification failure, 2 on a
usage error.
"""
import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import scipy

from . import __version__
from .dofs import PIVOT_THRESHOLD, build_dofset, check_unisolvence
from .exterior import (
    d_proxy,
    exterior_derivative,
    random_coeff_form,
    random_field,
    upsilon,
)
from .interp import IBP_TAGS, commuting_check, ibp_fields, ibp_identity_check
from .pullback import dof_invariance_check, functoriality_check, naturality_check, random_affine
from .spaces import bubble_basis, space_basis, space_dim, trace_dof_dim, vol_dof_dim

COMMANDS = ("dims", "unisolvence", "exactness", "commute", "traceids", "pullback")
DEFAULT_TOL = {
    "dims": 0.0,
    "unisolvence": PIVOT_THRESHOLD,
    "exactness": 1e-12,
    "commute": 1e-10,
    "traceids": 1e-11,
    "pullback": 1e-11,
}
DEFAULT_TRIALS = {"exactness": 20, "commute": 10, "traceids": 10, "pullback": 20}


def _int_range(text, lo, hi, name):
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            values = list(range(int(a), int(b) + 1))
        else:
            values = [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad {name} specification {text!r}")
    if not values:
        raise argparse.ArgumentTypeError(f"empty {name} range {text!r}")
    for v in values:
        if v < lo or (hi is not None and v > hi):
            bound = f">= {lo}" if hi is None else f"in {lo}..{hi}"
            raise argparse.ArgumentTypeError(f"{name} must be {bound}, got {v}")
    return values


def _k_list(text):
    return _int_range(text, 1, None, "k")


def _s_list(text):
    return _int_range(text, 0, 4, "s")


def _which(text):
    tags = text.split(",")
    for t in tags:
        if t not in IBP_TAGS:
            raise argparse.ArgumentTypeError(f"unknown identity {t!r}; choose from {','.join(IBP_TAGS)}")
    return tags


def build_parser():
    p = argparse.ArgumentParser(prog="feec4d", description="Verify tesseract finite element structure.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--k", type=_k_list, default=[1, 2, 3], help="orders, e.g. 2 or 1..3")
    p.add_argument("--s", type=_s_list, default=[0, 1, 2, 3, 4], help="form degrees, e.g. 0..4 or 1,3")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=None, help="override the pass threshold")
    p.add_argument("--trials", type=int, default=None, help="random trials per case")
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.add_argument("--out", default=None, help="write the report here instead of stdout")
    p.add_argument("--which", type=_which, default=list(IBP_TAGS), help="traceids subset, e.g. 2D or 1A,3")
    p.add_argument("--det-negative", action="store_true", help="pullback: use orientation-reversing maps")
    return p


def _rng(seed, *key):
    return np.random.default_rng([seed, *key])


# -- case runners (each returns a dict with a "pass" entry) -----------------

def _dims_case(cfg, k, s):
    basis = len(space_basis(k, s))
    ds = build_dofset(k, s)
    trace = ds.trace_count()
    bubble = len(bubble_basis(k, s))
    ok = (
        basis == space_dim(k, s) == len(ds)
        and trace == trace_dof_dim(k, s)
        and bubble == vol_dof_dim(k, s) == len(ds) - trace
    )
    return {
        "k": k, "s": s,
        "space_dim": basis, "space_formula": space_dim(k, s),
        "trace_dofs": trace, "trace_formula": trace_dof_dim(k, s),
        "volume_dofs": bubble, "volume_formula": vol_dof_dim(k, s),
        "pass": bool(ok),
    }


def _unisolvence_case(cfg, k, s):
    r = check_unisolvence(k, s, threshold=cfg.tol)
    return {"k": k, "s": s, "size": r["size"], "pivot_ratio": r["pivot_ratio"], "pass": r["pass"]}


def _exactness_case(cfg, s):
    rng = _rng(cfg.seed, 1, s)
    dd, proxy = 0.0, 0.0
    for _ in range(cfg.trials):
        f = random_coeff_form(s, 3, rng)
        F = upsilon(s, f)
        scale = max(1.0, F.max_abs_coeff())
        if s <= 2:
            dd = max(dd, d_proxy(d_proxy(F)).max_abs_coeff() / scale)
        lhs = upsilon(s + 1, exterior_derivative(f))
        proxy = max(proxy, lhs.coeff_distance(d_proxy(F)) / scale)
    case = {"k": None, "s": s, "trials": cfg.trials,
            "dd_residual": dd if s <= 2 else None, "proxy_residual": proxy}
    case["pass"] = bool(dd < cfg.tol and proxy < cfg.tol)
    return case


def _commute_case(cfg, k, s):
    rng = _rng(cfg.seed, 2, k, s)
    worst = max(commuting_check(k, s, random_field(s, k + 1, rng)) for _ in range(cfg.trials))
    return {"k": k, "s": s, "trials": cfg.trials, "residual": worst, "pass": bool(worst < cfg.tol)}


def _traceids_case(cfg, which):
    rng = _rng(cfg.seed, 3, IBP_TAGS.index(which))
    worst = 0.0
    for _ in range(cfg.trials):
        r = ibp_identity_check(which, *ibp_fields(which, rng))
        worst = max(worst, r["residual"] / r["scale"])
    return {"k": None, "s": None, "which": which, "trials": cfg.trials,
            "residual": worst, "pass": bool(worst < cfg.tol)}


def _naturality_case(cfg, s):
    rng = _rng(cfg.seed, 4, s)
    sign = -1 if cfg.det_negative else 1
    nat, fun = 0.0, 0.0
    for _ in range(cfg.trials):
        phi, psi = random_affine(rng, det_sign=sign), random_affine(rng, det_sign=sign)
        F = random_field(s, 2, rng)
        if s <= 3:
            nat = max(nat, naturality_check(s, F, phi, rng))
        fun = max(fun, functoriality_check(s, F, phi, psi, rng))
    return {"k": None, "s": s, "check": "naturality", "trials": cfg.trials,
            "naturality": nat if s <= 3 else None, "functoriality": fun, "flagged": cfg.det_negative,
            "pass": bool(nat < cfg.tol and fun < cfg.tol)}


def _invariance_case(cfg, k, s):
    rng = _rng(cfg.seed, 5, k, s)
    sign = -1 if cfg.det_negative else 1
    worst = 0.0
    for _ in range(3):
        r = dof_invariance_check(k, s, random_affine(rng, det_sign=sign), random_field(s, k, rng))
        worst = max(worst, r["max_discrepancy"] / max(1.0, r["scale"]))
    case = {"k": k, "s": s, "check": "dof_invariance", "trials": 3,
            "discrepancy": worst, "flagged": cfg.det_negative}
    # orientation-reversing maps are reported, not judged
    case["pass"] = True if cfg.det_negative else bool(worst < cfg.tol)
    return case


def _jobs(cfg):
    c = cfg.command
    if c == "dims":
        return [(_dims_case, (k, s)) for k in cfg.k for s in cfg.s]
    if c == "unisolvence":
        return [(_unisolvence_case, (k, s)) for k in cfg.k for s in cfg.s]
    if c == "exactness":
        return [(_exactness_case, (s,)) for s in cfg.s if s <= 3]
    if c == "commute":
        return [(_commute_case, (k, s)) for k in cfg.k for s in cfg.s if s <= 3]
    if c == "traceids":
        return [(_traceids_case, (w,)) for w in cfg.which]
    return [(_naturality_case, (s,)) for s in cfg.s] + [
        (_invariance_case, (k, s)) for k in cfg.k for s in cfg.s
    ]


def _skipped(cfg):
    if cfg.command in ("exactness", "commute") and 4 in cfg.s:
        return [{"k": None, "s": 4, "skipped": True, "note": "no derivative acts on 4-forms", "pass": True}]
    return []


def _threads():
    raw = os.environ.get("FEEC4D_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        return max(0, int(raw))
    except ValueError:
        return 0


def run(cfg):
    jobs = _jobs(cfg)
    workers = _threads()
    if workers <= 1 or len(jobs) <= 1:
        cases = [fn(cfg, *args) for fn, args in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cases = list(pool.map(lambda job: job[0](cfg, *job[1]), jobs))
    cases += _skipped(cfg)
    return {
        "command": cfg.command,
        "seed": cfg.seed,
        "tol": cfg.tol,
        "versions": {"feec4d": __version__, "numpy": np.__version__, "scipy": scipy.__version__},
        "cases": cases,
        "pass": all(c["pass"] for c in cases),
    }


# -- formatting --------------------------------------------------------------

def _columns(cases):
    cols = []
    for c in cases:
        for key in c:
            if key not in cols:
                cols.append(key)
    return cols


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.3e}"
    if v is None:
        return "-"
    return str(v)


def format_report(report, fmt):
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    cols = _columns(report["cases"])
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        writer.writeheader()
        for c in report["cases"]:
            writer.writerow({k: ("" if c.get(k) is None else c.get(k)) for k in cols})
        return buf.getvalue()
    rows = [[_fmt(c.get(k)) for k in cols] for c in report["cases"]]
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(cols)]
    lines = [f"{report['command']}  seed={report['seed']}  tol={_fmt(report['tol'])}"]
    lines.append("  ".join(h.ljust(w) for h, w in zip(cols, widths)))
    lines.extend("  ".join(v.ljust(w) for v, w in zip(r, widths)) for r in rows)
    lines.append("PASS" if report["pass"] else "FAIL")
    return "\n".join(lines) + "\n"


def main(argv=None):
    parser = build_parser()
    cfg = parser.parse_args(argv)
    if cfg.tol is None:
        cfg.tol = DEFAULT_TOL[cfg.command]
    if cfg.trials is None:
        cfg.trials = DEFAULT_TRIALS.get(cfg.command, 1)
    if cfg.trials < 1:
        parser.error("--trials must be >= 1")
    report = run(cfg)
    text = format_report(report, cfg.format)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report["pass"] else 1


if __name__ == "__main__":
    sys.exit(main())
