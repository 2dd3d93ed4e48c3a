"""Command-line front end: ``sincov <command> [options]``.

Exit codes: 0 when the check passed or the operation succeeded, 1 when a
check ran and found violations, 2 for input or usage errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import algebra as alg
from . import generate as gen
from .exceptions import InputFormatError, SincovError
from .groups import bundled_group, from_group, validate_group
from .gruss import BoundsBox, gruss_check, load_sampled_function, richard_check
from .kernel import (
    AlgebraKernel,
    ControlKernel,
    check_control,
    check_delta,
    control_from_dict,
    kernel_from_dict,
    load_control,
    load_kernel,
    max_defect,
    read_json,
    recover_phi,
)
from .stability import certified_bound_table, decompose

SCHEMA = 1
log = logging.getLogger("sincov")


class UsageError(SincovError):
    pass


# ---------------------------------------------------------------- rendering


def _scalar(v):
    if isinstance(v, float):
        return repr(v)
    return json.dumps(v)


def to_markdown(report: dict) -> str:
    """Render a JSON report; lists of objects become tables, the rest key/value rows."""
    lines = [f"# sincov {report.get('command', 'report')}", ""]
    tables = []
    lines += ["| key | value |", "| --- | --- |"]
    for key, val in report.items():
        if isinstance(val, list) and val and all(isinstance(x, dict) for x in val):
            tables.append((key, val))
        elif isinstance(val, dict):
            for k2, v2 in val.items():
                lines.append(f"| {key}.{k2} | {_scalar(v2)} |")
        else:
            lines.append(f"| {key} | {_scalar(val)} |")
    for key, rows in tables:
        cols = list(rows[0].keys())
        lines += ["", f"## {key}", "", "| " + " | ".join(cols) + " |", "|" + " --- |" * len(cols)]
        for r in rows:
            lines.append("| " + " | ".join(_scalar(r.get(c)) for c in cols) + " |")
    return "\n".join(lines) + "\n"


def emit(report: dict, args) -> None:
    out = {"schema": SCHEMA, "command": args.command, **report}
    text = to_markdown(out) if args.format == "markdown" else json.dumps(out, indent=2) + "\n"
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)


# ------------------------------------------------------------------ helpers


def _control_for(args, K, bundle=None) -> ControlKernel:
    if getattr(args, "control_const", None) is not None:
        return ControlKernel.constant(K.ground, args.control_const)
    if getattr(args, "control", None):
        return load_control(args.control)
    if bundle is not None and isinstance(bundle, dict) and "control" in bundle:
        return control_from_dict(bundle["control"], path=args.kernel)
    raise UsageError("a control kernel is required (--control PATH or --control-const VALUE)")


def _load_bundle(path):
    if Path(path).suffix.lower() == ".csv":
        return load_kernel(path), None
    obj = read_json(path)
    return kernel_from_dict(obj, path=path), obj


# ----------------------------------------------------------------- commands


def cmd_check(args):
    K, _ = _load_bundle(args.kernel)
    rep = max_defect(K, args.tol, n_jobs=args.n_jobs)
    return rep.to_dict(), 0 if rep.verdict == "sincov" else 1


def cmd_certify(args):
    K, bundle = _load_bundle(args.kernel)
    F = _control_for(args, K, bundle)
    rep = check_delta(K, F, args.tol, n_jobs=args.n_jobs)
    out = {**rep.to_dict(), "control": check_control(F, args.tol).to_dict()}
    if args.bound and not isinstance(K, AlgebraKernel) and rep.certified:
        bounds, _ = certified_bound_table(K, F, args.tol)
        out["max_certified_bound"] = float(np.nanmax(np.where(np.isfinite(bounds), bounds, np.nan)))
    return out, 0 if rep.certified else 1


def cmd_recover(args):
    K, _ = _load_bundle(args.kernel)
    if isinstance(K, AlgebraKernel):
        raise UsageError("recover needs a scalar kernel")
    res = recover_phi(K, mode=args.mode, anchor=args.anchor, tol=args.tol)
    out = {"ground": list(K.ground.labels), **res.to_dict()}
    ok = res.sincov if args.mode == "anchor" else True
    return out, 0 if ok else 1


def cmd_decompose(args):
    K, bundle = _load_bundle(args.kernel)
    if not isinstance(K, AlgebraKernel):
        raise UsageError("decompose needs an algebra kernel")
    if getattr(args, "control_const", None) is None and not args.control and not (bundle and "control" in bundle):
        F = ControlKernel.constant(K.ground, 1.0)
    else:
        F = _control_for(args, K, bundle)
    rep = decompose(K, F, args.tol, seed=args.seed)
    return rep.to_dict(), 0


def cmd_characters(args):
    src = args.algebra
    spec = alg.algebra_from_json(src if src in alg.PRESETS else read_json(src))
    chars = alg.characters(spec, seed=args.seed)
    radical, semisimple = alg.radical_and_semisimplicity(spec, seed=args.seed)
    out = {
        "dim": spec.dim,
        "characters": [{"index": i, "weights": alg.complex_to_json(c.weights)} for i, c in enumerate(chars)],
        "radical_dim": len(radical),
        "radical_basis": [alg.complex_to_json(r.coeffs) for r in radical],
        "semisimple": semisimple,
    }
    if spec.family == alg.FUNCTION:
        out["cstar"] = alg.cstar_check(spec, seed=args.seed).to_dict()
    return out, 0


def _box(lo, hi):
    if lo is None and hi is None:
        return None
    if lo is None or hi is None:
        raise UsageError("bounds need both the lower and the upper flag")
    return BoundsBox(lo, hi)


def cmd_gruss(args):
    f = load_sampled_function(args.f)
    g = load_sampled_function(args.g)
    rep = gruss_check(f, g, _box(args.mf, args.Mf), _box(args.mg, args.Mg), rule=args.rule)
    return rep.to_dict(), 1 if rep.violated else 0


def _load_vectors(path):
    path = Path(path)
    if path.suffix.lower() == ".csv":
        rows = [r for r in path.read_text().splitlines() if r.strip()]
        try:
            return [[float(x) for x in r.split(",")] for r in rows]
        except ValueError as exc:
            raise InputFormatError(str(exc), path=path) from exc
    return read_json(path)


def cmd_richard(args):
    rep = richard_check(_load_vectors(args.vectors), c=args.c, tol=args.tol)
    return rep.to_dict(), 0 if rep.passes else 1


def cmd_generate(args):
    if args.preset == "triangular2-kernel":
        K = gen.triangular2_kernel()
        out = {"kernel": K.to_dict()}
    elif args.preset == "c01-example":
        K, F = gen.c01_example(args.grid, args.params)
        out = {"kernel": K.to_dict(), "control": F.to_dict()}
    elif args.preset is not None:
        raise UsageError(f"unknown preset {args.preset!r}")
    elif args.delta:
        S, F = gen.delta_instance(args.n, args.seed, budget=args.budget, control=args.control_kind)
        out = {"kernel": S.to_dict(), "control": F.to_dict()}
    elif args.phi_random:
        phi = gen.random_phi(args.n, args.seed, complex_phases=args.complex)
        S = gen.build_from_phi(range(args.n), phi)
        out = {"kernel": S.to_dict(), "phi": alg.complex_to_json(phi)}
    else:
        raise UsageError("generate needs --phi-random, --delta or --preset")
    return out, 0


def cmd_group(args):
    if args.group:
        G = bundled_group(args.group)
    elif args.cayley:
        obj = read_json(args.cayley)
        table = obj["table"] if isinstance(obj, dict) else obj
        G = validate_group(table, obj.get("labels") if isinstance(obj, dict) else None)
    else:
        raise UsageError("group needs --group NAME or --cayley PATH")
    if args.fmap:
        fmap = alg.complex_from_json(read_json(args.fmap), "fmap", ndim=1)
    elif args.cyclic_character is not None:
        fmap = np.exp(2j * np.pi * args.cyclic_character * np.arange(G.order) / G.order)
    else:
        raise UsageError("group needs --fmap PATH or --cyclic-character K")
    S, rep = from_group(G, fmap, tol=args.tol)
    out = {"group_order": G.order, **rep.to_dict()}
    if args.with_kernel:
        out["kernel"] = S.to_dict()
    return out, 0 if rep.exponential else 1


COMMANDS = {
    "check": cmd_check,
    "certify": cmd_certify,
    "recover": cmd_recover,
    "decompose": cmd_decompose,
    "characters": cmd_characters,
    "gruss": cmd_gruss,
    "richard": cmd_richard,
    "generate": cmd_generate,
    "group": cmd_group,
}


def _positive(x):
    v = float(x)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return v


def _seed(x):
    v = int(x)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_positive, default=1e-9)
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--output", "-o", default=None)
    common.add_argument("--format", choices=["json", "markdown"], default="json")
    common.add_argument("--n-jobs", type=int, default=1, help="worker threads for triple scans")

    p = argparse.ArgumentParser(prog="sincov", description="Sincov kernel analysis toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check", parents=[common], help="exhaustive Sincov defect scan")
    s.add_argument("--kernel", required=True)

    s = sub.add_parser("certify", parents=[common], help="delta-Sincov certification against F")
    s.add_argument("--kernel", required=True)
    s.add_argument("--control")
    s.add_argument("--control-const", type=_positive)
    s.add_argument("--bound", action="store_true", help="also report the largest certified defect bound")

    s = sub.add_parser("recover", parents=[common], help="recover phi from a kernel")
    s.add_argument("--kernel", required=True)
    s.add_argument("--mode", choices=["anchor", "least_squares"], default="anchor")
    s.add_argument("--anchor")

    s = sub.add_parser("decompose", parents=[common], help="split characters into Sincov / bounded parts")
    s.add_argument("--kernel", required=True)
    s.add_argument("--control")
    s.add_argument("--control-const", type=_positive)

    s = sub.add_parser("characters", parents=[common], help="characters and radical of an algebra")
    s.add_argument("--algebra", required=True, help="JSON spec path or preset name")

    s = sub.add_parser("gruss", parents=[common], help="Grüss inequality on sampled functions")
    s.add_argument("--f", required=True)
    s.add_argument("--g", required=True)
    s.add_argument("--rule", choices=["trapezoid", "simpson"], default="trapezoid")
    for flag in ("mf", "Mf", "mg", "Mg"):
        s.add_argument(f"--{flag}", type=float, dest=flag)

    s = sub.add_parser("richard", parents=[common], help="Richard kernel defect scan")
    s.add_argument("--vectors", required=True)
    s.add_argument("--c", type=float, default=0.0)

    s = sub.add_parser("generate", parents=[common], help="synthetic instances and fixtures")
    s.add_argument("--phi-random", action="store_true")
    s.add_argument("--delta", action="store_true")
    s.add_argument("--preset", choices=["triangular2-kernel", "c01-example"])
    s.add_argument("--n", type=int, default=8)
    s.add_argument("--complex", action="store_true")
    s.add_argument("--budget", type=float, default=0.1)
    s.add_argument("--control-kind", choices=["constant", "ratio"], default="constant")
    s.add_argument("--grid", type=int, default=11)
    s.add_argument("--params", type=int, default=10)

    s = sub.add_parser("group", parents=[common], help="group-to-Sincov bridge")
    s.add_argument("--group", help="bundled group: Z<n> or S3")
    s.add_argument("--cayley", help="JSON Cayley table (list of rows, or {table, labels})")
    s.add_argument("--fmap", help="JSON list of [re, im] values, one per element")
    s.add_argument("--cyclic-character", type=int)
    s.add_argument("--with-kernel", action="store_true")
    return p


def main(argv=None) -> int:
    level = os.environ.get("SINCOV_LOG", "error").upper()
    logging.basicConfig(level=getattr(logging, level, logging.ERROR), format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    log.info("running %s", args.command)
    try:
        report, code = COMMANDS[args.command](args)
    except (InputFormatError, UsageError, SincovError, KeyError, ValueError) as exc:
        print(f"sincov {args.command}: error: {exc}", file=sys.stderr)
        return 2
    emit(report, args)
    log.debug("exit code %d", code)
    return code


if __name__ == "__main__":
    sys.exit(main())
