"""Command line front end.

Every command parses its documents, calls one library pipeline and writes a
report. Exit status: 0 when every internal invariant held, 1 when one
failed, 2 for malformed input or an unknown command. Verdicts about the
input (for example "discontinuous") never change the status.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import random
import sys
from fractions import Fraction
from typing import Any, Callable

from . import arcgon as ag
from .boxes import Box, box_to_doc, make_box, origin_box, scale_translate
from .core import (
    MalformedDocument,
    SequenceNotConverging,
    UnknownCommand,
    ValuationLabError,
    rat_str,
)
from .corpus import random_bodies, random_convex_polygon, standard_bodies
from .decomposition import (
    DEFAULT_GRID,
    certify_linearity,
    check_valuation,
    endpoint_decompose_1d,
    endpoint_decompose_nd,
    endpoint_family_to_doc,
    extract_components,
    family_to_doc,
    homogeneity_fit,
    random_rational,
    reconstruct,
)
from .documents import document_hash, load_document, parse_body, parse_real, parse_valuation
from .grid import (
    UPPER_HALF_INDICATOR,
    continuity_probe,
    decay_report,
    ngon_sequence,
    steiner_check,
    triangle_sequence,
    volume_characterization,
)
from .valuations import (
    BoxFunction,
    Composite,
    PhiF,
    box_oracle,
    evaluate,
    homogeneity_probe,
    weak_additivity_sweep,
)


DEFAULT_TOL_GEOM = ag.TOL_GEOM
DEFAULT_TOL_ALG = ag.TOL_ALG


class Run:
    """Accumulates rows, a summary and the exit status of one command."""

    def __init__(self, args, corpus: dict):
        self.args = args
        self.corpus = corpus
        self.rows: list[dict] = []
        self.summary: dict[str, Any] = {}
        self.status = 0

    def fail(self, why: str) -> None:
        self.status = 1
        self.summary.setdefault("failures", []).append(why)


def _jsonable(x):
    if isinstance(x, Fraction):
        return rat_str(x)
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _csv_cell(x):
    if x is None:
        return ""
    if isinstance(x, Fraction):
        return rat_str(x)
    if isinstance(x, float):
        return repr(x)
    return x


def _floats(text: str | None, default) -> list[float]:
    if text is None:
        return list(default)
    try:
        return [parse_real(t) for t in text.split(",") if t.strip()]
    except ValuationLabError as exc:
        raise MalformedDocument(f"bad number list {text!r}") from exc


def _rationals(text: str | None, default) -> list[Fraction]:
    if text is None:
        return list(default)
    try:
        return [Fraction(t.strip()) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise MalformedDocument(f"bad rational list {text!r}") from exc


def _load(run: Run, arg: str | None, what: str):
    if arg is None:
        raise MalformedDocument(f"--{what} is required")
    doc = load_document(arg)
    run.corpus[what] = document_hash(doc)
    return doc


def _valuation(run: Run):
    return parse_valuation(_load(run, run.args.valuation, "valuation"))


def _body(run: Run, planar: bool = True):
    K = parse_body(_load(run, run.args.body, "body"))
    if planar and isinstance(K, Box):
        if K.n != 2:
            raise MalformedDocument("this command needs a planar body")
        K = ag.from_box(K)
    return K


def _dim(V, args) -> int:
    if isinstance(V, BoxFunction):
        return V.oracle.n
    if isinstance(V, Composite):
        return V.family.n
    return args.dim


# --------------------------------------------------------------------------
# commands


def cmd_decompose(run: Run) -> None:
    args = run.args
    V = _valuation(run)
    oracle = box_oracle(V, _dim(V, args))
    rng = random.Random(args.seed)
    if args.endpoint or not oracle.translation_invariant:
        M = Fraction(args.M).limit_denominator() if args.M else Fraction(4)
        E = endpoint_decompose_1d(oracle) if oracle.n == 1 else endpoint_decompose_nd(oracle, M)
        bad = 0
        for _ in range(args.samples):
            pairs = []
            for _ in range(oracle.n):
                a = random_rational(rng, -int(M), int(M))
                b = random_rational(rng, -int(M), int(M))
                pairs.append((min(a, b), max(a, b)))
            K = make_box(pairs)
            want, got = oracle(K), E(K)
            run.rows.append({"box": json.dumps(box_to_doc(K)["box"]), "value": want,
                             "reconstructed": got, "defect": want - got})
            bad += want != got
        run.summary.update({"mode": "endpoint", "boxes": args.samples, "mismatches": bad,
                            "family": endpoint_family_to_doc(E)})
        if bad:
            run.fail(f"endpoint reconstruction differs on {bad} boxes")
        return
    grid = _rationals(args.grid, DEFAULT_GRID)
    C = extract_components(oracle, grid, certify=True)
    for I, comp in sorted(C.components.items(), key=lambda kv: (len(kv[0]), sorted(kv[0]))):
        cert = certify_linearity(comp)
        run.rows.append({"subset": "{" + ",".join(map(str, sorted(I))) + "}",
                         "certified": cert.certified, "coefficient": cert.coefficient,
                         "defect": cert.defect})
    W = reconstruct(C)
    bad = 0
    for _ in range(args.samples):
        sides = [rng.choice(grid) for _ in range(oracle.n)]
        shift = [random_rational(rng, -3, 3) for _ in range(oracle.n)]
        K = scale_translate(origin_box(sides), 1, shift)
        bad += W(K) != oracle(K)
    run.summary.update({"mode": "components", "roundtrip_boxes": args.samples,
                        "roundtrip_mismatches": bad, "family": family_to_doc(C)})
    if bad:
        run.fail(f"reconstruction differs from the oracle on {bad} translated boxes")


def cmd_check(run: Run) -> None:
    args = run.args
    V = _valuation(run)
    box_only = isinstance(V, (BoxFunction, Composite))
    if args.body is None:
        oracle = box_oracle(V, _dim(V, args))
        rep = check_valuation(oracle, args.samples, args.seed, tol=0 if box_only else 1e-9)
        for K, L, d in rep.violations:
            run.rows.append({"kind": "valuation", "first": repr(K), "second": repr(L), "defect": d})
        for a, axis, x, y, d in rep.affine_violations:
            run.rows.append({"kind": "affine", "first": str([rat_str(v) for v in a]),
                             "second": f"axis {axis}, x={x}, y={y}", "defect": d})
        run.summary.update({"pairs": args.samples, "violations": len(rep.violations),
                            "affine_violations": len(rep.affine_violations),
                            "verdict": "valuation" if rep.ok else "not a valuation"})
        if not rep.ok and not isinstance(V, BoxFunction):
            run.fail("a built-in valuation failed the box valuation check")
        if box_only:
            return
        bodies = random_bodies(args.samples, args.seed)
    else:
        bodies = [_body(run)] * args.samples
    defects = weak_additivity_sweep(V, bodies, 1, args.seed)
    worst = max(defects, default=0.0)
    scale_ = max((abs(float(evaluate(V, K))) for K in bodies), default=1.0)
    run.summary.update({"cuts": len(defects), "max_weak_additivity_defect": worst})
    run.rows.append({"kind": "weak_additivity", "first": f"{len(defects)} cuts", "second": "",
                     "defect": worst})
    if not worst <= 1e-9 * max(1.0, scale_):
        run.fail(f"weak additivity defect {worst}")


def cmd_grid(run: Run) -> None:
    args = run.args
    K = _body(run)
    V = _valuation(run)
    eps = _floats(args.eps, (0.25, 0.125))
    reports = decay_report(V, K, eps, args.M or 2.0, samples=args.norm_samples, seed=args.seed,
                           threads=args.threads, require_vanishing=False)
    for r in reports:
        run.rows.append(r.row())
        if abs(r.signed_sum - r.value) > 1e-6:
            run.fail(f"signed sum {r.signed_sum} differs from V(K) = {r.value} at eps={r.eps}")
        if not r.census_passed:
            run.fail(f"|J| eps^2 exceeds the annulus bound at eps={r.eps}")
    run.summary.update({"degree": reports[0].degree if reports else None,
                        "norm_estimate": reports[0].norm_estimate if reports else None,
                        "erosion_exact": all(r.erosion_exact for r in reports)})


def cmd_characterize(run: Run) -> None:
    args = run.args
    V = _valuation(run)
    bodies = {"body": _body(run)} if args.body else standard_bodies()
    eps = _floats(args.eps, (0.25, 0.125))
    rep = volume_characterization(V, bodies, eps, args.M or 2.0, args.seed,
                                  samples=args.norm_samples, threads=args.threads)
    for name, res in rep.residuals.items():
        decay = rep.decay[name]
        row = {"body": name, "residual": res}
        if isinstance(decay, str):
            row["note"] = decay
        else:
            row["apriori"] = decay[-1].apriori
            row["signed_sum"] = decay[-1].signed_sum
        run.rows.append(row)
    run.summary.update({
        "c": rep.c, "certified": rep.certified,
        "translation_invariant": rep.translation_invariant,
        "two_homogeneous": rep.two_homogeneous,
        "degrees": {k: p.degree for k, p in rep.homogeneity.items()},
        "sup_on_unit_disk": rep.boundedness.sup,
    })


def cmd_homogeneity(run: Run) -> None:
    args = run.args
    V = _valuation(run)
    K = _body(run, planar=False)
    if isinstance(K, Box):
        lams = _rationals(args.lambdas, [Fraction(k, 2) for k in range(1, 2 * K.n + 6)])
        fit = homogeneity_fit(box_oracle(V, K.n), K, lams)
        for j, c in enumerate(fit.coefficients):
            run.rows.append({"degree": j, "coefficient": c})
        run.summary.update({"residual": fit.residual, "degrees": fit.degrees})
        return
    lams = _floats(args.lambdas, (0.5, 2.0, 3.0))
    probe = homogeneity_probe(V, K, lams)
    base = float(evaluate(V, K))
    for lam in lams:
        run.rows.append({"lambda": lam, "ratio": float(evaluate(V, ag.scale(K, lam))) / base})
    run.summary.update({"degree": probe.degree, "defect": probe.defect})


_SEQUENCES: dict[str, tuple[Callable, str]] = {
    "ngon": (ngon_sequence, "disk"),
    "triangle": (triangle_sequence, "triangle"),
}


def cmd_continuity(run: Run) -> None:
    args = run.args
    V = _valuation(run) if args.valuation else PhiF(UPPER_HALF_INDICATOR)
    if args.sequence not in _SEQUENCES:
        raise MalformedDocument(f"unknown sequence {args.sequence!r}; use one of {sorted(_SEQUENCES)}")
    build, limit_name = _SEQUENCES[args.sequence]
    if args.limit and args.limit != limit_name:
        raise MalformedDocument(f"sequence {args.sequence!r} converges to {limit_name!r}")
    exps = list(range(3, 11))
    seq, limit = build(exps)
    try:
        rep = continuity_probe(V, seq, limit, args.floor)
    except SequenceNotConverging as exc:
        run.fail(str(exc))
        return
    for j, (d, gap) in zip(exps, rep.rows):
        run.rows.append({"j": j, "hausdorff": d, "value_gap": gap})
    run.summary["verdict"] = rep.verdict


def cmd_steiner(run: Run) -> None:
    args = run.args
    ts = _floats(args.t, [2.0 * k / 20 for k in range(1, 21)])
    if args.body:
        bodies = [_body(run)]
    else:
        rng = random.Random(args.seed)
        bodies = [random_convex_polygon(rng) for _ in range(args.samples)]
    worst = 0.0
    for n, K in enumerate(bodies):
        for t, err in steiner_check(K, ts):
            run.rows.append({"body": n, "t": t, "relative_error": err})
            worst = max(worst, err)
    run.summary["max_relative_error"] = worst
    if worst > 1e-9:
        run.fail(f"Steiner relative error {worst}")


COMMANDS = {
    "decompose": cmd_decompose,
    "check": cmd_check,
    "grid": cmd_grid,
    "characterize-volume": cmd_characterize,
    "homogeneity": cmd_homogeneity,
    "continuity": cmd_continuity,
    "steiner": cmd_steiner,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="valuationlab", description=__doc__.splitlines()[0])
    p.add_argument("command", help=", ".join(COMMANDS))
    p.add_argument("--body", help="body document: JSON file or inline JSON")
    p.add_argument("--valuation", help="valuation document: JSON file or inline JSON")
    p.add_argument("--eps", help="comma-separated grid sizes")
    p.add_argument("--lambda", dest="lambdas", help="comma-separated scale factors")
    p.add_argument("--samples", type=int, default=200, help="random samples (default 200)")
    p.add_argument("--norm-samples", type=int, default=1000,
                   help="bodies used to estimate the valuation norm (default 1000)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--tol-geom", type=float, default=DEFAULT_TOL_GEOM)
    p.add_argument("--tol-alg", type=float, default=DEFAULT_TOL_ALG)
    p.add_argument("--M", type=float, default=None, help="grid / coordinate bound")
    p.add_argument("--dim", type=int, default=2, help="box dimension for built-in valuations")
    p.add_argument("--grid", help="comma-separated rational sample grid for decompose")
    p.add_argument("--endpoint", action="store_true", help="endpoint decomposition")
    p.add_argument("--t", help="comma-separated Steiner radii")
    p.add_argument("--sequence", default="ngon", help="ngon or triangle")
    p.add_argument("--limit", help="limit body of the sequence (disk or triangle)")
    p.add_argument("--floor", type=float, default=1e-3, help="value-gap floor for verdicts")
    return p


def _render(run: Run, fmt: str) -> str:
    if fmt == "json":
        env = {
            "command": run.args.command,
            "status": run.status,
            "seed": run.args.seed,
            "tolerances": {"geom": run.args.tol_geom, "alg": run.args.tol_alg},
            "corpus": run.corpus,
            "summary": run.summary,
            "rows": run.rows,
        }
        return json.dumps(_jsonable(env), indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    fields: list[str] = []
    for row in run.rows:
        fields.extend(k for k in row if k not in fields)
    if fields:
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for row in run.rows:
            w.writerow({k: _csv_cell(row.get(k)) for k in fields})
    return buf.getvalue()


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        if argv and not argv[0].startswith("-") and argv[0] not in COMMANDS:
            raise UnknownCommand(argv[0])
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return 0 if exc.code == 0 else 2
        if args.command not in COMMANDS:
            raise UnknownCommand(args.command)
        run = Run(args, {})
        saved = ag.TOL_GEOM, ag.TOL_ALG
        ag.TOL_GEOM, ag.TOL_ALG = args.tol_geom, args.tol_alg
        try:
            COMMANDS[args.command](run)
        finally:
            ag.TOL_GEOM, ag.TOL_ALG = saved
    except UnknownCommand as exc:
        print(f"error: unknown command {exc.args[0]!r}; expected one of {', '.join(COMMANDS)}",
              file=sys.stderr)
        return 2
    except ValuationLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = _render(run, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for why in run.summary.get("failures", []):
        print(f"invariant failed: {why}", file=sys.stderr)
    if args.format == "csv" and run.summary:
        for k in ("verdict", "c", "degree", "residual"):
            if k in run.summary:
                print(f"{k}: {_jsonable(run.summary[k])}", file=sys.stderr)
    return run.status

