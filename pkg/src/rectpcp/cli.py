"""Command-line surface: build, transform, check, count, and report.

Exit codes: 0 pass, 1 property/check failure, 2 usage or schema error,
3 guard violation.  Reports are JSON documents with a versioned schema and
are byte-identical across runs for identical plans and seeds (wall-clock
timings are opt-in, since they cannot be deterministic).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from rectpcp import f2
from rectpcp.core import (
    GuardViolation,
    TableVerifier,
    VerifierSpec,
    check_rectangular,
    check_rnl,
    check_rop,
    config_graph,
    emulate,
    measure_smoothness,
    robust_distance,
    tabulate,
)
from rectpcp.fields import BiasBudgetExhausted, UnsupportedField, build_biased_set, finite_field
from rectpcp.lowrank import UnsupportedRank, benchmark_counting, count_ones_bucketed, count_ones_naive
from rectpcp.pcpp import hadamard_pcpp, system_from_truth_table
from rectpcp.pipeline import rigid_extract, run_pipeline
from rectpcp.rectcsp import (
    Digraph,
    ProductMaxcutInstance,
    brute_cut_value,
    cut_value,
    cut_value_lowrank,
    flatten_cut,
    product_graph,
)
from rectpcp.rigidity import ExactModeGuard, rigidity_scan
from rectpcp.samplers import SamplerConstructionError
from rectpcp.toys import cycle_xor_toy, permuted_grid_toy, xor_predicate
from rectpcp.transforms import TransformPrecondition, add_rop, alphabet_reduce, compose, smoothify
from rectpcp.util import default_seed, parallel_map
from rectpcp.verifiers import blr_verifier, line_query_pattern

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_GUARD = 3

REPORT_SCHEMA = "rectpcp-report-v1"


class SchemaError(Exception):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


# ---------------------------------------------------------------------------
# Plan files
# ---------------------------------------------------------------------------

_PLAN_KEYS = {"verifier", "transforms", "checks", "outputs"}
_VERIFIER_KEYS = {"kind", "params"}


def load_plan(path: str) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError("$", f"cannot parse plan: {exc}")
    if not isinstance(doc, dict):
        raise SchemaError("$", "plan must be an object")
    unknown = set(doc) - _PLAN_KEYS
    if unknown:
        raise SchemaError(f"$.{sorted(unknown)[0]}", "unknown key")
    if "verifier" not in doc:
        raise SchemaError("$.verifier", "missing")
    ver = doc["verifier"]
    if not isinstance(ver, dict) or set(ver) - _VERIFIER_KEYS or "kind" not in ver:
        raise SchemaError("$.verifier", "must be {kind, params}")
    for i, tr in enumerate(doc.get("transforms", [])):
        if not isinstance(tr, dict) or set(tr) - {"name", "params"} or "name" not in tr:
            raise SchemaError(f"$.transforms[{i}]", "must be {name, params}")
    if not isinstance(doc.get("checks", []), list):
        raise SchemaError("$.checks", "must be a list of check names")
    if not isinstance(doc.get("outputs", {}), dict):
        raise SchemaError("$.outputs", "must be an object of paths")
    return doc


def build_verifier(kind: str, params: dict, seed: int) -> VerifierSpec:
    params = dict(params or {})
    if kind == "blr":
        return blr_verifier(int(params.pop("m")))
    if kind == "line":
        m = int(params.pop("m"))
        order = int(params.pop("field"))
        lam = Fraction(params.pop("lam", "1/2"))
        bseed = int(params.pop("seed", seed))
        field = finite_field(order)
        biased = build_biased_set(field, m, lam, seed=bseed)
        return line_query_pattern(field, m, biased)
    if kind == "table":
        return TableVerifier.from_json(Path(params.pop("path")).read_text()).to_spec()
    if kind == "grid":
        q = int(params.pop("q", 4))
        p = int(params.pop("p", 1))
        target = int(params.pop("target", 0))
        toy_seed = int(params.pop("seed", seed))
        from rectpcp.core import AffineCheck

        checks = tuple(AffineCheck(0, 0) for _ in range(p))
        pred = xor_predicate(q, checks, target)
        return permuted_grid_toy(
            int(params.pop("r_row", 3)),
            int(params.pop("r_shared_row", 0)),
            int(params.pop("r_shared_col", 0)),
            q,
            toy_seed,
            pred,
        )
    if kind == "cycle":
        toy = cycle_xor_toy(
            int(params.pop("r_row", 3)),
            int(params.pop("seed", seed)),
            parity_mask=int(params.pop("parity_mask", 0)),
            parity_const=int(params.pop("parity_const", 0)),
            target=int(params.pop("target", 0)),
        )
        return toy.verifier
    raise SchemaError("$.verifier.kind", f"unknown verifier kind {kind!r}")


def apply_transform(v: VerifierSpec, name: str, params: dict, seed: int):
    params = dict(params or {})
    if name == "smoothify":
        return smoothify(v, Fraction(params.pop("mu", "1/4")))
    if name == "add_rop":
        r = v.partition.n_coins
        q = v.q
        code = f2.random_systematic_code(
            r, q, seed=int(params.pop("seed", seed)),
            min_distance=int(params.pop("min_distance", 1)),
        )
        return add_rop(v, code)
    if name == "alphabet_reduce":
        code = f2.random_systematic_code(
            v.alphabet_bits,
            int(params.pop("block_len")),
            seed=int(params.pop("seed", seed)),
            min_distance=int(params.pop("min_distance", 2)),
        )
        return alphabet_reduce(v, code)
    if name == "compose":
        base = v.predicate_fn(0)
        system = system_from_truth_table(base.truth_table, base.arity)
        inner = hadamard_pcpp(
            system,
            bank_bits=int(params.pop("bank_bits", 8)),
            seed=int(params.pop("seed", seed)),
            proximity=Fraction(params.pop("proximity", "1/8")),
            soundness=Fraction(params.pop("soundness", "1/2")),
        )
        return compose(v, inner)
    if name == "identity":
        from rectpcp.transforms import ProofTransform, TransformResult

        return TransformResult(v, ProofTransform("identity", lambda pr: list(pr)), {})
    raise SchemaError("$.transforms", f"unknown transform {name!r}")


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------

def run_check(v: VerifierSpec, name: str, proof=None) -> dict:
    if name == "rectangular":
        res = check_rectangular(v)
        return {"check": name, "ok": res.ok, "counterexample": res.counterexample,
                "detail": res.detail}
    if name == "smooth":
        qs = measure_smoothness(v)
        distinct = sorted(set(qs))
        return {
            "check": name,
            "ok": len(distinct) == 1,
            "distinct_probabilities": [str(x) for x in distinct[:4]],
            "locations": v.proof_len,
        }
    if name == "rnl":
        res = check_rnl(v)
        return {"check": name, "ok": res.ok, "counterexample": res.counterexample,
                "detail": res.detail}
    if name == "rop":
        res = check_rop(v)
        return {"check": name, "ok": res.ok, "counterexample": res.counterexample,
                "detail": res.detail}
    if name == "config-graph":
        g = config_graph(v)
        return {
            "check": name,
            "ok": True,
            "left_degree": g.left_degree,
            "right_regular": g.right_regular,
        }
    if name == "robust":
        if proof is None:
            proof = [0] * v.proof_len
        hist: dict[str, int] = {}
        for r_index in range(v.coin_space):
            d = robust_distance(v, proof, r_index)
            key = str(d.distance)
            hist[key] = hist.get(key, 0) + 1
        return {"check": name, "ok": True, "distance_histogram": hist}
    raise SchemaError("$.checks", f"unknown check {name!r}")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _emit(args, doc: dict, default_path=None) -> None:
    doc = {"schema": REPORT_SCHEMA, **doc}
    text = json.dumps(doc, indent=2, sort_keys=True)
    out = getattr(args, "out", None) or default_path
    if out:
        Path(out).write_text(text + "\n")
    if getattr(args, "json", False):
        print(text)
    elif not getattr(args, "quiet", False):
        _human_summary(doc)


def _human_summary(doc: dict) -> None:
    for key, val in doc.items():
        if key == "schema":
            continue
        if isinstance(val, (dict, list)):
            print(f"{key}: {json.dumps(val)[:200]}")
        else:
            print(f"{key}: {val}")


def cmd_check(args) -> int:
    seed = default_seed(args.seed)
    if args.plan:
        plan = load_plan(args.plan)
        v = build_verifier(plan["verifier"]["kind"], plan["verifier"].get("params", {}), seed)
        for tr in plan.get("transforms", []):
            v = apply_transform(v, tr["name"], tr.get("params", {}), seed).verifier
        props = plan.get("checks", [])
        out_path = plan.get("outputs", {}).get("report")
    else:
        if not args.verifier:
            raise SchemaError("$.verifier", "give --plan or --verifier")
        params = {}
        if args.m is not None:
            params["m"] = args.m
        if args.field is not None:
            params["field"] = args.field
        if args.lam is not None:
            params["lam"] = args.lam
        if args.table is not None:
            params["path"] = args.table
        v = build_verifier(args.verifier, params, seed)
        props = [p.strip() for p in (args.props or "").split(",") if p.strip()]
        out_path = None
    if not props:
        raise SchemaError("$.checks", "no checks requested")
    results = parallel_map(lambda name: run_check(v, name), props, args.threads)
    ok = all(r["ok"] for r in results)
    _emit(args, {"verifier": v.name, "results": results, "ok": ok}, out_path)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_transform(args) -> int:
    seed = default_seed(args.seed)
    plan = load_plan(args.plan)
    v = build_verifier(plan["verifier"]["kind"], plan["verifier"].get("params", {}), seed)
    applied = []
    for tr in plan.get("transforms", []):
        result = apply_transform(v, tr["name"], tr.get("params", {}), seed)
        v = result.verifier
        applied.append(
            {
                "name": tr["name"],
                "proof_transform": result.proof_transform.description,
                "info": {k: str(val) for k, val in result.info.items()},
            }
        )
    outputs = plan.get("outputs", {})
    if "verifier" in outputs:
        Path(outputs["verifier"]).write_text(tabulate(v).to_json() + "\n")
    doc = {
        "verifier": v.name,
        "coins": v.partition.n_coins if v.partition.is_binary else None,
        "q": v.q,
        "p": v.p,
        "proof_len": v.proof_len,
        "transforms": applied,
    }
    check_results = [run_check(v, name) for name in plan.get("checks", [])]
    if check_results:
        doc["results"] = check_results
        doc["ok"] = all(r["ok"] for r in check_results)
    _emit(args, doc, outputs.get("report"))
    if check_results and not doc["ok"]:
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_count(args) -> int:
    a = f2.matrix_from_text(Path(args.a).read_text())
    b = f2.matrix_from_text(Path(args.b).read_text())
    doc: dict = {"n": a.n_rows, "rho": a.n_cols, "backend": args.backend}
    counts = {}
    if args.backend in ("naive", "both"):
        counts["naive"] = count_ones_naive(a, b)
    if args.backend in ("bucketed", "both"):
        counts["bucketed"] = count_ones_bucketed(a, b)
    doc["counts"] = counts
    doc["ok"] = len(set(counts.values())) <= 1
    if args.timings:
        bench = benchmark_counting(a.n_rows, a.n_cols, default_seed(args.seed))
        doc["timings"] = bench.to_dict()
    _emit(args, doc)
    return EXIT_OK if doc["ok"] else EXIT_CHECK_FAILED


def cmd_maxcut(args) -> int:
    import random

    seed = default_seed(args.seed)
    g1 = Digraph.from_text(Path(args.g1).read_text())
    g2 = Digraph.from_text(Path(args.g2).read_text())
    inst = ProductMaxcutInstance(g1, g2)
    rng = random.Random(seed)
    rho = args.rank
    p = f2.BitMatrix.random(g1.n, rho, rng)
    q = f2.BitMatrix.random(rho, g2.n, rng)
    s = f2.matmul(p, q)
    direct = cut_value(inst, s)
    low = cut_value_lowrank(inst, p, q)
    brute = brute_cut_value(product_graph(g1, g2), flatten_cut(s))
    doc = {
        "seed": seed,
        "rank": rho,
        "cut_value": direct,
        "cut_value_lowrank": low,
        "brute_cut_value": brute,
        "ok": direct == low == brute,
    }
    _emit(args, doc)
    return EXIT_OK if doc["ok"] else EXIT_CHECK_FAILED


def cmd_pipeline(args) -> int:
    seed = default_seed(args.seed)
    plan = load_plan(args.plan)
    v = build_verifier(plan["verifier"]["kind"], plan["verifier"].get("params", {}), seed)
    for tr in plan.get("transforms", []):
        v = apply_transform(v, tr["name"], tr.get("params", {}), seed).verifier
    p_mat = f2.matrix_from_text(Path(args.p).read_text())
    q_mat = f2.matrix_from_text(Path(args.q).read_text())
    threshold = Fraction(args.threshold) if args.threshold else None
    report = run_pipeline(v, p_mat, q_mat, threshold=threshold)
    doc = json.loads(report.to_json())
    if not args.timings:
        doc.pop("timings_ns", None)
    ok = report.emulated is None or report.acceptance == report.emulated
    doc["ok"] = ok
    _emit(args, doc, plan.get("outputs", {}).get("report"))
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_rigidity(args) -> int:
    m = f2.matrix_from_text(Path(args.matrix).read_text())
    report = rigidity_scan(
        m, max_rho=args.rho, budget=args.budget, seed=default_seed(args.seed)
    )
    doc = json.loads(report.to_json())
    doc["ok"] = True
    _emit(args, doc)
    return EXIT_OK


def cmd_extract(args) -> int:
    seed = default_seed(args.seed)
    plan = load_plan(args.plan)
    v = build_verifier(plan["verifier"]["kind"], plan["verifier"].get("params", {}), seed)
    for tr in plan.get("transforms", []):
        v = apply_transform(v, tr["name"], tr.get("params", {}), seed).verifier
    s = Fraction(args.soundness) if args.soundness else None
    report = rigid_extract(v, args.rho, s)
    doc = report.to_dict()
    doc["ok"] = True
    _emit(args, doc, plan.get("outputs", {}).get("report"))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="rectpcp",
        description="Rectangular PCP machinery: checks, transforms, counting, "
        "cuts, and rigidity reports.",
    )
    ap.add_argument("--seed", type=int, default=None, help="default seed (env RECTPCP_SEED)")
    ap.add_argument("--json", action="store_true", help="print the JSON report")
    ap.add_argument("--quiet", action="store_true", help="suppress the human summary")
    ap.add_argument("--threads", type=int, default=1, help="worker count (results are identical for any value)")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="run property checkers on a verifier")
    c.add_argument("--plan", help="plan file (JSON)")
    c.add_argument("--verifier", choices=["blr", "line", "table", "grid", "cycle"])
    c.add_argument("--m", type=int)
    c.add_argument("--field", type=int)
    c.add_argument("--lam", type=str)
    c.add_argument("--table", type=str)
    c.add_argument("--props", type=str, help="comma list: rectangular,smooth,rnl,rop,robust,config-graph")
    c.add_argument("--out", type=str)
    c.set_defaults(fn=cmd_check)

    t = sub.add_parser("transform", help="apply a transform pipeline from a plan file")
    t.add_argument("--plan", required=True)
    t.add_argument("--out", type=str)
    t.set_defaults(fn=cmd_transform)

    n = sub.add_parser("count", help="count ones in a product of two matrices")
    n.add_argument("a")
    n.add_argument("b")
    n.add_argument("--backend", choices=["naive", "bucketed", "both"], default="both")
    n.add_argument("--timings", action="store_true")
    n.add_argument("--out", type=str)
    n.set_defaults(fn=cmd_count)

    mx = sub.add_parser("maxcut", help="cross-check the three cut-value paths")
    mx.add_argument("--g1", required=True)
    mx.add_argument("--g2", required=True)
    mx.add_argument("--rank", type=int, default=2)
    mx.add_argument("--out", type=str)
    mx.set_defaults(fn=cmd_maxcut)

    pl = sub.add_parser("pipeline", help="run the low-rank acceptance refuter")
    pl.add_argument("--plan", required=True)
    pl.add_argument("--p", required=True, help="left factor (matrix text file)")
    pl.add_argument("--q", required=True, help="right factor (matrix text file)")
    pl.add_argument("--threshold", type=str)
    pl.add_argument("--timings", action="store_true")
    pl.add_argument("--out", type=str)
    pl.set_defaults(fn=cmd_pipeline)

    rg = sub.add_parser("rigidity", help="distance-to-low-rank scan of a matrix")
    rg.add_argument("--matrix", required=True)
    rg.add_argument("--rho", type=int, default=None)
    rg.add_argument("--budget", type=int, default=50)
    rg.add_argument("--out", type=str)
    rg.set_defaults(fn=cmd_rigidity)

    ex = sub.add_parser("extract", help="enumerate accepted proofs and test rigidity")
    ex.add_argument("--plan", required=True)
    ex.add_argument("--rho", type=int, required=True)
    ex.add_argument("--soundness", type=str)
    ex.add_argument("--out", type=str)
    ex.set_defaults(fn=cmd_extract)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except SchemaError as exc:
        print(f"schema error at {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (KeyError, ValueError, OSError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (
        GuardViolation,
        UnsupportedRank,
        ExactModeGuard,
        TransformPrecondition,
        SamplerConstructionError,
        UnsupportedField,
        BiasBudgetExhausted,
        f2.DimensionMismatch,
    ) as exc:
        print(f"guard violation: {exc}", file=sys.stderr)
        return EXIT_GUARD


if __name__ == "__main__":
    sys.exit(main())
