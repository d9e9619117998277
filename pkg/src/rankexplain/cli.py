"""Command-line interface.

Exit codes: 0 success, 1 failed selftest, 2 input error, 3 exact computation
intractable for the requested cell, 4 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from decimal import Decimal, localcontext
from fractions import Fraction

from . import golden
from .approx import SamplingPlan, mc_expectation, mc_shap, mc_shapley
from .attribution import ShapInstance, shap_attribution, shapley_attribution
from .core import ColumnDistribution, Permutation, ProductDistribution, apply_weights, format_rational, to_rational
from .errors import ExactIntractable, InvalidInput, ResourceCapExceeded
from .expectation import Caps, ExpInstance, expect_effect
from .instances import Instance, dump_instance, load_instance, read_matrix_csv
from .pairwise import Encoding, Tie, WeightSelection, prec_probability, prec_selection, selection_probability
from .ranking import LEX, MAX_ASC, SUM, EffectKind, EffectSpec, RankingSpec, rank_matrix
from .reductions import KnapsackInstance, PositiveCNF, gen_cnf_topk_matrix, gen_knapsack_matrix, gen_md_matrix_pair

EXIT_OK, EXIT_SELFTEST, EXIT_INPUT, EXIT_INTRACTABLE, EXIT_CAP = 0, 1, 2, 3, 4


def decimal_string(q: Fraction, digits: int = 12) -> str:
    with localcontext() as ctx:
        ctx.prec = digits
        d = Decimal(q.numerator) / Decimal(q.denominator)
    return format(d.normalize(), "f")


def _number(q: Fraction) -> dict:
    return {"value": format_rational(q), "decimal": decimal_string(q)}


def _rationals(text: str) -> tuple[Fraction, ...]:
    return tuple(to_rational(v) for v in text.split(",") if v.strip())


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise InvalidInput(f"expected comma-separated integers, got {text!r}") from exc


# ---------------------------------------------------------------- instances


def _load(args) -> Instance:
    sources = [s for s in (args.instance, args.builtin, args.matrix_csv) if s]
    if len(sources) != 1:
        raise InvalidInput("give exactly one of an instance file, --builtin or --matrix-csv")
    if args.instance:
        inst = load_instance(args.instance)
    elif args.builtin:
        inst = golden.builtin(args.builtin)
    else:
        inst = Instance(read_matrix_csv(args.matrix_csv))
    if args.ranking:
        try:
            inst = replace(inst, spec=RankingSpec.parse(args.ranking))
        except ValueError as exc:
            raise InvalidInput(f"bad ranking {args.ranking!r}") from exc
    if args.effect or args.row is not None or args.k is not None:
        kind = args.effect or (inst.effect.kind.value if inst.effect else None)
        if kind is None:
            raise InvalidInput("--row/--k given without an effect")
        same = inst.effect is not None and inst.effect.kind.value == kind
        row = args.row if args.row is not None else (inst.effect.row if same else None)
        k = args.k if args.k is not None else (inst.effect.k if same else None)
        try:
            effect = EffectSpec(kind, row, k)
        except ValueError as exc:
            raise InvalidInput(str(exc)) from exc
        effect.validate(inst.M.n)
        inst = replace(inst, effect=effect)
    if args.weights:
        inst = replace(inst, weights=_rationals(args.weights))
    if args.uniform:
        inst = replace(inst, dist=ProductDistribution.uniform(_rationals(args.uniform), inst.M.m))
    if args.encoding:
        inst = replace(inst, encoding=Encoding(args.encoding))
    return inst


def _require(inst: Instance, *fields: str) -> None:
    flags = {"effect": "--effect", "dist": "--uniform", "weights": "--weights"}
    for name in fields:
        if getattr(inst, name) is None:
            raise InvalidInput(f"instance has no {name}; supply it in the file or with {flags[name]}")


def _exp_instance(inst: Instance) -> ExpInstance:
    _require(inst, "effect", "dist")
    return ExpInstance(inst.M, inst.dist, inst.spec, inst.effect, inst.base, inst.encoding)


def _shap_instance(inst: Instance, column: int | None) -> ShapInstance:
    _require(inst, "effect", "dist", "weights")
    return ShapInstance(inst.M, inst.dist, inst.weights, inst.spec, inst.effect, column, inst.encoding)


def _caps(args) -> Caps:
    defaults = Caps()
    return Caps(
        weight_space=args.max_weight_space or defaults.weight_space,
        permutation_rows=args.max_perm_rows or defaults.permutation_rows,
        topk_k=args.max_topk_k or defaults.topk_k,
        dp_states=args.max_dp_states or defaults.dp_states,
        allow_large_k=args.allow_large_k,
    )


def _plan(args) -> SamplingPlan:
    return SamplingPlan(to_rational(args.epsilon), to_rational(args.delta), args.seed, args.samples)


def _sampled(value: Fraction, plan: SamplingPlan, reason: str | None = None) -> dict:
    out = {**_number(value), "method": "approx:monte-carlo", "plan": plan.to_dict()}
    if reason:
        out["fallback_reason"] = reason
    return out


# ---------------------------------------------------------------- commands


def cmd_rank(args) -> dict:
    inst = _load(args)
    weights = inst.weights if inst.weights is not None else (Fraction(1),) * inst.M.m
    pi = rank_matrix(apply_weights(inst.M, weights), inst.spec)
    return {"ranking": str(inst.spec), "weights": [format_rational(w) for w in weights], "order": list(pi.order), "ranks": list(pi.ranks)}


def cmd_prec(args) -> dict:
    inst = _load(args)
    _require(inst, "dist")
    x, y = inst.M.row(args.first), inst.M.row(args.second)
    tie = Tie.by_index(args.first, args.second) if args.tie == "index" else Tie(args.tie)
    p = prec_probability(x, y, inst.dist, inst.spec, tie, inst.encoding, _caps(args).dp_states)
    out = {**_number(p), "first": args.first, "second": args.second, "tie": tie.value, "ranking": str(inst.spec)}
    if args.terms:
        sel = prec_selection(x, y, inst.dist, inst.spec, tie)
        out["terms"] = [
            {
                "weights": [sorted(format_rational(v) for v in allowed) for allowed in term],
                "mass": format_rational(selection_probability(WeightSelection((term,)), inst.dist)),
            }
            for term in sel.terms
        ]
    return out


def cmd_expect(args) -> dict:
    inst = _exp_instance(_load(args))
    if args.mode == "approx":
        return _sampled(*mc_expectation(inst, _plan(args), args.threads))
    caps = _caps(args)
    try:
        value, method = expect_effect(inst, "exact" if args.mode == "exact" else "auto", caps)
    except (ExactIntractable, ResourceCapExceeded) as exc:
        if args.mode != "auto":
            raise
        return _sampled(*mc_expectation(inst, _plan(args), args.threads), reason=str(exc))
    return {**_number(value), "method": "exact:" + method.value}


def _columns(args, m: int) -> list[int]:
    return [args.column] if args.column is not None else list(range(1, m + 1))


def _attribute(args, m: int, exact, sample) -> dict:
    caps = _caps(args)
    results = []
    for j in _columns(args, m):
        if args.mode == "approx":
            results.append({"column": j, **_sampled(*sample(j))})
            continue
        try:
            a = exact(j, "exact" if args.mode == "exact" else "auto", caps)
        except (ExactIntractable, ResourceCapExceeded) as exc:
            if args.mode != "auto":
                raise
            results.append({"column": j, **_sampled(*sample(j), reason=str(exc))})
            continue
        entry = {"column": j, **_number(a.value), "method": a.method}
        if a.shift:
            entry["shift"] = format_rational(a.shift)
        results.append(entry)
    return results[0] if args.column is not None else {"columns": results}


def cmd_shap(args) -> dict:
    inst = _load(args)
    base = _shap_instance(inst, None)
    return _attribute(
        args,
        inst.M.m,
        lambda j, mode, caps: shap_attribution(base.with_target(j), mode, caps),
        lambda j: mc_shap(base.with_target(j), _plan(args), args.threads),
    )


def cmd_shapley(args) -> dict:
    inst = _load(args)
    _require(inst, "effect")
    return _attribute(
        args,
        inst.M.m,
        lambda j, mode, caps: shapley_attribution(inst.M, inst.spec, inst.effect, j, mode, caps),
        lambda j: mc_shapley(inst.M, inst.spec, inst.effect, j, _plan(args), args.threads),
    )


def cmd_sample(args) -> dict:
    args.mode = "approx"
    return {"expect": cmd_expect, "shap": cmd_shap, "shapley": cmd_shapley}[args.what](args)


def _cnf(args) -> PositiveCNF:
    return PositiveCNF.of(args.vars, [_ints(c) for c in args.clause or []])


def _zero_one(m: int) -> ProductDistribution:
    return ProductDistribution(tuple(ColumnDistribution.uniform([0, 1]) for _ in range(m)))


def cmd_gen_knapsack(args) -> dict:
    M = gen_knapsack_matrix(KnapsackInstance(_ints(args.items), args.capacity))
    # the effect counts the swap of the two rows
    inst = Instance(M, SUM, EffectSpec("kendall_tau"), dist=_zero_one(M.m), base=Permutation((1, 2)))
    return dump_instance(inst)


def cmd_gen_cnf(args) -> dict:
    phi = _cnf(args)
    M = gen_cnf_topk_matrix(phi, args.k)
    spec = RankingSpec.parse(args.ranking)
    effect = EffectSpec("topk_membership", row=M.n, k=args.k)
    return dump_instance(Instance(M, spec, effect, dist=_zero_one(M.m), base=Permutation.identity(M.n)))


def cmd_gen_md(args) -> dict:
    phi = _cnf(args)
    spec = RankingSpec.parse(args.ranking)
    first, second = gen_md_matrix_pair(phi, spec)
    effect = EffectSpec(args.effect or "max_displacement")
    return {
        "first": dump_instance(Instance(first, spec, effect, dist=_zero_one(first.m))),
        "second": dump_instance(Instance(second, spec, effect, dist=_zero_one(second.m))),
    }


def cmd_selftest(args) -> int:
    from . import oracle
    from .expectation import expect_enumerate_weights

    checks: list[tuple[str, Fraction, Fraction, Fraction | None]] = []
    ex = golden.builtin("worked-example")
    for u, order in golden.WORKED_EXAMPLE_RANKINGS.items():
        got = rank_matrix(apply_weights(ex.M, u), ex.spec).order
        ok = Fraction(int(got == order))
        checks.append((f"worked-example ranking under {u}", Fraction(1), ok, None))
    for (kind, row, k), (e_val, shap_vals, shapley_vals) in golden.WORKED_EXAMPLE_VALUES.items():
        effect = EffectSpec(kind, row, k)
        label = str(effect)
        inst = ExpInstance(ex.M, ex.dist, ex.spec, effect)
        checks.append((f"E[{label}]", e_val, expect_effect(inst, "auto")[0], oracle.brute_expectation(inst)))
        for j in (1, 2):
            s = ShapInstance(ex.M, ex.dist, ex.weights, ex.spec, effect, j)
            checks.append((f"SHAP {label} weight {j}", shap_vals[j - 1], shap_attribution(s, "auto").value, oracle.brute_shap(s)))
            checks.append((
                f"Shapley {label} column {j}",
                shapley_vals[j - 1],
                shapley_attribution(ex.M, ex.spec, effect, j, "auto").value,
                oracle.brute_shapley(ex.M, ex.spec, effect, j),
            ))
    pair = golden.builtin("max-pair")
    x, y = pair.M.rows
    checks.append(("max-pair P(row1 first) asc", golden.MAX_PAIR_PREC_ASC, prec_probability(x, y, pair.dist, MAX_ASC, Tie.SECOND), None))
    checks.append(("max-pair P(row1 first) dsc", golden.MAX_PAIR_PREC_DSC, prec_probability(x, y, pair.dist, RankingSpec("max", "dsc"), Tie.FIRST), None))
    cnf = golden.builtin("cnf-top1")
    phi = PositiveCNF.of(4, [{1, 2, 4}, {1, 3}, {2, 3, 4}])
    models = Fraction(oracle.count_sat_positive_cnf(phi), 16)
    for spec in (MAX_ASC, SUM, LEX):
        inst = ExpInstance(cnf.M, cnf.dist, spec, cnf.effect, cnf.base)
        checks.append((f"cnf-top1 P(top-1) {spec}", Fraction(golden.CNF_TOP1_MODELS, 16), expect_enumerate_weights(inst), models))
    ks = gen_knapsack_matrix(KnapsackInstance((1, 2), 2))
    p = prec_probability(ks.row(2), ks.row(1), _zero_one(3), SUM, Tie.SECOND)
    checks.append(("knapsack (1,2) cap 2 solutions", Fraction(3), 8 * p, Fraction(oracle.count_knapsack((1, 2), 2))))

    failed = 0
    width = max(len(c[0]) for c in checks)
    print(f"{'check':<{width}}  {'expected':>9}  {'engine':>9}  {'oracle':>9}  ok")
    for name, expected, engine, ref in checks:
        ok = engine == expected and (ref is None or ref == expected)
        failed += not ok
        ref_text = format_rational(ref) if ref is not None else "-"
        print(f"{name:<{width}}  {format_rational(expected):>9}  {format_rational(engine):>9}  {ref_text:>9}  {'yes' if ok else 'NO'}")
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if not failed else EXIT_SELFTEST


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    source = argparse.ArgumentParser(add_help=False)
    g = source.add_argument_group("instance")
    g.add_argument("instance", nargs="?", help="instance JSON file")
    g.add_argument("--builtin", help="bundled instance: " + ", ".join(sorted(golden.BUILTINS)))
    g.add_argument("--matrix-csv", help="matrix as CSV (one row per line)")
    g.add_argument("--ranking", help="sum, sum-dsc, max-asc, max-dsc, min-asc, min-dsc or lex")
    g.add_argument("--effect", choices=[k.value for k in EffectKind])
    g.add_argument("--row", type=int, help="row for position and top-k membership effects")
    g.add_argument("--k", type=int, help="k for top-k effects")
    g.add_argument("--weights", help="reference weights, comma-separated rationals")
    g.add_argument("--uniform", help="use this comma-separated support, uniformly, for every column")
    g.add_argument("--encoding", choices=[e.value for e in Encoding])

    compute = argparse.ArgumentParser(add_help=False)
    c = compute.add_argument_group("computation")
    c.add_argument("--mode", choices=["exact", "auto", "approx"], default="exact")
    c.add_argument("--epsilon", default="1/20", help="additive accuracy for sampling (default 1/20)")
    c.add_argument("--delta", default="1/100", help="failure probability for sampling (default 1/100)")
    c.add_argument("--seed", type=int, default=0, help="sampling seed (default 0)")
    c.add_argument("--samples", type=int, help="override the derived sample count")
    c.add_argument("--threads", type=int, default=1, help="worker threads for sampling")
    c.add_argument("--max-weight-space", type=int, help="cap on enumerated weight vectors")
    c.add_argument("--max-perm-rows", type=int, help="largest row count for permutation enumeration")
    c.add_argument("--max-topk-k", type=int, help="largest k treated as fixed")
    c.add_argument("--max-dp-states", type=int, help="cap on dynamic-program states")
    c.add_argument("--allow-large-k", action="store_true", help="run inclusion-exclusion for any k")

    cnf = argparse.ArgumentParser(add_help=False)
    cnf.add_argument("--vars", type=int, required=True, help="number of variables")
    cnf.add_argument("--clause", action="append", help="comma-separated variables of one clause (repeatable)")

    parser = argparse.ArgumentParser(prog="rankexplain", description="Explain how random column weights change a ranking.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rank", parents=[source], help="rank the rows under the reference weights")
    p.set_defaults(func=cmd_rank)
    p = sub.add_parser("prec", parents=[source, compute], help="probability that one row precedes another")
    p.add_argument("--first", type=int, required=True)
    p.add_argument("--second", type=int, required=True)
    p.add_argument("--tie", choices=["index", "first", "second"], default="index", help="who wins ties (default: smaller row index)")
    p.add_argument("--terms", action="store_true", help="also list the weight boxes (Max, Min and Lex)")
    p.set_defaults(func=cmd_prec)
    p = sub.add_parser("expect", parents=[source, compute], help="expected effect")
    p.set_defaults(func=cmd_expect)
    for name, func, what in (("shap", cmd_shap, "SHAP score of weights"), ("shapley", cmd_shapley, "Shapley value of columns")):
        p = sub.add_parser(name, parents=[source, compute], help=what)
        p.add_argument("--column", type=int, help="one column (default: all)")
        p.set_defaults(func=func)
    p = sub.add_parser("sample", parents=[source, compute], help="force Monte-Carlo estimation")
    p.add_argument("what", choices=["expect", "shap", "shapley"])
    p.add_argument("--column", type=int)
    p.set_defaults(func=cmd_sample)
    p = sub.add_parser("gen-knapsack", help="emit the two-row knapsack instance")
    p.add_argument("--items", required=True, help="comma-separated item sizes")
    p.add_argument("--capacity", type=int, required=True)
    p.set_defaults(func=cmd_gen_knapsack)
    p = sub.add_parser("gen-cnf", parents=[cnf], help="emit the top-k instance of a positive CNF")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--ranking", default="max-asc")
    p.set_defaults(func=cmd_gen_cnf)
    p = sub.add_parser("gen-md", parents=[cnf], help="emit the displacement matrix pair of a positive CNF")
    p.add_argument("--ranking", default="max-asc")
    p.add_argument("--effect", choices=["max_displacement", "hamming"])
    p.set_defaults(func=cmd_gen_md)
    p = sub.add_parser("selftest", help="compare engine and brute-force oracles on the bundled instances")
    p.set_defaults(func=cmd_selftest)
    return parser


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = args.func(args)
    except ExactIntractable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTRACTABLE
    except ResourceCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (InvalidInput, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if isinstance(result, int):
        return result
    json.dump(result, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
