"""Command line front end: ``query``, ``bound``, ``analyze``, ``gen`` and ``bench``.

Exit codes: 1 usage, 2 input error, 3 structural error, 4 inconsistent abstraction.
"""
import argparse
import sys
import time
import warnings

from . import kernels
from .analysis import CutsetAnalysis
from .bcond import Bounds, abstract_network, epsilon_sweep, pruned_belief, zero_rank_propagation
from .bnet import load_network, serialize_network
from .cutset import CutsetConditioning
from .dynamic import DynamicConditioning
from .errors import AbstractionInconsistent, EnumerationLimitError, NetworkError, StructuralError
from .netgen import FAMILIES, GeneratorSpec
from .network import oracle_marginals
from .polytree import PolytreeState

EXIT_USAGE, EXIT_INPUT, EXIT_STRUCTURAL, EXIT_ABSTRACTION = 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def fmt(x):
    return format(float(x), ".10g")


def _add_source(p, required=True):
    src = p.add_mutually_exclusive_group(required=required)
    src.add_argument("--net", help="path to a .bnet file")
    src.add_argument("--family", choices=FAMILIES, help="generate the network instead")
    p.add_argument("--size", type=int, default=3, help="generator size parameter")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.01, help="adder output-flip noise")
    p.add_argument("--max-card", type=int, default=2, help="random family: cardinality 2..N")
    p.add_argument("--extra-edges", type=int, default=2, help="random family: extra arcs")


def _network(args):
    if args.net:
        return load_network(args.net)
    return GeneratorSpec(args.family, args.size, args.seed, args.noise, args.max_card,
                         args.extra_edges).build()


def _evidence(net, items):
    pairs = {}
    for item in items or []:
        for part in item.split(","):
            if not part:
                continue
            if "=" not in part:
                raise NetworkError(f"evidence {part!r} is not name=value")
            name, value = part.split("=", 1)
            pairs[name] = value
    return net.resolve(pairs)


def _cutset(net, text):
    if text is None:
        return None
    return tuple(net.index(name) for name in text.split(",") if name)


def _targets(net, items):
    if not items:
        return list(range(len(net)))
    return [net.index(n) for item in items for n in item.split(",") if n]


def _values(net, x, vec):
    return " ".join(f"{val}={fmt(p)}" for val, p in zip(net.variables[x].value_names, vec))


def cmd_query(args, out):
    net = _network(args)
    evidence = _evidence(net, args.evidence)
    targets = _targets(net, args.target)
    cutset = _cutset(net, args.cutset)
    stats = {}
    if args.algo == "oracle":
        marg = oracle_marginals(net, evidence)
        beliefs = {x: marg[x] for x in targets}
    elif args.algo == "polytree":
        state = PolytreeState(net, evidence)
        beliefs = {x: state.belief(x) for x in targets}
    elif args.algo == "cutset":
        engine = CutsetConditioning(net, cutset)
        beliefs = engine.beliefs(evidence, targets)
        stats = {"cutset_size": len(engine.cutset), "cases": engine.cases}
    else:
        engine = DynamicConditioning(net, evidence, cutset)
        beliefs = engine.beliefs(targets)
        stats = {"cutset_size": len(engine.analysis.cutset), **engine.stats.summary()}
    pr_e = float(beliefs[targets[0]].sum())
    for x in targets:
        out.write(f"BEL {net.name(x)} {_values(net, x, beliefs[x])}\n")
    for x in targets:
        post = beliefs[x] / pr_e if pr_e > 0 else beliefs[x] * float("nan")
        out.write(f"POST {net.name(x)} {_values(net, x, post)}\n")
    out.write(f"pr_e={fmt(pr_e)}\n")
    out.write(f"algo={args.algo}\n")
    for key, value in stats.items():
        out.write(f"{key}={value}\n")


def _bound_line(eps, n_assumptions, bounds, messages):
    lower = "[" + "/".join(fmt(v) for v in bounds.lower) + "]"
    upper = "[" + "/".join(fmt(v) for v in bounds.upper) + "]"
    return (f"{fmt(eps):<10} {n_assumptions:<12} {lower:<28} {upper:<28} "
            f"{fmt(bounds.lost_mass):<14} {messages}\n")


def cmd_bound(args, out):
    net = _network(args)
    evidence = _evidence(net, args.evidence)
    x = net.index(args.target)
    cutset = _cutset(net, args.cutset)
    values = "/".join(net.variables[x].value_names)
    out.write(f"target={net.name(x)} values={values}\n")
    out.write(f"{'eps':<10} {'assumptions':<12} {'lower[' + values + ']':<28} "
              f"{'upper[' + values + ']':<28} {'lost_mass':<14} messages\n")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if args.sweep:
            eps_list = [float(e) for e in args.sweep.split(",") if e]
            for row in epsilon_sweep(net, x, evidence, eps_list, cutset):
                out.write(_bound_line(row.epsilon, row.n_assumptions, row.bounds, row.messages))
        else:
            evidence_roots = {v: e for v, e in evidence.items() if not net.parents[v]}
            assumptions = zero_rank_propagation(abstract_network(net, args.epsilon), net,
                                                evidence_roots)
            lower, stats = pruned_belief(net, x, evidence, assumptions,
                                         engine_kwargs={"cutset": cutset})
            out.write(_bound_line(args.epsilon, assumptions.count(), Bounds.from_lower(lower),
                                  stats.messages_computed))


def cmd_analyze(args, out):
    net = _network(args)
    analysis = CutsetAnalysis(net, _cutset(net, args.cutset))
    for line in analysis.dump():
        out.write(line + "\n")
    failures = analysis.verify()
    out.write(f"relevant_visited_edges={analysis.relevant.visited_edges}\n")
    out.write("local_cutsets_verified=" + ("yes" if not failures else "no") + "\n")


def cmd_gen(args, out):
    out.write(serialize_network(_network(args)))


def _parse_sizes(text):
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(s) for s in text.split(",") if s]


def _bench_target(net, family):
    if family == "adder":
        return max(v for v in range(len(net)) if net.name(v).startswith("Sum_"))
    return len(net) - 1


def cmd_bench(args, out):
    algos = [a for a in args.algos.split(",") if a]
    for a in algos:
        if a not in ("cutset", "dynamic"):
            raise UsageError(f"bench: unknown algorithm {a!r}")
    previous = kernels.use_backend(args.backend) if args.backend else None
    out.write(f"# backend={kernels.backend}\n")
    out.write(f"{'algo':<8} {'size':>5} {'messages':>10} {'cases':>10} {'wall_ms':>10}\n")
    try:
        for size in _parse_sizes(args.sizes):
            spec = GeneratorSpec(args.family, size, args.seed, args.noise, args.max_card,
                                 args.extra_edges)
            net = spec.build()
            x = _bench_target(net, args.family)
            for algo in algos:
                t0 = time.perf_counter()
                if algo == "cutset":
                    engine = CutsetConditioning(net)
                    engine.beliefs(None, [x])
                    messages, cases = engine.messages, engine.cases
                else:
                    engine = DynamicConditioning(net)
                    engine.belief(x)
                    messages = sum(engine.stats.per_arc.values())
                    cases = engine.stats.conditioning_cases_expanded
                ms = (time.perf_counter() - t0) * 1000
                out.write(f"{algo:<8} {size:>5} {messages:>10} {cases:>10} {ms:>10.2f}\n")
    finally:
        if previous:
            kernels.use_backend(previous)


def build_parser():
    parser = _Parser(prog="dyncond", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    q = sub.add_parser("query", help="exact beliefs for target variables")
    _add_source(q)
    q.add_argument("--algo", choices=("oracle", "polytree", "cutset", "dynamic"), default="dynamic")
    q.add_argument("--target", action="append", help="variable name(s); default all")
    q.add_argument("--evidence", action="append", help="name=value[,name=value...]")
    q.add_argument("--cutset", help="comma-separated loop cutset overriding the heuristic")
    q.set_defaults(func=cmd_query)

    b = sub.add_parser("bound", help="B-conditioning bounds for one target")
    _add_source(b)
    b.add_argument("--target", required=True)
    b.add_argument("--evidence", action="append")
    b.add_argument("--cutset")
    eps = b.add_mutually_exclusive_group(required=True)
    eps.add_argument("--epsilon", type=float)
    eps.add_argument("--sweep", help="comma-separated epsilons, run largest first")
    b.set_defaults(func=cmd_bound)

    a = sub.add_parser("analyze", help="relevant and local cutsets per variable")
    _add_source(a)
    a.add_argument("--cutset")
    a.set_defaults(func=cmd_analyze)

    g = sub.add_parser("gen", help="emit a generated network as .bnet")
    _add_source(g)
    g.set_defaults(func=cmd_gen)

    n = sub.add_parser("bench", help="scaling rows for cutset vs dynamic conditioning")
    n.add_argument("--family", choices=FAMILIES, default="diamond-ladder")
    n.add_argument("--sizes", default="2..8", help="'lo..hi' or comma list")
    n.add_argument("--algos", default="cutset,dynamic")
    n.add_argument("--backend", choices=("python", "compiled"))
    n.add_argument("--seed", type=int, default=0)
    n.add_argument("--noise", type=float, default=0.01)
    n.add_argument("--max-card", type=int, default=2)
    n.add_argument("--extra-edges", type=int, default=2)
    n.set_defaults(func=cmd_bench)
    return parser


def run(argv, out=None):
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
        args.func(args, out)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except StructuralError as exc:
        print(f"structural error: {exc}", file=sys.stderr)
        return EXIT_STRUCTURAL
    except AbstractionInconsistent as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ABSTRACTION
    except (NetworkError, OSError, ValueError, EnumerationLimitError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return 0


def main():
    sys.exit(run(sys.argv[1:]))
