"""B-conditioning: epsilon-abstraction, zero-rank assumptions and probability bounds.

CPT entries with probability at most epsilon are read as impossible.  A
forward (predictive) possibility pass over that abstraction marks variable
values that cannot occur at rank zero; assuming them away prunes the exact
computation, which then yields ``Pr(x and e and a)`` as a lower bound and
``lower + 1 - sum_y lower(y)`` as an upper bound on ``Pr(x and e)``.
"""
import warnings
from dataclasses import dataclass
from itertools import product

import numpy as np

from .dynamic import DynamicConditioning
from .errors import AbstractionInconsistent
from .network import oracle_marginals, topological_order


@dataclass(frozen=True)
class Abstraction:
    epsilon: float
    impossible_entries: frozenset  # (child, parent value tuple, child value)

    def __len__(self):
        return len(self.impossible_entries)


@dataclass(frozen=True)
class AssumptionSet:
    """Per-variable sets of value indices assumed impossible."""
    impossible: dict
    inconsistent: bool = False

    def count(self):
        return sum(len(s) for s in self.impossible.values())

    def allowed(self, net):
        masks = {}
        for v, vals in self.impossible.items():
            if vals:
                m = np.ones(net.cards[v])
                m[list(vals)] = 0.0
                masks[v] = m
        return masks

    def issubset(self, other):
        return all(set(vals) <= set(other.impossible.get(v, ())) for v, vals in self.impossible.items())


@dataclass
class Bounds:
    lower: np.ndarray
    upper: np.ndarray
    lost_mass: float

    @classmethod
    def from_lower(cls, lower):
        lower = np.asarray(lower, dtype=np.float64)
        lost = 1.0 - float(lower.sum())
        return cls(lower, lower + lost, lost)


def abstract_network(net, epsilon):
    """Every CPT entry ``Pr(x | u) <= epsilon`` becomes an impossible (x, u) pair."""
    if not 0 <= epsilon < 1:
        raise ValueError("epsilon must lie in [0, 1)")
    entries = set()
    for cpt in net.cpts:
        pcards = [net.cards[p] for p in cpt.parents]
        for row, u in enumerate(product(*(range(k) for k in pcards))):
            for x in np.flatnonzero(cpt.table[row] <= epsilon):
                entries.add((cpt.child, tuple(u), int(x)))
    return Abstraction(float(epsilon), frozenset(entries))


def zero_rank_propagation(abst, net, root_evidence=None):
    """Forward possibility pass in topological order.

    A value is possible iff some parent instantiation of possible values
    reaches it through a non-impossible entry.  An observed root keeps only
    its observed value.
    """
    root_evidence = root_evidence or {}
    possible = {}
    impossible = {}
    for v in topological_order(net):
        parents = net.parents[v]
        if not parents and v in root_evidence:
            ok = {root_evidence[v]}
        else:
            ok = set()
            for u in product(*(sorted(possible[p]) for p in parents)):
                for x in range(net.cards[v]):
                    if x not in ok and (v, tuple(u), x) not in abst.impossible_entries:
                        ok.add(x)
        if not ok:
            raise AbstractionInconsistent(net.name(v))
        possible[v] = ok
        impossible[v] = frozenset(set(range(net.cards[v])) - ok)
    return AssumptionSet(impossible)


def pruned_belief(net, x, evidence, assumptions, method="dynamic", engine_kwargs=None):
    """``Pr(x and e and a)``; also returns the engine stats (None for the oracle)."""
    allowed = assumptions.allowed(net)
    if method == "oracle":
        return oracle_marginals(net, evidence, allowed)[x], None
    engine = DynamicConditioning(net, evidence, allowed=allowed, **(engine_kwargs or {}))
    return engine.belief(x), engine.stats


def _split_evidence(net, evidence):
    evidence = dict(evidence or {})
    roots = {v: e for v, e in evidence.items() if not net.parents[v]}
    if len(roots) != len(evidence):
        warnings.warn("B-conditioning is predictive; evidence on non-root variables keeps the "
                      "bounds valid but may make them loose", stacklevel=3)
    return evidence, roots


def bounded_belief(net, x, evidence, epsilon, method="dynamic", cutset=None):
    evidence, roots = _split_evidence(net, evidence)
    assumptions = zero_rank_propagation(abstract_network(net, epsilon), net, roots)
    lower, _ = pruned_belief(net, x, evidence, assumptions, method, {"cutset": cutset})
    return Bounds.from_lower(lower), assumptions


@dataclass
class SweepRow:
    epsilon: float
    bounds: Bounds
    assumptions: AssumptionSet
    messages: int

    @property
    def n_assumptions(self):
        return self.assumptions.count()


def _everything_impossible(net):
    return AssumptionSet({v: frozenset(range(net.cards[v])) for v in range(len(net))},
                         inconsistent=True)


def epsilon_sweep(net, x, evidence, epsilons, cutset=None):
    """One row per epsilon, largest first.

    An epsilon whose abstraction is inconsistent yields the degenerate row an
    unsatisfiable database implies: every value assumed away, bounds [0, 1].
    """
    evidence, roots = _split_evidence(net, evidence)
    rows = []
    for eps in sorted(epsilons, reverse=True):
        try:
            assumptions = zero_rank_propagation(abstract_network(net, eps), net, roots)
        except AbstractionInconsistent:
            assumptions = _everything_impossible(net)
            rows.append(SweepRow(eps, Bounds.from_lower(np.zeros(net.cards[x])), assumptions, 0))
            continue
        lower, stats = pruned_belief(net, x, evidence, assumptions, "dynamic", {"cutset": cutset})
        rows.append(SweepRow(eps, Bounds.from_lower(lower), assumptions, stats.messages_computed))
    return rows
