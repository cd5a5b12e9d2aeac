"""Loop cutsets, the conditioning transform and classical cutset conditioning."""
from dataclasses import dataclass
from itertools import product

import networkx as nx
import numpy as np

from .errors import NetworkError, StructuralError
from .network import Cpt, Network, evidence_mask, is_forest
from .polytree import PolytreeState


def _without_outgoing(net, cutset):
    cut = set(cutset)
    return [(u, v) for u, v in net.edges() if u not in cut]


def is_loop_cutset(net, cutset):
    """A set is a loop cutset iff dropping every outgoing arc of its members leaves a forest.

    Greedy absorption only keeps arcs that are bridges at the time they are
    considered, so this is equivalent to the absorbed structure being singly
    connected.
    """
    return is_forest(len(net), _without_outgoing(net, cutset))


def find_loop_cutset(net):
    """Greedy loop cutset: highest remaining degree among variables that own a cyclic out-arc.

    Ties go to the lowest id.  The result is validated; minimality is not promised.
    """
    remaining = set(net.edges())
    chosen = []
    while True:
        g = nx.Graph()
        g.add_nodes_from(range(len(net)))
        g.add_edges_from(remaining)
        bridges = {frozenset(e) for e in nx.bridges(g)}
        cyclic = [(u, v) for u, v in remaining if frozenset((u, v)) not in bridges]
        if not cyclic:
            break
        candidates = {u for u, _ in cyclic}
        best = min(candidates, key=lambda v: (-g.degree(v), v))
        chosen.append(best)
        remaining = {(u, v) for u, v in remaining if u != best}
    cutset = tuple(sorted(chosen))
    assert is_loop_cutset(net, cutset)
    return cutset


def validate_cutset(net, cutset):
    cutset = tuple(sorted(set(cutset)))
    for v in cutset:
        if not 0 <= v < len(net):
            raise NetworkError(f"unknown cutset variable id {v}")
    if not is_loop_cutset(net, cutset):
        names = ",".join(net.name(v) for v in cutset) or "(empty)"
        raise StructuralError(f"{names} is not a loop cutset")
    return cutset


def _connected(adj, a, b):
    seen = {a}
    stack = [a]
    while stack:
        u = stack.pop()
        if u == b:
            return True
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return False


def absorb_arcs(net, cutset):
    """Arcs ``(c, v)`` removed when conditioning on ``cutset``.

    Cutset variables are visited in id order and their outgoing arcs in
    descending child id; an arc is dropped unless that would disconnect its
    endpoints.  Depends only on the cutset, never on its instantiation.
    """
    adj = {v: set(net.neighbors(v)) for v in range(len(net))}
    absorbed = []
    for c in sorted(cutset):
        for v in sorted(net.children[c], reverse=True):
            adj[c].discard(v)
            adj[v].discard(c)
            if _connected(adj, c, v):
                absorbed.append((c, v))
            else:
                adj[c].add(v)
                adj[v].add(c)
    return frozenset(absorbed)


def reduce_cpt(net, v, absorbed_parents, values):
    """CPT of ``v`` restricted to fixed values of some of its parents.

    Returns ``(kept_parents, table2d)``.
    """
    parents = net.parents[v]
    t = net.cpt_tensor(v)
    index = tuple(values[p] if p in absorbed_parents else slice(None) for p in parents)
    kept = tuple(p for p in parents if p not in absorbed_parents)
    sub = np.ascontiguousarray(t[index]).reshape(-1, net.cards[v])
    return kept, sub


@dataclass
class ConditionedNetwork:
    base: Network
    cutset: tuple
    instantiation: dict
    absorbed: frozenset
    network: Network
    weights: list

    def polytree(self):
        return PolytreeState(self.network, weights=self.weights)


def condition(net, cutset, c, evidence=None, absorbed=None):
    """Condition ``net`` on the cutset instantiation ``c``.

    Absorbed arcs are removed, the CPTs at their heads are reduced to the rows
    consistent with ``c`` and ``c`` joins the evidence as indicator weights.
    """
    cutset = tuple(sorted(cutset))
    if set(c) != set(cutset):
        raise NetworkError("instantiation must assign exactly the cutset variables")
    if absorbed is None:
        absorbed = absorb_arcs(net, cutset)
    absorbed_into = {}
    for u, v in absorbed:
        absorbed_into.setdefault(v, set()).add(u)
    cpts = []
    for v in range(len(net)):
        if v in absorbed_into:
            kept, table = reduce_cpt(net, v, absorbed_into[v], c)
            cpts.append(Cpt(v, kept, table))
        else:
            cpts.append(net.cpts[v])
    cond_net = Network(net.variables, cpts)
    weights = evidence_mask(net, evidence)
    for v, x in c.items():
        ind = np.zeros(net.cards[v])
        ind[x] = 1.0
        weights[v] = weights[v] * ind
    return ConditionedNetwork(net, cutset, dict(c), absorbed, cond_net, weights)


def cutset_instantiations(net, cutset):
    """All instantiations of ``cutset`` in canonical lexicographic order."""
    cutset = tuple(sorted(cutset))
    for values in product(*(range(net.cards[v]) for v in cutset)):
        yield dict(zip(cutset, values))


class CutsetConditioning:
    """Textbook cutset conditioning: one polytree run per cutset instantiation."""

    def __init__(self, net, cutset=None):
        self.net = net
        self.cutset = find_loop_cutset(net) if cutset is None else validate_cutset(net, cutset)
        self.absorbed = absorb_arcs(net, self.cutset)
        self.cases = 0
        self.messages = 0

    def beliefs(self, evidence=None, targets=None):
        targets = list(range(len(self.net))) if targets is None else list(targets)
        total = {x: np.zeros(self.net.cards[x]) for x in targets}
        self.cases = 0
        self.messages = 0
        for c in cutset_instantiations(self.net, self.cutset):
            state = condition(self.net, self.cutset, c, evidence, self.absorbed).polytree()
            self.cases += 1
            for x in targets:
                total[x] += state.belief(x)
            self.messages += state.messages_computed()
        return total


def cutset_conditioning_belief(net, x, evidence=None, cutset=None):
    """``(Pr(x and e), number of conditioned networks evaluated)``."""
    engine = CutsetConditioning(net, cutset)
    bel = engine.beliefs(evidence, [x])[x]
    return bel, engine.cases
