"""Seeded network generators: diamond ladders, n-bit adders and random loopy DAGs."""
from dataclasses import dataclass

import numpy as np

from .errors import NetworkError
from .network import Cpt, Network, Variable, is_singly_connected

FAMILIES = ("diamond-ladder", "adder", "random")


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    size: int
    seed: int = 0
    noise: float = 0.01
    max_card: int = 2
    extra_edges: int = 2
    max_parents: int = 3

    def build(self):
        if self.family == "diamond-ladder":
            return diamond_ladder(self.size, self.seed)
        if self.family == "adder":
            return n_bit_adder(self.size, self.noise, self.seed)
        if self.family == "random":
            return random_loopy(self.size, self.max_parents, self.extra_edges, self.seed,
                                card_range=(2, self.max_card))
        raise NetworkError(f"unknown generator family {self.family!r}")


def _binary(i, name):
    return Variable(i, name, 2, ("1", "0"))


def diamond_ladder(k, seed=0):
    """Chain of ``k`` diamonds: A_{i-1} -> B_i, A_{i-1} -> C_i, {B_i, C_i} -> A_i.

    Binary variables, value order ("1", "0"); CPT entries drawn from [0.05, 0.95].
    """
    if k < 1:
        raise NetworkError("diamond ladder needs k >= 1")
    rng = np.random.default_rng(seed)
    variables = [_binary(0, "A0")]
    cpts = []

    def row():
        p = rng.uniform(0.05, 0.95)
        return [p, 1.0 - p]

    cpts.append(Cpt(0, (), [row()]))
    prev = 0
    for i in range(1, k + 1):
        b, c, a = len(variables), len(variables) + 1, len(variables) + 2
        variables += [_binary(b, f"B{i}"), _binary(c, f"C{i}"), _binary(a, f"A{i}")]
        cpts.append(Cpt(b, (prev,), [row(), row()]))
        cpts.append(Cpt(c, (prev,), [row(), row()]))
        cpts.append(Cpt(a, (b, c), [row() for _ in range(4)]))
        prev = a
    return Network(variables, cpts)


def n_bit_adder(n, noise=0.0, seed=0, inputs=None):
    """Cascaded full adders with output-flip noise.

    Per bit i: roots In1_i, In2_i; Sum_i and Carry_i both have parents
    (In1_i, In2_i[, Carry_{i-1}]).  Values are ("0", "1").  ``inputs`` maps
    input names to 0/1 and turns their priors into indicators (actions).
    """
    if n < 1:
        raise NetworkError("adder needs n >= 1")
    if not 0 <= noise < 0.5:
        raise NetworkError("noise must lie in [0, 0.5)")
    rng = np.random.default_rng(seed)
    inputs = inputs or {}
    variables, cpts = [], []

    def add(name):
        variables.append(Variable(len(variables), name, 2, ("0", "1")))
        return len(variables) - 1

    def gate(bits_fn, parents):
        rows = []
        for r in range(2 ** len(parents)):
            bits = [(r >> (len(parents) - 1 - j)) & 1 for j in range(len(parents))]
            out = bits_fn(bits)
            p1 = 1.0 - noise if out else noise
            rows.append([1.0 - p1, p1])
        return rows

    carry = None
    for i in range(n):
        ins = []
        for label in ("In1", "In2"):
            name = f"{label}_{i}"
            v = add(name)
            if name in inputs:
                prior = [0.0, 1.0] if inputs[name] else [1.0, 0.0]
            else:
                p = rng.uniform(0.1, 0.9)
                prior = [1.0 - p, p]
            cpts.append(Cpt(v, (), [prior]))
            ins.append(v)
        parents = tuple(ins) + ((carry,) if carry is not None else ())
        s = add(f"Sum_{i}")
        cpts.append(Cpt(s, parents, gate(lambda b: sum(b) % 2, parents)))
        c = add(f"Carry_{i}")
        cpts.append(Cpt(c, parents, gate(lambda b: int(sum(b) >= 2), parents)))
        carry = c
    return Network(variables, cpts)


def _random_rows(rng, n_rows, card, low):
    g = rng.gamma(1.0, size=(n_rows, card))
    g /= g.sum(axis=1, keepdims=True)
    return low + (1.0 - low * card) * g


def random_loopy(n_vars, max_parents=3, n_extra_edges=1, seed=0, card_range=(2, 2),
                 zero_fraction=0.0, low=0.02):
    """Random connected DAG: a randomly oriented spanning tree plus extra arcs.

    Each extra arc closes one more undirected cycle.  CPT rows are Dirichlet(1)
    draws squeezed into [low, 1 - low]; ``zero_fraction`` zeroes that share of
    non-maximal entries (rows renormalized).
    """
    if n_vars < 1 or max_parents < 1:
        raise NetworkError("need n_vars >= 1 and max_parents >= 1")
    rng = np.random.default_rng(seed)
    lo, hi = card_range
    cards = [int(rng.integers(lo, hi + 1)) for _ in range(n_vars)]
    arcs = set()
    parents = {v: [] for v in range(n_vars)}
    for j in range(1, n_vars):
        i = int(rng.integers(0, j))
        u, v = (j, i) if rng.random() < 0.5 and len(parents[i]) < max_parents else (i, j)
        arcs.add((u, v))
        parents[v].append(u)
    # orientation of a tree is always acyclic; fix a topological order for extra arcs
    order = _topo(n_vars, arcs)
    rank = {v: r for r, v in enumerate(order)}
    added, tries = 0, 0
    while added < n_extra_edges:
        tries += 1
        if tries > 1000 * (n_extra_edges + 1):
            raise NetworkError(f"cannot place {n_extra_edges} extra arcs on {n_vars} variables "
                               f"with max_parents={max_parents}")
        a, b = (int(x) for x in rng.choice(n_vars, size=2, replace=False)) if n_vars > 1 else (0, 0)
        if a == b:
            continue
        u, v = (a, b) if rank[a] < rank[b] else (b, a)
        if (u, v) in arcs or len(parents[v]) >= max_parents:
            continue
        arcs.add((u, v))
        parents[v].append(u)
        added += 1

    variables = [Variable(v, f"X{v}", cards[v], tuple(f"s{k}" for k in range(cards[v])))
                 for v in range(n_vars)]
    cpts = []
    for v in range(n_vars):
        ps = tuple(sorted(parents[v]))
        n_rows = int(np.prod([cards[p] for p in ps])) if ps else 1
        table = _random_rows(rng, n_rows, cards[v], low)
        if zero_fraction > 0:
            for r in range(n_rows):
                for k in range(cards[v]):
                    if k != int(np.argmax(table[r])) and rng.random() < zero_fraction:
                        table[r, k] = 0.0
                table[r] /= table[r].sum()
        cpts.append(Cpt(v, ps, table))
    net = Network(variables, cpts)
    assert n_extra_edges == 0 or not is_singly_connected(net)
    return net


def _topo(n, arcs):
    children = {v: [] for v in range(n)}
    indeg = [0] * n
    for u, v in arcs:
        children[u].append(v)
        indeg[v] += 1
    ready = sorted(v for v in range(n) if indeg[v] == 0)
    order = []
    while ready:
        v = ready.pop(0)
        order.append(v)
        for c in sorted(children[v]):
            indeg[c] -= 1
            if indeg[c] == 0:
                ready.append(c)
    return order
