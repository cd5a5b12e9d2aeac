"""Discrete Bayesian network model, chain-rule semantics and a brute-force oracle.

Variables are identified by dense integer ids.  A CPT stores one row per
parent instantiation (last listed parent varies fastest) and one column per
child value.  Instantiations are plain ``dict`` objects mapping variable id to
value index; :func:`canonical` turns one into a hashable, ordered key.
"""
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import EnumerationLimitError, NetworkError

ROW_TOLERANCE = 1e-9
ENUMERATION_LIMIT = 2 ** 24


@dataclass(frozen=True)
class Variable:
    id: int
    name: str
    cardinality: int
    value_names: tuple

    def value_index(self, value_name):
        try:
            return self.value_names.index(value_name)
        except ValueError:
            raise NetworkError(f"variable {self.name!r} has no value {value_name!r}") from None


class Cpt:
    """Conditional probability table of ``child`` given ``parents``."""

    def __init__(self, child, parents, table):
        self.child = int(child)
        self.parents = tuple(int(p) for p in parents)
        table = np.array(table, dtype=np.float64)
        if table.ndim == 1:
            table = table.reshape(1, -1)
        table.setflags(write=False)
        self.table = table

    def row_index(self, parent_values, parent_cards):
        idx = 0
        for v, k in zip(parent_values, parent_cards):
            idx = idx * k + v
        return idx

    def __eq__(self, other):
        return (
            isinstance(other, Cpt)
            and self.child == other.child
            and self.parents == other.parents
            and self.table.shape == other.table.shape
            and np.array_equal(self.table, other.table)
        )

    def __repr__(self):
        return f"Cpt(child={self.child}, parents={self.parents}, rows={self.table.shape[0]})"


def canonical(inst):
    """Canonical hashable form of an instantiation: pairs sorted by variable id."""
    return tuple(sorted(inst.items()))


class Network:
    """Immutable DAG of finite variables with one CPT per variable."""

    def __init__(self, variables, cpts):
        self.variables = tuple(variables)
        n = len(self.variables)
        for i, var in enumerate(self.variables):
            if var.id != i:
                raise NetworkError(f"variable ids must be contiguous; got {var.id} at position {i}")
            if var.cardinality < 2:
                raise NetworkError(f"variable {var.name!r} needs cardinality >= 2")
            if len(var.value_names) != var.cardinality:
                raise NetworkError(f"variable {var.name!r}: {len(var.value_names)} value names "
                                   f"for cardinality {var.cardinality}")
            if len(set(var.value_names)) != var.cardinality:
                raise NetworkError(f"variable {var.name!r} has duplicate value names")
        names = [v.name for v in self.variables]
        if len(set(names)) != n:
            raise NetworkError("variable names must be unique")
        self._by_name = {v.name: v.id for v in self.variables}

        by_child = {}
        for cpt in cpts:
            if cpt.child in by_child:
                raise NetworkError(f"duplicate CPT for {self.variables[cpt.child].name!r}")
            by_child[cpt.child] = cpt
        if len(by_child) != n or set(by_child) != set(range(n)):
            missing = [self.variables[i].name for i in range(n) if i not in by_child]
            raise NetworkError(f"missing CPT for {', '.join(missing)}")
        self.cpts = tuple(by_child[i] for i in range(n))

        for cpt in self.cpts:
            self._check_cpt(cpt)

        self.parents = tuple(c.parents for c in self.cpts)
        children = [[] for _ in range(n)]
        for cpt in self.cpts:
            for p in cpt.parents:
                children[p].append(cpt.child)
        self.children = tuple(tuple(sorted(c)) for c in children)
        self.cards = tuple(v.cardinality for v in self.variables)
        self._topo = self._toposort()

    def _check_cpt(self, cpt):
        name = self.variables[cpt.child].name
        if cpt.child in cpt.parents:
            raise NetworkError(f"{name!r} lists itself as a parent")
        if len(set(cpt.parents)) != len(cpt.parents):
            raise NetworkError(f"{name!r} has duplicate parents")
        for p in cpt.parents:
            if not 0 <= p < len(self.variables):
                raise NetworkError(f"{name!r} has unknown parent id {p}")
        rows = 1
        for p in cpt.parents:
            rows *= self.variables[p].cardinality
        shape = (rows, self.variables[cpt.child].cardinality)
        if cpt.table.shape != shape:
            raise NetworkError(f"CPT of {name!r} has shape {cpt.table.shape}, expected {shape}")
        if not np.all(np.isfinite(cpt.table)) or cpt.table.min() < 0 or cpt.table.max() > 1:
            raise NetworkError(f"CPT of {name!r} has entries outside [0, 1]")
        sums = cpt.table.sum(axis=1)
        bad = np.flatnonzero(np.abs(sums - 1.0) > ROW_TOLERANCE)
        if bad.size:
            r = int(bad[0])
            raise NetworkError(f"CPT of {name!r} row {r} ({self.describe_row(cpt.parents, r)}) "
                               f"sums to {float(sums[r]):.12g}")

    def describe_row(self, parents, row):
        cards = [self.variables[p].cardinality for p in parents]
        vals = []
        for k in reversed(cards):
            vals.append(row % k)
            row //= k
        vals.reverse()
        return ",".join(f"{self.variables[p].name}={self.variables[p].value_names[v]}"
                        for p, v in zip(parents, vals)) or "prior"

    def _toposort(self):
        indeg = [len(p) for p in self.parents]
        ready = [i for i, d in enumerate(indeg) if d == 0]
        order = []
        while ready:
            v = min(ready)
            ready.remove(v)
            order.append(v)
            for c in self.children[v]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    ready.append(c)
        if len(order) != len(self.variables):
            cyc = [self.variables[i].name for i, d in enumerate(indeg) if d > 0]
            raise NetworkError(f"cycle detected among {', '.join(cyc)}")
        return tuple(order)

    # -- lookups -----------------------------------------------------------

    def __len__(self):
        return len(self.variables)

    def __eq__(self, other):
        return (isinstance(other, Network) and self.variables == other.variables
                and self.cpts == other.cpts)

    def __repr__(self):
        return f"Network({len(self)} variables, {len(self.edges())} edges)"

    def index(self, name):
        try:
            return self._by_name[name]
        except KeyError:
            raise NetworkError(f"unknown variable {name!r}") from None

    def name(self, v):
        return self.variables[v].name

    def edges(self):
        return [(p, c.child) for c in self.cpts for p in c.parents]

    def neighbors(self, v):
        return self.parents[v] + self.children[v]

    def cpt_tensor(self, v):
        """CPT of ``v`` reshaped to axes (parent_1, ..., parent_n, v)."""
        cpt = self.cpts[v]
        return cpt.table.reshape(tuple(self.cards[p] for p in cpt.parents) + (self.cards[v],))

    def resolve(self, assignments):
        """Turn ``{name: value_name}`` pairs into an id-keyed instantiation."""
        inst = {}
        for name, value in assignments.items():
            v = self.index(name)
            inst[v] = self.variables[v].value_index(value)
        return inst


def topological_order(net):
    return list(net._topo)


def components(net, edges=None):
    """Weakly connected components as sorted lists (ordered by smallest id)."""
    n = len(net)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in (net.edges() if edges is None else edges):
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    groups = {}
    for v in range(n):
        groups.setdefault(find(v), []).append(v)
    return sorted(groups.values())


def is_forest(n, edges):
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True


def is_singly_connected(net):
    """True iff the undirected skeleton of ``net`` has no cycle."""
    return is_forest(len(net), net.edges())


def check_instantiation(net, inst):
    for v, x in inst.items():
        if not 0 <= v < len(net):
            raise NetworkError(f"unknown variable id {v}")
        if not 0 <= x < net.cards[v]:
            raise NetworkError(f"value {x} out of range for {net.name(v)!r}")


def joint_probability(net, full):
    """Chain-rule probability of a full instantiation."""
    if len(full) != len(net) or any(v not in full for v in range(len(net))):
        raise NetworkError("joint_probability needs a value for every variable")
    check_instantiation(net, full)
    p = 1.0
    for cpt in net.cpts:
        row = cpt.row_index([full[u] for u in cpt.parents], [net.cards[u] for u in cpt.parents])
        p *= cpt.table[row, full[cpt.child]]
    return p


def evidence_mask(net, evidence=None, allowed=None):
    """Per-variable 0/1 weight vectors combining evidence and allowed-value masks."""
    masks = []
    for v in range(len(net)):
        m = np.ones(net.cards[v])
        if allowed is not None and v in allowed:
            m = m * np.asarray(allowed[v], dtype=np.float64)
        if evidence and v in evidence:
            ind = np.zeros(net.cards[v])
            ind[evidence[v]] = 1.0
            m = m * ind
        masks.append(m)
    return masks


def joint_tensor(net, evidence=None, allowed=None):
    """Full joint table over every variable with evidence/mask weights applied.

    Axis ``v`` of the result is variable ``v``.  Guarded by the enumeration limit.
    """
    size = 1
    for k in net.cards:
        size *= k
    if size > ENUMERATION_LIMIT:
        raise EnumerationLimitError(f"{size} joint states exceed the limit of {ENUMERATION_LIMIT}")
    n = len(net)
    joint = np.ones(net.cards)
    for v in range(n):
        axes = list(net.parents[v]) + [v]
        t = net.cpt_tensor(v)
        order = np.argsort(axes)
        t = np.transpose(t, order)
        shape = [1] * n
        for a in axes:
            shape[a] = net.cards[a]
        joint *= t.reshape(shape)
    for v, m in enumerate(evidence_mask(net, evidence, allowed)):
        shape = [1] * n
        shape[v] = net.cards[v]
        joint *= m.reshape(shape)
    return joint


def oracle_marginals(net, evidence=None, allowed=None):
    """``Pr(x and e)`` for every value of every variable, by full enumeration.

    ``allowed`` optionally maps variable ids to 0/1 masks; worlds using a
    masked-out value are dropped (the filtered oracle used for bounds).
    """
    if evidence:
        check_instantiation(net, evidence)
    joint = joint_tensor(net, evidence, allowed)
    n = len(net)
    out = []
    for v in range(n):
        others = tuple(a for a in range(n) if a != v)
        out.append(joint.sum(axis=others) if others else joint.copy())
    return out


def oracle_marginal(net, evidence, x):
    return oracle_marginals(net, evidence)[x]


def enumerate_marginal(net, evidence, x):
    """Slow reference: explicit loop over full instantiations via joint_probability."""
    size = 1
    for k in net.cards:
        size *= k
    if size > ENUMERATION_LIMIT:
        raise EnumerationLimitError(f"{size} joint states exceed the limit")
    out = np.zeros(net.cards[x])
    for values in product(*(range(k) for k in net.cards)):
        if evidence and any(values[v] != e for v, e in evidence.items()):
            continue
        out[values[x]] += joint_probability(net, dict(enumerate(values)))
    return out
