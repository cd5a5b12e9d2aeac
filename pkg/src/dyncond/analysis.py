"""Relevant and local cutsets over the structure conditioned on a loop cutset.

Message naming follows the polytree convention.  On the conditioned
structure (original arcs minus absorbed ones):

* ``pi_msg[(u, x)]``     relevant set of the causal message from parent u to x
* ``lambda_msg[(x, y)]`` relevant set of the diagnostic message from child y to x
* ``pi[x]`` / ``lambda_[x]`` relevant sets of the causal / diagnostic support of x

Every set is a sorted tuple of cutset variable ids.
"""
from dataclasses import dataclass, field

from .cutset import absorb_arcs, find_loop_cutset, validate_cutset


def _tup(s):
    return tuple(sorted(s))


@dataclass
class AbsorptionSets:
    plus: dict
    minus: dict


@dataclass
class RelevantCutsets:
    pi: dict
    lambda_: dict
    pi_msg: dict
    lambda_msg: dict
    visited_edges: int = 0


@dataclass
class LocalCutsets:
    belief: dict
    causal: dict
    diagnostic: dict


@dataclass
class ConditionedStructure:
    cutset: tuple
    absorbed: frozenset
    parents: tuple
    children: tuple
    absorbed_parents: tuple = field(default=())


def conditioned_structure(net, cutset, absorbed=None):
    if absorbed is None:
        absorbed = absorb_arcs(net, cutset)
    parents = tuple(tuple(p for p in net.parents[v] if (p, v) not in absorbed)
                    for v in range(len(net)))
    children = tuple(tuple(c for c in net.children[v] if (v, c) not in absorbed)
                     for v in range(len(net)))
    absorbed_parents = tuple(tuple(p for p in net.parents[v] if (p, v) in absorbed)
                             for v in range(len(net)))
    return ConditionedStructure(tuple(sorted(cutset)), absorbed, parents, children,
                                absorbed_parents)


def compute_absorption_sets(net, cutset, structure):
    cut = set(cutset)
    plus = {v: _tup(structure.absorbed_parents[v]) for v in range(len(net))}
    minus = {v: ((v,) if v in cut else ()) for v in range(len(net))}
    return AbsorptionSets(plus, minus)


def compute_relevant_cutsets(net, cutset, structure=None, absorption=None):
    """Relevant cutsets by one memoized sweep over every directed message.

    A message's set is the absorption sets at its sender joined with the sets
    of every message flowing into the sender except the one from the receiver.
    """
    if structure is None:
        structure = conditioned_structure(net, cutset)
    if absorption is None:
        absorption = compute_absorption_sets(net, cutset, structure)
    pa, ch = structure.parents, structure.children
    a_plus, a_minus = absorption.plus, absorption.minus
    pi_msg, lambda_msg = {}, {}
    visited = 0

    # Explicit stack instead of recursion: long chains would exceed Python's limit.
    def pi_of(u, x):
        return _solve(("pi", u, x))

    def lam_of(x, y):
        return _solve(("lam", x, y))

    def deps(key):
        kind, a, b = key
        if kind == "pi":  # u=a sends to child x=b
            return ([("pi", p, a) for p in pa[a]]
                    + [("lam", a, y) for y in ch[a] if y != b])
        # lam: message from child y=b into x=a; depends on what flows into y except from x
        return ([("pi", p, b) for p in pa[b] if p != a]
                + [("lam", b, z) for z in ch[b]])

    def store(key):
        return pi_msg if key[0] == "pi" else lambda_msg

    def _solve(root):
        nonlocal visited
        memo_root = store(root)
        if root[1:] in memo_root:
            return memo_root[root[1:]]
        stack = [root]
        while stack:
            key = stack[-1]
            memo = store(key)
            if key[1:] in memo:
                stack.pop()
                continue
            pending = [d for d in deps(key) if d[1:] not in store(d)]
            if pending:
                stack.extend(pending)
                continue
            kind, a, b = key
            sender = a if kind == "pi" else b
            acc = set(a_plus[sender]) | set(a_minus[sender])
            for d in deps(key):
                acc.update(store(d)[d[1:]])
                visited += 1
            memo[key[1:]] = _tup(acc)
            stack.pop()
        return memo_root[root[1:]]

    r_pi, r_lam = {}, {}
    for x in range(len(net)):
        acc = set(a_plus[x])
        for u in pa[x]:
            acc.update(pi_of(u, x))
            visited += 1
        r_pi[x] = _tup(acc)
        acc = set(a_minus[x])
        for y in ch[x]:
            acc.update(lam_of(x, y))
            visited += 1
        r_lam[x] = _tup(acc)
    return RelevantCutsets(r_pi, r_lam, pi_msg, lambda_msg, visited)


def _pairwise(sets):
    out = set()
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            out.update(set(sets[i]) & set(sets[j]))
    return out


def derive_local_cutsets(rel, absorption, structure):
    belief, causal, diagnostic = {}, {}, {}
    for x in rel.pi:
        belief[x] = _tup(set(rel.pi[x]) & set(rel.lambda_[x]))
        ins = [rel.pi_msg[(u, x)] for u in structure.parents[x]]
        causal[x] = _tup(set(absorption.plus[x]) | _pairwise(ins))
        outs = [rel.lambda_msg[(x, y)] for y in structure.children[x]]
        diagnostic[x] = _tup(set(absorption.minus[x]) | _pairwise(outs))
    return LocalCutsets(belief, causal, diagnostic)


def verify_local_cutset(net, x, kind, candidate, belief_cutset=(), absorbed=frozenset(),
                        delete=True):
    """Check a local cutset by separation on the undirected conditioned graph.

    Conditioning on ``S`` (the candidate, plus ``belief_cutset`` for the causal
    and diagnostic kinds) drops the ``absorbed`` arcs leaving ``S``; the members
    of ``S`` are then deleted too unless ``delete`` is false.  With ``x``
    removed, no remaining component may touch both a parent and a child of
    ``x`` (belief), two distinct parents (causal) or two distinct children
    (diagnostic).
    """
    if kind not in ("belief", "causal", "diagnostic"):
        raise ValueError(f"unknown local cutset kind {kind!r}")
    cond = set(candidate)
    if kind != "belief":
        cond |= set(belief_cutset)
    arcs = [(u, v) for u, v in net.edges() if not ((u, v) in absorbed and u in cond)]
    removed = {x} | (cond if delete else set())
    adj = {v: [] for v in range(len(net))}
    for u, v in arcs:
        adj[u].append(v)
        adj[v].append(u)
    label = {}
    for v in range(len(net)):
        if v in removed or v in label:
            continue
        label[v] = v
        stack = [v]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in removed and w not in label:
                    label[w] = v
                    stack.append(w)
    parents = [u for u, v in arcs if v == x and u not in removed]
    children = [v for u, v in arcs if u == x and v not in removed]
    if kind == "belief":
        return not ({label[p] for p in parents} & {label[c] for c in children})
    comps = [label[v] for v in (parents if kind == "causal" else children)]
    return len(comps) == len(set(comps))


class CutsetAnalysis:
    """Everything dynamic conditioning needs to know about a (network, cutset) pair."""

    def __init__(self, net, cutset=None):
        self.net = net
        self.cutset = find_loop_cutset(net) if cutset is None else validate_cutset(net, cutset)
        self.structure = conditioned_structure(net, self.cutset)
        self.absorption = compute_absorption_sets(net, self.cutset, self.structure)
        self.relevant = compute_relevant_cutsets(net, self.cutset, self.structure, self.absorption)
        self.local = derive_local_cutsets(self.relevant, self.absorption, self.structure)

    def verify(self, delete=True):
        """(variable, kind) pairs whose derived local cutset fails separation."""
        failures = []
        absorbed = self.structure.absorbed
        for x in range(len(self.net)):
            b = self.local.belief[x]
            checks = (("belief", b), ("causal", self.local.causal[x]),
                      ("diagnostic", self.local.diagnostic[x]))
            for kind, cand in checks:
                if not verify_local_cutset(self.net, x, kind, cand, b, absorbed, delete):
                    failures.append((x, kind))
        return failures

    def dump(self):
        """Line-oriented report used by the ``analyze`` subcommand."""
        net = self.net

        def names(ids):
            return "{" + ",".join(net.name(v) for v in ids) + "}"

        lines = [f"cutset={names(self.cutset)}",
                 "absorbed=" + ",".join(f"{net.name(u)}->{net.name(v)}"
                                        for u, v in sorted(self.structure.absorbed))]
        for x in range(len(net)):
            lines.append(
                f"var {net.name(x)} A+={names(self.absorption.plus[x])} "
                f"A-={names(self.absorption.minus[x])} R+={names(self.relevant.pi[x])} "
                f"R-={names(self.relevant.lambda_[x])} C={names(self.local.belief[x])} "
                f"C+={names(self.local.causal[x])} C-={names(self.local.diagnostic[x])}")
        for (u, x), r in sorted(self.relevant.pi_msg.items()):
            lines.append(f"pi_msg {net.name(u)}->{net.name(x)} R+={names(r)}")
        for (x, y), r in sorted(self.relevant.lambda_msg.items()):
            lines.append(f"lambda_msg {net.name(y)}->{net.name(x)} R-={names(r)}")
        return lines

