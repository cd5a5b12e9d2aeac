"""Dynamic conditioning: polytree recursion plus local-cutset sums and a message cache.

All supports and messages live on the structure conditioned on the full loop
cutset.  A computation runs in a *context*, a partial instantiation of the
cutset.  A message whose relevant cutset is only partly fixed by the context
stands for the sum over the unfixed part; the local cutsets guarantee that
no unfixed cutset variable is shared by two factors of one equation, so
these sums factorize.  Contexts are restricted to the relevant cutset before
use, which makes the cache key (kind, endpoints, restricted context) a
complete description of the value.
"""
import sys
from collections import Counter
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import kernels
from .analysis import CutsetAnalysis
from .cutset import reduce_cpt
from .network import components, evidence_mask

PI, LAMBDA, PI_MSG, LAMBDA_MSG = "pi-support", "lambda-support", "pi-message", "lambda-message"


class CyclicDependencyError(RuntimeError):
    pass


@dataclass
class EngineStats:
    messages_computed: int = 0
    cache_hits: int = 0
    cache_misses: int = 0
    conditioning_cases_expanded: int = 0
    per_arc: Counter = field(default_factory=Counter)
    evaluations: Counter = field(default_factory=Counter)
    keys_seen: dict = field(default_factory=dict)

    def max_per_arc(self):
        return max(self.per_arc.values(), default=0)

    def summary(self):
        return {
            "messages_computed": self.messages_computed,
            "cache_hits": self.cache_hits,
            "cache_misses": self.cache_misses,
            "conditioning_cases_expanded": self.conditioning_cases_expanded,
            "max_messages_per_arc": self.max_per_arc(),
        }


class DynamicConditioning:
    """Exact belief engine for one evidence pattern.

    ``allowed`` maps variable ids to 0/1 masks of values still considered
    possible; summations skip masked values and the result is
    ``Pr(x and e and no masked value occurs)``.
    """

    def __init__(self, net, evidence=None, cutset=None, allowed=None, cache=True, analysis=None):
        self.net = net
        self.evidence = dict(evidence or {})
        self.analysis = analysis if analysis is not None else CutsetAnalysis(net, cutset)
        self.weights = evidence_mask(net, self.evidence, allowed)
        self.use_cache = cache
        self.cache = {}
        self.stats = EngineStats()
        self._in_progress = set()
        self._cpts = {}
        self._cutset = set(self.analysis.cutset)
        self._comps = components(net)
        st = self.analysis.structure
        self._pa, self._ch = st.parents, st.children
        self._pcards = [tuple(net.cards[p] for p in ps) for ps in self._pa]
        self._absorbed_parents = [set(a) for a in st.absorbed_parents]
        rel, loc = self.analysis.relevant, self.analysis.local
        self._r_pi, self._r_lam = rel.pi, rel.lambda_
        self._r_pi_msg, self._r_lam_msg = rel.pi_msg, rel.lambda_msg
        self._c_bel, self._c_plus, self._c_minus = loc.belief, loc.causal, loc.diagnostic
        needed = 12 * len(net) + 500
        if sys.getrecursionlimit() < needed:
            sys.setrecursionlimit(needed)

    # -- plumbing ----------------------------------------------------------

    def _cpt(self, x, ctx):
        absorbed = self._absorbed_parents[x]
        key = (x, tuple(ctx[p] for p in sorted(absorbed)))
        table = self._cpts.get(key)
        if table is None:
            if absorbed:
                _, table = reduce_cpt(self.net, x, absorbed, ctx)
            else:
                table = np.ascontiguousarray(self.net.cpts[x].table)
            self._cpts[key] = table
        return table

    def _cases(self, local, ctx):
        """Extensions of ``ctx`` over the unfixed members of a local cutset.

        Values with zero weight (contradicting evidence or assumptions) are skipped.
        """
        free = [v for v in local if v not in ctx]
        if not free:
            self.stats.conditioning_cases_expanded += 1
            yield ctx
            return
        domains = [[i for i, w in enumerate(self.weights[v]) if w != 0.0] for v in free]
        for values in product(*domains):
            self.stats.conditioning_cases_expanded += 1
            ext = dict(ctx)
            ext.update(zip(free, values))
            yield ext

    def _indicator(self, x, ctx):
        w = self.weights[x]
        if x in self._cutset:
            ind = np.zeros_like(w)
            ind[ctx[x]] = w[ctx[x]]
            return ind
        return w

    def _lookup(self, kind, a, b, relevant, ctx, compute):
        restricted = {v: ctx[v] for v in relevant if v in ctx}
        key = (kind, a, b, tuple(sorted(restricted.items())))
        self.stats.keys_seen.setdefault((kind, a, b), set()).add(key[3])
        if self.use_cache and key in self.cache:
            self.stats.cache_hits += 1
            return self.cache[key]
        if key in self._in_progress:
            raise CyclicDependencyError(f"cyclic message dependency at {key}")
        self._in_progress.add(key)
        try:
            value = compute(restricted)
        finally:
            self._in_progress.discard(key)
        self.stats.cache_misses += 1
        self.stats.messages_computed += 1
        self.stats.evaluations[(kind, a, b)] += 1
        if kind in (PI_MSG, LAMBDA_MSG):
            self.stats.per_arc[(a, b) if kind == PI_MSG else (b, a)] += 1
        if self.use_cache:
            self.cache[key] = value
        return value

    # -- the five equations -----------------------------------------------

    def pi_support(self, x, ctx):
        """pi(x | c): sum over the causal cutset of the CPT-times-parent-messages kernel."""
        def compute(ctx):
            out = np.zeros(self.net.cards[x])
            for c in self._cases(self._c_plus[x], ctx):
                msgs = [self.pi_message(u, x, c) for u in self._pa[x]]
                out += kernels.pi_kernel(self._cpt(x, c), self._pcards[x], msgs)
            return out
        return self._lookup(PI, x, None, self._r_pi[x], ctx, compute)

    def lambda_support(self, x, ctx):
        """lambda(x | c): sum over the diagnostic cutset of the product of child messages."""
        def compute(ctx):
            out = np.zeros(self.net.cards[x])
            for c in self._cases(self._c_minus[x], ctx):
                term = self._indicator(x, c)
                for y in self._ch[x]:
                    term = term * self.lambda_message(y, x, c)
                out += term
            return out
        return self._lookup(LAMBDA, x, None, self._r_lam[x], ctx, compute)

    def pi_message(self, x, y, ctx):
        """Causal message from ``x`` to its child ``y``."""
        if y not in self._ch[x]:
            raise ValueError(f"{self.net.name(y)} is not a child of {self.net.name(x)}")

        def compute(ctx):
            out = np.zeros(self.net.cards[x])
            for c in self._cases(self._c_bel[x], ctx):
                pi = self.pi_support(x, c)
                inner = np.zeros(self.net.cards[x])
                for cc in self._cases(self._c_minus[x], c):
                    term = self._indicator(x, cc)
                    for z in self._ch[x]:
                        if z != y:
                            term = term * self.lambda_message(z, x, cc)
                    inner += term
                out += pi * inner
            return out
        return self._lookup(PI_MSG, x, y, self._r_pi_msg[(x, y)], ctx, compute)

    def lambda_message(self, x, u, ctx):
        """Diagnostic message from ``x`` to its parent ``u``."""
        parents = self._pa[x]
        if u not in parents:
            raise ValueError(f"{self.net.name(u)} is not a parent of {self.net.name(x)}")
        i = parents.index(u)

        def compute(ctx):
            out = np.zeros(self.net.cards[u])
            for c in self._cases(self._c_bel[x], ctx):
                lam = self.lambda_support(x, c)
                for cc in self._cases(self._c_plus[x], c):
                    msgs = [None if p == u else self.pi_message(p, x, cc) for p in parents]
                    out += kernels.lambda_kernel(self._cpt(x, cc), self._pcards[x], msgs, lam, i)
            return out
        return self._lookup(LAMBDA_MSG, x, u, self._r_lam_msg[(u, x)], ctx, compute)

    def component_belief(self, x):
        out = np.zeros(self.net.cards[x])
        for c in self._cases(self._c_bel[x], {}):
            out += self.pi_support(x, c) * self.lambda_support(x, c)
        return out

    def belief(self, x):
        """BEL(x) = Pr(x and e)."""
        bel = self.component_belief(x)
        for comp in self._comps:
            if x not in comp:
                bel = bel * self.component_belief(comp[0]).sum()
        return bel

    def beliefs(self, targets=None):
        targets = range(len(self.net)) if targets is None else targets
        return {x: self.belief(x) for x in targets}


def dc_belief(net, x, evidence=None, cutset=None, cache=True):
    engine = DynamicConditioning(net, evidence, cutset, cache=cache)
    return engine.belief(x), engine.stats


def dc_belief_all(net, evidence=None, cutset=None):
    engine = DynamicConditioning(net, evidence, cutset)
    return engine.beliefs(), engine.stats
