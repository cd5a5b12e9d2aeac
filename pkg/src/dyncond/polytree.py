"""Pearl's polytree algorithm with demand-driven, memoized message passing.

Evidence enters as a per-variable weight vector folded into the diagnostic
support of the observed variable.  Beliefs are unnormalized: ``Pr(x and e)``.
"""
import numpy as np

from . import kernels
from .errors import StructuralError
from .network import components, evidence_mask, is_singly_connected


class PolytreeState:
    """Message store for one query context on a singly connected network.

    ``weights`` optionally overrides the evidence vectors (one array per
    variable); it is how conditioned networks inject their cutset indicators.
    """

    def __init__(self, net, evidence=None, weights=None):
        if not is_singly_connected(net):
            raise StructuralError("polytree algorithm requires a singly connected network")
        self.net = net
        self.evidence = dict(evidence or {})
        self.weights = weights if weights is not None else evidence_mask(net, self.evidence)
        self._cpt2d = [np.ascontiguousarray(c.table) for c in net.cpts]
        self._pcards = [tuple(net.cards[p] for p in ps) for ps in net.parents]
        self._pi = {}
        self._lam = {}
        self._pi_msg = {}
        self._lam_msg = {}
        self._comp = None

    def compute_pi(self, x):
        """Causal support pi(x) = Pr(x and e_X^+)."""
        if x not in self._pi:
            msgs = [self.pi_message(u, x) for u in self.net.parents[x]]
            self._pi[x] = kernels.pi_kernel(self._cpt2d[x], self._pcards[x], msgs)
        return self._pi[x]

    def compute_lambda(self, x):
        """Diagnostic support lambda(x) = Pr(e_X^- | x), evidence indicator included."""
        if x not in self._lam:
            out = self.weights[x].copy()
            for y in self.net.children[x]:
                out *= self.lambda_message(y, x)
            self._lam[x] = out
        return self._lam[x]

    def pi_message(self, x, y):
        """Message pi_Y(x) sent from ``x`` to its child ``y``."""
        key = (x, y)
        if key not in self._pi_msg:
            if y not in self.net.children[x]:
                raise ValueError(f"{self.net.name(y)} is not a child of {self.net.name(x)}")
            out = self.compute_pi(x) * self.weights[x]
            for z in self.net.children[x]:
                if z != y:
                    out = out * self.lambda_message(z, x)
            self._pi_msg[key] = out
        return self._pi_msg[key]

    def lambda_message(self, x, u):
        """Message lambda_X(u) sent from ``x`` to its parent ``u``."""
        key = (x, u)
        if key not in self._lam_msg:
            parents = self.net.parents[x]
            if u not in parents:
                raise ValueError(f"{self.net.name(u)} is not a parent of {self.net.name(x)}")
            i = parents.index(u)
            msgs = [None if p == u else self.pi_message(p, x) for p in parents]
            self._lam_msg[key] = kernels.lambda_kernel(
                self._cpt2d[x], self._pcards[x], msgs, self.compute_lambda(x), i)
        return self._lam_msg[key]

    def messages_computed(self):
        return len(self._pi_msg) + len(self._lam_msg)

    def component_belief(self, x):
        return self.compute_pi(x) * self.compute_lambda(x)

    def belief(self, x):
        """BEL(x) = Pr(x and e), including evidence mass of other components."""
        bel = self.component_belief(x)
        if self._comp is None:
            self._comp = components(self.net)
        for comp in self._comp:
            if x not in comp:
                bel = bel * self.component_belief(comp[0]).sum()
        return bel


def polytree_belief(net, x, evidence=None):
    return PolytreeState(net, evidence).belief(x)
