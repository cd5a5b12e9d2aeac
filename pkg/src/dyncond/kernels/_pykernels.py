"""Pure-numpy contraction kernels (fallback when the compiled core is absent)."""
import numpy as np


def pi_kernel(cpt, cards, msgs):
    """out[x] = sum_u cpt[u, x] * prod_i msgs[i][u_i]."""
    t = cpt.reshape(tuple(cards) + (cpt.shape[1],))
    for m in msgs:
        t = np.tensordot(m, t, axes=(0, 0))
    return np.ascontiguousarray(t, dtype=np.float64)


def lambda_kernel(cpt, cards, msgs, lam, i):
    """out[u_i] = sum_x lam[x] sum_{u_k, k != i} cpt[u, x] * prod_{k != i} msgs[k][u_k].

    ``msgs[i]`` is ignored.
    """
    t = cpt.reshape(tuple(cards) + (cpt.shape[1],)) @ lam
    for k in range(len(cards) - 1, -1, -1):
        if k != i:
            t = np.tensordot(t, msgs[k], axes=(k, 0))
    return np.ascontiguousarray(t, dtype=np.float64)
