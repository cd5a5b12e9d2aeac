"""Hot contraction kernels behind the polytree and dynamic-conditioning engines.

The compiled core (``_ckernels``, built from Cython) is used when importable;
otherwise the numpy implementation in ``_pykernels`` is selected.
:func:`use_backend` switches explicitly, e.g. for benchmarks.
"""
from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["compiled"] = _ckernels

backend = "compiled" if _ckernels is not None else "python"
pi_kernel = BACKENDS[backend].pi_kernel
lambda_kernel = BACKENDS[backend].lambda_kernel


def use_backend(name):
    """Select ``"python"`` or ``"compiled"``; returns the previously active name."""
    global backend, pi_kernel, lambda_kernel
    if name not in BACKENDS:
        raise ValueError(f"kernel backend {name!r} unavailable; have {sorted(BACKENDS)}")
    previous = backend
    backend = name
    pi_kernel = BACKENDS[name].pi_kernel
    lambda_kernel = BACKENDS[name].lambda_kernel
    return previous
