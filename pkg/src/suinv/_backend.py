"""Kernel dispatch: compiled Cython core when importable, numpy otherwise."""

from . import _pykernels

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_BACKENDS = {"python": _pykernels}
if _compiled is not None:
    _BACKENDS["compiled"] = _compiled

_active = "compiled" if _compiled is not None else "python"


def available_backends():
    return sorted(_BACKENDS)


def get_backend():
    return _active


def set_backend(name):
    """Select the kernel implementation; returns the previous one."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; available: {available_backends()}")
    previous, _active = _active, name
    return previous


def triple_traces(gens):
    return _BACKENDS[_active].triple_traces(gens)


def site_operator(stacks, term_idx, term_val, sites, d, n_particles):
    sites = [int(s) for s in sites]
    if len(set(sites)) != len(sites):
        raise ValueError("sites must be distinct")
    return _BACKENDS[_active].site_operator(stacks, term_idx, term_val, sites, int(d), int(n_particles))
