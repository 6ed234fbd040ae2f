from functools import lru_cache

import numpy as np
import pytest

from suinv import _backend
from suinv.multiparticle import collective_set
from suinv.su_basis import build_basis, compute_structure_tensors

ACCEPTANCE_LINES = []


@lru_cache(maxsize=None)
def basis_for(d):
    return build_basis(d)


@lru_cache(maxsize=None)
def tensors_for(d):
    return compute_structure_tensors(basis_for(d))


@lru_cache(maxsize=None)
def cset_for(d, n):
    return collective_set(basis_for(d), n)


PAULI = np.array(
    [[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]],
    dtype=complex,
)


@pytest.fixture(params=_backend.available_backends())
def backend(request):
    previous = _backend.set_backend(request.param)
    yield request.param
    _backend.set_backend(previous)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
