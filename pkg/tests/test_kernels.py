import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from suinv import _backend, _pykernels

compiled = pytest.importorskip("suinv._kernels")


def _random_stack(rng, m, d, density=0.5):
    a = rng.normal(size=(m, d, d)) + 1j * rng.normal(size=(m, d, d))
    a[rng.random(size=a.shape) > density] = 0
    return a


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(2, 4), st.integers(0, 10_000))
def test_triple_traces_agree(m, d, seed):
    g = _random_stack(np.random.default_rng(seed), m, d)
    np.testing.assert_allclose(compiled.triple_traces(g), _pykernels.triple_traces(g), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_site_operator_agrees(data):
    d = data.draw(st.integers(2, 3))
    n = data.draw(st.integers(1, 4))
    k = data.draw(st.integers(1, n))
    sites = data.draw(st.permutations(range(n)))[:k]
    rng = np.random.default_rng(data.draw(st.integers(0, 10_000)))
    stacks = [_random_stack(rng, 3, d) for _ in range(k)]
    idx = rng.integers(0, 3, size=(5, k))
    val = rng.normal(size=5) + 1j * rng.normal(size=5)
    a = compiled.site_operator(stacks, idx, val, list(sites), d, n)
    b = _pykernels.site_operator(stacks, idx, val, list(sites), d, n)
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_site_operator_kronecker_order():
    sz = np.diag([1.0, -1.0]).astype(complex)[None]
    for backend in _backend.available_backends():
        previous = _backend.set_backend(backend)
        try:
            op = _backend.site_operator([sz], [[0]], [1.0], [1], 2, 2)
        finally:
            _backend.set_backend(previous)
        np.testing.assert_array_equal(np.diag(op), [1, -1, 1, -1])


def test_repeated_sites_rejected():
    with pytest.raises(ValueError):
        _backend.site_operator([np.eye(2)[None]] * 2, [[0, 0]], [1.0], [0, 0], 2, 2)


def test_unknown_backend():
    with pytest.raises(ValueError):
        _backend.set_backend("fortran")


def test_fallback_when_extension_missing():
    code = (
        "import sys; sys.modules['suinv._kernels'] = None\n"
        "from suinv import _backend\n"
        "from suinv.su_basis import build_basis, compute_structure_tensors\n"
        "assert _backend.get_backend() == 'python', _backend.get_backend()\n"
        "assert _backend.available_backends() == ['python']\n"
        "t = compute_structure_tensors(build_basis(3))\n"
        "assert abs(t.f.dense[0, 3, 6] - 1) < 1e-12\n"
    )
    proc = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
