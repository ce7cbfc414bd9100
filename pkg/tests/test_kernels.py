import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from secplf import _kernels_py, kernels
from tests.oracles import brute_max_delta, brute_window_min

BACKENDS = [_kernels_py]
if kernels.compiled_backend is not None:
    BACKENDS.append(kernels.compiled_backend)

series = st.lists(st.integers(1, 6), min_size=2, max_size=80).map(lambda xs: np.array(xs, dtype=np.float64))
eps_values = st.sampled_from([1.25, 1.5, 2.0, 1.0 + 2**-20])


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda m: m.__name__)
@given(d=series, data=st.data(), eps=eps_values)
def test_against_brute_force(backend, d, data, eps):
    T = data.draw(st.integers(1, len(d) - 1))
    assert np.array_equal(backend.window_min(d, T), brute_window_min(d, T))
    assert np.array_equal(backend.max_delta(d, T, eps), brute_max_delta(d, T, eps))
    assert backend.count_within(d, T, eps) == int(np.count_nonzero(brute_max_delta(d, T, eps) <= 0))


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda m: m.__name__)
@given(d=series, eps=eps_values)
def test_lags(backend, d, eps):
    lags = backend.exceedance_lags(d, eps)
    for m in range(len(d)):
        hits = [m - j for j in range(m + 1) if eps * d[j] < d[m]]
        assert lags[m] == (min(hits) if hits else -1)


def test_backends_agree_on_random_walk():
    rng = np.random.default_rng(0)
    d = 100 * np.exp(np.cumsum(rng.normal(0, 0.03, 50_000)))
    ref = BACKENDS[0]
    for other in BACKENDS[1:]:
        for T in (1, 7, 600, 4999):
            assert np.array_equal(ref.max_delta(d, T, 1.25), other.max_delta(d, T, 1.25))
            assert ref.count_within(d, T, 1.25) == other.count_within(d, T, 1.25)
        assert np.array_equal(ref.exceedance_lags(d, 1.25), other.exceedance_lags(d, 1.25))


def test_window_longer_than_series():
    for b in BACKENDS:
        assert b.window_min(np.ones(3), 5).shape == (0,)


def test_backend_name():
    assert kernels.BACKEND in ("compiled", "python")


def test_pure_python_switch():
    import os
    import subprocess
    import sys

    env = dict(os.environ, SECPLF_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from secplf import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
