import os
import subprocess
import sys

import numpy as np
import pytest

from conftest import random_cd
from r2opuc import kernels

BACKENDS = kernels.available_backends()
needs_both = pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled extension not built")


def test_python_backend_always_available():
    assert "python" in BACKENDS
    assert kernels.BACKEND in BACKENDS


def test_environment_forces_fallback():
    env = dict(os.environ, R2OPUC_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import r2opuc; print(r2opuc.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"


@needs_both
@pytest.mark.parametrize("seed", range(5))
def test_p_eval_agrees(seed):
    cd = random_cd(seed, 30)
    py, cy = BACKENDS["python"], BACKENDS["cython"]
    for x in (-7.0, 0.0, 0.3, 12.5):
        a = py.p_eval(cd.c, cd.d, 30, x)
        b = cy.p_eval(cd.c, cd.d, 30, x)
        assert a[4] == b[4]
        np.testing.assert_allclose(a[:4], b[:4], rtol=1e-14)
    xs = np.linspace(-3, 3, 7)
    for u, v in zip(py.p_eval_many(cd.c, cd.d, 30, xs), cy.p_eval_many(cd.c, cd.d, 30, xs)):
        np.testing.assert_allclose(u, v, rtol=1e-14)


@needs_both
@pytest.mark.parametrize("seed", range(5))
def test_sturm_agrees(seed):
    cd = random_cd(seed, 25)
    py, cy = BACKENDS["python"], BACKENDS["cython"]
    for x in (-2.0, 0.1, 4.0):
        assert py.sturm_count(cd.c, cd.d, 25, x) == cy.sturm_count(cd.c, cd.d, 25, x)
    np.testing.assert_array_equal(py.sturm_zeros(cd.c, cd.d, 25), cy.sturm_zeros(cd.c, cd.d, 25))


@needs_both
@pytest.mark.parametrize("seed", range(5))
def test_twisted_kernels_agree(seed):
    n = 20
    cd = random_cd(seed, n)
    py, cy = BACKENDS["python"], BACKENDS["cython"]
    for x in cy.sturm_zeros(cd.c, cd.d, n):
        np.testing.assert_array_equal(py.twisted_ratios(cd.c, cd.d, n, x), cy.twisted_ratios(cd.c, cd.d, n, x))
        assert py.prev_at_zero(cd.c, cd.d, n, x) == cy.prev_at_zero(cd.c, cd.d, n, x)
        a = py.twisted_refine(cd.c, cd.d, n, x)
        b = cy.twisted_refine(cd.c, cd.d, n, x)
        assert a[0] == pytest.approx(b[0], rel=1e-15)
        assert a[1] == pytest.approx(b[1], rel=1e-12)
        np.testing.assert_allclose(a[2], b[2], rtol=1e-12, atol=1e-300)


@needs_both
def test_backward_chain_agrees():
    d = np.full(5000, 0.25)
    py, cy = BACKENDS["python"], BACKENDS["cython"]
    np.testing.assert_allclose(py.backward_chain(d, 5000, 10), cy.backward_chain(d, 5000, 10), rtol=1e-15)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_prev_at_zero_matches_recurrence(name):
    # small n: forward recurrence is still accurate at the zeros
    mod = BACKENDS[name]
    cd = random_cd(3, 6)
    for x in mod.sturm_zeros(cd.c, cd.d, 6):
        m, e = mod.prev_at_zero(cd.c, cd.d, 6, x)
        p, pp, _, _, ee = mod.p_eval(cd.c, cd.d, 6, x)
        assert m * 2.0 ** e == pytest.approx(pp * 2.0 ** ee, rel=1e-9)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_twisted_ratios_product(name):
    mod = BACKENDS[name]
    cd = random_cd(4, 8)
    for x in mod.sturm_zeros(cd.c, cd.d, 8):
        r = mod.twisted_ratios(cd.c, cd.d, 8, x)
        assert len(r) == 7
        m, e = mod.prev_at_zero(cd.c, cd.d, 8, x)
        assert np.prod(r) == pytest.approx(m * 2.0 ** e, rel=1e-12)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_backward_chain_closed_form(name):
    # d ≡ 1/4 from g_{K+1} = 1 gives g_n = (K + 2 - n + 1)/(2 (K + 2 - n)) exactly
    K = 1000
    g = BACKENDS[name].backward_chain(np.full(K, 0.25), K, 5)
    n = np.arange(1, 6)
    np.testing.assert_allclose(g, 0.5 + 1.0 / (2 * (K + 2 - n)), rtol=1e-12)


def test_benchmark_runs(capsys):
    import importlib.util
    import pathlib

    path = pathlib.Path(__file__).resolve().parent.parent / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    mod.main(["--n", "8", "--repeat", "1"])
    assert "sturm_zeros" in capsys.readouterr().out
