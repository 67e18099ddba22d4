import os

import numpy as np
import pytest

from alm.backend import available_backends, default_backend, run_paths, set_threads
from alm.engine import LiabilityParams
from alm.rates import ShiftFunction, VasicekPPModel
from alm.scenarios import EquityParams, simulate
from alm.valuation import build_inputs

MODEL = VasicekPPModel(x0=0.02, theta=0.02, k=0.2, sigma_r=0.01,
                       shift=ShiftFunction.zero(45))
EQ = EquityParams(s0=1.0, sigma_s=0.1, gamma=0.2)
LIAB = LiabilityParams(r_g=0.015)


def make_inputs(engine="ladder", n_paths=400, horizon=15, n=10):
    scn = simulate(MODEL, EQ, horizon, n_paths, seed=314)
    return build_inputs(scn, MODEL, MODEL, EQ, LIAB, 0.08, n, engine=engine)


@pytest.mark.parametrize("engine", ["ladder", "proxy"])
def test_backends_agree_to_near_machine_precision(engine):
    inp = make_inputs(engine)
    a = run_paths(inp, backend="numpy", dump_ledger=True)
    b = run_paths(inp, backend="numba", dump_ledger=True)
    np.testing.assert_allclose(a.bof, b.bof, rtol=1e-11, atol=1e-13)
    np.testing.assert_allclose(a.bel, b.bel, rtol=1e-11, atol=1e-13)
    np.testing.assert_array_equal(a.case, b.case)
    np.testing.assert_array_equal(a.bailouts, b.bailouts)
    mask = ~np.isnan(a.ledger)
    np.testing.assert_allclose(a.ledger[mask], b.ledger[mask], rtol=1e-9,
                               atol=1e-12)


def test_results_identical_across_thread_counts():
    inp = make_inputs(n_paths=600)
    set_threads(1)
    one = run_paths(inp, backend="numba")
    set_threads(2)
    two = run_paths(inp, backend="numba")
    set_threads(None)
    np.testing.assert_array_equal(one.bof, two.bof)
    np.testing.assert_array_equal(one.bel, two.bel)
    np.testing.assert_array_equal(one.r_ph, two.r_ph)
    np.testing.assert_array_equal(one.case, two.case)


def test_results_independent_of_path_count():
    # slicing a bigger batch reproduces the small batch bit for bit
    scn_small = simulate(MODEL, EQ, 12, 50, seed=2718)
    scn_big = simulate(MODEL, EQ, 12, 300, seed=2718)
    inp_small = build_inputs(scn_small, MODEL, MODEL, EQ, LIAB, 0.05, 8)
    inp_big = build_inputs(scn_big, MODEL, MODEL, EQ, LIAB, 0.05, 8)
    for backend in available_backends():
        small = run_paths(inp_small, backend=backend)
        big = run_paths(inp_big, backend=backend)
        np.testing.assert_array_equal(small.bof, big.bof[:50])
        np.testing.assert_array_equal(small.bel, big.bel[:50])


def test_env_flag_selects_backend(monkeypatch):
    monkeypatch.setenv("ALM_BACKEND", "numpy")
    assert default_backend() == "numpy"
    monkeypatch.setenv("ALM_BACKEND", "numba")
    assert default_backend() == "numba"
    monkeypatch.setenv("ALM_BACKEND", "auto")
    assert default_backend() in available_backends()
    monkeypatch.setenv("ALM_BACKEND", "fortran")
    with pytest.raises(ValueError, match="ALM_BACKEND"):
        default_backend()
