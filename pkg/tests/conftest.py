import math

import numpy as np
import pytest
from hypothesis import strategies as st

from eesched import Instance, is_feasible

E = math.e


def random_instance(rng, *, max_epochs=5, max_G=10.0, fading=False, rho=None,
                    min_len=0.5, max_len=2.0):
    """Feasible random instance (rejection on the demand split)."""
    N = int(rng.integers(1, max_epochs + 1))
    bounds = np.concatenate([[0.0], np.cumsum(rng.uniform(min_len, max_len, N))])
    if rho is None:
        rho = 0.0 if rng.random() < 0.2 else float(rng.uniform(0.1, 4.0))
    kw = (dict(gains=rng.exponential(2.0, N).clip(0.05).tolist()) if fading
          else dict(gain=float(rng.uniform(0.5, 3.0))))
    while True:
        G = float(rng.uniform(0.5, max_G))
        ka = sorted({0} | set(rng.integers(1, N, rng.integers(0, N)).tolist())) if N > 1 else [0]
        kd = sorted({N} | set(rng.integers(1, N + 1, rng.integers(0, N + 1)).tolist()))
        a = rng.dirichlet(np.ones(len(ka))) * G
        d = rng.dirichlet(np.ones(len(kd))) * G
        a[-1] = G - a[:-1].sum()
        d[-1] = G - d[:-1].sum()
        if a[-1] < 0 or d[-1] < 0:
            continue
        inst = Instance.build(bounds.tolist(), list(zip(ka, a.tolist())),
                              list(zip(kd, d.tolist())), rho=rho, **kw)
        if is_feasible(inst):
            return inst


@st.composite
def instances(draw, fading=False, max_epochs=6):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_instance(np.random.default_rng(seed), max_epochs=max_epochs, fading=fading)


@pytest.fixture
def two_deadline():
    # a0 = 4 at t=0, 3 due at t=1, 1 due at t=2; g = 1, rho = 1
    return Instance.build([0, 1, 2], [(0, 4)], [(1, 3), (2, 1)], gain=1, rho=1)


@pytest.fixture
def on_off():
    # one unit over two seconds: the taut rate 0.5 is below r_ee = 1
    return Instance.build([0, 1, 2], [(0, 1)], [(2, 1)], gain=1, rho=1)


@pytest.fixture
def strict_single():
    # one unit in half a second: rate 2 > r_ee = 1
    return Instance.build([0, 0.5], [(0, 1)], [(1, 1)], gain=1, rho=1)


@pytest.fixture
def fading_two():
    return Instance.build([0, 1, 2], [(0, 2)], [(2, 2)], gains=[1, E**2], rho=1)


# acceptance criteria report: one line per criterion, printed after the run
ACCEPTANCE: dict[int, str] = {}


def record(criterion: int, ok: bool, detail: str = "") -> bool:
    ACCEPTANCE[criterion] = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}" + (f"  ({detail})" if detail else "")
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
