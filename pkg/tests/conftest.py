import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from skewloops.construct import build_cylinder_loop, construct_height
from skewloops.oval import make_support_oval
from skewloops.trigpoly import TrigPoly

settings.register_profile(
    "repo",
    deadline=None,
    max_examples=40,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

_ACCEPTANCE = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or rep.when == "teardown":
        return
    number, label = mark.args
    prev = _ACCEPTANCE.get(number, (label, True))
    _ACCEPTANCE[number] = (label, prev[1] and not rep.failed)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        label, ok = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {label}")


def random_support(rng, degree, min_v=0.1, scale=0.3):
    """Random asymmetric strictly convex support function with ``inf v > min_v``."""
    while True:
        k = np.arange(1, degree + 1)
        a = rng.normal(size=degree) * scale / k**3
        b = rng.normal(size=degree) * scale / k**3
        a[0] = b[0] = 0.0
        if degree >= 3 and abs(a[2]) + abs(b[2]) < 1e-3:
            a[2] = 0.01
        h = TrigPoly(1.0, a, b)
        try:
            s = make_support_oval(h)
        except Exception:
            continue
        if s.convexity.lower > min_v and np.any(np.abs(s.v.parity_split()[1].cos) + np.abs(s.v.parity_split()[1].sin) > 1e-6):
            return s


@pytest.fixture(scope="session")
def asym3():
    return make_support_oval(TrigPoly(1.0, [0.0, 0.0, 0.05], [0.0, 0.0, 0.0]))


@pytest.fixture(scope="session")
def asym3_height(asym3):
    return construct_height(asym3.v)


@pytest.fixture(scope="session")
def asym3_loop(asym3, asym3_height):
    return build_cylinder_loop(asym3, asym3_height)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_trig(rng, degree, scale, a0=0.0, decay=2):
    k = np.arange(1, degree + 1)
    return TrigPoly(a0, rng.normal(size=degree) * scale / k**decay, rng.normal(size=degree) * scale / k**decay)


def random_space_loop(rng, degree=4, scale=0.3):
    """Perturbed unit circle at a random height; stays away from the origin."""
    from skewloops.curves import TrigCurve

    z0 = rng.uniform(-0.5, 0.5)
    x = random_trig(rng, degree, scale) + TrigPoly(0.0, [1.0])
    y = random_trig(rng, degree, scale) + TrigPoly(0.0, [0.0], [1.0])
    z = random_trig(rng, degree, scale, a0=z0)
    return TrigCurve(x, y, z)


def random_sphere_loop(rng, degree=4, scale=0.3):
    from skewloops.quadric import sphere_loop

    return sphere_loop(random_space_loop(rng, degree, scale))


def random_sigma_loop(rng, degree=5, scale=0.3):
    """``X(t + u(t), v(t))`` with ``|u'| < 1`` and ``v > 0``."""
    from skewloops.quadric import sigma_graph_loop

    while True:
        u = random_trig(rng, degree, scale)
        v = random_trig(rng, degree, scale, a0=rng.uniform(0.4, 1.2))
        if u.coeff_sum(1) < 0.9 and v.a0 - v.coeff_sum(0) + abs(v.a0) > 0.05:
            return sigma_graph_loop(u, v)
