import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from reachprobe import InvalidInputError, holder_bound, lp
from reachprobe.fourball import _hypotheses, sample_configs
from reachprobe.geometry import norm
from reachprobe.lp_inequalities import (
    RELATIVE_TOL,
    chain_margins,
    clarkson_first,
    clarkson_second,
    concavity_bound,
    uniform_smoothness,
)

import oracles

N = 100_000


def _pairs(seed, dim=10, n=N):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, dim)) * rng.exponential(size=(n, 1))
    b = rng.standard_normal((n, dim)) * rng.exponential(size=(n, 1))
    # Sparse and near-parallel pairs stress the equality cases.
    a[: n // 10, 3:] = 0.0
    b[n // 10: n // 5] = a[n // 10: n // 5] * rng.uniform(-2, 2, size=(n // 10, 1))
    return a, b


def test_clarkson_first_examples():
    assert clarkson_first([1.0, 0.0], [0.0, 1.0], 2) == pytest.approx(0.0, abs=1e-15)
    u = np.array([0.3, -1.2, 4.0])
    for p in (2, 3, 4.5, 10):
        assert clarkson_first(u, u, p) == pytest.approx(0.0, abs=1e-12)


def test_clarkson_first_domain():
    with pytest.raises(InvalidInputError):
        clarkson_first([1.0], [0.0], 1.9)


def test_clarkson_first_random_p4():
    a, b = _pairs(1)
    assert clarkson_first(a, b, 4, relative=True).min() >= -RELATIVE_TOL


def test_clarkson_second_examples():
    rng = np.random.default_rng(2)
    a, w = rng.standard_normal((2, 50, 6))
    assert np.abs(clarkson_second(a, w, 2, relative=True)).max() <= 1e-10
    assert np.abs(clarkson_second(a, np.zeros_like(a), 1.5, relative=True)).max() <= 1e-12


@pytest.mark.parametrize("p", [1.0, 2.5, math.inf])
def test_clarkson_second_domain(p):
    with pytest.raises(InvalidInputError):
        clarkson_second([1.0], [0.0], p)


def test_clarkson_second_random_p15():
    a, b = _pairs(3)
    assert clarkson_second(a, b, 1.5, relative=True).min() >= -RELATIVE_TOL


def test_uniform_smoothness_examples():
    assert uniform_smoothness([1.0, 0.0], [0.0, 1.0], 4) == pytest.approx(8 - 2 * math.sqrt(2), abs=1e-12)
    rng = np.random.default_rng(4)
    a, w = rng.standard_normal((2, 50, 6))
    assert np.abs(uniform_smoothness(a, w, 2, relative=True)).max() <= 1e-10


@pytest.mark.parametrize("p", [1.5, 3.0])
def test_uniform_smoothness_random(p):
    a, b = _pairs(5)
    assert uniform_smoothness(a, b, p, relative=True).min() >= -RELATIVE_TOL


def test_concavity_examples():
    assert concavity_bound(1.0, 0.0, 0.5) == 0.0
    assert concavity_bound(0.0, 0.0, 0.3) == 0.0
    b = np.linspace(0, 3, 20)
    assert np.abs(concavity_bound(3.0, b, 1.0)).max() <= 1e-15
    assert concavity_bound(1.0, 0.5, 0.5) == pytest.approx(1 - 0.25 - math.sqrt(0.5), abs=1e-15)


@pytest.mark.parametrize("args", [(1.0, 1.5, 0.5), (1.0, -0.1, 0.5), (1.0, 0.5, 0.0), (1.0, 0.5, 1.2)])
def test_concavity_domain(args):
    with pytest.raises(InvalidInputError):
        concavity_bound(*args)


def test_concavity_random():
    rng = np.random.default_rng(6)
    a = rng.exponential(size=N) * 10
    b = a * rng.random(N)
    s = rng.uniform(1e-3, 1.0, size=N)
    margins = np.array([concavity_bound(a[i], b[i], s[i], relative=True) for i in range(0, N, 97)])
    assert margins.min() >= -RELATIVE_TOL
    for si in (0.2, 2 / 3, 0.999):
        assert concavity_bound(a, b, si, relative=True).min() >= -RELATIVE_TOL


@settings(max_examples=300)
@given(st.lists(st.floats(-50, 50), min_size=3, max_size=3),
       st.lists(st.floats(-50, 50), min_size=3, max_size=3),
       st.floats(2.0, 9.0))
def test_clarkson_first_property(u, v, p):
    m = clarkson_first(u, v, p)
    # Independent evaluation with the loop norm.
    big = 0.5 * oracles.lp_norm(u, p) ** p + 0.5 * oracles.lp_norm(v, p) ** p
    small = (oracles.lp_norm([(s + t) / 2 for s, t in zip(u, v)], p) ** p
             + oracles.lp_norm([(s - t) / 2 for s, t in zip(u, v)], p) ** p)
    assert m == pytest.approx(big - small, abs=1e-9 * max(1.0, big))
    assert m >= -RELATIVE_TOL * max(big, 1e-300)


@settings(max_examples=300)
@given(st.lists(st.floats(-50, 50), min_size=4, max_size=4),
       st.lists(st.floats(-50, 50), min_size=4, max_size=4),
       st.floats(1.05, 2.0))
def test_clarkson_second_property(a, w, p):
    assert clarkson_second(a, w, p, relative=True) >= -RELATIVE_TOL


def test_holder_examples():
    h = holder_bound(2)
    assert h.exponent == 1.0 and h.constant == pytest.approx(1.0, abs=1e-15)
    h4 = holder_bound(4)
    assert h4.exponent == 0.5
    assert h4.constant == pytest.approx(24 ** 0.25, abs=1e-12)
    assert h4.constant == pytest.approx(2.2134, abs=1e-4)
    h15 = holder_bound(1.5)
    assert h15.exponent == 0.75
    assert h15.constant == pytest.approx(math.sqrt(2 ** 1.5 / 0.75), abs=1e-12)
    assert h15.constant == pytest.approx(1.941967, abs=1e-6)


@pytest.mark.parametrize("p", [1.1, 1.5, 1.9, 2.0, 2.5, 3.0, 4.0, 8.0])
def test_holder_matches_oracle(p):
    h = holder_bound(p)
    e, c = oracles.holder(p)
    assert h.exponent == pytest.approx(min(2 / p, p / 2), abs=1e-15)
    assert h.exponent == pytest.approx(e, abs=1e-15)
    assert h.constant == pytest.approx(c, rel=1e-12)


def test_holder_continuous_across_two():
    lo, hi = holder_bound(2 - 1e-9), holder_bound(2 + 1e-9)
    assert lo.constant == pytest.approx(hi.constant, abs=1e-6)


@pytest.mark.parametrize("p", [1.5, 3.0, 4.0])
def test_holder_validity_on_fourball_configs(p):
    h = holder_bound(p)
    rng = np.random.default_rng(int(p * 10))
    ctx = lp(p)
    for r in (1.0, 0.3):
        x, u, v = sample_configs(rng, 20_000, 6, r, ctx)
        ok = _hypotheses(x, u, v, r, ctx)
        lhs = norm(u - v, ctx) / r
        rhs = h.rhs(2 * norm(x, ctx), r)
        assert np.all(lhs[ok] <= rhs[ok] + 1e-9)


@pytest.mark.parametrize("p", [1.3, 1.5, 2.0, 3.0, 4.0])
def test_chain_steps_nonnegative(p):
    rng = np.random.default_rng(7)
    ctx = lp(p)
    x, u, v = sample_configs(rng, 20_000, 5, 1.0, ctx)
    ok = _hypotheses(x, u, v, 1.0, ctx)
    margins = chain_margins(x[ok], u[ok], v[ok], 1.0, p)
    assert set(margins) >= {"hypotheses", "uniform_smoothness", "concavity"}
    for name, m in margins.items():
        assert m.min() >= -1e-10, name


def test_chain_step_names_by_branch():
    x, u, v = np.array([1.0, 0.0]), np.array([0.0, 1.0]), np.array([0.0, -1.0])
    assert "clarkson_first" in chain_margins(x, u, v, 1.0, 3)
    assert "clarkson_second" in chain_margins(x, u, v, 1.0, 1.5)
