"""End-to-end acceptance checks, one test and one summary line per criterion.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the
"acceptance criteria" summary section) or directly with
``python tests/test_acceptance.py``.
"""

import json
import math
import os
import subprocess
import sys
import time

import numpy as np

from reachprobe import (
    EUCLIDEAN,
    FourBallConfig,
    build_certificate,
    check_euclidean,
    delta0_certificate,
    envelope_check,
    equivalence_report,
    holder_bound,
    pair_lipschitz_margin,
    lp,
    run_trials,
)
from reachprobe.certificates import ball_margins
from reachprobe.domains import LocalGraph, builtin, extract_local_graph, sample_boundary
from reachprobe.fourball import _hypotheses, lp_bound, sample_configs
from reachprobe.geometry import norm
from reachprobe.lp_inequalities import (
    RELATIVE_TOL,
    clarkson_first,
    clarkson_second,
    concavity_bound,
    uniform_smoothness,
)

import conftest
from graphs import random_graph


def record(n, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}"
    conftest.ACCEPTANCE_LINES[n] = line
    print(line)
    assert ok, line


def test_criterion_1_four_ball():
    t0 = time.perf_counter()
    counts = {}
    for dim in (2, 3, 8):
        rep = run_trials(EUCLIDEAN, dim, 1.0, 1_000_000, seed=42)
        counts[dim] = rep.violations
    tight = check_euclidean(FourBallConfig([1.0, 0.0], [0.0, 1.0], [0.0, -1.0], 1.0))
    gap = abs(tight.actual_value - tight.bound_value)
    elapsed = time.perf_counter() - t0
    ok = sum(counts.values()) == 0 and tight.hypotheses_hold and gap <= 1e-12 and elapsed < 30
    record(1, ok, f"violations by dim {counts}, tight gap {gap:.1e}, {elapsed:.1f}s (< 30s)")


def test_criterion_2_lp_four_ball():
    t0 = time.perf_counter()
    counts = {}
    for p in (1.5, 2.0, 3.0, 4.0):
        counts[p] = run_trials(lp(p), 16, 1.0, 100_000, seed=2).violations
    rng = np.random.default_rng(3)
    x, _, _ = sample_configs(rng, 10_000, 16, 1.0, EUCLIDEAN)
    xn = norm(x)
    hi, _ = lp_bound(xn, 1.0, 2.0, "high")
    lo, _ = lp_bound(xn, 1.0, 2.0, "low")
    euclid_sq = (2 * xn) ** 2
    agree = float(max(np.abs(hi - euclid_sq).max(), np.abs(lo - euclid_sq).max()))
    elapsed = time.perf_counter() - t0
    ok = sum(counts.values()) == 0 and agree <= 1e-9 and elapsed < 60
    record(2, ok, f"violations by p {counts}, p=2 branch gap {agree:.1e}, {elapsed:.1f}s (< 60s)")


def _pairs(rng, n=100_000, dim=10):
    a = rng.standard_normal((n, dim)) * rng.exponential(size=(n, 1))
    b = rng.standard_normal((n, dim)) * rng.exponential(size=(n, 1))
    return a, b


def test_criterion_3_inequality_suite():
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    worst = {}
    a, b = _pairs(rng)
    worst["clarkson_first"] = min(clarkson_first(a, b, p, relative=True).min() for p in (2.5, 3.0, 4.0, 6.0))
    worst["clarkson_second"] = min(clarkson_second(a, b, p, relative=True).min() for p in (1.2, 1.5, 1.8))
    worst["uniform_smoothness"] = min(uniform_smoothness(a, b, p, relative=True).min() for p in (1.2, 1.5, 3.0, 4.0))
    big = rng.exponential(size=100_000) * 10
    small = big * rng.random(100_000)
    worst["concavity_bound"] = min(concavity_bound(big, small, s, relative=True).min() for s in (0.2, 0.5, 2 / 3, 0.9))
    at_two = max(
        np.abs(clarkson_first(a, b, 2, relative=True)).max(),
        np.abs(clarkson_second(a, b, 2, relative=True)).max(),
        np.abs(uniform_smoothness(a, b, 2, relative=True)).max(),
        np.abs(concavity_bound(big, small, 2 / 2, relative=True)).max(),
    )
    elapsed = time.perf_counter() - t0
    ok = min(worst.values()) >= -RELATIVE_TOL and at_two <= 1e-10 and elapsed < 30
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    record(3, ok, f"worst relative margins: {detail}; max |margin| at p=2 {at_two:.1e}; {elapsed:.1f}s (< 30s)")


def test_criterion_4_equivalence_instances():
    t0 = time.perf_counter()
    checks = []
    notes = []
    for R in (1.0, 2.0):
        rep = equivalence_report(builtin("ball", R=R), 2000, seed=0)
        checks += [abs(rep.r_support - R) <= 0.01 * R, abs(1 / rep.lip_normal - R) <= 0.01 * R]
        notes.append(f"ball R={R:g}: r={rep.r_support:.5f} 1/lip={1 / rep.lip_normal:.5f}")
    rep = equivalence_report(builtin("ellipsoid", a=2, b=1), 2000, seed=0)
    checks += [0.49 <= rep.r_support <= 0.51, 1.96 <= rep.lip_normal <= 2.04, 0.96 <= rep.product <= 1.04]
    notes.append(f"ellipse: r={rep.r_support:.5f} lip={rep.lip_normal:.5f} prod={rep.product:.5f}")
    rep = equivalence_report(builtin("dumbbell", delta=0.1), 2000, seed=0)
    checks += [rep.r_support <= 0.11, rep.lip_normal >= 9.0, 0.9 <= rep.product <= 1.1]
    notes.append(f"dumbbell: r={rep.r_support:.5f} lip={rep.lip_normal:.4f} prod={rep.product:.5f}")
    elapsed = time.perf_counter() - t0
    record(4, all(checks) and elapsed < 60, "; ".join(notes) + f"; {elapsed:.1f}s (< 60s)")


def _certificate_margins(d, r, count, seed, extra=None):
    s = sample_boundary(d, 2000, seed=seed)
    if extra is not None:
        s = s.augmented(extra)
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(s), count, replace=False)
    certs = [build_certificate(s, int(i), r) for i in idx]
    return [pair_lipschitz_margin(a, b) for k, a in enumerate(certs) for b in certs[k + 1:]], s


def test_criterion_5_certificate_pairs():
    ball_m, _ = _certificate_margins(builtin("ball"), 1.0, 50, 5)
    ell_m, _ = _certificate_margins(builtin("ellipsoid", a=2, b=1), 0.45, 50, 6)
    margins = ball_m + ell_m
    _, s = _certificate_margins(builtin("ball"), 1.0, 2, 7, extra=[[1.0, 0.0], [-1.0, 0.0]])
    n = len(s)
    tight = pair_lipschitz_margin(build_certificate(s, n - 2, 1.0), build_certificate(s, n - 1, 1.0))
    ok = len(margins) >= 1000 and min(margins) >= -1e-9 and abs(tight) <= 1e-9
    record(5, ok, f"{len(margins)} verified pairs, worst margin {min(margins):.2e}, antipodal margin {tight:.1e}")


def test_criterion_6_graph_certificates():
    par = LocalGraph.from_function(lambda x: 0.5 * np.sum(x * x, -1), lambda x: x, 1.0, 4.0, 41)
    flat = LocalGraph.from_function(lambda x: 0 * x[..., 0], lambda x: 0 * x, 1.0, 2.0, 41)
    circ = extract_local_graph(builtin("ball"), [1.0, 0.0], 0.5, 0.5, 41)
    certs = [delta0_certificate(g, 1.0) for g in (par, flat, circ)]
    named_ok = (certs[0].delta0 == 0.5 and all(c.envelope_ok and c.balls_ok for c in certs)
                and all(envelope_check(g, 1.0)[0] for g in (par, flat, circ)))
    rng = np.random.default_rng(6)
    applicable = failures = 0
    for _ in range(1000):
        g, lip = random_graph(rng)
        r = rng.uniform(0.3, 1.5) / lip
        if not envelope_check(g, r)[0]:
            continue
        applicable += 1
        c = delta0_certificate(g, r)
        if not (c.balls_ok and ball_margins(g, c.delta0).min() >= -1e-9):
            failures += 1
    ok = named_ok and failures == 0 and applicable >= 500
    record(6, ok, f"paraboloid delta0={certs[0].delta0!r}, named graphs ok={named_ok}; "
                  f"implication failures {failures} of {applicable} graphs passing the envelope (1000 drawn)")


def test_criterion_7_holder_consistency():
    h2 = holder_bound(2)
    base_ok = h2.exponent == 1.0 and math.isclose(h2.constant, 1.0, abs_tol=1e-15)
    rng = np.random.default_rng(7)
    violations = {}
    for p in (1.5, 3.0, 4.0):
        ctx, hb = lp(p), holder_bound(p)
        got, bad = 0, 0
        while got < 100_000:
            x, u, v = sample_configs(rng, 50_000, 8, 1.0, ctx)
            ok = _hypotheses(x, u, v, 1.0, ctx)
            lhs = norm(u - v, ctx)[ok]
            rhs = hb.rhs(2 * norm(x, ctx)[ok], 1.0)
            take = min(100_000 - got, lhs.size)
            bad += int(np.count_nonzero(lhs[:take] > rhs[:take] + 1e-9))
            got += take
        violations[p] = bad
    ok = base_ok and sum(violations.values()) == 0
    record(7, ok, f"holder_bound(2)=({h2.exponent:g}, {h2.constant:g}); violations per p over 1e5 configs {violations}")


def _cli(args, threads):
    env = dict(os.environ, REACHPROBE_THREADS=str(threads))
    res = subprocess.run([sys.executable, "-m", "reachprobe", *args], capture_output=True, env=env, check=False)
    return res.returncode, res.stdout


def test_criterion_8_determinism():
    runs = {
        "analyze": ["analyze", "--builtin", "dumbbell", "--samples", "1000", "--seed", "3"],
        "fourball": ["fourball", "--dim", "4", "--trials", "200000", "--seed", "11"],
    }
    identical = {}
    for name, args in runs.items():
        outs = [_cli(args, t) for t in (1, 4, 8, 4)]
        identical[name] = all(o == outs[0] for o in outs) and outs[0][0] == 0 and json.loads(outs[0][1])
    ok = all(bool(v) for v in identical.values())
    record(8, ok, "byte-identical JSON under 1/4/8 threads (plus a repeat): "
                  + ", ".join(f"{k}={bool(v)}" for k, v in identical.items()))


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
