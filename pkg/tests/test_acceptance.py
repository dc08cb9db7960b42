"""Exit criteria, one test per criterion, each printing a PASS/FAIL line."""

import io

import numpy as np
import pytest

from opexpand.cli import main
from opexpand.contour import (
    QuadratureSettings,
    cauchy_coefficient,
    choose_contour,
    matrix_function_resolvent,
    resolvent_terms,
)
from opexpand.divided import coefficient_A1, divided_difference
from opexpand.expansion import convergence_profile, expand, matrix_taylor_oracle
from opexpand.functions import exponential, logarithm, monomial, polynomial, sine
from opexpand.lemma import (
    coefficient_from_B,
    expand_monomial_lemma,
    path_coefficient_B,
    path_coefficient_B_direct,
)

from oracles import lagrange_divided_difference, matrix_power_direct, random_disc, random_spectrum
from test_cli import DATA, GOLDEN, GOLDEN_CASES


def maxabs(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def distinct_nonzero_spectrum(rng, n, low=0.5, high=3.0, gap=0.05):
    while True:
        lam = random_spectrum(rng, n, low, high)
        if n == 1 or min(abs(a - b) for i, a in enumerate(lam) for b in lam[i + 1 :]) > gap:
            return lam


def test_1_lemma_exactness(rng, record):
    worst = 0.0
    for _ in range(50):
        n = int(rng.choice([2, 3, 4]))
        p = int(rng.integers(1, 7))
        lam = distinct_nonzero_spectrum(rng, n)
        tau = rng.uniform(-1, 1, (n, n))
        expect = matrix_power_direct(np.diag(lam) + tau, p)
        got = expand_monomial_lemma(lam, tau, p, p)
        worst = max(worst, np.linalg.norm(got - expect) / np.linalg.norm(expect))
    assert record("1 lemma exactness", worst <= 1e-10, f"worst rel Frobenius {worst:.2e} (tol 1e-10)")


def test_2_b_recurrence(rng, record):
    worst = 0.0
    for _ in range(50):
        lam = distinct_nonzero_spectrum(rng, 4)
        k = int(rng.integers(1, 4))
        n = int(rng.integers(0, 9))
        path = list(rng.integers(0, 4, k + 1))
        rec = path_coefficient_B(lam, path, k, n)
        direct = path_coefficient_B_direct(lam, path, k, n)
        if direct == 0:
            assert rec == 0
            continue
        worst = max(worst, abs(rec - direct) / abs(direct))
    assert record("2 B recurrence", worst <= 1e-11, f"worst rel {worst:.2e} (tol 1e-11)")


def test_3_coefficient_triangulation(rng, record):
    funcs = [exponential(), sine(), monomial(5), polynomial([0.5, -1, 0.25, 2, -0.75j])]
    worst_q = worst_b = 0.0
    for _ in range(50):
        k = int(rng.integers(1, 6))
        x = random_disc(rng, k, 3.0)
        for f in funcs:
            dd = divided_difference(f, x)
            q = cauchy_coefficient(f, x, choose_contour(x, f))
            worst_q = max(worst_q, abs(dd - q) / abs(dd))
        if np.all(x != 0):
            lam = np.asarray(x)
            for p in (monomial(5), monomial(int(rng.integers(k - 1, 9)))):
                dd = divided_difference(p, lam)
                b = coefficient_from_B(p, lam, list(range(k)), k - 1) if k > 1 else p(lam[0])
                scale = abs(dd) if dd != 0 else 1.0
                worst_b = max(worst_b, abs(b - dd) / scale)
    ok = worst_q <= 1e-9 and worst_b <= 1e-10
    assert record(
        "3 coefficient triangulation",
        ok,
        f"recurrence vs quadrature {worst_q:.2e} (tol 1e-9), B route {worst_b:.2e} (tol 1e-10)",
    )


def test_4_confluent_limits(record):
    funcs = [exponential(), sine(), logarithm(), monomial(4), polynomial([1, 2, -3, 0.5])]
    worst_exact = worst_near = 0.0
    for f in funcs:
        for c in (0.7, 1.3 - 0.4j, 2.2 + 0.9j):
            d1 = f.derivative(1, c)
            d2 = 0.5 * f.derivative(2, c)
            worst_exact = max(
                worst_exact,
                abs(coefficient_A1(f, c, c) - d1) / abs(d1),
                abs(divided_difference(f, [c, c, c]) - d2) / abs(d2),
            )
            gap = 1e-9
            pair = [c, c + gap]
            triple = [c, c + gap, c + 1j * gap]
            q1 = cauchy_coefficient(f, pair, choose_contour(pair, f))
            q2 = cauchy_coefficient(f, triple, choose_contour(triple, f))
            worst_near = max(worst_near, abs(q1 - d1) / abs(d1), abs(q2 - d2) / abs(d2))
    ok = worst_exact <= 1e-14 and worst_near <= 1e-7
    assert record(
        "4 confluent limits",
        ok,
        f"exact branch {worst_exact:.2e}, quadrature at gap 1e-9 {worst_near:.2e} (tol 1e-7)",
    )


def test_5_expansion_correctness(rng, record):
    worst_oracle = worst_strat = 0.0
    for _ in range(20):
        lam = random_disc(rng, 3, 1.0)
        tau = rng.uniform(-1, 1, (3, 3)) + 1j * rng.uniform(-1, 1, (3, 3))
        tau *= rng.uniform(0.01, 0.1) / np.linalg.norm(tau)
        ref = matrix_taylor_oracle(exponential(), np.diag(lam) + tau)
        r6 = expand(exponential(), lam, tau, 6)
        worst_oracle = max(worst_oracle, maxabs(r6.truncated_sum, ref))
        a = expand(exponential(), lam, tau, 4, "path_sum", stop_rtol=0)
        b = expand(exponential(), lam, tau, 4, "quadrature", stop_rtol=0)
        worst_strat = max(worst_strat, max(maxabs(x, y) for x, y in zip(a.terms, b.terms)))
    ok = worst_oracle <= 1e-9 and worst_strat <= 1e-9
    assert record(
        "5 expansion correctness",
        ok,
        f"order-6 vs oracle {worst_oracle:.2e}, path-sum vs quadrature {worst_strat:.2e} (tol 1e-9)",
    )


def test_6_polynomial_termination(rng, record):
    worst = 0.0
    for d in range(0, 6):
        for strategy in ("path_sum", "quadrature"):
            for scale in (0.1, 1.0, 10.0):
                lam = random_disc(rng, 3, 2.0)
                tau = scale * rng.uniform(-1, 1, (3, 3))
                expect = matrix_power_direct(np.diag(lam) + tau, d)
                r = expand(monomial(d), lam, tau, max(d, 1), strategy)
                worst = max(worst, np.linalg.norm(r.partial_sum(d) - expect) / np.linalg.norm(expect))
    assert record("6 polynomial termination", worst <= 1e-11, f"worst rel Frobenius {worst:.2e} (tol 1e-11)")


def test_7_order_scaling(rng, record):
    lam = np.array([0.1, 0.5, 0.9])
    tau = rng.uniform(-1, 1, (3, 3))
    tau *= 0.1 / np.linalg.norm(tau)
    prof = convergence_profile(exponential(), lam, tau, 3, [1, 1 / 2, 1 / 4, 1 / 8])
    ok = all(prof.slope(n) is not None and abs(prof.slope(n) - (n + 1)) <= 0.4 for n in (1, 2, 3))
    detail = ", ".join(f"n={n}: {prof.slope(n):.3f}" for n in (1, 2, 3))
    assert record("7 order scaling", ok, detail + " (expected n+1 +- 0.4)")


def test_8_quadrature_robustness(rng, record):
    narrow = QuadratureSettings(radius_factor=1.25)
    wide = QuadratureSettings(radius_factor=1.6)
    worst_radius = 0.0
    monotone = True
    zero_ok = True
    for _ in range(20):
        k = int(rng.integers(1, 6))
        x = random_disc(rng, k, 2.0)
        for f in (exponential(), sine(), polynomial([1, -1, 0.5, 0.2])):
            a = cauchy_coefficient(f, x, choose_contour(x, f, settings=narrow), narrow)
            b = cauchy_coefficient(f, x, choose_contour(x, f, settings=wide), wide)
            if f.polynomial_degree is not None and k > f.polynomial_degree + 1:
                # exactly zero coefficient: no relative scale, require roundoff level
                zero_ok &= abs(a) <= 1e-14 and abs(b) <= 1e-14
            else:
                worst_radius = max(worst_radius, abs(a - b) / abs(a))
            # doubling history from the default 64-node start, against a 60-digit reference
            ref = lagrange_divided_difference(f, x)
            _, info = cauchy_coefficient(f, x, choose_contour(x, f), full_output=True)
            errs = [abs(est - ref) / max(1.0, abs(ref)) for _, est in info.history]
            for prev, nxt in zip(errs, errs[1:]):
                if prev < 1e-12:
                    break
                monotone &= nxt <= 2 * prev
            monotone &= errs[-1] < 1e-12
    lam = random_disc(rng, 3, 1.0)
    tau = 0.2 * rng.uniform(-1, 1, (3, 3))
    tn = np.linalg.norm(tau)
    ta = resolvent_terms(exponential(), lam, tau, range(1, 5), choose_contour(lam, exponential(), tn, narrow), narrow)
    tb = resolvent_terms(exponential(), lam, tau, range(1, 5), choose_contour(lam, exponential(), tn, wide), wide)
    for n in range(1, 5):
        big = np.abs(ta[n]) > 1e-12
        worst_radius = max(worst_radius, float(np.max(np.abs(ta[n] - tb[n])[big] / np.abs(ta[n])[big])))
    ok = worst_radius <= 1e-10 and monotone and zero_ok
    assert record(
        "8 quadrature robustness",
        ok,
        f"radius 1.25 vs 1.6 rel change {worst_radius:.2e} (tol 1e-10), doubling monotone={monotone}, zero coefficients ok={zero_ok}",
    )


def test_9_two_oracles_agree(rng, record):
    worst = 0.0
    for _ in range(20):
        M = rng.uniform(-1, 1, (3, 3)) + 1j * rng.uniform(-1, 1, (3, 3))
        M *= rng.uniform(0.1, 1.0) / np.linalg.norm(M)
        d = np.diag(M)
        off = np.linalg.norm(M - np.diag(d))
        for f in (exponential(), sine()):
            t = matrix_taylor_oracle(f, M)
            r = matrix_function_resolvent(f, M, choose_contour(d, f, off))
            worst = max(worst, maxabs(t, r))
    assert record("9 two oracles agree", worst <= 1e-10, f"worst max-abs {worst:.2e} (tol 1e-10)")


def test_10_cli_golden(record, monkeypatch):
    monkeypatch.chdir(DATA.parent)
    results = []
    for name, (argv, code) in sorted(GOLDEN_CASES.items()):
        argv = [str(a.relative_to(DATA.parent)) if hasattr(a, "relative_to") else a for a in argv]
        runs = []
        for _ in range(2):
            out, err = io.StringIO(), io.StringIO()
            runs.append((main(argv, out, err), out.getvalue(), err.getvalue()))
        same = runs[0] == runs[1]
        golden = runs[0][1] == (GOLDEN / f"{name}.out").read_text() and runs[0][2] == (
            GOLDEN / f"{name}.err"
        ).read_text()
        results.append(same and golden and runs[0][0] == code)
    assert record("10 CLI golden reports", all(results), f"{sum(results)}/{len(results)} byte-stable with documented exit codes")
