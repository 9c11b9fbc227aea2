"""Acceptance suite: one test per criterion, one PASS/FAIL line per criterion.

The lines are collected in ``RESULTS`` and printed at the end of the pytest
session (see ``conftest.py``).  Run directly with ``python3 tests/test_acceptance.py``.

Printed reference values are compared with :func:`printed_ulps`: a computed
value agrees with a printed one when it lies within one unit of the last
printed digit, which accepts both rounded and truncated printing.
"""

import functools
import random
import sys
from fractions import Fraction

import pytest

from oracles import bisect_root, gershgorin_bound, isolate_roots
from simquad.hessenberg import certified_eigenpairs, eigen_nodes, eval_typeII, residual_bound
from simquad.precision import PrecisionContext, printed_ulps, to_decimal
from simquad.quadrature import (
    integrate,
    make_rule,
    named_integrand,
    eigen_weights,
    verify_exactness,
    weight_report,
    weights_oracle,
)
from simquad.systems import BesselI, BesselK, besseli_coeffs, besselk_coeffs

RESULTS = {}

K10 = BesselK("1", "0")
I01 = BesselI("0", "1")
CTX100 = PrecisionContext(100)

# nodes, weights1, weights2 for BesselK(1, 0), N = 10 (20 fractional digits)
TABLE_K = [
    ("0.52720348133440875760", "0.27736269648616286974", "0.26086734230400106004"),
    ("2.74106066716069179819", "0.46938499819336417730", "0.88799214753397210390"),
    ("8.13937609771412899056", "0.21135584109286564463", "0.65379039925659229785"),
    ("18.66164146312871349710", "0.03854365644852726770", "0.17589229666877292663"),
    ("36.89653691488348638176", "0.00322544756122977083", "0.02038307627872880093"),
    ("66.43703332978391524587", "0.00012523808693942895", "0.00105166051829272396"),
    ("112.55686514754090244347", "0.00000210903533490802", "0.00002289663649071884"),
    ("183.67841427499791701294", "0.00000001307455465436", "0.00000018043669350953"),
    ("295.27746298319776238423", "0.00000000002101777610", "0.00000000036637784733"),
    ("485.08440564025807348828", "0.00000000000000350239", "0.00000000000007801100"),
]

# nodes, weights1, weights2 for BesselI(0, 1), N = 10 (10 fractional digits)
TABLE_I = [
    ("0.1531952228", "0.3913749988", "0.0557885974"),
    ("0.8105837014", "0.8175616919", "0.4874004644"),
    ("2.0077223654", "0.8459198767", "0.9551942639"),
    ("3.7719525634", "0.4850707607", "0.8091738873"),
    ("6.1482336073", "0.1517396396", "0.3357737316"),
    ("9.2079873838", "0.0246520172", "0.0683288497"),
    ("13.0663024491", "0.0019027391", "0.0063827530"),
    ("17.9203555594", "0.0000595495", "0.0002366956"),
    ("24.1543375116", "0.0000005543", "0.0000025816"),
    ("32.7593296369", "0.0000000007", "0.0000000038"),
]

# quadrature of exp(-x) against BesselK(1, 0)
TABLE_EXP = {
    10: ("0.1940521520", "0.2114457811"),
    20: ("0.1926653563", "0.2109395236"),
    30: ("0.1926958911", "0.2109610461"),
    40: ("0.1926947184", "0.2109576142"),
    50: ("0.1926947165", "0.2109579157"),
}
EXP_REFERENCE = ("0.1926947246", "0.2109579130")
EXP_BOLD_DIGITS = (7, 8)

# quadrature of cos(x) against BesselI(0, 1)
TABLE_COS = {
    10: ("0.328340082411357", "-0.395132567462746"),
    20: ("0.32822497721656944454", "-0.39521953865314722695"),
    30: ("0.32822497668527696693", "-0.395219541606806392096"),
    40: ("0.3282249766852771231037346217", "-0.39521954160680745592554825999940"),
    50: ("0.32822497668527712310416035472", "-0.3952195416068074559216312825809"),
}
COS_REFERENCE = ("0.328224976685277123104160354501976758", "-0.39521954160680745592163128352397786234")
COS_MIN_DIGITS = 26


@functools.lru_cache(maxsize=None)
def rule100(system, N):
    return make_rule(system, N, CTX100)


def record(n, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  criterion {n:2d}: {detail}"
    RESULTS[n] = line
    print(line)
    return ok


def agreeing_digits(x, reference: str) -> int:
    """Leading fractional digits shared by ``x`` and ``reference`` (sign must match)."""
    a = f"{to_decimal(x):f}"
    if a.startswith("-") != reference.startswith("-"):
        return 0
    fa, fb = a.split(".")[1], reference.split(".")[1]
    if a.split(".")[0] != reference.split(".")[0]:
        return 0
    n = 0
    for p, q in zip(fa, fb):
        if p != q:
            break
        n += 1
    return n


def _table_mismatches(rule, table):
    bad = []
    for j, row in enumerate(table):
        got = (rule.nodes[j], rule.weights1[j], rule.weights2[j])
        for col, value, printed in zip(("node", "weight1", "weight2"), got, row):
            if printed_ulps(value, printed) >= 1:
                bad.append(f"row {j + 1} {col}: printed {printed}, computed {to_decimal(value):.{len(printed.split('.')[1]) + 3}f}")
    return bad


# ---------------------------------------------------------------------------


def test_c01_besselk_table():
    rule = make_rule(K10, 10, CTX100)
    bad = _table_mismatches(rule, TABLE_K)
    ok = record(1, not bad, f"BesselK(1,0) N=10 digits=100: {30 - len(bad)}/30 entries agree to 20 printed digits" + (f"; {bad}" if bad else ""))
    assert ok, bad


ERRATUM = "the printed node 24.1543375116 of row 9 differs from the true zero 24.1543375106 in its 9th decimal"


@pytest.mark.xfail(strict=True, reason=ERRATUM)
def test_c02_besseli_table():
    rule = make_rule(I01, 10, PrecisionContext(50))
    bad = _table_mismatches(rule, TABLE_I)
    ok = record(2, not bad, f"BesselI(0,1) N=10: {30 - len(bad)}/30 entries agree to 10 printed digits" + (f"; {bad}" if bad else ""))
    assert ok, bad


def test_c02_besseli_table_except_erratum():
    # every other entry agrees; the erratum row is pinned to the independently isolated zero
    rule = make_rule(I01, 10, PrecisionContext(50))
    bad = _table_mismatches(rule, TABLE_I)
    assert len(bad) == 1 and bad[0].startswith("row 9 node")
    assert printed_ulps(rule.nodes[8], "24.1543375106") < 1


def test_c03_exp_integrals():
    f = named_integrand("exp_neg", CTX100)
    bad, last = [], None
    for N, printed in TABLE_EXP.items():
        last = integrate(rule100(K10, N), f)
        for name, value, p in zip(("I1", "I2"), last, printed):
            if printed_ulps(value, p) >= 1:
                bad.append(f"N={N} {name}: printed {p}, computed {to_decimal(value):.13f}")
    digits = [agreeing_digits(v, ref) for v, ref in zip(last, EXP_REFERENCE)]
    ref_ok = all(d >= need for d, need in zip(digits, EXP_BOLD_DIGITS))
    ok = record(3, not bad and ref_ok, f"exp(-x) on BesselK(1,0), N=10..50: table rows {'agree' if not bad else bad}; N=50 shares {digits} digits with the reference values (need {list(EXP_BOLD_DIGITS)})")
    assert ok


def test_c04_cos_integrals():
    f = named_integrand("cos", CTX100)
    bad, last = [], None
    for N, printed in TABLE_COS.items():
        last = integrate(rule100(I01, N), f)
        for name, value, p in zip(("J1", "J2"), last, printed):
            if printed_ulps(value, p) >= 1:
                bad.append(f"N={N} {name}: printed {p}, computed {to_decimal(value):.36f}")
    digits = [agreeing_digits(v, ref) for v, ref in zip(last, COS_REFERENCE)]
    ref_ok = min(digits) >= COS_MIN_DIGITS
    ok = record(4, not bad and ref_ok, f"cos(x) on BesselI(0,1), N=10..50: table rows {'agree' if not bad else bad}; N=50 shares {digits} digits with the reference values (need {COS_MIN_DIGITS})")
    assert ok


def test_c05_exactness():
    from hypothesis import given, settings
    from hypothesis import strategies as st

    failures = []
    for system in (K10, I01):
        for N in range(1, 13):
            rep = verify_exactness(make_rule(system, N, CTX100), system)
            if not rep.passed:
                failures.append(f"{system} N={N}")

    ctx = PrecisionContext(40)

    @settings(max_examples=25, deadline=None, database=None)
    @given(
        st.sampled_from(["K", "I"]),
        st.integers(1, 12),
        st.fractions(min_value=0, max_value=4, max_denominator=8),
        st.fractions(min_value=Fraction(1, 4), max_value=4, max_denominator=8),
    )
    def random_parameters(kind, N, p, q):
        p, q = f"{float(p):g}", f"{float(q):g}"
        system = BesselK(p, q) if kind == "K" else BesselI(p, q)
        rep = verify_exactness(make_rule(system, N, ctx), system)
        if not rep.passed:
            failures.append(f"{system} N={N}")
        assert rep.passed

    try:
        random_parameters()
    except AssertionError:
        pass
    ok = record(5, not failures, "exactness at the claimed degrees, N=1..12, both systems (digits=100) plus 25 random parameter draws (digits=40)" + (f"; failed {failures}" if failures else ""))
    assert ok


def test_c06_oracle_equivalence():
    worst = 0
    for system in (K10, I01):
        for N in range(1, 21):
            rule = make_rule(system, N, CTX100)
            o1, o2 = weights_oracle(rule.nodes, system, rule.ctx)
            for got, want in zip(rule.weights1 + rule.weights2, list(o1) + list(o2)):
                worst = max(worst, abs(got - want) / abs(want))
    tol = CTX100.tol(25)
    ok = record(6, worst <= tol, f"eigenvector weights vs moment-Vandermonde weights, N<=20: worst relative difference {CTX100.mp.nstr(worst, 3)} (tol {CTX100.mp.nstr(tol, 2)})")
    assert ok


def _coeff_fn(system):
    if system is K10:
        return lambda k: besselk_coeffs("1", "0", k)
    return lambda k: besseli_coeffs("0", "1", k)


def test_c07_eigen_certificates():
    failures, guards = [], {}
    for system in (K10, I01):
        for N in range(1, 51):
            pairs, used = certified_eigenpairs(system, N, CTX100)
            guards[(str(system), N)] = used.guard
            for p in pairs:
                if p.right_residual > residual_bound(p.node, p.right, CTX100) or p.left_residual > residual_bound(p.node, p.left, CTX100):
                    failures.append(f"{system} N={N} x={CTX100.mp.nstr(p.node, 10)}")
    worst_iso = 0
    for system in (K10, I01):
        coeffs = _coeff_fn(system)
        for N in range(1, 9):
            brackets = isolate_roots(coeffs, N, gershgorin_bound(coeffs, N), samples=1500)
            if len(brackets) != N:
                failures.append(f"{system} N={N}: isolated {len(brackets)} roots")
                continue
            want = [bisect_root(coeffs, N, br, CTX100.mp, CTX100.tol(-10)) for br in brackets]
            for g, w in zip(eigen_nodes(system, N, CTX100), want):
                worst_iso = max(worst_iso, abs(g - w) / max(1, abs(w)))
    iso_ok = worst_iso <= CTX100.tol(15)
    top = max(guards.values())
    ok = record(7, not failures and iso_ok, f"residual certificates for N=1..50 on both systems ({len(failures)} violations, guard digits up to {top}); root isolation N<=8 worst relative gap {CTX100.mp.nstr(worst_iso, 3)}")
    assert ok, failures


def test_c08_derivative_identity():
    ctx = CTX100
    lower, upper = BesselI("0", "1"), BesselI("1", "1")
    rng = random.Random(2024)
    xs = [ctx.real(Fraction(rng.randint(1, 199999), 10000)) for _ in range(20)]
    worst = 0
    for n in range(1, 9):
        for x in xs:
            dp = eval_typeII(lower, n, x, ctx)[1]
            want = n * eval_typeII(upper, n - 1, x, ctx)[0]
            worst = max(worst, abs(dp - want) / abs(want))
    ok = record(8, worst <= ctx.tol(10), f"P_n(nu=0)' = n P_(n-1)(nu=1), n<=8, 20 points in (0,20): worst relative error {ctx.mp.nstr(worst, 3)}")
    assert ok


def test_c09_scale_invariance():
    rng = random.Random(99)
    rules = {s: make_rule(s, 10, CTX100) for s in (K10, I01)}
    worst = 0
    for _ in range(100):
        system = rng.choice([K10, I01])
        rule = rules[system]
        mp = rule.ctx.mp
        j = rng.randrange(rule.N)
        scale = mp.mpf(rng.choice([-1, 1])) * mp.mpf(10) ** rng.uniform(-50, 50)
        pair = rule.pairs[j]
        a, b = eigen_weights([scale * t for t in pair.left], pair.right, system.normalization(rule.ctx), rule.ctx)
        worst = max(worst, abs(a - rule.weights1[j]) / abs(rule.weights1[j]), abs(b - rule.weights2[j]) / abs(rule.weights2[j]))
    ok = record(9, worst <= CTX100.tol(20), f"100 random left-eigenvector rescalings: worst relative weight change {CTX100.mp.nstr(worst, 3)}")
    assert ok


def test_c10_single_node():
    ctx = CTX100
    e = ctx.mp.e
    k, i = make_rule(K10, 1, ctx), make_rule(I01, 1, ctx)
    checks = [(k.nodes[0], 4), (k.weights1[0], 1), (k.weights2[0], 2), (i.nodes[0], 2), (i.weights1[0], e), (i.weights2[0], e)]
    worst = max(abs(a - b) / abs(b) for a, b in checks)
    ok = record(10, worst <= ctx.tol(10), f"N=1: BesselK(1,0) node 4 weights (1,2); BesselI(0,1) node 2 weights (e,e); worst relative error {ctx.mp.nstr(worst, 3)}")
    assert ok


# ---------------------------------------------------------------------------
# companions to the numbered criteria


def test_cos_error_decreases_with_N():
    mp = CTX100.mp
    f = named_integrand("cos", CTX100)
    refs = [mp.mpf(r) for r in COS_REFERENCE]
    errs = []
    for N in TABLE_COS:
        j1, j2 = integrate(rule100(I01, N), f)
        errs.append(max(abs(j1 - refs[0]), abs(j2 - refs[1])))
    assert all(a > b for a, b in zip(errs, errs[1:]))


def test_weight_sign_report(capsys):
    # positivity is reported, not required
    with capsys.disabled():
        for system in (K10, I01):
            for N in (10, 20, 30, 40, 50):
                rep = weight_report(rule100(system, N))
                neg = rep["weights1"]["negative"] + rep["weights2"]["negative"]
                print(f"  sign report {system} N={N}: {neg} negative weights, smallest log10|w2| = {rep['weights2']['min_log10']}")


if __name__ == "__main__":
    code = pytest.main([__file__, "-q", "-p", "no:cacheprovider"])
    sys.exit(code)
