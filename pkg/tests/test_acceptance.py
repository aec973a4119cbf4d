"""The twelve acceptance criteria, each at its stated tolerance.

Every test records a one-line PASS/FAIL verdict that is echoed in the pytest
terminal summary under "acceptance criteria".
"""
import json
import random
import subprocess
import sys
import time
from fractions import Fraction

import mpmath
import pytest

from pdwbc import asymptotics as asy
from pdwbc import cli
from pdwbc import orthopoly as op
from pdwbc import verify as v
from pdwbc.ik_determinant import Z_det
from pdwbc.lattice import ModelParams, check_conservation, enumerate_configs, partition_transfer, verify_height_identities

P = ModelParams(Fraction(2), Fraction(5, 4))
P2 = ModelParams(Fraction(3), Fraction(6, 5))


def test_criterion_01_triple_agreement(record_criterion):
    bad = []
    for p in (P, P2):
        for n in range(1, 6):
            for m in range(n):
                zt, zd, zo = partition_transfer(n, m, p.weights()), Z_det(n, m, p), op.Z_op(n, m, p)
                if not (zt == zd == zo):
                    bad.append((p.T, p.G, n, m))
    assert record_criterion(1, not bad, f"transfer = det = op for 30 (params, n, m) cases; mismatches: {bad}")


def test_criterion_02_golden_value(record_criterion):
    res = v.check_golden(v.SuiteConfig(P))
    assert record_criterion(2, res.ok, f"Z(n=2,m=1) = 251289/320000 by every route: {res.detail}")


def test_criterion_03_conservation_and_heights(record_criterion):
    total = bad = 0
    for n in range(1, 5):
        for m in range(n):
            for c in enumerate_configs(n, m):
                total += 1
                bad += not (check_conservation(c) and verify_height_identities(c))
    assert record_criterion(3, bad == 0, f"{total} configurations with n <= 4, {bad} violations")


def test_criterion_04_inhomogeneous(record_criterion):
    rng = random.Random(20240601)
    bad, count = [], 0
    for _ in range(5):
        for n, m in [(2, 0), (3, 0), (3, 1)]:
            L = v.random_spectral_set(rng, n - m, P.T)
            det, enum = v.inhomogeneous_match(L, m, n, P.G)
            count += 1
            if det != enum:
                bad.append((n, m, L))
    assert record_criterion(4, not bad, f"{count} random spectral sets exact; mismatches: {bad}")


def test_criterion_05_lemma_limit_rate(record_criterion):
    with mpmath.workprec(256):
        lo, hi = mpmath.e ** 2 / 2, 2 * mpmath.e ** 2
        ratios = {}
        for m, n in v.LEMMA_CASES:
            ratios[(m, n)] = v.lemma_decay(m, n, P, 256)[2]
        ok = all(lo <= r <= hi for r in ratios.values())
        detail = ", ".join(f"(m={m},n={n}): {mpmath.nstr(r, 6)}" for (m, n), r in ratios.items())
    assert record_criterion(5, ok, f"r(8)/r(10) in [{mpmath.nstr(lo, 5)}, {mpmath.nstr(hi, 5)}]? {detail}")


def test_criterion_06_meixner_oracle(record_criterion):
    res = v.check_meixner(v.SuiteConfig(P))
    assert record_criterion(6, res.ok, f"h^M_k and monic M_k exact for k <= 10, m in {{0,1,3}}: {res.detail}")


def test_criterion_07_h7_and_ip(record_criterion):
    h7 = v.check_h7(v.SuiteConfig(P))
    ip = v.check_ip(v.SuiteConfig(P))
    ok = h7.ok and ip.ok
    assert record_criterion(7, ok, f"h7 max LHS/RHS = {h7.value}; IP21/IP23 at Xmax=300, k <= 4: {ip.status}")


def test_criterion_08_theorem_desk_scale(record_criterion):
    xis = [abs(asy.theorem_check(2 * j, j, P).xi_nm) for j in range(3, 8)]
    decreasing = all(a > b for a, b in zip(xis, xis[1:]))
    xi126 = abs(asy.theorem_check(12, 6, P).xi_nm)
    prods_ok = all(abs(asy.norm_ratio_partial_product(m, P, 12) - asy.C_of_m(m, P)) < 10 * P.G ** (-2 * m)
                   for m in (0, 1, 2))
    ok = decreasing and xi126 < mpmath.mpf("1e-3") and prods_ok
    assert record_criterion(8, ok, f"|xi| along (2j,j): {[mpmath.nstr(x, 4) for x in xis]}, "
                                   f"|xi_12,6| = {mpmath.nstr(xi126, 4)}, partial products in envelope: {prods_ok}")


def test_criterion_09_toda(record_criterion):
    t0 = time.perf_counter()
    res = asy.toda_check(6, 2, P, "1e-4", 256)
    elapsed = time.perf_counter() - t0
    order_ok = mpmath.mpf(1) / 8 <= res.order_ratio <= mpmath.mpf(1) / 2
    ok = res.residual < mpmath.mpf("1e-6") and order_ok and elapsed < 60
    assert record_criterion(9, ok, f"residual = {mpmath.nstr(res.residual, 6)} (< 1e-6 required), "
                                   f"r(eps)/r(2eps) = {mpmath.nstr(res.order_ratio, 6)}, {elapsed:.2f}s")


def test_criterion_10_zeros_and_saturation(record_criterion):
    problems = v.zero_properties(2, P, 30)
    ph = v.check_phase(v.SuiteConfig(P))
    ok = not problems and ph.ok
    assert record_criterion(10, ok, f"zeros k <= 30 real/simple/positive/interlacing: {not problems}; {ph.detail}")


def test_criterion_11_parameter_reduction(record_criterion):
    res = v.check_reduction(v.SuiteConfig(P), trials=20)
    assert record_criterion(11, res.ok, f"20 random square-ratio weight sets, n <= 4: {res.detail}")


def test_criterion_12_cli(record_criterion, capsys):
    code = cli.main(["z", "--n", "2", "--m", "1"])
    out = capsys.readouterr().out
    rep = cli.Report.from_json(out)
    round_trip = cli.Report.from_json(rep.to_json()) == rep and json.loads(rep.to_json()) == json.loads(out)
    usage = cli.main(["z", "--T", "5/4", "--G", "2/1", "--n", "2", "--m", "1"])
    capsys.readouterr()
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "pdwbc.cli", "verify"], capture_output=True, text=True,
                          timeout=600)
    elapsed = time.perf_counter() - t0
    suite = json.loads(proc.stdout)
    green = proc.returncode == 0 and all(r["status"] == "pass" for r in suite["results"])
    ok = code == 0 and round_trip and usage == 64 and green and elapsed < 300
    assert record_criterion(12, ok, f"JSON round trip {round_trip}, exit codes z={code} usage={usage}, "
                                    f"verify exit {proc.returncode} with {len(suite['results'])} checks "
                                    f"in {elapsed:.1f}s")
