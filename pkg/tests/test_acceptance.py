"""Acceptance criteria, one printed PASS/FAIL line each.

All checks are exact integer equalities; the only tolerances are the
wall-clock budgets, pinned below.
"""

import time
from functools import lru_cache

import pytest

from tritrans import cli, gf, orbits, srg, talg, verifier

BUDGET_Q23 = 10.0
BUDGET_Q4 = 120.0
BUDGET_Q5 = 900.0
BUDGET_VO = 60.0
BUDGET_CLOSURE = 300.0
BUDGET_NEGATIVE = 5.0
BUDGET_REFERENCE = 10.0

D_QMINUS = [[1, 1, 1], [1, 3, 2], [1, 2, 3]]
VO_CASES = [(m, e) for m in (2, 3, 4) for e in (1, -1)]
REFERENCE = ["cycle5", "grid(3)", "grid(4)", "paley9", "complete_multipartite(3,3)"]


@pytest.fixture
def report(capsys):
    def emit(number: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
        assert ok, detail
    return emit


@lru_cache(maxsize=None)
def timed_qminus(q):
    t = time.perf_counter()
    rep = verifier.certify_qminus(q, allow_large=(q == 5))
    return rep, time.perf_counter() - t


@lru_cache(maxsize=None)
def timed_vo(m, eps):
    t = time.perf_counter()
    rep = verifier.certify_vo(m, eps)
    return rep, time.perf_counter() - t


def test_criterion_1_qminus(report):
    bad = []
    times = {}
    for q in (2, 3, 4):
        rep, dt = timed_qminus(q)
        times[q] = dt
        want = ((q + 1) * (q**3 + 1), q * (q * q + 1), q - 1, q * q + 1)
        if rep.params != want or rep.dim_T0 != 15 or rep.block_decomp.d != D_QMINUS \
                or rep.verdict != verifier.CERTIFIED:
            bad.append(q)
    slow = times[2] > BUDGET_Q23 or times[3] > BUDGET_Q23 or times[4] > BUDGET_Q4
    detail = "Q-(5,q) q=2,3,4 certified at 15 with D=" + str(D_QMINUS) + \
        f"; times {', '.join(f'q={q}:{t:.1f}s' for q, t in times.items())}"
    if bad:
        detail += f"; wrong for q={bad}"
    report(1, not bad and not slow, detail)


def test_criterion_2_qminus_q5(report):
    rep, dt = timed_qminus(5)
    ok = (rep.params == (756, 130, 4, 26) and rep.dim_T0 == 15 and rep.block_decomp.d == D_QMINUS
          and rep.certified and dt < BUDGET_Q5)
    report(2, ok, f"Q-(5,5) with allow_large: {rep.verdict}, total {rep.block_decomp.total}, "
                  f"{dt:.1f}s (budget {BUDGET_Q5:.0f}s)")


def test_criterion_3_vo(report):
    bad = []
    total_time = 0.0
    for m, eps in VO_CASES:
        rep, dt = timed_vo(m, eps)
        total_time += dt
        want = 15 if (m, eps) != (2, -1) else 14
        ok = (rep.params == srg.vo_params(m, eps) and rep.params[0] == 4**m and rep.certified
              and rep.dim_T0 == want and rep.block_decomp.total == want)
        if m >= 3:
            ok = ok and rep.t == 2 and rep.block_decomp.total == 11 + 2 * rep.t
        if not ok:
            bad.append((m, eps))
    report(3, not bad and total_time < BUDGET_VO,
           f"VO^eps_2m(2) m=2,3,4: (2,-1) at 14, others at 15, t=2 for m>=3; "
           f"{total_time:.1f}s total" + (f"; wrong for {bad}" if bad else ""))


def test_criterion_4_closure(report):
    t = time.perf_counter()
    rows = []
    for sel in [("qminus5", 2), ("qminus5", 3), ("vo", 2, 1), ("vo", 2, -1), ("vo", 3, 1),
                ("vo", 3, -1)]:
        g, _ = verifier.instance_action(sel)
        rows.append((sel, talg.dim_T_closure(g), talg.dim_T0(g).dim))
    dt = time.perf_counter() - t
    ok = all(a == b for _, a, b in rows) and dt < BUDGET_CLOSURE
    report(4, ok, "exact closure dim T = dim T0 on " +
           ", ".join(f"{cli._name(s)}:{a}" for s, a, _ in rows) + f"; {dt:.1f}s")


def test_criterion_5_named_orbits(report):
    results = []
    for q in (2, 3, 4):
        rep, _ = timed_qminus(q)
        results += [(f"q={q} {c['name']}", c["passed"]) for c in rep.named_checks]
    for m in (3, 4):
        for eps in (1, -1):
            rep, _ = timed_vo(m, eps)
            results += [(f"vo({m},{eps:+d}) {c['name']}", c["passed"]) for c in rep.named_checks]
    for q in (3, 5):
        results.append((f"q={q} rho fuses S1 and S2", orbits.rho_fuses(srg.build_qminus_graph(q))))
    failed = [name for name, ok in results if not ok]
    # q=2,4: three partitions; q=3 adds the X3 = S1 u S2 union and rho; VO: three each
    want = 3 + 5 + 3 + 4 * 3 + 2
    report(5, not failed and len(results) == want,
           f"{len(results)} named-subset partition checks" +
           (f"; failed: {failed}" if failed else " all exact"))


ODD_Q = [q for q in range(3, 50, 2) if len(gf.prime_factors(q)) == 1]


def test_criterion_6_two_variable_lemma(report):
    checked = 0
    failures = []
    for q in ODD_Q:
        ctx = gf.field_of_order(q)
        delta = ctx.find_nonsquare()
        form = [[gf.binary_form(ctx, delta, x, y) for y in range(q)] for x in range(q)]
        for lam in range(1, q):
            if ctx.is_square(lam):
                continue
            a, c = gf.lemma_tech_solve(ctx, delta, lam)
            # q^2 <= 2401 < 10^4, so every pair is checked rather than a sample
            for x in range(q):
                for y in range(q):
                    u, v = gf.lemma_tech_map(ctx, delta, a, c, x, y)
                    if form[u][v] != ctx.mul(lam, form[x][y]):
                        failures.append((q, lam, x, y))
                    checked += 1
    report(6, not failures, f"f(g(x,y)) = lambda f(x,y) for all nonsquares lambda, odd q <= 49 "
                            f"({len(ODD_Q)} fields, {checked} exhaustive evaluations)")


def test_criterion_7_triple_regularity(report):
    sels = [("qminus5", 2), ("qminus5", 3), ("vo", 2, 1), ("vo", 2, -1), ("vo", 3, 1), ("vo", 3, -1)]
    sels += [("reference", f) for f in REFERENCE + ["paley13", "petersen"]]
    mismatch = []
    for sel in sels:
        g, _ = verifier.instance_action(sel)
        equal = talg.dim_T_closure(g) == talg.dim_T0(g).dim
        if talg.triple_regularity_check(g).regular != equal:
            mismatch.append(sel)
    report(7, not mismatch, f"triply regular <=> dim T = dim T0 on {len(sels)} instances" +
           (f"; disagree on {mismatch}" if mismatch else ""))


def test_criterion_8_negative_control(report):
    t = time.perf_counter()
    p13 = verifier.negative_control("paley13")
    p9 = verifier.certify_reference("paley9")
    dt = time.perf_counter() - t
    ok = (p13.dim_T0 == 15 and p13.dim_T > 15 and p13.verdict == verifier.REFUTED
          and p9.certified and dt < BUDGET_NEGATIVE)
    report(8, ok, f"Paley(13): dim T0={p13.dim_T0}, dim T={p13.dim_T}, {p13.verdict}; "
                  f"Paley(9): {p9.verdict}; {dt:.2f}s")


def test_criterion_9_reference(report):
    t = time.perf_counter()
    verdicts = {f: verifier.certify_reference(f).verdict for f in REFERENCE}
    dt = time.perf_counter() - t
    ok = all(v == verifier.CERTIFIED for v in verdicts.values()) and dt < BUDGET_REFERENCE
    report(9, ok, f"{', '.join(REFERENCE)} certified; {dt:.2f}s" +
           ("" if ok else f"; {verdicts}"))


def test_criterion_10_determinism(report, tmp_path, capsys):
    outs = []
    for run in ("a", "b"):
        out = tmp_path / run
        assert cli.main(["verify", "all", "--seed", "17", "--out", str(out)]) == 0
        outs.append({f.name: f.read_bytes() for f in sorted(out.iterdir())})
    capsys.readouterr()
    same = outs[0] == outs[1]
    report(10, same and len(outs[0]) == 3 + 6 + len(REFERENCE),
           f"two default runs with seed 17 give byte-identical JSON ({len(outs[0])} reports)")
