"""Acceptance gate: every exit criterion at its stated tolerance.

Run with `pytest -s tests/test_acceptance.py` to see one line per
criterion.  Tolerances and runtime budgets are pinned here and nowhere
else; the helper prints PASS/FAIL before asserting so the table is
complete even on failure.
"""

import math
import time

import numpy as np

from kclab.eigenspectral import (
    GridSpec,
    SpectralInterval,
    apply_E,
    classify_infinity,
    estimate_projection_norm,
    growth_curve,
    interval,
)
from kclab.forms import apply_Q_alpha, apply_S_alpha, t_alpha_indef, t_alpha_pos
from kclab.langer_contour import (
    build_discretized_model,
    check_parseval_plus,
    check_representation,
    contour_spectral_projection,
    verify_spectral_calculus,
)
from kclab.membership import Verdict, witness_table
from kclab.model_space import (
    ModelWeight,
    abs_r,
    eta,
    eta_tilde,
    indicator,
    make_g_tau,
    odd_part,
    omega,
    truncate,
)
from kclab.quadrature import Status, integrate_weighted, \
    symmetric_principal_limit
from kclab.sturm_liouville import (
    assemble_operator,
    compute_eigenpairs,
    eval_u0,
    eval_u0_prime,
    make_problem,
    partial_sum_study,
    spectral_gap,
    u0_form_integral,
)

W = ModelWeight()
SQRT2 = math.sqrt(2.0)


def report(name: str, ok: bool, extra: str = ""):
    line = f"[ACCEPTANCE] {name}: {'PASS' if ok else 'FAIL'}"
    if extra:
        line += f"  ({extra})"
    print(line)
    assert ok, name


def test_lemma_6_1_identities():
    t0 = time.time()
    rng = np.random.default_rng(0)
    xs = np.exp(rng.uniform(math.log(1.0 + 1e-9), math.log(1e8), 1000))
    ratio0 = eta(W, 0.0)(xs) / abs_r(W)(xs)
    ok = bool(np.max(np.abs(ratio0 - (SQRT2 - 1.0))) <= 1e-12)
    for alpha in (0.5, 1.0, 2.0):
        for x in (1e2, 1e4, 1e6):
            v = float(eta(W, alpha)(np.array([x]))[0]
                      / eta_tilde(W, alpha)(np.array([x]))[0])
            lo = 1.0 / (2.0 * math.sqrt(1.0 + x**-alpha))
            ok = ok and lo <= v <= 0.5
    elapsed = time.time() - t0
    report("lemma-6.1 weight identities", ok and elapsed < 1.0,
           f"{elapsed:.3f}s")


def _random_step(rng):
    edges = np.sort(rng.uniform(1.01, 8.0, 3))
    vals = rng.standard_normal(2)
    return (vals[0] * indicator(edges[0], edges[1])
            + vals[1] * indicator(-edges[2], -edges[1], closed_lo=True,
                                  closed_hi=False))


def test_lemma_6_2_representation():
    t0 = time.time()
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(20):
        f, g = _random_step(rng), _random_step(rng)
        for alpha in (0.0, 0.5, 1.0, 2.0):
            lhs = integrate_weighted(apply_Q_alpha(f, alpha), g, abs_r(W))
            rhs = t_alpha_pos(f, g, alpha, W)
            scale = max(1.0, abs(lhs.value), abs(rhs.value))
            worst = max(worst, abs(lhs.value - rhs.value) / scale)
    elapsed = time.time() - t0
    report("lemma-6.2(v) representation identity",
           worst <= 1e-8 and elapsed < 10.0,
           f"worst={worst:.2e}, {elapsed:.2f}s")


def test_lemma_6_3_membership_pattern():
    t0 = time.time()
    import itertools
    ok = True
    grid = (0.0, 0.5, 1.0, 1.5, 2.0)
    for alpha, beta in itertools.combinations(grid, 2):
        table = witness_table(alpha, beta, W)
        ok = ok and table.pattern_holds
        ok = ok and not any(r.verdict is Verdict.INDETERMINATE
                            for r in table.rows)
    elapsed = time.time() - t0
    report("lemma-6.3 / cor-6.11 membership pattern",
           ok and elapsed < 30.0, f"{elapsed:.2f}s")


def test_lemma_6_4_involution():
    rng = np.random.default_rng(2)
    xs = rng.uniform(-5.0, 5.0, 40)
    ok = True
    for i in range(20):
        edges = np.sort(rng.uniform(1.01, 4.5, 4))
        coef = rng.standard_normal(2)
        f = coef[0] * indicator(edges[0], edges[1]) \
            + coef[1] * indicator(-edges[3], -edges[2], closed_lo=True,
                                  closed_hi=False)
        alpha = float(rng.uniform(0.0, 2.0))
        ss = apply_S_alpha(apply_S_alpha(f, alpha), alpha)
        dev = np.max(np.abs(ss(xs) - f(xs)) / (1.0 + np.abs(xs) ** alpha))
        ok = ok and dev <= 1e-12
    report("lemma-6.4(ii) involution", ok)


def test_lemma_6_6_6_7_indefinite_form():
    ok = True
    worst = 0.0
    rng = np.random.default_rng(3)
    for _ in range(5):
        f = _random_step(rng)
        lim = t_alpha_indef(f, f, 1.0, W)
        direct = integrate_weighted(f, f, abs_r(W))
        # signed integral via the weighted one with the sign of x folded in
        from kclab.forms import indefinite_direct
        ind = indefinite_direct(f, f, W)
        scale = max(1.0, abs(lim.value), abs(ind.value))
        worst = max(worst, abs(lim.value - ind.value) / scale)
        ok = ok and lim.trusted
    ok = ok and worst <= 1e-8
    g0 = make_g_tau(0.0, W)
    for k in (2.0, 8.0, 32.0, 128.0):
        res = symmetric_principal_limit(truncate(g0, k), truncate(g0, k), W)
        ok = ok and res.value == 0.0
    full = symmetric_principal_limit(g0, g0, W)
    ok = ok and full.value == 0.0 and full.status is Status.CONVERGED
    report("lemma-6.6/6.7 indefinite form", ok, f"worst={worst:.2e}")


def test_prop_6_8_growth():
    t0 = time.time()
    ok = True
    g0 = make_g_tau(0.0, W)
    worst_rel = 0.0
    for alpha in (0.5, 1.0, 2.0):
        for k in (4.0, 16.0, 64.0, 256.0):
            gk = apply_E(interval(1.0, k), g0)
            go = odd_part(gk)
            term = 2.0 * integrate_weighted(go, go, omega(W, alpha)).value
            expect = (2.0 / alpha) * (k ** (alpha / 2.0) - 1.0)
            worst_rel = max(worst_rel, abs(term - expect) / expect)
    ok = ok and worst_rel <= 1e-6
    norm_dev = 0.0
    for alpha in (0.0, 0.5, 1.0, 2.0):
        for k in (4.0, 64.0, 256.0):
            d = SpectralInterval(-k, k, True, True)
            est = estimate_projection_norm(d, alpha, GridSpec(max_radius=4 * k), W)
            norm_dev = max(norm_dev, abs(est - 1.0))
    ok = ok and norm_dev <= 1e-6
    dominance = True
    for alpha in (0.5, 1.0, 2.0):
        curve = growth_curve(alpha, [4.0, 16.0, 64.0, 256.0], None, W)
        for k, est, paper, variant in curve.samples:
            dominance = dominance and est >= variant - 1e-9
    ok = ok and dominance
    elapsed = time.time() - t0
    report("prop-6.8(ii)(iii) norm growth",
           ok and elapsed < 120.0,
           f"odd-term rel={worst_rel:.2e}, norm dev={norm_dev:.2e}, "
           f"{elapsed:.2f}s")


def test_thm_6_9_classification():
    t0 = time.time()
    ks = [2.0**j for j in range(1, 13)]
    curve0 = growth_curve(0.0, ks, None, W)
    v0 = classify_infinity(curve0)
    ok = v0.classification == "regular" \
        and v0.bounded_witness <= SQRT2 + 1.0 + 1e-6
    detail = [f"a=0:{v0.classification}"]
    for alpha in (0.5, 1.0, 2.0):
        curve = growth_curve(alpha, ks, None, W)
        v = classify_infinity(curve)
        ok = ok and v.classification == "singular"
        ok = ok and abs(v.fitted_exponent - alpha / 2.0) <= 0.15
        detail.append(f"a={alpha:g}:{v.fitted_exponent:.3f}")
    elapsed = time.time() - t0
    report("thm-6.9(iii)(iv) critical point classification",
           ok and elapsed < 300.0, ", ".join(detail) + f", {elapsed:.2f}s")


def test_thm_2_1_contour_calculus():
    t0 = time.time()
    worst = 0.0
    ok = True
    for n in (8, 32, 128):
        for seed in range(10):
            rng = np.random.default_rng(seed)
            pos = 1.25 + np.cumsum(rng.uniform(0.2, 1.0, n // 2))
            grid = np.concatenate([-pos[::-1], pos])
            model = build_discretized_model(0.5, W, grid)
            lo = 0.5 * (grid[n // 2] + grid[n // 2 + 1])
            hi = grid[-1] + 0.5
            d1 = interval(lo, hi)
            d2 = interval(grid[0] - 0.5, 0.5 * (grid[3 * n // 4 - 1]
                                                + grid[3 * n // 4]))
            p1 = contour_spectral_projection(model, d1)
            oracle = np.diag(d1.indicator(model.grid))
            worst = max(worst, float(np.max(np.abs(p1 - oracle))))
            rep = verify_spectral_calculus(model, d1, d2)
            ok = ok and rep.all_passed
    elapsed = time.time() - t0
    report("thm-2.1 / thm-5.4 contour spectral calculus",
           ok and worst <= 1e-6 and elapsed < 60.0,
           f"max dev={worst:.2e}, {elapsed:.1f}s")


def test_cor_5_6_lemma_3_1_machine_identities():
    ok = True
    for seed in range(5):
        rng = np.random.default_rng(seed)
        n = 8 + 4 * seed
        pos = 1.25 + np.cumsum(rng.uniform(0.2, 1.0, n // 2))
        grid = np.concatenate([-pos[::-1], pos])
        model = build_discretized_model(1.0, W, grid)
        for v in (np.ones(model.size), rng.standard_normal(model.size)):
            rep = check_parseval_plus(model, v, use_contour=False)
            ok = ok and rep.checks[0].measured <= rep.checks[0].tolerance
        u = rng.standard_normal(model.size)
        v = rng.standard_normal(model.size)
        rr = check_representation(model, u, v)
        ok = ok and rr.all_passed
    report("cor-5.6 / lemma-3.1 algebraic identities", ok)


def test_example_5_1_sturm_liouville():
    t0 = time.time()
    problem = make_problem(4096)
    op = assemble_operator(problem)
    sym = op.symmetric_matrix()
    ok = float(np.max(np.abs(sym - sym.T))) == 0.0
    pairs = compute_eigenpairs(op, count_per_sign=20)
    lams = {p.index: p.lam for p in pairs}
    ok = ok and lams[-1] < 0.0 < lams[1]
    gap = spectral_gap(pairs)
    ok = ok and gap > 0.0
    ok = ok and max(p.residual for p in pairs) <= 1e-10
    orth = 0.0
    for p in pairs[::3]:
        for q in pairs[::3]:
            if p.index != q.index:
                orth = max(orth, abs(op.form(p.u, q.u)))
    ok = ok and orth <= 1e-6
    dom = u0_form_integral()
    ok = ok and dom.status is Status.CONVERGED
    lav = np.array([p.lam for p in pairs])
    top = 0.999 * min(lav.max(), -lav.min())
    first = 1.05 * max(min(l for l in lav if l > 0),
                       -max(l for l in lav if l < 0))
    sched = np.geomspace(first, top, 8)
    rep = partial_sum_study((eval_u0, eval_u0_prime), pairs, sched, op)
    factors = [np.max(t) / t[0] for t in (rep.norm_S_plus, rep.norm_S_minus)
               if t[0] > 0]
    # divergence proxy only: documented reference-run trend, not a theorem
    ok = ok and bool(factors) and max(factors) >= 2.0
    op2 = assemble_operator(make_problem(8192))
    pairs2 = compute_eigenpairs(op2, count_per_sign=20)
    l2 = {p.index: p.lam for p in pairs2}
    move = max(abs(l2[i] - lams[i]) / abs(lams[i]) for i in lams)
    ok = ok and move <= 0.05
    elapsed = time.time() - t0
    report("example-5.1 indefinite Sturm-Liouville",
           ok and elapsed < 300.0,
           f"gap={gap:.3g}, orth={orth:.1e}, refine move={move:.2%}, "
           f"growth x{max(factors):.1f}, {elapsed:.1f}s")
