"""Form family, involution operators and projections."""

import math

import numpy as np
import pytest

from kclab.errors import UnsupportedDomain
from kclab.forms import (
    apply_Q_alpha,
    apply_S_alpha,
    eta_ip,
    indefinite_direct,
    indefinite_r_ip,
    inner_product,
    omega_ip,
    project_pm,
    t_alpha_indef,
    t_alpha_pos,
)
from kclab.model_space import (
    ModelWeight,
    abs_r,
    indicator,
    make_f_tau,
    make_g_tau,
    truncate,
    zero_function,
)
from kclab.quadrature import Status, integrate_weighted

W = ModelWeight()
G0 = make_g_tau(0.0, W)
F1 = make_f_tau(1.0, W)
SQRT2 = math.sqrt(2.0)
C_ETA2 = 0.9343200492928959


def test_indefinite_g0_is_zero():
    ip = inner_product(indefinite_r_ip(), G0, G0, W)
    assert ip.trusted
    assert ip.value == 0.0


def test_eta2_inner_product_oracle():
    ip = inner_product(eta_ip(2.0), G0, G0, W)
    assert ip.trusted
    assert ip.value == pytest.approx(C_ETA2, rel=1e-9)


def test_omega_half_inner_product_oracle():
    ip = inner_product(omega_ip(0.5), F1, F1, W)
    assert ip.trusted
    assert ip.value == pytest.approx(8.0, rel=1e-9)


def test_divergent_inner_product_reported_not_raised():
    ip = inner_product(omega_ip(1.0), G0, G0, W)
    assert not ip.trusted
    assert ip.diagnostics.status is Status.DIVERGED


def test_t_alpha_pos_even_reduces_to_eta_term():
    for alpha in (0.0, 0.7, 2.0):
        lhs = t_alpha_pos(G0, G0, alpha, W)
        rhs = inner_product(eta_ip(alpha), G0, G0, W)
        assert lhs.diagnostics.status == rhs.diagnostics.status
        if lhs.trusted:
            assert lhs.value == pytest.approx(rhs.value, rel=1e-12)


def test_t0_of_unit_indicator_is_sqrt2():
    chi = indicator(1.0, 2.0)
    val = t_alpha_pos(chi, chi, 0.0, W)
    assert val.trusted
    assert val.value == pytest.approx(SQRT2, rel=1e-10)


def test_odd_part_term_of_right_truncated_g0():
    # g_k = chi_(1,4] g0 at alpha = 2: twice the omega norm of the odd part
    # equals (2/alpha)(k^(alpha/2) - 1) = 3
    from kclab.model_space import odd_part, restrict
    gk = restrict(G0, 1.0, 4.0)
    go = odd_part(gk)
    term = integrate_weighted(go, go, __import__("kclab.model_space",
                                                 fromlist=["omega"]).omega(W, 2.0))
    assert term.status is Status.CONVERGED
    assert 2.0 * term.value == pytest.approx(3.0, rel=1e-9)


def test_t_alpha_indef_compact_equals_signed_integral():
    f = indicator(1.0, 2.0)
    ind = t_alpha_indef(f, f, 1.0, W)
    # Int_1^2 |f|^2 r dx = 1 on the default weight
    assert ind.trusted
    assert ind.value == pytest.approx(1.0, rel=1e-10)


def test_t_alpha_indef_sum_oracle_sixteen():
    f = G0 + F1
    ind = t_alpha_indef(f, f, 1.5, W)
    assert ind.trusted
    assert ind.value == pytest.approx(16.0, rel=1e-9)


# -- Q and S ------------------------------------------------------------------

def test_Q_alpha0_indicator_values():
    chi = indicator(1.0, 2.0)
    q = apply_Q_alpha(chi, 0.0)
    assert q(1.5) == pytest.approx(SQRT2, abs=1e-15)
    assert q(-1.5) == pytest.approx(-1.0, abs=1e-15)


def test_Q_alpha_even_function_formula():
    for alpha in (0.0, 1.0, 2.0):
        q = apply_Q_alpha(G0, alpha)
        xs = np.array([1.5, 2.0, 5.0, -3.0])
        ax = np.abs(xs) ** alpha
        expect = (np.sqrt(ax + 1.0) - np.sqrt(ax)) * G0(xs)
        assert np.allclose(q(xs), expect, rtol=1e-14)


def test_S_alpha_indicator_value():
    chi = indicator(1.0, 2.0)
    s = apply_S_alpha(chi, 0.0)
    assert s(-1.5) == pytest.approx(1.0, abs=1e-15)


def test_S_alpha_squared_identity():
    f = indicator(1.0, 2.0) + (-2.0) * indicator(-3.0, -2.0, closed_lo=True,
                                                 closed_hi=False)
    rng = np.random.default_rng(5)
    xs = rng.uniform(-4.0, 4.0, 20)
    for alpha in (0.0, 0.5, 1.3, 2.0):
        ss = apply_S_alpha(apply_S_alpha(f, alpha), alpha)
        err = np.abs(ss(xs) - f(xs))
        assert np.all(err <= 1e-12 * (1.0 + np.abs(xs) ** alpha))


def test_S_alpha_zero_input():
    z = truncate(zero_function(), 2.0)
    s = apply_S_alpha(z, 1.0)
    assert np.all(s(np.linspace(-3, 3, 11)) == 0.0)


def test_S_alpha_rejects_full_support():
    with pytest.raises(UnsupportedDomain):
        apply_S_alpha(G0, 1.0)
    with pytest.raises(UnsupportedDomain):
        project_pm(G0, 1.0, +1)


# -- projections --------------------------------------------------------------

def test_projections_sum_to_identity():
    f = indicator(1.0, 3.0)
    p_plus = project_pm(f, 1.0, +1)
    p_minus = project_pm(f, 1.0, -1)
    xs = np.linspace(-4.0, 4.0, 20)
    assert np.allclose(p_plus(xs) + p_minus(xs), f(xs), atol=1e-14)


def test_projections_t_alpha_orthogonal():
    f = indicator(1.0, 3.0)
    p_plus = project_pm(f, 1.0, +1)
    p_minus = project_pm(f, 1.0, -1)
    ip = t_alpha_pos(p_plus, p_minus, 1.0, W)
    assert ip.trusted
    assert abs(ip.value) <= 1e-9


def test_projection_signs_match_indefinite_form():
    f = indicator(1.0, 3.0)
    for alpha in (0.5, 1.0):
        for sign in (+1, -1):
            p = project_pm(f, alpha, sign)
            pos = t_alpha_pos(p, p, alpha, W)
            ind = t_alpha_indef(p, p, alpha, W)
            assert pos.trusted and ind.trusted
            assert pos.value == pytest.approx(sign * ind.value, abs=1e-9)


# -- structural invariants ------------------------------------------------

@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0, 2.0])
def test_representation_identity(alpha):
    rng = np.random.default_rng(42)
    for _ in range(5):
        f = _random_step(rng)
        g = _random_step(rng)
        lhs = integrate_weighted(apply_Q_alpha(f, alpha), g, abs_r(W))
        rhs = t_alpha_pos(f, g, alpha, W)
        assert lhs.status is Status.CONVERGED and rhs.trusted
        scale = max(1.0, abs(lhs.value), abs(rhs.value))
        assert abs(lhs.value - rhs.value) <= 1e-8 * scale


def _random_step(rng):
    edges = np.sort(rng.uniform(1.0, 6.0, 3))
    vals = rng.standard_normal(2)
    return (vals[0] * indicator(edges[0], edges[1])
            + vals[1] * indicator(-edges[2], -edges[1], closed_lo=True,
                                  closed_hi=False))


def test_fundamental_symmetry_law():
    f = indicator(1.0, 2.5)
    g = indicator(1.5, 3.0) + (-1.0) * indicator(-2.0, -1.2)
    for alpha in (0.0, 1.0, 2.0):
        from kclab.forms import apply_J_alpha
        lhs = t_alpha_indef(f, g, alpha, W)
        rhs = t_alpha_pos(apply_J_alpha(f, alpha), g, alpha, W)
        assert lhs.trusted and rhs.trusted
        assert lhs.value == pytest.approx(rhs.value, abs=1e-9)


def test_cauchy_schwarz_definite_kinds():
    f = indicator(1.0, 2.0) + G0
    g = indicator(1.5, 4.0)
    for kind in (eta_ip(2.0), omega_ip(0.0)):
        ff = inner_product(kind, f, f, W)
        gg = inner_product(kind, g, g, W)
        fg = inner_product(kind, f, g, W)
        if ff.trusted and gg.trusted and fg.trusted:
            assert abs(fg.value) ** 2 <= ff.value * gg.value + 1e-9


def test_truncation_tails_decrease_to_zero():
    # t_alpha(f - chi_k f, f - chi_k f) for f = g0, alpha > 0
    alpha = 1.0

    def tail_norm(k):
        from kclab.model_space import TestFunction
        rule = G0.rule
        tail = TestFunction(rule=lambda x, k=k: np.where(np.abs(x) > k,
                                                         np.asarray(rule(x)), 0.0),
                            parity="even", breakpoints=(-k, k))
        return t_alpha_pos(tail, tail, alpha, W).value

    vals = [tail_norm(k) for k in (2.0, 4.0, 8.0, 16.0)]
    assert all(v > 0 for v in vals)
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_t0_crosscheck_against_direct_route():
    f = indicator(1.0, 2.0) + (-0.5) * indicator(-3.0, -1.5)
    g = indicator(1.2, 2.7)
    via_limit = t_alpha_indef(f, g, 0.0, W)
    via_direct = indefinite_direct(f, g, W)
    assert via_limit.trusted and via_direct.trusted
    assert via_limit.value == pytest.approx(via_direct.value, abs=1e-10)
