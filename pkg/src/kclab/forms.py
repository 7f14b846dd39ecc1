"""Inner products and the operator family behind the indefinite closures.

The positive form of the alpha family is

    t_alpha(f, g) = 2 (f_o, g_o)_omega_alpha + (f, g)_eta_alpha,

its indefinite partner is the symmetric principal limit of the signed
integral, and on compactly supported functions the two are intertwined by
the involution S_alpha f = sgn(x) Q_alpha f with

    (Q_alpha f)(x) = sqrt(|x|^a + 1) f(x) - sqrt(|x|^a) f(-x).

S_alpha, J_alpha and the projections P_alpha^+- are only defined on
compactly supported inputs; the full spaces are reached through limits of
truncations, which is all the verification suites ever need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import UnsupportedDomain
from .model_space import (
    DerivedWeight,
    ModelWeight,
    TestFunction,
    abs_r,
    eta,
    odd_part,
    omega,
    one_sided,
    r_minus,
    r_plus,
)
from .quadrature import (
    DEFAULT_CONFIG,
    IntegrationResult,
    QuadratureConfig,
    Status,
    integrate_weighted,
    symmetric_principal_limit,
)

_KINDS = ("r_minus_ip", "r_plus_ip", "abs_r_ip", "indefinite_r_ip",
          "eta_ip", "omega_ip")


@dataclass(frozen=True)
class InnerProductKind:
    name: str
    alpha: Optional[float] = None

    def __post_init__(self):
        if self.name not in _KINDS:
            raise ValueError(f"unknown inner product kind {self.name!r}")
        if self.name in ("eta_ip", "omega_ip"):
            if self.alpha is None or not 0.0 <= self.alpha <= 2.0:
                raise ValueError("alpha must lie in [0, 2]")
        elif self.alpha is not None:
            raise ValueError(f"{self.name} takes no alpha")


def r_minus_ip() -> InnerProductKind:
    return InnerProductKind("r_minus_ip")


def r_plus_ip() -> InnerProductKind:
    return InnerProductKind("r_plus_ip")


def abs_r_ip() -> InnerProductKind:
    return InnerProductKind("abs_r_ip")


def indefinite_r_ip() -> InnerProductKind:
    return InnerProductKind("indefinite_r_ip")


def eta_ip(alpha: float) -> InnerProductKind:
    return InnerProductKind("eta_ip", alpha)


def omega_ip(alpha: float) -> InnerProductKind:
    return InnerProductKind("omega_ip", alpha)


@dataclass(frozen=True)
class InnerProductValue:
    value: complex
    diagnostics: IntegrationResult

    @property
    def trusted(self) -> bool:
        return self.diagnostics.status is Status.CONVERGED


def _weight_for(kind: InnerProductKind, w: ModelWeight) -> DerivedWeight:
    if kind.name == "r_minus_ip":
        return r_minus(w)
    if kind.name == "r_plus_ip":
        return r_plus(w)
    if kind.name == "abs_r_ip":
        return abs_r(w)
    if kind.name == "eta_ip":
        return eta(w, kind.alpha)
    if kind.name == "omega_ip":
        return omega(w, kind.alpha)
    raise ValueError(kind.name)


def inner_product(kind: InnerProductKind, f: TestFunction, g: TestFunction,
                  w: ModelWeight, cfg: QuadratureConfig = DEFAULT_CONFIG
                  ) -> InnerProductValue:
    """Weighted inner product; the indefinite kind uses the symmetric limit.

    Diverged diagnostics are reported, never raised.
    """
    if kind.name == "indefinite_r_ip":
        res = symmetric_principal_limit(f, g, w, cfg)
    else:
        res = integrate_weighted(f, g, _weight_for(kind, w), cfg)
    return InnerProductValue(res.value, res)


def _combine(parts: list[IntegrationResult]) -> IntegrationResult:
    value = sum(p.value for p in parts)
    err = sum(p.abs_error_estimate for p in parts)
    rank = {Status.CONVERGED: 0, Status.INDETERMINATE: 1, Status.DIVERGED: 2}
    worst = max(parts, key=lambda p: rank[p.status])
    tail = worst.tail_exponent
    return IntegrationResult(value, err, worst.status, tail,
                             max(p.n_groups for p in parts))


def t_alpha_pos(f: TestFunction, g: TestFunction, alpha: float, w: ModelWeight,
                cfg: QuadratureConfig = DEFAULT_CONFIG) -> InnerProductValue:
    """Positive form 2 (f_o, g_o)_omega_alpha + (f, g)_eta_alpha."""
    odd_term = integrate_weighted(odd_part(f), odd_part(g), omega(w, alpha), cfg)
    eta_term = integrate_weighted(f, g, eta(w, alpha), cfg)
    scaled = IntegrationResult(2.0 * odd_term.value,
                               2.0 * odd_term.abs_error_estimate,
                               odd_term.status, odd_term.tail_exponent,
                               odd_term.n_groups)
    combined = _combine([scaled, eta_term])
    return InnerProductValue(combined.value, combined)


def t_alpha_indef(f: TestFunction, g: TestFunction, alpha: float, w: ModelWeight,
                  cfg: QuadratureConfig = DEFAULT_CONFIG) -> InnerProductValue:
    """Indefinite form as the symmetric principal limit of f conj(g) r.

    For compactly supported inputs this equals the plain signed integral;
    alpha only determines the space the limit is taken in, not its value.
    """
    del alpha  # value is alpha-independent; kept for the domain bookkeeping
    res = symmetric_principal_limit(f, g, w, cfg)
    return InnerProductValue(res.value, res)


def indefinite_direct(f: TestFunction, g: TestFunction, w: ModelWeight,
                      cfg: QuadratureConfig = DEFAULT_CONFIG) -> InnerProductValue:
    """[f, g]_r as a difference of two one-sided absolute-weight integrals.

    Independent route used to cross-check the alpha = 0 closure against the
    symmetric principal limit.
    """
    pos = integrate_weighted(one_sided(f, +1), g, abs_r(w), cfg)
    neg = integrate_weighted(one_sided(f, -1), g, abs_r(w), cfg)
    flipped = IntegrationResult(-neg.value, neg.abs_error_estimate, neg.status,
                                neg.tail_exponent, neg.n_groups)
    combined = _combine([pos, flipped])
    return InnerProductValue(combined.value, combined)


# ---------------------------------------------------------------------------
# The operators Q_alpha, S_alpha and the projections
# ---------------------------------------------------------------------------

def _check_alpha(alpha: float):
    if not 0.0 <= alpha <= 2.0:
        raise ValueError("alpha must lie in [0, 2]")


def apply_Q_alpha(f: TestFunction, alpha: float) -> TestFunction:
    """(Q_alpha f)(x) = sqrt(|x|^a + 1) f(x) - sqrt(|x|^a) f(-x)."""
    _check_alpha(alpha)
    rule = f.rule

    def qrule(x):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x) ** alpha
        return (np.sqrt(ax + 1.0) * np.asarray(rule(x))
                - np.sqrt(ax) * np.asarray(rule(-x)))

    parity = f.parity  # even factor times f, minus even factor times f(-x)
    return TestFunction(
        rule=qrule,
        parity=parity,
        support_radius=f.support_radius,
        tail_exponent=None,
        breakpoints=_sym(f.breakpoints),
        label=f"Q_{alpha:g}({f.label})" if f.label else "",
    )


def apply_S_alpha(f: TestFunction, alpha: float) -> TestFunction:
    """(S_alpha f)(x) = sgn(x) (Q_alpha f)(x), defined on compact support."""
    _check_alpha(alpha)
    if not f.is_compact():
        raise UnsupportedDomain("S_alpha is defined on compactly supported "
                                "functions only")
    q = apply_Q_alpha(f, alpha)
    qrule = q.rule

    def srule(x):
        x = np.asarray(x, dtype=float)
        return np.sign(x) * np.asarray(qrule(x))

    parity = {"even": "odd", "odd": "even"}.get(f.parity, "none")
    return TestFunction(
        rule=srule,
        parity=parity,
        support_radius=f.support_radius,
        tail_exponent=-math.inf,
        breakpoints=_sym(f.breakpoints) + (0.0,),
        label=f"S_{alpha:g}({f.label})" if f.label else "",
    )


def apply_J_alpha(f: TestFunction, alpha: float) -> TestFunction:
    """Fundamental symmetry on compact support: J_alpha = S_alpha."""
    return apply_S_alpha(f, alpha)


def project_pm(f: TestFunction, alpha: float, sign: int) -> TestFunction:
    """P_alpha^+- f = (f +- S_alpha f) / 2 on compactly supported f."""
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    s = apply_S_alpha(f, alpha)
    rule, srule = f.rule, s.rule

    def prule(x):
        return 0.5 * (np.asarray(rule(x)) + sign * np.asarray(srule(x)))

    tag = "+" if sign > 0 else "-"
    return TestFunction(
        rule=prule,
        parity="none",
        support_radius=f.support_radius,
        tail_exponent=-math.inf,
        breakpoints=_sym(f.breakpoints) + (0.0,),
        label=f"P{tag}_{alpha:g}({f.label})" if f.label else "",
    )


def _sym(breaks):
    out = set()
    for b in breaks:
        out.add(b)
        out.add(-b)
    return tuple(sorted(out))
