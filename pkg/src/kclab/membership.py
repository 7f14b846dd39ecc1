"""Integrability oracle for the weighted L^2 spaces and the form domains.

Membership of f in L^2_w is the convergence of the weighted square
integral.  Membership in the alpha form domain is the conjunction of three
such checks: f against r_-, the even part against eta_alpha and the odd
part against omega_alpha.

When both the function and the weight declare tail exponents the verdict
follows from the exponent of |f|^2 w alone (strictly below -1 means
member, ties are log-divergent and excluded); the metadata is a fast path
and never changes a decidable numeric answer.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

from .errors import OrderViolation
from .model_space import (
    DerivedWeight,
    ModelWeight,
    TestFunction,
    eta,
    even_part,
    make_f_tau,
    make_g_tau,
    odd_part,
    omega,
    r_minus,
)
from .quadrature import (
    DEFAULT_CONFIG,
    QuadratureConfig,
    Status,
    integrate_weighted,
)


class Verdict(enum.Enum):
    MEMBER = "member"
    NOT_MEMBER = "not_member"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class MembershipVerdict:
    verdict: Verdict
    evidence: tuple = ()
    spaces_checked: tuple = ()

    def __bool__(self):
        return self.verdict is Verdict.MEMBER


_STATUS_TO_VERDICT = {
    Status.CONVERGED: Verdict.MEMBER,
    Status.DIVERGED: Verdict.NOT_MEMBER,
    Status.INDETERMINATE: Verdict.INDETERMINATE,
}


def _analytic_verdict(f: TestFunction, w: DerivedWeight) -> Optional[Verdict]:
    if f.tail_exponent is None:
        return None
    if f.tail_exponent == -math.inf:
        return Verdict.MEMBER
    q = 2.0 * f.tail_exponent + w.tail_exponent()
    return Verdict.MEMBER if q < -1.0 else Verdict.NOT_MEMBER


def decide_membership(f: TestFunction, w: DerivedWeight,
                      cfg: QuadratureConfig = DEFAULT_CONFIG
                      ) -> MembershipVerdict:
    """Is f in L^2_w?  Fast analytic path when tail metadata is present."""
    fast = _analytic_verdict(f, w)
    if fast is not None:
        return MembershipVerdict(fast, (), ((w.kind, "analytic"),))
    res = integrate_weighted(f, f, w, cfg)
    return MembershipVerdict(_STATUS_TO_VERDICT[res.status], (res,),
                             ((w.kind, res.status.value),))


def decide_dom_t_alpha(f: TestFunction, alpha: float, w: ModelWeight,
                       cfg: QuadratureConfig = DEFAULT_CONFIG
                       ) -> MembershipVerdict:
    """f in dom t_alpha: f in L^2_{r_-}, f_e in L^2_{eta_a}, f_o in L^2_{omega_a}."""
    if not 0.0 <= alpha <= 2.0:
        raise ValueError("alpha must lie in [0, 2]")
    checks = [
        (f, r_minus(w)),
        (even_part(f), eta(w, alpha)),
        (odd_part(f), omega(w, alpha)),
    ]
    verdicts, evidence, spaces = [], [], []
    for fn, weight in checks:
        v = decide_membership(fn, weight, cfg)
        verdicts.append(v.verdict)
        evidence.extend(v.evidence)
        spaces.extend(v.spaces_checked)
    if any(v is Verdict.NOT_MEMBER for v in verdicts):
        out = Verdict.NOT_MEMBER
    elif all(v is Verdict.MEMBER for v in verdicts):
        out = Verdict.MEMBER
    else:
        out = Verdict.INDETERMINATE
    return MembershipVerdict(out, tuple(evidence), tuple(spaces))


@dataclass(frozen=True)
class WitnessRow:
    function: str
    domain_alpha: float
    verdict: Verdict
    expected: Verdict

    @property
    def matches(self) -> bool:
        return self.verdict is self.expected


@dataclass(frozen=True)
class WitnessTable:
    alpha: float
    beta: float
    rows: tuple

    @property
    def pattern_holds(self) -> bool:
        return all(r.matches for r in self.rows)


def witness_table(alpha: float, beta: float, w: ModelWeight = ModelWeight(),
                  cfg: QuadratureConfig = DEFAULT_CONFIG,
                  analytic: bool = True) -> WitnessTable:
    """Set-difference witnesses for an ordered pair of closure parameters.

    f_beta belongs to the alpha domain but not the beta domain, and
    g_alpha belongs to the beta domain but not the alpha domain.  With
    ``analytic=False`` the tail metadata is stripped and every verdict is
    forced through the numeric classifier.
    """
    if not 0.0 <= alpha < beta <= 2.0:
        raise OrderViolation(f"need 0 <= alpha < beta <= 2, got ({alpha}, {beta})")
    f_beta = make_f_tau(beta, w)
    g_alpha = make_g_tau(alpha, w)
    if not analytic:
        f_beta = _strip(f_beta)
        g_alpha = _strip(g_alpha)
    cases = [
        (f_beta.label, f_beta, alpha, Verdict.MEMBER),
        (f_beta.label, f_beta, beta, Verdict.NOT_MEMBER),
        (g_alpha.label, g_alpha, beta, Verdict.MEMBER),
        (g_alpha.label, g_alpha, alpha, Verdict.NOT_MEMBER),
    ]
    rows = []
    for label, fn, dom_alpha, expected in cases:
        got = decide_dom_t_alpha(fn, dom_alpha, w, cfg)
        rows.append(WitnessRow(label, dom_alpha, got.verdict, expected))
    return WitnessTable(alpha, beta, tuple(rows))


def _strip(f: TestFunction) -> TestFunction:
    return TestFunction(rule=f.rule, parity=f.parity,
                        support_radius=f.support_radius, tail_exponent=None,
                        breakpoints=f.breakpoints, label=f.label)
