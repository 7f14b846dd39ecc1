"""Weight family and named test functions of the sign-indefinite model line.

The model is built from an odd weight r with a gap around the origin:

    r(x) = 0 on [-eps, eps],   x r(x) > 0 for |x| > eps.

From r we derive the non-negative weights

    r_+ = x r,    r_- = r / x,    |r|,
    eta_alpha   = (sqrt(|x|^a + 1) - sqrt(|x|^a)) |r|,
    omega_alpha = sqrt(|x|^a) |r|,
    eta_tilde_alpha = |r| / sqrt(|x|^a),

all vanishing on the gap.  The default family r(x) = sgn(x) |x|^s makes
every integral used in the verification suites closed-form.

Evaluation of eta_alpha uses the cancellation-free form
|r| / (sqrt(|x|^a + 1) + sqrt(|x|^a)); the naive difference loses ~a*log10|x|
digits at large |x|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

INF = math.inf

_PARITIES = ("even", "odd", "none")


def _as_array(x):
    return np.asarray(x, dtype=float)


# ---------------------------------------------------------------------------
# Weights
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelWeight:
    """Odd gap weight r.  ``rule`` overrides the default sgn(x)|x|^s family."""

    epsilon: float = 1.0
    tail_power: float = 0.0
    rule: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("gap radius epsilon must be > 0")
        if not self.tail_power > -1:
            raise ValueError("tail power must be > -1 for local integrability")
        if self.rule is not None:
            self._validate_rule()

    def _validate_rule(self):
        xs = self.epsilon * np.array([1.5, 2.0, 7.0, 33.0])
        pos = _as_array(self.rule(xs))
        neg = _as_array(self.rule(-xs))
        if not np.allclose(neg, -pos, rtol=1e-12, atol=0.0):
            raise ValueError("weight rule is not odd at sampled points")
        if not np.all(pos > 0):
            raise ValueError("weight rule violates x*r(x) > 0 outside the gap")

    def __call__(self, x):
        x = _as_array(x)
        out = np.zeros_like(x)
        outside = np.abs(x) > self.epsilon
        if np.any(outside):
            if self.rule is None:
                xo = x[outside]
                out[outside] = np.sign(xo) * np.abs(xo) ** self.tail_power
            else:
                out[outside] = _as_array(self.rule(x[outside]))
        return out

    def abs(self, x):
        return np.abs(self(x))


_WEIGHT_KINDS = ("r_plus", "r_minus", "abs_r", "eta", "omega", "eta_tilde")


@dataclass(frozen=True)
class DerivedWeight:
    """Non-negative weight derived from a :class:`ModelWeight`."""

    base: ModelWeight
    kind: str
    alpha: Optional[float] = None

    def __post_init__(self):
        if self.kind not in _WEIGHT_KINDS:
            raise ValueError(f"unknown weight kind {self.kind!r}")
        needs_alpha = self.kind in ("eta", "omega", "eta_tilde")
        if needs_alpha:
            if self.alpha is None or not 0.0 <= self.alpha <= 2.0:
                raise ValueError("alpha must lie in [0, 2]")
        elif self.alpha is not None:
            raise ValueError(f"kind {self.kind!r} takes no alpha")

    @property
    def epsilon(self) -> float:
        return self.base.epsilon

    def __call__(self, x):
        x = _as_array(x)
        absr = self.base.abs(x)
        ax = np.abs(x)
        if self.kind == "abs_r":
            return absr
        if self.kind == "r_plus":
            return ax * absr
        if self.kind == "r_minus":
            out = np.zeros_like(absr)
            nz = absr > 0
            out[nz] = absr[nz] / ax[nz]
            return out
        a = self.alpha
        pow_a = ax**a
        if self.kind == "omega":
            return np.sqrt(pow_a) * absr
        if self.kind == "eta":
            return absr / (np.sqrt(pow_a + 1.0) + np.sqrt(pow_a))
        # eta_tilde
        out = np.zeros_like(absr)
        nz = absr > 0
        out[nz] = absr[nz] / np.sqrt(pow_a[nz])
        return out

    def tail_exponent(self) -> float:
        """Decay/growth power of the weight for |x| -> inf (declared family)."""
        s = self.base.tail_power
        if self.kind == "abs_r":
            return s
        if self.kind == "r_plus":
            return s + 1.0
        if self.kind == "r_minus":
            return s - 1.0
        if self.kind == "omega":
            return s + self.alpha / 2.0
        # eta and eta_tilde both behave like |r| |x|^(-alpha/2)
        return s - self.alpha / 2.0


def r_plus(w: ModelWeight) -> DerivedWeight:
    return DerivedWeight(w, "r_plus")


def r_minus(w: ModelWeight) -> DerivedWeight:
    return DerivedWeight(w, "r_minus")


def abs_r(w: ModelWeight) -> DerivedWeight:
    return DerivedWeight(w, "abs_r")


def eta(w: ModelWeight, alpha: float) -> DerivedWeight:
    return DerivedWeight(w, "eta", alpha)


def omega(w: ModelWeight, alpha: float) -> DerivedWeight:
    return DerivedWeight(w, "omega", alpha)


def eta_tilde(w: ModelWeight, alpha: float) -> DerivedWeight:
    return DerivedWeight(w, "eta_tilde", alpha)


def eval_weight(w, x):
    """Evaluate a model or derived weight; exact 0 on the gap."""
    out = w(np.asarray(x, dtype=float))
    return float(out) if np.isscalar(x) or np.ndim(x) == 0 else out


# ---------------------------------------------------------------------------
# Test functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TestFunction:
    """Evaluable scalar function with parity/support/tail metadata.

    ``support_radius`` is inf for full support, k for functions vanishing
    outside [-k, k].  ``breakpoints`` are panel hints for the quadrature
    (jumps or kinks of the rule); they never affect values, only accuracy.
    Metadata is advisory: wrong parity is caught by the sampled-parity check,
    and the tail exponent is only a fast path for membership decisions.
    """

    rule: Callable[[np.ndarray], np.ndarray]
    parity: str = "none"
    support_radius: float = INF
    tail_exponent: Optional[float] = None
    breakpoints: tuple = ()
    label: str = ""

    __test__ = False  # keep pytest from collecting this as a test class

    def __post_init__(self):
        if self.parity not in _PARITIES:
            raise ValueError(f"parity must be one of {_PARITIES}")
        if not self.support_radius > 0:
            raise ValueError("support radius must be positive")

    def __call__(self, x):
        scalar = np.isscalar(x) or np.ndim(x) == 0
        xa = _as_array(x)
        out = np.asarray(self.rule(xa))
        if out.shape != xa.shape:
            out = np.broadcast_to(out, xa.shape).copy()
        if scalar:
            val = complex(out.reshape(())[()])
            return val.real if val.imag == 0.0 else val
        return out

    # -- algebra used by the verification suites --------------------------

    def __add__(self, other: "TestFunction") -> "TestFunction":
        if not isinstance(other, TestFunction):
            return NotImplemented
        parity = self.parity if self.parity == other.parity else "none"
        f, g = self.rule, other.rule
        return TestFunction(
            rule=lambda x: np.asarray(f(x)) + np.asarray(g(x)),
            parity=parity,
            support_radius=max(self.support_radius, other.support_radius),
            tail_exponent=None,
            breakpoints=tuple(sorted(set(self.breakpoints) | set(other.breakpoints))),
            label=_join(self.label, "+", other.label),
        )

    def __rmul__(self, c) -> "TestFunction":
        c = complex(c)
        if c.imag == 0.0:
            c = c.real
        f = self.rule
        return TestFunction(
            rule=lambda x: c * np.asarray(f(x)),
            parity=self.parity,
            support_radius=self.support_radius,
            tail_exponent=self.tail_exponent,
            breakpoints=self.breakpoints,
            label=f"{c}*{self.label}" if self.label else "",
        )

    def is_compact(self) -> bool:
        return math.isfinite(self.support_radius)

    def check_parity(self, xs) -> bool:
        """Declared parity holds at the sampled symmetric pairs."""
        if self.parity == "none":
            return True
        xs = _as_array(xs)
        lhs = self(-xs)
        rhs = self(xs) if self.parity == "even" else -self(xs)
        return bool(np.allclose(lhs, rhs, rtol=1e-12, atol=1e-300))


def _join(a, op, b):
    return f"({a}{op}{b})" if a and b else ""


def zero_function() -> TestFunction:
    return TestFunction(
        rule=lambda x: np.zeros_like(_as_array(x)),
        parity="even",
        support_radius=INF,
        tail_exponent=-INF,
        label="0",
    )


def indicator(lo: float, hi: float, closed_lo: bool = False, closed_hi: bool = True,
              label: str = "") -> TestFunction:
    """Characteristic function of an interval, e.g. chi_(lo, hi]."""
    if not lo < hi:
        raise ValueError("indicator needs lo < hi")

    def rule(x):
        x = _as_array(x)
        left = x >= lo if closed_lo else x > lo
        right = x <= hi if closed_hi else x < hi
        return (left & right).astype(float)

    parity = "even" if lo == -hi and closed_lo == closed_hi else "none"
    support = max(abs(lo), abs(hi))
    return TestFunction(
        rule=rule,
        parity=parity,
        support_radius=support,
        tail_exponent=-INF,
        breakpoints=(lo, hi),
        label=label or f"chi({lo},{hi}]",
    )


def make_f_tau(tau: float, w: ModelWeight) -> TestFunction:
    """Odd witness f_tau(x) = sgn(x) / (sqrt|r| |x|^((tau+2)/4)) outside the gap."""
    if not 0.0 <= tau <= 2.0:
        raise ValueError("tau must lie in [0, 2]")
    p = (tau + 2.0) / 4.0
    eps = w.epsilon

    def rule(x):
        x = _as_array(x)
        out = np.zeros_like(x)
        outside = np.abs(x) > eps
        if np.any(outside):
            xo = x[outside]
            out[outside] = np.sign(xo) / (np.sqrt(w.abs(xo)) * np.abs(xo) ** p)
        return out

    return TestFunction(
        rule=rule,
        parity="odd",
        support_radius=INF,
        tail_exponent=-w.tail_power / 2.0 - p,
        breakpoints=(-eps, eps),
        label=f"f_{tau:g}",
    )


def make_g_tau(tau: float, w: ModelWeight) -> TestFunction:
    """Even witness g_tau(x) = 1 / (sqrt|r| |x|^((2-tau)/4)) outside the gap."""
    if not 0.0 <= tau <= 2.0:
        raise ValueError("tau must lie in [0, 2]")
    p = (2.0 - tau) / 4.0
    eps = w.epsilon

    def rule(x):
        x = _as_array(x)
        out = np.zeros_like(x)
        outside = np.abs(x) > eps
        if np.any(outside):
            xo = np.abs(x[outside])
            out[outside] = 1.0 / (np.sqrt(w.abs(xo)) * xo**p)
        return out

    return TestFunction(
        rule=rule,
        parity="even",
        support_radius=INF,
        tail_exponent=-w.tail_power / 2.0 - p,
        breakpoints=(-eps, eps),
        label=f"g_{tau:g}",
    )


def even_part(f: TestFunction) -> TestFunction:
    """f_e(x) = (f(x) + f(-x)) / 2; symbolic when the parity is declared."""
    if f.parity == "even":
        return f
    if f.parity == "odd":
        return zero_function()
    rule = f.rule
    return TestFunction(
        rule=lambda x: 0.5 * (np.asarray(rule(_as_array(x)))
                              + np.asarray(rule(-_as_array(x)))),
        parity="even",
        support_radius=f.support_radius,
        tail_exponent=None,
        breakpoints=_mirrored(f.breakpoints),
        label=f"even({f.label})" if f.label else "",
    )


def odd_part(f: TestFunction) -> TestFunction:
    """f_o(x) = (f(x) - f(-x)) / 2; symbolic when the parity is declared."""
    if f.parity == "odd":
        return f
    if f.parity == "even":
        return zero_function()
    rule = f.rule
    return TestFunction(
        rule=lambda x: 0.5 * (np.asarray(rule(_as_array(x)))
                              - np.asarray(rule(-_as_array(x)))),
        parity="odd",
        support_radius=f.support_radius,
        tail_exponent=None,
        breakpoints=_mirrored(f.breakpoints),
        label=f"odd({f.label})" if f.label else "",
    )


def _mirrored(breaks):
    out = set()
    for b in breaks:
        out.add(b)
        out.add(-b)
    return tuple(sorted(out))


def truncate(f: TestFunction, k: float) -> TestFunction:
    """chi_[-k,k] * f with compact support metadata."""
    if not k > 0:
        raise ValueError("truncation radius must be positive")
    rule = f.rule

    def trule(x):
        x = _as_array(x)
        return np.where(np.abs(x) <= k, np.asarray(rule(x)), 0.0)

    return TestFunction(
        rule=trule,
        parity=f.parity,
        support_radius=min(f.support_radius, k),
        tail_exponent=-INF,
        breakpoints=tuple(sorted(set(f.breakpoints) | {-k, k})),
        label=f"chi[-{k:g},{k:g}]*{f.label}" if f.label else "",
    )


def restrict(f: TestFunction, lo: float, hi: float, closed_lo: bool = False,
             closed_hi: bool = True) -> TestFunction:
    """chi_(lo,hi] * f (used for one-sided truncations and E(interval))."""
    chi = indicator(lo, hi, closed_lo, closed_hi)
    rule, crule = f.rule, chi.rule

    def prule(x):
        x = _as_array(x)
        return np.asarray(rule(x)) * crule(x)

    return TestFunction(
        rule=prule,
        parity="none",
        support_radius=min(f.support_radius, max(abs(lo), abs(hi))),
        tail_exponent=-INF,
        breakpoints=tuple(sorted(set(f.breakpoints) | {lo, hi})),
        label=f"chi({lo:g},{hi:g}]*{f.label}" if f.label else "",
    )


def one_sided(f: TestFunction, side: int) -> TestFunction:
    """Restriction of f to a half line (side=+1 keeps x > 0)."""
    rule = f.rule

    def srule(x):
        x = _as_array(x)
        mask = x > 0 if side > 0 else x < 0
        return np.asarray(rule(x)) * mask

    return TestFunction(
        rule=srule,
        parity="none",
        support_radius=f.support_radius,
        tail_exponent=None,
        breakpoints=tuple(sorted(set(f.breakpoints) | {0.0})),
        label=f"{f.label}|{'+' if side > 0 else '-'}" if f.label else "",
    )


def embedding_ratio_sup(w: ModelWeight, alpha: float, n: int = 400) -> dict:
    """Suprema over a log-spaced sample of the embedding-chain ratios.

    Finite values witness the continuous inclusions between the r_+,
    omega_alpha, eta_alpha and r_- weighted spaces.
    """
    xs = np.geomspace(w.epsilon * (1.0 + 1e-9), w.epsilon * 1e8, n)
    om, et = omega(w, alpha), eta(w, alpha)
    rp, rm = r_plus(w), r_minus(w)
    return {
        "omega/r_plus": float(np.max(om(xs) / rp(xs))),
        "eta/omega": float(np.max(et(xs) / om(xs))),
        "r_minus/eta": float(np.max(rm(xs) / et(xs))),
    }
