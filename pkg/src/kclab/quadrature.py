"""Weighted integration over the real line with gap-aware truncation.

All weights in scope vanish on a gap [-eps, eps] and have algebraic tails,
so the domain is covered by dyadic shells [K, 2K] starting at the gap edge.
Shell integrals are computed by fixed-order Gauss-Legendre panels (split at
declared breakpoints of the integrands) and the shell increments drive a
three-way classifier:

* increments decay geometrically -> the tail sum is accelerated by a
  geometric extrapolation plus one Aitken step, and the run is Converged
  once two consecutive accelerated estimates agree within tolerance;
* the fitted increment exponent sits above the integrability threshold
  -> Diverged;
* fitted exponent inside the +-margin band around the threshold with
  monotonically growing partial integrals and no stabilisation
  -> Diverged as well (log-divergent boundary ties), otherwise the budget
  runs out and the result is Indeterminate.

Increment exponents follow the integrand convention: a tail |h| ~ C x^p
produces shell increments ~ C' K^(p+1), so the threshold p = -1 separates
the classes and the margin keeps the classifier honest near it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConfigError, InsufficientSamples, NonFiniteEvaluation
from .model_space import DerivedWeight, ModelWeight, TestFunction

_ZERO_FLOOR = 1e-300
# ratios above this are treated as non-decaying for extrapolation purposes
_RHO_MAX = 0.97


class Status(enum.Enum):
    CONVERGED = "Converged"
    DIVERGED = "Diverged"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    k0: float = 2.0
    doublings: int = 48
    nodes_per_panel: int = 24
    exponent_margin: float = 0.1

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ConfigError("tolerances must be positive")
        if not self.k0 > 0:
            raise ConfigError("k0 must be positive")
        if self.doublings < 4:
            raise ConfigError("need at least 4 doublings")
        if self.nodes_per_panel < 8:
            raise ConfigError("need at least 8 nodes per panel")
        if not 0.0 < self.exponent_margin < 0.5:
            raise ConfigError("exponent margin must lie in (0, 0.5)")


DEFAULT_CONFIG = QuadratureConfig()


@dataclass(frozen=True)
class IntegrationResult:
    value: complex
    abs_error_estimate: float
    status: Status
    tail_exponent: Optional[float] = None
    n_groups: int = 0

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED

    def real_value(self) -> float:
        return float(np.real(self.value))


@lru_cache(maxsize=16)
def _gl_nodes(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _eval_checked(fn, x):
    out = np.asarray(fn(x))
    if not np.all(np.isfinite(out)):
        raise NonFiniteEvaluation(
            f"non-finite value at x={x[np.argmax(~np.isfinite(out))]!r}")
    return out


def _panel_quad(h: Callable, a: float, b: float, n: int) -> complex:
    x, w = _gl_nodes(n)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    vals = h(mid + half * x)
    return half * complex(np.sum(w * vals)) if np.iscomplexobj(vals) \
        else half * float(np.sum(w * vals))


def _split(a: float, b: float, cuts: Sequence[float]):
    pts = [a] + [c for c in sorted(set(cuts)) if a < c < b] + [b]
    return list(zip(pts[:-1], pts[1:]))


class _Accumulator:
    """Shell-increment classifier shared by all improper integrators.

    ``hold_radius`` delays the zero-increment exit until the shells have
    passed every declared breakpoint, so gaps between support pieces are
    not mistaken for an exhausted tail.
    """

    def __init__(self, cfg: QuadratureConfig, hold_radius: float = 0.0):
        self.cfg = cfg
        self.hold_radius = hold_radius
        self.total = 0.0 + 0.0j
        self.increments: list[complex] = []
        self.radii: list[float] = []
        self.estimates: list[complex] = []
        self.changes: list[float] = []

    # -- bookkeeping -------------------------------------------------------

    def push(self, radius: float, increment: complex) -> Optional[IntegrationResult]:
        self.total += increment
        self.increments.append(increment)
        self.radii.append(radius)
        self.estimates.append(self._accelerated())
        if len(self.estimates) >= 2:
            self.changes.append(abs(self.estimates[-1] - self.estimates[-2]))
        return self._decide()

    def _accelerated(self) -> complex:
        d = self.increments
        est = self.total
        # geometric tail extrapolation, gated on two consecutive consistent
        # decay ratios so finite or irregular tails are left untouched
        if len(d) >= 3 and abs(d[-2]) > _ZERO_FLOOR and abs(d[-3]) > _ZERO_FLOOR:
            rho = d[-1] / d[-2]
            rho_prev = d[-2] / d[-3]
            if 0.0 < abs(rho) < _RHO_MAX \
                    and abs(rho - rho_prev) <= 0.25 * abs(rho):
                est = self.total + d[-1] * rho / (1.0 - rho)
                # one Aitken step on the extrapolant sequence kills the
                # next-order tail correction; only applied while contracting
                e = self.estimates
                if len(e) >= 2:
                    dx1 = e[-1] - e[-2]
                    dx2 = est - e[-1]
                    den = dx2 - dx1
                    if abs(dx2) < 0.9 * abs(dx1) \
                            and abs(den) > 1e-2 * abs(dx1):
                        cand = est - dx2 * dx2 / den
                        if abs(cand - est) <= 2.0 * abs(dx2):
                            est = cand
        return est

    def fitted_exponent(self) -> Optional[float]:
        ks, ds = [], []
        for k, d in zip(self.radii[1:], np.abs(self.increments[1:])):
            if d > _ZERO_FLOOR:
                ks.append(k)
                ds.append(d)
        if len(ds) < 3:
            return None
        ks, ds = np.array(ks[-8:]), np.array(ds[-8:])
        slope = np.polyfit(np.log(ks / ks[0]), np.log(ds), 1)[0]
        return float(slope) - 1.0

    # -- decisions ---------------------------------------------------------

    def _threshold(self) -> float:
        scale = max(abs(self.estimates[-1]), abs(self.total))
        return max(self.cfg.abs_tol, self.cfg.rel_tol * scale)

    def _value(self):
        v = self.estimates[-1]
        return v.real if v.imag == 0.0 else v

    def _decide(self) -> Optional[IntegrationResult]:
        cfg, d = self.cfg, self.increments
        m = len(d)
        if m < 2:
            return None
        thresh = self._threshold()
        seen_signal = any(abs(x) > _ZERO_FLOOR for x in d)
        past_hold = self.radii[-1] >= 2.0 * self.hold_radius
        if not (seen_signal and past_hold):
            return None

        if abs(d[-1]) <= _ZERO_FLOOR and abs(d[-2]) <= _ZERO_FLOOR:
            # the tail is exactly zero, so the raw total is the answer
            v = self.total
            v = v.real if v.imag == 0.0 else v
            return IntegrationResult(v, abs(d[-1]) + abs(d[-2]),
                                     Status.CONVERGED, -math.inf, m)

        if len(self.changes) >= 2 and self.changes[-1] <= 0.5 * thresh \
                and self.changes[-2] <= 0.5 * thresh:
            err = self.changes[-1] + self.changes[-2]
            return IntegrationResult(self._value(), err, Status.CONVERGED,
                                     self.fitted_exponent(), m)

        p = self.fitted_exponent()
        if p is not None and p >= -1.0 + cfg.exponent_margin and m >= 4 \
                and abs(d[-1]) >= 0.9 * abs(d[-2]):
            return IntegrationResult(self._value(), math.inf,
                                     Status.DIVERGED, p, m)
        return None

    def finish(self) -> IntegrationResult:
        m = len(self.increments)
        if all(abs(x) <= _ZERO_FLOOR for x in self.increments):
            v = self.total
            v = v.real if v.imag == 0.0 else v
            return IntegrationResult(v, 0.0, Status.CONVERGED, -math.inf, m)
        p = self.fitted_exponent()
        if p is not None and abs(p + 1.0) < self.cfg.exponent_margin \
                and self._partials_growing():
            return IntegrationResult(self._value(), math.inf,
                                     Status.DIVERGED, p, m)
        err = abs(self.increments[-1]) if self.increments else 0.0
        if self.changes:
            err = max(err, self.changes[-1])
        return IntegrationResult(self._value(), err, Status.INDETERMINATE, p, m)

    def _partials_growing(self) -> bool:
        if len(self.increments) < 4:
            return False
        partials = np.abs(np.cumsum(self.increments))
        return bool(partials[-1] > partials[-2] > partials[-3])


# ---------------------------------------------------------------------------
# Dyadic shell construction
# ---------------------------------------------------------------------------

def _shells(eps: float, cfg: QuadratureConfig, cap: float, cuts):
    """Yield (radius, panels) for [eps, k0], then the dyadic shells."""
    if cfg.k0 <= eps:
        raise ConfigError(f"k0={cfg.k0} must exceed the weight gap eps={eps}")
    lo = eps
    radius = cfg.k0
    for _ in range(cfg.doublings + 1):
        hi = min(radius, cap)
        panels = _split(lo, hi, cuts) if hi > lo else []
        yield radius, panels
        lo = max(lo, hi)
        radius *= 2.0


def _abs_cuts(*fns: TestFunction):
    cuts = set()
    for f in fns:
        for b in f.breakpoints:
            cuts.add(abs(b))
    return sorted(cuts)


def _paired_integrand(f: TestFunction, g: TestFunction, w) -> Callable:
    def h(t):
        fv = _eval_checked(f.rule, t)
        gv = _eval_checked(g.rule, t)
        wv = _eval_checked(w, t)
        fm = _eval_checked(f.rule, -t)
        gm = _eval_checked(g.rule, -t)
        wm = _eval_checked(w, -t)
        return fv * np.conj(gv) * wv + fm * np.conj(gm) * wm
    return h


def _run_shells(h: Callable, eps: float, cap: float, cuts,
                cfg: QuadratureConfig) -> IntegrationResult:
    if math.isfinite(cap):
        return _proper_integral(h, eps, cap, cuts, cfg)
    hold = max((c for c in cuts if math.isfinite(c)), default=0.0)
    acc = _Accumulator(cfg, hold_radius=hold)
    for radius, panels in _shells(eps, cfg, cap, cuts):
        inc = 0.0 + 0.0j
        for a, b in panels:
            inc += _panel_quad(h, a, b, cfg.nodes_per_panel)
        verdict = acc.push(radius, inc)
        if verdict is not None:
            return verdict
    return acc.finish()


def _proper_integral(h: Callable, eps: float, cap: float, cuts,
                     cfg: QuadratureConfig) -> IntegrationResult:
    """Compactly supported integrand: evaluate the whole region directly.

    The error estimate compares the nominal rule with the doubled-order
    rule, which is also the value reported.
    """
    def total(n):
        out = 0.0 + 0.0j
        for radius, panels in _shells(eps, cfg, cap, cuts):
            for a, b in panels:
                out += _panel_quad(h, a, b, n)
            if min(radius, cap) >= cap:
                break
        return out

    coarse = total(cfg.nodes_per_panel)
    fine = total(2 * cfg.nodes_per_panel)
    err = abs(fine - coarse)
    v = fine.real if fine.imag == 0.0 else fine
    return IntegrationResult(v, err, Status.CONVERGED, -math.inf, 0)


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def integrate_weighted(f: TestFunction, g: TestFunction, w: DerivedWeight,
                       cfg: QuadratureConfig = DEFAULT_CONFIG) -> IntegrationResult:
    """Integral of f conj(g) w over R, exact 0 on the gap where w vanishes."""
    eps = w.epsilon
    cap = min(f.support_radius, g.support_radius)
    if cap <= eps:
        return IntegrationResult(0.0, 0.0, Status.CONVERGED, -math.inf, 0)
    cuts = _abs_cuts(f, g)
    return _run_shells(_paired_integrand(f, g, w), eps, cap, cuts, cfg)


def symmetric_principal_limit(f: TestFunction, g: TestFunction, r: ModelWeight,
                              cfg: QuadratureConfig = DEFAULT_CONFIG
                              ) -> IntegrationResult:
    """lim_k of the symmetric truncations of the signed-weight integral.

    Mirror points are evaluated pairwise inside every shell, so odd
    integrands cancel exactly at every truncation level (one-sided pieces
    may diverge even when this limit exists).
    """
    eps = r.epsilon
    cap = min(f.support_radius, g.support_radius)
    if cap <= eps:
        return IntegrationResult(0.0, 0.0, Status.CONVERGED, -math.inf, 0)
    cuts = _abs_cuts(f, g)
    return _run_shells(_paired_integrand(f, g, r), eps, cap, cuts, cfg)


def estimate_tail_exponent(samples: Sequence[tuple], cfg: QuadratureConfig
                           = DEFAULT_CONFIG) -> float:
    """Integrand exponent p fitted from partial integrals at increasing radii.

    An increment over [k, 2k] of C x^p behaves like C' k^(p+1), so the
    log-log slope of the increments is shifted by one.  Constant-zero
    increments return the -inf sentinel.
    """
    if len(samples) < 3:
        raise InsufficientSamples("need at least 3 (k, partial) samples")
    ks = np.array([float(s[0]) for s in samples])
    vals = np.array([complex(s[1]) for s in samples])
    if not np.all(np.diff(ks) > 0):
        raise InsufficientSamples("radii must be strictly increasing")
    inc = np.abs(np.diff(vals))
    keep = inc > _ZERO_FLOOR
    if not np.any(keep):
        return -math.inf
    if np.count_nonzero(keep) < 2:
        raise InsufficientSamples("need at least 2 nonzero increments")
    lk = np.log(ks[:-1][keep])
    ld = np.log(inc[keep])
    slope = np.polyfit(lk, ld, 1)[0]
    return float(slope) - 1.0


@dataclass(frozen=True)
class Panel:
    """Integration panel, optionally with a change of variable s -> x."""
    a: float
    b: float
    transform: Optional[Callable] = None
    jacobian: Optional[Callable] = None


def integrate_panel_groups(integrand: Callable, groups: Sequence[Sequence[Panel]],
                           cfg: QuadratureConfig = DEFAULT_CONFIG,
                           radii: Optional[Sequence[float]] = None
                           ) -> IntegrationResult:
    """Generic engine over caller-supplied panel groups (panel hints).

    Each group plays the role of one truncation shell; graded or mapped
    panels let callers handle endpoint singularities while this module
    stays oblivious to where they came from.
    """
    if radii is None:
        radii = [2.0**m for m in range(len(groups))]
    acc = _Accumulator(cfg)
    for radius, panels in zip(radii, groups):
        inc = 0.0 + 0.0j
        for p in panels:
            if p.transform is None:
                inc += _panel_quad(lambda x: _eval_checked(integrand, x),
                                   p.a, p.b, cfg.nodes_per_panel)
            else:
                tf, jac = p.transform, p.jacobian

                def h(s):
                    return _eval_checked(integrand, tf(s)) * jac(s)
                inc += _panel_quad(h, p.a, p.b, cfg.nodes_per_panel)
        verdict = acc.push(radius, inc)
        if verdict is not None:
            return verdict
    return acc.finish()
