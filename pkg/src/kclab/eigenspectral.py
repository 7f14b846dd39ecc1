"""Eigenspectral function as indicator multiplication and its norm growth.

On the model line the eigenspectral function acts by  E(D) f = chi_D f.
Restricted to a Ritz space of piecewise-constant functions on dyadic
panels (refined so interval endpoints sit on panel boundaries), the
squared operator norm of E(D) becomes a generalized eigenvalue problem

    B v = theta A v,

with A the positive Gram matrix of the alpha form on the panel basis and
B its restriction to the panels inside D.  Because the Ritz space is
mapped into itself by chi_D, the computed sqrt(theta_max) is a certified
lower bound of the true operator norm; that is the direction needed to
exhibit unbounded growth.  For alpha = 0 the form is sandwiched between
(sqrt2-1) and (sqrt2+1) times the |r| norm, so every estimate is bounded
by sqrt2+1 and regularity is certified analytically, not numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import InsufficientSamples, SingularGram
from .model_space import ModelWeight, TestFunction, eta, omega
from .quadrature import DEFAULT_CONFIG, QuadratureConfig
from .forms import eta_ip, inner_product
from .model_space import make_g_tau

_REAL = (-math.inf, math.inf)


@dataclass(frozen=True)
class SpectralInterval:
    """Element of the semiring: a bounded interval, its complement, 0 or R."""

    lo: float = -math.inf
    hi: float = math.inf
    lo_closed: bool = False
    hi_closed: bool = True
    complement: bool = False
    empty: bool = False

    def __post_init__(self):
        if self.empty:
            if self.complement:
                raise ValueError("empty interval cannot be complemented")
            return
        if not self.lo <= self.hi:
            raise ValueError("endpoints out of order")
        if self.complement and not (math.isfinite(self.lo)
                                    and math.isfinite(self.hi)):
            raise ValueError("complement is only taken of bounded intervals")

    def is_bounded_interval(self) -> bool:
        return (not self.empty and not self.complement
                and math.isfinite(self.lo) and math.isfinite(self.hi))

    @property
    def is_real_line(self) -> bool:
        return (not self.empty and not self.complement
                and self.lo == -math.inf and self.hi == math.inf)

    def indicator(self, x):
        x = np.asarray(x, dtype=float)
        if self.empty:
            return np.zeros_like(x)
        left = x >= self.lo if self.lo_closed else x > self.lo
        right = x <= self.hi if self.hi_closed else x < self.hi
        inside = left & right
        if self.complement:
            inside = ~inside
        return inside.astype(float)

    def contains(self, x) -> bool:
        return bool(self.indicator(np.asarray([x]))[0] == 1.0)

    def closure_subset_of(self, lo: float, hi: float) -> bool:
        """Is the closure of this set inside the open interval (lo, hi)?"""
        if self.empty:
            return True
        if self.complement or not math.isfinite(self.lo) \
                or not math.isfinite(self.hi):
            return False
        return lo < self.lo and self.hi < hi

    def intersect(self, other: "SpectralInterval") -> "SpectralInterval":
        if self.empty or other.empty:
            return EMPTY
        if self.complement or other.complement:
            raise ValueError("intersection with complements not supported")
        lo, lo_c = max((self.lo, not self.lo_closed), (other.lo, not other.lo_closed))
        hi, hi_c = min((self.hi, self.hi_closed), (other.hi, other.hi_closed))
        lo_closed = not lo_c
        if lo > hi or (lo == hi and not (lo_closed and hi_c)):
            return EMPTY
        return SpectralInterval(lo, hi, lo_closed, hi_c)


EMPTY = SpectralInterval(empty=True)
REAL_LINE = SpectralInterval()


def interval(lo: float, hi: float, lo_closed: bool = False,
             hi_closed: bool = True) -> SpectralInterval:
    return SpectralInterval(lo, hi, lo_closed, hi_closed)


def apply_E(delta: SpectralInterval, f: TestFunction) -> TestFunction:
    """E(D) f = chi_D f with intersected support metadata."""
    if delta.is_real_line:
        return f
    rule = f.rule
    ind = delta.indicator

    def erule(x):
        return np.asarray(rule(np.asarray(x, dtype=float))) * ind(x)

    if delta.empty:
        support = f.support_radius
    elif delta.is_bounded_interval():
        support = min(f.support_radius, max(abs(delta.lo), abs(delta.hi)))
    else:
        support = f.support_radius
    cuts = set(f.breakpoints)
    for b in (delta.lo, delta.hi):
        if math.isfinite(b):
            cuts.add(b)
    parity = "even" if f.parity == "even" and delta.lo == -delta.hi \
        and delta.lo_closed == delta.hi_closed else "none"
    if f.parity == "odd" and delta.lo == -delta.hi \
            and delta.lo_closed == delta.hi_closed:
        parity = "odd"
    return TestFunction(rule=erule, parity=parity, support_radius=support,
                        tail_exponent=None if not delta.is_bounded_interval()
                        else -math.inf,
                        breakpoints=tuple(sorted(cuts)),
                        label=f"E({delta.lo:g},{delta.hi:g}]{f.label}"
                        if f.label else "")


# ---------------------------------------------------------------------------
# Ritz norm estimation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """Dyadic panel layout from the gap edge out to ``max_radius``."""

    max_radius: float = 64.0
    panels_per_octave: int = 1
    power_tol: float = 1e-8
    max_iterations: int = 500

    def boundaries(self, eps: float, extra=()):
        pts = [eps]
        b = eps
        while b < self.max_radius * (1.0 - 1e-12):
            b *= 2.0
            pts.append(min(b, self.max_radius))
        if self.panels_per_octave > 1:
            refined = []
            for a, c in zip(pts[:-1], pts[1:]):
                refined.extend(np.geomspace(a, c, self.panels_per_octave + 1)[:-1])
            refined.append(pts[-1])
            pts = refined
        cuts = sorted(set(pts) | {e for e in extra if eps < e < self.max_radius})
        return np.array(cuts)


def _panel_moments(bounds: np.ndarray, w_eval, nodes: int = 32):
    x, wq = np.polynomial.legendre.leggauss(nodes)
    a, b = bounds[:-1], bounds[1:]
    mid = 0.5 * (a + b)[:, None]
    half = 0.5 * (b - a)[:, None]
    pts = mid + half * x[None, :]
    vals = w_eval(pts.ravel()).reshape(pts.shape)
    return (half[:, 0]) * (vals @ wq)


def _assemble_gram(eps: float, alpha: float, w: ModelWeight, spec: GridSpec,
                   extra_cuts=()):
    """Panel Gram of the alpha form on a mirror-symmetric dyadic layout.

    For a panel P with mirror P' the form couples only the pair:
    diagonal eta+omega moments, off-diagonal -omega.
    """
    bounds = spec.boundaries(eps, extra_cuts)
    if len(bounds) < 2:
        raise SingularGram("no panels outside the gap")
    m_eta = _panel_moments(bounds, eta(w, alpha))
    m_omega = _panel_moments(bounds, omega(w, alpha))
    n = len(m_eta)
    # panel order: negatives (mirrored, outermost first), then positives
    centers = 0.5 * (bounds[:-1] + bounds[1:])
    pos_panels = list(zip(bounds[:-1], bounds[1:]))
    panels = [(-b, -a) for a, b in reversed(pos_panels)] + pos_panels
    size = 2 * n
    A = np.zeros((size, size))
    for i in range(n):
        j_pos = n + i
        j_neg = n - 1 - i
        diag = m_eta[i] + m_omega[i]
        A[j_pos, j_pos] = diag
        A[j_neg, j_neg] = diag
        A[j_pos, j_neg] = -m_omega[i]
        A[j_neg, j_pos] = -m_omega[i]
    if np.any(np.diag(A) <= 0.0) or not np.all(np.isfinite(A)):
        raise SingularGram("panel moments degenerate (grid too coarse "
                           "or weight vanishing)")
    return A, panels


def estimate_projection_norm(delta: SpectralInterval, alpha: float,
                             grid_spec: GridSpec, w: ModelWeight = ModelWeight(),
                             cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Certified Ritz lower bound for the operator norm of E(delta).

    Power iteration on the generalized problem with the positive Gram,
    all-ones start vector, converged when successive Rayleigh quotients
    agree to ``power_tol``.
    """
    eps = w.epsilon
    extra = [abs(b) for b in (delta.lo, delta.hi)
             if math.isfinite(b) and abs(b) > eps]
    A, panels = _assemble_gram(eps, alpha, w, grid_spec, extra)
    inside = np.array([_panel_inside(delta, a, b) for a, b in panels])
    if not np.any(inside):
        return 0.0
    try:
        chol = scipy.linalg.cho_factor(A)
    except scipy.linalg.LinAlgError as exc:
        raise SingularGram(str(exc)) from exc

    mask = inside.astype(float)

    def apply_B(v):
        return mask * (A @ (mask * v))

    v = np.ones(len(panels))
    theta = 0.0
    for _ in range(grid_spec.max_iterations):
        bv = apply_B(v)
        nb = float(np.linalg.norm(bv))
        if nb == 0.0:
            return 0.0
        w_vec = scipy.linalg.cho_solve(chol, bv)
        norm_a = math.sqrt(float(w_vec @ (A @ w_vec)))
        if norm_a == 0.0:
            return 0.0
        v = w_vec / norm_a
        new_theta = float(v @ apply_B(v))
        if abs(new_theta - theta) <= grid_spec.power_tol * max(1.0, abs(new_theta)):
            theta = new_theta
            break
        theta = new_theta
    return math.sqrt(max(theta, 0.0))


def _panel_inside(delta: SpectralInterval, a: float, b: float) -> bool:
    mid = 0.5 * (a + b)
    return bool(delta.indicator(np.asarray([mid]))[0] == 1.0)


# ---------------------------------------------------------------------------
# Growth curves and the critical-point classifier
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GrowthCurve:
    alpha: float
    epsilon: float
    samples: tuple  # (k, norm_estimate, paper_lower_bound, sqrt_variant_bound)
    fitted_exponent: float

    def ks(self):
        return np.array([s[0] for s in self.samples])

    def norms(self):
        return np.array([s[1] for s in self.samples])


@dataclass(frozen=True)
class CriticalPointVerdict:
    classification: str  # regular | singular | indeterminate
    fitted_exponent: float
    bounded_witness: Optional[float] = None


def growth_curve(alpha: float, ks: Sequence[float], grid_spec: Optional[GridSpec],
                 w: ModelWeight = ModelWeight(),
                 cfg: QuadratureConfig = DEFAULT_CONFIG) -> GrowthCurve:
    """Norm estimates of E((eps, k]) with the two analytic lower bounds.

    The first bound is  2 (k^(a/2) - eps^(a/2)) / (a (g_0, g_0)_eta_a);
    the second is its square root, the variant that follows from the
    standard norm inequality.  Dominance is only asserted against the
    square-root form.  For alpha = 0 the witness g_0 leaves the space and
    no bound is available; both columns are 0.
    """
    ks = list(ks)
    if not all(b > a for a, b in zip(ks, ks[1:])):
        raise ValueError("k schedule must be strictly increasing")
    if not all(k > w.epsilon for k in ks):
        raise ValueError("every k must exceed the gap radius")
    eps = w.epsilon
    if grid_spec is None:
        grid_spec = GridSpec(max_radius=4.0 * max(ks))
    c_alpha = None
    if alpha > 0.0:
        from .quadrature import Status
        g0 = make_g_tau(0.0, w)
        c_alpha_ip = inner_product(eta_ip(alpha), g0, g0, w, cfg)
        diag = c_alpha_ip.diagnostics
        if diag.status is Status.CONVERGED:
            c_alpha = float(np.real(c_alpha_ip.value))
        elif diag.status is Status.INDETERMINATE:
            # over-estimating the constant keeps the bound a lower bound
            c_alpha = float(np.real(c_alpha_ip.value)) + diag.abs_error_estimate
        # Diverged (g0 outside the space, or a boundary tie): no bound
    samples = []
    for k in ks:
        delta = interval(eps, float(k))
        est = estimate_projection_norm(delta, alpha, grid_spec, w, cfg)
        if c_alpha is not None and c_alpha > 0.0:
            paper = 2.0 * (k ** (alpha / 2.0) - eps ** (alpha / 2.0)) \
                / (alpha * c_alpha)
            variant = math.sqrt(max(paper, 0.0))
        else:
            paper = 0.0
            variant = 0.0
        samples.append((float(k), est, paper, variant))
    norms = np.array([s[1] for s in samples])
    karr = np.array(ks, dtype=float)
    good = norms > 0
    if np.count_nonzero(good) >= 2:
        fitted = float(np.polyfit(np.log(karr[good]), np.log(norms[good]), 1)[0])
    else:
        fitted = 0.0
    return GrowthCurve(alpha, eps, tuple(samples), fitted)


def classify_infinity(curve: GrowthCurve, cfg: QuadratureConfig = DEFAULT_CONFIG
                      ) -> CriticalPointVerdict:
    """Singular iff the fitted growth exponent exceeds the margin.

    Small positive alpha needs at least four decades of k range before a
    flat-looking curve is trusted as regular; alpha = 0 is certified by
    the analytic sandwich instead.
    """
    if len(curve.samples) < 4:
        raise InsufficientSamples("need at least 4 growth samples")
    margin = cfg.exponent_margin
    if curve.fitted_exponent > margin:
        return CriticalPointVerdict("singular", curve.fitted_exponent)
    ks = curve.ks()
    decades = math.log10(ks[-1] / ks[0])
    if 0.0 < curve.alpha <= 0.2 and decades < 4.0:
        return CriticalPointVerdict("indeterminate", curve.fitted_exponent)
    return CriticalPointVerdict("regular", curve.fitted_exponent,
                                bounded_witness=float(np.max(curve.norms())))
