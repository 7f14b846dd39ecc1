"""Finite-dimensional indefinite models and the contour-integral projection.

A discretized model carries a diagonal multiplication operator A on grid
points avoiding the gap, the diagonal indefinite Gram r_i w_i, and the
positive Gram of the alpha form on the panel-indicator basis.  The
spectral projection of an interval is computed directly from

    E(D) = lim lim  -(1/2 pi i) Int_C (A - lambda)^(-1) d lambda

over the rectangle through the corner points b+i, a+i, a-i, b-i with the
two vertical segments indented by +-i delta around the real axis.  For a
diagonal A the integral acts entrywise on 1/(x_i - lambda), so the exact
answer is residue counting: diag of the indicator.  The double limit is
realized by a two-step schedule in the endpoint dilation and in delta,
which is exact once both drop below the separation of the discrete
spectrum from the endpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import EndpointOnSpectrum, GapViolation, PoleHit, SingularGram
from .eigenspectral import SpectralInterval, interval
from .model_space import ModelWeight, eta, omega

_DEF_NODES = 24


@dataclass(frozen=True)
class DiscretizedModel:
    grid: np.ndarray          # strictly increasing, avoids [-eps, eps]
    weights: np.ndarray       # quadrature masses > 0
    r_values: np.ndarray      # r(x_i)
    gram_pos: np.ndarray      # alpha-form Gram on panel indicators
    gram_ind: np.ndarray      # diagonal entries r_i w_i (stored as vector)
    alpha: float
    epsilon: float

    @property
    def operator(self) -> np.ndarray:
        return self.grid

    @property
    def size(self) -> int:
        return len(self.grid)

    def scale(self) -> float:
        return float(np.max(np.abs(self.grid)))


@dataclass(frozen=True)
class ContourSpec:
    delta: float = 1e-6
    nodes_per_segment: int = 32
    epsilon_schedule: tuple = (1e-6, 1e-9)
    delta_schedule: tuple = (1e-6, 1e-9)
    stability_tol: float = 1e-7

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if self.nodes_per_segment < 16:
            raise ValueError("need at least 16 nodes per segment")
        for sched in (self.epsilon_schedule, self.delta_schedule):
            if not all(b < a for a, b in zip(sched, sched[1:])):
                raise ValueError("schedules must be strictly decreasing")


def build_discretized_model(alpha: float, weight: ModelWeight,
                            grid: Sequence[float],
                            masses: Optional[Sequence[float]] = None
                            ) -> DiscretizedModel:
    """Model on the given grid; panel widths default to the mass vector.

    The positive Gram is the alpha form evaluated on panel indicators
    around each grid point: with P_i = [x_i - w_i/2, x_i + w_i/2],

        t(chi_i, chi_j) = Int_{P_i ^ P_j} (eta + omega)
                          - Int_{P_i ^ (-P_j)} omega.
    """
    x = np.asarray(sorted(grid), dtype=float)
    if len(x) == 0:
        raise GapViolation("empty grid")
    if np.any(np.abs(x) <= weight.epsilon):
        raise GapViolation("grid touches the gap [-eps, eps]")
    if np.any(np.diff(x) <= 0):
        raise GapViolation("grid points must be distinct")
    if masses is None:
        gaps = np.diff(x)
        w = np.empty_like(x)
        w[1:-1] = 0.5 * (gaps[:-1] + gaps[1:])
        w[0] = gaps[0] if len(gaps) else 1.0
        w[-1] = gaps[-1] if len(gaps) else 1.0
        # clip panels so they stay outside the gap and do not overlap
        w = np.minimum(w, 2.0 * (np.abs(x) - weight.epsilon))
        w = np.minimum(w, np.concatenate([[np.inf], gaps]))
        w = np.minimum(w, np.concatenate([gaps, [np.inf]]))
    else:
        w = np.asarray(masses, dtype=float)
    if np.any(w <= 0):
        raise GapViolation("quadrature masses must be positive")
    r_vals = weight(x)
    gram_pos = _panel_gram(x, w, alpha, weight)
    try:
        np.linalg.cholesky(gram_pos)
    except np.linalg.LinAlgError as exc:
        raise SingularGram("positive Gram failed factorization") from exc
    gram_ind = r_vals * w
    if not np.all(np.sign(gram_ind) == np.sign(x)):
        raise GapViolation("indefinite Gram signs inconsistent with grid")
    return DiscretizedModel(x, w, r_vals, gram_pos, gram_ind, alpha,
                            weight.epsilon)


def _overlap(a1, b1, a2, b2):
    lo, hi = max(a1, a2), min(b1, b2)
    return (lo, hi) if hi > lo else None


def _moment(fn, a, b, nodes=_DEF_NODES):
    x, wq = np.polynomial.legendre.leggauss(nodes)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return half * float(np.sum(wq * fn(mid + half * x)))


def _panel_gram(x, w, alpha, weight):
    et, om = eta(weight, alpha), omega(weight, alpha)
    n = len(x)
    lo, hi = x - 0.5 * w, x + 0.5 * w
    A = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            val = 0.0
            direct = _overlap(lo[i], hi[i], lo[j], hi[j])
            if direct is not None:
                val += _moment(lambda t: et(t) + om(t), *direct)
            mirror = _overlap(lo[i], hi[i], -hi[j], -lo[j])
            if mirror is not None:
                val -= _moment(om, *mirror)
            A[i, j] = val
            A[j, i] = val
    return A


def resolvent_apply(model: DiscretizedModel, lam: complex,
                    v: np.ndarray) -> np.ndarray:
    """(A - lambda)^(-1) v, componentwise on the diagonal model."""
    dist = np.min(np.abs(model.grid - lam))
    if dist < 1e-12 * model.scale():
        raise PoleHit(f"lambda={lam} within 1e-12*scale of the spectrum")
    return np.asarray(v) / (model.grid - lam)


# ---------------------------------------------------------------------------
# Contour integration
# ---------------------------------------------------------------------------

def _segment_nodes(z0: complex, z1: complex, n: int):
    """GL nodes/weights along [z0, z1], subdivided toward the real axis."""
    x, wq = np.polynomial.legendre.leggauss(n)
    length = abs(z1 - z0)
    pieces = []
    if abs(z0.real - z1.real) < 1e-300:  # vertical: grade toward Im -> 0
        a, b = z0.imag, z1.imag
        lo, hi = min(abs(a), abs(b)), max(abs(a), abs(b))
        if lo <= 0 or hi / lo < 4.0:
            bounds = [a, b]
        else:
            levels = int(math.ceil(math.log(hi / lo) / math.log(4.0)))
            mags = [lo * 4.0**j for j in range(levels)] + [hi]
            mags = sorted(set(min(m, hi) for m in mags))
            sgn = math.copysign(1.0, a + b)
            pts = [sgn * m for m in mags]
            bounds = pts if abs(pts[0] - a) < abs(pts[-1] - a) else pts[::-1]
            bounds[0], bounds[-1] = a, b
        for u0, u1 in zip(bounds[:-1], bounds[1:]):
            za, zb = complex(z0.real, u0), complex(z0.real, u1)
            mid, half = 0.5 * (za + zb), 0.5 * (zb - za)
            pieces.append((mid + half * x, wq * half))
    else:
        m = max(1, int(math.ceil(length / 1.0)))
        cuts = np.linspace(0.0, 1.0, m + 1)
        for c0, c1 in zip(cuts[:-1], cuts[1:]):
            za, zb = z0 + (z1 - z0) * c0, z0 + (z1 - z0) * c1
            mid, half = 0.5 * (za + zb), 0.5 * (zb - za)
            pieces.append((mid + half * x, wq * half))
    nodes = np.concatenate([p[0] for p in pieces])
    wts = np.concatenate([p[1] for p in pieces])
    return nodes, wts


def _contour_nodes(a: float, b: float, delta: float, n: int):
    """Positively oriented rectangle b+i -> a+i -> a-i -> b-i -> b+i with
    the (a-i delta, a+i delta) and (b-i delta, b+i delta) pieces removed."""
    segments = [
        (complex(b, 1.0), complex(a, 1.0)),
        (complex(a, 1.0), complex(a, delta)),
        (complex(a, -delta), complex(a, -1.0)),
        (complex(a, -1.0), complex(b, -1.0)),
        (complex(b, -1.0), complex(b, -delta)),
        (complex(b, delta), complex(b, 1.0)),
    ]
    nodes, wts = [], []
    for z0, z1 in segments:
        nd, wt = _segment_nodes(z0, z1, n)
        nodes.append(nd)
        wts.append(wt)
    return np.concatenate(nodes), np.concatenate(wts)


def _eps_adjusted(delta_iv: SpectralInterval, eps: float):
    a = delta_iv.lo - eps if delta_iv.lo_closed else delta_iv.lo + eps
    b = delta_iv.hi + eps if delta_iv.hi_closed else delta_iv.hi - eps
    return a, b


def _diagonal_contour(model: DiscretizedModel, a: float, b: float,
                      delta: float, n: int) -> np.ndarray:
    nodes, wts = _contour_nodes(a, b, delta, n)
    # p_i = -(1/2 pi i) sum_q wts_q / (x_i - nodes_q)
    vals = wts[None, :] / (model.grid[:, None] - nodes[None, :])
    return (-1.0 / (2.0j * math.pi)) * vals.sum(axis=1)


def contour_spectral_projection(model: DiscretizedModel,
                                delta_iv: SpectralInterval,
                                spec: ContourSpec = ContourSpec()) -> np.ndarray:
    """N x N projection matrix from the indented-rectangle contour."""
    if delta_iv.empty:
        return np.zeros((model.size, model.size))
    if delta_iv.is_real_line:
        return np.eye(model.size)
    if delta_iv.complement:
        inner = SpectralInterval(delta_iv.lo, delta_iv.hi,
                                 delta_iv.lo_closed, delta_iv.hi_closed)
        return np.eye(model.size) - contour_spectral_projection(model, inner,
                                                                spec)
    if not delta_iv.is_bounded_interval():
        # half line: complement of the complementary half line is not in
        # the semiring as a bounded set; reduce via a bounding interval
        lo, hi = delta_iv.lo, delta_iv.hi
        bound = 4.0 * model.scale()
        lo = max(lo, -bound)
        hi = min(hi, bound)
        delta_iv = SpectralInterval(lo, hi, delta_iv.lo_closed,
                                    delta_iv.hi_closed)
    sep = np.min(np.abs(np.subtract.outer(
        model.grid, [delta_iv.lo, delta_iv.hi])))
    if sep <= spec.epsilon_schedule[-1]:
        raise EndpointOnSpectrum(
            f"endpoint within {sep:.3e} of a grid point; the dilation "
            "schedule cannot separate them")
    results = []
    for eps_step in spec.epsilon_schedule:
        a, b = _eps_adjusted(delta_iv, eps_step)
        if a >= b:
            results.append(np.zeros(model.size, dtype=complex))
            continue
        per_delta = [_diagonal_contour(model, a, b, d, spec.nodes_per_segment)
                     for d in spec.delta_schedule]
        if np.max(np.abs(per_delta[-1] - per_delta[0])) > spec.stability_tol:
            # refine nodes once if the delta steps disagree
            per_delta = [_diagonal_contour(model, a, b, d,
                                           2 * spec.nodes_per_segment)
                         for d in spec.delta_schedule]
        results.append(per_delta[-1])
    final = results[-1]
    if np.max(np.abs(final - results[0])) > 10.0 * spec.stability_tol:
        raise EndpointOnSpectrum("endpoint dilation steps disagree; an "
                                 "endpoint sits on the discrete spectrum")
    diag = final
    return np.diag(diag.real) + 1j * np.diag(diag.imag) \
        if np.max(np.abs(diag.imag)) > 1e-13 else np.diag(diag.real)


# ---------------------------------------------------------------------------
# Property verification reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    name: str
    measured: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.measured <= self.tolerance


@dataclass(frozen=True)
class Report:
    checks: tuple

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]


def verify_spectral_calculus(model: DiscretizedModel,
                             d1: SpectralInterval, d2: SpectralInterval,
                             spec: ContourSpec = ContourSpec()) -> Report:
    """All eigenspectral-calculus properties on the discretized model."""
    p1 = contour_spectral_projection(model, d1, spec)
    p2 = contour_spectral_projection(model, d2, spec)
    p12 = contour_spectral_projection(model, d1.intersect(d2), spec)
    checks = []
    tol = 1e-6

    checks.append(CheckResult(
        "projection_matches_indicator",
        float(np.max(np.abs(p1 - np.diag(d1.indicator(model.grid))))),
        tol))
    checks.append(CheckResult(
        "composition",
        float(np.max(np.abs(p1 @ p2 - p12))), 2.0 * tol))
    g = model.gram_ind
    checks.append(CheckResult(
        "gram_ind_symmetry",
        float(np.max(np.abs(np.diag(g) @ p1 - p1.T @ np.diag(g)))),
        tol * max(1.0, float(np.max(np.abs(g))))))
    a_mat = np.diag(model.grid)
    checks.append(CheckResult(
        "commutation",
        float(np.max(np.abs(a_mat @ p1 - p1 @ a_mat))),
        1e-8 * model.scale()))
    # sign property where applicable
    if d1.closure_subset_of(0.0, math.inf):
        m = np.diag(g) @ p1
        sym = 0.5 * (m + m.T)
        checks.append(CheckResult(
            "sign_nonnegative",
            float(max(0.0, -np.min(np.linalg.eigvalsh(sym)))),
            tol * max(1.0, float(np.max(np.abs(g))))))
    if d1.closure_subset_of(-math.inf, 0.0):
        m = np.diag(g) @ p1
        sym = 0.5 * (m + m.T)
        checks.append(CheckResult(
            "sign_nonpositive",
            float(max(0.0, np.max(np.linalg.eigvalsh(sym)))),
            tol * max(1.0, float(np.max(np.abs(g))))))
    # spectral inclusion: eigenvalues of A on range(P) lie in closure(d1)
    sel = np.abs(np.diag(p1)) > 0.5
    if np.any(sel):
        xs = model.grid[sel]
        if d1.complement:
            ok = ~((d1.lo + 1e-9 < xs) & (xs < d1.hi - 1e-9))
        else:
            ok = (xs >= d1.lo - 1e-9) & (xs <= d1.hi + 1e-9)
        checks.append(CheckResult("spectral_inclusion",
                                  0.0 if bool(np.all(ok)) else 1.0, 0.5))
    return Report(tuple(checks))


def check_parseval_plus(model: DiscretizedModel, v: np.ndarray,
                        spec: ContourSpec = ContourSpec(),
                        use_contour: bool = True) -> Report:
    """{v,v}_+ equals the spectral first moment of the indefinite measure.

    Checked twice: as the entrywise algebraic identity, and through
    contour-built projections on a partition whose cells are centered at
    the grid points.
    """
    v = np.asarray(v, dtype=complex)
    g = model.gram_ind
    x = model.grid
    lhs = float(np.real(np.sum(x * np.abs(v) ** 2 * g)))
    rm = g / x  # r_i w_i / x_i, the minus-space masses
    rhs_alg = float(np.real(np.sum(x**2 * np.abs(v) ** 2 * rm)))
    checks = [CheckResult("first_moment_algebraic", abs(lhs - rhs_alg),
                          1e-13 * max(1.0, abs(lhs)))]
    if use_contour:
        sep = np.min(np.diff(x)) if len(x) > 1 else 1.0
        h = 0.25 * sep
        total = 0.0
        for xi in x:
            cell = interval(xi - h, xi + h)
            p = contour_spectral_projection(model, cell, spec)
            mass = float(np.real(np.conj(v) @ (np.diag(g) @ (p @ v))))
            total += xi * mass
        checks.append(CheckResult("first_moment_contour_partition",
                                  abs(total - lhs),
                                  1e-6 * max(1.0, abs(lhs))))
    return Report(tuple(checks))


def check_representation(model: DiscretizedModel, u: np.ndarray,
                         v: np.ndarray) -> Report:
    """[u, v] = {A u, v}_- on the diagonal realization, machine precision."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    g = model.gram_ind
    x = model.grid
    lhs = complex(np.sum(u * np.conj(v) * g))
    rhs = complex(np.sum((x * u) * np.conj(v) * (g / x)))
    scale = max(1.0, abs(lhs))
    return Report((CheckResult("representation_identity", abs(lhs - rhs),
                               1e-13 * scale),))
