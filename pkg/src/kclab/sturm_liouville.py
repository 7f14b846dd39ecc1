"""Indefinite-weight Sturm-Liouville model problem on [-1, 1].

The operator is T u = -(p u')' with Dirichlet conditions and the sign
changing coefficient

    p(x) = -(2/e)(1 - log 2)^3        on [-1, -2/e]
           x |log|x||^3               on (-2/e, 1/e) minus the origin
           0                          at x = 0
           1/e                        on [1/e, 1].

The comparison function

    u0(x) = 0                          on [-1, 0]
            (8/9) |log x|^(-9/8)       on (0, 1/e)
            8/9 - 8(e x - 1)/(9(e-1))  on [1/e, 1]

has a finite form integral but its expansion coefficients are not square
summable; the study below only ever reports trajectories of the partial
sums, never a convergence verdict.

Discretization: conservative finite differences on a mesh graded like
|xi|^gamma toward the degeneracy at 0, i.e. the P1 stiffness matrix with
midpoint coefficient values and a lumped mass.  Eigenpairs come from
shift-invert Lanczos around 0 and are normalized to |lambda| (u, u) = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .errors import (
    ConvergenceFailure,
    DomainViolation,
    MeshTooCoarse,
    ScheduleExceedsSpectrum,
)
from .quadrature import (
    DEFAULT_CONFIG,
    IntegrationResult,
    Panel,
    QuadratureConfig,
    integrate_panel_groups,
)

_E = math.e
_P_LEFT = -(2.0 / _E) * (1.0 - math.log(2.0)) ** 3


def eval_p(x):
    """Sign-changing coefficient; DomainViolation outside [-1, 1]."""
    scalar = np.isscalar(x) or np.ndim(x) == 0
    xa = np.asarray(x, dtype=float)
    if np.any((xa < -1.0) | (xa > 1.0)):
        raise DomainViolation("p is defined on [-1, 1]")
    out = np.empty_like(xa)
    left = xa <= -2.0 / _E
    right = xa >= 1.0 / _E
    mid = ~(left | right)
    out[left] = _P_LEFT
    out[right] = 1.0 / _E
    xm = xa[mid]
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = xm * np.abs(np.log(np.abs(xm))) ** 3
    vals[xm == 0.0] = 0.0
    out[mid] = vals
    return float(out.reshape(())[()]) if scalar else out


def eval_u0(x):
    """Comparison function with the logarithmic plateau near 0."""
    scalar = np.isscalar(x) or np.ndim(x) == 0
    xa = np.asarray(x, dtype=float)
    if np.any((xa < -1.0) | (xa > 1.0)):
        raise DomainViolation("u0 is defined on [-1, 1]")
    out = np.zeros_like(xa)
    core = (xa > 0.0) & (xa < 1.0 / _E)
    ramp = xa >= 1.0 / _E
    with np.errstate(divide="ignore"):
        out[core] = (8.0 / 9.0) * np.abs(np.log(xa[core])) ** (-9.0 / 8.0)
    out[ramp] = 8.0 / 9.0 - 8.0 * (_E * xa[ramp] - 1.0) / (9.0 * (_E - 1.0))
    return float(out.reshape(())[()]) if scalar else out


def eval_u0_prime(x):
    """Analytic derivative of u0, branchwise; 0 on [-1, 0]."""
    scalar = np.isscalar(x) or np.ndim(x) == 0
    xa = np.asarray(x, dtype=float)
    out = np.zeros_like(xa)
    core = (xa > 0.0) & (xa < 1.0 / _E)
    ramp = (xa >= 1.0 / _E) & (xa <= 1.0)
    xc = xa[core]
    out[core] = (1.0 / xc) * (-np.log(xc)) ** (-17.0 / 8.0)
    out[ramp] = -8.0 * _E / (9.0 * (_E - 1.0))
    return float(out.reshape(())[()]) if scalar else out


def u0_form_integral(cfg: QuadratureConfig = DEFAULT_CONFIG,
                     levels: int = 8) -> IntegrationResult:
    """Int |p| |u0'|^2 over [-1, 1], the form-domain membership integral.

    Near 0 the integrand behaves like 1/(x |log x|^(5/4)); in t = -log x
    this is a clean algebraic tail, so the panels are supplied on
    doubling t-shells (the quadrature module itself stays oblivious).
    """
    def integrand(x):
        return np.abs(eval_p(np.clip(x, -1.0, 1.0))) * eval_u0_prime(x) ** 2

    groups = [[Panel(1.0 / _E, 1.0)]]
    radii = [1.0]
    t0 = 1.0
    for j in range(levels + 1):
        t1 = t0 * 2.0
        groups.append([Panel(t0, t1, transform=lambda s: np.exp(-s),
                             jacobian=lambda s: np.exp(-s))])
        radii.append(t1)
        t0 = t1
    return integrate_panel_groups(integrand, groups, cfg, radii=radii)


# ---------------------------------------------------------------------------
# Mesh and operator
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SLProblem:
    mesh: np.ndarray
    p_mid: np.ndarray
    grading: float

    def __post_init__(self):
        y = self.mesh
        if len(y) < 5 or np.any(np.diff(y) <= 0):
            raise MeshTooCoarse("need a strictly increasing mesh with >= 5 nodes")
        if y[0] != -1.0 or y[-1] != 1.0:
            raise MeshTooCoarse("mesh must span [-1, 1]")
        signs = np.sign(self.p_mid)
        if np.any(signs == 0.0):
            raise MeshTooCoarse("a cell midpoint hits the coefficient zero")
        flips = np.nonzero(np.diff(signs) != 0)[0]
        if len(flips) > 1:
            raise MeshTooCoarse("coefficient changes sign more than once")
        if len(flips) == 1 and y[flips[0] + 1] != 0.0:
            raise MeshTooCoarse("a cell spans a coefficient sign change "
                                "away from the origin")
        if len(flips) == 1 and not np.any(y == 0.0):
            raise MeshTooCoarse("0 must be a mesh node for sign-changing "
                                "coefficients")

    @property
    def n_cells(self) -> int:
        return len(self.mesh) - 1

    def cell_widths(self) -> np.ndarray:
        return np.diff(self.mesh)

    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.mesh[:-1] + self.mesh[1:])


def make_problem(n_cells: int = 2048, grading: float = 3.0) -> SLProblem:
    """Graded mesh y = sgn(xi) |xi|^gamma on a uniform xi grid."""
    if n_cells % 2 != 0:
        raise MeshTooCoarse("need an even cell count so 0 is a node")
    xi = np.linspace(-1.0, 1.0, n_cells + 1)
    y = np.sign(xi) * np.abs(xi) ** grading
    y[0], y[-1] = -1.0, 1.0
    mid = 0.5 * (y[:-1] + y[1:])
    return SLProblem(mesh=y, p_mid=eval_p(mid), grading=grading)


@dataclass(frozen=True)
class SLOperator:
    """Stiffness/mass pair; symmetric in the mesh-weighted inner product."""

    problem: SLProblem
    stiffness: scipy.sparse.csc_matrix  # interior nodes only
    mass: np.ndarray                    # lumped masses, interior nodes

    @property
    def size(self) -> int:
        return len(self.mass)

    def symmetric_matrix(self) -> np.ndarray:
        """Dense M^(-1/2) S M^(-1/2); classical second differences for p=1.

        Scaled by the outer product so the result is bitwise symmetric.
        """
        d = 1.0 / np.sqrt(self.mass)
        return self.stiffness.toarray() * np.outer(d, d)

    def form(self, u: np.ndarray, v: np.ndarray) -> float:
        """t[u, v] for full nodal vectors (Dirichlet ends included)."""
        h = self.problem.cell_widths()
        return float(np.sum(self.problem.p_mid * np.diff(u) * np.diff(v) / h))

    def l2_norm_sq(self, u: np.ndarray) -> float:
        return float(np.sum(self.mass * u[1:-1] ** 2))


def assemble_operator(problem: SLProblem) -> SLOperator:
    """Conservative finite differences; Dirichlet rows eliminated."""
    h = problem.cell_widths()
    pm = problem.p_mid
    n = problem.n_cells - 1  # interior nodes
    cond = pm / h
    diag = cond[:-1] + cond[1:]
    off = -cond[1:-1]
    stiff = scipy.sparse.diags([off, diag, off], offsets=(-1, 0, 1),
                               format="csc")
    mass = 0.5 * (h[:-1] + h[1:])
    return SLOperator(problem, stiff, mass)


# ---------------------------------------------------------------------------
# Eigenpairs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EigenPair:
    index: int            # signed: ..., -2, -1, 1, 2, ...
    lam: float
    u: np.ndarray         # full nodal vector, boundary zeros included
    residual: float


def compute_eigenpairs(op: SLOperator, count_per_sign: int = 20
                       ) -> list[EigenPair]:
    """Eigenpairs nearest 0 on both sides, normalized to |lam| (u, u) = 1."""
    n = op.size
    mass_mat = scipy.sparse.diags(op.mass, format="csc")
    k = min(2 * count_per_sign + 10, n - 2)
    while True:
        try:
            vals, vecs = scipy.sparse.linalg.eigsh(
                op.stiffness, k=k, M=mass_mat, sigma=0.0, which="LM",
                v0=np.ones(n))
        except scipy.sparse.linalg.ArpackError as exc:
            raise ConvergenceFailure(str(exc)) from exc
        pos = np.sum(vals > 0)
        neg = np.sum(vals < 0)
        if (pos >= count_per_sign and neg >= count_per_sign) or k >= n - 2:
            break
        k = min(2 * k, n - 2)
    if pos < count_per_sign or neg < count_per_sign:
        raise ConvergenceFailure(
            f"found only {pos}+/{neg}- eigenvalues of {count_per_sign} requested")
    pairs = []
    order = np.argsort(vals)
    neg_idx = [i for i in order[::-1] if vals[i] < 0]  # closest to 0 first
    pos_idx = [i for i in order if vals[i] > 0]
    for rank, i in enumerate(neg_idx[:count_per_sign], start=1):
        pairs.append(_normalized(op, -rank, vals[i], vecs[:, i]))
    for rank, i in enumerate(pos_idx[:count_per_sign], start=1):
        pairs.append(_normalized(op, rank, vals[i], vecs[:, i]))
    pairs.sort(key=lambda p: p.index)
    return pairs


def _normalized(op: SLOperator, index: int, lam: float, v: np.ndarray
                ) -> EigenPair:
    norm_sq = float(np.sum(op.mass * v**2))
    scale = 1.0 / math.sqrt(abs(lam) * norm_sq)
    u_int = v * scale
    residual = abs(1.0 - abs(lam) * float(np.sum(op.mass * u_int**2)))
    u_full = np.zeros(op.size + 2)
    u_full[1:-1] = u_int
    return EigenPair(index, float(lam), u_full, residual)


def spectral_gap(pairs: Sequence[EigenPair]) -> float:
    return min(abs(p.lam) for p in pairs)


# ---------------------------------------------------------------------------
# Expansion study
# ---------------------------------------------------------------------------

U0Like = Union[np.ndarray, tuple]


def expansion_coefficients(u0: U0Like, pairs: Sequence[EigenPair],
                           op: SLOperator) -> np.ndarray:
    """c_n = t[u0, u_n] by the midpoint rule on the mesh.

    ``u0`` is either a full nodal vector (difference quotients are used)
    or a pair (value_fn, derivative_fn); the analytic derivative avoids
    the large differencing error near the degeneracy.
    """
    problem = op.problem
    h = problem.cell_widths()
    pm = problem.p_mid
    if isinstance(u0, np.ndarray):
        slope = np.diff(u0) / h
    else:
        _, deriv = u0
        slope = np.asarray(deriv(problem.midpoints()), dtype=float)
    return np.array([float(np.sum(pm * slope * np.diff(p.u)))
                     for p in pairs])


@dataclass(frozen=True)
class ExpansionReport:
    schedule: np.ndarray
    coefficients: np.ndarray           # aligned with pairs
    pair_indices: np.ndarray
    pair_lambdas: np.ndarray
    norm_S: np.ndarray                 # positive-form norm of S_m
    norm_S_plus: np.ndarray
    norm_S_minus: np.ndarray
    l2_norm_S: np.ndarray
    t_norm_S: np.ndarray               # signed t[S_m, S_m]
    coeff_square_proxy: np.ndarray     # sum |c_n|^2 over |lam| <= m
    final_sum: np.ndarray
    growth_rate_plus: float
    growth_rate_minus: float
    monotone_plus: bool
    monotone_minus: bool


def partial_sum_study(u0: U0Like, pairs: Sequence[EigenPair],
                      m_schedule: Sequence[float], op: SLOperator
                      ) -> ExpansionReport:
    """Trajectories of E([-m, m]) u0 = sum sgn(lam_n) t[u0, u_n] u_n.

    Emits norms only; no convergence verdict is encoded.
    """
    schedule = np.asarray(sorted(m_schedule), dtype=float)
    lams = np.array([p.lam for p in pairs])
    max_pos = np.max(lams[lams > 0]) if np.any(lams > 0) else 0.0
    max_neg = np.max(-lams[lams < 0]) if np.any(lams < 0) else 0.0
    if schedule[-1] > min(max_pos, max_neg):
        raise ScheduleExceedsSpectrum(
            f"schedule reaches {schedule[-1]:g} but the computed spectrum "
            f"covers only [{-max_neg:g}, {max_pos:g}]")
    coeffs = expansion_coefficients(u0, pairs, op)
    n_nodes = len(pairs[0].u)
    norm_s, norm_p, norm_m, l2s, tns, proxy = [], [], [], [], [], []
    s_m = np.zeros(n_nodes)
    for m in schedule:
        s_plus = np.zeros(n_nodes)
        s_minus = np.zeros(n_nodes)
        proxy_val = 0.0
        for pair, c in zip(pairs, coeffs):
            if abs(pair.lam) <= m:
                proxy_val += c * c
                if pair.lam > 0:
                    s_plus += c * pair.u
                else:
                    s_minus += c * pair.u
        s_m = s_plus - s_minus
        tp = max(0.0, op.form(s_plus, s_plus))
        tm = max(0.0, -op.form(s_minus, s_minus))
        norm_p.append(math.sqrt(tp))
        norm_m.append(math.sqrt(tm))
        norm_s.append(math.sqrt(tp + tm))
        l2s.append(math.sqrt(op.l2_norm_sq(s_m)))
        tns.append(op.form(s_m, s_m))
        proxy.append(proxy_val)
    norm_p, norm_m = np.array(norm_p), np.array(norm_m)
    return ExpansionReport(
        schedule=schedule,
        coefficients=coeffs,
        pair_indices=np.array([p.index for p in pairs]),
        pair_lambdas=lams,
        norm_S=np.array(norm_s),
        norm_S_plus=norm_p,
        norm_S_minus=norm_m,
        l2_norm_S=np.array(l2s),
        t_norm_S=np.array(tns),
        coeff_square_proxy=np.array(proxy),
        final_sum=s_m,
        growth_rate_plus=_loglog_rate(schedule, norm_p),
        growth_rate_minus=_loglog_rate(schedule, norm_m),
        monotone_plus=bool(np.all(np.diff(norm_p) >= -1e-12)),
        monotone_minus=bool(np.all(np.diff(norm_m) >= -1e-12)),
    )


def _loglog_rate(ms, vals) -> float:
    keep = vals > 0
    if np.count_nonzero(keep) < 2:
        return 0.0
    return float(np.polyfit(np.log(ms[keep]), np.log(vals[keep]), 1)[0])
