"""Contour-built projections against the residue-counting oracle.

On a diagonal model the contour integral of the resolvent has an exact
oracle: the residue of 1/(x_i - lambda) at x_i is -1, so the projection is
diag of the interval indicator.  Every tolerance here is checked against
that exact answer.
"""

import math

import numpy as np
import pytest

from kclab.errors import EndpointOnSpectrum, GapViolation, PoleHit
from kclab.eigenspectral import EMPTY, SpectralInterval, interval
from kclab.langer_contour import (
    ContourSpec,
    build_discretized_model,
    check_parseval_plus,
    check_representation,
    contour_spectral_projection,
    resolvent_apply,
    verify_spectral_calculus,
)
from kclab.model_space import ModelWeight

W = ModelWeight()
GRID8 = [-4.5, -3.5, -2.5, -1.5, 1.5, 2.5, 3.5, 4.5]


def model8(alpha=0.0):
    return build_discretized_model(alpha, W, GRID8)


def random_model(seed: int, n: int, alpha: float = 0.5):
    rng = np.random.default_rng(seed)
    pos = np.sort(1.0 + 0.25 + np.cumsum(rng.uniform(0.2, 1.0, n // 2)))
    grid = np.concatenate([-pos[::-1], pos])
    return build_discretized_model(alpha, W, grid)


def test_gram_ind_sign_pattern():
    m = model8()
    assert np.array_equal(np.sign(m.gram_ind),
                          np.sign(np.asarray(GRID8)))


def test_gram_pos_mirror_block_structure():
    # alpha = 0, unit panels: diagonal sqrt2 * width, mirror coupling -width
    m = model8(0.0)
    n = m.size
    for i in range(n):
        j = n - 1 - i  # mirror index on the symmetric grid
        width = m.weights[i]
        assert m.gram_pos[i, i] == pytest.approx(math.sqrt(2.0) * width, rel=1e-12)
        assert m.gram_pos[i, j] == pytest.approx(-width, rel=1e-12)


def test_empty_grid_rejected():
    with pytest.raises(GapViolation):
        build_discretized_model(0.0, W, [])
    with pytest.raises(GapViolation):
        build_discretized_model(0.0, W, [0.5, 2.0])


def test_resolvent_diagonal_arithmetic():
    m = model8()
    e1 = np.eye(8)[0]
    out = resolvent_apply(m, 1j, e1)
    assert out[0] == pytest.approx(1.0 / (-4.5 - 1j))
    assert np.all(out[1:] == 0.0)


def test_resolvent_inverse_identity():
    m = model8()
    rng = np.random.default_rng(2)
    v = rng.standard_normal(8)
    lam = 0.3 + 0.7j
    w = resolvent_apply(m, lam, v)
    assert np.allclose((m.grid - lam) * w, v, rtol=1e-15)


def test_resolvent_valid_inside_gap():
    m = model8()
    out = resolvent_apply(m, 0.0, np.ones(8))
    assert np.allclose(out, 1.0 / m.grid)


def test_resolvent_pole_hit():
    m = model8()
    with pytest.raises(PoleHit):
        resolvent_apply(m, 2.5, np.ones(8))


def test_projection_selects_interior_points():
    m = model8()
    p = contour_spectral_projection(m, interval(2.0, 4.0))
    oracle = np.diag(interval(2.0, 4.0).indicator(m.grid))
    assert np.max(np.abs(p - oracle)) <= 1e-6


def test_projection_disjoint_from_grid_is_zero():
    m = model8()
    p = contour_spectral_projection(m, interval(4.6, 5.2))
    assert np.max(np.abs(p)) <= 1e-6


def test_projection_additive_on_disjoint_union():
    m = model8()
    pa = contour_spectral_projection(m, interval(1.0, 2.0))
    pb = contour_spectral_projection(m, interval(2.0, 4.0))
    pu = contour_spectral_projection(m, interval(1.0, 4.0))
    assert np.max(np.abs(pa + pb - pu)) <= 2e-6


def test_projection_complement_and_trivials():
    m = model8()
    assert np.array_equal(contour_spectral_projection(m, EMPTY),
                          np.zeros((8, 8)))
    comp = SpectralInterval(2.0, 4.0, complement=True)
    p = contour_spectral_projection(m, comp)
    oracle = np.diag(comp.indicator(m.grid))
    assert np.max(np.abs(p - oracle)) <= 2e-6


def test_endpoint_on_spectrum_detected():
    m = model8()
    with pytest.raises(EndpointOnSpectrum):
        contour_spectral_projection(m, interval(2.5, 4.0))


def test_delta_independence_once_small():
    m = model8()
    spec_a = ContourSpec(delta_schedule=(1e-5, 1e-8))
    spec_b = ContourSpec(delta_schedule=(1e-7, 1e-10))
    pa = contour_spectral_projection(m, interval(2.0, 4.0), spec_a)
    pb = contour_spectral_projection(m, interval(2.0, 4.0), spec_b)
    assert np.max(np.abs(pa - pb)) <= 1e-8


def test_node_doubling_reduces_error():
    # with the indentation pushed to 1e-14 the quadrature error is exposed;
    # Gauss-Legendre converges so fast that the minimum node count already
    # sits at the rounding floor, so doubling must keep it there
    m = model8()
    iv = interval(2.0, 4.0)
    oracle = np.diag(iv.indicator(m.grid))
    errs = []
    for n in (16, 32, 64):
        spec = ContourSpec(nodes_per_segment=n, stability_tol=math.inf,
                           delta_schedule=(1e-12, 1e-14),
                           epsilon_schedule=(1e-7, 1e-10))
        p = contour_spectral_projection(m, iv, spec)
        errs.append(max(np.max(np.abs(p - oracle)), 1e-16))
    floor = 1e-12
    assert errs[1] <= errs[0] / 4.0 or errs[1] < floor
    assert errs[2] <= errs[1] / 4.0 or errs[2] < floor


def test_calculus_properties_on_eight_point_model():
    m = model8()
    report = verify_spectral_calculus(m, interval(2.0, 5.0),
                                      SpectralInterval(-4.0, 3.0, True, True))
    assert report.all_passed, report.failures()


def test_commutation_tolerance():
    m = model8()
    p = contour_spectral_projection(m, interval(2.0, 5.0))
    a = np.diag(m.grid)
    assert np.max(np.abs(a @ p - p @ a)) <= 1e-8


def test_restricted_spectrum_exact():
    m = model8()
    p = contour_spectral_projection(m, interval(2.0, 5.0))
    sel = np.abs(np.diag(p)) > 0.5
    assert set(np.round(m.grid[sel], 6)) == {2.5, 3.5, 4.5}


def test_empty_interval_checks_pass():
    m = model8()
    report = verify_spectral_calculus(m, EMPTY, interval(1.0, 3.0))
    assert report.all_passed


@pytest.mark.parametrize("seed", range(10))
@pytest.mark.parametrize("n", [8, 32, 128])
def test_randomized_grids_calculus(seed, n):
    m = random_model(seed, n)
    rng = np.random.default_rng(seed + 1000)
    lo, hi = np.sort(rng.uniform(1.5, 0.9 * m.scale(), 2))
    d1 = _separated_interval(m, lo, hi)
    d2 = _separated_interval(m, -0.8 * m.scale(), 0.5 * m.scale())
    report = verify_spectral_calculus(m, d1, d2)
    assert report.all_passed, (seed, n, report.failures())


def _separated_interval(m, lo, hi):
    # nudge endpoints to midpoints between grid values so the dilation
    # schedule always separates them
    def nudge(v):
        g = m.grid
        idx = np.searchsorted(g, v)
        if idx == 0:
            return g[0] - 0.5
        if idx >= len(g):
            return g[-1] + 0.5
        return 0.5 * (g[idx - 1] + g[idx])
    a, b = nudge(lo), nudge(hi)
    if a >= b:
        b = a + 1.0
    return interval(a, b)


def test_parseval_plus_reports():
    m = model8()
    for v in (np.eye(8)[0], np.ones(8)):
        report = check_parseval_plus(m, v)
        assert report.all_passed, report.failures()


def test_parseval_single_point_mass():
    m = model8()
    e1 = np.eye(8)[0]
    lhs = m.grid[0] * m.gram_ind[0]
    report = check_parseval_plus(m, e1, use_contour=False)
    assert report.all_passed
    assert lhs == pytest.approx(-4.5 * m.gram_ind[0])


def test_representation_identity_vectors():
    m = model8()
    rng = np.random.default_rng(33)
    pairs = [(np.eye(8)[2], np.eye(8)[5]),
             (rng.standard_normal(8), rng.standard_normal(8)),
             (np.ones(8), np.ones(8))]
    for u, v in pairs:
        assert check_representation(m, u, v).all_passed
