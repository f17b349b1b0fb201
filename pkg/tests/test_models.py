import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import chord_distance, unit_vector
from sphquant import models
from sphquant.engine import BlockLayout, GridSpec, build_layout, layout_midpoints
from sphquant.models import Circle, ModelKind, ModelSpec

PI2 = np.pi ** 2


def _lat(circle, phi0):
    return {Circle.UPPER: phi0, Circle.LOWER: -phi0, Circle.EQUATOR: 0.0}[Circle(circle)]


def nearest_error(point_vecs, report, phi0, point_circles=None):
    """Mean squared distance to the nearest code, from embedded vectors.

    With ``point_circles`` each point may only use codes on its own circle.
    """
    entries = report.codebook.entries()
    codes = np.array([unit_vector(_lat(c, phi0), t) for t, c in entries])
    d = chord_distance(point_vecs[:, None, :], codes[None, :, :])
    if point_circles is not None:
        tags = np.array([c.value for _, c in entries])
        d = np.where(np.asarray(point_circles)[:, None] == tags[None, :], d, np.inf)
    return float(np.mean(d.min(axis=1) ** 2))


def circle_points(N, phi0, base=0.0):
    return unit_vector(phi0, GridSpec(N, base).longitudes())


# ---- Model I -----------------------------------------------------------------

def test_equator_reference_value():
    # exact value; the leading term is pi^2/108
    rep = models.quantize_equator(120, 6)
    assert rep.error == pytest.approx(PI2 / 108 - PI2 / (3 * 120 ** 2), rel=1e-14)
    assert rep.error == pytest.approx(0.09115676287117257, rel=1e-14)
    assert PI2 / 108 - rep.error == pytest.approx(PI2 / 43200, rel=1e-9)


def test_twelve_points_five_codes_frozen():
    # (1/12)[3 T(2) + 2 T(3)] with block totals T(s) = (pi/6)^2 s (s^2 - 1) / 12 = 11 pi^2 / 864
    rep = models.quantize_equator(12, 5)
    assert rep.error == pytest.approx(11 * PI2 / 864, rel=1e-15)
    assert rep.error == pytest.approx(0.12565468566201726, rel=1e-15)
    assert rep.layout.size_multiset() == (2, 2, 2, 3, 3)


@pytest.mark.parametrize("N", [2, 3, 10, 64])
def test_equator_single_code(N):
    assert models.quantize_equator(N, 1).error == pytest.approx(PI2 / 3 * (1 - N ** -2.0), abs=1e-12)


@pytest.mark.parametrize("N", [1, 5, 17])
def test_every_point_its_own_code(N):
    rep = models.quantize_equator(N, N)
    assert rep.error == 0.0
    assert len(rep.codebook) == N


def test_more_codes_than_points_truncates():
    rep = models.quantize_one_circle(5, 9, 0.4)
    assert rep.error == 0.0
    assert len(rep.codebook) == 5
    assert rep.metadata["truncated_codebook"]
    assert np.allclose(rep.codebook.longitudes, GridSpec(5).longitudes())


@pytest.mark.parametrize("N,n", [(12, 4), (120, 6), (48, 8), (60, 60)])
def test_divisible_closed_form_consistency(N, n):
    a = models.equator_error(N, n)
    b = models.equator_error_divisible(N, n)
    assert a == pytest.approx(b, rel=1e-14, abs=1e-300)
    assert a == pytest.approx(PI2 / (3 * n * n) - PI2 / (3 * N * N), rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("N,n", [(0, 1), (3, 0), (2.5, 1)])
def test_invalid_counts(N, n):
    with pytest.raises(ValueError):
        models.quantize_equator(N, n)


# ---- Model III ---------------------------------------------------------------

@pytest.mark.parametrize("N,n", [(1, 1), (12, 5), (120, 6), (23, 7), (40, 3)])
def test_one_circle_zero_latitude_equals_equator(N, n):
    assert models.quantize_one_circle(N, n, 0.0).error == models.quantize_equator(N, n).error


@pytest.mark.parametrize("phi", [0.0, 0.3, 0.6, 1.0, 1.4])
@pytest.mark.parametrize("N,n", [(12, 5), (24, 3), (30, 7), (9, 2), (120, 6)])
def test_one_circle_against_vector_oracle(phi, N, n):
    rep = models.quantize_one_circle(N, n, phi)
    ref = nearest_error(circle_points(N, phi), rep, phi)
    assert rep.error == pytest.approx(ref, rel=1e-12)
    totals = sum(b.total for b in rep.per_block) / N
    assert rep.error == pytest.approx(totals, rel=1e-13)


@pytest.mark.parametrize("phi,reference", [(0.6, 0.0621), (1.0, 0.0267)])
def test_table_regime(phi, reference):
    exact = models.quantize_one_circle(120, 6, phi).error
    assert exact == pytest.approx(reference, rel=0.02)
    ratio = exact / models.quantize_equator(120, 6).error
    assert ratio == pytest.approx(np.cos(phi) ** 2, rel=0.02)


@pytest.mark.parametrize("phi", [0.0, 0.3, 0.6, 1.0])
def test_monotone_in_codes(phi):
    errs = [models.quantize_one_circle(37, n, phi).error for n in range(1, 40)]
    assert all(b <= a for a, b in zip(errs, errs[1:]))


@given(st.integers(2, 60), st.integers(1, 12), st.floats(0.0, 1.5), st.floats(-10, 10))
def test_rotation_invariance(N, n, phi, base):
    a = models.quantize_one_circle(N, n, phi)
    b = models.quantize_one_circle(N, n, phi, base=base)
    assert b.error == pytest.approx(a.error, rel=1e-13, abs=1e-300)
    shifted = np.mod(np.array(a.codebook.longitudes) + base, 2 * np.pi)
    diff = np.mod(np.array(b.codebook.longitudes) - shifted + np.pi, 2 * np.pi) - np.pi
    assert np.max(np.abs(diff)) < 1e-9


@pytest.mark.parametrize("phi", [0.0, 0.8])
@pytest.mark.parametrize("N,n", [(12, 5), (17, 4), (23, 6)])
def test_large_block_placement_invariance(phi, N, n):
    m, r = divmod(N, n)
    grid = GridSpec(N)
    pts = circle_points(N, phi)
    values = set()
    for big in itertools.combinations(range(n), r):
        sizes = [m + 1 if b in big else m for b in range(n)]
        mids = layout_midpoints(grid, BlockLayout(sizes))
        codes = unit_vector(phi, np.array(mids))
        d = chord_distance(pts[:, None, :], codes[None, :, :])
        values.add(round(float(np.mean(d.min(axis=1) ** 2)), 13))
    ref = models.quantize_one_circle(N, n, phi).error
    assert all(v == pytest.approx(ref, rel=1e-12) for v in values)


def test_half_way_ties_do_not_change_error():
    # a point exactly between two codes may go to either
    kernel_phi = 0.5
    pts = np.array([0.0, 0.5, 1.0])
    codes = [0.25, 0.75]
    e = models.codebook_error(pts, kernel_phi, codes)
    from sphquant.geometry import sigma
    left = (sigma(kernel_phi, 0.25) ** 2 * 2 + sigma(kernel_phi, 0.25) ** 2) / 3
    assert e == pytest.approx(left, rel=1e-14)


# ---- Model II ----------------------------------------------------------------

def two_circle_points(M, phi):
    lon = GridSpec(M).longitudes()
    return np.concatenate([unit_vector(phi, lon), unit_vector(-phi, lon + np.pi)])


def s_sum(s, phi, M):
    t = (np.arange(s) - (s - 1) / 2) * 2 * np.pi / M
    return float(np.sum(chord_distance(unit_vector(phi, t), unit_vector(phi, 0.0)) ** 2))


def test_two_circle_illustration_exact_value():
    rep = models.quantize_two_circles(120, 8, 0.6)
    assert rep.error == pytest.approx((4 / 120) * s_sum(30, 0.6, 120), rel=1e-13)
    assert rep.error == pytest.approx(0.13849868561149536, rel=1e-12)


def test_two_circle_asymptotics():
    assert models.asymptotic_two_circles(8, 120, 0.6) == pytest.approx(0.13990, abs=5e-5)
    lead = np.cos(0.6) ** 2 * PI2 / 48
    assert lead == pytest.approx(0.14006, abs=5e-5)
    assert models.asymptotic_two_circles(8, 10 ** 9, 0.0) == pytest.approx(4 * PI2 / (3 * 64), rel=1e-12)
    with pytest.raises(ValueError):
        models.asymptotic_two_circles(7, 120, 0.6)


@pytest.mark.parametrize("phi", [0.1, 0.6, 1.2])
def test_two_circle_m24_n6_example(phi):
    rep = models.quantize_two_circles(24, 6, phi)
    assert rep.error == pytest.approx(3 / 24 * s_sum(8, phi, 24), rel=1e-13)


@pytest.mark.parametrize("phi", [0.2, 0.6, 1.1])
@pytest.mark.parametrize("M,n", [(24, 6), (7, 6), (10, 4), (13, 2), (3, 8)])
def test_two_circles_against_vector_oracle(phi, M, n):
    rep = models.quantize_two_circles(M, n, phi)
    pts = two_circle_points(M, phi)
    own = nearest_error(pts, rep, phi, ["upper"] * M + ["lower"] * M)
    free = nearest_error(pts, rep, phi)
    assert rep.error == pytest.approx(own, rel=1e-12, abs=1e-15)
    assert rep.metadata["nearest_code_error"] == pytest.approx(free, rel=1e-12, abs=1e-15)
    assert rep.metadata["nearest_code_error"] <= rep.error * (1 + 1e-12)
    assert rep.codebook.is_antipodally_paired()
    assert rep.metadata["extended"] == (n // 2 < M and M % (n // 2) != 0)


@pytest.mark.parametrize("M,n,phi", [(24, 6, 0.2), (13, 2, 0.6)])
def test_odd_codes_per_circle_can_cross(M, n, phi):
    # the antipodal mates interleave with the northern codes in longitude
    rep = models.quantize_two_circles(M, n, phi)
    assert rep.metadata["cross_circle_reassignment"]
    assert rep.metadata["nearest_code_error"] < rep.error


@pytest.mark.parametrize("phi", np.linspace(0.05, 1.5, 12))
def test_even_codes_per_circle_never_cross(phi):
    # codes and their mates share longitudes, so own-circle codes always win
    rep = models.quantize_two_circles(120, 8, phi)
    assert not rep.metadata["cross_circle_reassignment"]


def test_two_circle_flat_limit():
    rep = models.quantize_two_circles(30, 6, 1e-6)
    assert rep.error == pytest.approx(models.quantize_equator(30, 3).error, rel=1e-10)


def test_two_circles_no_mixed_blocks():
    rep = models.quantize_two_circles(12, 6, 0.4)
    upper = [b for b in rep.per_block if b.circle == "upper"]
    lower = [b for b in rep.per_block if b.circle == "lower"]
    assert sum(b.size for b in upper) == 12 and sum(b.size for b in lower) == 12
    assert rep.error == pytest.approx(sum(b.total for b in rep.per_block) / 24, rel=1e-13)


@pytest.mark.parametrize("n", [1, 3, 9])
def test_two_circles_reject_odd_codes(n):
    with pytest.raises(ValueError, match="even"):
        models.quantize_two_circles(24, n, 0.5)


def test_two_circles_reject_equator():
    with pytest.raises(ValueError):
        models.quantize_two_circles(24, 4, 0.0)


# ---- cross-circle gap --------------------------------------------------------

def gap_from_vectors(phi, d):
    x = unit_vector(phi, d)
    return chord_distance(x, unit_vector(-phi, 0.0)) - chord_distance(x, unit_vector(phi, 0.0))


@pytest.mark.parametrize("phi", [0.05, 0.4, 0.9, 1.5])
@pytest.mark.parametrize("d", [0.0, 0.3, -1.7, 2.9, np.pi])
def test_cross_gap_against_vectors(phi, d):
    assert models.cross_circle_gap(phi, d) == pytest.approx(gap_from_vectors(phi, d), abs=1e-14)


@pytest.mark.parametrize("phi", [0.1, 0.6, 1.2])
def test_cross_gap_endpoints(phi):
    assert models.cross_circle_gap(phi, 0.0) == pytest.approx(2 * phi, abs=1e-15)
    # the two arccos arguments always differ by 2 sin^2(phi), so the gap stays 2 phi here
    assert models.cross_circle_gap(phi, np.pi) == pytest.approx(2 * phi, abs=1e-15)


@pytest.mark.parametrize("phi", [0.3, 0.7, 1.1])
def test_cross_gap_matches_arccos_expression(phi):
    d = np.linspace(-3.0, 3.0, 41)
    sp2, cp2 = np.sin(phi) ** 2, np.cos(phi) ** 2
    ref = np.arccos(-sp2 + cp2 * np.cos(d)) - np.arccos(sp2 + cp2 * np.cos(d))
    assert np.allclose(models.cross_circle_gap(phi, d), ref, atol=1e-7)


@given(st.floats(1e-3, 1.57), st.floats(-np.pi, np.pi))
def test_cross_gap_positive(phi, d):
    assert models.cross_circle_gap(phi, d) > 0.0


@pytest.mark.parametrize("phi", [0.0, np.pi / 2])
def test_cross_gap_domain(phi):
    with pytest.raises(ValueError):
        models.cross_circle_gap(phi, 1.0)


# ---- table and spec ----------------------------------------------------------

def test_latitude_table_rows():
    rows = models.latitude_table(120, 6, [0.0, 0.6, 1.0])
    assert [r["phi0"] for r in rows] == [0.0, 0.6, 1.0]
    assert rows[0]["cos2phi0"] == 1.0
    assert rows[0]["V_asymptotic"] == pytest.approx(PI2 / 108, rel=1e-15)
    assert rows[0]["reduction_pct"] == 0.0
    assert rows[1]["reduction_pct"] == pytest.approx(31.9, abs=0.05)
    assert rows[2]["reduction_pct"] == pytest.approx(70.8, abs=0.05)
    assert rows[1]["cos2phi0"] == pytest.approx(0.681, abs=5e-4)
    assert rows[1]["V_asymptotic"] == pytest.approx(0.0621, abs=5e-4)
    assert rows[2]["V_asymptotic"] == pytest.approx(0.0267, abs=5e-4)
    for r in rows:
        assert r["V_exact"] == models.one_circle_error(120, 6, r["phi0"])


def test_model_spec_validation():
    assert ModelSpec("two-circles", 48, 6, 0.5).per_circle == 24
    assert ModelSpec(ModelKind.EQUATOR, 10, 3).kind is ModelKind.EQUATOR
    with pytest.raises(ValueError):
        ModelSpec("equator", 10, 3, 0.2)
    with pytest.raises(ValueError):
        ModelSpec("two-circles", 47, 6, 0.5)
    with pytest.raises(ValueError):
        ModelSpec("two-circles", 48, 6, 0.0)
    with pytest.raises(ValueError):
        ModelSpec("one-circle", 48, 0, 0.5)


def test_codebook_pairing_detects_breakage():
    good = models.Codebook([0.1, 0.1 + np.pi], ["upper", "lower"])
    bad = models.Codebook([0.1, 0.2 + np.pi], ["upper", "lower"])
    assert good.is_antipodally_paired()
    assert not bad.is_antipodally_paired()
    with pytest.raises(ValueError):
        models.Codebook([0.1], ["upper", "lower"])
