import math

import pytest

import henlab as hl


@pytest.fixture
def quad():
    return hl.HenonMap([0, 0, 1], 1)


@pytest.fixture
def system(quad):
    return hl.GeneratorSystem.rotation(hl.GroupPreset(quad, math.pi / 4))


def test_map_round_trip(quad):
    z = hl.Point2(0.3 + 0.1j, -0.2 + 0.4j)
    w = quad.apply_inverse(quad.apply(z))
    assert abs(w.x - z.x) < 1e-12
    assert abs(w.y - z.y) < 1e-12
    assert quad.apply(hl.Point2(1, 2)).y == 2**2 - 1


def test_certified_radius_is_three(quad):
    f = hl.certified_filtration(quad)
    assert abs(f.radius - 3.0) <= 1e-9
    assert hl.classify_region(f, hl.Point2(0, 5)) == hl.Region.VMinus


def test_word_reduction():
    assert str(hl.Word("abAB")) == "abAB"
    assert len(hl.Word("aA")) == 0
    assert hl.reduced_count(2) == 12
    assert len(hl.enumerate_reduced(2)) == 12


def test_drift_is_near_half():
    est = hl.drift_estimate(hl.WalkMeasure.uniform(), 2000, 100, 1)
    assert 0.45 < est.mean < 0.55


def test_orbit_escapes_with_certificate(system):
    t = hl.orbit(system, [hl.Generator.H1] * 5, hl.Point2(0, 5), 1e6)
    assert t.escaped_at > 0
    assert t.escape_certified


def test_filled_julia_verdicts(quad):
    assert hl.classify_filled_julia(quad, hl.Point2(0, 0), 50).kind == hl.JuliaKind.InK
    v = hl.classify_filled_julia(quad, hl.Point2(0, 5), 50)
    assert v.kind == hl.JuliaKind.EscapesForward
    assert v.step == 1


def test_mass_escape_from_collar(system):
    dirs = hl.indeterminacy_set(system.theta)
    starts = hl.collar_starts(dirs, hl.CollarParams(100.0, 0.2))
    f = hl.mass_escape(system, hl.WalkMeasure.uniform(), starts, 50, 10.0, 200, 8)
    assert f[0] == 0.0
    assert all(0.0 <= x <= 1.0 for x in f)


def test_stationarity_defect_at_fixed_point(system):
    # The origin is fixed by every generator and is its cell's center.
    hist = hl.GridHistogram(hl.HistogramBox(hl.Point2(0, 0), 2.5), 5)
    hist.add(hl.Point2(0, 0))
    assert hl.stationarity_defect(system, hl.WalkMeasure.uniform(), hist, 0, 1) == 0.0


def test_render_raster(system):
    spec = hl.RenderSpec()
    spec.slice = hl.real_plane_slice(4.0)
    spec.width = 8
    spec.height = 8
    spec.budget = 30
    r = hl.render_escape_slice(system, spec)
    assert len(r.values) == 64
    assert r.cap == 30
    assert r.pgm_bytes().startswith(b"P5\n")


def test_disjointness(quad):
    other = hl.translate_diagonal(quad, 100)
    rep = hl.disjointness_report(quad, other, hl.HistogramBox(hl.Point2(0, 0), 0.1), 50,
                                 100, 5)
    assert rep.overlap_count == 0
    assert rep.disjoint_heuristic
    assert rep.sampling_only
