import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st

from errors import DomainError, InvalidLatticeError, ParseError
from lattice_geometry import (
    UM_PER_CM,
    CurvatureProfile,
    PhysicalParams,
    build_lattice_1d,
    build_lattice_triangular,
    center_site,
    classify_bond,
    lattice_from_json,
    lattice_to_json,
    reflect_lattice,
    triangular_profile,
)

D = 15.0


def _find_site(lattice, x, y):
    for s in lattice.sites:
        if abs(s.x - x) < 1e-9 and abs(s.y - y) < 1e-9:
            return s.id
    raise AssertionError(f"cap lloc a ({x}, {y})")


def _bond_between(lattice, a, b):
    key = (min(a, b), max(a, b))
    for bond in lattice.bonds:
        if (bond.i, bond.j) == key:
            return bond
    return None


# ============================================================================
# PHYSICAL PARAMS
# ============================================================================

def test_physical_defaults():
    p = PhysicalParams()
    assert p.n0 == 1.503
    assert p.wavelength_um == 0.78


@pytest.mark.parametrize("kwargs", [
    {"n0": 0.9},
    {"wavelength_um": 0.0},
    {"d_um": -1.0},
])
def test_physical_rejects_invalid(kwargs):
    with pytest.raises(DomainError):
        PhysicalParams(**kwargs)


# ============================================================================
# 1D
# ============================================================================

def test_chain_smallest():
    lat = build_lattice_1d(2, D)
    assert lat.n_sites == 2
    assert len(lat.bonds) == 1
    assert (lat.bonds[0].spacing_class, lat.bonds[0].direction_class) == ("d", "h")


def test_chain_span():
    lat = build_lattice_1d(5, D)
    xs = [s.x for s in lat.sites]
    assert len(lat.bonds) == 4
    assert max(xs) - min(xs) == pytest.approx(60.0)
    assert all(s.y == 0.0 for s in lat.sites)


def test_chain_interior_site_has_two_neighbours_brute_force():
    lat = build_lattice_1d(121, D)
    pos = lat.positions()
    k = 60
    dist = np.hypot(*(pos - pos[k]).T)
    assert int(np.sum(np.abs(dist - D) < 1e-9 * D)) == 2
    assert sum(1 for b in lat.bonds if k in (b.i, b.j)) == 2


def test_chain_too_small():
    with pytest.raises(InvalidLatticeError):
        build_lattice_1d(1, D)


def test_chain_center_site():
    assert center_site(build_lattice_1d(121, D)) == 60


# ============================================================================
# TRIANGULAR
# ============================================================================

@pytest.mark.parametrize("radius", [1, 2, 5])
def test_triangular_site_count(radius):
    assert build_lattice_triangular(radius, D).n_sites == 3 * radius * (radius + 1) + 1


def test_triangular_interior_site_bonds():
    lat = build_lattice_triangular(4, D)
    c = center_site(lat)
    per_class = Counter(b.spacing_class for b in lat.bonds if c in (b.i, b.j))
    assert per_class == {"d": 6, "sqrt3d": 6, "2d": 6}


def test_triangular_interior_bonds_brute_force():
    lat = build_lattice_triangular(4, D)
    pos = lat.positions()
    c = lat.index_of(center_site(lat))
    dist = np.hypot(*(pos - pos[c]).T) / D
    for ratio in (1.0, math.sqrt(3.0), 2.0):
        assert int(np.sum(np.abs(dist - ratio) < 1e-9 * ratio)) == 6


def test_vertical_nearest_bond():
    lat = build_lattice_triangular(3, D)
    a = _find_site(lat, 0.0, D)
    b = _find_site(lat, 0.0, 2 * D)
    bond = _bond_between(lat, a, b)
    assert (bond.spacing_class, bond.direction_class) == ("d", "v")


def test_horizontal_second_shell_bond():
    lat = build_lattice_triangular(3, D)
    a = _find_site(lat, 0.0, 0.0)
    b = _find_site(lat, math.sqrt(3.0) * D, 0.0)
    bond = _bond_between(lat, a, b)
    assert (bond.spacing_class, bond.direction_class) == ("sqrt3d", "h")


def test_triangular_has_exactly_six_scenarios():
    lat = build_lattice_triangular(3, D)
    classes = {(b.spacing_class, b.direction_class) for b in lat.bonds}
    assert classes == {
        ("d", "v"), ("d", "h30"),
        ("sqrt3d", "h"), ("sqrt3d", "h60"),
        ("2d", "v"), ("2d", "h30"),
    }


def test_bonds_stored_once():
    lat = build_lattice_triangular(3, D)
    keys = [(b.i, b.j) for b in lat.bonds]
    assert all(i < j for i, j in keys)
    assert len(set(keys)) == len(keys)


@given(st.integers(min_value=1, max_value=4))
def test_bond_lengths_match_classes(radius):
    lat = build_lattice_triangular(radius, D)
    ratios = {"d": 1.0, "sqrt3d": math.sqrt(3.0), "2d": 2.0}
    by_id = {s.id: s for s in lat.sites}
    for b in lat.bonds:
        length = math.hypot(by_id[b.j].x - by_id[b.i].x, by_id[b.j].y - by_id[b.i].y) / D
        assert abs(length - ratios[b.spacing_class]) <= 1e-9 * ratios[b.spacing_class]


def test_triangular_rejects_zero_shells():
    with pytest.raises(InvalidLatticeError):
        build_lattice_triangular(0, D)


def test_classify_rejects_off_lattice_vector():
    with pytest.raises(InvalidLatticeError):
        classify_bond(1.3 * D, 0.0, D)
    with pytest.raises(InvalidLatticeError):
        classify_bond(D * math.cos(math.radians(45)), D * math.sin(math.radians(45)), D)


def test_classify_direction_tolerance_is_tight():
    exact = math.radians(30.0)
    assert classify_bond(D * math.cos(exact), D * math.sin(exact), D) == ("d", "h30")
    off = math.radians(30.0 + 1e-8)
    with pytest.raises(InvalidLatticeError):
        classify_bond(D * math.cos(off), D * math.sin(off), D)


def test_reflection_preserves_sites_and_bond_multiset():
    lat = build_lattice_triangular(4, D)
    ref = reflect_lattice(lat)

    def rounded(positions):
        return sorted(map(tuple, np.round(positions, 9)))

    assert rounded(lat.positions()) == rounded(ref.positions())

    by_id = {s.id: s for s in ref.sites}
    geometric = Counter(
        classify_bond(by_id[b.j].x - by_id[b.i].x, by_id[b.j].y - by_id[b.i].y, D) for b in ref.bonds
    )
    assert geometric == Counter((b.spacing_class, b.direction_class) for b in lat.bonds)


# ============================================================================
# JSON
# ============================================================================

def test_json_round_trip():
    lat = build_lattice_triangular(2, D)
    assert lattice_from_json(lattice_to_json(lat)) == lat


def test_json_infers_dimension_and_spacing():
    doc = lattice_to_json(build_lattice_1d(4, D))
    doc.pop("dimension")
    doc.pop("d_um")
    lat = lattice_from_json(doc)
    assert lat.dimension == "1D"
    assert lat.d_um == pytest.approx(D)


def test_json_rejects_misclassified_bond():
    doc = lattice_to_json(build_lattice_1d(3, D))
    doc["bonds"][0]["direction"] = "v"
    with pytest.raises(InvalidLatticeError):
        lattice_from_json(doc)


def test_json_rejects_malformed_document():
    with pytest.raises(ParseError):
        lattice_from_json({"sites": [{"id": 0, "x": 0.0}], "bonds": []})


# ============================================================================
# PERFILS
# ============================================================================

def test_straight_profile_has_no_amplitude():
    with pytest.raises(DomainError):
        CurvatureProfile(kind="straight", amplitude_um=3.0)
    assert CurvatureProfile.straight().slope(0.7) == 0.0


def test_sinusoidal_zero_amplitude_is_straight():
    assert CurvatureProfile.sinusoidal(0.0, 2.0).is_straight


def test_sinusoidal_needs_period():
    with pytest.raises(DomainError):
        CurvatureProfile(kind="sinusoidal", amplitude_um=10.0, period_cm=0.0)


def test_sinusoidal_derivatives():
    prof = CurvatureProfile.sinusoidal(14.4, 2.0)
    k = math.pi
    a_cm = 14.4 / UM_PER_CM
    assert prof.displacement_um(0.5) == pytest.approx(14.4)
    assert prof.slope(0.0) == pytest.approx(a_cm * k)
    assert prof.curvature(0.5) == pytest.approx(-a_cm * k * k)


def test_sampled_must_be_periodic():
    with pytest.raises(DomainError):
        CurvatureProfile.sampled([0.0, 1.0, 2.0], 1.0)


def test_sampled_sinusoid_matches_analytic_curvature():
    n = 400
    t = np.arange(n + 1) / n
    samples = 14.4 * np.sin(2 * np.pi * t)
    samples[-1] = samples[0]
    prof = CurvatureProfile.sampled(samples, 2.0)
    exact = CurvatureProfile.sinusoidal(14.4, 2.0)
    assert prof.curvature(0.5) == pytest.approx(exact.curvature(0.5), rel=1e-3)
    assert prof.slope(0.0) == pytest.approx(exact.slope(0.0025), rel=1e-4)


def test_triangular_profile_constant_slope():
    prof = triangular_profile(14.4, 2.0, 400)
    expected = 4 * (14.4 / UM_PER_CM) / 2.0
    assert np.allclose(np.abs(prof.interval_slopes), expected, rtol=1e-9)
    assert prof.displacement_um(0.5) == pytest.approx(14.4)
    assert prof.displacement_um(1.5) == pytest.approx(-14.4)


def test_triangular_profile_needs_multiple_of_four():
    with pytest.raises(DomainError):
        triangular_profile(10.0, 1.0, 402)
