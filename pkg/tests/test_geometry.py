import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

import polar_oracle
from propermap import geometry as g
from propermap.errors import RegionError, SampleModeError

PI = math.pi


# -- membership --------------------------------------------------------------

@pytest.mark.parametrize("spec,z,expected", [
    (g.sector(1, 0.0, PI / 2), 1.5 * np.exp(1j * PI / 4), True),
    (g.sector(1, 0.0, PI / 2), 1.5 * np.exp(1j * 1.8), False),
    (g.arc(2, 0.0, PI), 2.0000001 * np.exp(1j * 1.0), False),
    (g.arc(2, 0.0, PI), (2.0 + 1e-10) * np.exp(1j * 1.0), True),
    (g.disk_k(0), 0.0 + 0.0j, False),
    (g.disk_k(0), 1e-12 + 0.0j, False),
    (g.disk_k(2), 2.0 + 0.0j, True),
    (g.disk_k(2), -1.3 + 0.2j, True),
    (g.wblock(1, 0.1, 0.0, PI), 1.05j, True),
    (g.lblock(1, 0.1, 0.0, PI), 1.05j, False),
    (g.lblock(1, 0.1, 0.0, PI), 1.5j, True),
    (g.wblock(1, 0.1, 0.0, PI), 1.5j, False),
    (g.gamma(1, (0.0, PI)), 1.5 + 0.0j, True),
    (g.gamma(1, (0.0, PI)), 1.5 * np.exp(0.1j), False),
    (g.points(2, (0.0, PI)), -2.0 + 0.0j, True),
    (g.points(2, (0.0, PI)), -1.999 + 0.0j, False),
])
def test_membership_cases(spec, z, expected):
    assert g.contains(spec, complex(z)) is expected


def test_union_membership_wraps_terminal_angle():
    # even family ends at tau; a point just below angle 0 must land in it
    arr = (0.0, PI, g.TAU)
    even = g.even_union("sector", 1, arr)
    z = 1.5 * np.exp(1j * (g.TAU - 1e-12))
    assert g.contains(even, complex(z))


def test_contains_many_matches_scalar():
    spec = g.wblock(2, 0.11, 1.0, 2.5)
    rng = np.random.default_rng(7)
    zs = rng.uniform(-4, 4, 64) + 1j * rng.uniform(-4, 4, 64)
    many = g.contains_many(spec, zs)
    singles = np.array([g.contains(spec, complex(z)) for z in zs])
    assert np.array_equal(many, singles)


# -- constructor validation --------------------------------------------------

@pytest.mark.parametrize("build", [
    lambda: g.sector(1, 1.0, 1.0),
    lambda: g.sector(1, 0.0, g.TAU),
    lambda: g.sector(0, 0.0, 1.0),
    lambda: g.sector(1, -0.1, 1.0),
    lambda: g.arc(1, 2.0, 1.0),
    lambda: g.lblock(1, 0.5, 0.0, 1.0),
    lambda: g.lblock(1, 0.0, 0.0, 1.0),
    lambda: g.wblock(1, 1.0 / 3.0, 0.0, 1.0),
    lambda: g.gamma(1, ()),
    lambda: g.gamma(0, (0.0,)),
    lambda: g.points(1, (0.0, g.TAU)),
    lambda: g.points(1, (1.0, 0.5)),
    lambda: g.odd_union("sector", 1, (0.1, PI, g.TAU)),
    lambda: g.odd_union("sector", 1, (0.0, PI)),
    lambda: g.odd_union("blob", 1, (0.0, PI, g.TAU)),
    lambda: g.odd_union("lblock", 1, (0.0, PI, g.TAU)),  # missing delta
    lambda: g.union_of([]) and g.RegionSpec("union"),
])
def test_invalid_constructions(build):
    with pytest.raises(RegionError):
        build()


def test_union_of_flattens_and_drops_empty():
    u = g.union_of([g.empty(), g.disk_k(1),
                    g.union_of([g.sector(1, 0.0, 1.0), g.sector(1, 2.0, 3.0)])])
    assert u.kind == "union"
    assert len(u.members) == 3
    assert g.union_of([g.empty()]).is_empty
    assert g.union_of([g.disk_k(2)]).kind == "disk"


# -- angle arrays ------------------------------------------------------------

def test_refine_angles_worked_example():
    got = g.refine_angles((0.0, PI, g.TAU), 0.2)
    expected = (0.0, 0.2, PI - 0.2, PI, PI + 0.2, g.TAU - 0.2, g.TAU)
    assert got == expected


def test_refine_angles_growth_sequence():
    phis = (0.0, PI, g.TAU)
    delta = 0.3
    for n in range(1, 7):
        l = (len(phis) - 1) // 2
        assert l == 3 ** (n - 1)
        if n < 6:
            phis = g.refine_angles(phis, delta)
            delta /= 3.5


@pytest.mark.parametrize("delta", [0.0, -0.1, 1.0 / 3.0, 0.5, math.inf])
def test_refine_angles_rejects_bad_delta(delta):
    with pytest.raises(RegionError):
        g.refine_angles((0.0, PI, g.TAU), delta)


def _random_angle_array(draw):
    l = draw(st.integers(min_value=1, max_value=3))
    cuts = draw(st.lists(st.floats(min_value=0.08, max_value=g.TAU - 0.08),
                         min_size=2 * l - 1, max_size=2 * l - 1, unique=True))
    arr = (0.0, *sorted(cuts), g.TAU)
    assume(min(np.diff(arr)) > 0.06)
    return arr


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_refine_angles_keeps_old_entries_at_stride_three(data):
    arr = _random_angle_array(data.draw)
    delta = data.draw(st.floats(min_value=1e-4, max_value=0.019))
    out = g.refine_angles(arr, delta)
    l = (len(arr) - 1) // 2
    assert len(out) == 6 * l + 1
    assert out[::3] == arr
    assert all(b > a for a, b in zip(out, out[1:]))
    g.validate_angle_array(out)


@pytest.mark.parametrize("arr", [
    (0.0, PI),                    # even length
    (0.1, PI, g.TAU),             # wrong start
    (0.0, PI, g.TAU - 1e-6),      # wrong end
    (0.0, 4.0, 3.0, 5.0, g.TAU),  # not increasing
])
def test_validate_angle_array_rejects(arr):
    with pytest.raises(RegionError):
        g.validate_angle_array(arr)


# -- sampling ----------------------------------------------------------------

_SAMPLED = [
    g.disk_k(2),
    g.sector(1, 0.3, 2.0),
    g.sector(2, PI, g.TAU),
    g.arc(3, 0.0, 1.0),
    g.gamma(1, (0.0, 1.0, PI)),
    g.points(2, (0.0, PI)),
    g.lblock(1, 0.2, 0.5, 2.5),
    g.wblock(1, 0.2, 0.5, 2.5),
    g.odd_union("sector", 1, (0.0, 1.0, 2.0, 4.0, 5.0, 6.0, g.TAU)),
    g.even_union("wblock", 2, (0.0, 1.0, 2.0, 4.0, 5.0, 6.0, g.TAU), delta=0.08),
    g.union_of([g.disk_k(1), g.sector(1, 0.0, 1.0)]),
]


@pytest.mark.parametrize("spec", _SAMPLED, ids=lambda s: s.kind)
def test_sampled_points_are_members(spec):
    pts = g.sample(spec, 9.0)
    assert pts.size > 0
    assert g.contains_many(spec, pts).all()


@pytest.mark.parametrize("spec", [s for s in _SAMPLED if s.kind != "points"],
                         ids=lambda s: s.kind)
def test_boundary_samples_are_members(spec):
    pts = g.sample(spec, 9.0, mode="boundary")
    assert pts.size > 0
    assert g.contains_many(spec, pts).all()


def test_sample_density_scales_counts():
    lo = g.sample(g.sector(1, 0.0, 2.0), 4.0).size
    hi = g.sample(g.sector(1, 0.0, 2.0), 8.0).size
    assert hi > 2 * lo


def test_points_sample_is_exact():
    pts = g.sample(g.points(2, (0.0, PI)), 100.0)
    assert np.allclose(sorted(pts, key=lambda z: z.real), [-2.0, 2.0])


@pytest.mark.parametrize("spec", [g.arc(1, 0.0, 1.0), g.gamma(1, (0.0,)),
                                  g.points(1, (0.0,))])
def test_filled_mode_rejected_on_zero_measure(spec):
    with pytest.raises(SampleModeError):
        g.sample(spec, 5.0, mode="filled")


def test_sample_rejects_bad_density_and_mode():
    with pytest.raises(RegionError):
        g.sample(g.disk_k(1), 0.0)
    with pytest.raises(SampleModeError):
        g.sample(g.disk_k(1), 1.0, mode="surface")


def test_sample_radius_stays_in_band():
    spec = g.sector(3, 0.1, 1.2)
    pts = g.sample(spec, 11.0)
    r = np.abs(pts)
    assert r.min() >= 3.0 - 1e-12
    assert r.max() <= 4.0 + 1e-12


# -- decomposition -----------------------------------------------------------

def test_decompose_annulus_keys_and_counts():
    arr = g.refine_angles((0.0, PI, g.TAU), 0.3)
    d = g.decompose_annulus(2, arr, 0.05)
    assert set(d) == {"D_odd", "D_even", "W_odd", "W_even", "L_odd", "L_even",
                      "gamma", "points_inner", "points_outer",
                      "alpha_odd", "alpha_even"}
    l = (len(arr) - 1) // 2
    assert len(d["D_odd"].pieces()) == l
    assert len(d["D_even"].pieces()) == l
    assert len(d["gamma"].angles) == 2 * l
    assert d["points_outer"].n == 3


def test_sector_families_cover_annulus():
    arr = g.refine_angles((0.0, PI, g.TAU), 0.3)
    d = g.decompose_annulus(2, arr, 0.05)
    rng = np.random.default_rng(11)
    r = rng.uniform(2.0, 3.0, 4000)
    phi = rng.uniform(0.0, g.TAU, 4000)
    zs = r * np.exp(1j * phi)
    in_odd = g.contains_many(d["D_odd"], zs)
    in_even = g.contains_many(d["D_even"], zs)
    assert np.all(in_odd | in_even)
    # collar-or-core covers each sector family
    odd_cover = g.contains_many(d["W_odd"], zs) | g.contains_many(d["L_odd"], zs)
    even_cover = g.contains_many(d["W_even"], zs) | g.contains_many(d["L_even"], zs)
    assert np.array_equal(in_odd, odd_cover)
    assert np.array_equal(in_even, even_cover)
    # the two constraint unions of the correction stage tile the band
    assert np.all(odd_cover | even_cover)


def test_wblock_and_lblock_split_sector():
    sec = g.sector(1, 0.5, 2.5)
    w = g.wblock(1, 0.2, 0.5, 2.5)
    l = g.lblock(1, 0.2, 0.5, 2.5)
    rng = np.random.default_rng(3)
    zs = rng.uniform(-2.2, 2.2, 6000) + 1j * rng.uniform(-2.2, 2.2, 6000)
    in_sec = g.contains_many(sec, zs)
    assert np.array_equal(in_sec, g.contains_many(w, zs) | g.contains_many(l, zs))


def test_annulus_helper():
    assert g.annulus(1).kind == "disk"
    ring = g.annulus(3)
    assert g.contains(ring, 2.5 + 0.0j)
    assert not g.contains(ring, 1.9 + 0.0j)
    with pytest.raises(RegionError):
        g.annulus(0)


# -- oracle cross-check ------------------------------------------------------

def _oracle_catalog():
    arr1 = (0.0, PI, g.TAU)
    arr2 = g.refine_angles(arr1, 0.3)
    return [
        g.disk_k(0), g.disk_k(3),
        g.sector(1, 0.2, 2.2), g.sector(2, 4.0, g.TAU),
        g.arc(2, 0.0, PI), g.gamma(2, (0.5, 2.5, 4.5)),
        g.points(1, (0.0, 2.0)),
        g.lblock(2, 0.3, 1.0, 3.0), g.wblock(2, 0.3, 1.0, 3.0),
        g.odd_union("sector", 1, arr2), g.even_union("sector", 1, arr2),
        g.odd_union("wblock", 2, arr2, delta=0.08),
        g.even_union("lblock", 2, arr2, delta=0.08),
        g.odd_union("arc", 3, arr2),
        g.union_of([g.disk_k(1), g.gamma(1, (0.0, PI))]),
    ]


def test_membership_agrees_with_oracle():
    rng = np.random.default_rng(42)
    zs = rng.uniform(-4.5, 4.5, 20000) + 1j * rng.uniform(-4.5, 4.5, 20000)
    for spec in _oracle_catalog():
        lib = g.contains_many(spec, zs)
        orc = polar_oracle.member(spec, zs)
        assert np.array_equal(lib, orc), f"disagreement on {spec.kind}"
