"""Plane regions for the construction: disks, annular sectors, slit bundles.

Every region is described in polar form relative to the integer radius bands
[n, n+1].  Membership uses closed inequalities with a small shared tolerance so
that points produced by :func:`sample` always test as inside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import RegionError, SampleModeError

TAU = math.tau

# Closed-inequality slack for membership tests.  Keep well below any feature
# size the construction produces (collar widths stay >= 1e-6 in practice).
MEMBERSHIP_TOL = 1e-9

# Hard bound on collar widths: delta < min(1, gap) / 3.
GAP_FRACTION = 1.0 / 3.0

EMPTY = "empty"
DISK = "disk"
GAMMA = "gamma"
POINTS = "points"
SECTOR = "sector"
ARC = "arc"
LBLOCK = "lblock"
WBLOCK = "wblock"
BAND = "band"
ODD_UNION = "odd_union"
EVEN_UNION = "even_union"
UNION = "union"

_AREA_KINDS = frozenset({DISK, SECTOR, LBLOCK, WBLOCK, BAND})
_CURVE_KINDS = frozenset({GAMMA, ARC})
_UNION_SHAPES = frozenset({SECTOR, ARC, LBLOCK, WBLOCK})


def canonical_angle(phi: float) -> float:
    """Reduce an angle to [0, tau)."""
    out = math.fmod(phi, TAU)
    if out < 0.0:
        out += TAU
    return out


def validate_angle_array(phis) -> int:
    """Check the 2l+1 angle layout (0 start, tau end, strictly increasing).

    Returns l.
    """
    arr = np.asarray(phis, dtype=float)
    if arr.ndim != 1 or arr.size < 3 or arr.size % 2 == 0:
        raise RegionError(f"angle array needs odd length >= 3, got shape {arr.shape}")
    if arr[0] != 0.0:
        raise RegionError(f"angle array must start at 0, got {arr[0]!r}")
    if abs(arr[-1] - TAU) > 1e-12:
        raise RegionError(f"angle array must end at tau, got {arr[-1]!r}")
    if not np.all(np.diff(arr) > 0.0):
        raise RegionError("angle array must be strictly increasing")
    return (arr.size - 1) // 2


def max_refinement_width(phis) -> float:
    """Largest admissible collar width for this angle array (exclusive bound)."""
    gaps = np.diff(np.asarray(phis, dtype=float))
    return GAP_FRACTION * min(1.0, float(gaps.min()))


def refine_angles(phis, delta: float) -> tuple[float, ...]:
    """Split every gap of the angle array into three using collar width delta.

    Each old angle phi_k spawns the triple (phi_k, phi_k + delta,
    phi_{k+1} - delta); the terminal tau is carried over unchanged.  The old
    entries survive at stride-3 positions and the array length goes from
    2l+1 to 6l+1.
    """
    arr = np.asarray(phis, dtype=float)
    l = validate_angle_array(arr)
    if not 0.0 < delta < max_refinement_width(arr):
        raise RegionError(
            f"collar width {delta!r} outside (0, {max_refinement_width(arr)!r})"
        )
    out: list[float] = []
    for k in range(2 * l):
        out.append(float(arr[k]))
        out.append(float(arr[k] + delta))
        out.append(float(arr[k + 1] - delta))
    out.append(TAU)
    return tuple(out)


def odd_pairs(phis) -> list[tuple[float, float]]:
    """Sector bounds (phi_1,phi_2), (phi_3,phi_4), ... of the odd family."""
    arr = [float(x) for x in phis]
    l = validate_angle_array(arr)
    return [(arr[2 * k], arr[2 * k + 1]) for k in range(l)]


def even_pairs(phis) -> list[tuple[float, float]]:
    """Sector bounds (phi_2,phi_3), ..., (phi_2l, tau) of the even family."""
    arr = [float(x) for x in phis]
    l = validate_angle_array(arr)
    return [(arr[2 * k + 1], arr[2 * k + 2]) for k in range(l)]


@dataclass(frozen=True)
class RegionSpec:
    """Tagged polar-region description.  Build through the module constructors."""

    kind: str
    n: int = 0
    delta: float | None = None
    phi_a: float | None = None
    phi_b: float | None = None
    r_lo: float | None = None
    r_hi: float | None = None
    angles: tuple[float, ...] | None = None
    array: tuple[float, ...] | None = None
    shape: str | None = None
    members: tuple["RegionSpec", ...] = field(default=())

    def __post_init__(self):
        _validate_spec(self)

    def pieces(self) -> tuple["RegionSpec", ...]:
        """Concrete members of a union-like spec (itself otherwise)."""
        if self.kind == UNION:
            return self.members
        if self.kind in (ODD_UNION, EVEN_UNION):
            pairs = odd_pairs(self.array) if self.kind == ODD_UNION else even_pairs(self.array)
            out = []
            for a, b in pairs:
                if self.shape == SECTOR:
                    out.append(sector(self.n, a, b))
                elif self.shape == ARC:
                    out.append(arc(self.n, a, b))
                elif self.shape == LBLOCK:
                    out.append(lblock(self.n, self.delta, a, b))
                else:
                    out.append(wblock(self.n, self.delta, a, b))
            return tuple(out)
        return (self,)

    @property
    def is_empty(self) -> bool:
        return self.kind == EMPTY


def _check_band_index(n: int, kind: str, minimum: int = 1) -> None:
    if not isinstance(n, (int, np.integer)) or n < minimum:
        raise RegionError(f"{kind}: band index must be an integer >= {minimum}, got {n!r}")


def _check_sector_angles(a, b, kind: str) -> None:
    if a is None or b is None:
        raise RegionError(f"{kind}: both angles required")
    if not (0.0 <= a < b <= TAU) or not (b - a < TAU):
        raise RegionError(f"{kind}: need 0 <= phi_a < phi_b <= tau with width < tau, got ({a!r}, {b!r})")


def _check_delta(delta, width, kind: str) -> None:
    if delta is None or not 0.0 < delta < GAP_FRACTION * min(1.0, width):
        raise RegionError(
            f"{kind}: collar width {delta!r} outside (0, {GAP_FRACTION * min(1.0, width)!r})"
        )


def _validate_spec(s: RegionSpec) -> None:
    k = s.kind
    if k == EMPTY:
        return
    if k == DISK:
        _check_band_index(s.n, k, minimum=0)
        return
    if k in (GAMMA, POINTS):
        _check_band_index(s.n, k)
        if not s.angles:
            raise RegionError(f"{k}: need at least one angle")
        arr = np.asarray(s.angles, dtype=float)
        if not np.all((arr >= 0.0) & (arr < TAU)):
            raise RegionError(f"{k}: angles must lie in [0, tau)")
        if arr.size > 1 and not np.all(np.diff(arr) > 0.0):
            raise RegionError(f"{k}: angles must be strictly increasing")
        return
    if k in (SECTOR, ARC):
        _check_band_index(s.n, k)
        _check_sector_angles(s.phi_a, s.phi_b, k)
        return
    if k == BAND:
        if s.r_lo is None or s.r_hi is None or not 0.0 <= s.r_lo < s.r_hi:
            raise RegionError(f"band: need 0 <= r_lo < r_hi, got ({s.r_lo!r}, {s.r_hi!r})")
        _check_sector_angles(s.phi_a, s.phi_b, k)
        return
    if k in (LBLOCK, WBLOCK):
        _check_band_index(s.n, k)
        _check_sector_angles(s.phi_a, s.phi_b, k)
        _check_delta(s.delta, s.phi_b - s.phi_a, k)
        return
    if k in (ODD_UNION, EVEN_UNION):
        _check_band_index(s.n, k)
        if s.shape not in _UNION_SHAPES:
            raise RegionError(f"{k}: shape must be one of {sorted(_UNION_SHAPES)}")
        l = validate_angle_array(s.array)
        if l < 1:
            raise RegionError(f"{k}: degenerate angle array")
        if s.shape in (LBLOCK, WBLOCK):
            gaps = np.diff(np.asarray(s.array, dtype=float))
            _check_delta(s.delta, float(gaps.min()), k)
        return
    if k == UNION:
        if not s.members:
            raise RegionError("union: needs at least one member")
        return
    raise RegionError(f"unknown region kind {k!r}")


# -- constructors ------------------------------------------------------------

def empty() -> RegionSpec:
    return RegionSpec(EMPTY)


def disk_k(n: int) -> RegionSpec:
    """Closed disk of radius n; n = 0 is the empty stage of the exhaustion."""
    return RegionSpec(DISK, n=n)


def gamma(n: int, angles) -> RegionSpec:
    """Radial segments r in [n, n+1] at the listed angles."""
    return RegionSpec(GAMMA, n=n, angles=tuple(float(a) for a in angles))


def points(n: int, angles) -> RegionSpec:
    """The points n*e^{i phi} for the listed angles."""
    return RegionSpec(POINTS, n=n, angles=tuple(float(a) for a in angles))


def sector(n: int, phi_a: float, phi_b: float) -> RegionSpec:
    """Annular sector r in [n, n+1], phi in [phi_a, phi_b]."""
    return RegionSpec(SECTOR, n=n, phi_a=float(phi_a), phi_b=float(phi_b))


def arc(n: int, phi_a: float, phi_b: float) -> RegionSpec:
    """Circle arc at radius n between the two angles."""
    return RegionSpec(ARC, n=n, phi_a=float(phi_a), phi_b=float(phi_b))


def lblock(n: int, delta: float, phi_a: float, phi_b: float) -> RegionSpec:
    """Inner retract of a sector: r in [n+delta, n+1], angles pulled in by delta."""
    return RegionSpec(LBLOCK, n=n, delta=float(delta), phi_a=float(phi_a), phi_b=float(phi_b))


def band(r_lo: float, r_hi: float, phi_a: float, phi_b: float) -> RegionSpec:
    """Polar box r in [r_lo, r_hi], phi in [phi_a, phi_b]."""
    return RegionSpec(BAND, r_lo=float(r_lo), r_hi=float(r_hi),
                      phi_a=float(phi_a), phi_b=float(phi_b))


def wblock(n: int, delta: float, phi_a: float, phi_b: float) -> RegionSpec:
    """Closure of the sector minus its L-retract: the collar along two sides."""
    return RegionSpec(WBLOCK, n=n, delta=float(delta), phi_a=float(phi_a), phi_b=float(phi_b))


def odd_union(shape: str, n: int, array, delta: float | None = None) -> RegionSpec:
    """Shape applied over the odd gaps (phi_1,phi_2), (phi_3,phi_4), ..."""
    return RegionSpec(ODD_UNION, n=n, shape=shape, delta=delta,
                      array=tuple(float(a) for a in array))


def even_union(shape: str, n: int, array, delta: float | None = None) -> RegionSpec:
    """Shape applied over the even gaps (phi_2,phi_3), ..., (phi_2l, tau)."""
    return RegionSpec(EVEN_UNION, n=n, shape=shape, delta=delta,
                      array=tuple(float(a) for a in array))


def union_of(members) -> RegionSpec:
    """Flattened union; empty members are dropped."""
    flat: list[RegionSpec] = []
    for m in members:
        if m.kind == UNION:
            flat.extend(m.members)
        elif m.kind != EMPTY:
            flat.append(m)
    if not flat:
        return empty()
    if len(flat) == 1:
        return flat[0]
    return RegionSpec(UNION, members=tuple(flat))


def annulus(n: int) -> RegionSpec:
    """Closed ring between radii n-1 and n (n = 1 gives the unit disk)."""
    if n < 1:
        raise RegionError(f"annulus index must be >= 1, got {n!r}")
    if n == 1:
        return disk_k(1)
    return union_of([sector(n - 1, 0.0, math.pi), sector(n - 1, math.pi, TAU)])


# -- membership --------------------------------------------------------------

def _in_interval(phi: np.ndarray, a: float, b: float, tol: float) -> np.ndarray:
    hit = (phi >= a - tol) & (phi <= b + tol)
    hit |= (phi + TAU >= a - tol) & (phi + TAU <= b + tol)
    hit |= (phi - TAU >= a - tol) & (phi - TAU <= b + tol)
    return hit


def _near_angles(phi: np.ndarray, angles: tuple[float, ...], tol: float) -> np.ndarray:
    d = phi[:, None] - np.asarray(angles, dtype=float)[None, :]
    d = np.abs((d + math.pi) % TAU - math.pi)
    return d.min(axis=1) <= tol


def _contains(s: RegionSpec, r: np.ndarray, phi: np.ndarray, tol: float) -> np.ndarray:
    k = s.kind
    if k == EMPTY:
        return np.zeros(r.shape, dtype=bool)
    if k == DISK:
        if s.n == 0:
            return np.zeros(r.shape, dtype=bool)
        return r <= s.n + tol
    if k == GAMMA:
        radial = (r >= s.n - tol) & (r <= s.n + 1 + tol)
        return radial & _near_angles(phi, s.angles, tol)
    if k == POINTS:
        return (np.abs(r - s.n) <= tol) & _near_angles(phi, s.angles, tol)
    if k == SECTOR:
        radial = (r >= s.n - tol) & (r <= s.n + 1 + tol)
        return radial & _in_interval(phi, s.phi_a, s.phi_b, tol)
    if k == BAND:
        radial = (r >= s.r_lo - tol) & (r <= s.r_hi + tol)
        return radial & _in_interval(phi, s.phi_a, s.phi_b, tol)
    if k == ARC:
        return (np.abs(r - s.n) <= tol) & _in_interval(phi, s.phi_a, s.phi_b, tol)
    if k == LBLOCK:
        radial = (r >= s.n + s.delta - tol) & (r <= s.n + 1 + tol)
        return radial & _in_interval(phi, s.phi_a + s.delta, s.phi_b - s.delta, tol)
    if k == WBLOCK:
        base = _contains(sector(s.n, s.phi_a, s.phi_b), r, phi, tol)
        collar = r <= s.n + s.delta + tol
        collar |= _in_interval(phi, s.phi_a, s.phi_a + s.delta, tol)
        collar |= _in_interval(phi, s.phi_b - s.delta, s.phi_b, tol)
        return base & collar
    # odd/even unions and explicit unions
    out = np.zeros(r.shape, dtype=bool)
    for m in s.pieces():
        out |= _contains(m, r, phi, tol)
    return out


def contains_many(s: RegionSpec, zs, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
    """Vectorized membership test with closed-boundary slack."""
    z = np.asarray(zs, dtype=complex).ravel()
    r = np.abs(z)
    phi = np.mod(np.angle(z), TAU)
    return _contains(s, r, phi, tol)


def contains(s: RegionSpec, z: complex, tol: float = MEMBERSHIP_TOL) -> bool:
    return bool(contains_many(s, np.asarray([z]), tol)[0])


# -- sampling ----------------------------------------------------------------

def _count(x: float) -> int:
    return int(math.ceil(x - 1e-9))


def _ring(r: float, density: float) -> np.ndarray:
    if r <= 0.0:
        return np.zeros(1, dtype=complex)
    m = max(8, _count(TAU * max(r, 0.5) * density))
    ang = np.arange(m) * (TAU / m)
    return r * np.exp(1j * ang)


def _radial_seg(phi: float, r0: float, r1: float, density: float) -> np.ndarray:
    m = max(1, _count((r1 - r0) * density))
    rs = np.linspace(r0, r1, m + 1)
    return rs * complex(math.cos(phi), math.sin(phi))


def _arc_seg(r: float, a: float, b: float, density: float) -> np.ndarray:
    m = max(1, _count((b - a) * max(r, 0.5) * density))
    ang = np.linspace(a, b, m + 1)
    return r * np.exp(1j * ang)


def _polar_rect(r0: float, r1: float, a: float, b: float, density: float) -> np.ndarray:
    nr = max(1, _count((r1 - r0) * density))
    rows = [_arc_seg(r, a, b, density) for r in np.linspace(r0, r1, nr + 1)]
    return np.concatenate(rows)


def _disk_fill(n: int, density: float) -> np.ndarray:
    if n == 0:
        return np.zeros(0, dtype=complex)
    nr = max(1, _count(n * density))
    rows = [_ring(r, density) for r in np.linspace(0.0, float(n), nr + 1)]
    return np.concatenate(rows)


def _sector_edges(s: RegionSpec, density: float) -> np.ndarray:
    lo, hi = float(s.n), float(s.n + 1)
    return np.concatenate([
        _arc_seg(lo, s.phi_a, s.phi_b, density),
        _arc_seg(hi, s.phi_a, s.phi_b, density),
        _radial_seg(s.phi_a, lo, hi, density),
        _radial_seg(s.phi_b, lo, hi, density),
    ])


def sample(s: RegionSpec, density: float, mode: str = "auto") -> np.ndarray:
    """Deterministic point sample of a region.

    density is points per unit length; 2-d kinds get a polar grid with all
    edges included, 1-d kinds get endpoint-inclusive segments.  Every returned
    point satisfies contains().
    """
    if density <= 0.0 or not math.isfinite(density):
        raise RegionError(f"density must be positive, got {density!r}")
    if mode not in ("auto", "filled", "curve", "boundary"):
        raise SampleModeError(f"unknown sampling mode {mode!r}")
    k = s.kind
    if k == EMPTY:
        return np.zeros(0, dtype=complex)

    if k in (UNION, ODD_UNION, EVEN_UNION):
        parts = [sample(m, density, mode) for m in s.pieces()]
        return np.concatenate(parts) if parts else np.zeros(0, dtype=complex)

    if k in (GAMMA, ARC, POINTS):
        if mode == "filled":
            raise SampleModeError(f"filled sampling undefined for zero-measure kind {k}")
        if k == POINTS:
            return s.n * np.exp(1j * np.asarray(s.angles, dtype=float))
        if k == ARC:
            return _arc_seg(float(s.n), s.phi_a, s.phi_b, density)
        segs = [_radial_seg(a, float(s.n), float(s.n + 1), density) for a in s.angles]
        return np.concatenate(segs)

    # area kinds
    if mode in ("boundary", "curve"):
        if k == DISK:
            return _ring(float(s.n), density) if s.n > 0 else np.zeros(0, dtype=complex)
        if k == SECTOR:
            return _sector_edges(s, density)
        if k == BAND:
            return np.concatenate([
                _arc_seg(s.r_lo, s.phi_a, s.phi_b, density),
                _arc_seg(s.r_hi, s.phi_a, s.phi_b, density),
                _radial_seg(s.phi_a, s.r_lo, s.r_hi, density),
                _radial_seg(s.phi_b, s.r_lo, s.r_hi, density),
            ])
        if k == LBLOCK:
            lo, hi = s.n + s.delta, float(s.n + 1)
            a, b = s.phi_a + s.delta, s.phi_b - s.delta
            return np.concatenate([
                _arc_seg(lo, a, b, density), _arc_seg(hi, a, b, density),
                _radial_seg(a, lo, hi, density), _radial_seg(b, lo, hi, density),
            ])
        # wblock boundary: the outer sector arc only survives on the two
        # collar windows; the notch contributes the L-facing edges
        lo, hi = s.n + s.delta, float(s.n + 1)
        a, b = s.phi_a + s.delta, s.phi_b - s.delta
        return np.concatenate([
            _arc_seg(float(s.n), s.phi_a, s.phi_b, density),
            _radial_seg(s.phi_a, float(s.n), hi, density),
            _radial_seg(s.phi_b, float(s.n), hi, density),
            _arc_seg(hi, s.phi_a, a, density),
            _arc_seg(hi, b, s.phi_b, density),
            _arc_seg(lo, a, b, density),
            _radial_seg(a, lo, hi, density),
            _radial_seg(b, lo, hi, density),
        ])

    # filled / auto
    if k == DISK:
        return _disk_fill(s.n, density)
    if k == SECTOR:
        return _polar_rect(float(s.n), float(s.n + 1), s.phi_a, s.phi_b, density)
    if k == BAND:
        return _polar_rect(s.r_lo, s.r_hi, s.phi_a, s.phi_b, density)
    if k == LBLOCK:
        return _polar_rect(s.n + s.delta, float(s.n + 1),
                           s.phi_a + s.delta, s.phi_b - s.delta, density)
    # wblock: inner strip plus the two side strips
    d = s.delta
    parts = [
        _polar_rect(float(s.n), s.n + d, s.phi_a, s.phi_b, density),
        _polar_rect(s.n + d, float(s.n + 1), s.phi_a, s.phi_a + d, density),
        _polar_rect(s.n + d, float(s.n + 1), s.phi_b - d, s.phi_b, density),
    ]
    return np.concatenate(parts)


# -- annulus decomposition ---------------------------------------------------

def decompose_annulus(n: int, phis, delta: float) -> dict[str, RegionSpec]:
    """All pieces of the band [n, n+1] induced by an angle array and collar width.

    Keys: D_odd, D_even, W_odd, W_even, L_odd, L_even, gamma, points_inner,
    points_outer, alpha_odd, alpha_even.
    """
    arr = tuple(float(a) for a in phis)
    validate_angle_array(arr)
    if not 0.0 < delta < max_refinement_width(arr):
        raise RegionError(
            f"collar width {delta!r} outside (0, {max_refinement_width(arr)!r})"
        )
    interior = arr[:-1]
    return {
        "D_odd": odd_union(SECTOR, n, arr),
        "D_even": even_union(SECTOR, n, arr),
        "W_odd": odd_union(WBLOCK, n, arr, delta=delta),
        "W_even": even_union(WBLOCK, n, arr, delta=delta),
        "L_odd": odd_union(LBLOCK, n, arr, delta=delta),
        "L_even": even_union(LBLOCK, n, arr, delta=delta),
        "gamma": gamma(n, interior),
        "points_inner": points(n, interior),
        "points_outer": points(n + 1, interior),
        "alpha_odd": odd_union(ARC, n, arr),
        "alpha_even": even_union(ARC, n, arr),
    }
