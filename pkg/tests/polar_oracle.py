"""Membership oracle written independently of the library internals.

Everything is phrased in rotated band coordinates (r, (phi - phi_a) mod tau)
instead of absolute angle intervals, so agreement with the package is a real
cross-check rather than shared arithmetic.
"""

from __future__ import annotations

import math

import numpy as np

TAU = 2.0 * math.pi
TOL = 1e-9


def _polar(zs):
    z = np.asarray(zs, dtype=complex).ravel()
    return np.abs(z), np.mod(np.arctan2(z.imag, z.real), TAU)


def _rel(phi, a):
    return np.mod(phi - a, TAU)


def _in_band(rel, width, tol=TOL):
    return (rel <= width + tol) | (rel >= TAU - tol)


def _near_any(phi, angles, tol=TOL):
    out = np.zeros(phi.shape, dtype=bool)
    for a in angles:
        d = np.abs(np.arctan2(np.sin(phi - a), np.cos(phi - a)))
        out |= d <= tol
    return out


def member(spec, zs) -> np.ndarray:
    """Boolean membership for one RegionSpec over an array of points."""
    r, phi = _polar(zs)
    return _member(spec, r, phi)


def _member(spec, r, phi) -> np.ndarray:
    k = spec.kind
    if k == "empty":
        return np.zeros(r.shape, dtype=bool)
    if k == "disk":
        if spec.n == 0:
            return np.zeros(r.shape, dtype=bool)
        return r <= spec.n + TOL
    if k == "gamma":
        return (r >= spec.n - TOL) & (r <= spec.n + 1 + TOL) & _near_any(phi, spec.angles)
    if k == "points":
        return (np.abs(r - spec.n) <= TOL) & _near_any(phi, spec.angles)
    if k == "sector":
        rel = _rel(phi, spec.phi_a)
        return (r >= spec.n - TOL) & (r <= spec.n + 1 + TOL) & _in_band(rel, spec.phi_b - spec.phi_a)
    if k == "arc":
        rel = _rel(phi, spec.phi_a)
        return (np.abs(r - spec.n) <= TOL) & _in_band(rel, spec.phi_b - spec.phi_a)
    if k == "lblock":
        rel = _rel(phi, spec.phi_a + spec.delta)
        w = (spec.phi_b - spec.delta) - (spec.phi_a + spec.delta)
        return (r >= spec.n + spec.delta - TOL) & (r <= spec.n + 1 + TOL) & _in_band(rel, w)
    if k == "wblock":
        rel = _rel(phi, spec.phi_a)
        w = spec.phi_b - spec.phi_a
        in_sector = (r >= spec.n - TOL) & (r <= spec.n + 1 + TOL) & _in_band(rel, w)
        near_inner = r <= spec.n + spec.delta + TOL
        near_a = _in_band(rel, spec.delta)
        near_b = (rel >= w - spec.delta - TOL) & (rel <= w + TOL)
        return in_sector & (near_inner | near_a | near_b)
    if k in ("odd_union", "even_union", "union"):
        out = np.zeros(r.shape, dtype=bool)
        for piece in spec.pieces():
            out |= _member(piece, r, phi)
        return out
    raise ValueError(f"oracle does not know kind {k!r}")
