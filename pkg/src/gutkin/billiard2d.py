"""Planar Birkhoff billiard map in oriented-line coordinates (p, phi).

A line is stored as its normal angle phi and signed distance p; it meets
the table iff -h(phi+pi) < p < h(phi).  The map is implemented twice:
geometrically (locate the chord, reflect across the tangent) and
variationally through the generating function

    S(phi1, phi2) = 2 h((phi1+phi2)/2) sin((phi2-phi1)/2),

whose mixed derivative S12 = rho(mid)*sin(alpha)/2 > 0 is the twist.
The strip functional integral of (S11+2*S12+S22) against the invariant
measure S12 dphi1 dphi2 collapses, after reduction, to a weighted sum of
squares of Fourier coefficients of h; both routes are provided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (ConvergenceFailure, DegenerateChord, NoIntersection,
                     TangentLine)
from .support_geometry import GutkinTable, SupportCurve, boundary_point, eval_support

TWO_PI = 2 * math.pi
BRACKETS = 64
PSI_TOL = 1e-13
MIN_CHORD_ANGLE = 1e-6


@dataclass(frozen=True)
class OrientedLine2D:
    p: float
    phi: float

    def __post_init__(self):
        object.__setattr__(self, "phi", float(self.phi) % TWO_PI)
        object.__setattr__(self, "p", float(self.p))


@dataclass(frozen=True)
class ChordData:
    line: OrientedLine2D
    psi_back: float
    psi_fwd: float
    angle_back: float
    angle_fwd: float


@dataclass(frozen=True)
class Strip:
    """Angle strip 0 < delta1 < delta2 <= pi/2 on the phase cylinder."""

    delta1: float
    delta2: float

    def __post_init__(self):
        if not 0 < self.delta1 < self.delta2 <= math.pi / 2 + 1e-15:
            raise ValueError(f"need 0 < delta1 < delta2 <= pi/2, "
                             f"got ({self.delta1}, {self.delta2})")


def _direction(phi: float) -> np.ndarray:
    # travel direction: normal angle rotated by +pi/2 (counterclockwise
    # circulation; on the circle the map is phi -> phi + 2*delta)
    return np.array([-math.sin(phi), math.cos(phi)])


def _normal(phi: float) -> np.ndarray:
    return np.array([math.cos(phi), math.sin(phi)])


def line_intersects(curve: SupportCurve, line: OrientedLine2D) -> bool:
    return (line.p < curve.h(line.phi)
            and line.p > -curve.h(line.phi + math.pi))


def generating_value(curve: SupportCurve, phi1: float, phi2: float) -> float:
    d = phi2 - phi1
    if not 0.0 < d < TWO_PI:
        raise DegenerateChord(f"phi2 - phi1 = {d:g} outside (0, 2*pi)")
    return 2.0 * float(curve.h(0.5 * (phi1 + phi2))) * math.sin(0.5 * d)


def generating_second_derivs(curve: SupportCurve, phi1: float, phi2: float):
    d = phi2 - phi1
    if not 0.0 < d < TWO_PI:
        raise DegenerateChord(f"phi2 - phi1 = {d:g} outside (0, 2*pi)")
    mid, alpha = 0.5 * (phi1 + phi2), 0.5 * d
    h, hp, hpp = eval_support(curve, mid)
    sa, ca = math.sin(alpha), math.cos(alpha)
    s11 = 0.5 * (hpp - h) * sa - hp * ca
    s22 = 0.5 * (hpp - h) * sa + hp * ca
    s12 = 0.5 * (hpp + h) * sa
    return float(s11), float(s12), float(s22)


def _boundary_intersections(curve: SupportCurve, line: OrientedLine2D):
    """Gauss parameters of the two intersections of the line with the boundary.

    f(psi) = <x(psi), e_phi> - p has exactly two sign changes on a strictly
    convex boundary; each is bracketed on a uniform grid and bisected.
    """
    e = _normal(line.phi)
    psi_grid = np.linspace(0.0, TWO_PI, BRACKETS, endpoint=False)
    f = boundary_point(curve, psi_grid) @ e - line.p
    # exact zeros count as positive so a grid point on the boundary chord
    # endpoint yields exactly one flip, not two
    pos = f >= 0
    flips = np.nonzero(pos != np.roll(pos, -1))[0]
    if flips.size < 2:
        if not line_intersects(curve, line):
            raise NoIntersection(f"line (p={line.p:g}, phi={line.phi:g}) "
                                 "misses the table")
        raise TangentLine("chord degenerates to a tangency")
    roots = []
    step = TWO_PI / BRACKETS
    for i in flips[:2]:
        lo, hi = psi_grid[i], psi_grid[i] + step
        pos_lo = bool(pos[i])
        while hi - lo > PSI_TOL:
            mid = 0.5 * (lo + hi)
            fm = float(boundary_point(curve, mid) @ e) - line.p
            if (fm >= 0) == pos_lo:
                lo = mid
            else:
                hi = mid
        roots.append(0.5 * (lo + hi))
    return roots


def chord_incidence_angles(curve: SupportCurve, line: OrientedLine2D) -> ChordData:
    """Locate the chord of a line and its incidence angles at both endpoints."""
    r1, r2 = _boundary_intersections(curve, line)
    x1 = boundary_point(curve, r1)
    x2 = boundary_point(curve, r2)
    d = _direction(line.phi)
    if (x2 - x1) @ d < 0:
        r1, r2 = r2, r1
        x1, x2 = x2, x1
    chord = x2 - x1
    ln = np.linalg.norm(chord)
    if ln < 1e-12:
        raise TangentLine("zero-length chord")
    u = chord / ln
    ang_back = math.asin(min(1.0, abs(float(u @ _normal(r1)))))
    ang_fwd = math.asin(min(1.0, abs(float(u @ _normal(r2)))))
    if min(ang_back, ang_fwd) < MIN_CHORD_ANGLE:
        raise TangentLine("near-tangent chord")
    return ChordData(line=line, psi_back=float(r1), psi_fwd=float(r2),
                     angle_back=ang_back, angle_fwd=ang_fwd)


def reflect_geometric(curve: SupportCurve, line: OrientedLine2D):
    """One bounce by direct ray reflection; returns (next line, chord data)."""
    chord = chord_incidence_angles(curve, line)
    x2 = boundary_point(curve, chord.psi_fwd)
    nu = _normal(chord.psi_fwd)
    d = _direction(line.phi)
    d2 = d - 2.0 * float(d @ nu) * nu
    # normal angle of the outgoing line: direction rotated by -pi/2
    phi2 = math.atan2(-d2[0], d2[1]) % TWO_PI
    p2 = float(x2 @ _normal(phi2))
    return OrientedLine2D(p2, phi2), chord


def reflect_variational(curve: SupportCurve, line: OrientedLine2D) -> OrientedLine2D:
    """One bounce by solving p1 = -dS/dphi1 for phi2; twist makes it unique."""
    if not line_intersects(curve, line):
        raise NoIntersection(f"line (p={line.p:g}, phi={line.phi:g}) "
                             "misses the table")
    phi1, p1 = line.phi, line.p

    def residual(phi2):
        mid, alpha = 0.5 * (phi1 + phi2), 0.5 * (phi2 - phi1)
        h, hp, _ = eval_support(curve, mid)
        return float(h) * math.cos(alpha) - float(hp) * math.sin(alpha) - p1

    lo, hi = phi1 + 1e-12, phi1 + TWO_PI - 1e-12
    flo = residual(lo)
    if flo < 0 or residual(hi) > 0:
        raise ConvergenceFailure("monotone residual lost its bracket")
    # bisect to a safe neighborhood, then Newton (d residual/d phi2 = -S12)
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        if residual(mid) > 0:
            lo = mid
        else:
            hi = mid
    phi2 = 0.5 * (lo + hi)
    for _ in range(50):
        s11, s12, s22 = generating_second_derivs(curve, phi1, phi2)
        step = residual(phi2) / s12
        phi2 += step
        if abs(step) < 1e-14:
            break
    else:
        raise ConvergenceFailure("Newton refinement did not converge")
    mid, alpha = 0.5 * (phi1 + phi2), 0.5 * (phi2 - phi1)
    h, hp, _ = eval_support(curve, mid)
    p2 = float(h) * math.cos(alpha) + float(hp) * math.sin(alpha)
    return OrientedLine2D(p2, phi2)


def constant_angle_line(curve: SupportCurve, delta: float, psi: float) -> OrientedLine2D:
    """Line leaving the boundary point x(psi) at angle delta with the tangent."""
    h, hp, _ = eval_support(curve, psi)
    return OrientedLine2D(float(h) * math.cos(delta) + float(hp) * math.sin(delta),
                          psi + delta)


def verify_constant_angle(table_or_curve, delta: float, grid_size: int = 360) -> float:
    """Max |arrival angle - delta| over a grid of constant-angle departures."""
    if grid_size < 8:
        raise ValueError("grid_size must be >= 8")
    curve = (table_or_curve.curve if isinstance(table_or_curve, GutkinTable)
             else table_or_curve)
    worst = 0.0
    for psi in np.linspace(0.0, TWO_PI, grid_size, endpoint=False):
        chord = chord_incidence_angles(curve, constant_angle_line(curve, delta, psi))
        worst = max(worst, abs(chord.angle_fwd - delta))
    return worst


def orbit(curve: SupportCurve, line0: OrientedLine2D, steps: int):
    """Iterate the geometric map; returns (lines, chords) with len(lines) = steps+1."""
    lines = [line0]
    chords = []
    for _ in range(steps):
        nxt, chord = reflect_geometric(curve, lines[-1])
        lines.append(nxt)
        chords.append(chord)
    return lines, chords


def rigidity_integral(curve: SupportCurve, strip: Strip, quad_order: int = 32,
                      phi_points: int = 512) -> float:
    """Strip integral of (S11+2*S12+S22)*S12 in (phi, alpha) variables.

    The (phi1, phi2) -> (phi, alpha) change of variables carries Jacobian 2;
    the integrand reduces to 2*h''*(h''+h)*sin^2(alpha).  Gauss-Legendre in
    alpha, periodic trapezoid in phi (spectrally accurate).
    """
    if quad_order < 8:
        raise ValueError("quad_order must be >= 8")
    nodes, weights = np.polynomial.legendre.leggauss(quad_order)
    a = 0.5 * (strip.delta2 - strip.delta1) * nodes + 0.5 * (strip.delta1 + strip.delta2)
    wa = 0.5 * (strip.delta2 - strip.delta1) * weights
    phi = np.linspace(0.0, TWO_PI, phi_points, endpoint=False)
    h, _, hpp = eval_support(curve, phi)
    phi_part = float(np.sum(hpp * (hpp + h))) * (TWO_PI / phi_points)
    alpha_part = float(np.sum(np.sin(a) ** 2 * wa))
    return 2.0 * alpha_part * phi_part


def rigidity_integral_closed(curve: SupportCurve, strip: Strip) -> float:
    """Closed form: 2*int sin^2 da * pi*sum k^2(k^2-1)(a_k^2+b_k^2)."""
    def F(x):
        return 0.5 * (x - math.sin(x) * math.cos(x))

    k = np.arange(1, curve.h.cos_coeffs.size + 1, dtype=float)
    coeff_sum = float(np.sum(k ** 2 * (k ** 2 - 1)
                             * (curve.h.cos_coeffs ** 2 + curve.h.sin_coeffs ** 2)))
    return 2.0 * (F(strip.delta2) - F(strip.delta1)) * math.pi * coeff_sum
