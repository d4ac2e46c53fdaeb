"""Planar convex bodies via supporting functions and constant-angle tables.

A convex body is encoded by its supporting function h(phi), a trigonometric
polynomial in the outward-normal angle phi.  The curvature radius is
rho = h'' + h; strict convexity means rho > 0 everywhere.  Tables whose
curvature radius is a0 + an*cos(n*phi), with the angle delta solving
tan(n*delta) = n*tan(delta), admit a constant-angle invariant curve.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidHarmonic, NonClosedCurve, NonConvex

CONVEXITY_GRID = 4096
CLOSURE_TOL = 1e-12
ROOT_TOL = 1e-12


@dataclass(frozen=True)
class TrigPolynomial:
    """Finite Fourier series c + sum_k (a_k cos k*phi + b_k sin k*phi)."""

    constant: float = 0.0
    cos_coeffs: np.ndarray = field(default_factory=lambda: np.zeros(0))
    sin_coeffs: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.cos_coeffs, dtype=float))
        b = np.atleast_1d(np.asarray(self.sin_coeffs, dtype=float))
        n = max(a.size, b.size)
        a = np.concatenate([a, np.zeros(n - a.size)])
        b = np.concatenate([b, np.zeros(n - b.size)])
        object.__setattr__(self, "cos_coeffs", a)
        object.__setattr__(self, "sin_coeffs", b)

    @property
    def degree(self) -> int:
        nz = np.nonzero((self.cos_coeffs != 0) | (self.sin_coeffs != 0))[0]
        return int(nz[-1]) + 1 if nz.size else 0

    def __call__(self, phi):
        phi = np.asarray(phi, dtype=float)
        k = np.arange(1, self.cos_coeffs.size + 1)
        kphi = np.multiply.outer(phi, k)
        return (self.constant
                + np.cos(kphi) @ self.cos_coeffs
                + np.sin(kphi) @ self.sin_coeffs)

    def derivative(self) -> "TrigPolynomial":
        k = np.arange(1, self.cos_coeffs.size + 1)
        return TrigPolynomial(0.0, k * self.sin_coeffs, -k * self.cos_coeffs)

    def harmonic(self, k: int) -> tuple[float, float]:
        """(cos, sin) coefficients at harmonic k (0 -> constant)."""
        if k == 0:
            return self.constant, 0.0
        if k > self.cos_coeffs.size:
            return 0.0, 0.0
        return float(self.cos_coeffs[k - 1]), float(self.sin_coeffs[k - 1])


@dataclass(frozen=True)
class SupportCurve:
    """Planar convex body given by its supporting function h."""

    h: TrigPolynomial
    rho_min: float = field(init=False)

    def __post_init__(self):
        grid = np.linspace(0.0, 2 * np.pi, CONVEXITY_GRID, endpoint=False)
        rho = self.h.derivative().derivative()(grid) + self.h(grid)
        object.__setattr__(self, "rho_min", float(rho.min()))

    @property
    def is_convex(self) -> bool:
        return self.rho_min > 1e-9


@dataclass(frozen=True)
class GutkinTable:
    """Constant-angle table with rho = a0 + an*cos(n*phi)."""

    curve: SupportCurve
    n: int
    delta: float
    a0: float
    an: float


def circle(radius: float = 1.0) -> SupportCurve:
    return SupportCurve(TrigPolynomial(radius))


def eval_support(curve: SupportCurve, phi) -> tuple:
    """(h, h', h'') at phi, by exact term-wise differentiation."""
    h = curve.h
    hp = h.derivative()
    return h(phi), hp(phi), hp.derivative()(phi)


def curvature_radius(curve: SupportCurve, phi):
    h, _, hpp = eval_support(curve, phi)
    return hpp + h


def boundary_point(curve: SupportCurve, phi):
    """Boundary point whose outward normal has angle phi: x = h*e + h'*e_perp."""
    h, hp, _ = eval_support(curve, phi)
    c, s = np.cos(phi), np.sin(phi)
    return np.stack([h * c - hp * s, h * s + hp * c], axis=-1)


def support_from_radius(rho: TrigPolynomial) -> SupportCurve:
    """Invert h'' + h = rho harmonic by harmonic: h_k = rho_k / (1 - k^2).

    The first harmonic of rho must vanish (closure of the boundary); the
    first harmonic of h is set to zero, pinning the Steiner point at the
    origin.
    """
    a1, b1 = rho.harmonic(1)
    if abs(a1) > CLOSURE_TOL or abs(b1) > CLOSURE_TOL:
        raise NonClosedCurve(
            f"first harmonic of curvature radius is ({a1:g}, {b1:g})")
    k = np.arange(1, rho.cos_coeffs.size + 1)
    denom = 1.0 - k.astype(float) ** 2
    denom[k == 1] = 1.0
    factor = 1.0 / denom
    factor[k == 1] = 0.0  # Steiner normalization
    h = TrigPolynomial(rho.constant, factor * rho.cos_coeffs,
                       factor * rho.sin_coeffs)
    curve = SupportCurve(h)
    if curve.rho_min <= 0:
        raise NonConvex(f"min curvature radius {curve.rho_min:g} <= 0")
    return curve


def _gutkin_equation(delta: float, n: int) -> float:
    return math.tan(n * delta) - n * math.tan(delta)


def solve_gutkin_angles(n: int) -> list[float]:
    """All nonzero roots of tan(n*delta) = n*tan(delta) in (0, pi/2).

    In t = tan(delta) the equation becomes a polynomial (numerator of
    tan(n*delta) minus n*t times its denominator) with a trivial t^3
    factor; the remaining positive roots are polished by Newton on the
    transcendental form.
    """
    if not isinstance(n, (int, np.integer)) or n < 4:
        raise InvalidHarmonic(f"need integer n >= 4, got {n!r}")
    # tan(n d) = P(t)/Q(t) from Im/Re of (1 + i t)^n.
    P = np.zeros(n + 1)
    Q = np.zeros(n + 1)
    for j in range(n + 1):
        c = math.comb(n, j)
        if j % 2 == 0:
            Q[j] = c * (-1) ** (j // 2)
        else:
            P[j] = c * (-1) ** ((j - 1) // 2)
    # P(t) - n t Q(t), coefficients by ascending power; strip the t^3 factor.
    poly = np.zeros(n + 2)
    poly[: n + 1] += P
    poly[1:] -= n * Q
    assert np.allclose(poly[:3], 0.0)
    reduced = poly[3:]
    roots = np.roots(reduced[::-1])
    ts = sorted(float(r.real) for r in roots
                if abs(r.imag) < 1e-9 and r.real > 1e-9)
    out = []
    for t in ts:
        delta = math.atan(t)
        for _ in range(60):
            f = _gutkin_equation(delta, n)
            df = n / math.cos(n * delta) ** 2 - n / math.cos(delta) ** 2
            step = f / df
            delta -= step
            if abs(step) < ROOT_TOL / 10:
                break
        if 0.0 < delta < math.pi / 2 and abs(_gutkin_equation(delta, n)) < 1e-10:
            out.append(delta)
    out = sorted(out)
    expected = n // 2 - 1
    if len(out) != expected:
        warnings.warn(
            f"n={n}: found {len(out)} roots, expected floor(n/2)-1 = {expected}",
            stacklevel=2)
    return out


def build_gutkin_table(n: int, root_index: int, a0: float, an: float) -> GutkinTable:
    """Table with curvature radius a0 + an*cos(n*phi) at the chosen root."""
    if not (a0 > abs(an) > 0):
        raise NonConvex(f"need a0 > |an| > 0, got a0={a0}, an={an}")
    roots = solve_gutkin_angles(n)
    if not 0 <= root_index < len(roots):
        raise IndexError(f"root_index {root_index} out of range for n={n} "
                         f"({len(roots)} roots)")
    cos_coeffs = np.zeros(n)
    cos_coeffs[n - 1] = an
    curve = support_from_radius(TrigPolynomial(a0, cos_coeffs, np.zeros(n)))
    return GutkinTable(curve=curve, n=n, delta=roots[root_index], a0=a0, an=an)


def check_constant_width(curve: SupportCurve, tol: float = 1e-12):
    """Is h(phi) + h(phi+pi) constant?  Returns (is_constant, mean width)."""
    grid = np.linspace(0.0, 2 * np.pi, CONVEXITY_GRID, endpoint=False)
    width = curve.h(grid) + curve.h(grid + np.pi)
    mean = float(width.mean())
    return bool(np.max(np.abs(width - mean)) < tol), mean


# --- table JSON interchange ---------------------------------------------


def table_to_dict(curve: SupportCurve, gutkin: GutkinTable | None = None) -> dict:
    h = curve.h
    harmonics = [
        {"k": k, "cos": float(h.cos_coeffs[k - 1]), "sin": float(h.sin_coeffs[k - 1])}
        for k in range(1, h.cos_coeffs.size + 1)
        if h.cos_coeffs[k - 1] != 0.0 or h.sin_coeffs[k - 1] != 0.0
    ]
    doc = {"a0": float(h.constant), "harmonics": harmonics, "gutkin": None}
    if gutkin is not None:
        doc["gutkin"] = {"n": int(gutkin.n), "delta": float(gutkin.delta)}
    return doc


def table_from_dict(doc: dict) -> tuple[SupportCurve, dict | None]:
    harmonics = doc.get("harmonics", [])
    deg = max((int(e["k"]) for e in harmonics), default=0)
    a = np.zeros(deg)
    b = np.zeros(deg)
    for e in harmonics:
        a[int(e["k"]) - 1] = float(e.get("cos", 0.0))
        b[int(e["k"]) - 1] = float(e.get("sin", 0.0))
    return SupportCurve(TrigPolynomial(float(doc["a0"]), a, b)), doc.get("gutkin")


def save_table(path, curve: SupportCurve, gutkin: GutkinTable | None = None):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(table_to_dict(curve, gutkin), f, indent=2)
        f.write("\n")


def load_table(path) -> tuple[SupportCurve, dict | None]:
    with open(path, encoding="utf-8") as f:
        return table_from_dict(json.load(f))
