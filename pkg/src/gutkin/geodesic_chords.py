"""Geodesics on convex surfaces in R^3 and the constant-angle chord curve.

A geodesic gamma(s) is integrated on an implicit surface F = 0 (F < 0
inside) with RK4 plus per-step projection.  Its Frenet data (k, tau,
frames v, n, w = v x n) feed the chord construction

    Gamma(s) = gamma(s) + l(s) z(s),   z = cos(delta) v + sin(delta) n,

with n the inner surface normal, and the identity checks on |Gamma'|^2,
<Gamma', z>, the constant-angle balance, and the planarity determinant
det[z, Gamma', Gamma''] together with its frame-coordinate expansion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DegenerateCurvature, NoExit, OffSurface, StepTooLarge

DRIFT_LIMIT = 1e-6


@dataclass(frozen=True)
class ImplicitSurface:
    """Surface F = 0 with F < 0 inside; gradient and Hessian evaluators."""

    F: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    hess: Callable[[np.ndarray], np.ndarray]
    ray_far_intersection: Callable[[np.ndarray, np.ndarray], float] | None = None
    diameter: float = 2.0

    def inner_normal(self, x: np.ndarray) -> np.ndarray:
        g = self.grad(x)
        return -g / np.linalg.norm(g)


def sphere_surface(radius: float = 1.0) -> ImplicitSurface:
    R2 = radius * radius

    def far_t(x, z):
        # |x + t z|^2 = R^2 with |x| = R, |z| = 1: t = -2 <x, z>
        return -2.0 * float(x @ z)

    return ImplicitSurface(
        F=lambda x: float(x @ x) - R2,
        grad=lambda x: 2.0 * x,
        hess=lambda x: 2.0 * np.eye(3),
        ray_far_intersection=far_t,
        diameter=2.0 * radius,
    )


def ellipsoid_surface(semi_axes_sq) -> ImplicitSurface:
    """Ellipsoid <A^-1 x, x> = 1 with A = diag(semi_axes_sq) or a full SPD matrix."""
    A = np.asarray(semi_axes_sq, dtype=float)
    A = np.diag(A) if A.ndim == 1 else A
    Ainv = np.linalg.inv(A)

    def far_t(x, z):
        # on-surface ray: t (2 <Ainv x, z> + t <Ainv z, z>) = 0
        return -2.0 * float(x @ Ainv @ z) / float(z @ Ainv @ z)

    return ImplicitSurface(
        F=lambda x: float(x @ Ainv @ x) - 1.0,
        grad=lambda x: 2.0 * Ainv @ x,
        hess=lambda x: 2.0 * Ainv,
        ray_far_intersection=far_t,
        diameter=2.0 * math.sqrt(float(np.max(np.linalg.eigvalsh(A)))),
    )


@dataclass(frozen=True)
class GeodesicTrajectory:
    """Arc-length samples (x, v, x_ddot) of a geodesic, uniform step."""

    s: np.ndarray
    x: np.ndarray
    v: np.ndarray
    x_ddot: np.ndarray
    step: float


@dataclass(frozen=True)
class FrenetData:
    k: np.ndarray
    tau: np.ndarray
    v: np.ndarray
    n: np.ndarray
    w: np.ndarray


@dataclass(frozen=True)
class ChordCorrespondence:
    Gamma: np.ndarray
    l: np.ndarray
    z: np.ndarray
    Gamma_dot: np.ndarray
    Gamma_ddot: np.ndarray
    delta: float
    step: float


def _accel(surface: ImplicitSurface, x: np.ndarray, v: np.ndarray) -> np.ndarray:
    g = surface.grad(x)
    lam = -float(v @ surface.hess(x) @ v) / float(g @ g)
    return lam * g


def _project(surface: ImplicitSurface, x: np.ndarray, v: np.ndarray):
    # one Newton step along the gradient, then re-tangent and renormalize v
    g = surface.grad(x)
    x = x - surface.F(x) / float(g @ g) * g
    g = surface.grad(x)
    v = v - float(v @ g) / float(g @ g) * g
    return x, v / np.linalg.norm(v)


def integrate_geodesic(surface: ImplicitSurface, x0, v0, length: float,
                       step: float, project: bool = True) -> GeodesicTrajectory:
    """RK4 integration of x'' = -(<v, Hess F v>/|grad F|^2) grad F.

    The actual step is length/round(length/step) so the final sample lands
    exactly at s = length.
    """
    x = np.asarray(x0, dtype=float)
    v = np.asarray(v0, dtype=float)
    if abs(surface.F(x)) > 1e-10:
        raise OffSurface(f"F(x0) = {surface.F(x):g}")
    g = surface.grad(x)
    if abs(float(v @ g)) / np.linalg.norm(g) > 1e-10:
        raise OffSurface("v0 is not tangent to the surface")
    v = v / np.linalg.norm(v)

    n_steps = max(1, round(length / step))
    h = length / n_steps
    xs = np.empty((n_steps + 1, 3))
    vs = np.empty((n_steps + 1, 3))
    accs = np.empty((n_steps + 1, 3))
    xs[0], vs[0] = x, v
    accs[0] = _accel(surface, x, v)
    for i in range(n_steps):
        k1x, k1v = v, _accel(surface, x, v)
        k2x, k2v = v + 0.5 * h * k1v, _accel(surface, x + 0.5 * h * k1x, v + 0.5 * h * k1v)
        k3x, k3v = v + 0.5 * h * k2v, _accel(surface, x + 0.5 * h * k2x, v + 0.5 * h * k2v)
        k4x, k4v = v + h * k3v, _accel(surface, x + h * k3x, v + h * k3v)
        x = x + h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
        v = v + h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
        if project:
            x, v = _project(surface, x, v)
        drift = max(abs(surface.F(x)), abs(np.linalg.norm(v) - 1.0))
        if drift > DRIFT_LIMIT:
            raise StepTooLarge(f"constraint drift {drift:g} at step {i}")
        xs[i + 1], vs[i + 1] = x, v
        accs[i + 1] = _accel(surface, x, v)
    return GeodesicTrajectory(s=np.arange(n_steps + 1) * h, x=xs, v=vs,
                              x_ddot=accs, step=h)


def deriv_samples(y: np.ndarray, h: float) -> np.ndarray:
    """4th-order first derivative on a uniform grid (one-sided at the edges)."""
    y = np.asarray(y, dtype=float)
    out = np.empty_like(y)
    out[2:-2] = (y[:-4] - 8 * y[1:-3] + 8 * y[3:-1] - y[4:]) / (12 * h)
    first = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / (12 * h)
    second = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / (12 * h)
    out[0] = np.tensordot(first, y[:5], axes=(0, 0))
    out[1] = np.tensordot(second, y[:5], axes=(0, 0))
    out[-1] = -np.tensordot(first, y[::-1][:5], axes=(0, 0))
    out[-2] = -np.tensordot(second, y[::-1][:5], axes=(0, 0))
    return out


def frenet_apparatus(traj: GeodesicTrajectory) -> FrenetData:
    """Curvature, torsion and (v, n, w) frames from sampled accelerations."""
    if traj.s.size < 5:
        raise ValueError("need at least 5 samples")
    k = np.linalg.norm(traj.x_ddot, axis=1)
    if k.min() < 1e-8:
        raise DegenerateCurvature(f"min curvature {k.min():g}")
    n = traj.x_ddot / k[:, None]
    w = np.cross(traj.v, n)
    n_dot = deriv_samples(n, traj.step)
    tau = np.einsum("ij,ij->i", n_dot, w)
    return FrenetData(k=k, tau=tau, v=traj.v, n=n, w=w)


def chord_correspondence(surface: ImplicitSurface, traj: GeodesicTrajectory,
                         delta: float) -> ChordCorrespondence:
    """Far endpoint of the ray at angle delta below the tangent, per sample."""
    if not 0.0 < delta <= math.pi / 2:
        raise ValueError("delta must be in (0, pi/2]")
    m = traj.s.size
    z = np.empty((m, 3))
    l = np.empty(m)
    Gamma = np.empty((m, 3))
    for i in range(m):
        zi = math.cos(delta) * traj.v[i] + math.sin(delta) * surface.inner_normal(traj.x[i])
        zi /= np.linalg.norm(zi)
        if surface.ray_far_intersection is not None:
            t = surface.ray_far_intersection(traj.x[i], zi)
        else:
            t = _bisect_exit(surface, traj.x[i], zi)
        if t <= 1e-12:
            raise NoExit(f"ray at sample {i} does not re-enter the surface")
        z[i] = zi
        l[i] = t
        Gamma[i] = traj.x[i] + t * zi
    Gamma_dot = deriv_samples(Gamma, traj.step)
    Gamma_ddot = deriv_samples(Gamma_dot, traj.step)
    return ChordCorrespondence(Gamma=Gamma, l=l, z=z, Gamma_dot=Gamma_dot,
                               Gamma_ddot=Gamma_ddot, delta=delta, step=traj.step)


def _bisect_exit(surface: ImplicitSurface, x: np.ndarray, z: np.ndarray) -> float:
    # generic fallback: march until F changes sign, then bisect
    t0, t1 = 1e-9, surface.diameter * 1.5
    f1 = surface.F(x + t1 * z)
    while f1 < 0:
        t1 *= 2.0
        if t1 > 1e6:
            raise NoExit("ray never leaves the body")
        f1 = surface.F(x + t1 * z)
    for _ in range(80):
        tm = 0.5 * (t0 + t1)
        if surface.F(x + tm * z) < 0:
            t0 = tm
        else:
            t1 = tm
    return 0.5 * (t0 + t1)


def angle_condition_residuals(cc: ChordCorrespondence, frenet: FrenetData,
                              delta: float):
    """Residual series of the speed, projection and angle-balance identities.

    R5: |Gamma'|^2 = (l'+cos d)^2 + (kl-sin d)^2 + tau^2 l^2 sin^2 d
    R6: <Gamma', z> = l' + cos d
    R9: l' + cos d = (cos d/sin d) sqrt((kl-sin d)^2 + tau^2 l^2 sin^2 d)
    """
    sd, cd = math.sin(delta), math.cos(delta)
    l_dot = deriv_samples(cc.l, cc.step)
    kl = frenet.k * cc.l
    aux = (kl - sd) ** 2 + frenet.tau ** 2 * cc.l ** 2 * sd ** 2
    speed2 = np.einsum("ij,ij->i", cc.Gamma_dot, cc.Gamma_dot)
    r5 = np.abs(speed2 - ((l_dot + cd) ** 2 + aux))
    r6 = np.abs(np.einsum("ij,ij->i", cc.Gamma_dot, cc.z) - (l_dot + cd))
    r9 = np.abs((l_dot + cd) - (cd / sd) * np.sqrt(aux))
    return r5, r6, r9


def planarity_residuals(cc: ChordCorrespondence, frenet: FrenetData,
                        delta: float):
    """det[z, Gamma', Gamma''] two ways, plus the torsion-rate coefficient.

    D_numeric uses the ambient R^3 coordinates; D_analytic expands the same
    rows in the (v, n, w) frame with the chain-rule coefficients of Gamma''
    (the frame is right-handed, so the two determinants agree exactly in
    exact arithmetic).  A_coeff = l sin(delta) (kl - sin(delta)) multiplies
    tau' in the expansion of D.
    """
    sd, cd = math.sin(delta), math.cos(delta)
    h = cc.step
    l, k, tau = cc.l, frenet.k, frenet.tau
    l_dot = deriv_samples(l, h)
    l_ddot = deriv_samples(l_dot, h)
    k_dot = deriv_samples(k, h)
    tau_dot = deriv_samples(tau, h)

    m = l.size
    D_num = np.empty(m)
    for i in range(m):
        D_num[i] = np.linalg.det(np.array([cc.z[i], cc.Gamma_dot[i], cc.Gamma_ddot[i]]))

    c1 = 1.0 + l_dot * cd - k * l * sd
    c2 = l_dot * sd + k * l * cd
    c3 = tau * l * sd
    a1 = l_ddot * cd - k_dot * l * sd - 2.0 * k * l_dot * sd - k ** 2 * l * cd
    a2 = l_ddot * sd + k_dot * l * cd + 2.0 * k * l_dot * cd + k \
        - (k ** 2 + tau ** 2) * l * sd
    a3 = tau_dot * l * sd + 2.0 * tau * l_dot * sd + tau * k * l * cd
    D_ana = np.empty(m)
    for i in range(m):
        D_ana[i] = np.linalg.det(np.array([
            [cd, sd, 0.0],
            [c1[i], c2[i], c3[i]],
            [a1[i], a2[i], a3[i]],
        ]))
    A_coeff = l * sd * (k * l - sd)
    return D_num, D_ana, A_coeff


def simultaneous_vanish_check(cc: ChordCorrespondence, frenet: FrenetData,
                              delta: float, trim: int = 2) -> float:
    """min over s of (kl - sin(delta))^2 + tau^2; positive for valid tables."""
    sl = slice(trim, -trim if trim else None)
    vals = (frenet.k[sl] * cc.l[sl] - math.sin(delta)) ** 2 + frenet.tau[sl] ** 2
    return float(vals.min())
