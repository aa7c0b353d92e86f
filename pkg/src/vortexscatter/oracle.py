"""Brute-force evaluation of the triple-twisted matrix element.

The three-dimensional momentum delta fixes the three azimuths (phi, phi1,
phi2) of the cone momenta. This module solves those constraints numerically
(multi-start Newton, finite-difference Jacobians) and sums the plane-wave
decomposition weights over the solutions with inverse-|Jacobian| factors:

    amplitude = sum_roots  a(kappa, m; phi) a*(kappa1, m1; phi1) a*(kappa2, m2; phi2)
                           * kappa kappa1 kappa2 * M0 / |det dF/d(phi, phi1, phi2)|

where the kappa_i product is the radial measure collected by the cone deltas.
None of the closed-form ingredients (phi*, triangle area, inner angles) are
reused here; that independence is the point.

Azimuth conventions: phi winds about +z (the initial beam direction), phi1
about +z' and phi2 about the second particle's own mean direction -z', all
measured from their frame's in-plane x axis. In the tilted frame the second
particle's azimuth is therefore -phi2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .amplitudes import AmplitudeModel, fourier_weight
from .errors import DegenerateJacobianError
from .kinematics import CollisionGeometry, TwistedState, tilt_frame
from .numerics import RootFindSpec, solve_system

_DEFAULT_PARAXIAL_FACTOR = 100.0


@dataclass(frozen=True)
class ConstraintSolution:
    """One solved azimuth triple with the |Jacobian determinant| of the raw
    (unnormalized) conservation residual."""

    phi: float
    phi1: float
    phi2: float
    jacobian_det: float


@dataclass(frozen=True)
class OracleResult:
    solutions: tuple[ConstraintSolution, ...]
    amplitude: complex
    normalization_tag: str


def _paraxial_scale(geom: CollisionGeometry, paraxial_scale: float | None) -> float:
    if paraxial_scale is not None:
        if paraxial_scale <= 0.0:
            raise ValueError("paraxial_scale must be positive")
        return paraxial_scale
    return _DEFAULT_PARAXIAL_FACTOR * max(geom.initial.kappa, geom.kappa1, geom.kappa2)


def _residual_kernel(
    geom: CollisionGeometry, paraxial_scale: float | None, axis_azimuth: float
):
    """Precompute frame data; return f(phi, phi1, phi2) -> residual (..., 3)."""
    kappa = geom.initial.kappa
    _paraxial_scale(geom, paraxial_scale)  # validates; the K halves cancel below
    ex, ey, ez = tilt_frame(geom.theta, axis_azimuth)
    ca, sa = math.cos(axis_azimuth), math.sin(axis_azimuth)
    gx = np.array([ca, sa, 0.0])  # initial azimuth is measured from global x
    gy = np.array([-sa, ca, 0.0])
    # k_{1z'} + k_{2z'} = (K + q)/2 - (K - q)/2 = q, evaluated in the
    # cancelled form so the root system is K-independent to the last bit
    offset = geom.q * ez

    def kernel(phi, phi1, phi2):
        phi = np.asarray(phi, dtype=float)
        phi1 = np.asarray(phi1, dtype=float)
        phi2 = np.asarray(phi2, dtype=float)
        c, s = np.cos(phi)[..., None], np.sin(phi)[..., None]
        c1, s1 = np.cos(phi1)[..., None], np.sin(phi1)[..., None]
        c2, s2 = np.cos(phi2)[..., None], np.sin(phi2)[..., None]
        initial = kappa * (c * gx + s * gy)  # k + p: the k_z parts cancel
        final1 = geom.kappa1 * (c1 * ex + s1 * ey)
        final2 = geom.kappa2 * (c2 * ex - s2 * ey)  # own-frame azimuth
        return initial - final1 - final2 - offset

    return kernel


def conservation_residual(
    geom: CollisionGeometry,
    phi,
    phi1,
    phi2,
    paraxial_scale: float | None = None,
    axis_azimuth: float = 0.0,
):
    """Components of k(phi) + p - k1(phi1) - k2(phi2).

    The plane wave is p = (0, 0, -k_z). Final longitudinal components along
    the tilted axis are k_{1z'} = (K + q)/2 and k_{2z'} = -(K - q)/2 with K
    the paraxial scale; only their sum q enters the residual, so the root
    system is exactly K-independent. Accepts scalars or equally shaped
    arrays; returns shape (..., 3).
    """
    kernel = _residual_kernel(geom, paraxial_scale, axis_azimuth)
    return kernel(
        np.asarray(phi, dtype=float),
        np.asarray(phi1, dtype=float),
        np.asarray(phi2, dtype=float),
    )


def oracle_amplitude(
    geom: CollisionGeometry,
    m: int,
    m1: int,
    m2: int,
    spec: RootFindSpec | None = None,
    paraxial_scale: float | None = None,
    axis_azimuth: float = 0.0,
    model: AmplitudeModel | None = None,
) -> OracleResult:
    """Sum the decomposition weights over all constraint solutions.

    Out-of-support geometries simply produce no roots and an amplitude of 0.
    A solution with singular Jacobian raises DegenerateJacobianError: the
    configuration sits too close to a support boundary for the inverse-
    Jacobian weight to mean anything.
    """
    spec = spec or RootFindSpec()
    model = model or AmplitudeModel()
    kappa = geom.initial.kappa
    kappa1, kappa2 = geom.kappa1, geom.kappa2
    big_k = _paraxial_scale(geom, paraxial_scale)
    kernel = _residual_kernel(geom, big_k, axis_azimuth)

    def residual(points: np.ndarray) -> np.ndarray:
        return kernel(points[..., 0], points[..., 1], points[..., 2]) / kappa

    roots, degenerate = solve_system(residual, spec)
    if degenerate:
        raise DegenerateJacobianError(
            f"{len(degenerate)} constraint solution(s) with singular Jacobian; "
            "configuration too close to the stripe boundary"
        )

    amplitude = 0j
    solutions = []
    for root in roots:
        phi, phi1, phi2 = (float(v) for v in root.angles)
        w0 = fourier_weight(kappa, m, kappa, phi).phase
        w1 = fourier_weight(kappa1, m1, kappa1, phi1).phase.conjugate()
        w2 = fourier_weight(kappa2, m2, kappa2, phi2).phase.conjugate()
        det_raw = root.jacobian_det * kappa**3  # undo the residual normalization
        amplitude += w0 * w1 * w2 * (kappa * kappa1 * kappa2) * model.m0 / det_raw
        solutions.append(ConstraintSolution(phi, phi1, phi2, det_raw))
    return OracleResult(
        solutions=tuple(solutions),
        amplitude=amplitude,
        normalization_tag=f"cone-weights*radial-measure;K={big_k:.6g}",
    )


def single_twisted_oracle(
    state: TwistedState,
    k1,
    k2,
    model: AmplitudeModel | None = None,
) -> complex:
    """Single-twisted element by the same delta reduction in two dimensions.

    The transverse delta pins the initial momentum to k1 + k2; the value is
    the decomposition weight there (over (2 pi)^2 from the measure), 0 off
    the cone. Matches the closed form on support and vanishes at k1 = -k2.
    """
    model = model or AmplitudeModel()
    k12 = np.asarray(k1, dtype=float) + np.asarray(k2, dtype=float)
    mod = float(np.hypot(k12[0], k12[1]))
    if abs(mod - state.kappa) > 1e-9 * max(state.kappa, 1.0):
        return 0j
    azimuth = float(np.arctan2(k12[1], k12[0]))
    weight = fourier_weight(state.kappa, state.m, mod, azimuth).phase
    return weight * model.m0 / (2.0 * math.pi) ** 2


def draw_support_samples(
    rng: np.random.Generator,
    count: int,
    theta: float = 0.2,
    kappa_range: tuple[float, float] = (0.6, 1.8),
    xi_margin: float = 0.9,
    area_margin: float = 0.05,
    helicity_max: int = 6,
    cos_floor: float = 0.1,
    k_z_factor: float = 40.0,
) -> list[tuple[CollisionGeometry, int, int, int]]:
    """Seeded in-support configurations for oracle/closed-form comparisons.

    Triangles are built from their inner angles (law of sines), so samples
    are in-stripe by construction, with |xi| < xi_margin * theta and triangle
    area > area_margin * kappa_tilde^2. Samples where either amplitude cosine
    falls below cos_floor are rejected: there the element vanishes and the
    ratio of the two evaluations degenerates to 0/0.
    """
    samples = []
    sin_t, tan_t = math.sin(theta), math.tan(theta)
    while len(samples) < count:
        kappa = rng.uniform(*kappa_range)
        xi = xi_margin * theta * rng.uniform(-1.0, 1.0)
        q = kappa * math.sin(xi)
        kt = kappa * math.cos(xi)
        d1 = rng.uniform(0.15, math.pi - 0.3)
        hi = math.pi - d1 - 0.15
        if hi <= 0.15:
            continue
        d2 = rng.uniform(0.15, hi)
        s12 = math.sin(d1 + d2)
        kappa1 = kt * math.sin(d2) / s12
        kappa2 = kt * math.sin(d1) / s12
        area = 0.5 * kt * kappa1 * math.sin(d1)
        if area <= area_margin * kt * kt:
            continue
        if not (0.05 * kt < kappa1 < 5.0 * kt and 0.05 * kt < kappa2 < 5.0 * kt):
            continue
        m, m1, m2 = (int(v) for v in rng.integers(-helicity_max, helicity_max + 1, 3))
        phi_star = math.acos(math.sin(xi) / sin_t)
        phi_tilde = math.acos(math.tan(xi) / tan_t)
        if abs(math.cos(m * phi_star - (m1 - m2) * phi_tilde)) < cos_floor:
            continue
        if abs(math.cos(m1 * d1 + m2 * d2)) < cos_floor:
            continue
        initial = TwistedState.massless(kappa, m, k_z_factor * kappa)
        geom = CollisionGeometry(theta=theta, q=q, initial=initial, kappa1=kappa1, kappa2=kappa2)
        samples.append((geom, m, m1, m2))
    return samples
