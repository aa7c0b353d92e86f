"""Closed-form scattering matrix elements for twisted states.

The dynamical amplitude is treated as a constant M0 (paraxial approximation:
it varies slowly over the momentum cones and is taken at the mean momenta),
so everything below is pure kinematics of the momentum deltas.

Single-twisted element (initial beam twisted, both finals projected on plane
waves), with k12 = k1_perp + k2_perp:

    S ~ (-i)^m e^{i m phi12} delta(kappa - k12) M0 / ((2 pi)^{3/2} sqrt(kappa))

Triple-twisted reduced element (both finals twisted, azimuths measured about
each particle's own mean propagation direction from the shared x' axis), with
the overall factor i delta(E_f - E_i) / sqrt(2 pi) dropped by convention:

    S~ = i^{m1+m2-m} (2/Delta) sqrt(kappa1 kappa2 / kappa)
         cos[m phi* - (m1 - m2) phi~*] cos[m1 delta1 + m2 delta2]
         / sqrt(sin^2 theta - sin^2 xi) * M0

supported on |xi| < theta and on the open stripe
|kappa1 - kappa2| < kappa cos(xi) < kappa1 + kappa2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import DegenerateSupportError, SupportRegionError
from .kinematics import (
    STRIPE_DEGENERACY_FLOOR,
    CollisionGeometry,
    TwistedState,
    angle_set,
    triangle_geometry,
)
from .numerics import gauss_legendre_nodes

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_RADIAL_SUPPORT_RTOL = 1e-9
_I_POWERS = (1 + 0j, 1j, -1 + 0j, -1j)


def unit_imag_power(n: int) -> complex:
    """i**n, exact for any integer n."""
    return _I_POWERS[n % 4]


@dataclass(frozen=True)
class AmplitudeModel:
    """The factored-out dynamical amplitude, a single complex constant."""

    m0: complex = 1.0 + 0j

    def __post_init__(self):
        if not (math.isfinite(self.m0.real) and math.isfinite(self.m0.imag)):
            raise ValueError("m0 must be finite")


@dataclass(frozen=True)
class ReducedAmplitude:
    """Triple-twisted reduced matrix element.

    value / i**phase_power is real whenever in_support is True; the value is
    identically 0 when in_support is False.
    """

    value: complex
    phase_power: int
    in_support: bool


class FourierWeight(NamedTuple):
    phase: complex
    on_cone: bool


class SingleTwistedValue(NamedTuple):
    smooth: complex
    on_support: bool


@dataclass(frozen=True)
class TwoBodyBranch:
    """One branch of the two-solution single-twisted geometry."""

    sign: int
    phi1: float
    phi12: float
    degenerate: bool = False


@dataclass(frozen=True)
class LimitEntry:
    eps: float
    value: complex
    rel_error: float


@dataclass(frozen=True)
class PlaneWaveLimitReport:
    """Convergence record of the second-particle plane-wave limit."""

    limit: complex
    entries: tuple[LimitEntry, ...]
    monotone: bool


def fourier_weight(
    kappa: float, m: int, k_perp_modulus: float, k_azimuth: float
) -> FourierWeight:
    """Smooth factor (-i)^m e^{i m phi} sqrt(2 pi) / sqrt(kappa) of a Bessel
    state's plane-wave decomposition, plus an on-cone flag for |k_perp|.

    The radial delta itself is handled analytically by callers.
    """
    if kappa <= 0.0:
        raise ValueError("kappa must be positive")
    phase = (
        unit_imag_power(-m)
        * complex(math.cos(m * k_azimuth), math.sin(m * k_azimuth))
        * _SQRT_2PI
        / math.sqrt(kappa)
    )
    on_cone = abs(k_perp_modulus - kappa) <= _RADIAL_SUPPORT_RTOL * max(kappa, 1.0)
    return FourierWeight(phase=phase, on_cone=on_cone)


def single_twisted_solutions(
    kappa: float, k1_mod: float, k2_mod: float, phi2: float
) -> list[TwoBodyBranch]:
    """Both azimuth solutions of the single-twisted transverse geometry.

    With the second final transverse momentum fixed at modulus k2 and azimuth
    phi2, and the first constrained to modulus k1, the cone condition
    |k1 + k2| = kappa admits two mirror branches:

        phi1  = phi2 +/- arccos((kappa^2 - k1^2 - k2^2) / (2 k1 k2))
        phi12 = phi2 +/- arccos((kappa^2 + k2^2 - k1^2) / (2 kappa k2))

    with correlated signs. Each returned branch is verified by reconstructing
    k1 + k2 and checking it lands on the kappa cone at azimuth phi12.
    Tangency collapses the branches into one, flagged degenerate; when the
    circles do not intersect a SupportRegionError is raised.
    """
    if kappa <= 0.0 or k1_mod <= 0.0 or k2_mod <= 0.0:
        raise ValueError("all moduli must be positive")
    c_phi1 = (kappa**2 - k1_mod**2 - k2_mod**2) / (2.0 * k1_mod * k2_mod)
    c_phi12 = (kappa**2 + k2_mod**2 - k1_mod**2) / (2.0 * kappa * k2_mod)
    edge = 1.0 + 1e-12
    if abs(c_phi1) > edge or abs(c_phi12) > edge:
        raise SupportRegionError(
            "no transverse-momentum solution: "
            f"kappa = {kappa} outside [{abs(k1_mod - k2_mod)}, {k1_mod + k2_mod}]"
        )
    tangent = abs(c_phi1) >= 1.0 - 1e-12
    alpha = math.acos(min(1.0, max(-1.0, c_phi1)))
    beta = math.acos(min(1.0, max(-1.0, c_phi12)))
    signs = (1,) if tangent else (1, -1)
    branches = []
    for s in signs:
        phi1 = phi2 + s * alpha
        phi12 = phi2 + s * beta
        _check_branch(kappa, k1_mod, k2_mod, phi1, phi2, phi12)
        branches.append(TwoBodyBranch(sign=s, phi1=phi1, phi12=phi12, degenerate=tangent))
    return branches


def _check_branch(kappa, k1, k2, phi1, phi2, phi12):
    sx = k1 * math.cos(phi1) + k2 * math.cos(phi2)
    sy = k1 * math.sin(phi1) + k2 * math.sin(phi2)
    mod = math.hypot(sx, sy)
    if abs(mod - kappa) > 1e-9 * kappa:
        raise AssertionError("branch reconstruction left the momentum cone")
    mismatch = math.atan2(sy, sx) - phi12
    mismatch = (mismatch + math.pi) % (2.0 * math.pi) - math.pi
    if abs(mismatch) > 1e-9:
        raise AssertionError("branch azimuth phi12 inconsistent with reconstruction")


def single_twisted_amplitude(
    state: TwistedState,
    k12_mod: float,
    phi12: float,
    model: AmplitudeModel | None = None,
) -> SingleTwistedValue:
    """Single-twisted element: smooth part of the radial delta at k12 = kappa.

    Off the radial support the value is exactly 0; in particular back-to-back
    final transverse momenta (k12 = 0) never scatter, for any helicity. That
    zero is the phase vortex of the outgoing wave.
    """
    if k12_mod < 0.0:
        raise ValueError("k12_mod must be non-negative")
    model = model or AmplitudeModel()
    on = abs(k12_mod - state.kappa) <= _RADIAL_SUPPORT_RTOL * max(state.kappa, 1.0)
    if not on:
        return SingleTwistedValue(0j, False)
    m = state.m
    phase = unit_imag_power(-m) * complex(math.cos(m * phi12), math.sin(m * phi12))
    smooth = phase * model.m0 / ((2.0 * math.pi) ** 1.5 * math.sqrt(state.kappa))
    return SingleTwistedValue(smooth, True)


def reduced_triple_amplitude(
    geom: CollisionGeometry,
    m: int,
    m1: int,
    m2: int,
    model: AmplitudeModel | None = None,
) -> ReducedAmplitude:
    """Reduced triple-twisted matrix element (module docstring formula).

    Returns value 0 with in_support False outside |xi| < theta or outside the
    open stripe. Inside the stripe, a triangle area below
    STRIPE_DEGENERACY_FLOOR * kappa_tilde^2 raises DegenerateSupportError
    rather than returning a huge value.
    """
    model = model or AmplitudeModel()
    phase_power = m1 + m2 - m
    kappa = geom.initial.kappa
    sin_t = math.sin(geom.theta)
    if abs(geom.q) >= kappa * sin_t:
        return ReducedAmplitude(0j, phase_power, False)
    angles = angle_set(geom)
    tri = triangle_geometry(kappa, angles.xi, geom.kappa1, geom.kappa2)
    if not tri.in_stripe:
        return ReducedAmplitude(0j, phase_power, False)
    if tri.area < STRIPE_DEGENERACY_FLOOR * tri.kappa_tilde**2:
        raise DegenerateSupportError(
            f"triangle area {tri.area} below degeneracy floor inside the stripe"
        )
    sin_xi = geom.q / kappa
    root = math.sqrt((sin_t - sin_xi) * (sin_t + sin_xi))
    magnitude = (
        (2.0 / tri.area)
        * math.sqrt(geom.kappa1 * geom.kappa2 / kappa)
        * math.cos(m * angles.phi_star - (m1 - m2) * angles.phi_tilde_star)
        * math.cos(m1 * tri.delta1 + m2 * tri.delta2)
        / root
    )
    value = unit_imag_power(phase_power) * magnitude * model.m0
    return ReducedAmplitude(value, phase_power, True)


def plane_wave_limit_check(
    geom: CollisionGeometry,
    m: int,
    m1: int,
    test_weight: Callable[[float], float],
    epsilon_list: Sequence[float],
    node_count: int = 128,
    model: AmplitudeModel | None = None,
) -> PlaneWaveLimitReport:
    """Check the second-particle plane-wave limit kappa2 -> 0 with m2 = 0.

    For each eps, sets kappa2 = eps * kappa_tilde and integrates
    test_weight(kappa1) * sqrt(2 pi / kappa2) * S~ over the kappa1 stripe.
    The analytic limit replaces 2/Delta by 8 pi delta(kappa_tilde^2 - kappa1^2)
    (and delta1 -> 0), giving

        L = i^{m1-m} (4 pi / kt) sqrt(2 pi kt / kappa) w(kt)
            cos(m phi* - m1 phi~*) M0 / sqrt(sin^2 theta - sin^2 xi).

    The report records each value against L; the tail below eps = 0.1 must be
    monotone, otherwise ``monotone`` is False (a failure report, not an
    exception).
    """
    model = model or AmplitudeModel()
    eps_sorted = sorted(float(e) for e in epsilon_list)
    if not eps_sorted or eps_sorted[0] <= 0.0:
        raise ValueError("epsilon_list must contain positive values")
    if list(epsilon_list) != sorted(epsilon_list, reverse=True):
        raise ValueError("epsilon_list must be decreasing")

    kappa = geom.initial.kappa
    angles = angle_set(geom)
    kt = kappa * math.cos(angles.xi)
    sin_t = math.sin(geom.theta)
    sin_xi = geom.q / kappa
    root = math.sqrt((sin_t - sin_xi) * (sin_t + sin_xi))
    cos_a = math.cos(m * angles.phi_star - m1 * angles.phi_tilde_star)
    phase = unit_imag_power(m1 - m) * model.m0

    limit = phase * (4.0 * math.pi / kt) * math.sqrt(2.0 * math.pi * kt / kappa) * float(
        test_weight(kt)
    ) * cos_a / root

    nodes, weights = gauss_legendre_nodes(node_count)
    w_nodes = 0.25 * math.pi * (nodes + 1.0)  # (0, pi/2)
    w_weights = 0.25 * math.pi * weights

    entries = []
    for eps in epsilon_list:
        kappa2 = eps * kt
        a = (kt - kappa2) ** 2
        b = (kt + kappa2) ** 2
        k1sq = a + (b - a) * np.sin(w_nodes) ** 2
        k1 = np.sqrt(k1sq)
        # d kappa1 * (2/Delta) = 8 dw / kappa1 under kappa1^2 = a + (b-a) sin^2 w
        cos_d1 = np.clip((kt * kt + k1sq - kappa2 * kappa2) / (2.0 * kt * k1), -1.0, 1.0)
        tw = np.array([float(test_weight(v)) for v in k1])
        integral = float(
            np.sum(
                w_weights
                * 8.0
                / k1
                * tw
                * np.sqrt(k1 * kappa2 / kappa)
                * np.cos(m1 * np.arccos(cos_d1))
            )
        )
        value = phase * math.sqrt(2.0 * math.pi / kappa2) * cos_a * integral / root
        if limit == 0:
            rel = 0.0 if value == 0 else math.inf
        else:
            rel = abs(value / limit - 1.0)
        entries.append(LimitEntry(eps=float(eps), value=value, rel_error=rel))

    tail = [e.rel_error for e in entries if e.eps <= 0.1]
    monotone = all(b <= a * (1.0 + 1e-12) + 1e-15 for a, b in zip(tail, tail[1:]))
    return PlaneWaveLimitReport(limit=limit, entries=tuple(entries), monotone=monotone)
