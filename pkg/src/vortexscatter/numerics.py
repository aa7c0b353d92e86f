"""Shared numerical kernels.

Cylindrical Bessel functions of integer order (power series plus Miller's
backward recurrence, no external special-function dependency), a numerically
stable triangle area, Gauss-Legendre quadrature on a substituted variable that
absorbs the inverse-square-root endpoint of the longitudinal-imbalance
integral, and a multi-start Newton solver for three angles on the torus.

All functions are pure and stateless; concurrent use is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConvergenceError

MAX_BESSEL_ORDER = 200
MAX_BESSEL_ARGUMENT = 1.0e4

# Power series is used only where its alternating terms never grow, so the
# float64 cancellation error stays below ~1e-13 absolute.
_SERIES_CUTOFF = 10.0

# Offset added to the backward-recurrence start order; Miller's algorithm
# converges super-exponentially in this padding.
_MILLER_PAD = 40

_NEWTON_FD_STEP = 1e-6
# Determinant step: Richardson pair (h, h/2) on trigonometric residuals keeps
# truncation ~h^4 and roundoff ~eps/h both near 1e-13.
_DET_FD_STEP = 1e-3
_MAX_NEWTON_STEP = 0.7  # rad; keeps multi-start iterates on their own basins
_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class QuadratureSpec:
    """Controls for refinable Gauss-Legendre quadrature."""

    node_count: int = 32
    abs_tol: float = 0.0
    rel_tol: float = 1e-9
    max_refinements: int = 8

    def __post_init__(self):
        if self.node_count < 2:
            raise ValueError("node_count must be >= 2")
        if self.abs_tol < 0.0 or self.rel_tol < 0.0:
            raise ValueError("tolerances must be non-negative")
        if self.abs_tol == 0.0 and self.rel_tol == 0.0:
            raise ValueError("at least one of abs_tol, rel_tol must be positive")
        if self.max_refinements < 1:
            raise ValueError("max_refinements must be >= 1")


@dataclass(frozen=True)
class RootFindSpec:
    """Controls for the multi-start Newton search on the torus."""

    residual_tol: float = 1e-12
    max_iterations: int = 60
    start_grid_density: int = 6
    dedupe_tol: float = 1e-6

    def __post_init__(self):
        if self.residual_tol <= 0.0:
            raise ValueError("residual_tol must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.start_grid_density < 1:
            raise ValueError("start_grid_density must be >= 1")
        if self.dedupe_tol <= self.residual_tol:
            raise ValueError("dedupe_tol must exceed residual_tol")


@dataclass(frozen=True)
class TorusRoot:
    """One root of a residual on the 3-torus.

    ``jacobian_det`` is |det of the residual Jacobian| at the root, from
    central finite differences with one Richardson extrapolation.
    """

    angles: np.ndarray
    jacobian_det: float
    residual_norm: float


_leggauss_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_legendre_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1], cached by node count."""
    got = _leggauss_cache.get(n)
    if got is None:
        got = np.polynomial.legendre.leggauss(n)
        _leggauss_cache[n] = got
    return got


def bessel_j(order: int, argument: float) -> float:
    """Cylindrical Bessel function J_m(x) for integer m >= 0, x >= 0.

    Power series where its terms decrease from the start, Miller's backward
    recurrence with the J_0 + 2*sum J_2k = 1 normalization elsewhere.
    Absolute error is below 1e-12 for order <= 50, argument <= 100.
    """
    m = int(order)
    if m != order or m < 0 or m > MAX_BESSEL_ORDER:
        raise ValueError(f"order must be an integer in [0, {MAX_BESSEL_ORDER}]")
    x = float(argument)
    if not math.isfinite(x) or x < 0.0 or x > MAX_BESSEL_ARGUMENT:
        raise ValueError(f"argument must be finite in [0, {MAX_BESSEL_ARGUMENT}]")
    if x == 0.0:
        return 1.0 if m == 0 else 0.0
    if x <= _SERIES_CUTOFF or x * x <= 2.0 * (m + 1):
        return _bessel_series(m, x)
    return _bessel_miller(m, x)


def _bessel_series(m: int, x: float) -> float:
    # First term via logs; (x/2)^m alone can overflow long before the term does.
    log_first = m * math.log(0.5 * x) - math.lgamma(m + 1.0)
    if log_first < -745.0:  # underflows to zero anyway
        return 0.0
    term = math.exp(log_first)
    total = term
    quarter_x2 = 0.25 * x * x
    for k in range(1, 400):
        term *= -quarter_x2 / (k * (m + k))
        total += term
        if abs(term) <= 1e-17 * abs(total) + 5e-324:
            break
    return total


def _bessel_miller(m: int, x: float) -> float:
    start = max(m, int(math.ceil(x))) + _MILLER_PAD + 2 * int(math.sqrt(max(m, x)))
    if start % 2:
        start += 1
    j_up = 0.0  # J_{k+1}
    j_cur = 1e-30  # J_k, arbitrary seed
    norm = 2.0 * j_cur if start >= 2 else j_cur
    saved = j_cur if m == start else 0.0
    for k in range(start, 0, -1):
        j_down = (2.0 * k / x) * j_cur - j_up
        j_up = j_cur
        j_cur = j_down
        if abs(j_cur) > 1e250:
            j_cur *= 1e-250
            j_up *= 1e-250
            norm *= 1e-250
            saved *= 1e-250
        idx = k - 1
        if idx == 0:
            norm += j_cur
        elif idx % 2 == 0:
            norm += 2.0 * j_cur
        if idx == m:
            saved = j_cur
    return saved / norm


def heron_area(a: float, b: float, c: float) -> float:
    """Triangle area from three sides, Kahan-ordered for stability.

    Returns exactly 0 for a degenerate (collinear) triple and NaN when the
    triangle inequality is strictly violated; the caller decides support.
    """
    for s in (a, b, c):
        if not math.isfinite(s) or s < 0.0:
            raise ValueError("sides must be finite and non-negative")
    x, y, z = sorted((a, b, c), reverse=True)
    u = z - (x - y)
    if u < 0.0:
        return math.nan
    return 0.25 * math.sqrt((x + (y + z)) * u * (z + (x - y)) * (x + (y - z)))


def _fixed_gl(f: Callable[[float], float], a: float, b: float, n: int) -> float:
    nodes, weights = gauss_legendre_nodes(n)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    total = 0.0
    for t, w in zip(nodes, weights):
        total += w * f(mid + half * t)
    return half * total


def _refine_gl(f, a, b, spec: QuadratureSpec, depth: int = 0) -> float:
    n = spec.node_count
    prev = _fixed_gl(f, a, b, n)
    for _ in range(spec.max_refinements):
        n *= 2
        cur = _fixed_gl(f, a, b, n)
        if abs(cur - prev) <= max(spec.abs_tol, spec.rel_tol * abs(cur)):
            return cur
        prev = cur
    # Doubling stalled: bisect the interval and retry on each half.
    if depth < 10:
        mid = 0.5 * (a + b)
        half_spec = QuadratureSpec(
            node_count=spec.node_count,
            abs_tol=0.5 * spec.abs_tol,
            rel_tol=spec.rel_tol,
            max_refinements=spec.max_refinements,
        )
        return _refine_gl(f, a, mid, half_spec, depth + 1) + _refine_gl(
            f, mid, b, half_spec, depth + 1
        )
    raise ConvergenceError(
        f"quadrature did not converge on [{a}, {b}]", estimates=(prev, cur)
    )


def integrate_q_substituted(
    integrand: Callable[[float], float],
    theta: float,
    spec: QuadratureSpec,
    kappa: float = 1.0,
) -> float:
    """Integrate g(xi(q)) dq over the allowed region |q| < kappa sin(theta).

    Substitutes sin(xi) = sin(theta) sin(u), u in (-pi/2, pi/2), under which
    dq / sqrt(sin^2 theta - sin^2 xi) = kappa du, so the endpoint
    inverse-square-root divergence disappears analytically.
    """
    if not 0.0 < theta < 0.5 * math.pi:
        raise ValueError("theta must lie in (0, pi/2)")
    if kappa <= 0.0:
        raise ValueError("kappa must be positive")
    sin_t = math.sin(theta)

    def subbed(u: float) -> float:
        xi = math.asin(sin_t * math.sin(u))
        return integrand(xi) * kappa * sin_t * math.cos(u)

    return _refine_gl(subbed, -0.5 * math.pi, 0.5 * math.pi, spec)


def _batchify(residual: Callable) -> Callable[[np.ndarray], np.ndarray]:
    """Wrap a residual so it accepts an (N, 3) array and returns (N, 3)."""
    state = {"vectorized": None}

    def call(points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if state["vectorized"] is None:
            try:
                out = np.asarray(residual(points), dtype=float)
                state["vectorized"] = out.shape == points.shape
            except Exception:
                state["vectorized"] = False
            if state["vectorized"]:
                return out
        if state["vectorized"]:
            return np.asarray(residual(points), dtype=float)
        return np.array([residual(row) for row in points], dtype=float)

    return call


def _fd_jacobian(f, points: np.ndarray, h: float) -> np.ndarray:
    n, dim = points.shape
    jac = np.empty((n, dim, dim))
    for j in range(dim):
        shift = np.zeros(dim)
        shift[j] = h
        jac[:, :, j] = (f(points + shift) - f(points - shift)) / (2.0 * h)
    return jac


def _richardson_det(f, point: np.ndarray, h: float = _DET_FD_STEP) -> float:
    pts = point[None, :]
    j1 = _fd_jacobian(f, pts, h)[0]
    j2 = _fd_jacobian(f, pts, 0.5 * h)[0]
    return float(np.linalg.det((4.0 * j2 - j1) / 3.0))


def _torus_separation(a: np.ndarray, b: np.ndarray) -> float:
    d = np.abs(a - b) % _TWO_PI
    return float(np.max(np.minimum(d, _TWO_PI - d)))


def solve_system(
    residual: Callable,
    spec: RootFindSpec | None = None,
) -> tuple[list[TorusRoot], list[TorusRoot]]:
    """Find all roots of a smooth residual R^3 -> R^3 on the 3-torus.

    Newton iterations start from a uniform grid of start_grid_density^3
    points; converged iterates are deduplicated modulo 2 pi within
    dedupe_tol. Returns (roots, degenerate): roots whose |Jacobian
    determinant| falls below residual_tol are reported separately and must
    not enter amplitude sums.

    The residual may either map a single 3-vector to a 3-vector or map an
    (N, 3) batch to an (N, 3) batch; batching is detected on first call.
    """
    spec = spec or RootFindSpec()
    f = _batchify(residual)
    d = spec.start_grid_density
    # Irrational offset keeps the regular grid off exact Jacobian singularities.
    axis = (np.arange(d) + 0.5 + 0.1180339887) * _TWO_PI / d
    grid = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1)
    active = grid.reshape(-1, 3).copy()

    settled: list[np.ndarray] = []
    for _ in range(spec.max_iterations):
        if active.shape[0] == 0:
            break
        res = f(active)
        norms = np.max(np.abs(res), axis=1)
        done = norms <= spec.residual_tol
        if done.any():
            settled.append(active[done])
            active = active[~done]
            res = res[~done]
            if active.shape[0] == 0:
                break
        jac = _fd_jacobian(f, active, _NEWTON_FD_STEP)
        with np.errstate(all="ignore"):
            dets = np.linalg.det(jac)
            solvable = np.isfinite(dets) & (np.abs(dets) > 1e-300)
            solvable &= np.isfinite(res).all(axis=1)
            steps = np.full_like(res, np.nan)
            if solvable.any():
                steps[solvable] = np.linalg.solve(
                    jac[solvable], -res[solvable][..., None]
                )[..., 0]
        alive = np.isfinite(steps).all(axis=1)
        steps = np.clip(np.nan_to_num(steps), -_MAX_NEWTON_STEP, _MAX_NEWTON_STEP)
        active = (active[alive] + steps[alive]) % _TWO_PI

    if not settled:
        return [], []

    final = np.concatenate(settled) % _TWO_PI
    final_norms = np.max(np.abs(f(final)), axis=1)
    order = np.argsort(final_norms, kind="stable")
    reps: list[tuple[np.ndarray, float]] = []
    for i in order:
        if final_norms[i] > spec.residual_tol:
            continue
        cand = final[i]
        if all(_torus_separation(cand, r) > spec.dedupe_tol for r, _ in reps):
            reps.append((cand, float(final_norms[i])))

    roots: list[TorusRoot] = []
    degenerate: list[TorusRoot] = []
    for angles, rnorm in reps:
        det = abs(_richardson_det(f, angles))
        root = TorusRoot(angles=angles, jacobian_det=det, residual_norm=rnorm)
        if det < spec.residual_tol:
            degenerate.append(root)
        else:
            roots.append(root)
    roots.sort(key=lambda r: tuple(r.angles))
    degenerate.sort(key=lambda r: tuple(r.angles))
    return roots, degenerate
