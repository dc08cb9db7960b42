"""Cauchy integrals by the trapezoidal rule on a circle.

All integrals carry the 1/(2 pi i) factor, so ``cauchy_coefficient`` with
poles x_0..x_n returns exactly the divided difference of ``f`` over them.
Node counts double from ``QuadratureSettings.nodes`` until two successive
estimates agree; node sets are nested so each doubling only evaluates the
new midpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ContourError, ConvergenceError, DimensionError, SolveError

MARGIN = 0.8
COND_LIMIT = 1e14


@dataclass(frozen=True)
class QuadratureSettings:
    radius_factor: float = 1.25
    nodes: int = 64
    max_nodes: int = 4096
    tol: float = 1e-12

    def __post_init__(self):
        if self.radius_factor <= 1:
            raise ValueError("radius factor must exceed 1")
        for name in ("nodes", "max_nodes"):
            v = getattr(self, name)
            if v < 1 or v & (v - 1):
                raise ValueError(f"{name} must be a positive power of two")
        if self.max_nodes < self.nodes:
            raise ValueError("max_nodes must be at least nodes")


DEFAULT_SETTINGS = QuadratureSettings()


@dataclass(frozen=True)
class Contour:
    """Circle ``|z - center| = radius`` sampled at ``node_count`` points."""

    center: complex
    radius: float
    node_count: int = 64
    phase: float = field(default=0.0, compare=False)

    def __post_init__(self):
        if not self.radius > 0:
            raise ContourError("contour radius must be positive")
        if self.node_count < 1 or self.node_count & (self.node_count - 1):
            raise ValueError("node_count must be a positive power of two")

    def points(self, count=None, offset=0.0):
        count = self.node_count if count is None else count
        theta = self.phase + offset + 2 * np.pi * np.arange(count) / count
        return self.center + self.radius * np.exp(1j * theta)

    def validate(self, poles, f=None, margin=None):
        """Raise ContourError unless every pole is strictly inside and f is analytic on the disc."""
        poles = np.asarray(poles, dtype=complex).ravel()
        d = np.abs(poles - self.center)
        if np.any(d >= self.radius):
            raise ContourError("a pole lies on or outside the contour")
        if margin is not None and np.any(d > margin * self.radius):
            raise ContourError(f"a pole violates the {margin} margin ratio")
        if f is not None and not f.singular_distance(self.center) > self.radius:
            raise ContourError(f"contour disc meets the excluded set of {f}")


def _needed_radius(lam, center, tau_norm):
    spread = float(np.max(np.abs(lam - center)))
    return spread, max(spread / MARGIN, spread + tau_norm)


def choose_contour(lam, f, tau_norm=0.0, settings=DEFAULT_SETTINGS):
    """Circle around the spectrum, grown by ``tau_norm``, avoiding f's singularities.

    The preferred circle is centred at the mean of ``lam`` with radius
    ``radius_factor * (max |lam_i - center| + tau_norm)``, floored at
    ``radius_factor * 0.1 * max(1, max |lam_i|)`` for tightly clustered
    spectra. If that disc would touch the excluded set of ``f`` the radius is
    shrunk toward the minimum admissible value; failing that, centres from a
    grid over the spectrum's bounding box are tried, roomiest first.

    Raises
    ------
    ContourError
        No circle keeps the spectrum within the 0.8 margin, covers the
        ``tau_norm`` neighbourhood and avoids the excluded set.
    """
    lam = np.asarray(lam, dtype=complex).ravel()
    if lam.size == 0 or not np.all(np.isfinite(lam)):
        raise ContourError("spectrum must be non-empty and finite")
    if not np.all(f.in_domain(lam)):
        raise ContourError(f"spectrum touches the excluded set of {f}")
    tau_norm = float(tau_norm)
    mean = complex(np.mean(lam))
    scale = max(1.0, float(np.max(np.abs(lam))))

    for center in _candidate_centers(lam, f, mean, scale):
        spread, needed = _needed_radius(lam, center, tau_norm)
        # a tight cluster still gets a circle of size ~ the spectrum scale
        preferred = settings.radius_factor * max(spread + tau_norm, 0.1 * scale)
        preferred = max(preferred, needed)
        limit = f.singular_distance(center)
        if preferred < 0.9 * limit:
            return Contour(center, preferred, settings.nodes)
        if needed < limit:
            return Contour(center, 0.5 * (needed + limit), settings.nodes)
    raise ContourError(f"no circle encloses the spectrum while avoiding the excluded set of {f}")


def _candidate_centers(lam, f, mean, scale):
    yield mean
    if f.is_entire:
        return
    # grid over the bounding box, best ratio of singular distance to needed radius first
    spread = max(float(np.max(np.abs(lam - mean))), 0.1 * scale)
    xs = np.linspace(lam.real.min() - spread, lam.real.max() + spread, 41)
    ys = np.linspace(lam.imag.min() - spread, lam.imag.max() + spread, 41)
    grid = (xs[:, None] + 1j * ys[None, :]).ravel()
    need = np.max(np.abs(lam[None, :] - grid[:, None]), axis=1)
    ratio = np.array([f.singular_distance(c) for c in grid]) / np.maximum(need, 1e-300)
    for idx in np.argsort(-ratio, kind="stable")[:8]:
        yield complex(grid[idx])


def _phase_for(contour, poles, max_nodes):
    # offset by half the finest step if any node would sit on top of a pole
    z = contour.points(max_nodes)
    poles = np.asarray(poles, dtype=complex).ravel()
    if poles.size:
        gap = np.min(np.abs(z[:, None] - poles[None, :]))
        if gap < contour.radius * 1e-6:
            return replace(contour, phase=contour.phase + np.pi / max_nodes)
    return contour


@dataclass
class QuadratureInfo:
    """Convergence record of a doubling run."""

    history: list  # (node_count, estimate) pairs
    differences: list  # max-abs change between successive estimates
    converged: bool
    node_count: int


def _is_real(f, *arrays):
    return f.is_real_symmetric and all(np.all(np.asarray(a).imag == 0) for a in arrays)


def _trapezoid(integrand, contour, settings, poles=(), real=False):
    """Doubling trapezoidal rule for (1/2 pi i) \\oint integrand(z) dz.

    ``integrand`` maps an array of nodes to an array whose leading axis runs
    over the nodes. Returns the estimate and a ``QuadratureInfo``. With
    ``real=True`` the caller asserts the integrand is conjugate-symmetric;
    when the node set is symmetric too, the imaginary roundoff is dropped.
    """
    contour = _phase_for(contour, poles, settings.max_nodes)
    if real and contour.center.imag == 0 and contour.phase == 0:
        value, info = _trapezoid(integrand, contour, settings)
        info.history = [(c, e.real + 0j) for c, e in info.history]
        return value.real + 0j, info
    count = contour.node_count

    def weighted_sum(z):
        vals = integrand(z)
        w = (z - contour.center).reshape((-1,) + (1,) * (vals.ndim - 1))
        return np.sum(vals * w, axis=0)

    total = weighted_sum(contour.points(count))
    estimate = total / count
    history = [(count, estimate)]
    differences = []
    while True:
        if count * 2 > settings.max_nodes:
            break
        total = total + weighted_sum(contour.points(count, offset=np.pi / count))
        count *= 2
        new = total / count
        diff = float(np.max(np.abs(new - estimate)))
        differences.append(diff)
        history.append((count, new))
        scale = 1.0 + float(np.max(np.abs(new)))
        estimate = new
        if diff <= settings.tol * scale:
            return estimate, QuadratureInfo(history, differences, True, count)
    return estimate, QuadratureInfo(history, differences, False, count)


def cauchy_coefficient(f, poles, contour, settings=DEFAULT_SETTINGS, full_output=False):
    """(1/2 pi i) \\oint f(z) / prod_j (z - pole_j) dz.

    With ``full_output=True`` also returns the ``QuadratureInfo``.

    Raises
    ------
    ContourError
        A pole is not strictly inside, or the disc meets f's excluded set.
    ConvergenceError
        Successive estimates still differ after ``settings.max_nodes`` nodes.
    """
    poles = np.asarray(poles, dtype=complex).ravel()
    if poles.size == 0:
        raise ValueError("need at least one pole")
    contour.validate(poles, f)
    settings = replace(settings, nodes=contour.node_count)

    def integrand(z):
        return f(z) / np.prod(z[:, None] - poles[None, :], axis=1)

    value, info = _trapezoid(integrand, contour, settings, poles, _is_real(f, poles))
    if not info.converged:
        raise ConvergenceError(
            f"quadrature not converged at {info.node_count} nodes (last change {info.differences[-1]:.3e})"
        )
    value = complex(value)
    return (value, info) if full_output else value


def _resolvent_products(f, lam, tau, orders):
    # per node: f(z) R (tau R)^n for n = 0..max(orders), R = diag(1/(z - lam))
    n_max = max(orders)
    wanted = sorted(set(orders))

    def integrand(z):
        r = 1.0 / (z[:, None] - lam[None, :])
        fz = f(z)[:, None, None]
        m = r[:, :, None] * np.eye(lam.size)[None, :, :]
        out = []
        for n in range(n_max + 1):
            if n > 0:
                m = (m @ tau) * r[:, None, :]
            if n in wanted:
                out.append(fz * m)
        return np.stack(out, axis=1)

    return integrand, wanted


def resolvent_terms(f, lam, tau, orders, contour, settings=DEFAULT_SETTINGS, full_output=False):
    """Order-n Dyson terms (1/2 pi i) \\oint f(z) R(z) (tau R(z))^n dz for each n in ``orders``.

    All orders share one node sequence; doubling stops when every order has
    settled. Returns a dict ``{n: matrix}``.
    """
    lam = np.asarray(lam, dtype=complex).ravel()
    tau = np.asarray(tau, dtype=complex)
    if tau.shape != (lam.size, lam.size):
        raise DimensionError(f"tau has shape {tau.shape}, spectrum has {lam.size} entries")
    contour.validate(lam, f)
    settings = replace(settings, nodes=contour.node_count)
    integrand, wanted = _resolvent_products(f, lam, tau, orders)
    value, info = _trapezoid(integrand, contour, settings, lam, _is_real(f, lam, tau))
    if not info.converged:
        raise ConvergenceError(f"resolvent quadrature not converged at {info.node_count} nodes")
    terms = {n: value[j] for j, n in enumerate(wanted)}
    return (terms, info) if full_output else terms


def resolvent_term(f, lam, tau, n, contour, settings=DEFAULT_SETTINGS):
    """Single order-n Dyson term; see :func:`resolvent_terms`."""
    return resolvent_terms(f, lam, tau, [n], contour, settings)[n]


def matrix_function_resolvent(f, M, contour, settings=DEFAULT_SETTINGS, full_output=False):
    """f(M) = (1/2 pi i) \\oint f(z) (zI - M)^{-1} dz by dense solves at each node.

    The contour must enclose every eigenvalue of ``M``; only the conditioning
    of the shifted systems is checked here.

    Raises
    ------
    SolveError
        Some zI - M has condition number above 1e14.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError("matrix must be square")
    n = M.shape[0]
    if f.singular_distance(contour.center) <= contour.radius:
        raise ContourError(f"contour disc meets the excluded set of {f}")
    settings = replace(settings, nodes=contour.node_count)
    eye = np.eye(n)

    def integrand(z):
        shifted = z[:, None, None] * eye[None] - M[None]
        cond = np.linalg.cond(shifted)
        if not np.all(cond < COND_LIMIT):
            raise SolveError(f"shifted matrix on the contour has condition {np.max(cond):.3e}")
        inv = np.linalg.solve(shifted, np.broadcast_to(eye, shifted.shape))
        return f(z)[:, None, None] * inv

    value, info = _trapezoid(integrand, contour, settings, real=_is_real(f, M))
    if not info.converged:
        raise ConvergenceError(f"resolvent quadrature not converged at {info.node_count} nodes")
    return (value, info) if full_output else value
