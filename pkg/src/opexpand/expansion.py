"""Order-by-order expansion of f(lam + tau) around a diagonal matrix.

The order-n term has (i, p) entry
``sum_{m1..m_{n-1}} A(i, m1, ..., m_{n-1}, p) tau[i,m1] tau[m1,m2] ... tau[m_{n-1},p]``
with A the divided difference of f over the path eigenvalues. Two
strategies compute it: ``path_sum`` enumerates index paths (cost N^{n+1}),
``quadrature`` integrates f(z) R (tau R)^n around a contour (cost n N^2 per
node). ``matrix_taylor_oracle`` is an independent reference for f(M).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .contour import DEFAULT_SETTINGS, choose_contour, matrix_function_resolvent, resolvent_terms
from .divided import divided_difference
from .errors import BudgetError, ConvergenceError, DimensionError, RadiusError

WORK_CAP = 10**7
STRATEGIES = ("path_sum", "quadrature")


@dataclass
class ExpansionResult:
    terms: list
    truncated_sum: np.ndarray
    term_norms: list
    strategy: str
    converged: bool
    contour: object = field(default=None, repr=False)

    @property
    def order(self):
        return len(self.terms) - 1

    def partial_sum(self, n):
        """Sum of terms 0..n; orders dropped by early stopping count as zero."""
        return sum(self.terms[: n + 1])


def _as_problem(lam, tau):
    lam = np.asarray(lam, dtype=complex).ravel()
    tau = np.asarray(tau, dtype=complex)
    if lam.size == 0:
        raise DimensionError("empty spectrum")
    if tau.shape != (lam.size, lam.size):
        raise DimensionError(f"tau has shape {tau.shape}, spectrum has {lam.size} entries")
    return lam, tau


def path_sum_work(n, n_max):
    return sum(n ** (k + 1) for k in range(1, n_max + 1))


def path_sum_term(f, lam, tau, n, cache=None):
    """Order-n term by enumerating every index path of length n+1."""
    lam, tau = _as_problem(lam, tau)
    size = lam.size
    cache = {} if cache is None else cache
    shape = (size,) * (n + 1)
    coeff = np.empty(shape, dtype=complex)
    for path in itertools.product(range(size), repeat=n + 1):
        key = tuple(sorted(path))
        if key not in cache:
            cache[key] = divided_difference(f, lam[list(key)])
        coeff[path] = cache[key]
    # weight[i, m1, ..., p] = tau[i,m1] * tau[m1,m2] * ... * tau[m_{n-1},p]
    weight = np.ones(shape, dtype=complex)
    for j in range(n):
        idx = [1] * (n + 1)
        idx[j] = idx[j + 1] = size
        weight = weight * tau.reshape(idx)
    inner = tuple(range(1, n))
    return np.sum(coeff * weight, axis=inner) if inner else coeff * weight


def expand(
    f,
    lam,
    tau,
    n_max,
    strategy="quadrature",
    settings=DEFAULT_SETTINGS,
    stop_rtol=1e-14,
    work_cap=WORK_CAP,
    contour=None,
):
    """Truncated expansion of f(lam + tau) through order ``n_max``.

    Stops early once two consecutive terms have Frobenius norm below
    ``stop_rtol * ||terms[0]||`` (floored at 1e-300). Polynomial ``f`` is
    never stopped on term size, since intermediate orders may vanish; every
    order above the degree is identically zero, so the first such order is
    recorded as an exact zero matrix and the expansion ends there.

    Raises
    ------
    BudgetError
        ``path_sum`` would need more than ``work_cap`` coefficient evaluations.
    ContourError, ConvergenceError
        From the quadrature strategy.
    """
    lam, tau = _as_problem(lam, tau)
    if n_max < 1:
        raise ValueError("n_max must be positive")
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    size = lam.size
    degree = f.polynomial_degree
    last = n_max if degree is None else min(n_max, degree)

    if strategy == "quadrature" and contour is None:
        contour = choose_contour(lam, f, np.linalg.norm(tau), settings)
    terms = [np.diag(f(lam)).astype(complex)]
    stop_tol = max(stop_rtol * np.linalg.norm(terms[0]), 1e-300)

    if strategy == "path_sum":
        work = path_sum_work(size, last)
        if work > work_cap:
            raise BudgetError(f"path sum needs {work} path evaluations, cap is {work_cap}")
        cache = {}
        computed = (path_sum_term(f, lam, tau, n, cache) for n in range(1, last + 1))
    else:
        if last >= 1:
            by_order = resolvent_terms(f, lam, tau, range(1, last + 1), contour, settings)
        else:
            by_order = {}
        computed = (by_order[n] for n in range(1, last + 1))

    small = 0
    stopped = False
    for term in computed:
        terms.append(term)
        if degree is None and np.linalg.norm(term) < stop_tol:
            small += 1
            if small >= 2:
                stopped = True
                break
        else:
            small = 0
    if not stopped and degree is not None and degree < n_max:
        terms.append(np.zeros((size, size), dtype=complex))
        stopped = True

    norms = [float(np.linalg.norm(t)) for t in terms]
    converged = stopped or norms[-1] < stop_tol
    return ExpansionResult(terms, sum(terms), norms, strategy, converged, contour)


def matrix_taylor_oracle(f, M, tol=1e-15, max_terms=10**4):
    """f(M) from the Taylor series of f about c = trace(M)/N.

    Sums ``f^(k)(c)/k! (M - cI)^k`` until three consecutive terms have max-abs
    entry below ``tol``; polynomial ``f`` is summed exactly to its degree.

    Raises
    ------
    RadiusError
        ``||M - cI||_2`` is not below 0.9 times the distance from c to the
        nearest singularity of f.
    ConvergenceError
        No settling within ``max_terms`` terms.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError("matrix must be square")
    size = M.shape[0]
    c = complex(np.trace(M) / size)
    shifted = M - c * np.eye(size)
    radius = f.singular_distance(c)
    norm = np.linalg.norm(shifted, 2)
    if not math.isinf(radius) and not norm < 0.9 * radius:
        raise RadiusError(
            f"||M - cI|| = {norm:.3e} is not below 0.9 x Taylor radius {radius:.3e} of {f} at c"
        )
    degree = f.polynomial_degree
    total = f.taylor_coefficient(0, c) * np.eye(size, dtype=complex)
    power = np.eye(size, dtype=complex)
    small = 0
    for k in range(1, max_terms + 1):
        if degree is not None and k > degree:
            return total
        power = power @ shifted
        term = f.taylor_coefficient(k, c) * power
        total = total + term
        if np.max(np.abs(term)) < tol:
            small += 1
            if small >= 3:
                return total
        else:
            small = 0
        if not np.all(np.isfinite(total)):
            break
    raise ConvergenceError(f"matrix Taylor series of {f} did not settle within {max_terms} terms")


def reference_function(f, M, lam=None, tau_norm=None, settings=DEFAULT_SETTINGS, tol=1e-15):
    """f(M) by the Taylor oracle, or by contour quadrature where its radius check fails.

    Returns ``(value, name)`` with ``name`` either ``"matrix-taylor"`` or
    ``"resolvent"``.
    """
    M = np.asarray(M, dtype=complex)
    try:
        return matrix_taylor_oracle(f, M, tol), "matrix-taylor"
    except RadiusError:
        pass
    if lam is None:
        lam = np.diag(M)
        tau_norm = np.linalg.norm(M - np.diag(lam))
    contour = choose_contour(lam, f, tau_norm, settings)
    return matrix_function_resolvent(f, M, contour, settings), "resolvent"


@dataclass
class ConvergenceProfile:
    scales: list
    orders: list
    errors: np.ndarray  # errors[j, s]: truncation at orders[j], scale scales[s]
    slopes: list  # fitted d log(error) / d log(scale); None where exact

    def slope(self, n):
        return self.slopes[self.orders.index(n)]


def convergence_profile(
    f, lam, tau, n_max, scales, strategy="quadrature", settings=DEFAULT_SETTINGS, exact_rtol=1e-13
):
    """Truncation error versus perturbation scale for every order 1..n_max.

    For each scale s the expansion of f(lam + s tau) truncated at order n is
    compared, in max-abs norm, with an independent reference. The slope of
    log(error) against log(s) is fitted by least squares per order; an order
    whose errors all sit below ``exact_rtol`` times the reference size is
    reported as exact (slope ``None``).
    """
    lam, tau = _as_problem(lam, tau)
    scales = [float(s) for s in scales]
    if len(scales) < 2 or any(s <= 0 for s in scales):
        raise ValueError("need at least two positive scales")
    orders = list(range(1, n_max + 1))
    errors = np.zeros((len(orders), len(scales)))
    floors = []
    for col, s in enumerate(scales):
        t = s * tau
        ref, _ = reference_function(f, np.diag(lam) + t, lam, np.linalg.norm(t), settings)
        result = expand(f, lam, t, n_max, strategy, settings)
        for row, n in enumerate(orders):
            errors[row, col] = np.max(np.abs(result.partial_sum(n) - ref))
        floors.append(exact_rtol * max(1.0, np.max(np.abs(ref))))
    slopes = []
    logs = np.log(scales)
    for row in range(len(orders)):
        keep = errors[row] > np.array(floors)
        if keep.sum() < 2:
            slopes.append(None)
            continue
        slope, _ = np.polyfit(logs[keep], np.log(errors[row][keep]), 1)
        slopes.append(float(slope))
    return ConvergenceProfile(scales, orders, errors, slopes)
