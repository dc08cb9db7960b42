"""Exact expansion of (lam + tau)^p through the epsilon matrices.

This is the slow, enumerative oracle for monomial and polynomial ``f``:
ordered index sums are enumerated literally, with no combinatorial shortcuts.
All routines require a spectrum with no zero entry.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .errors import BudgetError, ConvergenceError, ZeroEigenvalueError

WORK_CAP = 10**7


def _spectrum(lam):
    lam = np.asarray(lam, dtype=complex).ravel()
    if np.any(lam == 0):
        raise ZeroEigenvalueError("epsilon matrices need every diagonal entry nonzero")
    return lam


def epsilon_matrix(lam, tau, q):
    """[eps_q]_{ip} = (lam_p / lam_i)^q tau_{ip} / lam_i."""
    lam = _spectrum(lam)
    tau = np.asarray(tau, dtype=complex)
    ratio = lam[None, :] / lam[:, None]
    return ratio**q * tau / lam[:, None]


def expand_monomial_lemma(lam, tau, p, max_k, work_cap=WORK_CAP):
    """Truncated ordered-product expansion of (lam + tau)^p.

    Returns ``lam^p (1 + sum_q eps_q + sum_{q<q1} eps_q1 eps_q + ...)`` keeping
    products of at most ``max_k`` epsilon factors. Products are applied with
    the largest subscript leftmost. Products longer than ``p`` have an empty
    index range, so ``max_k`` is clipped to ``p``; with ``max_k >= p`` the
    result is (lam + tau)^p up to roundoff.
    """
    lam = _spectrum(lam)
    tau = np.asarray(tau, dtype=complex)
    n = lam.size
    if tau.shape != (n, n):
        raise ValueError(f"tau has shape {tau.shape}, expected {(n, n)}")
    if p < 0 or max_k < 1:
        raise ValueError("need p >= 0 and max_k >= 1")
    max_k = min(max_k, p)
    work = sum(math.comb(p, k) * k * n**3 for k in range(1, max_k + 1))
    if work > work_cap:
        raise BudgetError(f"lemma expansion needs ~{work} multiply-adds, cap is {work_cap}")

    eps = [epsilon_matrix(lam, tau, q) for q in range(p)]
    acc = np.eye(n, dtype=complex)
    for k in range(1, max_k + 1):
        for qs in itertools.combinations(range(p), k):
            prod = eps[qs[-1]]
            for q in reversed(qs[:-1]):
                prod = prod @ eps[q]
            acc = acc + prod
    return (lam**p)[:, None] * acc


def conjugation_identity_check(lam, tau, qs, rtol=1e-12):
    """Check lam eps_q1 ... eps_qr lam == lam^2 eps_{q1+1} ... eps_{qr+1}."""
    lam = _spectrum(lam)
    n = lam.size
    left = np.eye(n, dtype=complex)
    right = np.eye(n, dtype=complex)
    for q in qs:
        left = left @ epsilon_matrix(lam, tau, q)
        right = right @ epsilon_matrix(lam, tau, q + 1)
    left = lam[:, None] * left * lam[None, :]
    right = (lam**2)[:, None] * right
    scale = max(np.max(np.abs(left)), np.max(np.abs(right)))
    return bool(np.max(np.abs(left - right)) <= rtol * scale)


def _check_path(path, k):
    path = list(path)
    if k is None:
        k = len(path) - 1
    if k < 1 or len(path) != k + 1:
        raise ValueError(f"path of length {len(path)} does not carry {k} tau factors")
    return path, k


def path_coefficient_B_direct(lam, path, k=None, n=0, work_cap=WORK_CAP):
    """B^{(k, n)} for an index path by literal enumeration of the nested sum.

    The sum runs over 0 <= q < q1 < ... < q_{k-1} <= n-1; the first ratio
    lam_{m1}/lam_i carries the largest exponent and the last ratio
    lam_p/lam_{m_{k-1}} the smallest.
    """
    lam = np.asarray(lam, dtype=complex)
    path, k = _check_path(path, k)
    vals = lam[path]
    if np.any(vals == 0):
        raise ZeroEigenvalueError("path passes through a zero diagonal entry")
    if n < k:
        return 0j
    if math.comb(n, k) * k > work_cap:
        raise BudgetError("nested-sum enumeration exceeds the work cap")
    # ratios[j] = vals[j+1] / vals[j], j = 0..k-1; ratio j gets exponent qs[k-1-j]
    ratios = vals[1:] / vals[:-1]
    total = 0j
    for qs in itertools.combinations(range(n), k):
        term = 1 + 0j
        for j in range(k):
            term *= ratios[j] ** qs[k - 1 - j]
        total += term
    return complex(total / np.prod(vals[:-1]))


def path_coefficient_B(lam, path, k=None, n=0):
    """B^{(k, n)} for an index path via the geometric-sum recurrence.

    B^{(k+1)}_{i,m1,...,p} = (B^{(k)}_{i,m2,...,p} - (lam_m1/lam_i)^n B^{(k)}_{m1,m2,...,p})
    / (lam_i - lam_m1). Where lam_i == lam_m1 the recurrence is undefined and
    the nested sum is evaluated directly for that sub-path.
    """
    lam = np.asarray(lam, dtype=complex)
    path, k = _check_path(path, k)
    if np.any(lam[path] == 0):
        raise ZeroEigenvalueError("path passes through a zero diagonal entry")
    return _b_recurrence(lam, tuple(path), n)


def _b_recurrence(lam, path, n):
    k = len(path) - 1
    if n < k:
        return 0j
    a, b = lam[path[0]], lam[path[1]]
    if a == b:
        return path_coefficient_B_direct(lam, path, k, n)
    if k == 1:
        return complex((1 - (b / a) ** n) / (a - b))
    head = _b_recurrence(lam, (path[0],) + path[2:], n)
    tail = _b_recurrence(lam, path[1:], n)
    return complex((head - (b / a) ** n * tail) / (a - b))


def coefficient_from_B(f, lam, path, k=None, n_max=200, rtol=1e-14):
    """Coefficient A for an index path, summed from the Taylor series of f at 0.

    A = sum_n f^(n)(0)/n! * lam_i^n * B^{(k, n)}. Polynomial ``f`` is summed
    exactly up to its degree and ``n_max`` is ignored. For other ``f`` the sum
    stops once three consecutive terms fall below ``rtol`` times the partial
    sum.

    Raises
    ------
    ConvergenceError
        The series did not settle by ``n_max``.
    """
    lam = np.asarray(lam, dtype=complex)
    path, k = _check_path(path, k)
    lam_i = lam[path[0]]
    degree = f.polynomial_degree
    last = degree if degree is not None else n_max
    total = 0j
    small = 0
    for n in range(k, last + 1):
        c = f.taylor_coefficient(n, 0.0)
        term = c * lam_i**n * path_coefficient_B(lam, path, k, n) if c != 0 else 0j
        total += term
        if degree is None:
            if abs(term) <= rtol * abs(total) or (term == 0 and total == 0):
                small += 1
                if small >= 3:
                    return complex(total)
            else:
                small = 0
    if degree is None:
        raise ConvergenceError(f"coefficient series for {f} not settled after {n_max} terms")
    return complex(total)
