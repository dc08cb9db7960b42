"""Catalog of scalar analytic functions with exact derivative access.

Every function here can be evaluated at complex points, differentiated to any
order in closed form, and asked for the distance from a point to its nearest
singularity. The matrix-level modules only ever touch ``f`` through this
interface.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParseError
from .scalars import format_scalar, parse_scalar, split_top_level

KINDS = ("exp", "sin", "cos", "log", "pow", "poly", "recip")


def inverse_factorial(n):
    if n <= 170:
        return 1.0 / math.factorial(n)
    return math.exp(-math.lgamma(n + 1))


def falling_factorial(p, k):
    """p (p-1) ... (p-k+1) as an exact integer."""
    out = 1
    for j in range(k):
        out *= p - j
    return out


@dataclass(frozen=True)
class AnalyticFunction:
    """A scalar function from the catalog.

    Use the constructors (:func:`exponential`, :func:`monomial`, ...) rather
    than building instances by hand.

    Parameters
    ----------
    kind : str
        One of ``exp``, ``sin``, ``cos``, ``log``, ``pow``, ``poly``, ``recip``.
    degree : int
        Exponent for ``pow``; unused otherwise.
    coeffs : tuple of complex
        Ascending coefficients for ``poly``; unused otherwise.
    pole : complex
        Pole location for ``recip``; unused otherwise.
    """

    kind: str
    degree: int = 0
    coeffs: tuple = ()
    pole: complex = 0j

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown function kind {self.kind!r}")
        if self.kind == "pow" and (int(self.degree) != self.degree or self.degree < 0):
            raise ValueError("monomial degree must be a nonnegative integer")
        if self.kind == "poly" and len(self.coeffs) == 0:
            raise ValueError("polynomial needs at least one coefficient")

    # -- domain ---------------------------------------------------------
    @property
    def is_entire(self):
        return self.kind not in ("log", "recip")

    @property
    def is_polynomial(self):
        return self.kind in ("pow", "poly")

    @property
    def is_real_symmetric(self):
        """True when f(conj z) == conj f(z), i.e. f is real on the real axis."""
        if self.kind == "poly":
            return all(complex(a).imag == 0 for a in self.coeffs)
        if self.kind == "recip":
            return self.pole.imag == 0
        return True

    @property
    def polynomial_degree(self):
        """Degree for polynomial kinds, ``None`` otherwise."""
        if self.kind == "pow":
            return self.degree
        if self.kind == "poly":
            return len(self.coeffs) - 1
        return None

    @property
    def analyticity(self):
        if self.kind == "log":
            return "excluded: closed ray (-inf, 0]"
        if self.kind == "recip":
            return f"excluded: pole at {format_scalar(self.pole)}"
        return "entire"

    def in_domain(self, z):
        """Boolean (array) mask of points where the function is analytic."""
        z = np.asarray(z, dtype=complex)
        if self.kind == "log":
            return ~((z.imag == 0) & (z.real <= 0))
        if self.kind == "recip":
            return z != self.pole
        return np.ones(z.shape, dtype=bool)

    def singular_distance(self, c):
        """Distance from ``c`` to the excluded set (``inf`` when entire)."""
        c = complex(c)
        if self.kind == "log":
            return abs(c) if c.real > 0 else abs(c.imag)
        if self.kind == "recip":
            return abs(c - self.pole)
        return math.inf

    def _check(self, z):
        if not np.all(self.in_domain(z)):
            raise DomainError(f"{self.spec} is not analytic at {z}")

    # -- evaluation -----------------------------------------------------
    def __call__(self, z):
        """Vectorized evaluation; returns a complex scalar or array."""
        scalar = np.ndim(z) == 0
        z = np.asarray(z, dtype=complex)
        self._check(z)
        if self.kind == "exp":
            out = np.exp(z)
        elif self.kind == "sin":
            out = np.sin(z)
        elif self.kind == "cos":
            out = np.cos(z)
        elif self.kind == "log":
            out = np.log(z)
        elif self.kind == "recip":
            out = 1.0 / (z - self.pole)
        elif self.kind == "pow":
            out = z ** self.degree
        else:
            out = np.zeros_like(z)
            for a in reversed(self.coeffs):
                out = out * z + a
        return complex(out) if scalar else out

    def derivative(self, k, z):
        """k-th derivative at ``z`` in closed form."""
        if k < 0:
            raise ValueError("derivative order must be nonnegative")
        if k == 0:
            return self(z)
        z = complex(z)
        self._check(z)
        kind = self.kind
        if kind == "exp":
            return cmath.exp(z)
        if kind in ("sin", "cos"):
            shift = k % 4 if kind == "sin" else (k + 1) % 4
            return (cmath.sin(z), cmath.cos(z), -cmath.sin(z), -cmath.cos(z))[shift]
        if kind == "log":
            return (-1) ** (k - 1) * math.factorial(k - 1) / z**k
        if kind == "recip":
            return (-1) ** k * math.factorial(k) / (z - self.pole) ** (k + 1)
        if kind == "pow":
            if k > self.degree:
                return 0j
            return falling_factorial(self.degree, k) * z ** (self.degree - k)
        out = 0j
        for j in range(len(self.coeffs) - 1, k - 1, -1):
            out = out * z + falling_factorial(j, k) * self.coeffs[j]
        return out

    def taylor_coefficient(self, n, c):
        """f^(n)(c) / n!, computed without forming n! where avoidable."""
        if n < 0:
            raise ValueError("coefficient index must be nonnegative")
        if n == 0:
            return self(c)
        c = complex(c)
        self._check(c)
        kind = self.kind
        if kind == "log":
            return (-1) ** (n - 1) / (n * c**n)
        if kind == "recip":
            return (-1) ** n / (c - self.pole) ** (n + 1)
        if kind == "pow":
            if n > self.degree:
                return 0j
            return math.comb(self.degree, n) * c ** (self.degree - n)
        if kind == "poly":
            out = 0j
            for j in range(len(self.coeffs) - 1, n - 1, -1):
                out = out * c + math.comb(j, n) * self.coeffs[j]
            return out
        return self.derivative(n, c) * inverse_factorial(n)

    # -- text form ------------------------------------------------------
    @property
    def spec(self):
        if self.kind == "pow":
            return f"pow:{self.degree}"
        if self.kind == "poly":
            return "poly:" + ",".join(format_scalar(a) for a in self.coeffs)
        if self.kind == "recip":
            return f"recip:{format_scalar(self.pole)}"
        return self.kind

    def __str__(self):
        return self.spec


def exponential():
    return AnalyticFunction("exp")


def sine():
    return AnalyticFunction("sin")


def cosine():
    return AnalyticFunction("cos")


def logarithm():
    """Principal branch; the cut is the closed negative real axis."""
    return AnalyticFunction("log")


def monomial(p):
    return AnalyticFunction("pow", degree=int(p))


def polynomial(coeffs):
    """Polynomial with ascending coefficients ``c0 + c1 x + ...``."""
    return AnalyticFunction("poly", coeffs=tuple(complex(c) for c in coeffs))


def reciprocal_shift(a):
    """x -> 1 / (x - a)."""
    return AnalyticFunction("recip", pole=complex(a))


def evaluate(f, z):
    return f(z)


def eval_derivative(f, k, z):
    return f.derivative(k, z)


def taylor_coefficient(f, n, c):
    return f.taylor_coefficient(n, c)


def parse_function(text):
    """Parse a function spec string such as ``exp``, ``pow:3`` or ``poly:1,(0,2)``."""
    text = text.strip()
    name, _, arg = text.partition(":")
    if name in ("exp", "sin", "cos", "log"):
        if arg:
            raise ParseError(f"function {name!r} takes no argument")
        return AnalyticFunction(name)
    if name == "pow":
        try:
            p = int(arg)
        except ValueError:
            raise ParseError(f"malformed exponent in {text!r}") from None
        if p < 0:
            raise ParseError(f"negative exponent in {text!r}")
        return monomial(p)
    if name == "poly":
        if not arg:
            raise ParseError("polynomial needs at least one coefficient")
        return polynomial([parse_scalar(tok) for tok in split_top_level(arg)])
    if name == "recip":
        if not arg:
            raise ParseError("recip needs a pole location")
        return reciprocal_shift(parse_scalar(arg))
    raise ParseError(f"unknown function spec {text!r}")
