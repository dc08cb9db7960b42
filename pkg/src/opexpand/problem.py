"""Plain-text problem files holding a diagonal spectrum and a perturbation.

Layout: the dimension N, then N diagonal entries, then the N x N
perturbation row-major. Tokens are whitespace separated, ``#`` comments run
to end of line, complex entries are written ``(re,im)``::

    2
    1 2
    0 0.5
    0.5 0
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, ParseError
from .scalars import format_scalar, parse_scalar


def _tokens(text):
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0]
        for pos, tok in enumerate(line.split(), start=1):
            yield lineno, pos, tok


def parse_problem(text):
    """Parse problem text (str or UTF-8 bytes) into ``(lam, tau)`` arrays.

    Raises
    ------
    ParseError
        Malformed token or input ending early; carries 1-based line and
        token-in-line positions.
    DimensionError
        Tokens left over after the N + N^2 entries.
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8: {exc}") from None
    tokens = list(_tokens(text))
    if not tokens:
        raise ParseError("empty problem file", line=1)
    line, pos, head = tokens[0]
    try:
        n = int(head)
    except ValueError:
        raise ParseError(f"dimension must be an integer, got {head!r}", line, pos) from None
    if n < 1:
        raise ParseError(f"dimension must be positive, got {n}", line, pos)

    body = tokens[1:]
    want = n + n * n
    if len(body) < want:
        last_line = text.count("\n") + 1
        raise ParseError(
            f"expected {want} entries after the dimension, found {len(body)}", line=last_line
        )
    if len(body) > want:
        line, pos, tok = body[want]
        raise DimensionError(
            f"{len(body) - want} unexpected trailing token(s), first {tok!r} at line {line} token {pos}"
        )
    values = np.empty(want, dtype=complex)
    for k, (line, pos, tok) in enumerate(body):
        try:
            values[k] = parse_scalar(tok)
        except ParseError as exc:
            raise ParseError(str(exc), line, pos) from None
    return values[:n].copy(), values[n:].reshape(n, n)


def format_problem(lam, tau):
    """Text that :func:`parse_problem` maps back to exactly ``(lam, tau)``."""
    lam = np.asarray(lam, dtype=complex).ravel()
    tau = np.asarray(tau, dtype=complex)
    n = lam.size
    if tau.shape != (n, n):
        raise DimensionError(f"tau has shape {tau.shape}, spectrum has {n} entries")
    lines = [str(n), " ".join(format_scalar(z) for z in lam)]
    lines += [" ".join(format_scalar(z) for z in row) for row in tau]
    return "\n".join(lines) + "\n"


def read_problem(path):
    with open(path, "rb") as fh:
        return parse_problem(fh.read())
