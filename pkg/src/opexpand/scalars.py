"""Text syntax for scalars: bare decimals for reals, ``(re,im)`` for complex."""

import re

from .errors import ParseError

_COMPLEX_RE = re.compile(r"^\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*\)$")


def _parse_real(text):
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"malformed real number {text!r}") from None
    if value != value or value in (float("inf"), float("-inf")):
        raise ParseError(f"non-finite number {text!r}")
    return value


def parse_scalar(text):
    """Parse ``x`` or ``(re,im)`` into a Python complex."""
    text = text.strip()
    m = _COMPLEX_RE.match(text)
    if m:
        return complex(_parse_real(m.group(1)), _parse_real(m.group(2)))
    if "(" in text or ")" in text or "," in text:
        raise ParseError(f"malformed complex literal {text!r}")
    return complex(_parse_real(text), 0.0)


def format_scalar(z):
    """Shortest text that re-parses to exactly ``z``."""
    z = complex(z)
    if z.imag == 0.0 and str(z.imag)[0] != "-":
        return repr(z.real)
    return f"({z.real!r},{z.imag!r})"


def format_scalar_digits(z, digits=16, real_only=False):
    """Fixed-precision rendering used by reports."""
    z = complex(z)
    if real_only:
        return f"{z.real:.{digits}g}"
    return f"({z.real:.{digits}g},{z.imag:.{digits}g})"


def split_top_level(text, sep=","):
    """Split on ``sep`` outside parentheses."""
    parts, depth, current = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ParseError(f"unbalanced parentheses in {text!r}")
        if ch == sep and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    if depth != 0:
        raise ParseError(f"unbalanced parentheses in {text!r}")
    parts.append("".join(current))
    return parts
