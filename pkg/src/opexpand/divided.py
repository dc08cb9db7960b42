"""Expansion coefficients as generalized divided differences.

Distinct nodes go through the difference-quotient recurrence that peels off
the first two nodes of an index path. Nodes that coincide within the
confluence tolerance are merged and handled by a Hermite-type table that
substitutes Taylor coefficients for the vanishing quotients.
"""

from __future__ import annotations

import numpy as np

from .errors import DepthError

CONFLUENCE_RTOL = 1e-10
MAX_NODES = 64


def are_confluent(a, b, rtol=CONFLUENCE_RTOL):
    return abs(a - b) <= rtol * max(1.0, abs(a), abs(b))


def cluster_nodes(nodes, rtol=CONFLUENCE_RTOL):
    """Partition node positions into confluence groups.

    Single-link clustering over all pairs, so the result does not depend on
    the input order. Groups are returned sorted by the (real, imag) order of
    their smallest member, positions inside a group ascending.

    Returns
    -------
    groups : list of list of int
    centers : list of complex
        Mean node value of each group.
    """
    nodes = [complex(z) for z in nodes]
    n = len(nodes)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if are_confluent(nodes[i], nodes[j], rtol):
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    members = {}
    for i in range(n):
        members.setdefault(find(i), []).append(i)
    groups = sorted(
        members.values(),
        key=lambda g: min((nodes[i].real, nodes[i].imag) for i in g),
    )
    centers = [sum(nodes[i] for i in g) / len(g) for g in groups]
    return groups, centers


def coefficient_A1(f, a, b):
    """First-order coefficient: the difference quotient, or f' when a ~ b."""
    a, b = complex(a), complex(b)
    if are_confluent(a, b):
        return f.derivative(1, 0.5 * (a + b))
    return (f(a) - f(b)) / (a - b)


def _distinct_recurrence(f, x):
    # level[h] holds the coefficient over {x[h]} + x[s:], for h < s
    level = np.asarray(f(x), dtype=complex)
    n = len(x) - 1
    for s in range(n, 0, -1):
        level = (level[:s] - level[s]) / (x[:s] - x[s])
    return complex(level[0])


def _hermite_table(f, z, group_of):
    n = len(z) - 1
    col = np.asarray(f(z), dtype=complex)
    for j in range(1, n + 1):
        new = np.empty(n + 1 - j, dtype=complex)
        for i in range(n + 1 - j):
            if group_of[i] == group_of[i + j]:
                new[i] = f.taylor_coefficient(j, z[i])
            else:
                new[i] = (col[i + 1] - col[i]) / (z[i + j] - z[i])
        col = new
    return complex(col[0])


def divided_difference(f, nodes, rtol=CONFLUENCE_RTOL):
    """Generalized divided difference of ``f`` over ``nodes``.

    Symmetric in the nodes. A group of k+1 confluent nodes contributes
    through f^(k)/k!, so a single node gives f, two equal nodes give f' and
    three equal nodes give f''/2.

    Raises
    ------
    DepthError
        More than 64 nodes.
    DomainError
        A node lies outside the analyticity domain of ``f``.
    """
    x = np.asarray(nodes, dtype=complex).ravel()
    if x.size == 0:
        raise ValueError("need at least one node")
    if x.size > MAX_NODES:
        raise DepthError(f"{x.size} nodes exceed the table cap of {MAX_NODES}")
    if x.size == 1:
        return f(complex(x[0]))
    groups, centers = cluster_nodes(x, rtol)
    if len(groups) == x.size:
        return _distinct_recurrence(f, x)
    if len(groups) == 1:
        return f.taylor_coefficient(x.size - 1, centers[0])
    z, group_of = [], []
    for g, (members, c) in enumerate(zip(groups, centers)):
        z.extend([c] * len(members))
        group_of.extend([g] * len(members))
    return _hermite_table(f, np.array(z), group_of)


def coefficient_A(f, lam, path, rtol=CONFLUENCE_RTOL):
    """Coefficient multiplying tau[i,m1] ... tau[m_{n-1},p] for the index path."""
    path = list(path)
    if len(path) < 2:
        raise ValueError("an index path needs at least two indices")
    lam = np.asarray(lam, dtype=complex)
    return divided_difference(f, lam[path], rtol)
