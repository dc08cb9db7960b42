import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opexpand.contour import cauchy_coefficient, choose_contour
from opexpand.divided import (
    cluster_nodes,
    coefficient_A,
    coefficient_A1,
    divided_difference,
)
from opexpand.errors import DepthError, DomainError
from opexpand.functions import (
    cosine,
    exponential,
    logarithm,
    monomial,
    polynomial,
    reciprocal_shift,
    sine,
)

from oracles import lagrange_divided_difference, random_disc

ENTIRE = [exponential(), sine(), cosine(), monomial(5), polynomial([1, -1, 0.5, 2, 0.25j])]


def test_coefficient_A1_examples():
    assert coefficient_A1(monomial(2), 3, 1) == 4
    c = 0.37 - 0.2j
    assert coefficient_A1(exponential(), c, c) == exponential()(c)
    near = coefficient_A1(monomial(3), 2, 2 + 1e-14)
    assert abs(near - 12) <= 1e-9 * 12


def test_divided_difference_examples():
    assert divided_difference(monomial(2), [1, 2, 3]) == pytest.approx(1, abs=1e-15)
    assert divided_difference(exponential(), [0, 0, 0]) == 0.5
    nodes = [0, np.log(2), np.log(4)]
    contour = choose_contour(nodes, exponential())
    quad = cauchy_coefficient(exponential(), nodes, contour)
    dd = divided_difference(exponential(), nodes)
    assert abs(dd - quad) <= 1e-9 * abs(quad)
    assert dd == pytest.approx(lagrange_divided_difference(exponential(), nodes), rel=1e-13)


def test_coefficient_A_examples(rng):
    lam = random_disc(rng, 4, 2)
    for path in [(0, 1), (2, 3), (3, 0)]:
        assert coefficient_A(monomial(1), lam, path) == pytest.approx(1, rel=1e-14)
    for f in (exponential(), sine(), logarithm()):
        lam = np.array([1.2 + 0.1j, 0.4, 2.0])
        for i in range(3):
            assert coefficient_A(f, lam, (i, i)) == pytest.approx(f.derivative(1, lam[i]), rel=1e-14)


@pytest.mark.parametrize("f", ENTIRE, ids=str)
def test_recurrence_against_lagrange(f, rng):
    for _ in range(20):
        k = rng.integers(2, 7)
        x = random_disc(rng, k, 2.5)
        ref = lagrange_divided_difference(f, x)
        got = divided_difference(f, x)
        assert abs(got - ref) <= 1e-11 * max(abs(ref), 1e-3)


def test_permutation_symmetry(rng):
    x = np.array([0.1, 1.3 + 0.5j, -0.8 + 0.2j, 2.1 - 1j, -1.5j])
    for f in ENTIRE:
        ref = divided_difference(f, x)
        for perm in itertools.permutations(range(len(x))):
            got = divided_difference(f, x[list(perm)])
            assert abs(got - ref) <= 1e-12 * abs(ref)


def test_permutation_symmetry_confluent():
    x = [0.5, 1.5, 0.5, 0.5, 2.0 + 1j, 1.5]
    f = exponential()
    ref = divided_difference(f, x)
    for perm in itertools.permutations(range(len(x))):
        assert divided_difference(f, [x[i] for i in perm]) == pytest.approx(ref, rel=1e-13)


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.complex_numbers(max_magnitude=3, allow_nan=False), min_size=2, max_size=5),
    st.complex_numbers(max_magnitude=2, allow_nan=False),
    st.complex_numbers(max_magnitude=2, allow_nan=False),
)
def test_linearity_in_f(nodes, alpha, beta):
    groups, _ = cluster_nodes(nodes)
    if len(groups) != len(nodes) or min(
        abs(a - b) for a, b in itertools.combinations(nodes, 2)
    ) < 0.1:
        return
    a = [1, 2, -1, 0.5, 0.25, 3]
    b = [0, -1j, 2, 0, 1, -0.5]
    combo = polynomial([alpha * x + beta * y for x, y in zip(a, b)])
    lhs = divided_difference(combo, nodes)
    da = divided_difference(polynomial(a), nodes)
    db = divided_difference(polynomial(b), nodes)
    rhs = alpha * da + beta * db
    scale = abs(alpha * da) + abs(beta * db)
    assert abs(lhs - rhs) <= 1e-12 * max(scale, 1e-300) + 1e-300


@pytest.mark.parametrize("p", range(0, 7))
def test_degree_collapse(p, rng):
    x = random_disc(rng, p + 1, 2)
    assert divided_difference(monomial(p), x) == pytest.approx(1, rel=1e-11)
    x = random_disc(rng, p + 2, 2)
    assert abs(divided_difference(monomial(p), x)) <= 1e-12
    assert divided_difference(monomial(p), [0.7] * (p + 2)) == 0
    assert divided_difference(monomial(p), [0.7] * (p + 1)) == 1


def test_second_order_confluent_closed_forms():
    # orders 1 and 2 with a repeated node, as displayed in closed form
    f = exponential()
    a, b = 0.3, 1.1
    expect = (f(a) - f(b)) / (a - b) ** 2 - f.derivative(1, b) / (a - b)
    assert divided_difference(f, [a, b, b]) == pytest.approx(expect, rel=1e-14)
    assert divided_difference(f, [b, a, b]) == pytest.approx(expect, rel=1e-14)
    c = 0.8 - 0.4j
    for g in (exponential(), sine(), logarithm(), reciprocal_shift(3)):
        assert divided_difference(g, [c, c, c]) == pytest.approx(0.5 * g.derivative(2, c), rel=1e-14)


def test_hermite_table_against_limit():
    # a group of k+1 coinciding nodes next to distinct ones
    f = sine()
    c, d = 0.6, -0.9 + 0.3j
    exact = divided_difference(f, [c, c, c, d])
    for t in (1e-3, 1e-4):
        approx = divided_difference(f, [c, c + t, c + 2j * t, d])
        assert abs(approx - exact) <= 10 * t * abs(exact)


@pytest.mark.parametrize(
    "f", [exponential(), sine(), cosine(), logarithm(), monomial(4), reciprocal_shift(-3)], ids=str
)
def test_confluence_continuity(f):
    a = 1.7 + 0.4j
    rest = [0.2 - 0.5j]
    conf = divided_difference(f, [a, a] + rest)
    errs = []
    for t in (1e-2, 1e-4, 1e-6):
        errs.append(abs(divided_difference(f, [a, a + t] + rest) - conf) / abs(conf))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] <= 1e-5
    # inside the merge tolerance the confluent branch takes over
    assert divided_difference(f, [a, a + 1e-11] + rest) == pytest.approx(conf, rel=1e-9)


def test_cluster_nodes_order_independent():
    x = [2.0, 1.0 + 1e-12, 1.0, 3.0 + 1j, 2.0 + 1e-11j]
    groups, centers = cluster_nodes(x)
    assert sorted(sorted(g) for g in groups) == [[0, 4], [1, 2], [3]]
    rev_groups, rev_centers = cluster_nodes(x[::-1])
    assert np.allclose(sorted(centers, key=lambda z: (z.real, z.imag)),
                       sorted(rev_centers, key=lambda z: (z.real, z.imag)))


def test_depth_cap_and_domain():
    with pytest.raises(DepthError):
        divided_difference(exponential(), np.linspace(0, 1, 65))
    divided_difference(exponential(), np.linspace(0, 1, 64))
    with pytest.raises(DomainError):
        divided_difference(logarithm(), [1, -1])
    with pytest.raises(ValueError):
        coefficient_A(exponential(), [1, 2], [0])
