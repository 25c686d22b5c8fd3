import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from epsdr.connect import (Connection, NuChoice, cyclic_vector, detect_admissible, epsilon_degree, gauge,
                           index_of_derivation, irregularity, pullback_ramified, pushforward,
                           regular_singular_data)
from epsdr.errors import DomainViolation, NotAdmissible
from epsdr.laurent import Laurent
from epsdr.scalars import QQX
from epsdr.suites import admissible_connection, random_gauge, regular_connection

X = QQX.gen()


def L(d):
    return Laurent.from_dict(QQX, d)


def zero(n):
    return [[L({}) for _ in range(n)] for _ in range(n)]


def test_gauge_examples():
    c = Connection([[L({-2: X})]], [[L({-1: -1})]])
    same = gauge(c, [[L({0: 1})]])
    assert same.a_t == c.a_t and same.a_x == c.a_x
    assert gauge(Connection([[L({})]]), [[L({1: 1})]]).a_t == [[L({-1: -1})]]
    g, ginv = random_gauge(random.Random(3), 2)
    back = gauge(gauge(c.direct_sum(c), g, ginv), ginv, g)
    assert back.a_t == c.direct_sum(c).a_t


def test_flatness_enforced():
    with pytest.raises(DomainViolation):
        Connection([[L({-2: X})]], [[L({-1: 1})]])


def test_cyclic_vector_examples():
    c = Connection([[L({-2: X})]])
    data = cyclic_vector(c)
    # tau e_1 = a_0 e_1 with tau = t d/dt; written as the operator tau - a_0
    # the constant term is -x/t, and either way -v(a_0) = 1
    assert data.coefficients[0].agrees(L({-1: X}))
    diag = Connection([[L({-1: 1}), L({})], [L({}), L({-1: 2})]])
    data = cyclic_vector(diag)
    # (tau - 1)(tau - 2) = tau^2 - 3 tau + 2
    assert data.coefficients[0].agrees(L({0: -2})) and data.coefficients[1].agrees(L({0: 3}))
    companion = Connection([[L({}), L({-1: 1})], [L({0: 1}), L({-1: X})]])
    assert cyclic_vector(companion).attempts == 1


@pytest.mark.parametrize("entry, irr", [({-2: X}, 1), ({-1: Fraction(3, 2)}, 0), ({-3: 1}, 2)])
def test_irregularity_examples(entry, irr):
    assert irregularity(Connection([[L(entry)]])) == irr


def test_epsilon_degree_examples():
    c = Connection([[L({-2: X})]])
    assert epsilon_degree(c, NuChoice.simple(0)) == 2
    assert epsilon_degree(Connection(zero(3)), NuChoice.simple(-1)) == 0
    reg = Connection([[L({-1: 1}), L({-1: 1})], [L({}), L({-1: 2})]])
    assert epsilon_degree(reg, NuChoice.simple(0)) == 2


def test_detect_admissible_examples():
    data = detect_admissible(Connection([[L({-2: X})]], [[L({-1: -1})]]))
    assert data.m == 2 and data.g == [[L({0: X})]] and data.eta == [[L({0: -1})]]
    with pytest.raises(NotAdmissible):
        detect_admissible(Connection([[L({-1: 2})]], [[L({0: 1})]]))
    with pytest.raises(NotAdmissible):
        detect_admissible(Connection([[L({-2: X})]], [[L({-2: 1})]], check_flat=False))


def test_regular_singular_examples():
    r = regular_singular_data(Connection([[L({-1: 2})]], [[L({0: 1})]]))
    assert r.kappa == [[2]] and r.eta0 == [[1]]
    assert regular_singular_data(Connection(zero(2), zero(2))).nonsingular
    up = Connection([[L({-1: 1}), L({-1: 1})], [L({}), L({-1: 1})]])
    assert regular_singular_data(up).kappa == [[1, 1], [0, 1]]


def test_ramified_examples():
    c = Connection([[L({-1: 1})]])
    assert pullback_ramified(c, 1).a_t == c.a_t
    assert pullback_ramified(c, 2).a_t == [[L({-1: 2})]]
    pushed = pushforward(Connection([[L({-2: 1})]]), 2)
    assert pushed.rank == 2 and irregularity(pushed) == 1
    nu = NuChoice.simple(0)
    assert epsilon_degree(pushed, nu) == index_of_derivation(pushed, nu)


@settings(max_examples=10)
@given(st.integers(0, 10 ** 6), st.integers(1, 3), st.integers(2, 4))
def test_irregularity_gauge_invariant(seed, n, m):
    rng = random.Random(seed)
    c = admissible_connection(rng, n, m, gauged=False)
    g, ginv = random_gauge(rng, n)
    moved = gauge(c, g, ginv)
    assert moved.is_flat()
    assert irregularity(moved) == irregularity(c)
    shifts = [rng.randint(-2, 2) for _ in range(n)]
    diag = [[L({shifts[i]: 1}) if i == j else L({}) for j in range(n)] for i in range(n)]
    dinv = [[L({-shifts[i]: 1}) if i == j else L({}) for j in range(n)] for i in range(n)]
    assert irregularity(gauge(c, diag, dinv)) == irregularity(c)


@settings(max_examples=10)
@given(st.integers(0, 10 ** 6), st.sampled_from(["adm", "reg"]), st.sampled_from(["adm", "reg"]))
def test_irregularity_additive(seed, k1, k2):
    rng = random.Random(seed)

    def piece(kind):
        if kind == "adm":
            return admissible_connection(rng, 1, rng.randint(2, 3))
        return regular_connection(rng, 1)
    c1, c2 = piece(k1), piece(k2)
    assert irregularity(c1.direct_sum(c2)) == irregularity(c1) + irregularity(c2)


@settings(max_examples=8)
@given(st.integers(0, 10 ** 6), st.integers(-2, 1))
def test_degree_equals_index(seed, ell):
    rng = random.Random(seed)
    c = admissible_connection(rng, rng.randint(1, 2), rng.randint(2, 3))
    nu = NuChoice(ell, L({0: rng.randint(1, 4), 1: rng.randint(-2, 2)}))
    assert epsilon_degree(c, nu) == index_of_derivation(c, nu)
