import random
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from epsdr.connect import Connection, NuChoice, epsilon_degree, gauge, index_of_derivation
from epsdr.epsilon import (change_of_nu, coherence_defect, duality_class, eps_class, rank1_twist_check)
from epsdr.kforms import AbsForm, KForm, witness_associate
from epsdr.laurent import Laurent
from epsdr.scalars import QQX, RatFunc
from epsdr.suites import admissible_connection, random_nu, regular_connection, unipotent

X = QQX.gen()


def L(d):
    return Laurent.from_dict(QQX, d)


def zero(n):
    return [[L({}) for _ in range(n)] for _ in range(n)]


EXP = Connection([[L({-2: X})]], [[L({-1: -1})]])  # d + x dt/t^2 - dx/t


def test_admissible_rank_one_by_hand():
    # g = x, eta = -1, m = 2, u = 1: only -(m/2) dlog g(0) = -dx/x survives,
    # since g is constant in t and Res(-dt/t^2 ^ dx/t) picks up no t^-1 term
    e = eps_class(EXP, NuChoice.simple(0))
    assert e.branch == "admissible"
    assert e.form == KForm(-1 / X)
    assert e.degree == 2 == index_of_derivation(EXP, NuChoice.simple(0))
    assert e.parity == 0


def test_degree_shifts_with_ell():
    # the form is unchanged here because Tr A_x dx ^ dt/t has no residue
    e = eps_class(EXP, NuChoice.simple(-2))
    assert e.degree == 0 and e.form == KForm(-1 / X)


def test_unit_u_has_no_phi3_contribution():
    a = eps_class(EXP, NuChoice(0, L({0: 1})))
    b = eps_class(EXP, NuChoice.simple(0))
    assert a.form == b.form


def test_regular_examples():
    reg = Connection([[L({-1: 2})]], [[L({0: 1})]])  # d + 2 dt/t + dx
    e = eps_class(reg, NuChoice.simple(0))
    # (l+1) Tr eta0 dx - (Tr kappa - n(l/2+1)) dlog 1 = dx
    assert e.branch == "regular" and e.form == KForm(1) and e.degree == 1
    e = eps_class(reg, NuChoice.simple(-1))
    assert e.form.is_zero() and e.degree == 0


def test_nonsingular_example():
    e = eps_class(Connection(zero(1), zero(1)), NuChoice.simple(-2, -1))
    assert e.branch == "nonsingular" and e.form.is_zero() and e.degree == -1


def test_change_of_nu_examples():
    chi = AbsForm.dt(L({-1: 3}))
    assert change_of_nu(chi, L({0: 1}), 1, 0).is_zero()
    # constant u = x contributes only (n l / 2) dlog x
    assert change_of_nu(AbsForm.dt(L({})), L({0: X}), 2, 3) == KForm(3 / X)


def test_duality_example():
    rep = duality_class(EXP, NuChoice.simple(0))
    assert rep.ok and rep.degree == rep.dual_degree == 2
    assert witness_associate(rep.witness, RatFunc.x() ** -2)


def test_unsupported_branch_is_reported():
    # irregular but with a non-invertible leading term, and not split into blocks
    c = Connection([[L({}), L({-2: 1})], [L({}), L({})]], check_flat=False)
    e = eps_class(c, NuChoice.simple(0))
    assert e.branch == "unsupported" and e.form is None
    assert e.degree == index_of_derivation(c, NuChoice.simple(0))


seeds = st.integers(0, 10 ** 6)


@settings(max_examples=8)
@given(seeds)
def test_coherence(seed):
    rng = random.Random(seed)
    c = admissible_connection(rng, rng.randint(1, 2), rng.randint(2, 3))
    assert coherence_defect(c, random_nu(rng, (-3, 1))).is_zero()


@settings(max_examples=8)
@given(seeds, st.sampled_from(["adm", "reg", "non"]), st.sampled_from(["adm", "reg", "non"]))
def test_additivity(seed, k1, k2):
    rng = random.Random(seed)

    def piece(kind):
        if kind == "adm":
            return admissible_connection(rng, 1, rng.randint(2, 3))
        return regular_connection(rng, 1, nonsingular=(kind == "non"))
    c1, c2 = piece(k1), piece(k2)
    nu = random_nu(rng, (-2, 1))
    e1, e2, e = eps_class(c1, nu), eps_class(c2, nu), eps_class(c1.direct_sum(c2), nu)
    assert e.form == e1.form + e2.form
    assert e.degree == e1.degree + e2.degree


@settings(max_examples=8)
@given(seeds, st.integers(-3, 1), st.integers(-3, 1))
def test_degree_depends_linearly_on_ell(seed, l1, l2):
    rng = random.Random(seed)
    n = rng.randint(1, 2)
    c = admissible_connection(rng, n, rng.randint(2, 3))
    d1 = epsilon_degree(c, NuChoice.simple(l1))
    d2 = epsilon_degree(c, NuChoice.simple(l2))
    assert d1 - d2 == n * (l1 - l2)


@settings(max_examples=8)
@given(seeds)
def test_constant_change_of_basis_keeps_class(seed):
    rng = random.Random(seed)
    c = admissible_connection(rng, 2, rng.randint(2, 3))
    a, b = Fraction(rng.randint(-3, 3)), Fraction(rng.randint(1, 3))
    g = [[L({0: b}), L({0: a})], [L({}), L({0: 1})]]
    ginv = [[L({0: 1 / b}), L({0: -a / b})], [L({}), L({0: 1})]]
    nu = random_nu(rng, (-2, 1))
    before, after = eps_class(c, nu), eps_class(gauge(c, g, ginv), nu)
    assert before.form == after.form and before.degree == after.degree


@settings(max_examples=6)
@given(seeds, st.integers(2, 3))
def test_twist_by_unipotent(seed, n):
    rng = random.Random(seed)
    line = admissible_connection(rng, 1, rng.randint(2, 3), gauged=False)
    rep = rank1_twist_check(line.tensor(unipotent(n, rng)), line, random_nu(rng, (-2, 1)))
    assert rep.ok


@settings(max_examples=6)
@given(seeds)
def test_duality(seed):
    rng = random.Random(seed)
    c = admissible_connection(rng, 1, rng.randint(2, 3)) if seed % 2 else regular_connection(rng, 1)
    assert duality_class(c, random_nu(rng, (-3, 1))).ok
