"""Epsilon-connection classes in Q(x) dx, measured against the trivialization
given by the standard lattice O^n and the Q-span of the stored basis.
"""
from dataclasses import dataclass
from fractions import Fraction

from .connect import (NuChoice, as_nu, blocks, detect_admissible, epsilon_degree,
                      regular_singular_data, restrict)
from .errors import NotAdmissible, NotRegularSingularInBasis
from .kforms import AbsForm, KForm, dlog_class_test, res_wedge
from .laurent import Laurent
from .linalg import det, lmat_inverse, lmat_map, lmat_mul, lmat_trace
from .scalars import QQX

LATTICE_TAG = "standard lattice O^n, rational structure from the stored basis"


@dataclass
class EpsilonClass:
    degree: int
    form: KForm
    tag: str = LATTICE_TAG
    branch: str = "admissible"

    @property
    def parity(self):
        return self.degree % 2

    def __add__(self, other):
        if self.form is None or other.form is None:
            form = None
        else:
            form = self.form + other.form
        return EpsilonClass(self.degree + other.degree, form, self.tag, "block")


def _dlog_u0(nu):
    return KForm.dlog(nu.u0)


def _cut(u, form):
    """Drop the terms of the unit u that cannot reach the residue against form."""
    orders = [a.order() for a in (form.a_t, form.a_x) if a.c]
    need = 1 - min(orders) if orders else 1
    return u.truncate(max(1, need) + 1)


def _res_dlog(u, form):
    return res_wedge(AbsForm.dlog(_cut(u, form)), form)


def _trace_form(c):
    return AbsForm(c.trace_t(), c.trace_x())


def eps_class_admissible(c, nu):
    """Class for A_t = t^-m g, A_x = t^(1-m) eta with g(0) invertible.

    form = phi1 + phi2 + phi3 with
      phi1 = Res Tr(g^-1 d_t g dt ^ A_x dx) - (m/2) dlog det g(0),
      phi2 = (l + m) Res(Tr A_x dx ^ dt/t),
      phi3 = n (l/2 + m) dlog u0 - Res(dlog u ^ Tr A).
    """
    nu = as_nu(nu, c.ring)
    data = detect_admissible(c)
    n, m, ell = c.rank, data.m, nu.ell
    # A_x has order >= 1 - m, so g^-1 g' is needed only below t^(m-1)
    g = [[e.truncate(m) for e in row] for row in data.g]
    ginv = lmat_inverse(g)
    dg = lmat_map(g, Laurent.deriv_t)
    # the dx-row of the wedge vanishes for the first factor, so only -Tr(A_x g^-1 g') survives
    phi1 = KForm(-lmat_trace(lmat_mul(lmat_mul(ginv, dg), c.a_x)).res_t())
    g0 = [[e.coeff(0) for e in row] for row in data.g]
    phi1 = phi1 - KForm.dlog(det(g0)) * Fraction(m, 2)
    dt_over_t = AbsForm.dt(Laurent.monomial(c.ring, -1, 1))
    phi2 = res_wedge(AbsForm.dx(c.trace_x()), dt_over_t) * (ell + m)
    phi3 = _dlog_u0(nu) * (n * (Fraction(ell, 2) + m)) - _res_dlog(nu.u, _trace_form(c))
    return EpsilonClass(epsilon_degree(c, nu), phi1 + phi2 + phi3, LATTICE_TAG, "admissible")


def eps_class_regular(c, nu):
    """Class for pole order <= 1: (l+1) Tr eta0 dx - (Tr kappa - n(l/2+1)) dlog u0."""
    nu = as_nu(nu, c.ring)
    data = regular_singular_data(c)
    n, ell = c.rank, nu.ell
    form = KForm(0)
    if ell + 1:
        if data.eta0 is None:
            raise NotRegularSingularInBasis("fiber connection needed but horizontal part is absent")
        form = KForm(sum((data.eta0[i][i] for i in range(n)), QQX.zero()) * (ell + 1))
    tr_kappa = sum((data.kappa[i][i] for i in range(n)), QQX.zero())
    form = form - _dlog_u0(nu) * (tr_kappa - n * (Fraction(ell, 2) + 1))
    branch = "nonsingular" if data.nonsingular else "regular"
    return EpsilonClass(epsilon_degree(c, nu), form, LATTICE_TAG, branch)


def eps_class(c, nu):
    """Dispatch to the admissible or regular branch; split block sums first if needed."""
    nu = as_nu(nu, c.ring)
    try:
        return eps_class_admissible(c, nu)
    except NotAdmissible:
        pass
    try:
        return eps_class_regular(c, nu)
    except NotRegularSingularInBasis:
        pass
    parts = blocks(c)
    if len(parts) > 1:
        out = None
        for idx in parts:
            piece = eps_class(restrict(c, idx), nu)
            out = piece if out is None else out + piece
        out.branch = "block" if out.form is not None else "unsupported"
        return out
    return EpsilonClass(epsilon_degree(c, nu), None, LATTICE_TAG, "unsupported")


def change_of_nu(chi, u, n, ell):
    """(n l / 2) dlog u0 + Res(dlog u ^ chi) for u a unit of K[[t]]."""
    return KForm.dlog(u.coeff(0)) * Fraction(n * ell, 2) + _res_dlog(u, chi)


def coherence_defect(c, nu):
    """Difference between the two routes for changing nu = u t^l dt to t^l dt.

    Direct: class at u t^l dt minus class at t^l dt.  Via the comparison
    isomorphism: change_of_nu with chi = Tr A - (l+m) n dt/t and the unit u^-1.
    Returns the KForm difference (zero when coherent).
    """
    nu = as_nu(nu, c.ring)
    m = detect_admissible(c).m
    n, ell = c.rank, nu.ell
    direct = eps_class_admissible(c, nu).form - eps_class_admissible(c, NuChoice.simple(ell)).form
    chi = _trace_form(c) - AbsForm.dt(Laurent.monomial(c.ring, -1, (ell + m) * n))
    via = change_of_nu(chi, _cut(nu.u, chi).inv(), n, ell)
    return direct - via


@dataclass
class TwistReport:
    ok: bool
    form_v: KForm
    form_l: KForm
    degree_v: int
    degree_l: int
    rank: int


def rank1_twist_check(v, line, nu):
    """V = L (x) P with P unipotent: class(V) = n class(L) in form and degree."""
    n = v.rank
    ev, el = eps_class(v, nu), eps_class(line, nu)
    ok = (ev.form is not None and el.form is not None and ev.form == el.form * n
          and ev.degree == n * el.degree)
    return TwistReport(ok, ev.form, el.form, ev.degree, el.degree, n)


@dataclass
class DualityReport:
    ok: bool
    form: KForm
    dual_form: KForm
    witness: object
    degree: int
    dual_degree: int


def duality_class(c, nu):
    """Compare the class of c at nu with the class of the dual at -nu.

    The forms must sum to a logarithmic differential.  Both lines have the
    same degree, and pairing one with the inverse of the other leaves degree 0.
    """
    nu = as_nu(nu, c.ring)
    e = eps_class(c, nu)
    ed = eps_class(c.dual(), nu.negate())
    if e.form is None or ed.form is None:
        return DualityReport(False, e.form, ed.form, None, e.degree, ed.degree)
    res = dlog_class_test(e.form + ed.form)
    ok = res.is_dlog and e.degree - ed.degree == 0
    return DualityReport(ok, e.form, ed.form, res.witness, e.degree, ed.degree)
