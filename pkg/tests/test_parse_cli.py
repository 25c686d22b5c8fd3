import io
import json
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from epsdr.cli import EXIT_ERROR, EXIT_FAIL, EXIT_INPUT, EXIT_OK, run
from epsdr.errors import ParseError
from epsdr.kforms import KForm
from epsdr.laurent import Laurent, decompose
from epsdr.parse import format_value, parse_expression, parse_family_entry, parse_split
from epsdr.scalars import QQX, NilRing

from strategies import NIL3, nil_elements, ratfuncs

EXAMPLES = Path(__file__).resolve().parent.parent / "examples"
X = QQX.gen()


def test_series_with_precision():
    v = parse_expression("x*t^-2 + 1 (prec 16)")
    assert v.val() == -2 and v.prec == 16
    assert v.coeff(-2) == X and v.coeff(0) == 1


def test_nilpotent_unit():
    u = parse_expression("(1+eps)*t")
    assert isinstance(u.ring, NilRing)
    d, r, _, _ = decompose(u)
    assert d == 1 and r == u.ring.one() + u.ring.eps()


def test_error_position():
    with pytest.raises(ParseError) as info:
        parse_expression("t^")
    assert info.value.column == 3
    with pytest.raises(ParseError):
        parse_expression("1 + * t")


def test_forms_and_constants():
    assert parse_expression("x/(1+x)*dx") == KForm(X / (1 + X))
    series, mark = parse_expression("3*t^-1*dt")
    assert mark == "dt" and series == Laurent.from_dict(QQX, {-1: 3})
    assert parse_expression("7/3") == Fraction(7, 3)


def test_split_and_family_entries():
    s = parse_split("t*(1-t)^2/(t+3)")
    assert s.roots == {Fraction(0): 1, Fraction(1): 2, Fraction(-3): -1}
    with pytest.raises(ParseError):
        parse_family_entry("1/(t-2)", (Fraction(0),))
    assert parse_family_entry("x/t^2", (Fraction(0),)).is_t_constant() is False


@given(st.dictionaries(st.integers(-4, 4), ratfuncs(), max_size=4), st.one_of(st.none(), st.integers(5, 9)))
def test_series_round_trip(terms, prec):
    v = Laurent.from_dict(QQX, terms, prec)
    assert parse_expression(format_value(v), ring=QQX) == v


@given(st.dictionaries(st.integers(-3, 3), nil_elements(NIL3), max_size=3))
def test_nil_round_trip(terms):
    v = Laurent.from_dict(NIL3, terms)
    assert parse_expression(format_value(v), ring=NIL3) == v


# -- command line -----------------------------------------------------------------

def cli(*argv):
    out = io.StringIO()
    code = run(["--format", "json", *argv], out)
    return code, json.loads(out.getvalue())


def test_cli_symbol():
    code, rep = cli("symbol", "--f", "t", "--g", "t")
    assert code == EXIT_OK and rep["value"] == "-1" and rep["schema"] == 1


def test_cli_reciprocity():
    code, rep = cli("reciprocity", "--f", "t*(1-t)", "--g", "(t+2)/t^3")
    assert code == EXIT_OK and rep["passed"]


def test_cli_eps_class_and_product_check():
    code, rep = cli("eps-class", str(EXAMPLES / "admissible_rank1.json"))
    assert code == EXIT_OK and rep["degree"] == 2
    code, rep = cli("product-check", str(EXAMPLES / "kloosterman.json"))
    assert code == EXIT_OK and rep["passed"]


def test_cli_options_after_subcommand():
    out = io.StringIO()
    assert run(["symbol", "--f", "t", "--g", "t^2", "--format", "json", "--precision", "12"], out) == EXIT_OK
    assert json.loads(out.getvalue())["precision"] == 12


def test_cli_exit_codes(tmp_path):
    code, rep = cli("symbol", "--f", "t^", "--g", "t")
    assert code == EXIT_INPUT and rep["error"]["code"] == "parse_error"
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli("irregularity", str(bad))[0] == EXIT_INPUT
    # a non-flat pair is rejected by the domain checks
    unflat = tmp_path / "unflat.json"
    unflat.write_text(json.dumps({"rank": 1, "A_t": [["x*t^-2"]], "A_x": [["t^-1"]]}))
    assert cli("eps-class", str(unflat))[0] == EXIT_ERROR
    assert EXIT_FAIL == 1


def test_cli_verify():
    code, rep = cli("verify", "--suite", "symbols", "--seed", "7")
    assert code == EXIT_OK and rep["passed"]
