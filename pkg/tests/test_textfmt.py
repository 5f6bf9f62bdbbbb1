import pytest

from fgsym import dumps, parse
from fgsym.errors import ParseError

from conftest import DATA

SAMPLE = """\
# comment line
range bool true false
rv A bool
rv B bool   # trailing comment
factor phi1 A B : 1 2.5 0.125 4e2
evidence A true
"""


def test_parse_sample():
    fg, evidence = parse(SAMPLE)
    assert sorted(fg.rvs) == ["A", "B"]
    assert list(fg.factors) == ["phi1"]
    assert evidence == {"A": "true"}


def test_roundtrip_canonical_is_byte_exact():
    fg, evidence = parse(SAMPLE)
    text = dumps(fg, evidence)
    fg2, evidence2 = parse(text)
    assert dumps(fg2, evidence2) == text
    assert evidence2 == evidence


def test_roundtrip_data_files():
    for name in ("fig1.fg", "fig2.fg", "fig3.fg"):
        raw = (DATA / name).read_text()
        fg, ev = parse(raw)
        again, ev2 = parse(dumps(fg, ev))
        assert dumps(again, ev2) == dumps(fg, ev)
        assert sorted(again.factors) == sorted(fg.factors)


def test_nullary_factor_line():
    fg, _ = parse("factor c : 5\n")
    assert len(fg.factors["c"].table) == 1


@pytest.mark.parametrize(
    "text",
    [
        "range bool true true\n",  # duplicate values
        "rv A bool\n",  # unknown range
        "range bool true false\nrv A bool\nrv A bool\n",  # duplicate rv
        "range bool true false\nrv A bool\nfactor f A : 1 2 3\n",  # wrong length
        "range bool true false\nrv A bool\nfactor f B : 1 2\n",  # unknown rv
        "range bool true false\nrv A bool\nfactor f A : 1 x\n",  # bad decimal
        "range bool true false\nrv A bool\nfactor f A : 0 1\n",  # nonpositive
        "range bool true false\nrv A bool\nfactor f A 1 2\n",  # missing colon
        "range bool true false\nrv A bool\nevidence A maybe\n",  # bad evidence value
        "evidence A true\n",  # evidence before rv
        "frobnicate x\n",  # unknown directive
    ],
)
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse(text)


def test_parse_error_carries_line_number():
    with pytest.raises(ParseError) as err:
        parse("range bool true false\nrv A nosuch\n")
    assert err.value.line == 2
