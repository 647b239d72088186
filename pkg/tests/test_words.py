import pytest
from hypothesis import given
from hypothesis import strategies as st

from shiftpress.errors import InputError
from shiftpress.words import check_symbols, format_word, parse_word


def test_format_small_alphabet():
    assert format_word((0, 1, 1, 0)) == "0110"
    assert format_word(()) == ""


def test_format_large_symbols_dotted():
    assert format_word((0, 12, 3)) == "0.12.3"


def test_parse_round_trip():
    assert parse_word("0110") == (0, 1, 1, 0)
    assert parse_word("0.12.3") == (0, 12, 3)
    assert parse_word("") == ()


def test_check_symbols_rejects_out_of_range():
    with pytest.raises(InputError):
        check_symbols((0, 2), 2)
    with pytest.raises(InputError):
        check_symbols((-1,), 2)


def test_check_symbols_rejects_bool():
    with pytest.raises(InputError):
        check_symbols((True,), 2)


@given(st.lists(st.integers(min_value=0, max_value=40), max_size=12))
def test_format_parse_round_trip(symbols):
    w = tuple(symbols)
    if len(w) == 1 and w[0] > 9:
        # documented ambiguity: bare multi-digit singletons read per char
        return
    assert parse_word(format_word(w)) == w
