import pytest

from cryptovar.errors import ParseError, UnknownPortfolioError, ValidationError
from cryptovar.varengine import PortfolioBook, extract_indices


@pytest.fixture
def book():
    return PortfolioBook()


def test_add_then_list(book):
    book.add("p1", "BTC-29DEC23", 2.0)
    rows = book.positions("p1")
    assert len(rows) == 1
    assert rows[0].instrument.id == "BTC-29DEC23"
    assert rows[0].quantity == 2.0


def test_duplicate_add_merges(book):
    book.add("p1", "BTC-29DEC23", 2.0)
    book.add("p1", "BTC-29DEC23", 3.0)
    assert book.positions("p1")[0].quantity == 5.0


def test_merge_to_zero_removes(book):
    book.add("p1", "BTC-29DEC23", 1.0)
    book.add("p1", "BTC-29DEC23", -1.0)
    assert book.positions("p1") == []


def test_zero_quantity_rejected(book):
    with pytest.raises(ValidationError):
        book.add("p1", "BTC-29DEC23", 0.0)


def test_unknown_instrument_rejected(book):
    with pytest.raises(ParseError):
        book.add("p1", "BTC--X", 1.0)


def test_remove_missing_raises(book):
    with pytest.raises(UnknownPortfolioError):
        book.remove("p1", "BTC-29DEC23")


def test_portfolios_isolated(book):
    book.add("p1", "BTC-29DEC23", 1.0)
    book.add("p2", "ETH-29DEC23", 1.0)
    assert [p.instrument.id for p in book.positions("p1")] == ["BTC-29DEC23"]
    assert book.pids() == ["p1", "p2"]


class TestExtractIndices:
    def test_same_underlying_collapses(self, book):
        book.add("p1", "BTC-29DEC23", 1.0)
        book.add("p1", "BTC-29DEC23-30000-C", 1.0)
        assert extract_indices(book.positions("p1")) == ("BTC",)

    def test_two_underlyings(self, book):
        book.add("p1", "BTC-29DEC23-30000-C", 1.0)
        book.add("p1", "ETH-29DEC23-2000-P", 1.0)
        assert extract_indices(book.positions("p1")) == ("BTC", "ETH")

    def test_empty(self, book):
        assert extract_indices(book.positions("p1")) == ()
