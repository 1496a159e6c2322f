import pytest

from meshcoop.Utils import Utils
from meshcoop.Utils import submasks, members_of, mask_of, format_payoff, tolerance_for, approx_equal, approx_geq

def test_submasks_largest_first():
    assert list(submasks(0b101)) == [0b101, 0b100, 0b001]
    assert list(submasks(0)) == []

def test_members_and_masks():
    assert members_of(0b1011) == [1, 2, 4]
    assert mask_of([1, 2, 4]) == 0b1011
    assert mask_of([]) == 0

def test_tolerances():
    assert tolerance_for(0.5) == pytest.approx(1e-6)
    assert tolerance_for(-2000.0) == pytest.approx(2e-3)
    assert approx_equal(1000.0, 1000.0005)
    assert not approx_equal(1.0, 1.01)
    assert approx_geq(1.0 - 1e-8, 1.0)
    assert not approx_geq(0.9, 1.0)

def test_format_payoff():
    assert format_payoff(None) == "-"
    assert format_payoff(855) == "855.0000"

def test_helpers_exported_by_the_package():
    exported = {name for name in dir(Utils) if not name.startswith("_")}
    assert {"log", "warn", "debug", "configure_logging", "submasks", "members_of", "mask_of", "format_payoff"} <= exported
    assert "get" not in exported
