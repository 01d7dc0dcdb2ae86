import numpy as np
import pytest

from holder.calibration import dumps, load_calibration, round_up_sig, run_calibration
from holder.fixtures import FixtureSpec, generate, parse_fixture, parse_number


def test_parse_number_fraction():
    assert parse_number("1/64") == 1 / 64
    assert parse_number(" -8 ") == -8.0


def test_appendix_a2_peak():
    f = generate(parse_fixture("appendix_a2:n=1,alpha=0.5", spacing=1 / 64))
    assert f.grid.origin == (0.0,) and f.grid.upper == (2.0,)
    i = f.grid.index_of([1.0])
    assert f.values[i][0] == 1.0
    assert f.values[0, 0] == 0.0 and f.values[-1, 0] == 0.0


def test_tent_closed_form():
    f = generate(parse_fixture("tent:n=1"))
    x = f.grid.points()[..., 0]
    assert np.array_equal(f.values[..., 0], np.maximum(0.0, 1.0 - np.abs(x)))


def test_appendix_a3_sup():
    for n in (4, 16, 64):
        f = generate(parse_fixture(f"appendix_a3:n={n}"))
        assert f.sup_norm() == pytest.approx(n ** -0.5, abs=1e-15)


def test_random_smooth_deterministic():
    a = generate(parse_fixture("random_smooth:seed=7"))
    b = generate(parse_fixture("random_smooth:seed=7"))
    c = generate(parse_fixture("random_smooth:seed=8"))
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)


def test_unknown_family_and_parameter():
    with pytest.raises(ValueError):
        parse_fixture("wave:n=1")
    with pytest.raises(ValueError):
        parse_fixture("tent:k=1")
    with pytest.raises(ValueError):
        parse_fixture("tent:n")
    with pytest.raises(ValueError):
        FixtureSpec("appendix_a2", dim=2)


def test_literal_is_canonical():
    assert parse_fixture("appendix_a2:alpha=0.25").literal == "appendix_a2:alpha=0.25,n=1.0"


# ---------------------------------------------------------------------------
# calibration


def test_round_up_sig():
    assert round_up_sig(0.12301) == 0.124
    assert round_up_sig(0.123) == 0.123
    assert round_up_sig(2.5e-7) == 2.5e-7
    assert round_up_sig(0.0) == 0.0


def test_pinned_table_covers_suite():
    table = load_calibration()
    assert table["modulus"] == "power:0.5"
    for dim, entry in table["dimensions"].items():
        assert entry["ceiling_1"] >= entry["max_ratio_1"] * table["margin"]
        assert entry["ceiling_2"] >= entry["max_ratio_2"] * table["margin"]


def test_calibration_reproduces_pinned_bytes():
    from importlib import resources

    pinned = resources.files("holder").joinpath("data/calibration.json").read_text()
    assert dumps(run_calibration()) == pinned
