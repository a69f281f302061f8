import pytest

from pdnz import ParseError, RlcBranch, TargetSpec
from pdnz.config import dump_config, parse_config, parse_si

TWO_LINES = """\
topology two
branch z1 R=10m L=1n C=1n
branch z12 R=10m L=1n C=1n
branch z2 R=10m L=1n C=1n
"""


def test_parse_si_suffixes():
    assert parse_si("10m") == pytest.approx(10e-3)
    assert parse_si("1n") == pytest.approx(1e-9)
    assert parse_si("2.5p") == pytest.approx(2.5e-12)
    assert parse_si("3f") == pytest.approx(3e-15)
    assert parse_si("4u") == pytest.approx(4e-6)
    assert parse_si("5k") == pytest.approx(5e3)
    assert parse_si("6meg") == pytest.approx(6e6)
    assert parse_si("7g") == pytest.approx(7e9)
    assert parse_si("10M") == pytest.approx(10e-3)  # case-insensitive: milli
    assert parse_si("6MEG") == pytest.approx(6e6)
    assert parse_si("1e6") == 1e6  # bare scientific notation
    assert parse_si("0.25") == 0.25


def test_parse_si_rejects_garbage():
    with pytest.raises(ValueError, match="unknown suffix 'x'"):
        parse_si("1x")
    with pytest.raises(ValueError):
        parse_si("3k3")
    with pytest.raises(ValueError):
        parse_si("")


def test_basic_two_supply_config():
    cfg = parse_config(TWO_LINES)
    assert cfg.topology == "two"
    assert list(cfg.branches) == ["z1", "z12", "z2"]
    assert cfg.branches["z1"] == RlcBranch(10e-3, 1e-9, 1e-9)
    system = cfg.to_system()
    assert system.base.z12.c == pytest.approx(1e-9)


def test_unknown_suffix_reports_line_number():
    with pytest.raises(ParseError) as err:
        parse_config("branch z1 C=1x R=0 L=0\ntopology two")
    assert err.value.line == 1
    assert "unknown suffix 'x'" in str(err.value)


def test_spiked_config_parses():
    text = TWO_LINES.replace("branch z12 R=10m L=1n C=1n",
                             "branch z12 R=10m L=1n C=0.5n")
    cfg = parse_config(text)
    assert cfg.branches["z12"].c == pytest.approx(0.5e-9)


def test_comments_and_case_insensitive_keys():
    text = """\
# a comment line
TOPOLOGY two
Branch Z1 r=10m l=1n c=1n   # trailing comment
branch z12 R=10m L=1n C=1n
branch z2 R=10m L=1n C=1n
SUPPLY vdd=1.25 ripple=0.05 current=80
Sweep fmin=1meg fmax=100g points=500
"""
    cfg = parse_config(text)
    assert cfg.supply == TargetSpec(1.25, 0.05, 80.0)
    assert cfg.sweep_fmin == pytest.approx(1e6)
    assert cfg.sweep_fmax == pytest.approx(100e9)
    assert cfg.sweep_points == 500


def test_duplicate_branch_rejected():
    text = TWO_LINES + "branch z1 R=1m L=1n C=1n\n"
    with pytest.raises(ParseError, match="duplicate branch"):
        parse_config(text)


def test_missing_branch_rejected():
    with pytest.raises(ParseError, match="needs branch z2"):
        parse_config("topology two\nbranch z1 R=10m L=1n C=1n\n"
                     "branch z12 R=10m L=1n C=1n")


def test_unexpected_branch_rejected():
    with pytest.raises(ParseError, match="not part of topology"):
        parse_config(TWO_LINES + "branch z23 R=10m L=1n C=1n\n")


def test_missing_field_rejected():
    with pytest.raises(ParseError, match="missing c"):
        parse_config("topology two\nbranch z1 R=10m L=1n")


def test_unknown_key_rejected():
    with pytest.raises(ParseError, match="unknown key"):
        parse_config("frequency 1e6\n" + TWO_LINES)


def test_missing_topology_rejected():
    with pytest.raises(ParseError, match="missing topology"):
        parse_config("branch z1 R=10m L=1n C=1n")


def test_bad_supply_values_rejected():
    with pytest.raises(ParseError):
        parse_config(TWO_LINES + "supply vdd=1.25 ripple=1.5 current=80\n")


def test_bad_branch_values_rejected():
    with pytest.raises(ParseError):
        parse_config("topology two\nbranch z1 R=-1m L=1n C=1n\n"
                     "branch z12 R=10m L=1n C=1n\nbranch z2 R=10m L=1n C=1n")


def test_three_topologies_and_extras():
    text = """\
topology three-symmetric
branch z1 R=10m L=1n C=1n
branch z2 R=10m L=1n C=1n
branch z3 R=10m L=1n C=1n
branch z0 R=10m L=1n C=0.5n
extra x1 R=10m L=0.1n C=0.1n
"""
    cfg = parse_config(text)
    system = cfg.to_system()
    assert len(system.extras) == 1
    assert system.base.z0.c == pytest.approx(0.5e-9)


def test_round_trip_identity():
    text = """\
topology three
branch z1 R=10m L=1n C=1n
branch z2 R=12m L=0.8n C=2n
branch z3 R=5m L=2n C=0.33n
branch z12 R=10m L=1n C=1n
branch z23 R=10m L=1n C=0.47n
branch z31 R=1m L=0.2n C=3.3n
extra bulk R=50m L=5n C=10u
supply vdd=1.8 ripple=0.03 current=12
sweep fmin=1e5 fmax=50g points=1234
"""
    cfg = parse_config(text)
    dumped = dump_config(cfg)
    again = parse_config(dumped)
    assert again == cfg
    assert dump_config(again) == dumped
