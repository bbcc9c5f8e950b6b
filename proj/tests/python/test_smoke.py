import os
from pathlib import Path

import pytest

import mcsynth

SOURCE = Path(os.environ.get("MCSYNTH_SOURCE_DIR", Path(__file__).resolve().parents[2]))


def test_classify_worked_example():
    assert mcsynth.classify("5C_5DL1_2IL1_2DL2_BP") == "Bypass2"
    assert mcsynth.classify("37C_28DL1_19IL1_13DL2_8IL2_5L3_BP") == "Bypass3"


def test_errors_carry_codes():
    with pytest.raises(mcsynth.McsynthError) as info:
        mcsynth.classify("2C_9L1")
    assert info.value.code == "RuleViolation"
    with pytest.raises(mcsynth.McsynthError) as info:
        mcsynth.canonical_name("2c_2l1")
    assert info.value.code == "MalformedName"


def test_quota():
    assert mcsynth.connection_quota(17, 4) == (4, 1, 17)


def test_edges_round_trip_through_validation():
    edges = mcsynth.generate_edges("5C_5DL1_2IL1_2DL2_BP")
    assert len([line for line in edges.splitlines() if "->" in line]) == 22
    assert mcsynth.validate_edges(edges) == []
    broken = edges.replace("C2 -> IL1#2", "C2 -> IL1#1")
    codes = {code for code, _, _ in mcsynth.validate_edges(broken)}
    assert "fan-in" in codes


def test_emit_and_loc():
    mem, net = mcsynth.emit("2C_2DL1_2IL1_1DL2_1L3_BP")
    assert "[Entry core-1]" in mem
    assert "Type = Switch" in net
    loc = mcsynth.loc_report("2C_2DL1_2IL1_1DL2_1L3_BP")
    total = sum(1 for text in (mem, net) for line in text.splitlines() if line.strip())
    assert sum(loc.values()) == total


def test_report_and_power_template():
    report = (SOURCE / "tests/fixtures/arch_report.ini").read_text()
    parsed = mcsynth.parse_stats_report(report)
    assert parsed["General"]["IPC"] == pytest.approx(1.25)
    assert parsed["Core 0"]["Commit.Branches"] == 170201
    filled = mcsynth.fill_power_template(
        report,
        (SOURCE / "data/power_mapping.ini").read_text(),
        (SOURCE / "data/power_template.xml").read_text(),
    )
    assert "@{" not in filled


def test_csv_round_trip():
    header = ["topology", "value"]
    rows = [["2C_2L1", "1,5"], ["x\"y", ""]]
    assert mcsynth.parse_csv(mcsynth.to_csv(header, rows)) == (header, rows)
