"""Smoke tests for the python bindings.

These exercise the happy path of each exported operation; the C++ unit and
acceptance suites carry the detailed behavior checks.
"""

import math
import os
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

import hilbench as hb

FIXTURES = Path(os.environ.get("HILBENCH_FIXTURES", Path(__file__).resolve().parents[1] / "fixtures"))


def test_version():
    assert hb.__version__


def test_euclidean_hand_case():
    assert hb.euclidean_distance([0.0, 0.0], [3.0, 4.0]) == 5.0
    assert hb.euclidean_distance([1.5, -2.0], [1.5, -2.0]) == 0.0


def test_dtw_cost_and_path():
    cost, path = hb.dtw([0.0, 1.0, 2.0], [0.0, 0.0, 1.0, 2.0])
    assert cost == 0.0
    assert path[0] == (0, 0)
    assert path[-1] == (2, 3)
    # path is monotone in both indices
    for (i0, j0), (i1, j1) in zip(path, path[1:]):
        assert i1 >= i0 and j1 >= j0


def test_serial_round_trip_labeled():
    fmt = hb.SerialFormat("labeled", ["A_X", "A_Y"], 0.1)
    trace = hb.Trace.from_channels({"A_X": [0.5, 1.25], "A_Y": [-3.0, 0.0]}, 0.1)
    text = hb.format_serial(trace, fmt)
    back = hb.parse_serial(text, fmt)
    assert back.channels() == trace.channels()


def test_serial_round_trip_unlabeled():
    fmt = hb.SerialFormat("unlabeled", [], 0.05)
    trace = hb.Trace.from_channels({"": [112.0, 863.0, 112.0]}, 0.05)
    text = hb.format_serial(trace, fmt)
    back = hb.parse_serial(text, fmt)
    assert list(back.channels().values()) == [[112.0, 863.0, 112.0]]


def test_simulate_and_window():
    trace = hb.simulate("blink_photo", duration=4.0, seed=7)
    values = next(iter(trace.channels().values()))
    assert len(values) == 40
    clipped = hb.window(trace, 1.0, 2.0)
    assert clipped.total_samples() < trace.total_samples()


def test_calibrate_and_compare_verdict():
    pairs = [
        (hb.simulate("blink_photo", duration=4.0, seed=2 * i),
         hb.simulate("blink_photo", duration=4.0, seed=2 * i + 1))
        for i in range(8)
    ]
    cal = hb.calibrate(pairs, margin=1.1)
    assert cal.threshold_distance >= max(cal.distances)

    ref = hb.simulate("blink_photo", duration=4.0, seed=101)
    good = hb.simulate("blink_photo", duration=4.0, seed=102)
    verdict = hb.compare(good, ref, cal)
    assert verdict["passed"] is True

    zeros = hb.simulate("blink_photo", duration=4.0, seed=103, fault="all_zeros")
    verdict = hb.compare(zeros, ref, cal)
    assert verdict["passed"] is False
    assert verdict["failure"] == "AllZeros"


def test_compare_scale_fault_estimates_k():
    ref = hb.simulate("servo_imu", duration=4.0, seed=5, angle=90.0)
    scaled = hb.simulate("servo_imu", duration=4.0, seed=6, angle=90.0, fault="scale:2")
    pairs = [
        (hb.simulate("servo_imu", duration=4.0, seed=20 + 2 * i, angle=90.0),
         hb.simulate("servo_imu", duration=4.0, seed=21 + 2 * i, angle=90.0))
        for i in range(8)
    ]
    cal = hb.calibrate(pairs)
    verdict = hb.compare(scaled, ref, cal)
    assert verdict["passed"] is False
    assert verdict["failure"] == "ScaleError"
    assert math.isclose(verdict["k_est"], 2.0, rel_tol=0.1)


def test_calibration_profile_round_trip(tmp_path):
    pairs = [
        (hb.simulate("blink_photo", duration=2.0, seed=0),
         hb.simulate("blink_photo", duration=2.0, seed=1)),
        (hb.simulate("blink_photo", duration=2.0, seed=2),
         hb.simulate("blink_photo", duration=2.0, seed=3)),
    ]
    cal = hb.calibrate(pairs)
    path = tmp_path / "cal.json"
    cal.save(path)
    loaded = hb.CalibrationProfile.load(path)
    assert loaded.threshold_distance == cal.threshold_distance
    assert loaded.distances == cal.distances


def test_extract_source():
    src = hb.extract_source("Here you go:\n```cpp\nvoid setup() {}\nvoid loop() {}\n```\n")
    assert src.text == "void setup() {}\nvoid loop() {}"
    assert src.origin == "extracted"
    assert src.block_count == 1
    assert len(src.digest()) == 16


def test_extract_no_code_raises():
    with pytest.raises(hb.HarnessError):
        hb.extract_source("I cannot help with that request.")


def test_classify_diagnostics():
    text = "/tmp/cc.o: in function `main':\nundefined reference to `setup'\n"
    assert hb.classify_diagnostics(text) == ["MissingEntryPoints"]


def test_render_prompt():
    out = hb.render_prompt("Blink on pin {pin}.", {"pin": "13"})
    assert out == "Blink on pin 13."


def test_check_source_flags_wrong_address():
    map_path = FIXTURES / "codecheck" / "axm240_map.txt"
    src = (FIXTURES / "codecheck" / "sources" / "wrong_address_literal.cpp").read_text()
    findings = hb.check_source(src, map_path, strapping="SDO_GND", mode="2g")
    kinds = {f["kind"] for f in findings}
    assert "WrongI2CAddress" in kinds


def test_campaign_and_report(tmp_path):
    demo = FIXTURES / "demo"
    run_dir = tmp_path / "demo"
    shutil.copytree(demo, run_dir)
    result = hb.run_campaign_config(run_dir / "config.json")
    assert result["executed"] == 450
    assert result["skipped_existing"] == 0

    again = hb.run_campaign_config(run_dir / "config.json")
    assert again["executed"] == 0
    assert again["skipped_existing"] == 450

    csv = hb.report_records(result["records"], format="csv")
    rows = [line for line in csv.splitlines() if line]
    assert len(rows) == 1 + 9  # header + one row per (task, model) cell


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
