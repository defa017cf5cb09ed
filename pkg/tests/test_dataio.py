import json
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fuzzyasr.dataio import (
    COLUMNS,
    FAIL,
    PASS,
    UNCHECKED,
    TableLoadError,
    TableRecord,
    accuracy_argmax_report,
    bundled_table,
    lint_records,
    load_table_csv,
    read_table_csv,
    records_to_csv,
    snr_peak_check,
    summarize,
)

HEADER = ",".join(COLUMNS)

# Window-240 row of the first table, typed in from the printed table.
WIN240_SNR = [10.6244, 13.9512, 18.1852, 21.9053, 29.0342, 37.6815, 42.9845, 33.3873, 25.5868]
WIN240_ACC = [95.6196, 97.6584, 96.3816, 92.0023, 95.8129, 96.0878, 97.1450, 96.8232, 97.2298]


@pytest.fixture(scope="module")
def table1():
    return bundled_table(1)


def cell(records, **kw):
    (rec,) = [r for r in records if all(getattr(r, k) == v for k, v in kw.items())]
    return rec


def test_fixture_sizes():
    assert len(bundled_table(1)) == 7 * 9
    for t in (2, 3, 4, 5):
        assert len(bundled_table(t)) == 10 * 9


def test_published_cells(table1):
    rec = cell(table1, window_size=240.0, overlap_pct=50.0)
    assert (rec.snr_db, rec.accuracy_pct, rec.frame_size) == (42.9845, 97.1450, 14.0)
    zero = cell(bundled_table(2), digit="Zero", overlap_pct=50.0)
    assert zero.accuracy_pct == 99.1268
    assert zero.base_snr == 2.1552 and zero.window_size == 240.0
    two = cell(bundled_table(5), digit="Two", overlap_pct=50.0)
    assert two.frame_size == 3.9944
    assert [r.window_size for r in bundled_table(4)][0] == 260.0


def test_missing_published_frame_size_kept_empty():
    zero = [r for r in bundled_table(4) if r.digit == "Zero"]
    assert [r.frame_size for r in zero][-2:] == [None, None]
    assert any("frame size missing" in w for w in lint_records(bundled_table(4)))


def test_load_from_path(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text(records_to_csv(bundled_table(2)), encoding="utf-8")
    assert load_table_csv(path) == bundled_table(2)


@pytest.mark.parametrize("t", [1, 2, 3, 4, 5])
def test_lossless_round_trip(t):
    records = bundled_table(t)
    assert read_table_csv(records_to_csv(records)) == records


@pytest.mark.parametrize("text, fragment", [
    ("", "empty"),
    (HEADER + "\n", "no data rows"),
    ("table_id,window_size\n1,240\n", "missing column"),
    (HEADER + "\n1,240,,,50,14,abc,97\n", "row 2: column snr_db"),
    (HEADER + "\n1,240,,,50,14,42,97\n1,240,,,50,14,42,97\n", "row 3: duplicate"),
    (HEADER + "\n1,240,,,52,14,42,97\n", "overlap"),
    (HEADER + "\n1,240,,,50,14,42,101\n", "outside [0, 100]"),
    (HEADER + "\n9,240,,,50,14,42,97\n", "table_id"),
    (HEADER + "\n1,240,,,50,14,42\n", "too few"),
])
def test_load_errors(text, fragment):
    with pytest.raises(TableLoadError) as exc:
        read_table_csv(text)
    assert fragment in str(exc.value)


def test_snr_peak_table1(table1):
    report = snr_peak_check(table1)
    assert (report.groups_checked, report.groups_passing) == (7, 7)
    first = report.groups[0]
    assert first.group == (1, 240.0, None)
    assert first.witness["peak_snr"] == 42.9845 == max(WIN240_SNR)


def test_snr_peak_oracle_scan(table1):
    # independent scan of every window group's rows
    verdicts = {}
    for win in sorted({r.window_size for r in table1}):
        rows = sorted((r for r in table1 if r.window_size == win), key=lambda r: r.overlap_pct)
        s = [r.snr_db for r in rows]
        verdicts[(1, win, None)] = all(s[i] < s[i + 1] for i in range(6)) and all(s[i] > s[i + 1] for i in range(6, 8))
    report = snr_peak_check(table1)
    assert {g.group: g.verdict == PASS for g in report.groups} == verdicts


def test_snr_peak_constant_group_fails():
    rows = [TableRecord(1, 240.0, None, None, o, 10.0, 20.0, 90.0) for o in (20, 25, 30, 35, 40, 45, 50, 55, 60)]
    report = snr_peak_check(rows)
    assert report.groups[0].verdict == FAIL
    assert report.groups_passing == 0


def test_incomplete_group_unchecked():
    rows = [TableRecord(1, 240.0, None, None, o, 10.0, o, 90.0) for o in (20, 25, 30)]
    for check in (snr_peak_check, accuracy_argmax_report):
        report = check(rows)
        assert report.groups[0].verdict == UNCHECKED
        assert report.groups_checked == 0


def test_accuracy_argmax_table1(table1):
    report = accuracy_argmax_report(table1)
    assert report.groups_checked == 7
    assert report.groups_passing >= 5
    by_win = {g.group[1]: g for g in report.groups}
    assert by_win[255.0].verdict == PASS
    assert by_win[255.0].witness == {"argmax_overlap": 50.0, "max_accuracy": 98.9489}
    assert by_win[240.0].verdict == FAIL
    assert by_win[240.0].witness["argmax_overlap"] == 25.0
    assert by_win[240.0].witness["max_accuracy"] == 97.6584 == max(WIN240_ACC)
    assert by_win[260.0].witness["argmax_overlap"] == 60.0
    assert sorted(g.group[1] for g in report.failures()) == [240.0, 260.0]
    text = report.to_text()
    assert "[fail] 1 240" in text and "[fail] 1 260" in text


def test_other_tables_report_per_digit():
    for t in (2, 3, 4, 5):
        report = accuracy_argmax_report(bundled_table(t))
        assert report.groups_checked == 10
        assert [g.group[2] for g in report.groups][:3] == ["Zero", "One", "Two"]


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10_000), table=st.sampled_from([1, 2, 5]))
def test_checks_permutation_invariant(seed, table):
    records = bundled_table(table)
    shuffled = records[:]
    random.Random(seed).shuffle(shuffled)
    for check in (snr_peak_check, accuracy_argmax_report):
        assert check(shuffled).to_dict() == check(records).to_dict()
    assert summarize(shuffled) == summarize(records)


def test_summarize(table1):
    one = summarize([table1[0]])
    assert one[0]["snr_db"] == {"min": 10.6244, "max": 10.6244, "mean": 10.6244}
    win240 = summarize(table1)[0]
    assert win240["group"] == (1, 240.0, None)
    assert win240["accuracy_pct"]["mean"] == pytest.approx(math.fsum(WIN240_ACC) / 9, abs=1e-12)
    assert win240["accuracy_pct"]["min"] == min(WIN240_ACC)
    assert win240["snr_db"]["max"] == max(WIN240_SNR)
    with pytest.raises(ValueError):
        summarize([])


def test_report_json(table1):
    d = json.loads(snr_peak_check(table1).to_json())
    assert d["claim_id"] == "snr-peak"
    assert d["groups_passing"] == 7
    assert d["groups"][0]["group"] == [1, 240.0, None]


def test_lint_flags_table5_anomalies():
    warnings = lint_records(bundled_table(5))
    assert any("Two: frame size drops" in w and "3.9944" in w for w in warnings)
    assert any("identical SNR series" in w and "Five" in w and "Six" in w for w in warnings)
