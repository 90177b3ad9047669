"""Report assembly, display rounding, and text rendering."""

import random
import re
from fractions import Fraction
from types import SimpleNamespace

import pytest

from swipelabel.agreement import LabelMatrix
from swipelabel.errors import NoRecords
from swipelabel.report import (
    AgreementReport,
    build_report,
    fmt_kappa,
    fmt_percent,
    render_text_report,
    report_to_json,
    round_half_up,
    timing_summary,
)

from .test_agreement import matrix_from_rows, oracle_cohen, oracle_fleiss

TOL = 1e-9


def fake_record(participant, duration_ms):
    return SimpleNamespace(participant_id=participant, duration_ms=duration_ms)


class TestRounding:
    def test_half_up_not_bankers(self):
        assert round_half_up(0.125, 2) == 0.13
        assert round_half_up(0.135, 2) == 0.14
        assert round_half_up(2.5, 0) == 3.0

    def test_percent_format(self):
        assert fmt_percent(93.66666666) == "93.67 %"
        assert fmt_percent(100.0) == "100.00 %"

    def test_kappa_formats(self):
        assert fmt_kappa(0.6095, 2) == "0.61"
        assert fmt_kappa(0.6095, 3) == "0.610"
        assert fmt_kappa(0.61, 3) == "0.610"
        assert fmt_kappa(None) == "undef"
        assert fmt_kappa(-0.05, 2) == "-0.05"


class TestTimingSummary:
    def test_arithmetic_mean(self):
        records = [fake_record("p1", 1000), fake_record("p1", 2000),
                   fake_record("p1", 3000)]
        assert timing_summary(records)["p1"] == pytest.approx(2.0, abs=TOL)

    def test_single_record_display_rounding(self):
        records = [fake_record("p1", 1580)]
        mean = timing_summary(records)["p1"]
        assert f"{round_half_up(mean, 2):.2f}" == "1.58"

    def test_no_records_for_named_rater(self):
        with pytest.raises(NoRecords):
            timing_summary([fake_record("p1", 100)], raters=["p1", "p2"])

    def test_missing_durations_skipped(self):
        records = [fake_record("p1", 1000), fake_record("p1", None)]
        assert timing_summary(records)["p1"] == pytest.approx(1.0, abs=TOL)

    def test_rater_with_only_missing_durations(self):
        assert timing_summary([fake_record("p1", None)])["p1"] is None

    def test_order_independent(self):
        rng = random.Random(5)
        durations = [rng.randint(200, 9000) for _ in range(500)]
        records = [fake_record("p", d) for d in durations]
        rng.shuffle(records)
        shuffled = timing_summary(records)["p"]
        records.sort(key=lambda r: r.duration_ms)
        assert timing_summary(records)["p"] == shuffled


class TestBuildReport:
    def test_four_raters_yield_six_pairs(self):
        rng = random.Random(1)
        rows = [[rng.choice("nm") for _ in range(4)] for _ in range(30)]
        report = build_report(matrix_from_rows(rows))
        assert len(report.pairwise) == 6

    def test_identity_pair_row(self):
        rows = [["n", "n"], ["a", "a"], ["n", "n"]]
        report = build_report(matrix_from_rows(rows))
        pair = report.pairwise[0]
        assert fmt_percent(pair.percent_agreement) == "100.00 %"
        assert fmt_kappa(pair.cohen_kappa, 2) == "1.00"

    def test_degenerate_pair_rendered_undef(self):
        rows = [["n", "n", "a"], ["n", "n", "n"]]
        report = build_report(matrix_from_rows(rows))
        by_pair = {(p.rater_a, p.rater_b): p for p in report.pairwise}
        assert by_pair[("r0", "r1")].cohen_kappa is None
        text = render_text_report(report)
        assert "undef" in text

    def test_values_match_oracles(self):
        rng = random.Random(99)
        rows = [[rng.choice("na") for _ in range(4)] for _ in range(60)]
        matrix = matrix_from_rows(rows)
        report = build_report(matrix)
        for pair in report.pairwise:
            a = matrix.column(pair.rater_a)
            b = matrix.column(pair.rater_b)
            expected = oracle_cohen(a, b)
            assert abs(pair.cohen_kappa - expected) <= TOL
            matches = sum(1 for x, y in zip(a, b) if x == y)
            assert abs(pair.percent_agreement - 100 * Fraction(matches, len(a))) <= TOL
        assert abs(report.fleiss - oracle_fleiss(rows)) <= TOL

    def test_class_counts(self):
        rows = [["n", "a"], ["n", "a"], ["a", "a"]]
        report = build_report(matrix_from_rows(rows))
        counts = {r: dict(c) for r, c in report.class_counts}
        assert counts["r0"] == {"a": 1, "n": 2}
        assert counts["r1"] == {"a": 3, "n": 0}

    def test_timing_attached_per_rater(self):
        rows = [["n", "a"]]
        records = [fake_record("r0", 1500), fake_record("r1", 2500)]
        report = build_report(matrix_from_rows(rows), records)
        timing = dict(report.timing_mean_s)
        assert timing["r0"] == pytest.approx(1.5, abs=TOL)
        assert timing["r1"] == pytest.approx(2.5, abs=TOL)


class TestRendering:
    def build_sample(self):
        rng = random.Random(3)
        rows = [[rng.choice("na") for _ in range(4)] for _ in range(600)]
        records = [fake_record(f"r{j}", rng.randint(500, 5000))
                   for j in range(4) for _ in range(600)]
        return build_report(matrix_from_rows(rows), records)

    def test_text_report_shape(self):
        text = render_text_report(self.build_sample())
        pair_lines = [l for l in text.splitlines() if " vs " in l]
        assert len(pair_lines) == 6
        for line in pair_lines:
            assert re.search(r"\d+\.\d{2} %", line)       # percent, 2 decimals
            assert re.search(r"-?\d\.\d{2}(\s|$)", line)  # kappa, 2 decimals
        assert re.search(r"Fleiss' kappa across all 4 raters: -?\d\.\d{3}\n", text)

    def test_json_report_fields(self):
        report = self.build_sample()
        doc = report_to_json(report)
        assert doc["n_items"] == 600
        assert len(doc["pairwise"]) == 6
        assert set(doc["timing_mean_seconds"]) == {"r0", "r1", "r2", "r3"}
        for pair in doc["pairwise"]:
            assert re.fullmatch(r"\d+\.\d{2} %", pair["percent_agreement_display"])
            assert re.fullmatch(r"-?\d\.\d{2}", pair["cohen_kappa_display"])
        assert re.fullmatch(r"-?\d\.\d{3}", doc["fleiss_kappa_display"])

    def test_report_equality_is_value_based(self):
        rows = [["n", "a"], ["a", "a"]]
        r1 = build_report(matrix_from_rows(rows))
        r2 = build_report(matrix_from_rows(rows))
        assert r1 == r2
        assert isinstance(r1, AgreementReport)
