import numpy as np
import pytest

from dosepenalty import DoseField, DvhCurve, PenaltyConfig, build_grid, make_region
from dosepenalty import report
from dosepenalty.homotopy import HomotopyRecord
from dosepenalty.ssn import SsnStep, SsnTrace


def test_dose_profile_rows(tmp_path):
    g = build_grid(-1, 1, 3, 1, 1)
    T = make_region(g, [(-1, -1)])
    R = make_region(g, [(1, 1)])
    path = report.write_dose_profile(tmp_path / "d.csv", g, np.zeros(3), PenaltyConfig(), T, R)
    rows = report.read_csv(path)
    assert len(rows) == 3
    assert [r["dose"] for r in rows] == ["0", "0", "0"]
    assert rows[0]["target_level"] == "0.5" and rows[0]["risk_level"] == ""
    assert rows[1]["target_level"] == "" and rows[2]["risk_level"] == "0.20000000000000001"


def test_full_precision_round_trip(tmp_path):
    g = build_grid(-1, 1, 7, 1, 1)
    r = make_region(g, [(0, 1)])
    dose = np.random.default_rng(0).uniform(0, 1, 7)
    path = report.write_dose_profile(tmp_path / "d.csv", g, dose, PenaltyConfig(), r, make_region(g, [(-1, -0.5)]))
    back = np.array([float(row["dose"]) for row in report.read_csv(path)])
    np.testing.assert_array_equal(back, dose)


def test_dvh_unit_steps(tmp_path):
    g = build_grid(-1, 1, 11, 1, 1)
    r = make_region(g, [(-0.5, 0.5)])
    d = DoseField(r, np.full(r.size, 0.5))
    levels = report.default_dvh_levels(PenaltyConfig())
    assert len(levels) == 200 and levels[-1] == pytest.approx(0.6)
    path = report.write_dvh(tmp_path / "dvh.csv", *report.dvh_pair(d, d, levels))
    rows = report.read_csv(path)
    for row in rows:
        step = 1.0 if float(row["level"]) <= 0.5 else 0.0
        assert float(row["fraction_risk"]) == step and float(row["fraction_target"]) == step


def test_dvh_level_grids_must_match(tmp_path):
    a = DvhCurve(np.array([0.0, 1.0]), np.array([1.0, 0.0]))
    b = DvhCurve(np.array([0.0, 2.0]), np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        report.write_dvh(tmp_path / "x.csv", a, b)


def test_homotopy_table(tmp_path):
    p = report.write_homotopy_table(tmp_path / "h.csv", [])
    assert p.read_text() == "gamma_ratio,ssn_iters,pct_risk_above_L,pct_target_below_U,converged\n"
    recs = [HomotopyRecord(2.0, 1.0, 1, True, 0.0, 1.0), HomotopyRecord(1.0, 0.5, 7, True, 2 / 9, 6 / 31),
            HomotopyRecord(0.5, 0.25, 100, False)]
    rows = report.read_csv(report.write_homotopy_table(tmp_path / "h.csv", recs))
    assert rows[1] == dict(gamma_ratio="0.5", ssn_iters="7", pct_risk_above_L="22.22",
                           pct_target_below_U="19.35", converged="true")
    assert rows[2]["converged"] == "false" and rows[2]["pct_risk_above_L"] == ""


def test_ssn_trace(tmp_path):
    tr = SsnTrace(10.0, [SsnStep(1, 1.0, 5.0, 3), SsnStep(2, 0.125, 1e-7, 4)], True)
    rows = report.read_csv(report.write_ssn_trace(tmp_path / "t.csv", tr))
    assert [(r["k"], r["tau"], r["residual"]) for r in rows] == [("1", "1", "5"), ("2", "0.125", "9.9999999999999995e-08")]


def test_summary_round_trip(tmp_path):
    s = report.RunSummary("penalty", {"levels": {"U": "0.5"}}, 2e5, 0.5, 1e-10, 2.0**-33, 2 / 9, 6 / 31, 3.25,
                          [(1.0, True), (0.5, False)], "2026-01-01T00:00:00")
    back = report.read_summary(report.write_summary(tmp_path / "s.ini", s))
    assert back == s
    assert back.any_converged


def test_unwritable_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(report.ReportError, match="file"):
        report.write_homotopy_table(blocker / "sub" / "h.csv", [])
