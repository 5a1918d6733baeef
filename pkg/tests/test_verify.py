"""Verification harness: trials, campaigns, determinism, replay."""

import json

import numpy as np
import pytest

import qgeom.verify as verify
from qgeom.errors import UsageError
from qgeom.schedules import TimeGrid
from qgeom.verify import (DEFAULT_GRID, SLACK_CHECKS, TOLERANCES, TrialSpec,
                          make_specs, replay_violation, report_to_json,
                          run_campaign, run_trial)

GRID = TimeGrid(0.0, 1.0, 51)


class TestTrialSpec:
    def test_valid(self):
        TrialSpec(dim=2, family="constant", seed=0, grid=GRID)

    def test_rejects_dim(self):
        with pytest.raises(UsageError):
            TrialSpec(dim=1, family="constant", seed=0, grid=GRID)
        with pytest.raises(UsageError):
            TrialSpec(dim=17, family="constant", seed=0, grid=GRID)

    def test_rejects_steps(self):
        with pytest.raises(UsageError):
            TrialSpec(dim=2, family="constant", seed=0, grid=TimeGrid(0, 1, 5))

    def test_rejects_family(self):
        with pytest.raises(UsageError):
            TrialSpec(dim=2, family="nope", seed=0, grid=GRID)

    def test_qubit_families_need_dim2(self):
        with pytest.raises(UsageError):
            TrialSpec(dim=3, family="fixed_axis", seed=0, grid=GRID)

    def test_rejects_negative_seed(self):
        with pytest.raises(UsageError):
            TrialSpec(dim=2, family="constant", seed=-1, grid=GRID)


class TestRunTrial:
    def test_constant_slack_zero(self):
        rep = run_trial(TrialSpec(dim=2, family="constant", seed=3, grid=GRID))
        assert abs(rep.residuals["main_bound"]) <= 1e-12
        assert sum(rep.violations.values()) == 0

    def test_fixed_axis_saturating(self):
        rep = run_trial(TrialSpec(dim=2, family="fixed_axis", seed=5, grid=GRID))
        assert abs(rep.residuals["main_bound"]) <= 1e-9
        assert sum(rep.violations.values()) == 0

    def test_fourier_dim4_long_grid(self):
        spec = TrialSpec(dim=4, family="fourier", seed=42,
                         grid=TimeGrid(0.0, 1.0, 2001))
        rep = run_trial(spec)
        assert sum(rep.violations.values()) == 0
        assert rep.residuals["main_bound"] > 0.0

    def test_rotating_field_runs_dual_path(self):
        rep = run_trial(TrialSpec(dim=2, family="rotating_field", seed=7, grid=GRID))
        assert rep.residuals["dual_path"] is not None
        assert rep.residuals["dual_path"] <= TOLERANCES["dual_path"]
        assert rep.residuals["bloch_norm"] <= TOLERANCES["bloch_norm"]

    def test_non_qubit_skips_dual_path(self):
        rep = run_trial(TrialSpec(dim=3, family="fourier", seed=9, grid=GRID))
        assert "dual_path" not in rep.residuals


class TestSchemaCompleteness:
    def test_trial_report_lists_every_check(self):
        rep = run_trial(TrialSpec(dim=2, family="rotating_field", seed=1, grid=GRID))
        d = rep.to_dict()
        for check in TOLERANCES:
            assert check in d["residuals"]
            assert check in d["violations"]

    def test_campaign_summary_lists_every_check(self):
        report = run_campaign(4, 0, [2], ["constant", "fourier"], grid=GRID,
                              max_workers=1)
        assert set(report["tolerances"]) == set(TOLERANCES)
        for check in TOLERANCES:
            assert check in report["summary"]["residuals"]
            assert check in report["summary"]["violations_by_check"]
        assert "min_main_slack" in report["summary"]
        assert "min_kappa_ac" in report["summary"]


class TestMakeSpecs:
    def test_additive_seeds(self):
        specs = make_specs(6, 100, [2, 3], ["constant", "fourier"])
        assert [s.seed for s in specs] == [100 + i for i in range(6)]

    def test_qubit_families_pinned_to_dim2(self):
        specs = make_specs(8, 0, [2, 4], list(verify.FAMILIES))
        for s in specs:
            if s.family in verify.QUBIT_FAMILIES:
                assert s.dim == 2

    def test_family_cycle(self):
        specs = make_specs(4, 0, [2], ["constant", "fourier"])
        assert [s.family for s in specs] == ["constant", "fourier"] * 2


class TestCampaign:
    def test_single_trial_matches_run_trial(self):
        report = run_campaign(1, 11, [2], ["constant"], grid=GRID, max_workers=1)
        solo = run_trial(TrialSpec(dim=2, family="constant", seed=11, grid=GRID))
        assert report["trials"][0] == solo.to_dict()

    def test_byte_identical_reports(self):
        a = run_campaign(6, 3, [2, 3], ["constant", "fourier"], grid=GRID,
                         max_workers=1)
        b = run_campaign(6, 3, [2, 3], ["constant", "fourier"], grid=GRID,
                         max_workers=1)
        assert report_to_json(a) == report_to_json(b)

    def test_worker_count_invariance(self):
        kw = dict(grid=GRID)
        a = run_campaign(8, 5, [2], list(verify.FAMILIES), max_workers=1, **kw)
        b = run_campaign(8, 5, [2], list(verify.FAMILIES), max_workers=2, **kw)
        assert report_to_json(a) == report_to_json(b)

    def test_rejects_zero_trials(self):
        with pytest.raises(UsageError):
            run_campaign(0, 0, [2], ["constant"])

    def test_report_json_shape(self):
        report = run_campaign(2, 0, [2], ["constant"], grid=GRID, max_workers=1)
        text = report_to_json(report)
        assert text.endswith("\n")
        back = json.loads(text)
        assert back["summary"]["violations"] == 0


class TestViolationRecords:
    def test_forced_violation_replays(self, monkeypatch):
        # Tighten one tolerance to force violations, then replay the record
        monkeypatch.setitem(verify.TOLERANCES, "dhp_mean", -1.0)
        rep = run_trial(TrialSpec(dim=2, family="fourier", seed=2, grid=GRID))
        assert rep.violations["dhp_mean"] > 0
        assert rep.violation_records
        rec = rep.violation_records[0]
        assert {"check", "t", "value", "seed", "schedule", "state"} <= set(rec)
        # replay must reproduce the residual within 1e-12, also after a JSON trip
        assert abs(replay_violation(rec) - rec["value"]) <= 1e-12
        rec2 = json.loads(json.dumps(rec))
        assert abs(replay_violation(rec2) - rec2["value"]) <= 1e-12

    def test_slack_violation_sign_convention(self, monkeypatch):
        # Slack checks violate when the value drops below -tolerance
        monkeypatch.setitem(verify.TOLERANCES, "schwarz", -1.0)
        rep = run_trial(TrialSpec(dim=2, family="fourier", seed=2, grid=GRID))
        assert rep.violations.get("schwarz", 0) > 0
        rec = next(r for r in rep.violation_records if r["check"] == "schwarz")
        assert abs(replay_violation(rec) - rec["value"]) <= 1e-12

    def test_love2_replay_points_to_seed(self, monkeypatch):
        monkeypatch.setitem(verify.TOLERANCES, "love2_fd", -1.0)
        rep = run_trial(TrialSpec(dim=2, family="fourier", seed=2, grid=GRID))
        rec = next(r for r in rep.violation_records if r["check"] == "love2_fd")
        with pytest.raises(UsageError):
            replay_violation(rec)


class TestWorkerCount:
    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("QGEOM_THREADS", "3")
        assert verify._worker_count() == 3

    def test_env_invalid(self, monkeypatch):
        monkeypatch.setenv("QGEOM_THREADS", "lots")
        with pytest.raises(UsageError):
            verify._worker_count()


def test_default_grid():
    assert DEFAULT_GRID == TimeGrid(0.0, 1.0, 51)


def test_slack_checks_subset():
    assert SLACK_CHECKS <= set(TOLERANCES)


def test_mixed_mini_campaign_clean():
    report = run_campaign(32, 900, [2, 3, 4, 8], list(verify.FAMILIES),
                          grid=GRID, max_workers=1)
    assert report["summary"]["violations"] == 0
    assert report["summary"]["min_main_slack"] >= -1e-9
    assert report["summary"]["degenerate_steps"] == 0
    assert not report["summary"]["kappa_ac_below_floor"]
