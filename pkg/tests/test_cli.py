import json
import math
import warnings

import pytest

from rabiwatch.cli import EXIT_CHECK_FAILED, EXIT_INVARIANT, EXIT_IO, EXIT_OK, EXIT_USAGE, main
from rabiwatch.config import ExperimentConfig, budget, preset
from rabiwatch.errors import InvalidArgumentError
from rabiwatch.measurement import measurement_amplitudes


def test_presets():
    f2, f4 = preset("fig2"), preset("fig4")
    assert (f2.v_ratio, f2.epsilon, f2.phi0, f2.tau, f2.N) == (1.25, 0.068 * math.pi, math.pi, 0.002, 25)
    assert f2.feedback == "ideal" and f2.efficiency == 1 and f2.cycles == 12
    assert (f4.v_ratio, f4.epsilon, f4.phi0, f4.feedback, f4.efficiency) == (20, 20 * math.pi, 0, "none", 0.6)
    assert abs(measurement_amplitudes(f4.apparatus()).u1e) < 1e-15
    assert f2.total_steps == 6000
    with pytest.raises(InvalidArgumentError):
        preset("fig3")


def test_config_round_trip(tmp_path):
    cfg = preset("fig2").replace(miss_prob=0.04, feedback="per_atom", seed=9)
    path = tmp_path / "c.json"
    path.write_text(cfg.dumps())
    again = ExperimentConfig.load(path)
    assert again == cfg
    assert again.dumps() == cfg.dumps()


def test_config_rejects_unknown_and_invalid():
    with pytest.raises(InvalidArgumentError):
        ExperimentConfig.from_dict({"v_ratio": 1.0, "colour": "red"})
    with pytest.raises(InvalidArgumentError):
        ExperimentConfig(efficiency=1.5)
    with pytest.warns(UserWarning):
        ExperimentConfig(N=200)


def test_budget():
    assert budget(0.1, 100e-6).measurements == 1000
    assert budget(0.1, 100e-6, 500 * 100e-6).cycles == pytest.approx(2)
    assert budget(50e-6, 100e-6).measurements == 0
    with pytest.raises(InvalidArgumentError):
        budget(0, 1)


def test_budget_command(capsys):
    assert main(["budget"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "measurements: 1000" in out and "rabi_cycles: 2" in out


def test_verify_command(capsys):
    assert main(["verify"]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 6 and all(line.startswith("PASS") for line in lines)


def test_verify_reports_failures(monkeypatch, capsys):
    import rabiwatch.checks as checks
    monkeypatch.setitem(checks.CHECKS, "broken", lambda: (False, "forced"))
    assert main(["verify"]) == EXIT_CHECK_FAILED
    assert "FAIL broken: forced" in capsys.readouterr().out


def _files(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


def test_run_is_byte_identical(tmp_path):
    for name in ("a", "b"):
        assert main(["run", "--preset", "fig2", "--seed", "7", "--cycles", "3", "--out", str(tmp_path / name)]) == 0
    a, b = _files(tmp_path / "a"), _files(tmp_path / "b")
    assert set(a) == {"trajectory.csv", "readout.csv", "spectrum_G2.csv", "spectrum_c2sq.csv", "summary.json",
                      "config.json"}
    assert a == b


def test_run_outputs(tmp_path):
    out = tmp_path / "run"
    assert main(["run", "--preset", "fig2", "--cycles", "2", "--out", str(out)]) == 0
    rows = (out / "trajectory.csv").read_text().splitlines()
    assert rows[0].split(",")[:6] == ["t_over_TR", "c2sq_disturbed", "c2sq_undisturbed", "outcome", "recorded",
                                      "feedback_phase"]
    assert len(rows) == 1001
    for row in rows[1:]:
        cells = row.split(",")
        assert abs(float(cells[1]) + float(cells[6]) - 1) < 1e-9
        assert cells[3] in ("e", "g", "·")
    assert (out / "readout.csv").read_text().startswith("t0_over_TR,r,G2,G2_smoothed\n")
    assert (out / "spectrum_G2.csv").read_text().startswith("omega_over_OmegaR,power\n")
    summary = json.loads((out / "summary.json").read_text())
    for key in ("fuzziness_average", "T_D_formula", "T_D_exact", "correlation", "peak_G2", "seed"):
        assert key in summary
    config = json.loads((out / "config.json").read_text())
    assert config["cycles"] == 2 and "out" not in config


def test_flags_override_config_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"seed": 3, "cycles": 1.0, "efficiency": 0.5}))
    out = tmp_path / "o"
    assert main(["run", "--config", str(cfg), "--efficiency", "0.8", "--out", str(out)]) == 0
    written = json.loads((out / "config.json").read_text())
    assert (written["seed"], written["cycles"], written["efficiency"]) == (3, 1.0, 0.8)


def test_run_flags_large_miss_probability(tmp_path, capsys):
    out = tmp_path / "m"
    assert main(["run", "--preset", "fig2", "--cycles", "1", "--miss-prob", "0.15", "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["miss_probability"] == 0.15 and summary["feedback_degraded"] is True
    assert main(["run", "--preset", "fig2", "--cycles", "1", "--miss-prob", "0.07", "--out", str(out)]) == 0
    assert json.loads((out / "summary.json").read_text())["feedback_degraded"] is True
    assert main(["run", "--preset", "fig2", "--cycles", "1", "--miss-prob", "0.04", "--out", str(out)]) == 0
    assert json.loads((out / "summary.json").read_text())["feedback_degraded"] is False


def test_ensemble_command(tmp_path):
    out = tmp_path / "e"
    assert main(["ensemble", "--preset", "fig2", "--cycles", "2", "--members", "4", "--miss-prob", "0.15",
                 "--out", str(out)]) == 0
    summary = json.loads((out / "ensemble_summary.json").read_text())
    assert summary["members"] == 4
    assert "fidelity_drop" in summary and isinstance(summary["feedback_degraded"], bool)
    assert len((out / "members.csv").read_text().splitlines()) == 5


def test_sweep_command(tmp_path, capsys):
    out = tmp_path / "s"
    assert main(["sweep", "--preset", "fig2", "--cycles", "1", "--members", "2", "--v-ratio", "1.25,1.5",
                 "--out", str(out)]) == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[0] == "v_ratio,epsilon,tau,fuzziness,median_correlation" and len(lines) == 3


def test_usage_errors(capsys):
    assert main(["run", "--efficiency", "2"]) == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["run", "--preset", "nope"])
    assert exc.value.code == EXIT_USAGE


def test_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["run", "--cycles", "1", "--out", str(blocker / "sub")]) == EXIT_IO


def test_invariant_violation_exit_code(monkeypatch, tmp_path):
    import rabiwatch.runner as runner
    real = runner.run_ensemble

    def corrupt(*args, **kwargs):
        rec = real(*args, **kwargs)
        rec.c2sq[..., 3] += 0.01
        return rec

    monkeypatch.setattr(runner, "run_ensemble", corrupt)
    assert main(["run", "--cycles", "1", "--out", str(tmp_path / "x")]) == EXIT_INVARIANT
