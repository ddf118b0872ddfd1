import os

import numpy as np
import pytest

from wavefloat import ConfigError
from wavefloat.cli import main as cli_main
from wavefloat.harness import (convergence_study, field_restriction_error,
                               fit_order, restrict_to_reference, run_scenario)
from wavefloat.scenarios import ScenarioSpec, build_solver, parse_config

CONFIG_TEXT = """
# return to equilibrium, linear regime
scenario = decay_linear
epsilon = 0
mu = 0.3
ell = 4
L = 30
N = 60, 120
dt_ratio = 0.9
scheme = mc
T_final = 2.0
h_eq = constant:0.7
delta0 = 0.1
"""


def test_parse_config_roundtrip():
    spec = parse_config(CONFIG_TEXT)
    assert spec.kind == "decay_linear"
    assert spec.n_list == (60, 120)
    assert spec.h_eq == 0.7
    assert spec.params["delta0"] == 0.1
    assert spec.scheme == "mc"


def test_parse_config_rejects_unknown_and_missing():
    with pytest.raises(ConfigError):
        parse_config(CONFIG_TEXT + "\nbogus_key = 3\n")
    with pytest.raises(ConfigError):
        parse_config("scenario = decay_linear\n")
    with pytest.raises(ConfigError):
        parse_config(CONFIG_TEXT.replace("constant:0.7", "profile:foo"))
    with pytest.raises(ConfigError):
        parse_config(CONFIG_TEXT + "\nscenario = decay_linear\n")  # duplicate


def test_spec_validation():
    with pytest.raises(ConfigError):
        ScenarioSpec(kind="nope", epsilon=0, mu=0.3, ell=4, L=30, h_eq=0.7,
                     scheme="mc", dt_ratio=0.9, t_final=1.0, n_list=(60,))
    with pytest.raises(ConfigError):
        ScenarioSpec(kind="decay_linear", epsilon=0, mu=0.3, ell=4, L=30,
                     h_eq=0.7, scheme="mc", dt_ratio=0.9, t_final=1.0,
                     n_list=(120, 60))  # not increasing
    with pytest.raises(ConfigError):
        ScenarioSpec(kind="decay_nonlinear", epsilon=0.3, mu=0.3, ell=4, L=30,
                     h_eq=0.7, scheme="mc", dt_ratio=0.9, t_final=1.0,
                     n_list=(60,))  # self-convergence without n_ref


def _mini_spec(**kw):
    base = dict(kind="decay_linear", epsilon=0.0, mu=0.3, ell=4.0, L=30.0,
                h_eq=0.7, scheme="mc", dt_ratio=0.9, t_final=2.0,
                n_list=(48, 96))
    base.update(kw)
    return ScenarioSpec(**base)


def test_run_scenario_writes_csvs(tmp_path):
    out = str(tmp_path / "out")
    result = run_scenario(_mini_spec(), n=48, out_dir=out)
    diag = os.path.join(out, "diag_N48.csv")
    fields = os.path.join(out, "fields_N48.csv")
    assert os.path.exists(diag) and os.path.exists(fields)
    with open(diag) as fh:
        assert fh.readline().strip() == "t,delta,delta_dot,qi_avg,zu_plus,zu_minus,volume"
    with open(fields) as fh:
        assert fh.readline().strip() == "x,zeta,q"
    assert result.times[-1] == pytest.approx(2.0, abs=1e-12)


def test_determinism_identical_bytes(tmp_path):
    a, b = str(tmp_path / "a"), str(tmp_path / "b")
    run_scenario(_mini_spec(), n=48, out_dir=a)
    run_scenario(_mini_spec(), n=48, out_dir=b)
    for name in ("diag_N48.csv", "fields_N48.csv"):
        with open(os.path.join(a, name), "rb") as fa, \
                open(os.path.join(b, name), "rb") as fb:
            assert fa.read() == fb.read()


def test_restriction_mapping_and_error():
    # N = 48 embeds in N_ref = 342 because 343 = 7 * 49
    coarse = build_solver(_mini_spec(n_list=(48,)), 48).solver
    ref = build_solver(_mini_spec(n_list=(342,)), 342).solver
    idx = restrict_to_reference(coarse, ref)
    assert len(idx) == 48
    errs = field_restriction_error(coarse, ref)
    assert errs["zeta"] == 0.0 and errs["q"] == 0.0  # both still at rest
    with pytest.raises(ConfigError):
        restrict_to_reference(build_solver(_mini_spec(n_list=(50,)), 50).solver, ref)


def test_fit_order_degenerate_cases():
    order, resid = fit_order(np.array([0.1, 0.05]), np.array([0.0, 0.0]))
    assert np.isnan(order) and np.isnan(resid)
    order, _ = fit_order(np.array([0.1, 0.05, 0.025]),
                         np.array([4e-2, 2e-2, 1e-2]))
    assert order == pytest.approx(1.0, abs=1e-12)


def test_convergence_study_needs_three_meshes():
    with pytest.raises(ConfigError):
        convergence_study(_mini_spec())


def test_convergence_report_csv(tmp_path):
    out = str(tmp_path / "study")
    spec = _mini_spec(n_list=(48, 72, 96), t_final=2.0)
    report = convergence_study(spec, out_dir=out)
    assert os.path.exists(os.path.join(out, "report.csv"))
    assert os.path.exists(os.path.join(out, "plot_report.py"))
    with open(os.path.join(out, "report.csv")) as fh:
        header = fh.readline().strip().split(",")
    assert header == ["N", "dx", "err_delta", "order_delta", "runtime_s"]
    assert "delta" in report.orders


def test_zero_duration_study_reports_nan_order():
    spec = _mini_spec(n_list=(48, 96), t_final=0.0)
    report = convergence_study(spec)
    np.testing.assert_array_equal(report.errors["delta"], 0.0)
    assert np.isnan(report.orders["delta"])


def test_floating_object_sheds_depression_wave():
    # transmitted wave from a floating object is preceded by a depression;
    # a fixed object sheds none
    from wavefloat.stepper import advance

    ahead_min = {}
    for kind in ("fixed_nonlinear", "free_floating"):
        spec = ScenarioSpec(kind=kind, epsilon=0.3, mu=0.3, ell=4.0, L=30.0,
                            h_eq=0.7, scheme="mc", dt_ratio=0.7, t_final=20.0,
                            n_list=(200,), n_ref=2400,
                            params={"zeta_max": 0.2, "x0": -15.0})
        solver = build_solver(spec, 200).solver
        advance(solver, 20.0)
        x, zeta, _ = solver.state.interior_fields()
        sel = (x > 10.0) & (x < 25.0)
        ahead_min[kind] = float(np.min(zeta[sel]))
    assert ahead_min["fixed_nonlinear"] > -1e-3
    assert ahead_min["free_floating"] < -0.02


def test_cli_run_and_converge(tmp_path):
    cfg = tmp_path / "decay.cfg"
    cfg.write_text(CONFIG_TEXT)
    out = str(tmp_path / "cli_out")
    assert cli_main(["run", "--config", str(cfg), "--out", out]) == 0
    assert os.path.exists(os.path.join(out, "diag_N120.csv"))
    cfg3 = tmp_path / "decay3.cfg"
    cfg3.write_text(CONFIG_TEXT.replace("N = 60, 120", "N = 48, 72, 96"))
    assert cli_main(["converge", "--config", str(cfg3), "--out", out]) == 0
    assert os.path.exists(os.path.join(out, "report.csv"))


def test_cli_error_paths(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("scenario = decay_linear\n")
    assert cli_main(["run", "--config", str(bad)]) == 2
    assert cli_main(["run", "--config", str(tmp_path / "missing.cfg")]) == 2
    assert cli_main([]) == 2


def test_cli_scheme_override(tmp_path):
    cfg = tmp_path / "decay.cfg"
    cfg.write_text(CONFIG_TEXT)
    out = str(tmp_path / "o")
    assert cli_main(["run", "--config", str(cfg), "--out", out,
                     "--scheme", "lf"]) == 0


def test_seed_check_passes():
    assert cli_main(["--seed-check"]) == 0
