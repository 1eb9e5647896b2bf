import json
from pathlib import Path

import numpy as np
import pytest

from rydvortex import cli
from rydvortex.io import fmt, read_csv, write_csv

SMALL = ["--grid-n", "221", "--tau-max", "0.2", "--dt", "0.01"]


def _run(tmp_path, *argv):
    return cli.main(["run", *argv])


def _files(d):
    return {p.name: p.read_bytes() for p in sorted(Path(d).iterdir())}


def test_spectra_outputs_and_metadata(tmp_path):
    out = tmp_path / "s"
    assert _run(tmp_path, "spectra", "--out", str(out), "--grid-scale", "0.1") == 0
    meta = json.loads((out / "metadata.json").read_text())
    assert meta["files"] == ["metadata.json", "spectra.csv"]
    assert meta["knobs"]["grid_scale"] == 0.1
    assert meta["derived"]["r_b"] == pytest.approx(15.306, abs=1e-3)
    hdr, names, data = read_csv(out / "spectra.csv")
    assert names == ["delta_MHz", "T3", "T2", "phase3_rad", "phase2_rad"]
    assert hdr["scenario"] == "spectra" and data.shape == (121, 5)
    assert np.all((data[:, 1:3] >= 0) & (data[:, 1:3] <= 1))


def test_reruns_are_byte_identical(tmp_path):
    for tag in ("a", "b"):
        assert _run(tmp_path, "fig3-ansatz", "--out", str(tmp_path / tag), "--grid-scale", "0.5") == 0
    a, b = _files(tmp_path / "a"), _files(tmp_path / "b")
    ma, mb = (json.loads(x.pop("metadata.json")) for x in (a, b))
    assert a == b  # data files byte for byte
    ma["knobs"].pop("out"), mb["knobs"].pop("out")
    assert ma == mb
    topo = json.loads((tmp_path / "a" / "topology.json").read_text())
    assert topo["full"]["n_rings"] == 1 and topo["pairwise"]["n_rings"] == 0


def test_fig2_worker_pool_matches_serial(tmp_path):
    for tag, threads in (("serial", "1"), ("pool", "2")):
        argv = ["fig2", "--out", str(tmp_path / tag), "--od", "30,40", "--threads", threads, *SMALL]
        assert _run(tmp_path, *argv) == 0
    a, b = _files(tmp_path / "serial"), _files(tmp_path / "pool")
    assert a["observables.csv"] == b["observables.csv"]
    assert a["zero_delay.csv"] == b["zero_delay.csv"]
    _, names, data = read_csv(tmp_path / "serial" / "observables.csv")
    assert names[:2] == ["OD", "tau_us"]
    assert sorted(set(data[:, 0])) == [30.0, 40.0] and data.shape[0] == 2 * 21


def test_figSI1_files(tmp_path):
    out = tmp_path / "si"
    assert _run(tmp_path, "figSI1", "--out", str(out), *SMALL) == 0
    for name in ("psi_abs2.csv", "psi_phase.csv", "ebar_abs2.csv", "ebar_phase.csv"):
        hdr, names, data = read_csv(out / name)
        assert data.shape[1] == 3 and np.all(np.isfinite(data))
    meta = json.loads((out / "metadata.json").read_text())
    assert meta["result"]["OD"] == 73.0


def test_custom_complex_columns(tmp_path):
    out = tmp_path / "c"
    assert _run(tmp_path, "custom", "--out", str(out), "--od", "40", *SMALL) == 0
    hdr, names, data = read_csv(out / "amplitudes.csv")
    assert names == ["x1_um", "x2_um", "EE_re", "EE_im", "ES_re", "ES_im", "SS_re", "SS_im"]
    assert hdr["params_MHz_um"]["OD"] == 40.0


def test_fig1e_boundaries(tmp_path):
    out = tmp_path / "pd"
    assert _run(tmp_path, "fig1e", "--out", str(out), "--lambda", "1.5", "--phi", "0.5,1.0") == 0
    _, names, data = read_csv(out / "analytic_boundaries.csv")
    assert names[:3] == ["lambda", "weak_phi_over_pi", "strong_phi_over_pi"]
    _, names, data = read_csv(out / "phase_diagram.csv")
    assert data.shape == (2, 4)
    assert data[:, 2].tolist() == [0.0, 1.0]


def test_malformed_config_leaves_nothing(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text("{ not json")
    out = tmp_path / "never"
    assert _run(tmp_path, "spectra", "--config", str(cfg), "--out", str(out)) == cli.EXIT_CONFIG
    err = json.loads(capsys.readouterr().err.strip())
    assert err["error"] == "config error" and err["status"] == 2
    assert not out.exists()
    assert [p.name for p in tmp_path.iterdir()] == ["bad.json"]


def test_solver_input_error_leaves_nothing(tmp_path, capsys):
    out = tmp_path / "x"
    argv = ["custom", "--out", str(out), "--grid-n", "51", "--tau-max", "0.2", "--dt", "0.01"]
    assert _run(tmp_path, *argv) != 0
    assert json.loads(capsys.readouterr().err.strip())["status"] in (2, 3)
    assert list(tmp_path.iterdir()) == []


def test_io_error_status(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert _run(tmp_path, "spectra", "--out", str(blocker / "sub" / "out")) == cli.EXIT_IO
    assert json.loads(capsys.readouterr().err.strip())["error"] == "io error"


def test_precedence_flags_over_env_over_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"params": {"OD": 50.0}, "run": {"dt": 0.05, "threads": 3,
                                                                "grid_scale": 0.5}}))
    env = {"RYDVORTEX_THREADS": "2", "RYDVORTEX_OUT": str(tmp_path / "o"),
           "RYDVORTEX_SCENARIO": "spectra"}
    args = cli.build_parser().parse_args(["run", "--config", str(cfg), "--grid-scale", "0.25"])
    spec = cli.resolve(args, env)
    assert spec.scenario == "spectra"
    assert spec.params.OD == pytest.approx(50.0)
    assert (spec.dt, spec.threads, spec.grid_scale) == (0.05, 2, 0.25)


def test_config_validation(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"run": {"bogus": 1}}))
    args = cli.build_parser().parse_args(["run", "spectra", "--out", "o", "--config", str(cfg)])
    with pytest.raises(cli.ConfigError):
        cli.resolve(args, {})
    args = cli.build_parser().parse_args(["run", "fig2", "--out", "o", "--dt", "0.3"])
    with pytest.raises(cli.ConfigError):
        cli.resolve(args, {})
    with pytest.raises(cli.ConfigError):
        cli.resolve(cli.build_parser().parse_args(["run", "fig2"]), {})


def test_csv_round_trip(tmp_path):
    p = write_csv(tmp_path / "t.csv", ["a", "z"], [[0.1, -0.0], [1 + 2j, 3 - 1j]], {"k": 1})
    hdr, names, data = read_csv(p)
    assert hdr == {"k": 1} and names == ["a", "z_re", "z_im"]
    assert np.allclose(data, [[0.1, 1, 2], [0, 3, -1]])
    assert fmt(-0.0) == "0" and fmt(float("nan")) == "nan" and fmt(True) == "1"
    with pytest.raises(ValueError):
        write_csv(tmp_path / "u.csv", ["a", "b"], [[1, 2], [1]])
