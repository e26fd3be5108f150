import json

import numpy as np

from hypmetrics import DistanceMatrix, load_point_cloud
from hypmetrics.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _strip_timing(text: str) -> str:
    obj = json.loads(text)

    def scrub(node):
        if isinstance(node, dict):
            node.pop("elapsed_ms", None)
            for v in node.values():
                scrub(v)
        elif isinstance(node, list):
            for v in node:
                scrub(v)

    scrub(obj)
    return json.dumps(obj, sort_keys=True)


def test_gen_writes_deterministic_cloud(tmp_path, capsys):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    code1, _, _ = run(capsys, "gen", "--n", "6", "--seed", "5", "--out", str(out1))
    code2, _, _ = run(capsys, "gen", "--n", "6", "--seed", "5", "--out", str(out2))
    assert code1 == code2 == 0
    assert out1.read_bytes() == out2.read_bytes()
    cloud = load_point_cloud(out1)
    assert len(cloud) == 6


def test_gen_json_roundtrip(tmp_path, capsys):
    out = tmp_path / "c.json"
    code, _, _ = run(capsys, "gen", "--n", "4", "--dim", "3", "--seed", "1", "--out", str(out))
    assert code == 0
    assert load_point_cloud(out).dim == 3


def test_dist_tau_variant(tmp_path, capsys):
    cloud = tmp_path / "cloud.csv"
    run(capsys, "gen", "--n", "8", "--seed", "2", "--out", str(cloud))
    out = tmp_path / "m.json"
    code, _, _ = run(
        capsys,
        "dist",
        "--cloud",
        str(cloud),
        "--punctures",
        "[[2.0, 2.0]]",
        "--variant",
        "tau_p",
        "--out",
        str(out),
    )
    assert code == 0
    m = DistanceMatrix.from_dict(json.loads(out.read_text()))
    assert m.n == 8


def test_dist_point_on_puncture_is_input_error(tmp_path, capsys):
    cloud = tmp_path / "cloud.json"
    cloud.write_text(
        json.dumps(
            {
                "dim": 2,
                "points": [
                    {"label": "a", "coords": [0.0, 0.0]},
                    {"label": "b", "coords": [1.0, 0.0]},
                    {"label": "c", "coords": [0.0, 1.0]},
                ],
            }
        )
    )
    code, _, err = run(
        capsys,
        "dist",
        "--cloud",
        str(cloud),
        "--punctures",
        "[[1.0, 0.0]]",
        "--variant",
        "tau_p",
        "--out",
        str(cloud.with_name("m.json")),
    )
    assert code == 2
    assert "puncture" in err


def test_dist_avg_k1_equals_tau(tmp_path, capsys):
    cloud = tmp_path / "cloud.csv"
    run(capsys, "gen", "--n", "7", "--seed", "3", "--out", str(cloud))
    out_a = tmp_path / "a.json"
    out_b = tmp_path / "b.json"
    run(capsys, "dist", "--cloud", str(cloud), "--punctures", "[[3.0, 3.0]]",
        "--variant", "avg_tau", "--out", str(out_a))
    run(capsys, "dist", "--cloud", str(cloud), "--punctures", "[[3.0, 3.0]]",
        "--variant", "tau_p", "--anchor", "0", "--out", str(out_b))
    ma = DistanceMatrix.from_dict(json.loads(out_a.read_text()))
    mb = DistanceMatrix.from_dict(json.loads(out_b.read_text()))
    assert np.array_equal(ma.entries, mb.entries)


def test_delta_collinear_zero(tmp_path, capsys):
    cloud = tmp_path / "line.csv"
    cloud.write_text("label,x1\na,0.0\nb,1.0\nc,2.0\nd,3.0\n")
    code, out, _ = run(capsys, "delta", "--cloud", str(cloud))
    assert code == 0
    report = json.loads(out)
    assert report["delta"] == 0.0
    assert report["mode"] == "exact"


def test_delta_workers_equal(tmp_path, capsys):
    cloud = tmp_path / "cloud.csv"
    run(capsys, "gen", "--n", "14", "--seed", "4", "--out", str(cloud))
    _, out1, _ = run(capsys, "delta", "--cloud", str(cloud), "--workers", "1")
    _, out8, _ = run(capsys, "delta", "--cloud", str(cloud), "--workers", "2")
    assert _strip_timing(out1) == _strip_timing(out8)


def test_delta_sampled_below_exact(tmp_path, capsys):
    cloud = tmp_path / "cloud.csv"
    run(capsys, "gen", "--n", "16", "--seed", "6", "--out", str(cloud))
    _, exact_out, _ = run(capsys, "delta", "--cloud", str(cloud), "--workers", "1")
    _, sampled_out, _ = run(
        capsys, "delta", "--cloud", str(cloud), "--mode", "sampled",
        "--samples", "300", "--seed", "9", "--workers", "1",
    )
    assert json.loads(sampled_out)["delta"] <= json.loads(exact_out)["delta"]


def test_verify_axioms_euclidean_exit_0(tmp_path, capsys):
    cloud = tmp_path / "cloud.csv"
    run(capsys, "gen", "--n", "12", "--seed", "7", "--out", str(cloud))
    code, out, err = run(capsys, "verify", "axioms", "--cloud", str(cloud))
    assert code == 0
    assert json.loads(out)["axioms"]["violations"] == []
    assert "pass" in err


def test_verify_axioms_counterexample_exit_1(tmp_path, capsys):
    matrix = tmp_path / "cx.json"
    matrix.write_text(
        json.dumps(
            {
                "n": 4,
                "entries": [
                    [0.0, 2.0, 1.0, 1.0],
                    [2.0, 0.0, 1.0, 1.0],
                    [1.0, 1.0, 0.0, 2.0],
                    [1.0, 1.0, 2.0, 0.0],
                ],
            }
        )
    )
    code, out, _ = run(
        capsys, "verify", "axioms", "--matrix", str(matrix),
        "--punctures", "0", "--variant", "tilde_tau_p",
    )
    assert code == 1
    report = json.loads(out)["axioms"]
    assert sorted(tuple(v["indices"]) for v in report["violations"]) == [
        (1, 2, 0),
        (2, 1, 0),
    ]


def test_verify_ptolemy_and_sandwich(tmp_path, capsys):
    cloud = tmp_path / "cloud.csv"
    run(capsys, "gen", "--n", "10", "--seed", "8", "--out", str(cloud))
    code, _, _ = run(capsys, "verify", "ptolemy", "--cloud", str(cloud))
    assert code == 0
    code, _, _ = run(
        capsys, "verify", "sandwich", "--kind", "taxicab", "--cloud", str(cloud)
    )
    assert code == 0
    code, _, _ = run(
        capsys, "verify", "sandwich", "--kind", "avg", "--cloud", str(cloud),
        "--punctures", "[[2.5, 2.5], [3.0, -1.0]]", "--variant", "avg_tau",
    )
    assert code == 0


def test_verify_lemmas_quick(capsys):
    code, out, _ = run(
        capsys, "verify", "lemmas", "--n", "16", "--samples", "2000", "--seed", "10"
    )
    assert code == 0
    payload = json.loads(out)
    assert "factor_nine" in payload
    assert "separated_pair_K6" in payload


def test_repro_four_point(capsys):
    code, out, err = run(capsys, "repro", "four-point")
    assert code == 0
    assert json.loads(out)["passed"] is True
    assert "scenario: four-point" in err


def test_repro_arctan_quick(capsys):
    code, out, _ = run(
        capsys, "repro", "arctan", "--t-grid", "1,10", "--samples", "2000"
    )
    assert code == 0
    assert json.loads(out)["passed"] is True


def test_repro_sweep_quick(capsys):
    code, out, _ = run(
        capsys, "repro", "sweep", "--n", "8", "--k-list", "1,2", "--trials", "2"
    )
    assert code == 0
    assert json.loads(out)["passed"] is True


def test_repro_all_writes_directory(tmp_path, capsys):
    out_dir = tmp_path / "reports"
    code, _, _ = run(
        capsys, "repro", "all", "--n", "8", "--k-list", "1", "--trials", "1",
        "--t-grid", "1", "--samples", "500", "--out", str(out_dir),
    )
    assert code == 0
    names = sorted(p.name for p in out_dir.iterdir())
    assert names == ["arctan.json", "four_point.json", "sweep.json"]
    for p in out_dir.iterdir():
        assert json.loads(p.read_text())["passed"] is True


def test_outdir_env_default(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("HYPMETRICS_OUTDIR", str(tmp_path))
    code, _, _ = run(capsys, "gen", "--n", "4", "--seed", "1")
    assert code == 0
    assert (tmp_path / "cloud.csv").exists()


def test_bad_input_exit_2(tmp_path, capsys):
    code, _, err = run(capsys, "delta", "--cloud", str(tmp_path / "missing.csv"))
    assert code == 2
    assert "error" in err
    code, _, _ = run(capsys, "verify", "axioms")
    assert code == 2


def test_repro_reports_deterministic(capsys):
    _, out1, _ = run(capsys, "repro", "sweep", "--n", "8", "--k-list", "1", "--trials", "2")
    _, out2, _ = run(capsys, "repro", "sweep", "--n", "8", "--k-list", "1", "--trials", "2")
    assert out1 == out2
