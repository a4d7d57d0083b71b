import json

import numpy as np
import pandas as pd
import pytest

import libotda.cli as cli
import libotda.core as core
import libotda.eval as ev
import libotda.featsel as featsel

SMALL_SYNTHETIC = [
    "--synthetic",
    "--synthetic-n-source",
    "60",
    "--synthetic-n-target",
    "80",
    "--synthetic-d",
    "6",
    "--synthetic-k",
    "2",
    "--synthetic-classes",
    "2",
    "--repetitions",
    "2",
    "--per-class",
    "10",
]


def write_shifted_pair(tmp_path, seed=5):
    source, target, planted = ev.generate_shifted_dataset(
        n_s=60, n_t=90, d=6, k_shifted=1, n_classes=2, seed=seed
    )
    source_path = tmp_path / "source.csv"
    target_path = tmp_path / "target.csv"
    cli.write_data_csv(source_path, source)
    cli.write_data_csv(target_path, target)
    return source_path, target_path, planted


def test_rank_1(tmp_path):
    # identical domains: no leakage, every feature gets the maximum score
    rng = np.random.default_rng(0)
    data = core.DataMatrix(rng.normal(size=(40, 5)))
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    cli.write_data_csv(a, data)
    cli.write_data_csv(b, data)
    out = tmp_path / "ranking.json"

    code = cli.main(["rank", "--source", str(a), "--target", str(b), "--out", str(out)])
    assert code == 0
    artifact = json.loads(out.read_text())
    assert set(artifact) == {
        "source",
        "target",
        "strategy",
        "lambda",
        "seed",
        "order",
        "diagonal_scores",
        "version",
    }
    assert sorted(artifact["order"]) == [0, 1, 2, 3, 4]
    assert artifact["strategy"] == "exact_ot"
    assert artifact["lambda"] == 1.0
    assert np.allclose(artifact["diagonal_scores"], 0.2, atol=1e-9)

    ranking = cli.RankingArtifact.from_json(out.read_text()).ranking()
    assert ranking.n_features == 5


def test_rank_2(tmp_path):
    source_path, target_path, planted = write_shifted_pair(tmp_path)
    out = tmp_path / "ranking.json"
    args = [
        "rank",
        "--source",
        str(source_path),
        "--target",
        str(target_path),
        "--header",
        "--label-column",
        "label",
        "--target-label-column",
        "label",
        "--out",
        str(out),
    ]
    assert cli.main(args) == 0
    first = out.read_bytes()
    order = json.loads(first)["order"]
    assert order[-1] == planted[0]

    # reruns are byte-identical
    assert cli.main(args) == 0
    assert out.read_bytes() == first


def test_rank_3(tmp_path):
    source_path, target_path, _ = write_shifted_pair(tmp_path, seed=6)
    out = tmp_path / "ranking.json"
    code = cli.main(
        [
            "rank",
            "--source",
            str(source_path),
            "--target",
            str(target_path),
            "--header",
            "--label-column",
            "label",
            "--target-label-column",
            "label",
            "--balance-per-class",
            "10",
            "--strategy",
            "random",
            "--seed",
            "4",
            "--lambda",
            "0.5",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    artifact = json.loads(out.read_text())
    assert artifact["strategy"] == "random"
    assert artifact["seed"] == 4
    assert artifact["lambda"] == 0.5


def test_rank_errors_1(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n3,x\n")
    good = tmp_path / "good.csv"
    good.write_text("1,2\n3,4\n")
    out = tmp_path / "ranking.json"

    code = cli.main(
        ["rank", "--source", str(bad), "--target", str(good), "--out", str(out)]
    )
    assert code == 1
    err = capsys.readouterr().err
    assert "libotda rank: error:" in err
    assert "row 2" in err
    assert not out.exists()

    code = cli.main(
        [
            "rank",
            "--source",
            str(good),
            "--target",
            str(tmp_path / "missing.csv"),
            "--out",
            str(out),
        ]
    )
    assert code == 1


def test_rank_errors_2(tmp_path, monkeypatch, capsys):
    def failing_rank_features(*args, **kwargs):
        raise core.SolverError("did not converge")

    monkeypatch.setattr("libotda.cli._commands.rank_features", failing_rank_features)
    good = tmp_path / "good.csv"
    good.write_text("1,2\n3,4\n")
    out = tmp_path / "ranking.json"
    code = cli.main(
        ["rank", "--source", str(good), "--target", str(good), "--out", str(out)]
    )
    assert code == 2
    assert "solver failure: did not converge" in capsys.readouterr().err


def test_rank_errors_3(tmp_path, capsys):
    bad = tmp_path / "latin.csv"
    bad.write_bytes(b"1,2\n3,\xff\xfe\n5,6\n")
    good = tmp_path / "good.csv"
    good.write_text("1,2\n3,4\n")
    out = tmp_path / "ranking.json"
    code = cli.main(
        ["rank", "--source", str(bad), "--target", str(good), "--out", str(out)]
    )
    assert code == 1
    err = capsys.readouterr().err
    assert "not valid UTF-8" in err
    assert "latin.csv" in err
    assert not out.exists()


def test_pipeline_1(tmp_path):
    out_dir = tmp_path / "run"
    args = ["pipeline", *SMALL_SYNTHETIC, "--feature-counts", "2,4,6"]
    assert cli.main(args + ["--out-dir", str(out_dir)]) == 0

    document = json.loads((out_dir / "result.json").read_text())
    assert set(document["arms"]) == {"descending", "ascending", "random"}
    assert document["source"] == "synthetic"
    assert len(document["planted"]) == 2
    assert document["config"]["repetitions"] == 2
    for result in document["arms"].values():
        assert result["feature_counts"] == [2, 4, 6]
        assert np.array(result["per_repetition_scores"]).shape == (2, 3)

    lines = (out_dir / "scores.csv").read_text().splitlines()
    assert lines[0] == "repetition,d_star,arm,score,seconds"
    assert len(lines) == 1 + 3 * 2 * 3


def test_pipeline_2(tmp_path):
    # with all features selected every ordering gives the plain 1-NN score
    out_dir = tmp_path / "run"
    args = ["pipeline", *SMALL_SYNTHETIC, "--feature-counts", "6"]
    assert cli.main(args + ["--out-dir", str(out_dir)]) == 0
    document = json.loads((out_dir / "result.json").read_text())

    source, target, _ = ev.generate_shifted_dataset(
        n_s=60, n_t=80, d=6, k_shifted=2, n_classes=2, seed=0
    )
    expected = []
    for r in range(2):
        balanced = featsel.balance_source_by_class(source, 10, r)
        predicted = ev.knn_predict(balanced, target.without_labels())
        expected.append([ev.accuracy(predicted, target.labels)])
    for result in document["arms"].values():
        assert np.allclose(result["per_repetition_scores"], expected, atol=1e-12)


def test_pipeline_3(tmp_path):
    # timings are written as zeros unless requested
    args = ["pipeline", *SMALL_SYNTHETIC, "--feature-counts", "3"]
    assert cli.main(args + ["--out-dir", str(tmp_path / "a")]) == 0
    assert cli.main(args + ["--out-dir", str(tmp_path / "b")]) == 0
    for name in ["result.json", "scores.csv"]:
        assert (tmp_path / "a" / name).read_bytes() == (
            tmp_path / "b" / name
        ).read_bytes()
    for line in (tmp_path / "a" / "scores.csv").read_text().splitlines()[1:]:
        assert line.endswith(",0.0")


def test_pipeline_record_times_1(tmp_path):
    out_dir = tmp_path / "run"
    args = ["pipeline", *SMALL_SYNTHETIC, "--feature-counts", "3", "--record-times"]
    assert cli.main(args + ["--out-dir", str(out_dir)]) == 0
    document = json.loads((out_dir / "result.json").read_text())
    for result in document["arms"].values():
        times = np.array(result["cell_times"])
        assert times.shape == (2, 1)
        assert np.all(times >= 0.0)
        assert times.sum() > 0.0

    frame = pd.read_csv(out_dir / "scores.csv")
    assert list(frame.columns) == ["repetition", "d_star", "arm", "score", "seconds"]
    assert (frame["seconds"] >= 0.0).all()


def test_pipeline_4(tmp_path):
    out_dir = tmp_path / "run"
    args = [
        "pipeline",
        *SMALL_SYNTHETIC,
        "--feature-counts",
        "4",
        "--adaptation",
        "ot3",
        "--classifier",
        "svm",
        "--metric",
        "auc",
        "--arms",
        "descending",
        "--out-dir",
        str(out_dir),
    ]
    assert cli.main(args) == 0
    document = json.loads((out_dir / "result.json").read_text())
    assert list(document["arms"]) == ["descending"]
    assert document["config"]["adaptation"] == "barycentric_ot3"
    score = document["arms"]["descending"]["means"][0]
    assert 0.0 <= score <= 1.0


def test_pipeline_errors_1(tmp_path):
    with pytest.raises(SystemExit) as e:
        cli.main(["pipeline", *SMALL_SYNTHETIC])
    assert e.value.code != 0

    # auc needs the linear SVM
    code = cli.main(
        [
            "pipeline",
            *SMALL_SYNTHETIC,
            "--metric",
            "auc",
            "--out-dir",
            str(tmp_path / "run"),
        ]
    )
    assert code == 1

    code = cli.main(["pipeline", "--out-dir", str(tmp_path / "run")])
    assert code == 1


def test_adapt_1(tmp_path):
    source_path, _, _ = write_shifted_pair(tmp_path)
    out = tmp_path / "adapted.csv"
    code = cli.main(
        [
            "adapt",
            "--source",
            str(source_path),
            "--target",
            str(source_path),
            "--header",
            "--label-column",
            "label",
            "--target-label-column",
            "label",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    source = cli.load_csv(source_path, has_header=True, label_column="label")
    adapted = cli.load_csv(out, has_header=True, label_column="label")
    assert adapted.feature_names == source.feature_names
    assert np.array_equal(adapted.labels, source.labels)
    assert np.allclose(adapted.values, source.values, atol=1e-9)


def test_adapt_2(tmp_path):
    source_path, target_path, _ = write_shifted_pair(tmp_path)
    out = tmp_path / "adapted.csv"
    code = cli.main(
        [
            "adapt",
            "--source",
            str(source_path),
            "--target",
            str(target_path),
            "--header",
            "--label-column",
            "label",
            "--target-label-column",
            "label",
            "--method",
            "entropic",
            "--lambda",
            "1e-6",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    target = cli.load_csv(target_path, has_header=True, label_column="label")
    adapted = cli.load_csv(out, has_header=True, label_column="label")
    # nearly uniform plan: every row goes to the target mean
    assert adapted.shape == (60, 6)
    assert np.allclose(adapted.values, target.values.mean(axis=0), atol=1e-2)


def test_adapt_3(tmp_path):
    source_path, target_path, _ = write_shifted_pair(tmp_path)
    out = tmp_path / "adapted.csv"
    base = [
        "adapt",
        "--source",
        str(source_path),
        "--target",
        str(target_path),
        "--header",
        "--target-label-column",
        "label",
        "--method",
        "class",
        "--out",
        str(out),
    ]
    assert cli.main(base) == 1
    assert cli.main(base + ["--label-column", "label"]) == 0
    adapted = cli.load_csv(out, has_header=True, label_column="label")
    assert adapted.shape == (60, 6)
