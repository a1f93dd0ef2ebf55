import json

import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

import main
from core.errors import ConfigError, DivergenceError
from models.experiments import FlopsConfig, GenConfig, TrainCommandConfig
from utils.file_system import ArtifactStore


def read_csv(path):
    return pd.read_csv(path, skiprows=1)


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """A small dataset plus one-epoch hocnn2 and cnn2 checkpoints for seeds 0 and 1."""
    root = tmp_path_factory.mktemp("cli")
    data = root / "data"
    assert main.main(["gen", "--out", str(data), "--sizes", "40,20,40", "--seed", "0"]) == 0
    for kind in ("hocnn2", "cnn2"):
        args = ["train", "--dataset", str(data), "--out", str(root / kind), "--model", kind, "--seeds", "0,1",
                "--epochs", "1", "--batch-size", "20"]
        assert main.main(args) == 0
    return root


class TestParseSeeds:
    def test_forms(self):
        assert main.parse_seeds("1,4,9", None) == [1, 4, 9]
        assert main.parse_seeds("3", 5) == [5, 6, 7]
        assert main.parse_seeds("2", None) == [0, 1]
        assert main.parse_seeds(None, 5) == [5]
        assert main.parse_seeds(None, None) is None


class TestConfigs:
    def test_hash_ignores_output_location(self):
        a = GenConfig(out_dir="a", threads=1)
        b = GenConfig(out_dir="b", threads=4)
        assert a.config_hash() == b.config_hash()
        assert a.config_hash() != GenConfig(seeds=[1]).config_hash()

    def test_layering(self, tmp_path):
        path = tmp_path / "train.json"
        path.write_text(json.dumps({"lr": 0.01, "max_epochs": 5}))
        config = TrainCommandConfig.load(str(path), {"max_epochs": 7, "lr": None}, {"out_dir": "x", "lr": 0.5})
        assert (config.lr, config.max_epochs, config.out_dir) == (0.01, 7, "x")

    def test_runtime_defaults_come_from_settings(self, monkeypatch, tmp_path):
        monkeypatch.setattr(main.settings.runtime, "threads", 3)
        monkeypatch.setattr(main.settings.runtime, "out_dir", str(tmp_path))
        config = main.resolve_config(main.build_parser().parse_args(["flops"]))
        assert (config.threads, config.out_dir) == (3, str(tmp_path))
        config = main.resolve_config(main.build_parser().parse_args(["flops", "--threads", "2"]))
        assert config.threads == 2

    def test_rejections(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2]")
        with pytest.raises(ConfigError):
            GenConfig.load(str(path))
        with pytest.raises(ValidationError):
            GenConfig(sizes=(25, 10, 10))
        with pytest.raises(ValidationError):
            GenConfig(colour="red")
        with pytest.raises(ValidationError):
            GenConfig(seeds=[1, 1])
        with pytest.raises(ValidationError):
            FlopsConfig(max_order=5)


class TestGen:
    def test_outputs(self, workspace):
        manifest = json.loads((workspace / "data" / "manifest.json").read_text())
        assert manifest["sizes"] == {"train": 40, "val": 20, "test": 40}
        for split, counts in manifest["class_counts"].items():
            assert sum(counts.values()) == manifest["sizes"][split]
        assert manifest["tool"] == "hoconv-lab"

    def test_rerun_is_byte_identical(self, workspace, tmp_path):
        assert main.main(["gen", "--out", str(tmp_path), "--sizes", "40,20,40", "--seed", "0"]) == 0
        for name in ("train.hotx", "val.hotx", "test.hotx", "manifest.json"):
            assert (tmp_path / name).read_bytes() == (workspace / "data" / name).read_bytes()


class TestTrainAndEval:
    def test_summary(self, workspace):
        summary = json.loads((workspace / "hocnn2" / "summary.json").read_text())
        assert summary["status"] == "completed"
        assert [run["seed"] for run in summary["results"]] == [0, 1]
        assert [run["checkpoint"] for run in summary["results"]] == ["seed-0.hock", "seed-1.hock"]
        assert summary["summary"]["n"] == 2
        history = read_csv(workspace / "hocnn2" / "history-seed-0.csv")
        assert list(history["epoch"]) == [1]

    def test_rerun_is_byte_identical(self, workspace, tmp_path):
        args = ["train", "--dataset", str(workspace / "data"), "--out", str(tmp_path), "--model", "hocnn2",
                "--seeds", "0,1", "--epochs", "1", "--batch-size", "20", "--threads", "2"]
        assert main.main(args) == 0
        for name in ("summary.json", "seed-0.hock", "seed-1.hock", "history-seed-1.csv"):
            assert (tmp_path / name).read_bytes() == (workspace / "hocnn2" / name).read_bytes()

    def test_eval(self, workspace, tmp_path):
        args = ["eval", "--dataset", str(workspace / "data"), "--checkpoints", str(workspace / "hocnn2"),
                "--seeds", "0,1", "--out", str(tmp_path)]
        assert main.main(args) == 0
        record = json.loads((tmp_path / "eval.json").read_text())
        assert sorted(record["accuracy"]) == ["0", "1"]
        confusion = read_csv(tmp_path / "confusion-seed-0.csv").set_index("true")
        assert list(confusion.index) == list(confusion.columns)
        assert list(confusion.index)[0] == "gamma"
        assert (confusion.sum(axis=1) == 4).all()
        trained = json.loads((workspace / "hocnn2" / "summary.json").read_text())["results"][0]["test_accuracy"]
        assert record["accuracy"]["0"] == pytest.approx(trained)


class TestAnalysisCommands:
    def test_flops(self, tmp_path):
        assert main.main(["flops", "--out", str(tmp_path)]) == 0
        layer = read_csv(tmp_path / "flops.csv")
        assert list(layer["order"]) == [1, 2, 3]
        assert list(layer["unique_weights"]) == [9, 45, 165]
        assert layer["ratio"][0] == 1.0
        assert layer["ratio"][1] == pytest.approx(5.04, rel=0.1)
        assert layer["ratio"][2] == pytest.approx(18.62, rel=0.1)
        models = read_csv(tmp_path / "model_flops.csv")
        assert list(models["model"]) == ["cnn", "cnn2", "hocnn2", "hocnn3", "hocnn4"]

    def test_pca_tied(self, tmp_path):
        args = ["pca-tied", "--out", str(tmp_path), "--models", "cnn,hocnn2", "--inits", "6", "--seeds", "0,1"]
        assert main.main(args) == 0
        curve = read_csv(tmp_path / "pca-hocnn2-relu.csv")
        assert (curve["cumulative"].diff().dropna() >= -1e-12).all()
        assert curve["cumulative"].iloc[-1] == pytest.approx(1.0)
        summary = json.loads((tmp_path / "pca_summary.json").read_text())
        assert [r["model_kind"] for r in summary["results"]] == ["cnn", "hocnn2"]

    def test_rsa(self, workspace, tmp_path):
        config = tmp_path / "rsa.json"
        config.write_text(json.dumps({
            "dataset_dir": str(workspace / "data"),
            "checkpoint_dirs": {"cnn2": str(workspace / "cnn2"), "hocnn2": str(workspace / "hocnn2")},
            "baseline": "cnn2",
            "per_class": 3,
            "seeds": [0, 1],
        }))
        out = tmp_path / "out"
        assert main.main(["rsa", "--config", str(config), "--out", str(out)]) == 0
        rdm = read_csv(out / "rdm-hocnn2-block1.csv").set_index("stimulus")
        assert rdm.shape == (30, 30)
        np.testing.assert_allclose(rdm.to_numpy(), rdm.to_numpy().T, atol=1e-12)
        hist = read_csv(out / "hist-hocnn2-block1.csv")
        assert hist["count"].sum() == 30 * 29 // 2
        assert (out / "rdm-hocnn2-order2.csv").exists()
        assert not (out / "rdm-cnn2-order1.csv").exists()
        cross = read_csv(out / "crosslayer.csv")
        self_rows = cross[cross["model"] == "cnn2"]
        assert list(self_rows["layer"]) == ["block1", "block2"]
        assert (self_rows["spearman"] == 1.0).all()

    def test_perturb(self, workspace, tmp_path):
        config = tmp_path / "perturb.json"
        config.write_text(json.dumps({
            "dataset_dir": str(workspace / "data"),
            "checkpoint_dirs": {"hocnn2": str(workspace / "hocnn2")},
            "intensities": [0.0, 0.12],
            "seeds": [0, 1],
        }))
        out = tmp_path / "out"
        assert main.main(["perturb", "--config", str(config), "--out", str(out)]) == 0
        frame = read_csv(out / "perturb.csv")
        assert len(frame) == 2 * 10
        assert (frame[frame["intensity"] == 0.0]["normalized_accuracy"] == 100.0).all()


class TestExitCodes:
    def test_missing_dataset(self, tmp_path):
        args = ["train", "--dataset", str(tmp_path / "nowhere"), "--out", str(tmp_path / "out"), "--epochs", "1"]
        assert main.main(args) == main.EXIT_IO

    def test_invalid_config(self, tmp_path):
        assert main.main(["gen", "--out", str(tmp_path), "--sizes", "25,10,10"]) == main.EXIT_CONFIG

    def test_unknown_config_key(self, tmp_path):
        config = tmp_path / "flops.json"
        config.write_text(json.dumps({"kernel": [3, 3]}))
        assert main.main(["flops", "--config", str(config), "--out", str(tmp_path)]) == main.EXIT_CONFIG

    def test_corrupt_dataset(self, tmp_path):
        ArtifactStore(str(tmp_path)).write_bytes("test.hotx", b"HOTX\x01garbage")
        args = ["eval", "--dataset", str(tmp_path), "--checkpoints", str(tmp_path), "--out", str(tmp_path / "out")]
        assert main.main(args) == main.EXIT_IO

    def test_divergence(self, monkeypatch, tmp_path):
        def diverge(config):
            raise DivergenceError(2)

        monkeypatch.setitem(main.COMMANDS, "flops", (FlopsConfig, diverge))
        assert main.main(["flops", "--out", str(tmp_path)]) == main.EXIT_DIVERGED

