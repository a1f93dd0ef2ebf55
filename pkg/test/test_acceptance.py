"""
Desk-scale runs of the texture benchmark through the CLI: the default
dataset, ten seeds of every texture model at the default hyperparameters,
then eval and rsa on the trained checkpoints. Deselected by default.
"""
import json
import os

import numpy as np
import pandas as pd
import pytest

import main
from textures.gliders import CLASS_NAMES, GliderClass

pytestmark = pytest.mark.slow

MODEL_KINDS = ("cnn", "hocnn2", "hocnn3", "hocnn4")
N_SEEDS = 10
# Mean test accuracies (percent) listed for the reference architectures.
REFERENCE_ACCURACY = {"cnn": 59.14, "hocnn2": 82.42, "hocnn3": 89.02, "hocnn4": 92.32}
ACCURACY_TOLERANCE = 5.0
TWO_POINT_CLASSES = [cls.value for cls in GliderClass if len(cls.offsets) == 2]


def read_json(path):
    return json.loads(path.read_text())


def summed_confusion(directory) -> pd.DataFrame:
    frames = [pd.read_csv(directory / f"confusion-seed-{seed}.csv", skiprows=1, index_col="true") for seed in range(N_SEEDS)]
    return sum(frames[1:], frames[0])


@pytest.fixture(scope="module")
def benchmark(tmp_path_factory):
    root = tmp_path_factory.mktemp("benchmark")
    threads = str(min(4, os.cpu_count() or 1))
    assert main.main(["gen", "--out", str(root / "data"), "--seed", "0"]) == 0
    for kind in MODEL_KINDS:
        args = ["train", "--dataset", str(root / "data"), "--out", str(root / kind), "--model", kind,
                "--seeds", str(N_SEEDS), "--threads", threads]
        assert main.main(args) == 0
    return root


class TestDataset:
    def test_default_sizes(self, benchmark):
        manifest = read_json(benchmark / "data" / "manifest.json")
        assert manifest["sizes"] == {"train": 2000, "val": 1000, "test": 2000}
        assert manifest["level"] == 1.0
        for split, size in manifest["sizes"].items():
            assert all(count == size // 10 for count in manifest["class_counts"][split].values())


class TestClassification:
    def test_accuracy_ordering_and_reference_values(self, benchmark):
        means = {}
        for kind in MODEL_KINDS:
            summary = read_json(benchmark / kind / "summary.json")
            assert summary["status"] == "completed"
            assert summary["summary"]["n"] == N_SEEDS
            means[kind] = 100.0 * summary["summary"]["mean"]
        assert means["cnn"] < means["hocnn2"] < means["hocnn3"] < means["hocnn4"], means
        for kind, reference in REFERENCE_ACCURACY.items():
            assert means[kind] == pytest.approx(reference, abs=ACCURACY_TOLERANCE), kind

    def test_confusion_structure(self, benchmark, tmp_path):
        confusions = {}
        for kind in ("cnn", "hocnn4"):
            out = tmp_path / kind
            args = ["eval", "--dataset", str(benchmark / "data"), "--checkpoints", str(benchmark / kind),
                    "--seeds", str(N_SEEDS), "--out", str(out)]
            assert main.main(args) == 0
            confusion = summed_confusion(out)
            assert list(confusion.index) == list(CLASS_NAMES)
            confusions[kind] = confusion.div(confusion.sum(axis=1), axis=0)

        cnn = confusions["cnn"]
        for name in TWO_POINT_CLASSES:
            others = [other for other in TWO_POINT_CLASSES if other != name]
            assert cnn.loc[name, others].sum() > 0.2, name
        assert (np.diag(confusions["hocnn4"].to_numpy()) > 0.7).all()


class TestRepresentations:
    def test_hoconv_block_is_more_dispersed(self, benchmark, tmp_path):
        config = tmp_path / "rsa.json"
        config.write_text(json.dumps({
            "dataset_dir": str(benchmark / "data"),
            "checkpoint_dirs": {"cnn": str(benchmark / "cnn"), "hocnn3": str(benchmark / "hocnn3")},
            "baseline": "cnn",
            "per_class": 10,
            "seeds": list(range(N_SEEDS)),
        }))
        out = tmp_path / "out"
        assert main.main(["rsa", "--config", str(config), "--out", str(out)]) == 0
        rdm = pd.read_csv(out / "rdm-hocnn3-block1.csv", skiprows=1, index_col="stimulus")
        assert rdm.shape == (100, 100)
        blocks = read_json(out / "rsa_summary.json")["blocks"]
        assert blocks["hocnn3/block1"]["mean"] > blocks["cnn/block1"]["mean"]
