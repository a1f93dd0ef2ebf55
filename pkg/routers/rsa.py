import logging
from typing import Dict, List

import numpy as np
import pandas as pd

from analysis.rdm import Rdm, distance_distribution, rdm_compare
from analysis.representations import cross_layer_rdm_correlation, order_rdms, seed_averaged_rdms
from core.errors import ConfigError
from models.experiments import RsaConfig
from network.layers import HoConv
from routers.common import check_compatible, load_checkpoints, load_split
from textures.datasets import stimulus_set
from utils.file_system import ArtifactStore

logger = logging.getLogger(__name__)


def _rdm_frame(rdm: Rdm) -> pd.DataFrame:
    labels = [f"s{i}" for i in range(rdm.size)]
    return pd.DataFrame(rdm.matrix, index=pd.Index(labels, name="stimulus"), columns=labels)


def _as_corr01(rdm: Rdm) -> Rdm:
    return rdm if rdm.metric == "corr01" else Rdm(rdm.matrix / 2.0, "corr01")


def _write_histogram(store: ArtifactStore, name: str, rdm: Rdm, n_bins: int) -> Dict:
    distribution = distance_distribution(rdm, n_bins)
    store.write_csv(f"hist-{name}.csv", pd.DataFrame({
        "bin_low": distribution.edges[:-1],
        "bin_high": distribution.edges[1:],
        "count": distribution.counts,
    }))
    return {"mean": distribution.mean, "variance": distribution.variance, "modes": distribution.modes}


def cmd_rsa(config: RsaConfig) -> Dict:
    """
    Seed-averaged RDMs per block (and per expansion order for HoConv models),
    log-ratio and Hellinger maps against the baseline, distance histograms
    and the cross-layer Spearman table.

    Stimuli are the first ``per_class`` test images of every class; the
    checkpoints of ``config.seeds`` are loaded from each label's directory.
    """
    if config.baseline not in config.checkpoint_dirs:
        raise ConfigError(f"Baseline '{config.baseline}' has no checkpoint directory")
    store = ArtifactStore(config.out_dir, config.config_hash())
    stimuli = stimulus_set(load_split(config.dataset_dir, "test"), config.per_class)
    tags = list(dict.fromkeys(tag for pair in config.layer_pairs for tag in pair))

    models = {}
    for label, directory in config.checkpoint_dirs.items():
        models[label] = [model for _, model, _ in load_checkpoints(directory, config.seeds)]
        for model in models[label]:
            check_compatible(model, stimuli.images, "test split")

    rdms: Dict[str, Dict[str, Rdm]] = {}
    summary: Dict[str, Dict] = {"blocks": {}, "orders": {}, "comparisons": {}}
    for label, label_models in models.items():
        rdms[label] = seed_averaged_rdms(label_models, stimuli.images, tags, config.metric)
        for tag, rdm in rdms[label].items():
            store.write_csv(f"rdm-{label}-{tag}.csv", _rdm_frame(rdm), index=True)
            summary["blocks"][f"{label}/{tag}"] = _write_histogram(store, f"{label}-{tag}", rdm, config.n_bins)
        if all(isinstance(model.layers[0], HoConv) for model in label_models):
            for order, rdm in order_rdms(label_models, stimuli.images, config.metric).items():
                store.write_csv(f"rdm-{label}-order{order}.csv", _rdm_frame(rdm), index=True)
                summary["orders"][f"{label}/order{order}"] = _write_histogram(store, f"{label}-order{order}", rdm, config.n_bins)

    baseline = rdms[config.baseline]
    for label in models:
        if label == config.baseline:
            continue
        for tag in tags:
            log_ratio = rdm_compare(rdms[label][tag], baseline[tag], "log_ratio")
            hellinger = rdm_compare(_as_corr01(rdms[label][tag]), _as_corr01(baseline[tag]), "hellinger")
            name = f"{label}-vs-{config.baseline}-{tag}"
            store.write_csv(f"logratio-{name}.csv", _rdm_frame(Rdm(log_ratio)), index=True)
            store.write_csv(f"hellinger-{name}.csv", _rdm_frame(Rdm(hellinger)), index=True)
            summary["comparisons"][name] = {
                "mean_log_ratio": float(np.mean(log_ratio)),
                "mean_hellinger": float(np.mean(hellinger)),
                "spearman": rdm_compare(rdms[label][tag], baseline[tag], "spearman"),
            }

    rows: List[Dict] = []
    for label in models:
        for (tag_a, tag_b, rho) in cross_layer_rdm_correlation(models[label], models[config.baseline], stimuli.images,
                                                               config.layer_pairs, config.metric):
            rows.append({"model": label, "baseline": config.baseline, "layer": tag_a, "baseline_layer": tag_b, "spearman": rho})
    store.write_csv("crosslayer.csv", pd.DataFrame(rows, columns=["model", "baseline", "layer", "baseline_layer", "spearman"]))
    summary["cross_layer"] = rows
    store.write_json("rsa_summary.json", summary)
    return summary
