import argparse
import json
import logging
import sys
from typing import Any, Callable, Dict, List, Optional, Tuple, Type

import logfire
from dotenv import load_dotenv

# Load environment variables early
load_dotenv()

from config import TOOL_NAME, VERSION, settings
from core.errors import DivergenceError, FormatError
from models.experiments import (
    EvalConfig,
    ExperimentConfig,
    FlopsConfig,
    GenConfig,
    PcaTiedConfig,
    PerturbConfig,
    RsaConfig,
    TrainCommandConfig,
    expand_seeds,
)
from models.results import SweepResult
from routers.evaluation import cmd_eval
from routers.flops import cmd_flops
from routers.gen import cmd_gen
from routers.pca_tied import cmd_pca_tied
from routers.perturb import cmd_perturb
from routers.rsa import cmd_rsa
from routers.training import cmd_train

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_DIVERGED = 4

COMMANDS: Dict[str, Tuple[Type[ExperimentConfig], Callable]] = {
    "gen": (GenConfig, cmd_gen),
    "train": (TrainCommandConfig, cmd_train),
    "eval": (EvalConfig, cmd_eval),
    "pca-tied": (PcaTiedConfig, cmd_pca_tied),
    "rsa": (RsaConfig, cmd_rsa),
    "perturb": (PerturbConfig, cmd_perturb),
    "flops": (FlopsConfig, cmd_flops),
}


def parse_seeds(seeds: Optional[str], seed: Optional[int]) -> Optional[List[int]]:
    """
    ``--seeds 1,4,9`` is an explicit list; ``--seeds 10`` is a count expanded
    from ``--seed`` (default 0); ``--seed 5`` alone is ``[5]``.
    """
    if seeds is None:
        return None if seed is None else [seed]
    if "," in seeds:
        return [int(part) for part in seeds.split(",") if part.strip()]
    return expand_seeds(seed or 0, int(seeds))


def _int_list(value: str) -> List[int]:
    return [int(part) for part in value.split(",")]


def _str_list(value: str) -> List[str]:
    return [part.strip() for part in value.split(",") if part.strip()]


def _float_list(value: str) -> List[float]:
    return [float(part) for part in value.split(",")]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its keys")
    common.add_argument("--out", help="Output directory")
    common.add_argument("--seed", type=int, help="Single seed, or the base of a --seeds count")
    common.add_argument("--seeds", help="Comma-separated seed list or a seed count")
    common.add_argument("--threads", type=int, help="Concurrent seeds (falls back to HOCONV_THREADS)")
    common.add_argument("--log-level", help="Logging level (DEBUG, INFO, WARNING, ERROR)")

    parser = argparse.ArgumentParser(prog=TOOL_NAME, description="Higher-order convolution texture experiments")
    parser.add_argument("--version", action="version", version=f"{TOOL_NAME} {VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", parents=[common], help="Generate texture datasets")
    gen.add_argument("--sizes", type=_int_list, help="Train,val,test sizes")
    gen.add_argument("--level", type=float, help="Correlation level in [0, 1]")
    gen.add_argument("--height", type=int)
    gen.add_argument("--width", type=int)

    train = sub.add_parser("train", parents=[common], help="Train one model kind over seeds")
    train.add_argument("--dataset", dest="dataset_dir")
    train.add_argument("--model", dest="model_kind")
    train.add_argument("--activation")
    train.add_argument("--dropout", type=float)
    train.add_argument("--lr", type=float)
    train.add_argument("--weight-decay", type=float)
    train.add_argument("--batch-size", type=int)
    train.add_argument("--epochs", dest="max_epochs", type=int)

    evaluate = sub.add_parser("eval", parents=[common], help="Evaluate checkpoints")
    evaluate.add_argument("--dataset", dest="dataset_dir")
    evaluate.add_argument("--checkpoints", dest="checkpoint_dir")
    evaluate.add_argument("--split")

    pca = sub.add_parser("pca-tied", parents=[common], help="Tied-weight PCA experiment")
    pca.add_argument("--models", dest="model_kinds", type=_str_list)
    pca.add_argument("--activations", type=_str_list)
    pca.add_argument("--inits", dest="n_inits", type=int)
    pca.add_argument("--threshold", type=float)
    pca.add_argument("--same-init", action="store_const", const=True)

    rsa = sub.add_parser("rsa", parents=[common], help="RDMs and representational comparisons")
    rsa.add_argument("--dataset", dest="dataset_dir")
    rsa.add_argument("--baseline")
    rsa.add_argument("--metric")
    rsa.add_argument("--bins", dest="n_bins", type=int)

    perturb = sub.add_parser("perturb", parents=[common], help="Accuracy under texture perturbations")
    perturb.add_argument("--dataset", dest="dataset_dir")
    perturb.add_argument("--intensities", type=_float_list)
    perturb.add_argument("--split")

    flops = sub.add_parser("flops", parents=[common], help="FLOP and parameter report")
    flops.add_argument("--kernel", dest="kernel_size", type=_int_list)
    flops.add_argument("--order", dest="max_order", type=int)
    flops.add_argument("--in-channels", type=int)
    flops.add_argument("--out-channels", type=int)
    return parser


GLOBAL_FLAGS = {"command", "config", "out", "seed", "seeds", "threads", "log_level"}


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    config_cls, _ = COMMANDS[args.command]
    runtime = settings.runtime
    overrides: Dict[str, Any] = {key: value for key, value in vars(args).items() if key not in GLOBAL_FLAGS}
    overrides["out_dir"] = args.out
    overrides["seeds"] = parse_seeds(args.seeds, args.seed)
    overrides["threads"] = args.threads
    defaults = {"out_dir": runtime.out_dir, "threads": runtime.threads}
    return config_cls.load(args.config, overrides, defaults)


def run(args: argparse.Namespace) -> int:
    _, handler = COMMANDS[args.command]
    config = resolve_config(args)
    logger.info(f"{args.command}: config hash {config.config_hash()}, output {config.out_dir}")
    with logfire.span(f"{TOOL_NAME} {args.command}", command=args.command, config_hash=config.config_hash()):
        result = handler(config)
    if isinstance(result, SweepResult) and result.status == "failed":
        logger.error(f"Every seed of {result.model_kind} diverged")
        return EXIT_DIVERGED
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = args.log_level or settings.runtime.log_level

    # Set up logging configuration
    logging.basicConfig(
        level=getattr(logging, str(level).upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )
    logfire.configure(send_to_logfire="if-token-present", environment=settings.app.logfire_environment,
                      service_name=TOOL_NAME, console=False)

    try:
        return run(args)
    except DivergenceError as e:
        logger.error(f"Numerical divergence: {e}")
        return EXIT_DIVERGED
    except FormatError as e:
        logger.error(f"Unreadable artifact: {e}")
        return EXIT_IO
    except OSError as e:
        logger.error(f"I/O error on {getattr(e, 'filename', None) or 'output'}: {e}")
        return EXIT_IO
    except (ValueError, json.JSONDecodeError) as e:
        # ConfigError, ParameterError and pydantic's ValidationError are ValueErrors
        logger.error(f"Invalid configuration: {e}")
        return EXIT_CONFIG


def cli():
    sys.exit(main())


if __name__ == "__main__":
    cli()
