"""Command-line entry point: ``cone-tools <subcommand> [options]``.

Exit codes: 0 success, 1 usage error, 2 configuration error, 3 runtime
failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Callable, Sequence
from pathlib import Path

import pandas as pd

from cone_tools.config import RunConfig, load_config
from cone_tools.core.exceptions import ConeToolsError, ConfigurationError
from cone_tools.core.resilience import derive_seed
from cone_tools.pipeline.estimate import estimate_frame
from cone_tools.pipeline.experiments import (
    ExperimentResult,
    exp_bbox_perturbation,
    exp_depth_accuracy,
    exp_kp_variance,
    stereo_eval,
)
from cone_tools.pipeline.models import KeypointMode
from cone_tools.pipeline.reporting import (
    observations_table,
    skipped_table,
    write_csv,
    write_experiment,
    write_metadata,
)
from cone_tools.regressor.network import RegressorNet
from cone_tools.regressor.serialization import load_model, save_model
from cone_tools.regressor.training import evaluate, train
from cone_tools.synthetic.dataset import generate_dataset, read_dataset, write_dataset
from cone_tools.synthetic.scene import generate_scene

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

TRAIN_FILE = "train.cpds"
TEST_FILE = "test.cpds"
MODEL_FILE = "model.kprn"
HISTORY_FILE = "history.csv"

# Seed salts of the two generated datasets.
TRAIN_SALT = 1
TEST_SALT = 2


class UsageError(Exception):
    """Raised instead of argparse's print-and-exit on bad arguments."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.seed is not None:
        if args.seed < 0:
            raise UsageError(f"--seed must be non-negative, got {args.seed}")
        cfg = cfg.model_copy(update={"seed": args.seed})
    return cfg


def _model_path(args: argparse.Namespace) -> Path:
    return Path(args.model) if args.model else Path(args.out) / MODEL_FILE


def _optional_model(args: argparse.Namespace) -> RegressorNet | None:
    return load_model(args.model) if args.model else None


def _mode(predictor: RegressorNet | None) -> KeypointMode:
    return KeypointMode.ANNOTATED if predictor is None else KeypointMode.REGRESSED


def cmd_synth(args: argparse.Namespace, cfg: RunConfig) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    exp = cfg.experiment
    for name, count, salt, augment in (
        (TRAIN_FILE, exp.train_samples, TRAIN_SALT, exp.augment),
        (TEST_FILE, exp.test_samples, TEST_SALT, False),
    ):
        samples = generate_dataset(
            cfg.camera,
            cfg.cone,
            count,
            derive_seed(cfg.seed, salt),
            noise=cfg.noise,
            range_min=exp.range_min,
            range_max=exp.range_max,
            ground_y=exp.ground_y,
            augment=augment,
        )
        write_dataset(out / name, samples)
        print(f"{out / name}: {len(samples)} samples")
    return EXIT_OK


def cmd_train(args: argparse.Namespace, cfg: RunConfig) -> int:
    data = Path(args.data) if args.data else Path(args.out) / TRAIN_FILE
    net, history = train(read_dataset(data), cfg.train)
    model_path = _model_path(args)
    model_path.parent.mkdir(parents=True, exist_ok=True)
    save_model(net, model_path)
    table = pd.DataFrame({"epoch": range(1, len(history) + 1), "loss": history})
    write_csv(table, Path(args.out) / HISTORY_FILE)
    print(f"final_loss: {history[-1]!r}")
    print(f"model: {model_path}")
    return EXIT_OK


def cmd_eval(args: argparse.Namespace, cfg: RunConfig) -> int:
    data = Path(args.data) if args.data else Path(args.out) / TEST_FILE
    net = load_model(_model_path(args))
    metrics = evaluate(net, read_dataset(data), gamma=cfg.train.gamma)
    print(f"data: {data}")
    print(f"count: {metrics.count}")
    print(f"mean_loss: {metrics.mean_loss!r}")
    print(f"rms_px: {metrics.rms!r}")
    for index, value in enumerate(metrics.per_keypoint_rms, start=1):
        print(f"rms_p{index}_px: {value!r}")
    print(f"cr_error_left: {metrics.mean_cr_error_left!r}")
    print(f"cr_error_right: {metrics.mean_cr_error_right!r}")
    return EXIT_OK


def cmd_estimate(args: argparse.Namespace, cfg: RunConfig) -> int:
    exp = cfg.experiment
    scene = generate_scene(
        exp.range_min,
        exp.range_max,
        exp.n_cones,
        cfg.camera,
        cfg.cone,
        cfg.seed,
        ground_y=exp.ground_y,
    )
    predictor = _optional_model(args)
    frame = estimate_frame(scene, predictor, cfg)
    out = Path(args.out)
    write_csv(observations_table(frame.observations), out / "observations.csv")
    write_csv(skipped_table(frame.skipped), out / "skipped.csv")
    write_metadata(out / "observations.meta.yaml", "estimate", cfg, _mode(predictor))
    observed = len(frame.observations)
    print(f"observed {observed}/{len(scene.cones)} cones (recall {frame.recall:.3f})")
    return EXIT_OK


def _write_result(
    args: argparse.Namespace,
    cfg: RunConfig,
    result: ExperimentResult,
    predictor: RegressorNet | None,
) -> int:
    for path in write_experiment(result, args.out, cfg, _mode(predictor)):
        print(path)
    return EXIT_OK


def cmd_exp_depth(args: argparse.Namespace, cfg: RunConfig) -> int:
    predictor = _optional_model(args)
    return _write_result(args, cfg, exp_depth_accuracy(cfg, predictor), predictor)


def cmd_exp_bbox(args: argparse.Namespace, cfg: RunConfig) -> int:
    if not args.model:
        raise UsageError("exp-bbox needs --model; annotated keypoints ignore the box")
    predictor = load_model(args.model)
    return _write_result(args, cfg, exp_bbox_perturbation(cfg, predictor), predictor)


def cmd_exp_kpvar(args: argparse.Namespace, cfg: RunConfig) -> int:
    return _write_result(args, cfg, exp_kp_variance(cfg), None)


def cmd_stereo_eval(args: argparse.Namespace, cfg: RunConfig) -> int:
    predictor = _optional_model(args)
    return _write_result(args, cfg, stereo_eval(cfg, predictor), predictor)


COMMANDS: dict[str, tuple[Callable[[argparse.Namespace, RunConfig], int], str]] = {
    "synth": (cmd_synth, "render the train and test patch datasets"),
    "train": (cmd_train, "train the keypoint regressor"),
    "eval": (
        cmd_eval,
        "evaluate a trained regressor on the test set, or on --data; mean_loss matches "
        "the train final_loss only when --data is the training set",
    ),
    "estimate": (cmd_estimate, "estimate cone positions in one synthetic scene"),
    "exp-depth": (cmd_exp_depth, "depth error versus distance sweep"),
    "exp-bbox": (cmd_exp_bbox, "depth variance under bounding-box perturbation"),
    "exp-kpvar": (cmd_exp_kpvar, "depth variance under x-only / y-only keypoint noise"),
    "stereo-eval": (cmd_stereo_eval, "mono versus stereo depth error"),
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="YAML run configuration (defaults when omitted)")
    common.add_argument("--seed", type=int, help="override the configured seed")
    common.add_argument("--out", default="out", help="output directory (default: out)")
    common.add_argument("--model", help="regressor model file")
    common.add_argument("--data", help="dataset file for train/eval")
    common.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="logging level (default: WARNING)",
    )

    parser = _Parser(
        prog="cone-tools",
        description="Monocular traffic-cone 3D position estimation on a synthetic oracle.",
    )
    subparsers = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    subparsers.required = True
    for name, (_, help_text) in COMMANDS.items():
        subparsers.add_parser(name, parents=[common], help=help_text, description=help_text)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        # --help
        return int(exc.code or 0)

    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    handler, _ = COMMANDS[args.command]
    try:
        cfg = _resolve_config(args)
        return handler(args, cfg)
    except UsageError as exc:
        print(f"cone-tools {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConeToolsError, OSError) as exc:
        logger.debug("command failed", exc_info=True)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    raise SystemExit(main())
