"""
Offline pipeline commands.

    python cli.py synth      --out data/ [--seed 0]
    python cli.py calibrate  --tracks t.csv --meta m.json --out sequences.jsonl
    python cli.py optimize   --sequences sequences.jsonl --out weights.jsonl
    python cli.py train-map  --weights weights.jsonl --out model.json
    python cli.py decide     --model model.json --sequences sequences.jsonl --out records.jsonl
    python cli.py evaluate   --records records.jsonl --out report.json [--baseline w1,w2,w1,w2]
    python cli.py replay     --sequences sequences.jsonl --model model.json --safety-gap 0 --out replay.json
    python cli.py run        --recording t.csv m.json --out runs/exp1

Exit status: 0 on success, 2 for usage or configuration errors, 1 when a
stage fails (the message on stderr starts with the stage name).
"""
import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from services import serialization
from services.calibration.sequence import calibrate_scene
from services.config import Settings, load_settings, parse_baseline
from services.data.pairing import extract_pairs
from services.data.scene import load_scene
from services.errors import ConfigError, MergeGameError, StageError
from services.evaluation.experiment import (
    ExperimentConfig,
    baseline_similarities,
    run_experiment,
    write_decisions_csv,
)
from services.evaluation.metrics import as_percent, build_report
from services.evaluation.records import decide_sequence
from services.evaluation.replay import closed_loop_replay
from services.irl.batch import optimize_sequences
from services.mapping.model import train_mapping
from services.policy.policy_factory import PolicyFactory
from tools.synthetic import DEFAULT_SOURCES, generate_suite, write_suite

logger = logging.getLogger("mergegame")

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def _source(text: str) -> tuple[str, int]:
    name, _, count = text.partition(":")
    try:
        return name, int(count)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected name:count, got '{text}'")


def _baseline(text: str) -> tuple[float, float, float, float]:
    try:
        return parse_baseline(text)
    except ConfigError as e:
        raise argparse.ArgumentTypeError(str(e))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="JSON settings file (falls back to $MERGEGAME_CONFIG)")
    common.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])

    parser = argparse.ArgumentParser(description="Game-theoretic merging decisions learned from trajectory data.")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("synth", parents=[common], help="write synthetic highD-like recordings")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--source", type=_source, action="append", dest="sources", help="name:count, repeatable")

    p = commands.add_parser("calibrate", parents=[common], help="recording -> labelled interaction sequences")
    p.add_argument("--tracks", type=Path, required=True)
    p.add_argument("--meta", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--smooth-window", type=int, default=None)

    p = commands.add_parser("optimize", parents=[common], help="per-timestep inverse learning of weights")
    p.add_argument("--sequences", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--step", type=float, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-iters", type=int, default=None)

    p = commands.add_parser("train-map", parents=[common], help="fit the environment -> weights mapping")
    p.add_argument("--weights", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--bins", type=int, default=None)
    p.add_argument("--converged-only", action="store_true", default=None)

    p = commands.add_parser("decide", parents=[common], help="adaptive decisions on recorded states")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--sequences", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--csv", type=Path, default=None, help="also write plot-ready CSV")

    p = commands.add_parser("evaluate", parents=[common], help="similarity report from decision records")
    p.add_argument("--records", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--baseline", type=_baseline, action="append", dest="baselines")
    p.add_argument("--sequences", type=Path, default=None, help="sequences the baselines are run on")

    p = commands.add_parser("replay", parents=[common], help="closed-loop safety replay")
    p.add_argument("--sequences", type=Path, required=True)
    p.add_argument("--model", type=Path, default=None)
    p.add_argument("--policy", default="adaptive")
    p.add_argument("--safety-gap", type=float, default=None)
    p.add_argument("--dt-sim", type=float, default=None)
    p.add_argument("--out", type=Path, required=True)

    p = commands.add_parser("run", parents=[common], help="whole pipeline on one or more recordings")
    p.add_argument("--recording", nargs=2, type=Path, action="append", required=True, metavar=("TRACKS", "META"))
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--model", type=Path, default=None, help="reuse a trained mapping model")
    p.add_argument("--no-replay", action="store_true")
    return parser


def _override(section, **values):
    values = {k: v for k, v in values.items() if v is not None}
    return dataclasses.replace(section, **values) if values else section


def apply_overrides(settings: Settings, args: argparse.Namespace) -> Settings:
    """CLI flags win over the config file."""
    try:
        return dataclasses.replace(
            settings,
            irl=_override(
                settings.irl,
                step=getattr(args, "step", None),
                tol=getattr(args, "tol", None),
                max_iters=getattr(args, "max_iters", None),
            ),
            calibration=_override(settings.calibration, smooth_window=getattr(args, "smooth_window", None)),
            mapping=_override(
                settings.mapping,
                bins=getattr(args, "bins", None),
                converged_only=getattr(args, "converged_only", None),
            ),
            evaluation=_override(
                settings.evaluation,
                safety_gap=getattr(args, "safety_gap", None),
                dt_sim=getattr(args, "dt_sim", None),
                seed=getattr(args, "seed", None),
            ),
        )
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e)) from e


def cmd_synth(args, settings: Settings):
    scenes = generate_suite(settings.evaluation.seed, tuple(args.sources or DEFAULT_SOURCES), settings.norms)
    for tracks, meta in write_suite(args.out, scenes):
        print(f"{tracks} {meta}")


def cmd_calibrate(args, settings: Settings):
    scene = load_scene(args.tracks, args.meta)
    sequences = calibrate_scene(scene, extract_pairs(scene), settings.calibration, settings.kinematics)
    count = serialization.write_sequences(args.out, sequences)
    logger.info("Wrote %d sequences to %s", count, args.out)


def cmd_optimize(args, settings: Settings):
    sequences = serialization.read_sequences(args.sequences)
    samples = optimize_sequences(sequences, settings.norms, settings.irl, settings.kinematics.a_bounds)
    serialization.write_weight_samples(args.out, samples)


def cmd_train_map(args, settings: Settings):
    samples = serialization.read_weight_samples(args.weights, converged_only=settings.mapping.converged_only)
    model = train_mapping(samples, bins=settings.mapping.bins, variance_floor=settings.mapping.variance_floor)
    serialization.save_model(args.out, model)


def cmd_decide(args, settings: Settings):
    model = serialization.load_model(args.model)
    policy = PolicyFactory.create_policy("adaptive", settings.norms, settings.kinematics.a_bounds, model=model)
    records = [r for seq in serialization.read_sequences(args.sequences) for r in decide_sequence(seq, policy)]
    serialization.write_records(args.out, records)
    if args.csv:
        write_decisions_csv(args.csv, records)
    logger.info("Wrote %d decision records to %s", len(records), args.out)


def cmd_evaluate(args, settings: Settings):
    records = serialization.read_records(args.records)
    baselines = {}
    if args.sequences is not None:
        if args.baselines:
            settings = dataclasses.replace(
                settings, evaluation=dataclasses.replace(settings.evaluation, baselines=tuple(args.baselines)),
            )
        baselines = baseline_similarities(serialization.read_sequences(args.sequences), settings)
    elif args.baselines:
        raise ConfigError("--baseline needs --sequences to run the fixed-weight policies on")
    report = build_report(records, baselines=baselines)
    serialization.write_json(args.out, report.to_dict())
    print(f"similarity {report.similarity_percent:.2f}% ({report.matches}/{report.points})")


def cmd_replay(args, settings: Settings):
    kwargs = {}
    if args.policy == "adaptive":
        if args.model is None:
            raise ConfigError("--model is required for the adaptive policy")
        kwargs["model"] = serialization.load_model(args.model)
    try:
        policy = PolicyFactory.create_policy(args.policy, settings.norms, settings.kinematics.a_bounds, **kwargs)
    except (ValueError, TypeError) as e:
        raise ConfigError(str(e)) from e

    results = [
        closed_loop_replay(
            seq, policy,
            dt_sim=settings.evaluation.dt_sim,
            safety_gap=settings.evaluation.safety_gap,
            kinematics=settings.kinematics,
        )
        for seq in serialization.read_sequences(args.sequences)
        if seq.complete
    ]
    if not results:
        raise MergeGameError("no complete sequences to replay")
    violating = sum(1 for r in results if r.violations)
    rate = violating / len(results)
    serialization.write_json(args.out, {
        "policy": args.policy,
        "safety_gap": settings.evaluation.safety_gap,
        "sequences": len(results),
        "violations": violating,
        "violation_rate": rate,
        "violation_rate_percent": as_percent(rate),
        "per_sequence": [
            {"sequence_id": r.sequence_id, "violations": r.violations, "min_gap": r.min_gap}
            for r in results
        ],
    })
    print(f"violation rate {as_percent(rate):.2f}% ({violating}/{len(results)})")


def cmd_run(args, settings: Settings):
    report = run_experiment(ExperimentConfig(
        recordings=tuple((tracks, meta) for tracks, meta in args.recording),
        out_dir=args.out,
        settings=settings,
        model_path=args.model,
        replay=not args.no_replay,
    ))
    print(f"similarity {report.similarity_percent:.2f}% ({report.matches}/{report.points}), "
          f"violation rate {report.violation_rate_percent:.2f}%")


COMMANDS = {
    "synth": cmd_synth,
    "calibrate": cmd_calibrate,
    "optimize": cmd_optimize,
    "train-map": cmd_train_map,
    "decide": cmd_decide,
    "evaluate": cmd_evaluate,
    "replay": cmd_replay,
    "run": cmd_run,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format=LOG_FORMAT, force=True)

    try:
        settings = apply_overrides(load_settings(args.config), args)
        COMMANDS[args.command](args, settings)
    except ConfigError as e:
        print(f"config: {e}", file=sys.stderr)
        return 2
    except StageError as e:
        print(str(e), file=sys.stderr)
        return 1
    except MergeGameError as e:
        print(f"{args.command}: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"{args.command}: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
