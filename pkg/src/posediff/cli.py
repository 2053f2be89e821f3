"""Command line interface.

Five commands cover the pipeline: ``gen`` writes a synthetic dataset,
``train`` fits the MLP denoiser, ``infer`` samples hypotheses and
aggregates them, ``bench`` sweeps hypothesis and iteration counts, and
``render`` draws poses to SVG. Every command is a thin binding over the
library; given the same config, calling the library directly produces
byte-identical outputs.

Exit codes: 0 success, 2 config problem, 3 training failure, 4 a
request that needs ground truth ran against data without it, 1 any
other pipeline error.
"""
from __future__ import annotations

import csv
import functools
import json
import sys
from pathlib import Path

import click
import numpy as np

from .aggregate import METHOD_NAMES, run_aggregator
from .camera import load_camera
from .config import (RunConfig, apply_overrides, config_sha256,
                     config_to_dict, load_config)
from .core import (DEFAULT_SKELETON, HypothesisSet, PoseSeq3D, load_skeleton)
from .dataset import Dataset, Sequence, load_dataset, save_dataset
from .denoise import (Denoiser, MlpDenoiser, oracle_contractive,
                      oracle_noisy, oracle_perfect, save_checkpoint, train)
from .errors import (ConfigError, MissingGroundTruthError, PoseDiffError,
                     TrainingDivergedError)
from .metrics import compute_metrics
from .poseio import load_poses, save_poses
from .render import render_sequence
from .rng import stream_id
from .sampler import run_sampler
from .schedule import make_cosine_schedule, save_schedule_csv
from .synth import DEFAULT_CAMERA, gen_poses

DEFAULT_AGGREGATORS = "avg,jpma,ppma"
CSV_COLUMNS = ("method", "H", "K", "mpjpe_mm", "pmpjpe_mm", "pck150", "auc")


def _guard(fn):
    """Map library exceptions onto the documented exit codes."""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ConfigError as exc:
            _fail(2, str(exc))
        except TrainingDivergedError as exc:
            _fail(3, str(exc))
        except MissingGroundTruthError as exc:
            _fail(4, str(exc))
        except PoseDiffError as exc:
            _fail(1, str(exc))
        except (ValueError, OSError) as exc:
            _fail(1, str(exc))
    return wrapper


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    raise SystemExit(code)


def _common(fn):
    fn = click.option("--out", "out_dir", type=click.Path(), default=None,
                      help="Output directory (overrides config).")(fn)
    fn = click.option("--seed", type=int, default=None,
                      help="Top-level seed (overrides config).")(fn)
    fn = click.option("--config", "config_path", type=click.Path(),
                      default=None, help="JSON run config.")(fn)
    return fn


def _load_cfg(config_path: str | None, **overrides) -> RunConfig:
    cfg = load_config(config_path) if config_path else RunConfig()
    return apply_overrides(cfg, **overrides)


def _write_manifest(root: Path, command: str, cfg: RunConfig,
                    **extra) -> None:
    doc = {"command": command, "seed": cfg.seed,
           "config_sha256": config_sha256(cfg), **extra}
    (root / "run_manifest.json").write_text(
        json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _write_config_copy(root: Path, cfg: RunConfig) -> None:
    (root / "config.json").write_text(
        json.dumps(config_to_dict(cfg), indent=2, sort_keys=True) + "\n")


def _sequence_seed(base: int, index: int) -> int:
    return stream_id("sequence", base, index)


def _oracle_seed(base: int, index: int) -> int:
    return stream_id("oracle", base, index)


def _parse_aggregators(text: str, has_gt: bool) -> list[str]:
    methods = [m.strip() for m in text.split(",") if m.strip()]
    if not methods:
        raise ConfigError("empty aggregator list")
    for m in methods:
        if m not in METHOD_NAMES:
            raise ConfigError(f"unknown aggregator {m!r}, expected one of "
                              f"{', '.join(METHOD_NAMES)}")
    if not has_gt:
        needy = [m for m in methods if m in ("pbest", "jbest")]
        if needy:
            raise MissingGroundTruthError(
                f"aggregator(s) {', '.join(needy)} need ground truth, "
                f"dataset has none")
    return methods


def _make_denoiser(cfg: RunConfig, oracle: str | None, seq: Sequence,
                   seq_index: int, shared: MlpDenoiser | None) -> Denoiser:
    if shared is not None:
        return shared
    if seq.gt is None:
        raise MissingGroundTruthError(
            f"oracle denoiser '{oracle}' needs ground truth, sequence "
            f"{seq.name} has none")
    if oracle == "perfect":
        return oracle_perfect(seq.gt)
    if oracle == "contractive":
        return oracle_contractive(seq.gt, cfg.denoiser.oracle_lambda)
    return oracle_noisy(seq.gt, cfg.denoiser.oracle_sigma_mm,
                        seed=_oracle_seed(cfg.seed, seq_index))


def _load_shared_denoiser(cfg: RunConfig, checkpoint: str | None,
                          oracle: str | None) -> MlpDenoiser | None:
    if (checkpoint is None) == (oracle is None):
        raise ConfigError("give exactly one of --checkpoint or --oracle")
    if checkpoint is None:
        return None
    path = Path(checkpoint)
    if not path.exists():
        raise ConfigError(f"checkpoint not found: {path}")
    try:
        den = MlpDenoiser.from_checkpoint(path)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if den.sched.t_max != cfg.t_max:
        raise ConfigError(f"checkpoint was trained with t_max "
                          f"{den.sched.t_max}, config says {cfg.t_max}")
    if den.signal_scale != cfg.signal_scale:
        raise ConfigError(f"checkpoint signal scale {den.signal_scale} does "
                          f"not match config {cfg.signal_scale}")
    return den


def _infer_once(cfg: RunConfig, ds: Dataset, checkpoint: str | None,
                oracle: str | None, methods: list[str],
                ) -> tuple[list[HypothesisSet], dict[str, list]]:
    """Sample and aggregate every sequence; returns (hypothesis sets,
    method -> list of AggregationReport)."""
    sched = make_cosine_schedule(cfg.t_max)
    shared = _load_shared_denoiser(cfg, checkpoint, oracle)
    all_hs: list[HypothesisSet] = []
    reports: dict[str, list] = {m: [] for m in methods}
    for i, seq in enumerate(ds.sequences):
        den = _make_denoiser(cfg, oracle, seq, i, shared)
        scfg = cfg.sampler_config(seed=_sequence_seed(cfg.seed, i))
        hs = run_sampler(seq.keypoints, den, scfg, sched, cfg.skeleton,
                         float(cfg.image_width))
        all_hs.append(hs)
        for m in methods:
            reports[m].append(run_aggregator(
                m, hs, x=seq.keypoints, cam=ds.camera, gt=seq.gt))
    return all_hs, reports


def _pooled_metrics(cfg: RunConfig, ds: Dataset, poses: list[PoseSeq3D]):
    pred = PoseSeq3D(np.concatenate([p.joints for p in poses], axis=0))
    gt = PoseSeq3D(np.concatenate([s.gt.joints for s in ds.sequences], axis=0))
    return compute_metrics(pred, gt, with_scale=cfg.metrics.pmpjpe_scale,
                           pck_threshold_mm=cfg.metrics.pck_threshold_mm)


def _write_metric_rows(path: Path, rows: list[dict]) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)


def _metric_row(method: str, h: int, k: int, report) -> dict:
    return {"method": method, "H": h, "K": k,
            "mpjpe_mm": repr(report.mpjpe_mm),
            "pmpjpe_mm": repr(report.pmpjpe_mm),
            "pck150": repr(report.pck150),
            "auc": repr(report.auc)}


@click.group()
@click.version_option(package_name="posediff")
def main():
    """Multi-hypothesis 3D pose lifting via diffusion sampling."""


@main.command()
@_common
@click.option("--dump-schedule", is_flag=True,
              help="Also write the noise schedule as CSV.")
@_guard
def gen(config_path, seed, out_dir, dump_schedule):
    """Generate a synthetic dataset (3D ground truth + 2D keypoints)."""
    cfg = _load_cfg(config_path, seed=seed, out_dir=out_dir)
    root = Path(cfg.out_dir)
    root.mkdir(parents=True, exist_ok=True)
    pairs = gen_poses(cfg.scenario)
    save_dataset(root, cfg.scenario.skeleton, cfg.scenario.camera,
                 [(kp, gt) for gt, kp in pairs],
                 config_sha256=config_sha256(cfg))
    if dump_schedule:
        save_schedule_csv(make_cosine_schedule(cfg.t_max),
                          root / "schedule.csv")
    _write_config_copy(root, cfg)
    _write_manifest(root, "gen", cfg, sequences=len(pairs))
    click.echo(f"wrote {len(pairs)} sequences to {root}")


@main.command(name="train")
@_common
@click.option("--data", "data_dir", required=True, type=click.Path(),
              help="Dataset directory from 'gen'.")
@_guard
def train_cmd(config_path, seed, out_dir, data_dir):
    """Train the MLP denoiser on a dataset with ground truth."""
    cfg = _load_cfg(config_path, seed=seed, out_dir=out_dir)
    ds = load_dataset(data_dir)
    if not ds.has_gt:
        raise MissingGroundTruthError("training needs ground truth poses")
    root = Path(cfg.out_dir)
    root.mkdir(parents=True, exist_ok=True)
    sched = make_cosine_schedule(cfg.t_max)
    result = train([(s.keypoints, s.gt) for s in ds.sequences],
                   cfg.train_config(), sched)
    ckpt = root / "model.ckpt"
    save_checkpoint(ckpt, result.params, cfg.denoiser.target,
                    t_max=cfg.t_max, signal_scale=cfg.signal_scale)
    with open(root / "loss.csv", "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["step", "loss"])
        for step, loss in enumerate(result.loss_history):
            writer.writerow([step, repr(float(loss))])
    _write_config_copy(root, cfg)
    _write_manifest(root, "train", cfg, data=str(data_dir),
                    checkpoint=ckpt.name, steps=len(result.loss_history),
                    final_loss=result.final_loss)
    click.echo(f"final loss {result.final_loss:.6g}, checkpoint at {ckpt}")


@main.command()
@_common
@click.option("--data", "data_dir", required=True, type=click.Path(),
              help="Dataset directory from 'gen'.")
@click.option("--checkpoint", type=click.Path(), default=None,
              help="Denoiser checkpoint from 'train'.")
@click.option("--oracle", type=click.Choice(["perfect", "contractive",
                                             "noisy"]), default=None,
              help="Use a ground-truth oracle instead of a checkpoint.")
@click.option("--hypotheses", type=int, default=None, help="Hypotheses H.")
@click.option("--iterations", type=int, default=None, help="DDIM steps K.")
@click.option("--aggregator", "aggregators", default=DEFAULT_AGGREGATORS,
              show_default=True, help="Comma-separated aggregator list.")
@click.option("--flip", "flip_mode", type=click.Choice(["none", "once",
                                                        "diffusion"]),
              default=None, help="Flip augmentation mode.")
@click.option("--sigma-mode", type=click.Choice(["stochastic", "deterministic"]),
              default=None, help="DDIM noise injection mode.")
@click.option("--save-hypotheses/--no-save-hypotheses", default=True,
              help="Write each hypothesis as a pose file.")
@click.option("--dump-schedule", is_flag=True,
              help="Also write the noise schedule as CSV.")
@_guard
def infer(config_path, seed, out_dir, data_dir, checkpoint, oracle,
          hypotheses, iterations, aggregators, flip_mode, sigma_mode,
          save_hypotheses, dump_schedule):
    """Sample pose hypotheses and aggregate them into final poses."""
    cfg = _load_cfg(config_path, seed=seed, out_dir=out_dir,
                    hypotheses=hypotheses, iterations=iterations,
                    flip_mode=flip_mode, sigma_mode=sigma_mode)
    ds = load_dataset(data_dir)
    methods = _parse_aggregators(aggregators, ds.has_gt)
    root = Path(cfg.out_dir)
    root.mkdir(parents=True, exist_ok=True)

    all_hs, reports = _infer_once(cfg, ds, checkpoint, oracle, methods)

    if save_hypotheses:
        for seq, hs in zip(ds.sequences, all_hs):
            hyp_dir = root / "hyp" / seq.name
            hyp_dir.mkdir(parents=True, exist_ok=True)
            for h in range(hs.count):
                save_poses(hs[h], hyp_dir / f"h_{h:03d}.jsonl")
    for m in methods:
        agg_dir = root / "agg" / m
        agg_dir.mkdir(parents=True, exist_ok=True)
        for seq, rep in zip(ds.sequences, reports[m]):
            save_poses(rep.pose, agg_dir / f"{seq.name}.jsonl")
        (agg_dir / "meta.json").write_text(json.dumps(
            {"method": m, "feasible_in_production": reports[m][0].feasible},
            indent=2, sort_keys=True) + "\n")

    h, k = cfg.sampler.hypotheses, cfg.sampler.iterations
    if ds.has_gt:
        rows = []
        for m in methods:
            pooled = _pooled_metrics(cfg, ds, [r.pose for r in reports[m]])
            rows.append(_metric_row(m, h, k, pooled))
        _write_metric_rows(root / "metrics.csv", rows)
        for row in rows:
            click.echo(f"{row['method']}: mpjpe "
                       f"{float(row['mpjpe_mm']):.2f} mm")
    else:
        click.echo("dataset has no ground truth, metrics skipped", err=True)

    if dump_schedule:
        save_schedule_csv(make_cosine_schedule(cfg.t_max),
                          root / "schedule.csv")
    _write_config_copy(root, cfg)
    _write_manifest(root, "infer", cfg, data=str(data_dir),
                    checkpoint=checkpoint, oracle=oracle, hypotheses=h,
                    iterations=k, aggregators=methods,
                    sigma_mode=cfg.sampler.sigma_mode.value,
                    flip_mode=cfg.sampler.flip_mode.value)


@main.command()
@_common
@click.option("--data", "data_dir", required=True, type=click.Path(),
              help="Dataset directory from 'gen'.")
@click.option("--checkpoint", type=click.Path(), default=None)
@click.option("--oracle", type=click.Choice(["perfect", "contractive",
                                             "noisy"]), default=None)
@click.option("--hypotheses", "hypotheses_set", default="1,5,10,20",
              show_default=True, help="Comma-separated H values.")
@click.option("--iterations", "iterations_set", default="10",
              show_default=True, help="Comma-separated K values.")
@click.option("--aggregator", "aggregators", default=DEFAULT_AGGREGATORS,
              show_default=True, help="Comma-separated aggregator list.")
@click.option("--flip", "flip_mode", type=click.Choice(["none", "once",
                                                        "diffusion"]),
              default=None)
@click.option("--sigma-mode", type=click.Choice(["stochastic", "deterministic"]),
              default=None)
@_guard
def bench(config_path, seed, out_dir, data_dir, checkpoint, oracle,
          hypotheses_set, iterations_set, aggregators, flip_mode, sigma_mode):
    """Sweep hypothesis and iteration counts; one CSV row per cell."""
    def parse_ints(text, what):
        try:
            values = [int(v) for v in text.split(",") if v.strip()]
        except ValueError as exc:
            raise ConfigError(f"bad {what} list {text!r}") from exc
        if not values:
            raise ConfigError(f"empty {what} grid")
        return values

    hs_values = parse_ints(hypotheses_set, "hypotheses")
    ks_values = parse_ints(iterations_set, "iterations")
    cfg = _load_cfg(config_path, seed=seed, out_dir=out_dir,
                    flip_mode=flip_mode, sigma_mode=sigma_mode)
    ds = load_dataset(data_dir)
    if not ds.has_gt:
        raise MissingGroundTruthError("bench needs ground truth for metrics")
    methods = _parse_aggregators(aggregators, ds.has_gt)
    root = Path(cfg.out_dir)
    root.mkdir(parents=True, exist_ok=True)

    rows = []
    for h in hs_values:
        for k in ks_values:
            cell = apply_overrides(cfg, hypotheses=h, iterations=k)
            _, reports = _infer_once(cell, ds, checkpoint, oracle, methods)
            for m in methods:
                pooled = _pooled_metrics(cell, ds,
                                         [r.pose for r in reports[m]])
                rows.append(_metric_row(m, h, k, pooled))
    _write_metric_rows(root / "bench.csv", rows)
    _write_config_copy(root, cfg)
    _write_manifest(root, "bench", cfg, data=str(data_dir),
                    checkpoint=checkpoint, oracle=oracle,
                    hypotheses=hs_values, iterations=ks_values,
                    aggregators=methods)
    click.echo(f"wrote {len(rows)} rows to {root / 'bench.csv'}")


@main.command()
@click.option("--gt", "gt_path", type=click.Path(), default=None,
              help="3D ground-truth pose file.")
@click.option("--hyp", "hyp_paths", type=click.Path(), multiple=True,
              help="3D hypothesis pose file (repeatable).")
@click.option("--camera", "camera_path", type=click.Path(), default=None,
              help="Camera JSON (default: built-in camera).")
@click.option("--skeleton", "skeleton_path", type=click.Path(), default=None,
              help="Skeleton JSON (default: built-in 17-joint skeleton).")
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--width", type=int, default=1000, show_default=True)
@click.option("--height", type=int, default=1000, show_default=True)
@_guard
def render(gt_path, hyp_paths, camera_path, skeleton_path, out_dir, width,
           height):
    """Render poses to one SVG per frame; gt solid, hypotheses dashed."""
    if gt_path is None and not hyp_paths:
        raise ConfigError("nothing to render: give --gt and/or --hyp")
    try:
        cam = load_camera(camera_path) if camera_path else DEFAULT_CAMERA
        skel = (load_skeleton(skeleton_path) if skeleton_path
                else DEFAULT_SKELETON)
    except (OSError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc

    def load3d(path):
        pose = load_poses(path)
        if not isinstance(pose, PoseSeq3D):
            raise ConfigError(f"{path} holds 2D data, need 3D poses")
        return pose

    gt = load3d(gt_path) if gt_path else None
    hyps = None
    if hyp_paths:
        seqs = [load3d(p) for p in hyp_paths]
        try:
            hyps = HypothesisSet.from_sequences(seqs)
        except PoseDiffError as exc:
            raise ConfigError(str(exc)) from exc
    try:
        svgs, warnings = render_sequence(gt, hyps, cam, skel, width=width,
                                         height=height)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)
    for k, svg in enumerate(svgs):
        (root / f"frame_{k:04d}.svg").write_text(svg)
    for warning in warnings:
        click.echo(f"warning: {warning}", err=True)
    click.echo(f"wrote {len(svgs)} SVG file(s) to {root}")


if __name__ == "__main__":
    main()
