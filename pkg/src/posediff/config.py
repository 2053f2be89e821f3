"""Run configuration: one JSON document driving every CLI command.

The document is a nested object with optional sections; anything not
given falls back to package defaults, and unknown keys are rejected so
typos fail loudly. Sub-configs for the library modules are built on
demand so cross-cutting values (seed, t_max, signal scale, skeleton,
camera) stay consistent by construction.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .camera import (CameraIntrinsics, camera_from_dict, camera_to_dict,
                     load_camera)
from .core import (DEFAULT_SKELETON, Skeleton, load_skeleton,
                   skeleton_from_dict, skeleton_to_dict)
from .denoise import DEFAULT_PIXEL_SCALE, RegressionTarget, TrainConfig
from .errors import ConfigError, PoseDiffError
from .sampler import FlipMode, SamplerConfig, SigmaMode
from .schedule import DEFAULT_SIGNAL_SCALE
from .synth import (Bimodal, DepthRay, HypothesisModel, IidGaussian,
                    ScenarioConfig, DEFAULT_CAMERA)


def _take(d: dict, known: dict, where: str) -> dict:
    unknown = set(d) - set(known)
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(sorted(unknown))}")
    merged = dict(known)
    merged.update(d)
    return merged


def _model_from_dict(d: dict) -> HypothesisModel:
    kind = d.get("kind")
    try:
        if kind == "iid_gaussian":
            rest = _take({k: v for k, v in d.items() if k != "kind"},
                         {"sigma_mm": 30.0}, "hypothesis_model")
            return IidGaussian(sigma_mm=float(rest["sigma_mm"]))
        if kind == "depth_ray":
            rest = _take({k: v for k, v in d.items() if k != "kind"},
                         {"sigma_ray_mm": 80.0, "sigma_perp_mm": 5.0},
                         "hypothesis_model")
            return DepthRay(sigma_ray_mm=float(rest["sigma_ray_mm"]),
                            sigma_perp_mm=float(rest["sigma_perp_mm"]))
        if kind == "bimodal":
            rest = _take({k: v for k, v in d.items() if k != "kind"},
                         {"offset_mm": 150.0, "p_wrong": 0.3,
                          "sigma_correct_mm": 5.0}, "hypothesis_model")
            return Bimodal(offset_mm=float(rest["offset_mm"]),
                           p_wrong=float(rest["p_wrong"]),
                           sigma_correct_mm=float(rest["sigma_correct_mm"]))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad hypothesis_model: {exc}") from exc
    raise ConfigError(f"hypothesis_model.kind must be one of iid_gaussian, "
                      f"depth_ray, bimodal; got {kind!r}")


def _model_to_dict(m: HypothesisModel) -> dict:
    if isinstance(m, IidGaussian):
        return {"kind": "iid_gaussian", "sigma_mm": m.sigma_mm}
    if isinstance(m, DepthRay):
        return {"kind": "depth_ray", "sigma_ray_mm": m.sigma_ray_mm,
                "sigma_perp_mm": m.sigma_perp_mm}
    return {"kind": "bimodal", "offset_mm": m.offset_mm, "p_wrong": m.p_wrong,
            "sigma_correct_mm": m.sigma_correct_mm}


@dataclass(frozen=True)
class DenoiserSettings:
    hidden_width: int = 128
    hidden_layers: int = 2
    target: RegressionTarget = RegressionTarget.PREDICT_Y0
    pixel_scale: float = DEFAULT_PIXEL_SCALE
    oracle_lambda: float = 0.5
    oracle_sigma_mm: float = 20.0


@dataclass(frozen=True)
class TrainSettings:
    steps: int = 2000
    batch_size: int = 32
    learning_rate: float = 1e-3
    weight_decay: float = 0.1
    beta1: float = 0.9
    beta2: float = 0.999


@dataclass(frozen=True)
class SamplerSettings:
    hypotheses: int = 20
    iterations: int = 10
    sigma_mode: SigmaMode = SigmaMode.STOCHASTIC
    flip_mode: FlipMode = FlipMode.NONE


@dataclass(frozen=True)
class MetricSettings:
    pck_threshold_mm: float = 150.0
    pmpjpe_scale: bool = True


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    out_dir: str = "out"
    t_max: int = 1000
    signal_scale: float = DEFAULT_SIGNAL_SCALE
    image_width: int = 1000
    image_height: int = 1000
    skeleton: Skeleton = DEFAULT_SKELETON
    camera: CameraIntrinsics = DEFAULT_CAMERA
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    denoiser: DenoiserSettings = DenoiserSettings()
    train: TrainSettings = TrainSettings()
    sampler: SamplerSettings = SamplerSettings()
    metrics: MetricSettings = MetricSettings()

    def sampler_config(self, *, seed: int | None = None) -> SamplerConfig:
        return SamplerConfig(
            hypotheses=self.sampler.hypotheses,
            iterations=self.sampler.iterations,
            t_max=self.t_max,
            sigma_mode=self.sampler.sigma_mode,
            flip_mode=self.sampler.flip_mode,
            seed=self.seed if seed is None else seed,
            signal_scale=self.signal_scale,
        )

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            steps=self.train.steps,
            batch_size=self.train.batch_size,
            learning_rate=self.train.learning_rate,
            beta1=self.train.beta1,
            beta2=self.train.beta2,
            weight_decay=self.train.weight_decay,
            seed=self.seed,
            t_max=self.t_max,
            signal_scale=self.signal_scale,
            target=self.denoiser.target,
            hidden_width=self.denoiser.hidden_width,
            hidden_layers=self.denoiser.hidden_layers,
            pixel_scale=self.denoiser.pixel_scale,
        )


def _scenario_from_dict(d: dict, skeleton: Skeleton, camera: CameraIntrinsics,
                        seed: int) -> ScenarioConfig:
    defaults = {
        "pose_count": 100,
        "frames_per_pose": 1,
        "noise_2d_px": 0.0,
        "hypothesis_count": 20,
        "hypothesis_model": {"kind": "iid_gaussian", "sigma_mm": 30.0},
        "root_box_mm": [[-800.0, -600.0, 3500.0], [800.0, 600.0, 6500.0]],
        "max_swing_deg": 35.0,
    }
    v = _take(d, defaults, "scenario")
    model = v["hypothesis_model"]
    if isinstance(model, dict):
        model = _model_from_dict(model)
    box = v["root_box_mm"]
    try:
        box = (tuple(float(x) for x in box[0]), tuple(float(x) for x in box[1]))
        if len(box[0]) != 3 or len(box[1]) != 3:
            raise ValueError("root_box_mm needs two 3-vectors")
        return ScenarioConfig(
            skeleton=skeleton, camera=camera,
            pose_count=int(v["pose_count"]),
            frames_per_pose=int(v["frames_per_pose"]),
            noise_2d_px=float(v["noise_2d_px"]),
            hypothesis_count=int(v["hypothesis_count"]),
            hypothesis_model=model, seed=seed,
            root_box_mm=box, max_swing_deg=float(v["max_swing_deg"]))
    except (TypeError, ValueError, IndexError) as exc:
        raise ConfigError(f"bad scenario section: {exc}") from exc


def config_from_dict(doc: dict, *, base_dir: Path | None = None) -> RunConfig:
    """Build a RunConfig from a parsed JSON document."""
    defaults = {
        "seed": 0,
        "out_dir": "out",
        "t_max": 1000,
        "signal_scale": DEFAULT_SIGNAL_SCALE,
        "image_width": 1000,
        "image_height": 1000,
        "skeleton": None,
        "camera": None,
        "scenario": {},
        "denoiser": {},
        "train": {},
        "sampler": {},
        "metrics": {},
    }
    v = _take(doc, defaults, "config")
    try:
        seed = int(v["seed"])
        t_max = int(v["t_max"])

        skeleton = v["skeleton"]
        if skeleton is None:
            skeleton = DEFAULT_SKELETON
        elif isinstance(skeleton, str):
            path = Path(skeleton)
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            skeleton = load_skeleton(path)
        elif isinstance(skeleton, dict):
            skeleton = skeleton_from_dict(skeleton)
        else:
            raise ConfigError("skeleton must be null, a path, or an object")

        camera = v["camera"]
        if camera is None:
            camera = DEFAULT_CAMERA
        elif isinstance(camera, str):
            path = Path(camera)
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            if not path.exists():
                raise ConfigError(f"camera file not found: {path}")
            camera = load_camera(path)
        elif isinstance(camera, dict):
            camera = camera_from_dict(camera)
        else:
            raise ConfigError("camera must be null, a path, or an object")

        den = _take(v["denoiser"], {
            "hidden_width": 128, "hidden_layers": 2, "target": "predict_y0",
            "pixel_scale": DEFAULT_PIXEL_SCALE, "oracle_lambda": 0.5,
            "oracle_sigma_mm": 20.0}, "denoiser")
        denoiser = DenoiserSettings(
            hidden_width=int(den["hidden_width"]),
            hidden_layers=int(den["hidden_layers"]),
            target=RegressionTarget(den["target"]),
            pixel_scale=float(den["pixel_scale"]),
            oracle_lambda=float(den["oracle_lambda"]),
            oracle_sigma_mm=float(den["oracle_sigma_mm"]))

        tr = _take(v["train"], {
            "steps": 2000, "batch_size": 32, "learning_rate": 1e-3,
            "weight_decay": 0.1, "beta1": 0.9, "beta2": 0.999}, "train")
        train = TrainSettings(
            steps=int(tr["steps"]), batch_size=int(tr["batch_size"]),
            learning_rate=float(tr["learning_rate"]),
            weight_decay=float(tr["weight_decay"]),
            beta1=float(tr["beta1"]), beta2=float(tr["beta2"]))

        sa = _take(v["sampler"], {
            "hypotheses": 20, "iterations": 10, "sigma_mode": "stochastic",
            "flip_mode": "none"}, "sampler")
        sampler = SamplerSettings(
            hypotheses=int(sa["hypotheses"]), iterations=int(sa["iterations"]),
            sigma_mode=SigmaMode(sa["sigma_mode"]),
            flip_mode=FlipMode(sa["flip_mode"]))

        me = _take(v["metrics"], {"pck_threshold_mm": 150.0,
                                  "pmpjpe_scale": True}, "metrics")
        metrics = MetricSettings(pck_threshold_mm=float(me["pck_threshold_mm"]),
                                 pmpjpe_scale=bool(me["pmpjpe_scale"]))

        cfg = RunConfig(
            seed=seed, out_dir=str(v["out_dir"]), t_max=t_max,
            signal_scale=float(v["signal_scale"]),
            image_width=int(v["image_width"]),
            image_height=int(v["image_height"]),
            skeleton=skeleton, camera=camera,
            scenario=_scenario_from_dict(v["scenario"], skeleton, camera, seed),
            denoiser=denoiser, train=train, sampler=sampler, metrics=metrics)
    except ConfigError:
        raise
    except (PoseDiffError, ValueError, TypeError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc
    # Cross-checks that individual constructors cannot see.
    if cfg.sampler.iterations > cfg.t_max:
        raise ConfigError(f"sampler iterations {cfg.sampler.iterations} "
                          f"exceed t_max {cfg.t_max}")
    return cfg


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return config_from_dict(doc, base_dir=path.parent)


def config_to_dict(cfg: RunConfig) -> dict:
    sc = cfg.scenario
    return {
        "seed": cfg.seed,
        "out_dir": cfg.out_dir,
        "t_max": cfg.t_max,
        "signal_scale": cfg.signal_scale,
        "image_width": cfg.image_width,
        "image_height": cfg.image_height,
        "skeleton": skeleton_to_dict(cfg.skeleton),
        "camera": camera_to_dict(cfg.camera),
        "scenario": {
            "pose_count": sc.pose_count,
            "frames_per_pose": sc.frames_per_pose,
            "noise_2d_px": sc.noise_2d_px,
            "hypothesis_count": sc.hypothesis_count,
            "hypothesis_model": _model_to_dict(sc.hypothesis_model),
            "root_box_mm": [list(sc.root_box_mm[0]), list(sc.root_box_mm[1])],
            "max_swing_deg": sc.max_swing_deg,
        },
        "denoiser": {
            "hidden_width": cfg.denoiser.hidden_width,
            "hidden_layers": cfg.denoiser.hidden_layers,
            "target": cfg.denoiser.target.value,
            "pixel_scale": cfg.denoiser.pixel_scale,
            "oracle_lambda": cfg.denoiser.oracle_lambda,
            "oracle_sigma_mm": cfg.denoiser.oracle_sigma_mm,
        },
        "train": {
            "steps": cfg.train.steps,
            "batch_size": cfg.train.batch_size,
            "learning_rate": cfg.train.learning_rate,
            "weight_decay": cfg.train.weight_decay,
            "beta1": cfg.train.beta1,
            "beta2": cfg.train.beta2,
        },
        "sampler": {
            "hypotheses": cfg.sampler.hypotheses,
            "iterations": cfg.sampler.iterations,
            "sigma_mode": cfg.sampler.sigma_mode.value,
            "flip_mode": cfg.sampler.flip_mode.value,
        },
        "metrics": {
            "pck_threshold_mm": cfg.metrics.pck_threshold_mm,
            "pmpjpe_scale": cfg.metrics.pmpjpe_scale,
        },
    }


def config_sha256(cfg: RunConfig) -> str:
    # out_dir is plumbing, not content; two runs that differ only in
    # where they write should hash the same.
    doc = config_to_dict(cfg)
    del doc["out_dir"]
    text = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def apply_overrides(cfg: RunConfig, **overrides) -> RunConfig:
    """Apply CLI flag overrides; None values are 'not given'."""
    updates = {k: v for k, v in overrides.items() if v is not None}
    top = {k: updates.pop(k) for k in ("seed", "out_dir") if k in updates}
    samp = {k: updates.pop(k) for k in
            ("hypotheses", "iterations", "sigma_mode", "flip_mode")
            if k in updates}
    if updates:
        raise ConfigError(f"unknown override(s): {', '.join(sorted(updates))}")
    try:
        if "hypotheses" in samp:
            samp["hypotheses"] = int(samp["hypotheses"])
        if "iterations" in samp:
            samp["iterations"] = int(samp["iterations"])
        if "sigma_mode" in samp:
            samp["sigma_mode"] = SigmaMode(samp["sigma_mode"])
        if "flip_mode" in samp:
            samp["flip_mode"] = FlipMode(samp["flip_mode"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if samp:
        cfg = replace(cfg, sampler=replace(cfg.sampler, **samp))
    if "seed" in top:
        cfg = replace(cfg, seed=int(top["seed"]),
                      scenario=replace(cfg.scenario, seed=int(top["seed"])))
    if "out_dir" in top:
        cfg = replace(cfg, out_dir=str(top["out_dir"]))
    if cfg.sampler.iterations > cfg.t_max:
        raise ConfigError(f"sampler iterations {cfg.sampler.iterations} "
                          f"exceed t_max {cfg.t_max}")
    return cfg
