"""Diffusion-based multi-hypothesis 3D human pose lifting.

The pipeline: a noise schedule defines a forward diffusion over 3D
poses; a denoiser (trained MLP or test oracle) predicts the clean pose
from a noisy one conditioned on 2D keypoints; a DDIM sampler runs the
reverse process to generate H candidate poses; an aggregator collapses
them into one final pose, optionally using per-joint reprojection onto
the 2D evidence.
"""
from .aggregate import (AggregationReport, GT_METHODS, METHOD_NAMES,
                        agg_average, agg_jbest, agg_jpma, agg_pbest, agg_ppma,
                        run_aggregator)
from .camera import (CameraIntrinsics, DEFAULT_Z_MIN, camera_from_dict,
                     camera_to_dict, load_camera, project, project_with_mask,
                     ray_point, save_camera)
from .config import (RunConfig, apply_overrides, config_from_dict,
                     config_sha256, config_to_dict, load_config)
from .core import (DEFAULT_SKELETON, HypothesisSet, JOINT_NAMES_17, PoseSeq2D,
                   PoseSeq3D, Skeleton, flip_pose2d, flip_pose3d,
                   load_skeleton, save_skeleton, skeleton_from_dict,
                   skeleton_to_dict)
from .dataset import Dataset, Sequence, load_dataset, save_dataset
from .denoise import (Denoiser, DenoiserParams, MlpDenoiser, RegressionTarget,
                      TrainConfig, TrainResult, denoise, init_params,
                      load_checkpoint, oracle_contractive, oracle_noisy,
                      oracle_perfect, save_checkpoint, timestep_embedding,
                      train)
from .errors import (AggregationError, BehindCameraError, ConfigError,
                     DegenerateAlignmentError, MissingGroundTruthError,
                     NumericError, PoseDiffError, PoseFileParseError,
                     PoseFileSchemaError, ShapeError, SkeletonError,
                     TrainingDivergedError)
from .metrics import (MetricReport, align_frame, auc, compute_metrics,
                      joint_errors, mpjpe, pck, per_frame_mpjpe, pmpjpe)
from .poseio import load_poses, save_poses
from .render import render_frame, render_sequence
from .rng import RngStream, stream_id
from .sampler import (DdimDiagnostics, FlipMode, SamplerConfig, SigmaMode,
                      ddim_step, run_sampler, sample, sample_flipped,
                      sample_trace, timestep_ladder)
from .schedule import (DEFAULT_SIGNAL_SCALE, MM_PER_UNIT, NoiseSchedule,
                       diffuse, make_cosine_schedule, save_schedule_csv,
                       to_millimeters, to_signal_units)
from .synth import (Bimodal, DEFAULT_CAMERA, DepthRay, IidGaussian,
                    ScenarioConfig, gen_hypotheses, gen_poses, gen_scenarios)

__version__ = "0.1.0"
