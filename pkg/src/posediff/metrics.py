"""Pose error metrics.

All metrics take (prediction, ground truth) pairs of identical shape.
``mpjpe`` is the raw mean joint distance in millimeters; ``pmpjpe``
aligns each predicted frame to its ground-truth frame with a similarity
transform before measuring; ``pck``/``auc`` are threshold-based
fractions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PoseSeq3D
from .errors import DegenerateAlignmentError, ShapeError

PCK_DEFAULT_THRESHOLD_MM = 150.0
AUC_MAX_MM = 150.0
AUC_STEP_MM = 5.0

# A frame whose centered joint cloud has second singular value below
# this multiple of the first is treated as collinear.
_COLLINEAR_RTOL = 1e-9


def _paired(pred: PoseSeq3D, gt: PoseSeq3D) -> tuple[np.ndarray, np.ndarray]:
    if pred.joints.shape != gt.joints.shape:
        raise ShapeError(
            f"prediction shape {pred.joints.shape} != ground truth {gt.joints.shape}")
    return pred.joints, gt.joints


def joint_errors(pred: PoseSeq3D, gt: PoseSeq3D) -> np.ndarray:
    """Per-joint Euclidean errors, shape (frames, joints), millimeters."""
    p, g = _paired(pred, gt)
    return np.linalg.norm(p - g, axis=-1)


def mpjpe(pred: PoseSeq3D, gt: PoseSeq3D) -> float:
    """Mean per-joint position error over all frames and joints."""
    return float(joint_errors(pred, gt).mean())


def per_frame_mpjpe(pred: PoseSeq3D, gt: PoseSeq3D) -> np.ndarray:
    return joint_errors(pred, gt).mean(axis=1)


def align_frame(pred: np.ndarray, gt: np.ndarray, *,
                with_scale: bool = True) -> np.ndarray:
    """Similarity-align one (J, 3) predicted frame onto its ground truth.

    Finds rotation R (reflections excluded), translation, and optionally
    a uniform scale minimizing the summed squared joint error, and
    returns the transformed prediction. Raises when either cloud is
    collinear, where the rotation is not identifiable.
    """
    if pred.shape != gt.shape or pred.ndim != 2 or pred.shape[1] != 3:
        raise ShapeError(f"align_frame: bad shapes {pred.shape} vs {gt.shape}")
    if pred.shape[0] < 3:
        raise DegenerateAlignmentError(
            f"alignment needs at least 3 joints, got {pred.shape[0]}")

    mu_p = pred.mean(axis=0)
    mu_g = gt.mean(axis=0)
    p0 = pred - mu_p
    g0 = gt - mu_g
    norm_p = np.linalg.norm(p0)
    norm_g = np.linalg.norm(g0)
    if norm_p == 0.0 or norm_g == 0.0:
        raise DegenerateAlignmentError("all joints coincide, alignment undefined")
    for cloud, who in ((p0, "prediction"), (g0, "ground truth")):
        s = np.linalg.svd(cloud, compute_uv=False)
        if s[1] <= _COLLINEAR_RTOL * s[0]:
            raise DegenerateAlignmentError(f"{who} joints are collinear")

    pn = p0 / norm_p
    gn = g0 / norm_g
    m = pn.T @ gn
    u, s, vt = np.linalg.svd(m)
    rot = u @ vt
    if np.linalg.det(rot) < 0:
        # Flip the axis with the smallest singular value to stay in SO(3).
        u[:, -1] = -u[:, -1]
        s[-1] = -s[-1]
        rot = u @ vt
    scale = s.sum() * norm_g / norm_p if with_scale else 1.0
    return scale * p0 @ rot + mu_g


def pmpjpe(pred: PoseSeq3D, gt: PoseSeq3D, *, with_scale: bool = True) -> float:
    """MPJPE after per-frame similarity alignment of pred onto gt."""
    p, g = _paired(pred, gt)
    total = 0.0
    for k in range(p.shape[0]):
        aligned = align_frame(p[k], g[k], with_scale=with_scale)
        total += float(np.linalg.norm(aligned - g[k], axis=-1).mean())
    return total / p.shape[0]


def pck(pred: PoseSeq3D, gt: PoseSeq3D,
        threshold_mm: float = PCK_DEFAULT_THRESHOLD_MM) -> float:
    """Fraction of joints with error strictly below the threshold."""
    if not threshold_mm > 0:
        raise ValueError(f"threshold must be positive, got {threshold_mm}")
    return float((joint_errors(pred, gt) < threshold_mm).mean())


def auc(pred: PoseSeq3D, gt: PoseSeq3D) -> float:
    """Mean correct-keypoint fraction over thresholds 0, 5, ..., 150 mm.

    The 0 mm point counts exact matches only, so a perfect prediction
    scores exactly 1.
    """
    errors = joint_errors(pred, gt)
    thresholds = np.arange(0.0, AUC_MAX_MM + AUC_STEP_MM / 2, AUC_STEP_MM)
    fractions = [(errors == 0.0).mean()]
    fractions += [(errors < th).mean() for th in thresholds[1:]]
    return float(np.mean(fractions))


@dataclass(frozen=True)
class MetricReport:
    """Bundle of the four standard metrics plus a per-frame breakdown."""

    mpjpe_mm: float
    pmpjpe_mm: float
    pck150: float
    auc: float
    per_frame_mpjpe_mm: tuple[float, ...]


def compute_metrics(pred: PoseSeq3D, gt: PoseSeq3D, *,
                    with_scale: bool = True,
                    pck_threshold_mm: float = PCK_DEFAULT_THRESHOLD_MM) -> MetricReport:
    return MetricReport(
        mpjpe_mm=mpjpe(pred, gt),
        pmpjpe_mm=pmpjpe(pred, gt, with_scale=with_scale),
        pck150=pck(pred, gt, pck_threshold_mm),
        auc=auc(pred, gt),
        per_frame_mpjpe_mm=tuple(float(x) for x in per_frame_mpjpe(pred, gt)),
    )
