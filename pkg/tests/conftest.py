import numpy as np
import pytest

from posediff.camera import CameraIntrinsics
from posediff.core import PoseSeq2D, PoseSeq3D, Skeleton


@pytest.fixture
def tri_skeleton() -> Skeleton:
    """Three joints in a chain, joints 1 and 2 mirror each other."""
    return Skeleton(parents=(0, 0, 0), mirror_pairs=((1, 2),),
                    bone_lengths=(0.0, 100.0, 100.0))


@pytest.fixture
def chain_skeleton() -> Skeleton:
    """Five-joint chain without mirror pairs."""
    return Skeleton(parents=(0, 0, 1, 2, 3), mirror_pairs=(),
                    bone_lengths=(0.0, 120.0, 110.0, 90.0, 80.0))


@pytest.fixture
def simple_camera() -> CameraIntrinsics:
    return CameraIntrinsics.pinhole(fx=1000.0, fy=1000.0, cx=500.0, cy=500.0)


def random_pose(rng: np.random.Generator, frames: int = 2, joints: int = 3,
                depth: float = 2000.0) -> PoseSeq3D:
    pts = rng.normal(scale=200.0, size=(frames, joints, 3))
    pts[..., 2] += depth
    return PoseSeq3D(pts)


def random_keypoints(rng: np.random.Generator, frames: int = 2,
                     joints: int = 3) -> PoseSeq2D:
    return PoseSeq2D(rng.uniform(0.0, 1000.0, size=(frames, joints, 2)))
