"""Unsupervised video object segmentation by supervoxel consensus."""

from ._core import (
    boundary_f,
    consensus_masks,
    downscale,
    estimate_flow,
    estimate_saliency,
    initial_estimate,
    initial_estimate_from_cues,
    jaccard,
    quartiles,
    rgb_to_lab,
    segment_video,
    supervoxels,
    tukey_outliers,
)

__all__ = [
    "boundary_f",
    "consensus_masks",
    "downscale",
    "estimate_flow",
    "estimate_saliency",
    "initial_estimate",
    "initial_estimate_from_cues",
    "jaccard",
    "quartiles",
    "rgb_to_lab",
    "segment_video",
    "supervoxels",
    "tukey_outliers",
]
