"""Point-set anchors for shape regression."""

from ._core import (
    Box,
    PsaError,
    anchors_per_location,
    assign,
    box_iou,
    count_annotations,
    default_lambda,
    focal_loss,
    grid_anchor_count,
    kmeans_poses,
    mask_iou,
    match_mask,
    nms,
    oks,
    polygon_area,
    reconstruct_mask,
    run_cli,
    sample_box_perimeter,
    shape_indexed_coords,
    synthetic_corpus_json,
)

__all__ = [
    "Box",
    "PsaError",
    "anchors_per_location",
    "assign",
    "box_iou",
    "count_annotations",
    "default_lambda",
    "focal_loss",
    "grid_anchor_count",
    "kmeans_poses",
    "mask_iou",
    "match_mask",
    "nms",
    "oks",
    "polygon_area",
    "reconstruct_mask",
    "run_cli",
    "sample_box_perimeter",
    "shape_indexed_coords",
    "synthetic_corpus_json",
]
