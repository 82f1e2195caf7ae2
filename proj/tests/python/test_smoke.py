import json
import math

import pytest

import psanchor as pa


def test_anchor_density_defaults():
    assert pa.anchors_per_location("mask") == 9
    assert pa.anchors_per_location("pose", 3) == 27


def test_box_iou_and_xywh():
    b = pa.Box.from_xywh(10, 20, 30, 40)
    assert (b.x_min, b.y_min, b.x_max, b.y_max) == (10, 20, 40, 60)
    assert pa.box_iou(b, b) == 1.0


def test_perimeter_corners():
    pts, corners = pa.sample_box_perimeter(pa.Box(0, 0, 4, 4), 8)
    assert len(pts) == 8
    assert list(corners) == [0, 2, 4, 6]
    assert pts[0] == (0.0, 0.0)


def test_idempotent_matching():
    box = pa.Box(0, 0, 10, 10)
    pts, _ = pa.sample_box_perimeter(box, 36)
    for strategy in ("nearest-point", "nearest-line", "corner-projection"):
        r = pa.match_mask(box, 36, pts, strategy)
        assert all(v for v in r["valid"])
        assert max(abs(c) for o in r["offsets"] for c in o) <= 1e-9


def test_reconstruction_of_convex_shape():
    contour = [(20 + 15 * math.cos(t / 20 * 2 * math.pi), 20 + 10 * math.sin(t / 20 * 2 * math.pi))
               for t in range(20)]
    rec = pa.reconstruct_mask(pa.Box(5, 10, 35, 30), 60, contour)
    assert pa.mask_iou(contour, rec) > 0.9


def test_oks_single_joint():
    gt = [(0.0, 0.0)] * 17
    vis = [0] * 17
    vis[0] = 2
    kappa = 2 * 0.026
    cand = list(gt)
    cand[0] = (kappa * math.sqrt(2 * 100.0), 0.0)
    assert pa.oks(cand, gt, vis, 100.0) == pytest.approx(math.exp(-1), abs=1e-9)
    assert pa.oks(gt, gt, vis, 100.0) == 1.0


def test_assign_and_nms():
    labels = pa.assign([[0.7, 0.1], [0.45, 0.2], [0.1, 0.3]], 0.6, 0.4, True)
    assert labels[0] == (1, 0)
    assert labels[2] == (1, 1)
    boxes = [pa.Box(0, 0, 10, 10), pa.Box(1, 1, 11, 11), pa.Box(50, 50, 60, 60)]
    assert pa.nms(boxes, [0.9, 0.8, 0.7], 0.5) == [0, 2]


def test_losses():
    assert pa.focal_loss(0.5, True) == pytest.approx(0.04332, abs=1e-5)
    assert pa.default_lambda("segmentation") == 0.1
    assert pa.default_lambda("pose") == 10.0
    assert pa.shape_indexed_coords([(4.0, 4.0), (8.0, 4.0)], 8.0) == [(0.0, 0.0), (0.5, 0.0)]


def test_kmeans_single_mode_is_mean():
    a = [(float(i), 0.0) for i in range(17)]
    b = [(float(i), 2.0) for i in range(17)]
    r = pa.kmeans_poses([a, b], 1, seed=3)
    assert r["modes"][0][5] == pytest.approx((5.0, 1.0))


def test_synthetic_corpus_round_trip():
    text = pa.synthetic_corpus_json("contours", 6, 11)
    assert text == pa.synthetic_corpus_json("contours", 6, 11)
    assert pa.count_annotations(text)["records"] == 6
    doc = json.loads(text)
    assert len(doc["annotations"]) == 6


def test_errors_raise():
    with pytest.raises(pa.PsaError):
        pa.Box(0, 0, -1, 5)
    code, _, err = pa.run_cli(["targets", "/nonexistent.json"])
    assert code != 0
    assert err
