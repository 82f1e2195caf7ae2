#include "psa/codec.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>

namespace psa {

DecodedPoints decode_points(std::span<const Point2> anchor_points,
                            std::span<const Point2> offsets, const std::vector<bool>& valid) {
    if (anchor_points.size() != offsets.size() || anchor_points.size() != valid.size()) {
        throw Error(ErrorKind::LengthMismatch,
                    "decode needs equal lengths, got " + std::to_string(anchor_points.size()) +
                        "/" + std::to_string(offsets.size()) + "/" +
                        std::to_string(valid.size()));
    }
    DecodedPoints out;
    out.points.assign(anchor_points.begin(), anchor_points.end());
    out.valid = valid;
    for (std::size_t i = 0; i < out.points.size(); ++i) {
        if (valid[i]) out.points[i] = anchor_points[i] + offsets[i];
    }
    return out;
}

Contour construct_mask(std::span<const Point2> points, const std::vector<bool>& valid,
                       MatchStrategy strategy) {
    if (points.size() != valid.size()) {
        throw Error(ErrorKind::LengthMismatch, "points and validity flags differ in length");
    }
    const bool use_all = strategy != MatchStrategy::CornerProjection;
    std::vector<Point2> kept;
    kept.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (use_all || valid[i]) kept.push_back(points[i]);
    }
    if (kept.size() < 3) {
        throw Error(ErrorKind::TooFewValidPoints,
                    "mask construction needs 3 valid points, got " + std::to_string(kept.size()));
    }
    return Contour(std::move(kept));
}

Box enclosing_box(std::span<const Point2> points, const std::vector<bool>& valid) {
    if (points.size() != valid.size()) {
        throw Error(ErrorKind::LengthMismatch, "points and validity flags differ in length");
    }
    std::vector<Point2> kept;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (valid[i]) kept.push_back(points[i]);
    }
    if (kept.empty()) throw Error(ErrorKind::NoValidPoints, "enclosing box of no valid points");
    return bounding_box(kept);
}

Box Detection::nms_box() const {
    if (box) return *box;
    if (mask) return mask->bounds();
    if (pose) return bounding_box(*pose);
    throw Error(ErrorKind::InvalidArgument, "detection has no box, mask or pose");
}

namespace {

std::vector<std::size_t> score_order(std::span<const double> scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return order;
}

}  // namespace

std::vector<ScoredCandidate> topk_per_level(std::span<const std::vector<double>> level_scores,
                                            std::size_t k) {
    std::vector<ScoredCandidate> out;
    for (std::size_t level = 0; level < level_scores.size(); ++level) {
        const auto& scores = level_scores[level];
        auto order = score_order(scores);
        const std::size_t keep = std::min(k, order.size());
        for (std::size_t i = 0; i < keep; ++i) {
            out.push_back({{level, order[i]}, scores[order[i]]});
        }
    }
    return out;
}

std::vector<std::size_t> nms(std::span<const Box> boxes, std::span<const double> scores,
                             double iou_threshold) {
    if (boxes.size() != scores.size()) {
        throw Error(ErrorKind::LengthMismatch, "nms needs one score per box");
    }
    if (!(iou_threshold >= 0.0 && iou_threshold <= 1.0)) {
        throw Error(ErrorKind::BadThresholds, "nms threshold must lie in [0, 1]");
    }
    std::vector<std::size_t> kept;
    for (std::size_t idx : score_order(scores)) {
        bool keep = true;
        for (std::size_t k : kept) {
            if (box_iou(boxes[idx], boxes[k]) > iou_threshold) {
                keep = false;
                break;
            }
        }
        if (keep) kept.push_back(idx);
    }
    return kept;
}

std::vector<std::size_t> nms(std::span<const Detection> detections, double iou_threshold) {
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < detections.size(); ++i) {
        by_class[detections[i].class_id].push_back(i);
    }
    std::vector<std::size_t> kept;
    for (const auto& [cls, members] : by_class) {
        std::vector<Box> boxes;
        std::vector<double> scores;
        boxes.reserve(members.size());
        scores.reserve(members.size());
        for (std::size_t i : members) {
            boxes.push_back(detections[i].nms_box());
            scores.push_back(detections[i].score);
        }
        for (std::size_t local : nms(boxes, scores, iou_threshold)) {
            kept.push_back(members[local]);
        }
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

}  // namespace psa
