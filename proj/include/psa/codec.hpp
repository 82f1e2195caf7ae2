#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "psa/anchors.hpp"
#include "psa/geometry.hpp"
#include "psa/matching.hpp"

namespace psa {

struct DecodedPoints {
    std::vector<Point2> points;
    std::vector<bool> valid;
};

/// points[i] = anchor_points[i] + offsets[i] where valid; invalid entries
/// keep the anchor point and stay flagged.
DecodedPoints decode_points(std::span<const Point2> anchor_points,
                            std::span<const Point2> offsets, const std::vector<bool>& valid);

/// Polygon through the points in anchor order. Corner projection keeps
/// only valid points; the other strategies connect every point.
Contour construct_mask(std::span<const Point2> points, const std::vector<bool>& valid,
                       MatchStrategy strategy);

Box enclosing_box(std::span<const Point2> points, const std::vector<bool>& valid);

struct AnchorRef {
    std::size_t level = 0;
    std::size_t index = 0;
};

struct Detection {
    double score = 0.0;
    int class_id = 0;
    /// Box-head prediction; NMS falls back to the mask's enclosing box.
    std::optional<Box> box;
    std::optional<Contour> mask;
    std::optional<Joints> pose;
    AnchorRef source;

    Box nms_box() const;
};

struct ScoredCandidate {
    AnchorRef ref;
    double score = 0.0;
};

/// Best k per level by score (descending, then original index),
/// concatenated in level order.
std::vector<ScoredCandidate> topk_per_level(std::span<const std::vector<double>> level_scores,
                                            std::size_t k = 1000);

/// Greedy NMS; returns kept indices in visiting order (score descending,
/// ties by index).
std::vector<std::size_t> nms(std::span<const Box> boxes, std::span<const double> scores,
                             double iou_threshold);

/// Class-wise NMS over detections; kept indices sorted ascending.
std::vector<std::size_t> nms(std::span<const Detection> detections, double iou_threshold);

inline constexpr double kDefaultNmsThreshold = 0.5;
inline constexpr std::size_t kDefaultTopK = 1000;

}  // namespace psa
