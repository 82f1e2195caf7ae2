#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "psa/anchors.hpp"
#include "psa/geometry.hpp"

namespace psa {

enum class MatchStrategy { NearestPoint, NearestLine, CornerProjection, Pose };

std::string_view to_string(MatchStrategy strategy);
/// Accepts "nearest-point", "nearest-line", "corner-projection".
std::optional<MatchStrategy> parse_mask_strategy(std::string_view name);

/// Per-point correspondence between an anchor point set and a ground-truth
/// shape. Entries with valid[i] == false carry a zero offset and must be
/// ignored by regression; their target is the raw candidate found (if any),
/// else the anchor point itself.
struct MatchResult {
    static constexpr std::size_t kNoSource = std::numeric_limits<std::size_t>::max();

    MatchStrategy strategy = MatchStrategy::NearestPoint;
    std::vector<Point2> targets;
    std::vector<bool> valid;
    std::vector<Point2> offsets;
    /// Matched vertex (nearest point), segment (nearest line, corner
    /// projection) or joint index; kNoSource when nothing was found.
    std::vector<std::size_t> source;

    std::size_t size() const { return targets.size(); }
    std::size_t valid_count() const;
};

/// Contour vertex with the smallest L1 distance; lowest index on ties.
std::size_t nearest_vertex_l1(Point2 p, const Contour& contour);

MatchResult match_nearest_point(const MaskAnchor& anchor, const Contour& gt);
MatchResult match_nearest_line(const MaskAnchor& anchor, const Contour& gt);
MatchResult match_corner_projection(const MaskAnchor& anchor, const Contour& gt);
MatchResult match_mask(const MaskAnchor& anchor, const Contour& gt, MatchStrategy strategy);

/// Offsets are gt - anchor on joints with visibility > 0.
MatchResult match_pose(const PoseAnchor& anchor, std::span<const Point2> gt_joints,
                       std::span<const int> visibility);

/// (dx_tl, dy_tl, dx_br, dy_br): gt corners minus the anchor's corner points.
std::array<double, 4> encode_box_targets(const MaskAnchor& anchor, const Box& gt_box);

}  // namespace psa
