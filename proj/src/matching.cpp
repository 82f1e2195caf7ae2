#include "psa/matching.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace psa {

std::string_view to_string(MatchStrategy strategy) {
    switch (strategy) {
        case MatchStrategy::NearestPoint: return "nearest-point";
        case MatchStrategy::NearestLine: return "nearest-line";
        case MatchStrategy::CornerProjection: return "corner-projection";
        case MatchStrategy::Pose: return "pose";
    }
    return "unknown";
}

std::optional<MatchStrategy> parse_mask_strategy(std::string_view name) {
    if (name == "nearest-point") return MatchStrategy::NearestPoint;
    if (name == "nearest-line") return MatchStrategy::NearestLine;
    if (name == "corner-projection") return MatchStrategy::CornerProjection;
    return std::nullopt;
}

std::size_t MatchResult::valid_count() const {
    return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), true));
}

namespace {

MatchResult empty_result(MatchStrategy strategy, std::span<const Point2> anchor_points) {
    MatchResult r;
    r.strategy = strategy;
    r.targets.assign(anchor_points.begin(), anchor_points.end());
    r.valid.assign(anchor_points.size(), false);
    r.offsets.assign(anchor_points.size(), Point2{});
    r.source.assign(anchor_points.size(), MatchResult::kNoSource);
    return r;
}

void accept(MatchResult& r, std::size_t i, Point2 anchor_point, Point2 target, std::size_t src) {
    r.targets[i] = target;
    r.valid[i] = true;
    r.offsets[i] = target - anchor_point;
    r.source[i] = src;
}

// Closest point on segment (a, b); zero-length segments collapse to a.
Point2 closest_on_segment(Point2 p, Point2 a, Point2 b) {
    if (a == b) return a;
    return project_point_to_segment(p, a, b);
}

struct LineHit {
    Point2 point;
    double distance = 0.0;
    /// Contour arc position: segment index plus parameter in [0, 1].
    double position = 0.0;
    std::size_t segment = 0;
};

// Intersection of the axis-aligned line through `p` with segment j.
// vertical == true casts x = p.x, otherwise y = p.y. Collinear overlaps
// return the overlap point nearest to p.
std::optional<LineHit> cast_line(Point2 p, bool vertical, const Contour& contour, std::size_t j) {
    const Point2 a = contour.segment_start(j);
    const Point2 b = contour.segment_end(j);
    // u: coordinate the line fixes; v: coordinate along the line.
    const double line_u = vertical ? p.x : p.y;
    const double line_v = vertical ? p.y : p.x;
    const double au = vertical ? a.x : a.y;
    const double bu = vertical ? b.x : b.y;
    const double av = vertical ? a.y : a.x;
    const double bv = vertical ? b.y : b.x;

    double t = 0.0;
    double v = 0.0;
    if (au == bu) {
        if (au != line_u) return std::nullopt;
        v = std::clamp(line_v, std::min(av, bv), std::max(av, bv));
        if (av == bv) {
            t = 0.0;
        } else if (v == bv) {
            t = 1.0;
        } else {
            t = (v - av) / (bv - av);
        }
    } else {
        if (line_u < std::min(au, bu) || line_u > std::max(au, bu)) return std::nullopt;
        if (line_u == au) {
            t = 0.0;
            v = av;
        } else if (line_u == bu) {
            t = 1.0;
            v = bv;
        } else {
            t = (line_u - au) / (bu - au);
            v = av + t * (bv - av);
        }
    }
    LineHit hit;
    hit.point = vertical ? Point2{line_u, v} : Point2{v, line_u};
    hit.distance = std::abs(v - line_v);
    hit.position = static_cast<double>(j) + t;
    hit.segment = j;
    return hit;
}

// Whether arc position `pos` lies on the forward arc from vertex `from` to
// vertex `to`. An empty arc (from == to) contains nothing.
bool on_arc(double pos, std::size_t from, std::size_t to, std::size_t n) {
    if (from == to) return false;
    const double nd = static_cast<double>(n);
    const double length = static_cast<double>((to + n - from) % n);
    double offset = pos - static_cast<double>(from);
    if (offset < 0.0) offset += nd;
    if (offset >= nd) offset -= nd;
    return offset <= length;
}

}  // namespace

std::size_t nearest_vertex_l1(Point2 p, const Contour& contour) {
    std::size_t best = 0;
    double best_d = l1_distance(p, contour[0]);
    for (std::size_t v = 1; v < contour.size(); ++v) {
        const double d = l1_distance(p, contour[v]);
        if (d < best_d) {
            best_d = d;
            best = v;
        }
    }
    return best;
}

MatchResult match_nearest_point(const MaskAnchor& anchor, const Contour& gt) {
    auto r = empty_result(MatchStrategy::NearestPoint, anchor.points);
    for (std::size_t i = 0; i < anchor.points.size(); ++i) {
        const std::size_t v = nearest_vertex_l1(anchor.points[i], gt);
        accept(r, i, anchor.points[i], gt[v], v);
    }
    return r;
}

MatchResult match_nearest_line(const MaskAnchor& anchor, const Contour& gt) {
    auto r = empty_result(MatchStrategy::NearestLine, anchor.points);
    for (std::size_t i = 0; i < anchor.points.size(); ++i) {
        const Point2 p = anchor.points[i];
        std::size_t best = 0;
        Point2 best_pt = closest_on_segment(p, gt.segment_start(0), gt.segment_end(0));
        double best_d = squared_norm(best_pt - p);
        for (std::size_t j = 1; j < gt.size(); ++j) {
            const Point2 q = closest_on_segment(p, gt.segment_start(j), gt.segment_end(j));
            const double d = squared_norm(q - p);
            if (d < best_d) {
                best_d = d;
                best = j;
                best_pt = q;
            }
        }
        accept(r, i, p, best_pt, best);
    }
    return r;
}

MatchResult match_corner_projection(const MaskAnchor& anchor, const Contour& gt) {
    auto r = empty_result(MatchStrategy::CornerProjection, anchor.points);
    const std::size_t ns = gt.size();

    std::array<std::size_t, 4> corner_vertex{};
    for (std::size_t k = 0; k < 4; ++k) {
        const std::size_t idx = anchor.corners[k];
        corner_vertex[k] = nearest_vertex_l1(anchor.points[idx], gt);
        accept(r, idx, anchor.points[idx], gt[corner_vertex[k]], corner_vertex[k]);
    }

    for (std::size_t i = 0; i < anchor.points.size(); ++i) {
        if (anchor.is_corner(i)) continue;
        const Point2 p = anchor.points[i];
        const int side = anchor.side_of(i);
        const bool vertical = side == 0 || side == 2;

        std::optional<LineHit> best;
        for (std::size_t j = 0; j < ns; ++j) {
            auto hit = cast_line(p, vertical, gt, j);
            if (hit && (!best || hit->distance < best->distance)) best = hit;
        }
        if (!best) continue;

        r.targets[i] = best->point;
        r.source[i] = best->segment;
        const std::size_t from = corner_vertex[static_cast<std::size_t>(side)];
        const std::size_t to = corner_vertex[static_cast<std::size_t>((side + 1) % 4)];
        if (on_arc(best->position, from, to, ns)) {
            r.valid[i] = true;
            r.offsets[i] = best->point - p;
        }
    }
    return r;
}

MatchResult match_mask(const MaskAnchor& anchor, const Contour& gt, MatchStrategy strategy) {
    switch (strategy) {
        case MatchStrategy::NearestPoint: return match_nearest_point(anchor, gt);
        case MatchStrategy::NearestLine: return match_nearest_line(anchor, gt);
        case MatchStrategy::CornerProjection: return match_corner_projection(anchor, gt);
        case MatchStrategy::Pose: break;
    }
    throw Error(ErrorKind::InvalidArgument, "pose strategy does not apply to mask anchors");
}

MatchResult match_pose(const PoseAnchor& anchor, std::span<const Point2> gt_joints,
                       std::span<const int> visibility) {
    if (gt_joints.size() != kNumJoints || visibility.size() != kNumJoints) {
        throw Error(ErrorKind::JointCountMismatch,
                    "pose matching needs 17 joints and 17 visibility flags, got " +
                        std::to_string(gt_joints.size()) + " and " +
                        std::to_string(visibility.size()));
    }
    auto r = empty_result(MatchStrategy::Pose, anchor.joints);
    for (std::size_t j = 0; j < kNumJoints; ++j) {
        if (visibility[j] > 0) {
            accept(r, j, anchor.joints[j], gt_joints[j], j);
        } else {
            r.targets[j] = gt_joints[j];
            r.source[j] = j;
        }
    }
    return r;
}

std::array<double, 4> encode_box_targets(const MaskAnchor& anchor, const Box& gt_box) {
    const Point2 tl = anchor.top_left();
    const Point2 br = anchor.bottom_right();
    return {gt_box.x_min() - tl.x, gt_box.y_min() - tl.y, gt_box.x_max() - br.x,
            gt_box.y_max() - br.y};
}

}  // namespace psa
