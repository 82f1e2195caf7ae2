#include "psa/anchors.hpp"

#include <cmath>
#include <string>

namespace psa {

PerimeterSamples sample_box_perimeter(const Box& box, std::size_t n) {
    if (n < 4 || n % 4 != 0) {
        throw Error(ErrorKind::BadPointCount,
                    "perimeter point count must be a positive multiple of 4, got " +
                        std::to_string(n));
    }
    if (box.degenerate()) {
        throw Error(ErrorKind::DegenerateBox, "cannot sample the perimeter of a degenerate box");
    }
    const std::size_t per_side = n / 4;
    const double w = box.width();
    const double h = box.height();
    const auto along = [per_side](double length, std::size_t i) {
        return length * static_cast<double>(i) / static_cast<double>(per_side);
    };

    PerimeterSamples out;
    out.points.reserve(n);
    for (std::size_t i = 0; i < per_side; ++i) {
        out.points.push_back({box.x_min() + along(w, i), box.y_min()});
    }
    for (std::size_t i = 0; i < per_side; ++i) {
        out.points.push_back({box.x_max(), box.y_min() + along(h, i)});
    }
    for (std::size_t i = 0; i < per_side; ++i) {
        out.points.push_back({box.x_max() - along(w, i), box.y_max()});
    }
    for (std::size_t i = 0; i < per_side; ++i) {
        out.points.push_back({box.x_min(), box.y_max() - along(h, i)});
    }
    out.corners = {0, per_side, 2 * per_side, 3 * per_side};
    return out;
}

int MaskAnchor::side_of(std::size_t i) const {
    return static_cast<int>(i / (points.size() / 4));
}

bool MaskAnchor::is_corner(std::size_t i) const {
    for (auto c : corners) {
        if (c == i) return true;
    }
    return false;
}

MaskAnchor build_mask_anchor(Point2 center, double base_scale, double octave, double aspect,
                             std::size_t n) {
    if (!(base_scale > 0.0) || !(octave > 0.0) || !(aspect > 0.0)) {
        throw Error(ErrorKind::NonPositiveScale, "anchor scales and aspect must be positive");
    }
    const double side = base_scale * octave;
    const double root = std::sqrt(aspect);
    const Box box = Box::centered(center, side * root, side / root);
    auto samples = sample_box_perimeter(box, n);
    return MaskAnchor{center, box, std::move(samples.points), samples.corners};
}

PyramidConfig PyramidConfig::defaults() {
    PyramidConfig c;
    c.levels = {{8, 32}, {16, 64}, {32, 128}, {64, 256}, {128, 512}};
    c.octave_scales = {1.0, std::pow(2.0, 1.0 / 3.0), std::pow(2.0, 2.0 / 3.0)};
    c.aspect_ratios = {0.5, 1.0, 2.0};
    c.pose_scales = {0.8, 1.0, 1.2};
    c.pose_rotations_deg = {-10.0, 0.0, 10.0};
    c.num_points = 36;
    return c;
}

std::vector<double> PyramidConfig::wide_pose_scales() { return {0.6, 0.8, 1.0, 1.2, 1.4}; }

std::vector<double> PyramidConfig::wide_pose_rotations() {
    return {-20.0, -10.0, 0.0, 10.0, 20.0};
}

void PyramidConfig::validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidConfig, what); };
    if (levels.empty()) fail("pyramid needs at least one level");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (!(levels[i].stride > 0.0) || !(levels[i].base_scale > 0.0)) {
            fail("level " + std::to_string(i) + " needs positive stride and base scale");
        }
        if (i > 0 && !(levels[i].stride > levels[i - 1].stride)) {
            fail("strides must be strictly increasing");
        }
    }
    auto positive = [&](const std::vector<double>& v, const char* name) {
        if (v.empty()) fail(std::string(name) + " must not be empty");
        for (double x : v) {
            if (!(x > 0.0) || !std::isfinite(x)) fail(std::string(name) + " must be positive");
        }
    };
    positive(octave_scales, "octave_scales");
    positive(aspect_ratios, "aspect_ratios");
    positive(pose_scales, "pose_scales");
    if (pose_rotations_deg.empty()) fail("pose_rotations must not be empty");
    for (double r : pose_rotations_deg) {
        if (!std::isfinite(r)) fail("pose_rotations must be finite");
    }
    if (num_points < 4 || num_points % 4 != 0) {
        fail("num_points must be a positive multiple of 4");
    }
}

std::size_t AnchorGrid::total_anchors() const {
    std::size_t total = 0;
    for (const auto& level : levels) {
        for (const auto& loc : level.locations) total += loc.masks.size() + loc.poses.size();
    }
    return total;
}

PoseAnchor place_pose_anchor(const Joints& canonical, int mode_id, Point2 location,
                             double base_scale, double scale, double rotation_deg) {
    Joints scaled{};
    for (std::size_t j = 0; j < kNumJoints; ++j) scaled[j] = canonical[j] * base_scale;
    const Point2 shift = location - centroid(scaled);
    for (auto& p : scaled) p = p + shift;
    const auto moved = transform_points(scaled, location, rotation_deg, scale);

    PoseAnchor anchor;
    for (std::size_t j = 0; j < kNumJoints; ++j) anchor.joints[j] = moved[j];
    anchor.mode_id = mode_id;
    anchor.scale = scale;
    anchor.rotation_deg = rotation_deg;
    return anchor;
}

namespace {

std::size_t cells(std::size_t extent, double stride) {
    return static_cast<std::size_t>(std::ceil(static_cast<double>(extent) / stride));
}

}  // namespace

AnchorGrid generate_grid(const PyramidConfig& config, std::size_t image_width,
                         std::size_t image_height, AnchorKind kind,
                         std::span<const Joints> canonical_poses) {
    config.validate();
    if (kind == AnchorKind::Pose && canonical_poses.empty()) {
        throw Error(ErrorKind::MissingCanonicalPoses, "pose grids need canonical poses");
    }

    AnchorGrid grid;
    grid.kind = kind;
    grid.levels.reserve(config.levels.size());
    for (std::size_t li = 0; li < config.levels.size(); ++li) {
        const auto& lvl = config.levels[li];
        LevelAnchors level;
        level.level_index = li;
        level.stride = lvl.stride;
        level.base_scale = lvl.base_scale;
        level.rows = cells(image_height, lvl.stride);
        level.cols = cells(image_width, lvl.stride);
        level.locations.reserve(level.rows * level.cols);

        for (std::size_t r = 0; r < level.rows; ++r) {
            for (std::size_t c = 0; c < level.cols; ++c) {
                AnchorLocation loc;
                loc.row = r;
                loc.col = c;
                loc.center = location_center(r, c, lvl.stride);
                if (kind == AnchorKind::Mask) {
                    loc.masks.reserve(config.mask_anchors_per_location());
                    for (double octave : config.octave_scales) {
                        for (double aspect : config.aspect_ratios) {
                            loc.masks.push_back(build_mask_anchor(loc.center, lvl.base_scale,
                                                                  octave, aspect,
                                                                  config.num_points));
                        }
                    }
                } else {
                    loc.poses.reserve(config.pose_anchors_per_location(canonical_poses.size()));
                    for (std::size_t m = 0; m < canonical_poses.size(); ++m) {
                        for (double s : config.pose_scales) {
                            for (double rot : config.pose_rotations_deg) {
                                loc.poses.push_back(place_pose_anchor(
                                    canonical_poses[m], static_cast<int>(m), loc.center,
                                    lvl.base_scale, s, rot));
                            }
                        }
                    }
                }
                level.locations.push_back(std::move(loc));
            }
        }
        grid.levels.push_back(std::move(level));
    }
    return grid;
}

}  // namespace psa
