#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "psa/geometry.hpp"

namespace psa {

inline constexpr std::size_t kNumJoints = 17;
using Joints = std::array<Point2, kNumJoints>;

/// Indices of the top-left, top-right, bottom-right and bottom-left corners
/// within a perimeter point list.
using CornerIndices = std::array<std::size_t, 4>;

struct PerimeterSamples {
    std::vector<Point2> points;
    CornerIndices corners{};
};

/// n points clockwise in image coordinates starting at the top-left corner,
/// n/4 per side at equal spacing; corners land at 0, n/4, n/2 and 3n/4.
PerimeterSamples sample_box_perimeter(const Box& box, std::size_t n);

struct MaskAnchor {
    Point2 center;
    Box implicit_box;
    std::vector<Point2> points;
    CornerIndices corners{};

    Point2 top_left() const { return points[corners[0]]; }
    Point2 bottom_right() const { return points[corners[2]]; }
    /// Side of point i: 0 top, 1 right, 2 bottom, 3 left. Corners report the
    /// side they start.
    int side_of(std::size_t i) const;
    bool is_corner(std::size_t i) const;
};

/// Box of area (base_scale * octave)^2 with width / height == aspect.
MaskAnchor build_mask_anchor(Point2 center, double base_scale, double octave, double aspect,
                             std::size_t n);

struct PoseAnchor {
    /// mode_id of anchors rebuilt from stage-1 predictions.
    static constexpr int kRefinedMode = -1;

    Joints joints{};
    int mode_id = 0;
    double scale = 1.0;
    double rotation_deg = 0.0;
};

struct PyramidLevel {
    double stride = 8.0;
    double base_scale = 32.0;
};

struct PyramidConfig {
    std::vector<PyramidLevel> levels;
    std::vector<double> octave_scales;
    std::vector<double> aspect_ratios;
    std::vector<double> pose_scales;
    std::vector<double> pose_rotations_deg;
    std::size_t num_points = 36;

    /// P3-P7 with three octaves, three aspect ratios and the middle 3x3
    /// pose scale / rotation presets.
    static PyramidConfig defaults();
    /// Table-style presets: scales 0.6..1.4 step 0.2 and rotations -20..20 step 10.
    static std::vector<double> wide_pose_scales();
    static std::vector<double> wide_pose_rotations();

    /// Throws InvalidConfig on violated invariants.
    void validate() const;

    std::size_t mask_anchors_per_location() const {
        return octave_scales.size() * aspect_ratios.size();
    }
    std::size_t pose_anchors_per_location(std::size_t num_modes) const {
        return num_modes * pose_scales.size() * pose_rotations_deg.size();
    }
};

enum class AnchorKind { Mask, Pose };

struct AnchorLocation {
    std::size_t row = 0;
    std::size_t col = 0;
    Point2 center;
    std::vector<MaskAnchor> masks;
    std::vector<PoseAnchor> poses;
};

struct LevelAnchors {
    std::size_t level_index = 0;
    double stride = 0.0;
    double base_scale = 0.0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    /// Row-major: locations[row * cols + col].
    std::vector<AnchorLocation> locations;
};

struct AnchorGrid {
    AnchorKind kind = AnchorKind::Mask;
    std::vector<LevelAnchors> levels;

    std::size_t total_anchors() const;
};

/// Location of cell (row, col) at the given stride: ((col + 0.5) s, (row + 0.5) s).
inline Point2 location_center(std::size_t row, std::size_t col, double stride) {
    return {(static_cast<double>(col) + 0.5) * stride, (static_cast<double>(row) + 0.5) * stride};
}

/// Canonical poses live in a unit frame (see posemodes); each is scaled by a
/// level's base scale, moved so its joint centroid sits on the location
/// center, then rotated and scaled about that centroid.
PoseAnchor place_pose_anchor(const Joints& canonical, int mode_id, Point2 location,
                             double base_scale, double scale, double rotation_deg);

/// Anchor order within a location: masks iterate octave (outer) then aspect;
/// poses iterate mode, scale, rotation.
AnchorGrid generate_grid(const PyramidConfig& config, std::size_t image_width,
                         std::size_t image_height, AnchorKind kind,
                         std::span<const Joints> canonical_poses = {});

}  // namespace psa
