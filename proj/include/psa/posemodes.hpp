#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <span>
#include <vector>

#include "psa/anchors.hpp"
#include "psa/geometry.hpp"

namespace psa {

/// Joints expressed relative to a reference box: centered on the box center
/// and divided by the box's longer side.
struct NormalizedPose {
    Joints joints{};
    std::array<bool, kNumJoints> valid{};

    bool fully_visible() const;
};

NormalizedPose normalize_pose(std::span<const Point2> joints, std::span<const int> visibility,
                              const Box& ref_box);

struct PoseModes {
    std::vector<Joints> modes;
    double inertia = 0.0;
    std::uint64_t seed = 0;
    std::size_t iterations = 0;
    /// Inertia after each assignment step, first entry from the seeding.
    std::vector<double> inertia_history;
    /// Number of fully visible poses that entered clustering.
    std::size_t admitted = 0;
};

/// Lloyd's algorithm on 34-d pose vectors with k-means++ seeding. Poses
/// with any invisible joint are skipped. Empty clusters are re-seeded from
/// the point farthest from its current center.
PoseModes kmeans_poses(std::span<const NormalizedPose> poses, std::size_t k, std::uint64_t seed,
                       std::size_t max_iters = 300);

/// {"k", "seed", "inertia", "iterations", "modes": [[[x, y] x 17] x k]}
void save_pose_modes(const PoseModes& modes, const std::filesystem::path& path);
PoseModes load_pose_modes(const std::filesystem::path& path);
std::string pose_modes_to_json(const PoseModes& modes);
PoseModes pose_modes_from_json(const std::string& text);

}  // namespace psa
