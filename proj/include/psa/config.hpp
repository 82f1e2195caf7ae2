#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "psa/anchors.hpp"
#include "psa/assignment.hpp"
#include "psa/matching.hpp"
#include "psa/refmath.hpp"

namespace psa {

/// Everything `targets` and `coverage` need besides the annotations.
struct TargetConfig {
    Task task = Task::Segmentation;
    PyramidConfig pyramid = PyramidConfig::defaults();
    MatchStrategy strategy = MatchStrategy::CornerProjection;
    Thresholds thresholds = Thresholds::detection();
    bool force_nearest = false;
    OksParams oks = OksParams::coco();
    /// Pose modes document; when absent, modes are clustered from the input.
    std::optional<std::filesystem::path> modes_path;
    std::size_t num_modes = 3;
    std::uint64_t seed = 0;
    /// Similarity a gt's best anchor must reach to count as matched.
    double coverage_threshold = 0.5;

    void validate() const;
};

/// Segmentation: detection thresholds, corner projection. Pose: stage-1
/// thresholds, OKS with COCO kappas.
TargetConfig default_config(Task task);

/// JSON object with optional keys: task, levels [{stride, base_scale}],
/// octave_scales, aspect_ratios, pose_scales, pose_rotations, num_points,
/// strategy, thresholds {hi, lo} or a preset name, force_nearest,
/// oks {kappas, scale_source}, modes, num_modes, seed, coverage_threshold.
/// Unknown keys are rejected. `task` overrides the document's task; the
/// defaults of the resulting task fill missing keys.
TargetConfig parse_config(const std::string& text, std::optional<Task> task = std::nullopt,
                          const std::filesystem::path& base_dir = {});
TargetConfig load_config(const std::filesystem::path& path,
                         std::optional<Task> task = std::nullopt);

std::string config_to_json(const TargetConfig& config);

}  // namespace psa
