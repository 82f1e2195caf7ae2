#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "psa/config.hpp"
#include "psa/dataset.hpp"
#include "psa/posemodes.hpp"

namespace psa {

/// Normalized poses of every record with keypoints; records whose pose
/// cannot be normalized are skipped.
std::vector<NormalizedPose> record_poses(const std::vector<InstanceRecord>& records);

/// k-means modes over the fully visible poses of the records.
PoseModes cluster_record_poses(const std::vector<InstanceRecord>& records, std::size_t k,
                               std::uint64_t seed);

/// Canonical poses for a pose config: the modes document when configured,
/// else clusters of the records.
std::vector<Joints> resolve_canonical_poses(const TargetConfig& config,
                                            const std::vector<InstanceRecord>& records);

struct AnchorTarget {
    std::int64_t image_id = 0;
    std::size_t level = 0;
    std::size_t row = 0;
    std::size_t col = 0;
    /// Index within its location.
    std::size_t anchor = 0;
    Label label = Label::Negative;
    /// Annotation id of the matched gt, when positive.
    std::optional<std::int64_t> gt_annotation_id;
    double similarity = 0.0;
    /// Offsets divided by the level stride; filled for positives only.
    std::vector<bool> valid;
    std::vector<Point2> offsets;
    std::optional<std::array<double, 4>> box_offsets;
};

struct TargetSummary {
    std::size_t images = 0;
    std::size_t gts = 0;
    std::size_t anchors = 0;
    std::size_t positives = 0;
    std::size_t negatives = 0;
    std::size_t ignored = 0;
    std::size_t valid_points = 0;
    std::size_t skipped_records = 0;
};

/// Targets of every anchor of one image, sorted by (level, row, col, anchor).
/// `records` must share an image; records without the task's annotation are
/// left out of matching and counted in `skipped`.
std::vector<AnchorTarget> image_targets(const std::vector<const InstanceRecord*>& records,
                                        std::size_t image_width, std::size_t image_height,
                                        const TargetConfig& config,
                                        const std::vector<Joints>& canonical_poses,
                                        std::size_t* skipped = nullptr);

/// Header line, without the trailing newline.
std::string targets_header(const TargetConfig& config, std::size_t num_modes);

/// One space-separated line, fields in this order: image_id level row col
/// anchor label gt_id similarity valid offsets box. `valid` is a string of
/// 0/1 flags, `offsets` is "dx,dy;dx,dy;..." and `box` is "l,t,r,b"; fields
/// that do not apply are "-".
std::string format_target_line(const AnchorTarget& target);

/// Writes the header and every anchor's line, images in first-seen order.
TargetSummary emit_targets(const std::vector<InstanceRecord>& records,
                           const TargetConfig& config, std::ostream& out);

std::string summary_to_json(const TargetSummary& summary);

/// Shortest round-trip decimal for a double.
std::string format_number(double v);

}  // namespace psa
