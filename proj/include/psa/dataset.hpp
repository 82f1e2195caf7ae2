#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "psa/anchors.hpp"
#include "psa/assignment.hpp"
#include "psa/geometry.hpp"

namespace psa {

struct InstanceRecord {
    std::int64_t annotation_id = 0;
    std::int64_t image_id = 0;
    std::size_t image_width = 0;
    std::size_t image_height = 0;
    int class_id = 1;
    Box bbox;
    std::vector<Contour> segmentation;
    std::optional<PoseTarget> keypoints;
    std::optional<double> area;
    /// Some coordinate falls outside the image; kept, but reported.
    bool out_of_bounds = false;

    /// Largest polygon, or nullptr without segmentation.
    const Contour* primary_contour() const;
};

struct ParseResult {
    std::vector<InstanceRecord> records;
    std::vector<std::string> warnings;
    std::size_t rle_rejected = 0;
    std::size_t polygons_dropped = 0;
};

/// COCO-style document: images[], annotations[] with polygon
/// segmentations, 51-value keypoints and [x, y, w, h] boxes. RLE and crowd
/// annotations are rejected and counted.
ParseResult parse_annotations(const std::filesystem::path& path);
ParseResult parse_annotations_text(const std::string& text);

/// Deterministic COCO-style serialization of records (one image entry per
/// distinct image id, in first-seen order).
std::string records_to_coco_json(const std::vector<InstanceRecord>& records);
void write_coco(const std::vector<InstanceRecord>& records, const std::filesystem::path& path);

enum class SynthKind { Contours, Poses };

struct SynthParams {
    SynthKind kind = SynthKind::Contours;
    std::size_t count = 100;
    std::uint64_t seed = 0;
    std::size_t image_width = 512;
    std::size_t image_height = 512;
    std::size_t instances_per_image = 2;

    // Contours: vertices on an ellipse (convex) or at random radii (star).
    bool convex_only = false;
    std::size_t min_vertices = 3;
    std::size_t max_vertices = 40;
    double min_size = 40.0;
    double max_size = 200.0;
    double max_aspect = 2.0;
    /// Star polygons draw radii from [star_min_radius, 1].
    double star_min_radius = 0.4;

    // Poses: a 17-joint standing skeleton, optionally re-posed.
    double min_height = 60.0;
    double max_height = 240.0;
    double max_rotation_deg = 25.0;
    /// Per-joint Gaussian noise, as a fraction of the person height.
    double jitter = 0.0;
    /// Probability that a joint is marked invisible.
    double dropout = 0.0;
    /// 0 keeps the base skeleton; 1 draws from several body poses with
    /// full limb-angle noise.
    double articulation = 1.0;
};

/// Standing skeleton in a unit-height frame centered on its bounding box.
const Joints& builtin_skeleton();

std::vector<InstanceRecord> generate_synthetic_corpus(const SynthParams& params);

/// Groups records by image id, keeping first-seen image order.
std::vector<std::vector<const InstanceRecord*>> group_by_image(
    const std::vector<InstanceRecord>& records);

}  // namespace psa
