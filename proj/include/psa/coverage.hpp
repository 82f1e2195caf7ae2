#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "psa/anchors.hpp"
#include "psa/assignment.hpp"
#include "psa/dataset.hpp"

namespace psa {

enum class Similarity { Iou, Oks };

std::string_view to_string(Similarity similarity);
std::optional<Similarity> parse_similarity(std::string_view name);

/// A named anchor layout. Pose layouts carry their canonical poses.
struct AnchorSetConfig {
    std::string name;
    PyramidConfig pyramid;
    std::vector<Joints> canonical_poses;
};

inline constexpr std::size_t kHistogramBins = 10;

struct CoverageReport {
    std::string config;
    Similarity similarity = Similarity::Oks;
    double threshold = 0.5;
    std::size_t anchors_per_location = 0;
    std::size_t gts = 0;
    std::size_t matched = 0;
    double matched_fraction = 0.0;
    std::size_t positives = 0;
    std::size_t negatives = 0;
    /// positives / negatives; infinite when there are no negatives.
    double pos_neg_ratio = 0.0;
    /// Best similarity per gt in bins [i/10, (i+1)/10); 1.0 lands in the last bin.
    std::vector<std::size_t> histogram;
    /// Best similarity per gt, in record order.
    std::vector<double> best_similarity;
};

/// For each layout: the fraction of gts whose best anchor reaches
/// `threshold`, and positive / negative counts from assign() with
/// force_nearest on, hi = threshold and lo = min(lo, threshold).
std::vector<CoverageReport> coverage_report(const std::vector<InstanceRecord>& records,
                                            std::span<const AnchorSetConfig> configs,
                                            Similarity similarity, double threshold,
                                            const OksParams& oks_params = OksParams::coco(),
                                            double lo = 0.4);

/// Each joint moved to the nearest point on the pose's bounding rectangle.
Joints rectangle_pose(const Joints& pose);

/// center-point, rectangle and mean-pose layouts followed by kmeans_k for
/// every k > 1 in `ks`, all on `base`'s pyramid.
std::vector<AnchorSetConfig> default_pose_coverage_configs(const std::vector<InstanceRecord>& records,
                                                           const PyramidConfig& base,
                                                           std::span<const std::size_t> ks,
                                                           std::uint64_t seed);

/// single-box (one octave, square) and the full octave x aspect layout.
std::vector<AnchorSetConfig> default_mask_coverage_configs(const PyramidConfig& base);

std::string format_coverage_table(const std::vector<CoverageReport>& reports);
std::string coverage_to_json(const std::vector<CoverageReport>& reports);

}  // namespace psa
