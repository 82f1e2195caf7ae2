#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "psa/anchors.hpp"
#include "psa/geometry.hpp"

namespace psa {

enum class OksScaleSource { BoxArea, SegmentArea };

struct OksParams {
    std::array<double, kNumJoints> kappas{};
    OksScaleSource scale_source = OksScaleSource::BoxArea;

    /// kappa_i = 2 * sigma_i with the 17 COCO keypoint sigmas, matching the
    /// COCO evaluator's exp(-d^2 / (2 * area * (2 sigma)^2)).
    static OksParams coco();
    void validate() const;
};

/// Ground-truth pose as consumed by similarity and matching.
struct PoseTarget {
    Joints joints{};
    std::array<int, kNumJoints> visibility{};
    Box box;
    std::optional<double> segment_area;

    std::size_t visible_count() const;
    /// s in the OKS exponent for the configured source; falls back to the
    /// box area when no segment area is recorded.
    double scale(OksScaleSource source) const;
};

/// Mean over visible joints of exp(-d^2 / (2 * gt_scale * kappa^2)).
double oks(std::span<const Point2> candidate, std::span<const Point2> gt,
           std::span<const int> visibility, double gt_scale, const OksParams& params);
double oks(const PoseAnchor& anchor, const PoseTarget& gt, const OksParams& params);

enum class Label : int { Ignore = -1, Negative = 0, Positive = 1 };

struct LabelAssignment {
    static constexpr int kNoGt = -1;

    Label label = Label::Negative;
    int gt_index = kNoGt;
    /// Similarity with gt_index when positive, else the anchor's best similarity.
    double similarity = 0.0;
};

struct Thresholds {
    double hi = 0.6;
    double lo = 0.4;

    static Thresholds detection() { return {0.6, 0.4}; }
    static Thresholds pose_stage1() { return {0.5, 0.4}; }
    static Thresholds pose_stage2() { return {0.99, 0.4}; }
    /// "detection" | "segmentation" | "pose-stage1" | "pose-stage2".
    static std::optional<Thresholds> preset(std::string_view name);

    void validate() const;
};

/// Dense anchors x gts similarity table, row-major.
class SimilarityMatrix {
public:
    SimilarityMatrix(std::size_t anchors, std::size_t gts)
        : anchors_(anchors), gts_(gts), values_(anchors * gts, 0.0) {}

    std::size_t anchors() const { return anchors_; }
    std::size_t gts() const { return gts_; }
    double operator()(std::size_t a, std::size_t g) const { return values_[a * gts_ + g]; }
    double& operator()(std::size_t a, std::size_t g) { return values_[a * gts_ + g]; }

private:
    std::size_t anchors_;
    std::size_t gts_;
    std::vector<double> values_;
};

/// Implicit anchor boxes vs gt boxes.
SimilarityMatrix iou_matrix(std::span<const MaskAnchor> anchors, std::span<const Box> gt_boxes);
SimilarityMatrix oks_matrix(std::span<const PoseAnchor> anchors,
                            std::span<const PoseTarget> gts, const OksParams& params);

/// An anchor qualifies for a gt when their similarity reaches `hi`, or when
/// it is that gt's best anchor (lowest index on ties) and either
/// force_nearest is set or the similarity reaches `lo`. Qualifying anchors
/// are positive and take their most similar qualifying gt. Remaining
/// anchors are negative below `lo` and ignored otherwise.
std::vector<LabelAssignment> assign(const SimilarityMatrix& similarity, const Thresholds& thresholds,
                                    bool force_nearest);

/// Stage-2 anchors whose joints are the stage-1 predictions.
std::vector<PoseAnchor> refine_pose_anchors(std::span<const std::vector<Point2>> predictions);

}  // namespace psa
