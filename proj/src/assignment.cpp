#include "psa/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace psa {

OksParams OksParams::coco() {
    constexpr std::array<double, kNumJoints> sigmas = {
        0.026, 0.025, 0.025, 0.035, 0.035, 0.079, 0.079, 0.072, 0.072,
        0.062, 0.062, 0.107, 0.107, 0.087, 0.087, 0.089, 0.089};
    OksParams p;
    for (std::size_t j = 0; j < kNumJoints; ++j) p.kappas[j] = 2.0 * sigmas[j];
    return p;
}

void OksParams::validate() const {
    for (double k : kappas) {
        if (!(k > 0.0) || !std::isfinite(k)) {
            throw Error(ErrorKind::InvalidConfig, "OKS kappas must be positive");
        }
    }
}

std::size_t PoseTarget::visible_count() const {
    return static_cast<std::size_t>(
        std::count_if(visibility.begin(), visibility.end(), [](int v) { return v > 0; }));
}

double PoseTarget::scale(OksScaleSource source) const {
    if (source == OksScaleSource::SegmentArea && segment_area) return *segment_area;
    return box.area();
}

double oks(std::span<const Point2> candidate, std::span<const Point2> gt,
           std::span<const int> visibility, double gt_scale, const OksParams& params) {
    if (candidate.size() != kNumJoints || gt.size() != kNumJoints ||
        visibility.size() != kNumJoints) {
        throw Error(ErrorKind::JointCountMismatch, "OKS needs 17 joints on both sides");
    }
    if (!(gt_scale > 0.0)) {
        throw Error(ErrorKind::NonPositiveScale, "OKS scale must be positive");
    }
    double sum = 0.0;
    std::size_t visible = 0;
    for (std::size_t j = 0; j < kNumJoints; ++j) {
        if (visibility[j] <= 0) continue;
        const double d2 = squared_norm(candidate[j] - gt[j]);
        const double k = params.kappas[j];
        sum += std::exp(-d2 / (2.0 * gt_scale * k * k));
        ++visible;
    }
    if (visible == 0) {
        throw Error(ErrorKind::NoVisibleJoints, "OKS needs at least one visible joint");
    }
    return sum / static_cast<double>(visible);
}

double oks(const PoseAnchor& anchor, const PoseTarget& gt, const OksParams& params) {
    return oks(anchor.joints, gt.joints, gt.visibility, gt.scale(params.scale_source), params);
}

std::optional<Thresholds> Thresholds::preset(std::string_view name) {
    if (name == "detection" || name == "segmentation") return detection();
    if (name == "pose-stage1" || name == "pose") return pose_stage1();
    if (name == "pose-stage2") return pose_stage2();
    return std::nullopt;
}

void Thresholds::validate() const {
    if (!(lo >= 0.0 && lo <= hi && hi <= 1.0)) {
        throw Error(ErrorKind::BadThresholds,
                    "thresholds need 0 <= lo <= hi <= 1, got lo=" + std::to_string(lo) +
                        " hi=" + std::to_string(hi));
    }
}

SimilarityMatrix iou_matrix(std::span<const MaskAnchor> anchors, std::span<const Box> gt_boxes) {
    SimilarityMatrix m(anchors.size(), gt_boxes.size());
    for (std::size_t a = 0; a < anchors.size(); ++a) {
        for (std::size_t g = 0; g < gt_boxes.size(); ++g) {
            m(a, g) = box_iou(anchors[a].implicit_box, gt_boxes[g]);
        }
    }
    return m;
}

SimilarityMatrix oks_matrix(std::span<const PoseAnchor> anchors, std::span<const PoseTarget> gts,
                            const OksParams& params) {
    SimilarityMatrix m(anchors.size(), gts.size());
    for (std::size_t g = 0; g < gts.size(); ++g) {
        const double s = gts[g].scale(params.scale_source);
        for (std::size_t a = 0; a < anchors.size(); ++a) {
            m(a, g) = oks(anchors[a].joints, gts[g].joints, gts[g].visibility, s, params);
        }
    }
    return m;
}

std::vector<LabelAssignment> assign(const SimilarityMatrix& sim, const Thresholds& thresholds,
                                    bool force_nearest) {
    thresholds.validate();
    const std::size_t na = sim.anchors();
    const std::size_t ng = sim.gts();

    // Per-gt best anchor.
    std::vector<std::size_t> best_anchor(ng, 0);
    for (std::size_t g = 0; g < ng && na > 0; ++g) {
        double best = sim(0, g);
        for (std::size_t a = 1; a < na; ++a) {
            if (sim(a, g) > best) {
                best = sim(a, g);
                best_anchor[g] = a;
            }
        }
    }
    // forced[a] lists gts for which anchor a is the designated best match.
    std::vector<std::vector<std::size_t>> forced(na);
    for (std::size_t g = 0; g < ng && na > 0; ++g) {
        const std::size_t a = best_anchor[g];
        if (force_nearest || sim(a, g) >= thresholds.lo) forced[a].push_back(g);
    }

    std::vector<LabelAssignment> out(na);
    for (std::size_t a = 0; a < na; ++a) {
        double best_any = 0.0;
        int best_gt = LabelAssignment::kNoGt;
        double best_q = -1.0;
        for (std::size_t g = 0; g < ng; ++g) {
            const double s = sim(a, g);
            best_any = std::max(best_any, s);
            const bool qualifies =
                s >= thresholds.hi ||
                std::find(forced[a].begin(), forced[a].end(), g) != forced[a].end();
            if (qualifies && s > best_q) {
                best_q = s;
                best_gt = static_cast<int>(g);
            }
        }
        auto& lab = out[a];
        if (best_gt != LabelAssignment::kNoGt) {
            lab.label = Label::Positive;
            lab.gt_index = best_gt;
            lab.similarity = best_q;
        } else {
            lab.label = best_any < thresholds.lo ? Label::Negative : Label::Ignore;
            lab.similarity = best_any;
        }
    }
    return out;
}

std::vector<PoseAnchor> refine_pose_anchors(std::span<const std::vector<Point2>> predictions) {
    std::vector<PoseAnchor> out;
    out.reserve(predictions.size());
    for (const auto& pred : predictions) {
        if (pred.size() != kNumJoints) {
            throw Error(ErrorKind::JointCountMismatch,
                        "stage-1 prediction has " + std::to_string(pred.size()) +
                            " joints, expected 17");
        }
        PoseAnchor a;
        std::copy(pred.begin(), pred.end(), a.joints.begin());
        a.mode_id = PoseAnchor::kRefinedMode;
        a.scale = 1.0;
        a.rotation_deg = 0.0;
        out.push_back(a);
    }
    return out;
}

}  // namespace psa
