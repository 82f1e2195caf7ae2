#include "psa/targets.hpp"

#include <charconv>
#include <ostream>

#include <nlohmann/json.hpp>

namespace psa {

std::string format_number(double v) {
    if (v == 0.0) return "0";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::vector<NormalizedPose> record_poses(const std::vector<InstanceRecord>& records) {
    std::vector<NormalizedPose> out;
    for (const auto& r : records) {
        if (!r.keypoints || r.bbox.degenerate()) continue;
        if (r.keypoints->visible_count() < 2) continue;
        out.push_back(normalize_pose(r.keypoints->joints, r.keypoints->visibility, r.bbox));
    }
    return out;
}

PoseModes cluster_record_poses(const std::vector<InstanceRecord>& records, std::size_t k,
                               std::uint64_t seed) {
    const auto poses = record_poses(records);
    return kmeans_poses(poses, k, seed);
}

std::vector<Joints> resolve_canonical_poses(const TargetConfig& config,
                                            const std::vector<InstanceRecord>& records) {
    if (config.modes_path) return load_pose_modes(*config.modes_path).modes;
    return cluster_record_poses(records, config.num_modes, config.seed).modes;
}

namespace {

struct FlatAnchor {
    std::size_t level;
    std::size_t row;
    std::size_t col;
    std::size_t index;
    double stride;
    const MaskAnchor* mask = nullptr;
    const PoseAnchor* pose = nullptr;
};

std::vector<FlatAnchor> flatten(const AnchorGrid& grid) {
    std::vector<FlatAnchor> out;
    out.reserve(grid.total_anchors());
    for (std::size_t l = 0; l < grid.levels.size(); ++l) {
        const auto& level = grid.levels[l];
        for (const auto& loc : level.locations) {
            for (std::size_t i = 0; i < loc.masks.size(); ++i) {
                out.push_back({l, loc.row, loc.col, i, level.stride, &loc.masks[i], nullptr});
            }
            for (std::size_t i = 0; i < loc.poses.size(); ++i) {
                out.push_back({l, loc.row, loc.col, i, level.stride, nullptr, &loc.poses[i]});
            }
        }
    }
    return out;
}

std::vector<Point2> scaled(const std::vector<Point2>& v, double inv) {
    std::vector<Point2> out;
    out.reserve(v.size());
    for (const auto& p : v) out.push_back(p * inv);
    return out;
}

}  // namespace

std::vector<AnchorTarget> image_targets(const std::vector<const InstanceRecord*>& records,
                                        std::size_t image_width, std::size_t image_height,
                                        const TargetConfig& config,
                                        const std::vector<Joints>& canonical_poses,
                                        std::size_t* skipped) {
    const bool pose_task = config.task == Task::Pose;
    const AnchorGrid grid =
        generate_grid(config.pyramid, image_width, image_height,
                      pose_task ? AnchorKind::Pose : AnchorKind::Mask, canonical_poses);
    const auto anchors = flatten(grid);

    std::vector<const InstanceRecord*> gts;
    for (const auto* r : records) {
        const bool usable = pose_task ? r->keypoints && r->keypoints->visible_count() > 0
                                      : r->primary_contour() != nullptr;
        if (usable) {
            gts.push_back(r);
        } else if (skipped) {
            ++*skipped;
        }
    }

    SimilarityMatrix sim(anchors.size(), gts.size());
    for (std::size_t a = 0; a < anchors.size(); ++a) {
        for (std::size_t g = 0; g < gts.size(); ++g) {
            sim(a, g) = pose_task ? oks(*anchors[a].pose, *gts[g]->keypoints, config.oks)
                                  : box_iou(anchors[a].mask->implicit_box, gts[g]->bbox);
        }
    }
    const auto labels = assign(sim, config.thresholds, config.force_nearest);

    std::vector<AnchorTarget> out;
    out.reserve(anchors.size());
    for (std::size_t a = 0; a < anchors.size(); ++a) {
        const auto& fa = anchors[a];
        AnchorTarget t;
        t.image_id = records.empty() ? 0 : records.front()->image_id;
        t.level = fa.level;
        t.row = fa.row;
        t.col = fa.col;
        t.anchor = fa.index;
        t.label = labels[a].label;
        t.similarity = labels[a].similarity;
        if (t.label == Label::Positive) {
            const InstanceRecord& gt = *gts[static_cast<std::size_t>(labels[a].gt_index)];
            t.gt_annotation_id = gt.annotation_id;
            const double inv = 1.0 / fa.stride;
            try {
                MatchResult m =
                    pose_task ? match_pose(*fa.pose, gt.keypoints->joints,
                                           gt.keypoints->visibility)
                              : match_mask(*fa.mask, *gt.primary_contour(), config.strategy);
                t.valid = std::move(m.valid);
                t.offsets = scaled(m.offsets, inv);
            } catch (const Error& e) {
                throw Error(e.kind(), "image " + std::to_string(t.image_id) + " level " +
                                          std::to_string(fa.level) + " anchor (" +
                                          std::to_string(fa.row) + "," + std::to_string(fa.col) +
                                          "," + std::to_string(fa.index) + "): " + e.what());
            }
            if (!pose_task) {
                auto b = encode_box_targets(*fa.mask, gt.bbox);
                for (double& v : b) v *= inv;
                t.box_offsets = b;
            }
        }
        out.push_back(std::move(t));
    }
    return out;
}

std::string targets_header(const TargetConfig& config, std::size_t num_modes) {
    std::string h = "# psa-targets v1 task=" + std::string(to_string(config.task)) +
                    " strategy=" + std::string(to_string(config.strategy));
    h += " num_points=" + std::to_string(config.task == Task::Pose ? kNumJoints
                                                                   : config.pyramid.num_points);
    h += " levels=";
    for (std::size_t i = 0; i < config.pyramid.levels.size(); ++i) {
        if (i) h += ',';
        h += format_number(config.pyramid.levels[i].stride) + "/" +
             format_number(config.pyramid.levels[i].base_scale);
    }
    h += " anchors_per_location=" +
         std::to_string(config.task == Task::Pose
                            ? config.pyramid.pose_anchors_per_location(num_modes)
                            : config.pyramid.mask_anchors_per_location());
    h += " hi=" + format_number(config.thresholds.hi) +
         " lo=" + format_number(config.thresholds.lo) +
         " force_nearest=" + (config.force_nearest ? "1" : "0");
    h += " fields=image,level,row,col,anchor,label,gt,similarity,valid,offsets,box";
    return h;
}

std::string format_target_line(const AnchorTarget& t) {
    std::string s = std::to_string(t.image_id) + ' ' + std::to_string(t.level) + ' ' +
                    std::to_string(t.row) + ' ' + std::to_string(t.col) + ' ' +
                    std::to_string(t.anchor) + ' ' + std::to_string(static_cast<int>(t.label)) +
                    ' ';
    s += t.gt_annotation_id ? std::to_string(*t.gt_annotation_id) : "-";
    s += ' ' + format_number(t.similarity) + ' ';
    if (t.valid.empty()) {
        s += "- -";
    } else {
        for (bool v : t.valid) s += v ? '1' : '0';
        s += ' ';
        for (std::size_t i = 0; i < t.offsets.size(); ++i) {
            if (i) s += ';';
            s += format_number(t.offsets[i].x) + ',' + format_number(t.offsets[i].y);
        }
    }
    s += ' ';
    if (t.box_offsets) {
        const auto& b = *t.box_offsets;
        s += format_number(b[0]) + ',' + format_number(b[1]) + ',' + format_number(b[2]) + ',' +
             format_number(b[3]);
    } else {
        s += '-';
    }
    return s;
}

TargetSummary emit_targets(const std::vector<InstanceRecord>& records,
                           const TargetConfig& config, std::ostream& out) {
    config.validate();
    std::vector<Joints> canonical;
    if (config.task == Task::Pose) canonical = resolve_canonical_poses(config, records);

    out << targets_header(config, canonical.size()) << '\n';
    TargetSummary summary;
    for (const auto& group : group_by_image(records)) {
        const InstanceRecord& first = *group.front();
        std::size_t skipped = 0;
        const auto targets = image_targets(group, first.image_width, first.image_height, config,
                                           canonical, &skipped);
        ++summary.images;
        summary.gts += group.size() - skipped;
        summary.skipped_records += skipped;
        for (const auto& t : targets) {
            ++summary.anchors;
            switch (t.label) {
                case Label::Positive: ++summary.positives; break;
                case Label::Negative: ++summary.negatives; break;
                case Label::Ignore: ++summary.ignored; break;
            }
            for (bool v : t.valid) summary.valid_points += v ? 1 : 0;
            out << format_target_line(t) << '\n';
        }
    }
    return summary;
}

std::string summary_to_json(const TargetSummary& s) {
    nlohmann::ordered_json doc;
    doc["images"] = s.images;
    doc["gts"] = s.gts;
    doc["anchors"] = s.anchors;
    doc["positives"] = s.positives;
    doc["negatives"] = s.negatives;
    doc["ignored"] = s.ignored;
    doc["valid_points"] = s.valid_points;
    doc["skipped_records"] = s.skipped_records;
    return doc.dump(2) + "\n";
}

}  // namespace psa
