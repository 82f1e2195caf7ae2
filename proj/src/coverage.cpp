#include "psa/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include <nlohmann/json.hpp>

#include "psa/targets.hpp"

namespace psa {

std::string_view to_string(Similarity similarity) {
    return similarity == Similarity::Iou ? "iou" : "oks";
}

std::optional<Similarity> parse_similarity(std::string_view name) {
    if (name == "iou") return Similarity::Iou;
    if (name == "oks") return Similarity::Oks;
    return std::nullopt;
}

namespace {

// OKS upper bound for any anchor whose joints lie within `radius` of `center`.
double oks_upper_bound(const PoseTarget& gt, Point2 center, double radius, double scale,
                       const OksParams& params) {
    double sum = 0.0;
    std::size_t visible = 0;
    for (std::size_t j = 0; j < kNumJoints; ++j) {
        if (gt.visibility[j] <= 0) continue;
        const double d = std::max(0.0, distance(gt.joints[j], center) - radius);
        const double k = params.kappas[j];
        sum += std::exp(-d * d / (2.0 * scale * k * k));
        ++visible;
    }
    return sum / static_cast<double>(visible);
}

struct PoseLayout {
    struct Loc {
        const AnchorLocation* loc;
        std::size_t first;
        double radius;
    };
    AnchorGrid grid;
    std::vector<Loc> locs;
    std::vector<const PoseAnchor*> anchors;
};

PoseLayout make_pose_layout(AnchorGrid grid) {
    PoseLayout out;
    out.grid = std::move(grid);
    for (const auto& level : out.grid.levels) {
        for (const auto& loc : level.locations) {
            double r = 0.0;
            for (const auto& a : loc.poses) {
                for (const auto& p : a.joints) r = std::max(r, distance(p, loc.center));
            }
            out.locs.push_back({&loc, out.anchors.size(), r * (1.0 + 1e-9) + 1e-9});
            for (const auto& a : loc.poses) out.anchors.push_back(&a);
        }
    }
    return out;
}

// Exact wherever it can matter: every similarity that reaches `lo` and
// every candidate for a gt's best anchor. Entries skipped by the bound are
// left at 0 and are known to lie below both.
std::vector<double> pose_image_similarity(const PoseLayout& layout,
                                          const std::vector<const PoseTarget*>& gts,
                                          const OksParams& params, double lo,
                                          SimilarityMatrix& sim) {
    sim = SimilarityMatrix(layout.anchors.size(), gts.size());
    std::vector<double> best(gts.size(), 0.0);
    std::vector<std::pair<double, std::size_t>> order(layout.locs.size());
    for (std::size_t g = 0; g < gts.size(); ++g) {
        const PoseTarget& gt = *gts[g];
        const double scale = gt.scale(params.scale_source);
        for (std::size_t i = 0; i < layout.locs.size(); ++i) {
            const auto& l = layout.locs[i];
            order[i] = {oks_upper_bound(gt, l.loc->center, l.radius, scale, params), i};
        }
        std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
            return a.first > b.first || (a.first == b.first && a.second < b.second);
        });
        bool any = false;
        for (const auto& [bound, i] : order) {
            if (any && bound < lo && bound < best[g]) break;
            const auto& l = layout.locs[i];
            for (std::size_t k = 0; k < l.loc->poses.size(); ++k) {
                const double s = oks(l.loc->poses[k], gt, params);
                sim(l.first + k, g) = s;
                if (!any || s > best[g]) best[g] = s;
                any = true;
            }
        }
    }
    return best;
}

std::vector<double> mask_image_similarity(const AnchorGrid& grid, const std::vector<Box>& gts,
                                          SimilarityMatrix& sim) {
    std::vector<const MaskAnchor*> anchors;
    for (const auto& level : grid.levels) {
        for (const auto& loc : level.locations) {
            for (const auto& a : loc.masks) anchors.push_back(&a);
        }
    }
    sim = SimilarityMatrix(anchors.size(), gts.size());
    std::vector<double> best(gts.size(), 0.0);
    for (std::size_t a = 0; a < anchors.size(); ++a) {
        for (std::size_t g = 0; g < gts.size(); ++g) {
            sim(a, g) = box_iou(anchors[a]->implicit_box, gts[g]);
            best[g] = std::max(best[g], sim(a, g));
        }
    }
    return best;
}

}  // namespace

std::vector<CoverageReport> coverage_report(const std::vector<InstanceRecord>& records,
                                            std::span<const AnchorSetConfig> configs,
                                            Similarity similarity, double threshold,
                                            const OksParams& oks_params, double lo) {
    const bool pose = similarity == Similarity::Oks;
    const Thresholds thresholds{threshold, std::min(lo, threshold)};
    thresholds.validate();

    std::size_t applicable = 0;
    for (const auto& r : records) {
        applicable += pose ? (r.keypoints && r.keypoints->visible_count() > 0)
                           : !r.bbox.degenerate();
    }
    if (applicable == 0) {
        throw Error(ErrorKind::NoApplicableRecords,
                    std::string("no records carry ") + (pose ? "keypoints" : "boxes"));
    }
    const auto groups = group_by_image(records);

    std::vector<CoverageReport> out;
    for (const auto& cfg : configs) {
        cfg.pyramid.validate();
        if (pose && cfg.canonical_poses.empty()) {
            throw Error(ErrorKind::MissingCanonicalPoses, "layout " + cfg.name + " has no poses");
        }
        CoverageReport rep;
        rep.config = cfg.name;
        rep.similarity = similarity;
        rep.threshold = threshold;
        rep.anchors_per_location = pose
            ? cfg.pyramid.pose_anchors_per_location(cfg.canonical_poses.size())
            : cfg.pyramid.mask_anchors_per_location();
        rep.histogram.assign(kHistogramBins, 0);

        std::map<std::pair<std::size_t, std::size_t>, PoseLayout> pose_layouts;
        std::map<std::pair<std::size_t, std::size_t>, AnchorGrid> mask_grids;
        for (const auto& group : groups) {
            const InstanceRecord& first = *group.front();
            const std::pair<std::size_t, std::size_t> size{first.image_width, first.image_height};
            SimilarityMatrix sim(0, 0);
            std::vector<double> best;
            if (pose) {
                std::vector<const PoseTarget*> gts;
                for (const auto* r : group) {
                    if (r->keypoints && r->keypoints->visible_count() > 0) {
                        gts.push_back(&*r->keypoints);
                    }
                }
                auto it = pose_layouts.find(size);
                if (it == pose_layouts.end()) {
                    it = pose_layouts
                             .emplace(size, make_pose_layout(generate_grid(
                                                cfg.pyramid, size.first, size.second,
                                                AnchorKind::Pose, cfg.canonical_poses)))
                             .first;
                }
                best = pose_image_similarity(it->second, gts, oks_params, thresholds.lo, sim);
            } else {
                std::vector<Box> gts;
                for (const auto* r : group) {
                    if (!r->bbox.degenerate()) gts.push_back(r->bbox);
                }
                auto it = mask_grids.find(size);
                if (it == mask_grids.end()) {
                    it = mask_grids
                             .emplace(size, generate_grid(cfg.pyramid, size.first, size.second,
                                                          AnchorKind::Mask))
                             .first;
                }
                best = mask_image_similarity(it->second, gts, sim);
            }
            for (double b : best) {
                ++rep.gts;
                if (b >= threshold) ++rep.matched;
                const auto bin = std::min(kHistogramBins - 1,
                                          static_cast<std::size_t>(b * kHistogramBins));
                ++rep.histogram[bin];
                rep.best_similarity.push_back(b);
            }
            for (const auto& lab : assign(sim, thresholds, true)) {
                if (lab.label == Label::Positive) ++rep.positives;
                if (lab.label == Label::Negative) ++rep.negatives;
            }
        }
        rep.matched_fraction =
            rep.gts ? static_cast<double>(rep.matched) / static_cast<double>(rep.gts) : 0.0;
        rep.pos_neg_ratio = rep.negatives
            ? static_cast<double>(rep.positives) / static_cast<double>(rep.negatives)
            : std::numeric_limits<double>::infinity();
        out.push_back(std::move(rep));
    }
    return out;
}

Joints rectangle_pose(const Joints& pose) {
    const Box b = bounding_box(pose);
    Joints out{};
    for (std::size_t j = 0; j < kNumJoints; ++j) {
        const Point2 p = pose[j];
        const double dl = p.x - b.x_min();
        const double dr = b.x_max() - p.x;
        const double dt = p.y - b.y_min();
        const double db = b.y_max() - p.y;
        const double m = std::min({dl, dr, dt, db});
        if (m == dl) {
            out[j] = {b.x_min(), p.y};
        } else if (m == dr) {
            out[j] = {b.x_max(), p.y};
        } else if (m == dt) {
            out[j] = {p.x, b.y_min()};
        } else {
            out[j] = {p.x, b.y_max()};
        }
    }
    return out;
}

std::vector<AnchorSetConfig> default_pose_coverage_configs(const std::vector<InstanceRecord>& records,
                                                           const PyramidConfig& base,
                                                           std::span<const std::size_t> ks,
                                                           std::uint64_t seed) {
    const auto poses = record_poses(records);
    const auto mean = kmeans_poses(poses, 1, seed).modes.front();
    std::vector<AnchorSetConfig> out;
    out.push_back({"center-point", base, {Joints{}}});
    out.push_back({"rectangle", base, {rectangle_pose(mean)}});
    out.push_back({"mean-pose", base, {mean}});
    for (std::size_t k : ks) {
        if (k <= 1) continue;
        out.push_back({"kmeans_" + std::to_string(k), base, kmeans_poses(poses, k, seed).modes});
    }
    return out;
}

std::vector<AnchorSetConfig> default_mask_coverage_configs(const PyramidConfig& base) {
    PyramidConfig single = base;
    single.octave_scales = {1.0};
    single.aspect_ratios = {1.0};
    return {{"single-box", single, {}}, {"octave-x-aspect", base, {}}};
}

namespace {

std::string fixed(double v, int digits) {
    if (std::isinf(v)) return "inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

}  // namespace

std::string format_coverage_table(const std::vector<CoverageReport>& reports) {
    const std::vector<std::string> head = {"config",  "anchors/loc", "gts",     "matched",
                                           "matched%", "pos",        "neg",     "pos/neg",
                                           "per-mille", "per-10k"};
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : reports) {
        rows.push_back({r.config, std::to_string(r.anchors_per_location), std::to_string(r.gts),
                        std::to_string(r.matched), fixed(100.0 * r.matched_fraction, 2),
                        std::to_string(r.positives), std::to_string(r.negatives),
                        fixed(r.pos_neg_ratio, 6), fixed(1e3 * r.pos_neg_ratio, 3),
                        fixed(1e4 * r.pos_neg_ratio, 2)});
    }
    std::vector<std::size_t> width(head.size());
    for (std::size_t c = 0; c < head.size(); ++c) {
        width[c] = head[c].size();
        for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
    }
    auto line = [&](const std::vector<std::string>& cells) {
        std::string s;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const std::string pad(width[c] - cells[c].size(), ' ');
            s += c == 0 ? cells[c] + pad : "  " + pad + cells[c];
        }
        return s + "\n";
    };
    std::string out;
    if (!reports.empty()) {
        out += "similarity=" + std::string(to_string(reports.front().similarity)) +
               " threshold=" + format_number(reports.front().threshold) + "\n";
    }
    out += line(head);
    for (const auto& row : rows) out += line(row);
    return out;
}

std::string coverage_to_json(const std::vector<CoverageReport>& reports) {
    nlohmann::ordered_json doc;
    doc["format"] = "psa-coverage";
    doc["version"] = 1;
    auto list = nlohmann::ordered_json::array();
    for (const auto& r : reports) {
        nlohmann::ordered_json j;
        j["config"] = r.config;
        j["similarity"] = std::string(to_string(r.similarity));
        j["threshold"] = r.threshold;
        j["anchors_per_location"] = r.anchors_per_location;
        j["gts"] = r.gts;
        j["matched"] = r.matched;
        j["matched_gt_fraction"] = r.matched_fraction;
        j["positives"] = r.positives;
        j["negatives"] = r.negatives;
        if (std::isinf(r.pos_neg_ratio)) {
            j["pos_neg_ratio"] = nullptr;
            j["pos_neg_per_mille"] = nullptr;
            j["pos_neg_per_ten_thousand"] = nullptr;
        } else {
            j["pos_neg_ratio"] = r.pos_neg_ratio;
            j["pos_neg_per_mille"] = 1e3 * r.pos_neg_ratio;
            j["pos_neg_per_ten_thousand"] = 1e4 * r.pos_neg_ratio;
        }
        auto edges = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i <= kHistogramBins; ++i) {
            edges.push_back(static_cast<double>(i) / static_cast<double>(kHistogramBins));
        }
        j["histogram"] = {{"edges", edges}, {"counts", r.histogram}};
        list.push_back(std::move(j));
    }
    doc["reports"] = std::move(list);
    return doc.dump(2) + "\n";
}

}  // namespace psa
