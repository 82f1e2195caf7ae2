#include "psa/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "rng.hpp"

namespace psa {

using nlohmann::json;
using nlohmann::ordered_json;

const Contour* InstanceRecord::primary_contour() const {
    const Contour* best = nullptr;
    for (const auto& c : segmentation) {
        if (!best || c.area() > best->area()) best = &c;
    }
    return best;
}

namespace {

[[noreturn]] void malformed(const std::string& where, const std::string& what) {
    throw Error(ErrorKind::MalformedDocument, where + ": " + what);
}

std::size_t line_of_offset(const std::string& text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

double number_at(const json& arr, std::size_t i, const std::string& where) {
    if (i >= arr.size() || !arr[i].is_number()) {
        malformed(where + "[" + std::to_string(i) + "]", "expected a number");
    }
    const double v = arr[i].get<double>();
    if (!std::isfinite(v)) malformed(where + "[" + std::to_string(i) + "]", "not finite");
    return v;
}

std::int64_t integer_field(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || !obj[key].is_number_integer()) {
        malformed(where + "." + key, "expected an integer");
    }
    return obj[key].get<std::int64_t>();
}

struct ImageEntry {
    std::size_t width = 0;
    std::size_t height = 0;
};

bool outside(Point2 p, const ImageEntry& img) {
    return p.x < 0.0 || p.y < 0.0 || p.x > static_cast<double>(img.width) ||
           p.y > static_cast<double>(img.height);
}

}  // namespace

ParseResult parse_annotations_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::MalformedDocument,
                    "line " + std::to_string(line_of_offset(text, e.byte)) + ": " + e.what());
    }
    if (!doc.is_object()) malformed("document", "expected a JSON object");
    if (!doc.contains("images") || !doc["images"].is_array()) {
        malformed("images", "missing or not an array");
    }
    if (!doc.contains("annotations") || !doc["annotations"].is_array()) {
        malformed("annotations", "missing or not an array");
    }

    std::unordered_map<std::int64_t, ImageEntry> images;
    for (std::size_t i = 0; i < doc["images"].size(); ++i) {
        const auto& im = doc["images"][i];
        const std::string where = "images[" + std::to_string(i) + "]";
        if (!im.is_object()) malformed(where, "expected an object");
        const auto id = integer_field(im, "id", where);
        const auto w = integer_field(im, "width", where);
        const auto h = integer_field(im, "height", where);
        if (w <= 0 || h <= 0) malformed(where, "image size must be positive");
        images[id] = {static_cast<std::size_t>(w), static_cast<std::size_t>(h)};
    }

    ParseResult out;
    const auto& anns = doc["annotations"];
    for (std::size_t i = 0; i < anns.size(); ++i) {
        const auto& ann = anns[i];
        const std::string where = "annotations[" + std::to_string(i) + "]";
        if (!ann.is_object()) malformed(where, "expected an object");

        InstanceRecord rec;
        rec.annotation_id = ann.contains("id") ? integer_field(ann, "id", where)
                                               : static_cast<std::int64_t>(i + 1);
        rec.image_id = integer_field(ann, "image_id", where);
        const auto img_it = images.find(rec.image_id);
        if (img_it == images.end()) {
            malformed(where + ".image_id", "unknown image " + std::to_string(rec.image_id));
        }
        const ImageEntry& img = img_it->second;
        rec.image_width = img.width;
        rec.image_height = img.height;
        if (ann.contains("category_id")) {
            rec.class_id = static_cast<int>(integer_field(ann, "category_id", where));
        }

        const bool crowd = ann.value("iscrowd", 0) != 0;
        const bool has_seg = ann.contains("segmentation") && !ann["segmentation"].is_null();
        if (has_seg && (ann["segmentation"].is_object() || crowd)) {
            ++out.rle_rejected;
            out.warnings.push_back(where + ": RLE/crowd segmentation rejected");
            continue;
        }

        if (has_seg) {
            const auto& seg = ann["segmentation"];
            if (!seg.is_array()) malformed(where + ".segmentation", "expected a polygon list");
            for (std::size_t p = 0; p < seg.size(); ++p) {
                const std::string pw = where + ".segmentation[" + std::to_string(p) + "]";
                if (!seg[p].is_array()) malformed(pw, "expected a flat coordinate list");
                if (seg[p].size() % 2 != 0) malformed(pw, "odd number of coordinates");
                std::vector<Point2> verts;
                for (std::size_t k = 0; k + 1 < seg[p].size(); k += 2) {
                    verts.push_back({number_at(seg[p], k, pw), number_at(seg[p], k + 1, pw)});
                }
                if (verts.size() < 3) {
                    ++out.polygons_dropped;
                    out.warnings.push_back(pw + ": polygon with fewer than 3 points dropped");
                    continue;
                }
                try {
                    rec.segmentation.emplace_back(std::move(verts));
                } catch (const Error& e) {
                    ++out.polygons_dropped;
                    out.warnings.push_back(pw + ": polygon dropped (" + e.what() + ")");
                }
            }
        }

        if (ann.contains("keypoints") && !ann["keypoints"].is_null()) {
            const auto& kp = ann["keypoints"];
            const std::string kw = where + ".keypoints";
            if (!kp.is_array() || kp.size() != 3 * kNumJoints) {
                throw Error(ErrorKind::JointCountMismatch, kw + ": expected 51 values");
            }
            PoseTarget pose;
            for (std::size_t j = 0; j < kNumJoints; ++j) {
                pose.joints[j] = {number_at(kp, 3 * j, kw), number_at(kp, 3 * j + 1, kw)};
                pose.visibility[j] = static_cast<int>(number_at(kp, 3 * j + 2, kw));
            }
            if (pose.visible_count() > 0) rec.keypoints = pose;
        }

        std::optional<Box> bbox;
        if (ann.contains("bbox") && !ann["bbox"].is_null()) {
            const auto& b = ann["bbox"];
            const std::string bw = where + ".bbox";
            if (!b.is_array() || b.size() != 4) malformed(bw, "expected [x, y, w, h]");
            const double w = number_at(b, 2, bw);
            const double h = number_at(b, 3, bw);
            if (w < 0.0 || h < 0.0) malformed(bw, "negative width or height");
            bbox = Box::from_xywh(number_at(b, 0, bw), number_at(b, 1, bw), w, h);
        }
        if (ann.contains("area") && ann["area"].is_number()) rec.area = ann["area"].get<double>();

        if (!bbox && rec.segmentation.empty() && !rec.keypoints) {
            out.warnings.push_back(where + ": no usable bbox, polygon or keypoints; skipped");
            continue;
        }
        if (bbox) {
            rec.bbox = *bbox;
        } else if (const Contour* c = rec.primary_contour()) {
            rec.bbox = c->bounds();
        } else {
            std::vector<Point2> vis;
            for (std::size_t j = 0; j < kNumJoints; ++j) {
                if (rec.keypoints->visibility[j] > 0) vis.push_back(rec.keypoints->joints[j]);
            }
            rec.bbox = bounding_box(vis);
        }
        if (rec.keypoints) {
            rec.keypoints->box = rec.bbox;
            rec.keypoints->segment_area = rec.area;
        }

        for (const auto& c : rec.segmentation) {
            for (const auto& v : c.vertices()) rec.out_of_bounds |= outside(v, img);
        }
        if (rec.keypoints) {
            for (std::size_t j = 0; j < kNumJoints; ++j) {
                if (rec.keypoints->visibility[j] > 0) {
                    rec.out_of_bounds |= outside(rec.keypoints->joints[j], img);
                }
            }
        }
        rec.out_of_bounds |= outside({rec.bbox.x_min(), rec.bbox.y_min()}, img) ||
                             outside({rec.bbox.x_max(), rec.bbox.y_max()}, img);
        if (rec.out_of_bounds) out.warnings.push_back(where + ": coordinates outside the image");

        out.records.push_back(std::move(rec));
    }
    return out;
}

ParseResult parse_annotations(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::FileNotFound, path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_annotations_text(ss.str());
}

std::string records_to_coco_json(const std::vector<InstanceRecord>& records) {
    ordered_json doc;
    auto& images = doc["images"] = ordered_json::array();
    std::map<std::int64_t, bool> seen;
    bool any_pose = false;
    for (const auto& r : records) {
        any_pose |= r.keypoints.has_value();
        if (seen.emplace(r.image_id, true).second) {
            ordered_json im;
            im["id"] = r.image_id;
            im["width"] = r.image_width;
            im["height"] = r.image_height;
            im["file_name"] = "image_" + std::to_string(r.image_id) + ".png";
            images.push_back(std::move(im));
        }
    }

    auto& anns = doc["annotations"] = ordered_json::array();
    for (const auto& r : records) {
        ordered_json a;
        a["id"] = r.annotation_id;
        a["image_id"] = r.image_id;
        a["category_id"] = r.class_id;
        a["iscrowd"] = 0;
        a["bbox"] = {r.bbox.x_min(), r.bbox.y_min(), r.bbox.width(), r.bbox.height()};
        if (r.area) a["area"] = *r.area;
        if (!r.segmentation.empty()) {
            auto seg = ordered_json::array();
            for (const auto& c : r.segmentation) {
                auto flat = ordered_json::array();
                for (const auto& v : c.vertices()) {
                    flat.push_back(v.x);
                    flat.push_back(v.y);
                }
                seg.push_back(std::move(flat));
            }
            a["segmentation"] = std::move(seg);
        }
        if (r.keypoints) {
            auto kp = ordered_json::array();
            for (std::size_t j = 0; j < kNumJoints; ++j) {
                kp.push_back(r.keypoints->joints[j].x);
                kp.push_back(r.keypoints->joints[j].y);
                kp.push_back(r.keypoints->visibility[j]);
            }
            a["keypoints"] = std::move(kp);
            a["num_keypoints"] = r.keypoints->visible_count();
        }
        anns.push_back(std::move(a));
    }

    ordered_json cat;
    cat["id"] = 1;
    cat["name"] = any_pose ? "person" : "object";
    if (any_pose) {
        cat["keypoints"] = {"nose",        "left_eye",       "right_eye",  "left_ear",
                            "right_ear",   "left_shoulder",  "right_shoulder",
                            "left_elbow",  "right_elbow",    "left_wrist", "right_wrist",
                            "left_hip",    "right_hip",      "left_knee",  "right_knee",
                            "left_ankle",  "right_ankle"};
    }
    doc["categories"] = ordered_json::array({cat});
    return doc.dump(1) + "\n";
}

void write_coco(const std::vector<InstanceRecord>& records, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::Io, "cannot write " + path.string());
    f << records_to_coco_json(records);
}

namespace {

// Limb angles in degrees from straight down, positive away from the body
// midline: upper arm, forearm, thigh, shin for the left then right side.
struct BodyAngles {
    double l_upper, l_fore, r_upper, r_fore;
    double l_thigh, l_shin, r_thigh, r_shin;
};

constexpr BodyAngles kStanding{8, 5, 8, 5, 3, 0, 3, 0};
constexpr std::array<BodyAngles, 5> kBodyPoses = {{
    kStanding,
    {165, 170, 165, 170, 3, 0, 3, 0},  // arms raised
    {90, 90, 90, 90, 5, 2, 5, 2},      // arms out
    {45, 60, 45, 60, 22, 18, 22, 18},  // wide stance
    {150, 170, 8, 5, 3, 0, 3, 0},      // one arm up
}};

struct BoneLengths {
    double upper_arm = 0.16;
    double forearm = 0.14;
    double thigh = 0.24;
    double shin = 0.24;
};

Point2 limb(Point2 from, double side, double angle_deg, double length) {
    const double a = angle_deg * std::numbers::pi / 180.0;
    return {from.x + side * std::sin(a) * length, from.y + std::cos(a) * length};
}

// COCO joint order; +x is the person's left (facing the camera).
Joints build_body(const BodyAngles& a, const BoneLengths& b) {
    Joints j{};
    j[0] = {0.0, -0.40};
    j[1] = {0.03, -0.42};
    j[2] = {-0.03, -0.42};
    j[3] = {0.06, -0.40};
    j[4] = {-0.06, -0.40};
    j[5] = {0.11, -0.30};
    j[6] = {-0.11, -0.30};
    j[7] = limb(j[5], 1.0, a.l_upper, b.upper_arm);
    j[8] = limb(j[6], -1.0, a.r_upper, b.upper_arm);
    j[9] = limb(j[7], 1.0, a.l_fore, b.forearm);
    j[10] = limb(j[8], -1.0, a.r_fore, b.forearm);
    j[11] = {0.07, 0.0};
    j[12] = {-0.07, 0.0};
    j[13] = limb(j[11], 1.0, a.l_thigh, b.thigh);
    j[14] = limb(j[12], -1.0, a.r_thigh, b.thigh);
    j[15] = limb(j[13], 1.0, a.l_shin, b.shin);
    j[16] = limb(j[14], -1.0, a.r_shin, b.shin);
    return j;
}

// Centers on the joint bounding box and scales to unit height.
Joints to_unit_frame(const Joints& j) {
    const Box b = bounding_box(j);
    const Point2 c = b.center();
    const double inv = 1.0 / b.height();
    Joints out{};
    for (std::size_t i = 0; i < kNumJoints; ++i) out[i] = (j[i] - c) * inv;
    return out;
}

Contour random_polygon(detail::Rng& rng, const SynthParams& p, bool convex) {
    const std::size_t lo = std::max<std::size_t>(3, p.min_vertices);
    const std::size_t hi = std::max(lo, p.max_vertices);
    const std::size_t m = lo + rng.index(hi - lo + 1);
    const double size = rng.log_uniform(p.min_size, p.max_size);
    const double aspect = rng.log_uniform(1.0 / p.max_aspect, p.max_aspect);
    const double rx = 0.5 * size * std::sqrt(aspect);
    const double ry = 0.5 * size / std::sqrt(aspect);
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double tilt = rng.uniform(0.0, std::numbers::pi);

    std::vector<Point2> local;
    local.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double t = (static_cast<double>(i) + 0.8 * rng.uniform()) / static_cast<double>(m);
        const double theta = phase + 2.0 * std::numbers::pi * t;
        const double r = convex ? 1.0 : rng.uniform(p.star_min_radius, 1.0);
        const Point2 e{rx * r * std::cos(theta), ry * r * std::sin(theta)};
        local.push_back({e.x * std::cos(tilt) - e.y * std::sin(tilt),
                         e.x * std::sin(tilt) + e.y * std::cos(tilt)});
    }
    const Box b = bounding_box(local);
    const double w = static_cast<double>(p.image_width);
    const double h = static_cast<double>(p.image_height);
    const double cx = b.width() < w ? rng.uniform(-b.x_min(), w - b.x_max()) : 0.5 * w;
    const double cy = b.height() < h ? rng.uniform(-b.y_min(), h - b.y_max()) : 0.5 * h;
    for (auto& v : local) v = v + Point2{cx, cy};
    return Contour(std::move(local));
}

PoseTarget random_pose(detail::Rng& rng, const SynthParams& p) {
    const double art = std::clamp(p.articulation, 0.0, 1.0);
    Joints unit = builtin_skeleton();
    if (art > 0.0) {
        BodyAngles a = kBodyPoses[rng.index(kBodyPoses.size())];
        const double sd = 12.0 * art;
        for (double* v : {&a.l_upper, &a.l_fore, &a.r_upper, &a.r_fore, &a.l_thigh, &a.l_shin,
                          &a.r_thigh, &a.r_shin}) {
            *v += sd * rng.normal();
        }
        BoneLengths bones;
        for (double* v : {&bones.upper_arm, &bones.forearm, &bones.thigh, &bones.shin}) {
            *v *= 1.0 + 0.06 * art * rng.normal();
        }
        unit = to_unit_frame(build_body(a, bones));
    }

    const double height = rng.log_uniform(p.min_height, p.max_height);
    const double rot = rng.uniform(-p.max_rotation_deg, p.max_rotation_deg);
    std::vector<Point2> pts(unit.begin(), unit.end());
    for (auto& q : pts) q = q * height;
    pts = transform_points(pts, {0.0, 0.0}, rot, 1.0);
    const double pad = 0.05 * height;
    const double margin = pad + 3.0 * p.jitter * height;
    const Box raw = bounding_box(pts);
    const Box b(raw.x_min() - margin, raw.y_min() - margin, raw.x_max() + margin,
                raw.y_max() + margin);
    const double w = static_cast<double>(p.image_width);
    const double h = static_cast<double>(p.image_height);
    const double cx = b.width() < w ? rng.uniform(-b.x_min(), w - b.x_max()) : 0.5 * w;
    const double cy = b.height() < h ? rng.uniform(-b.y_min(), h - b.y_max()) : 0.5 * h;

    PoseTarget pose;
    for (std::size_t j = 0; j < kNumJoints; ++j) {
        Point2 q = pts[j] + Point2{cx, cy};
        if (p.jitter > 0.0) {
            q = q + Point2{rng.normal(), rng.normal()} * (p.jitter * height);
        }
        pose.joints[j] = q;
        pose.visibility[j] = 2;
    }
    if (p.dropout > 0.0) {
        for (std::size_t j = 0; j < kNumJoints; ++j) {
            if (rng.bernoulli(p.dropout)) {
                pose.visibility[j] = 0;
                pose.joints[j] = {0.0, 0.0};
            }
        }
    }
    std::vector<Point2> vis;
    for (std::size_t j = 0; j < kNumJoints; ++j) {
        if (pose.visibility[j] > 0) vis.push_back(pose.joints[j]);
    }
    if (vis.empty()) vis.push_back(Point2{cx, cy});
    const Box jb = bounding_box(vis);
    pose.box = Box(jb.x_min() - pad, jb.y_min() - pad, jb.x_max() + pad, jb.y_max() + pad);
    return pose;
}

}  // namespace

const Joints& builtin_skeleton() {
    static const Joints skeleton = to_unit_frame(build_body(kStanding, BoneLengths{}));
    return skeleton;
}

std::vector<InstanceRecord> generate_synthetic_corpus(const SynthParams& params) {
    if (params.count == 0) throw Error(ErrorKind::InvalidArgument, "corpus count must be >= 1");
    if (params.image_width == 0 || params.image_height == 0) {
        throw Error(ErrorKind::InvalidArgument, "image size must be positive");
    }
    detail::Rng rng(params.seed);
    const std::size_t per_image = std::max<std::size_t>(1, params.instances_per_image);
    std::vector<InstanceRecord> out;
    out.reserve(params.count);
    for (std::size_t i = 0; i < params.count; ++i) {
        InstanceRecord rec;
        rec.annotation_id = static_cast<std::int64_t>(i + 1);
        rec.image_id = static_cast<std::int64_t>(i / per_image + 1);
        rec.image_width = params.image_width;
        rec.image_height = params.image_height;
        rec.class_id = 1;
        if (params.kind == SynthKind::Contours) {
            const bool convex = params.convex_only || rng.bernoulli(0.5);
            rec.segmentation.push_back(random_polygon(rng, params, convex));
            rec.bbox = rec.segmentation.front().bounds();
            rec.area = rec.segmentation.front().area();
        } else {
            auto pose = random_pose(rng, params);
            rec.bbox = pose.box;
            rec.keypoints = pose;
        }
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<std::vector<const InstanceRecord*>> group_by_image(
    const std::vector<InstanceRecord>& records) {
    std::vector<std::vector<const InstanceRecord*>> groups;
    std::unordered_map<std::int64_t, std::size_t> index;
    for (const auto& r : records) {
        auto [it, inserted] = index.emplace(r.image_id, groups.size());
        if (inserted) groups.emplace_back();
        groups[it->second].push_back(&r);
    }
    return groups;
}

}  // namespace psa
