#include "psa/posemodes.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rng.hpp"

namespace psa {

bool NormalizedPose::fully_visible() const {
    return std::all_of(valid.begin(), valid.end(), [](bool v) { return v; });
}

NormalizedPose normalize_pose(std::span<const Point2> joints, std::span<const int> visibility,
                              const Box& ref_box) {
    if (joints.size() != kNumJoints || visibility.size() != kNumJoints) {
        throw Error(ErrorKind::JointCountMismatch, "pose normalization needs 17 joints");
    }
    if (ref_box.degenerate()) {
        throw Error(ErrorKind::DegenerateBox, "pose reference box is degenerate");
    }
    const auto visible = std::count_if(visibility.begin(), visibility.end(),
                                       [](int v) { return v > 0; });
    if (visible < 2) {
        throw Error(ErrorKind::TooFewVisibleJoints, "pose normalization needs 2 visible joints");
    }
    const Point2 c = ref_box.center();
    const double inv = 1.0 / std::max(ref_box.width(), ref_box.height());
    NormalizedPose out;
    for (std::size_t j = 0; j < kNumJoints; ++j) {
        out.valid[j] = visibility[j] > 0;
        out.joints[j] = out.valid[j] ? (joints[j] - c) * inv : Point2{};
    }
    return out;
}

namespace {

using Vec = std::array<double, 2 * kNumJoints>;

Vec flatten(const Joints& j) {
    Vec v{};
    for (std::size_t i = 0; i < kNumJoints; ++i) {
        v[2 * i] = j[i].x;
        v[2 * i + 1] = j[i].y;
    }
    return v;
}

Joints unflatten(const Vec& v) {
    Joints j{};
    for (std::size_t i = 0; i < kNumJoints; ++i) j[i] = {v[2 * i], v[2 * i + 1]};
    return j;
}

double sq_dist(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

std::vector<Vec> plus_plus_seed(const std::vector<Vec>& pts, std::size_t k, detail::Rng& rng) {
    std::vector<Vec> centers;
    centers.reserve(k);
    centers.push_back(pts[rng.index(pts.size())]);
    std::vector<double> d2(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) d2[i] = sq_dist(pts[i], centers[0]);

    while (centers.size() < k) {
        double total = 0.0;
        for (double d : d2) total += d;
        std::size_t pick = 0;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double acc = 0.0;
            pick = pts.size() - 1;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                acc += d2[i];
                if (acc > target && d2[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = rng.index(pts.size());
        }
        centers.push_back(pts[pick]);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            d2[i] = std::min(d2[i], sq_dist(pts[i], centers.back()));
        }
    }
    return centers;
}

// Nearest center per point (lowest index on ties); returns the inertia.
double assign_points(const std::vector<Vec>& pts, const std::vector<Vec>& centers,
                     std::vector<std::size_t>& labels, std::vector<double>& dist) {
    double inertia = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        std::size_t best = 0;
        double best_d = sq_dist(pts[i], centers[0]);
        for (std::size_t c = 1; c < centers.size(); ++c) {
            const double d = sq_dist(pts[i], centers[c]);
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        labels[i] = best;
        dist[i] = best_d;
        inertia += best_d;
    }
    return inertia;
}

}  // namespace

PoseModes kmeans_poses(std::span<const NormalizedPose> poses, std::size_t k, std::uint64_t seed,
                       std::size_t max_iters) {
    if (k == 0) throw Error(ErrorKind::InvalidArgument, "k must be at least 1");
    std::vector<Vec> pts;
    for (const auto& p : poses) {
        if (p.fully_visible()) pts.push_back(flatten(p.joints));
    }
    if (pts.size() < k) {
        throw Error(ErrorKind::TooFewPoses, "k-means needs at least k fully visible poses, got " +
                                                std::to_string(pts.size()) + " for k=" +
                                                std::to_string(k));
    }

    detail::Rng rng(seed);
    auto centers = plus_plus_seed(pts, k, rng);
    std::vector<std::size_t> labels(pts.size(), 0);
    std::vector<std::size_t> previous;
    std::vector<double> dist(pts.size(), 0.0);

    PoseModes out;
    out.seed = seed;
    out.admitted = pts.size();
    bool converged = false;
    for (std::size_t it = 0; it < max_iters; ++it) {
        const double inertia = assign_points(pts, centers, labels, dist);
        out.inertia_history.push_back(inertia);
        out.iterations = it + 1;
        if (labels == previous) {
            converged = true;
            break;
        }
        previous = labels;

        std::vector<Vec> sums(k, Vec{});
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            auto& s = sums[labels[i]];
            for (std::size_t d = 0; d < s.size(); ++d) s[d] += pts[i][d];
            ++counts[labels[i]];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                std::size_t far = 0;
                for (std::size_t i = 1; i < pts.size(); ++i) {
                    if (dist[i] > dist[far]) far = i;
                }
                centers[c] = pts[far];
                dist[far] = 0.0;
                continue;
            }
            const double inv = 1.0 / static_cast<double>(counts[c]);
            for (std::size_t d = 0; d < sums[c].size(); ++d) centers[c][d] = sums[c][d] * inv;
        }
    }
    if (converged) {
        out.inertia = out.inertia_history.back();
    } else {
        out.inertia = assign_points(pts, centers, labels, dist);
        out.inertia_history.push_back(out.inertia);
    }
    out.modes.reserve(k);
    for (const auto& c : centers) out.modes.push_back(unflatten(c));
    return out;
}

std::string pose_modes_to_json(const PoseModes& modes) {
    nlohmann::ordered_json doc;
    doc["format"] = "psa-pose-modes";
    doc["version"] = 1;
    doc["k"] = modes.modes.size();
    doc["seed"] = modes.seed;
    doc["inertia"] = modes.inertia;
    doc["iterations"] = modes.iterations;
    doc["admitted"] = modes.admitted;
    auto& list = doc["modes"] = nlohmann::ordered_json::array();
    for (const auto& m : modes.modes) {
        auto joints = nlohmann::ordered_json::array();
        for (const auto& p : m) joints.push_back({p.x, p.y});
        list.push_back(std::move(joints));
    }
    return doc.dump(2) + "\n";
}

PoseModes pose_modes_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::MalformedDocument, std::string("pose modes: ") + e.what());
    }
    try {
        PoseModes out;
        out.seed = doc.value("seed", std::uint64_t{0});
        out.inertia = doc.value("inertia", 0.0);
        out.iterations = doc.value("iterations", std::size_t{0});
        out.admitted = doc.value("admitted", std::size_t{0});
        for (const auto& m : doc.at("modes")) {
            if (m.size() != kNumJoints) {
                throw Error(ErrorKind::JointCountMismatch, "pose mode must have 17 joints");
            }
            Joints j{};
            for (std::size_t i = 0; i < kNumJoints; ++i) {
                j[i] = {m[i].at(0).get<double>(), m[i].at(1).get<double>()};
            }
            out.modes.push_back(j);
        }
        if (doc.contains("k") && doc["k"].get<std::size_t>() != out.modes.size()) {
            throw Error(ErrorKind::MalformedDocument, "pose modes: k disagrees with mode count");
        }
        if (out.modes.empty()) throw Error(ErrorKind::MalformedDocument, "pose modes: no modes");
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::MalformedDocument, std::string("pose modes: ") + e.what());
    }
}

void save_pose_modes(const PoseModes& modes, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::Io, "cannot write " + path.string());
    f << pose_modes_to_json(modes);
}

PoseModes load_pose_modes(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::FileNotFound, path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return pose_modes_from_json(ss.str());
}

}  // namespace psa
