#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "psa/anchors.hpp"
#include "psa/assignment.hpp"
#include "psa/cli.hpp"
#include "psa/codec.hpp"
#include "psa/coverage.hpp"
#include "psa/dataset.hpp"
#include "psa/geometry.hpp"
#include "psa/matching.hpp"
#include "psa/posemodes.hpp"
#include "psa/refmath.hpp"
#include "psa/targets.hpp"

namespace py = pybind11;

namespace {

using XY = std::pair<double, double>;

std::vector<psa::Point2> to_points(const std::vector<XY>& xy) {
    std::vector<psa::Point2> out;
    out.reserve(xy.size());
    for (const auto& [x, y] : xy) out.push_back({x, y});
    return out;
}

template <class Range>
std::vector<XY> to_xy(const Range& pts) {
    std::vector<XY> out;
    for (const auto& p : pts) out.emplace_back(p.x, p.y);
    return out;
}

psa::Joints to_joints(const std::vector<XY>& xy) {
    if (xy.size() != psa::kNumJoints) {
        throw psa::Error(psa::ErrorKind::JointCountMismatch, "expected 17 joints");
    }
    psa::Joints j{};
    for (std::size_t i = 0; i < psa::kNumJoints; ++i) j[i] = {xy[i].first, xy[i].second};
    return j;
}

psa::MatchStrategy strategy_arg(const std::string& name) {
    auto s = psa::parse_mask_strategy(name);
    if (!s) throw psa::Error(psa::ErrorKind::InvalidArgument, "unknown strategy " + name);
    return *s;
}

py::dict match_dict(const psa::MatchResult& r) {
    py::dict d;
    d["targets"] = to_xy(r.targets);
    d["offsets"] = to_xy(r.offsets);
    d["valid"] = r.valid;
    return d;
}

psa::MaskAnchor mask_anchor(const psa::Box& box, std::size_t n) {
    auto s = psa::sample_box_perimeter(box, n);
    psa::MaskAnchor a;
    a.center = box.center();
    a.implicit_box = box;
    a.points = std::move(s.points);
    a.corners = s.corners;
    return a;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Point-set anchors: generation, matching, assignment and target encoding.";
    py::register_exception<psa::Error>(m, "PsaError", PyExc_ValueError);

    py::class_<psa::Box>(m, "Box")
        .def(py::init<double, double, double, double>(), py::arg("x_min"), py::arg("y_min"),
             py::arg("x_max"), py::arg("y_max"))
        .def_static("from_xywh", &psa::Box::from_xywh)
        .def_property_readonly("x_min", &psa::Box::x_min)
        .def_property_readonly("y_min", &psa::Box::y_min)
        .def_property_readonly("x_max", &psa::Box::x_max)
        .def_property_readonly("y_max", &psa::Box::y_max)
        .def_property_readonly("width", &psa::Box::width)
        .def_property_readonly("height", &psa::Box::height)
        .def_property_readonly("area", &psa::Box::area)
        .def("__repr__", [](const psa::Box& b) {
            std::ostringstream os;
            os << "Box(" << b.x_min() << ", " << b.y_min() << ", " << b.x_max() << ", "
               << b.y_max() << ")";
            return os.str();
        });

    m.def("box_iou", &psa::box_iou);
    m.def("sample_box_perimeter", [](const psa::Box& box, std::size_t n) {
        const auto s = psa::sample_box_perimeter(box, n);
        return py::make_tuple(to_xy(s.points), s.corners);
    });
    m.def("polygon_area", [](const std::vector<XY>& v) { return psa::Contour(to_points(v)).area(); });
    m.def("mask_iou", [](const std::vector<XY>& a, const std::vector<XY>& b, int resolution) {
        return psa::rasterized_mask_iou(psa::Contour(to_points(a)), psa::Contour(to_points(b)),
                                        resolution);
    }, py::arg("a"), py::arg("b"), py::arg("resolution") = psa::kDefaultRasterResolution);

    m.def("anchors_per_location", [](const std::string& kind, std::size_t num_modes) {
        const auto c = psa::PyramidConfig::defaults();
        return kind == "pose" ? c.pose_anchors_per_location(num_modes)
                              : c.mask_anchors_per_location();
    }, py::arg("kind") = "mask", py::arg("num_modes") = 3);
    m.def("grid_anchor_count", [](std::size_t w, std::size_t h) {
        return psa::generate_grid(psa::PyramidConfig::defaults(), w, h, psa::AnchorKind::Mask)
            .total_anchors();
    });

    m.def("match_mask",
          [](const psa::Box& anchor_box, std::size_t n, const std::vector<XY>& contour,
             const std::string& strategy) {
              return match_dict(psa::match_mask(mask_anchor(anchor_box, n),
                                                psa::Contour(to_points(contour)),
                                                strategy_arg(strategy)));
          },
          py::arg("anchor_box"), py::arg("n"), py::arg("contour"),
          py::arg("strategy") = "corner-projection");
    m.def("reconstruct_mask",
          [](const psa::Box& anchor_box, std::size_t n, const std::vector<XY>& contour,
             const std::string& strategy) {
              const auto anchor = mask_anchor(anchor_box, n);
              const auto s = strategy_arg(strategy);
              const auto r = psa::match_mask(anchor, psa::Contour(to_points(contour)), s);
              const auto d = psa::decode_points(anchor.points, r.offsets, r.valid);
              return to_xy(psa::construct_mask(d.points, d.valid, s).vertices());
          },
          py::arg("anchor_box"), py::arg("n"), py::arg("contour"),
          py::arg("strategy") = "corner-projection");

    m.def("oks",
          [](const std::vector<XY>& candidate, const std::vector<XY>& gt,
             const std::vector<int>& visibility, double scale) {
              return psa::oks(to_points(candidate), to_points(gt), visibility, scale,
                              psa::OksParams::coco());
          },
          py::arg("candidate"), py::arg("gt"), py::arg("visibility"), py::arg("scale"));
    m.def("assign",
          [](const std::vector<std::vector<double>>& sim, double hi, double lo, bool force) {
              const std::size_t na = sim.size();
              const std::size_t ng = na ? sim.front().size() : 0;
              psa::SimilarityMatrix mat(na, ng);
              for (std::size_t a = 0; a < na; ++a) {
                  if (sim[a].size() != ng) {
                      throw psa::Error(psa::ErrorKind::LengthMismatch, "ragged similarity rows");
                  }
                  for (std::size_t g = 0; g < ng; ++g) mat(a, g) = sim[a][g];
              }
              std::vector<std::pair<int, int>> out;
              for (const auto& l : psa::assign(mat, {hi, lo}, force)) {
                  out.emplace_back(static_cast<int>(l.label), l.gt_index);
              }
              return out;
          },
          py::arg("similarity"), py::arg("hi"), py::arg("lo"), py::arg("force_nearest") = false);
    m.def("nms",
          [](const std::vector<psa::Box>& boxes, const std::vector<double>& scores, double thr) {
              return psa::nms(boxes, scores, thr);
          },
          py::arg("boxes"), py::arg("scores"), py::arg("iou_threshold") = psa::kDefaultNmsThreshold);

    m.def("focal_loss", &psa::focal_loss, py::arg("p"), py::arg("positive"),
          py::arg("alpha") = psa::kFocalAlpha, py::arg("gamma") = psa::kFocalGamma);
    m.def("default_lambda", [](const std::string& task) {
        return psa::default_lambda(task == "pose" ? psa::Task::Pose : psa::Task::Segmentation);
    });
    m.def("shape_indexed_coords", [](const std::vector<XY>& pts, double stride) {
        return to_xy(psa::shape_indexed_coords(to_points(pts), stride));
    });

    m.def("kmeans_poses",
          [](const std::vector<std::vector<XY>>& poses, std::size_t k, std::uint64_t seed) {
              std::vector<psa::NormalizedPose> in;
              for (const auto& p : poses) {
                  psa::NormalizedPose n;
                  n.joints = to_joints(p);
                  n.valid.fill(true);
                  in.push_back(n);
              }
              const auto r = psa::kmeans_poses(in, k, seed);
              std::vector<std::vector<XY>> modes;
              for (const auto& mode : r.modes) modes.push_back(to_xy(mode));
              py::dict d;
              d["modes"] = modes;
              d["inertia"] = r.inertia;
              d["inertia_history"] = r.inertia_history;
              d["iterations"] = r.iterations;
              return d;
          },
          py::arg("poses"), py::arg("k"), py::arg("seed") = 0);

    m.def("synthetic_corpus_json",
          [](const std::string& kind, std::size_t count, std::uint64_t seed) {
              psa::SynthParams p;
              p.kind = kind == "poses" ? psa::SynthKind::Poses : psa::SynthKind::Contours;
              p.count = count;
              p.seed = seed;
              return psa::records_to_coco_json(psa::generate_synthetic_corpus(p));
          },
          py::arg("kind") = "contours", py::arg("count") = 10, py::arg("seed") = 0);
    m.def("count_annotations", [](const std::string& text) {
        const auto r = psa::parse_annotations_text(text);
        py::dict d;
        d["records"] = r.records.size();
        d["rle_rejected"] = r.rle_rejected;
        d["polygons_dropped"] = r.polygons_dropped;
        return d;
    });

    m.def("run_cli", [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        const int code = psa::run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
    });
}
