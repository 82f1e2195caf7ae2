#include "psa/refmath.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "psa/anchors.hpp"

namespace psa {

std::string_view to_string(Task task) {
    return task == Task::Pose ? "pose" : "segmentation";
}

double default_lambda(Task task) { return task == Task::Pose ? 10.0 : 0.1; }

double focal_loss(double p, bool is_positive, double alpha, double gamma) {
    const double q = std::clamp(p, kProbEpsilon, 1.0 - kProbEpsilon);
    if (is_positive) return -alpha * std::pow(1.0 - q, gamma) * std::log(q);
    return -(1.0 - alpha) * std::pow(q, gamma) * std::log(1.0 - q);
}

LossValue total_loss(const LossInputs& inputs) {
    LossValue out;
    double cls_sum = 0.0;
    double reg_sum = 0.0;
    for (const auto& a : inputs.anchors) {
        if (a.class_target < 0) continue;
        for (std::size_t c = 0; c < a.class_probs.size(); ++c) {
            const bool pos = a.class_target == static_cast<int>(c) + 1;
            cls_sum += focal_loss(a.class_probs[c], pos, inputs.focal_alpha, inputs.focal_gamma);
        }
        if (a.class_target == 0) continue;
        ++out.num_positive;
        if (a.reg_pred.size() != a.reg_target.size() || a.reg_pred.size() != a.reg_valid.size()) {
            throw Error(ErrorKind::LengthMismatch, "regression prediction/target/valid lengths");
        }
        for (std::size_t i = 0; i < a.reg_pred.size(); ++i) {
            if (a.reg_valid[i]) reg_sum += std::abs(a.reg_pred[i] - a.reg_target[i]);
        }
    }
    const double norm = static_cast<double>(std::max<std::size_t>(out.num_positive, 1));
    out.cls = cls_sum / norm;
    out.reg = inputs.lambda * reg_sum / norm;
    out.total = out.cls + out.reg;
    return out;
}

std::vector<Point2> shape_indexed_coords(std::span<const Point2> points, double stride) {
    if (!(stride > 0.0)) throw Error(ErrorKind::NonPositiveScale, "stride must be positive");
    std::vector<Point2> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back({p.x / stride - 0.5, p.y / stride - 0.5});
    return out;
}

FeatureGrid::FeatureGrid(std::size_t height, std::size_t width, std::size_t channels,
                         double stride, std::vector<double> values)
    : height_(height), width_(width), channels_(channels), stride_(stride),
      values_(std::move(values)) {
    if (height == 0 || width == 0 || channels == 0) {
        throw Error(ErrorKind::InvalidArgument, "feature grid dimensions must be positive");
    }
    if (values_.size() != height * width * channels) {
        throw Error(ErrorKind::LengthMismatch, "feature grid holds " +
                                                   std::to_string(values_.size()) +
                                                   " values, expected H*W*C");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "feature value is not finite");
    }
}

std::vector<std::vector<double>> bilinear_sample(const FeatureGrid& grid,
                                                 std::span<const Point2> coords) {
    const double max_x = static_cast<double>(grid.width() - 1);
    const double max_y = static_cast<double>(grid.height() - 1);
    std::vector<std::vector<double>> out;
    out.reserve(coords.size());
    for (const auto& c : coords) {
        if (!c.finite()) throw Error(ErrorKind::NonFinite, "sample coordinate is not finite");
        const double x = std::clamp(c.x, 0.0, max_x);
        const double y = std::clamp(c.y, 0.0, max_y);
        const auto x0 = static_cast<std::size_t>(std::floor(x));
        const auto y0 = static_cast<std::size_t>(std::floor(y));
        const std::size_t x1 = std::min(x0 + 1, grid.width() - 1);
        const std::size_t y1 = std::min(y0 + 1, grid.height() - 1);
        const double fx = x - static_cast<double>(x0);
        const double fy = y - static_cast<double>(y0);

        std::vector<double> v(grid.channels());
        for (std::size_t ch = 0; ch < grid.channels(); ++ch) {
            const double top = (1.0 - fx) * grid.at(y0, x0, ch) + fx * grid.at(y0, x1, ch);
            const double bottom = (1.0 - fx) * grid.at(y1, x0, ch) + fx * grid.at(y1, x1, ch);
            v[ch] = (1.0 - fy) * top + fy * bottom;
        }
        out.push_back(std::move(v));
    }
    return out;
}

HeadShapes head_output_shapes(Task task, std::size_t anchors_per_location,
                              std::size_t num_points, std::size_t num_classes) {
    const std::size_t k = anchors_per_location;
    HeadShapes s;
    if (task == Task::Segmentation) {
        s.classification = {k, num_classes};
        s.shape_regression = {k, num_points * 2};
        s.box_regression = {k, 4};
    } else {
        s.classification = {k, 2};
        s.shape_regression = {k, kNumJoints * 2};
    }
    return s;
}

}  // namespace psa
