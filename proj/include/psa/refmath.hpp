#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "psa/geometry.hpp"

namespace psa {

enum class Task { Segmentation, Pose };

std::string_view to_string(Task task);

/// Regression balance weight: 0.1 for segmentation, 10.0 for pose.
double default_lambda(Task task);

inline constexpr double kFocalAlpha = 0.25;
inline constexpr double kFocalGamma = 2.0;
inline constexpr double kProbEpsilon = 1e-12;

/// -alpha (1-p)^gamma log p for positives, -(1-alpha) p^gamma log(1-p) for
/// negatives; p is clamped to [eps, 1 - eps].
double focal_loss(double p, bool is_positive, double alpha = kFocalAlpha,
                  double gamma = kFocalGamma);

/// One anchor's contribution. class_target: 0 background, c >= 1 for class
/// c (probability column c - 1), negative values are ignored anchors.
struct AnchorLossInput {
    std::vector<double> class_probs;
    int class_target = 0;
    std::vector<double> reg_pred;
    std::vector<double> reg_target;
    std::vector<bool> reg_valid;
};

struct LossInputs {
    std::vector<AnchorLossInput> anchors;
    double lambda = 0.1;
    double focal_alpha = kFocalAlpha;
    double focal_gamma = kFocalGamma;
};

struct LossValue {
    double cls = 0.0;
    double reg = 0.0;
    double total = 0.0;
    std::size_t num_positive = 0;
};

/// cls = sum of focal terms / max(N_pos, 1); reg = lambda / max(N_pos, 1)
/// times the per-coordinate L1 sum over valid entries of positive anchors.
LossValue total_loss(const LossInputs& inputs);

/// Anchor point -> fractional feature-grid coordinate (x / s - 0.5, y / s - 0.5).
std::vector<Point2> shape_indexed_coords(std::span<const Point2> points, double stride);

/// H x W x C feature values, stored row-major with channels innermost.
class FeatureGrid {
public:
    FeatureGrid(std::size_t height, std::size_t width, std::size_t channels, double stride,
                std::vector<double> values);

    std::size_t height() const { return height_; }
    std::size_t width() const { return width_; }
    std::size_t channels() const { return channels_; }
    double stride() const { return stride_; }
    double at(std::size_t row, std::size_t col, std::size_t ch) const {
        return values_[(row * width_ + col) * channels_ + ch];
    }

private:
    std::size_t height_;
    std::size_t width_;
    std::size_t channels_;
    double stride_;
    std::vector<double> values_;
};

/// Bilinear interpolation at (x = column, y = row) with border clamping.
std::vector<std::vector<double>> bilinear_sample(const FeatureGrid& grid,
                                                 std::span<const Point2> coords);

/// Output tensor shapes per anchor location: K anchors, n points, C classes.
struct HeadShapes {
    std::vector<std::size_t> classification;
    std::vector<std::size_t> shape_regression;
    /// Empty for pose, which has no box branch.
    std::vector<std::size_t> box_regression;
};

HeadShapes head_output_shapes(Task task, std::size_t anchors_per_location,
                              std::size_t num_points, std::size_t num_classes);

}  // namespace psa
