#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "psa/error.hpp"

namespace psa {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2 operator*(Point2 a, double s) { return {a.x * s, a.y * s}; }
    friend Point2 operator*(double s, Point2 a) { return {a.x * s, a.y * s}; }
    friend bool operator==(Point2 a, Point2 b) = default;

    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double squared_norm(Point2 a) { return dot(a, a); }
inline double distance(Point2 a, Point2 b) { return std::sqrt(squared_norm(a - b)); }
inline double l1_distance(Point2 a, Point2 b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

/// Axis-aligned box in pixel coordinates (y grows downward). Zero width or
/// height is allowed; such boxes have zero area and zero IoU with anything.
class Box {
public:
    Box() = default;
    Box(double x_min, double y_min, double x_max, double y_max);

    static Box from_xywh(double x, double y, double w, double h) { return Box(x, y, x + w, y + h); }
    static Box centered(Point2 center, double width, double height);

    double x_min() const { return x_min_; }
    double y_min() const { return y_min_; }
    double x_max() const { return x_max_; }
    double y_max() const { return y_max_; }

    double width() const { return x_max_ - x_min_; }
    double height() const { return y_max_ - y_min_; }
    double area() const { return width() * height(); }
    Point2 center() const { return {0.5 * (x_min_ + x_max_), 0.5 * (y_min_ + y_max_)}; }
    bool degenerate() const { return !(width() > 0.0) || !(height() > 0.0); }
    bool contains(Point2 p) const {
        return p.x >= x_min_ && p.x <= x_max_ && p.y >= y_min_ && p.y <= y_max_;
    }

    friend bool operator==(const Box&, const Box&) = default;

private:
    double x_min_ = 0.0;
    double y_min_ = 0.0;
    double x_max_ = 0.0;
    double y_max_ = 0.0;
};

/// Closed simple polygon with at least three vertices and non-zero area.
/// Vertices are reordered on construction so the shoelace area is positive;
/// in image coordinates that is the same turning sense as top-left ->
/// top-right -> bottom-right. The first vertex is kept in place.
class Contour {
public:
    explicit Contour(std::vector<Point2> vertices);

    const std::vector<Point2>& vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }
    const Point2& operator[](std::size_t i) const { return vertices_[i]; }
    /// Segment i runs from vertex i to vertex (i + 1) mod size.
    Point2 segment_start(std::size_t i) const { return vertices_[i]; }
    Point2 segment_end(std::size_t i) const { return vertices_[(i + 1) % vertices_.size()]; }

    double area() const;
    Box bounds() const;

private:
    std::vector<Point2> vertices_;
};

Point2 project_point_to_segment(Point2 p, Point2 a, Point2 b);

double box_iou(const Box& a, const Box& b);

/// Shoelace area of an arbitrary vertex sequence; positive when the
/// traversal matches the contour storage orientation.
double signed_area(std::span<const Point2> vertices);
double signed_area(const Contour& contour);

/// Even-odd rule; points exactly on an edge may fall either way.
bool point_in_polygon(Point2 p, std::span<const Point2> vertices);

bool is_convex(std::span<const Point2> vertices);

Box bounding_box(std::span<const Point2> points);

inline constexpr int kDefaultRasterResolution = 512;

/// Test oracle: samples a resolution x resolution grid of cell centers over
/// the joint bounding box and compares inside/outside membership.
double rasterized_mask_iou(const Contour& a, const Contour& b,
                           int resolution = kDefaultRasterResolution);

/// Rotates by angle_deg about center, then scales about center.
std::vector<Point2> transform_points(std::span<const Point2> points, Point2 center,
                                     double angle_deg, double scale);

Point2 centroid(std::span<const Point2> points);

}  // namespace psa
