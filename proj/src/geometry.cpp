#include "psa/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <string>

namespace psa {

namespace {

void require_finite(Point2 p, const char* what) {
    if (!p.finite()) {
        throw Error(ErrorKind::NonFinite, std::string(what) + " has a non-finite coordinate");
    }
}

}  // namespace

Box::Box(double x_min, double y_min, double x_max, double y_max)
    : x_min_(x_min), y_min_(y_min), x_max_(x_max), y_max_(y_max) {
    if (!std::isfinite(x_min) || !std::isfinite(y_min) || !std::isfinite(x_max) ||
        !std::isfinite(y_max)) {
        throw Error(ErrorKind::NonFinite, "box has a non-finite coordinate");
    }
    if (x_min > x_max || y_min > y_max) {
        throw Error(ErrorKind::InvalidBox, "box minimum exceeds maximum");
    }
}

Box Box::centered(Point2 center, double width, double height) {
    return Box(center.x - 0.5 * width, center.y - 0.5 * height, center.x + 0.5 * width,
               center.y + 0.5 * height);
}

Contour::Contour(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 3) {
        throw Error(ErrorKind::TooFewVertices,
                    "contour needs at least 3 vertices, got " + std::to_string(vertices_.size()));
    }
    for (const auto& v : vertices_) require_finite(v, "contour vertex");
    const double a = signed_area(std::span<const Point2>(vertices_));
    if (a == 0.0) {
        throw Error(ErrorKind::ZeroAreaContour, "contour encloses zero area");
    }
    if (a < 0.0) {
        std::reverse(vertices_.begin() + 1, vertices_.end());
    }
}

double Contour::area() const { return signed_area(std::span<const Point2>(vertices_)); }

Box Contour::bounds() const { return bounding_box(vertices_); }

Point2 project_point_to_segment(Point2 p, Point2 a, Point2 b) {
    const Point2 ab = b - a;
    const double len2 = squared_norm(ab);
    if (len2 == 0.0) {
        throw Error(ErrorKind::DegenerateSegment, "segment endpoints coincide");
    }
    const double t = dot(p - a, ab) / len2;
    if (t <= 0.0) return a;
    if (t >= 1.0) return b;
    return a + ab * t;
}

double box_iou(const Box& a, const Box& b) {
    const double iw = std::min(a.x_max(), b.x_max()) - std::max(a.x_min(), b.x_min());
    const double ih = std::min(a.y_max(), b.y_max()) - std::max(a.y_min(), b.y_min());
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    const double inter = iw * ih;
    const double uni = a.area() + b.area() - inter;
    if (uni <= 0.0) return 0.0;
    return std::clamp(inter / uni, 0.0, 1.0);
}

double signed_area(std::span<const Point2> vertices) {
    if (vertices.size() < 3) {
        throw Error(ErrorKind::TooFewVertices, "signed area needs at least 3 vertices");
    }
    // Shift to the first vertex to keep the cross products small.
    const Point2 origin = vertices[0];
    double twice = 0.0;
    for (std::size_t i = 1; i + 1 < vertices.size(); ++i) {
        twice += cross(vertices[i] - origin, vertices[i + 1] - origin);
    }
    return 0.5 * twice;
}

double signed_area(const Contour& contour) { return contour.area(); }

bool point_in_polygon(Point2 p, std::span<const Point2> vertices) {
    bool inside = false;
    const std::size_t n = vertices.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point2 a = vertices[i];
        const Point2 b = vertices[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x_cross) inside = !inside;
        }
    }
    return inside;
}

bool is_convex(std::span<const Point2> vertices) {
    const std::size_t n = vertices.size();
    if (n < 3) return false;
    int sign = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = vertices[i];
        const Point2 b = vertices[(i + 1) % n];
        const Point2 c = vertices[(i + 2) % n];
        const double z = cross(b - a, c - b);
        if (z == 0.0) continue;
        const int s = z > 0.0 ? 1 : -1;
        if (sign == 0) {
            sign = s;
        } else if (s != sign) {
            return false;
        }
    }
    return sign != 0;
}

Box bounding_box(std::span<const Point2> points) {
    if (points.empty()) {
        throw Error(ErrorKind::NoValidPoints, "bounding box of an empty point set");
    }
    double x0 = std::numeric_limits<double>::infinity();
    double y0 = x0;
    double x1 = -x0;
    double y1 = -x0;
    for (const auto& p : points) {
        x0 = std::min(x0, p.x);
        y0 = std::min(y0, p.y);
        x1 = std::max(x1, p.x);
        y1 = std::max(y1, p.y);
    }
    return Box(x0, y0, x1, y1);
}

double rasterized_mask_iou(const Contour& a, const Contour& b, int resolution) {
    if (resolution < 16) {
        throw Error(ErrorKind::InvalidArgument, "raster resolution must be at least 16");
    }
    const Box ba = a.bounds();
    const Box bb = b.bounds();
    const double x0 = std::min(ba.x_min(), bb.x_min());
    const double y0 = std::min(ba.y_min(), bb.y_min());
    const double x1 = std::max(ba.x_max(), bb.x_max());
    const double y1 = std::max(ba.y_max(), bb.y_max());
    const double dx = (x1 - x0) / resolution;
    const double dy = (y1 - y0) / resolution;

    std::size_t inter = 0;
    std::size_t uni = 0;
    for (int r = 0; r < resolution; ++r) {
        const double y = y0 + (r + 0.5) * dy;
        for (int c = 0; c < resolution; ++c) {
            const Point2 p{x0 + (c + 0.5) * dx, y};
            const bool in_a = ba.contains(p) && point_in_polygon(p, a.vertices());
            const bool in_b = bb.contains(p) && point_in_polygon(p, b.vertices());
            inter += (in_a && in_b) ? 1 : 0;
            uni += (in_a || in_b) ? 1 : 0;
        }
    }
    if (uni == 0) return 0.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<Point2> transform_points(std::span<const Point2> points, Point2 center,
                                     double angle_deg, double scale) {
    if (!(scale > 0.0)) {
        throw Error(ErrorKind::NonPositiveScale, "transform scale must be positive");
    }
    const double rad = angle_deg * std::numbers::pi / 180.0;
    const double c = std::cos(rad);
    const double s = std::sin(rad);
    std::vector<Point2> out;
    out.reserve(points.size());
    for (const auto& p : points) {
        const Point2 d = p - center;
        const Point2 rotated{c * d.x - s * d.y, s * d.x + c * d.y};
        out.push_back(center + rotated * scale);
    }
    return out;
}

Point2 centroid(std::span<const Point2> points) {
    if (points.empty()) {
        throw Error(ErrorKind::NoValidPoints, "centroid of an empty point set");
    }
    Point2 sum;
    for (const auto& p : points) sum = sum + p;
    return sum * (1.0 / static_cast<double>(points.size()));
}

}  // namespace psa
