#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "psa/matching.hpp"

using namespace psa;

namespace {

MaskAnchor anchor_on(const Box& box, std::size_t n) {
    auto s = sample_box_perimeter(box, n);
    return MaskAnchor{box.center(), box, std::move(s.points), s.corners};
}

Contour contour_of(const std::vector<oracle::P>& poly) {
    std::vector<Point2> pts;
    for (auto p : poly) pts.push_back({p.x, p.y});
    return Contour(pts);
}

std::vector<oracle::P> vertices_of(const Contour& c) {
    std::vector<oracle::P> out;
    for (const auto& v : c.vertices()) out.push_back({v.x, v.y});
    return out;
}

double distance_to_contour(Point2 p, const Contour& c) {
    double best = 1e300;
    for (std::size_t j = 0; j < c.size(); ++j) {
        best = std::min(best, distance(p, project_point_to_segment(p, c.segment_start(j),
                                                                   c.segment_end(j))));
    }
    return best;
}

}  // namespace

TEST(NearestPoint, SquareTiesGoToLowestVertex) {
    const Contour sq({{0, 0}, {4, 0}, {4, 4}, {0, 4}});
    const auto r = match_nearest_point(anchor_on(Box(0, 0, 4, 4), 8), sq);
    EXPECT_EQ(r.targets[0], (Point2{0, 0}));
    EXPECT_EQ(r.offsets[0], (Point2{0, 0}));
    EXPECT_EQ(r.targets[1], (Point2{0, 0}));
    EXPECT_EQ(r.offsets[1], (Point2{-2, 0}));
    EXPECT_EQ(r.source[3], 1u);
    EXPECT_EQ(r.valid_count(), 8u);
}

TEST(NearestPoint, AgreesWithBruteForce) {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 200; ++t) {
        const auto poly = oracle::random_polygon(rng, 3 + t % 38, t % 2 == 0);
        const Contour c = contour_of(poly);
        const auto verts = vertices_of(c);
        const auto anchor = anchor_on(Box(30, 50, 170, 150), 36);
        const auto r = match_nearest_point(anchor, c);
        for (std::size_t i = 0; i < anchor.points.size(); ++i) {
            const std::size_t v =
                oracle::nearest_vertex({anchor.points[i].x, anchor.points[i].y}, verts);
            EXPECT_EQ(r.source[i], v);
            EXPECT_EQ(r.targets[i], c[v]);
        }
    }
}

TEST(NearestLine, MidpointsProjectOntoSides) {
    const Contour sq({{0, 0}, {4, 0}, {4, 4}, {0, 4}});
    const auto r = match_nearest_line(anchor_on(Box(0, 0, 4, 4), 8), sq);
    for (const auto& o : r.offsets) EXPECT_EQ(o, (Point2{0, 0}));
    const auto r2 = match_nearest_line(anchor_on(Box(-1, -1, 5, 5), 8), sq);
    EXPECT_EQ(r2.targets[1], (Point2{2, 0}));
    EXPECT_EQ(r2.offsets[1], (Point2{0, 1}));
}

TEST(NearestLine, AgreesWithBruteForce) {
    std::mt19937_64 rng(22);
    for (int t = 0; t < 200; ++t) {
        const auto poly = oracle::random_polygon(rng, 3 + t % 38, t % 3 == 0);
        const Contour c = contour_of(poly);
        const auto verts = vertices_of(c);
        const auto anchor = anchor_on(Box(30, 50, 170, 150), 36);
        const auto r = match_nearest_line(anchor, c);
        for (std::size_t i = 0; i < anchor.points.size(); ++i) {
            const auto [seg, q] =
                oracle::nearest_segment({anchor.points[i].x, anchor.points[i].y}, verts);
            EXPECT_EQ(r.source[i], seg);
            EXPECT_EQ(r.targets[i].x, q.x);
            EXPECT_EQ(r.targets[i].y, q.y);
        }
    }
}

TEST(CornerProjection, BoxContourIsIdempotent) {
    const Box box(3, 5, 43, 25);
    const auto anchor = anchor_on(box, 36);
    const Contour four({{3, 5}, {43, 5}, {43, 25}, {3, 25}});
    const Contour dense(anchor.points);
    for (const Contour* c : {&four, &dense}) {
        const auto r = match_corner_projection(anchor, *c);
        EXPECT_EQ(r.valid_count(), 36u);
        for (const auto& o : r.offsets) EXPECT_EQ(o, (Point2{0, 0}));
    }
}

TEST(CornerProjection, StaircaseMarksPointsBeyondTheirPartInvalid) {
    const Contour stair({{0, 0}, {2, 0}, {2, 2}, {4, 2}, {4, 4}, {0, 4}});
    const auto anchor = anchor_on(Box(0, 0, 4, 4), 16);
    const auto r = match_corner_projection(anchor, stair);
    // Top side: x = 1 lies on the top part, x = 3 hits the step of the right part.
    EXPECT_TRUE(r.valid[1]);
    EXPECT_EQ(r.offsets[1], (Point2{0, 0}));
    EXPECT_FALSE(r.valid[3]);
    EXPECT_EQ(r.targets[3], (Point2{3, 2}));
    EXPECT_EQ(r.offsets[3], (Point2{0, 0}));
    // Right side: y = 1 projects onto the inner edge, y = 2 lands on the step.
    EXPECT_TRUE(r.valid[5]);
    EXPECT_EQ(r.offsets[5], (Point2{-2, 0}));
    EXPECT_TRUE(r.valid[6]);
    EXPECT_EQ(r.targets[6], (Point2{4, 2}));
    EXPECT_EQ(r.valid_count(), 15u);
}

TEST(CornerProjection, DiamondCollapsesTopPart) {
    const Contour diamond({{2, 0}, {4, 2}, {2, 4}, {0, 2}});
    const auto r = match_corner_projection(anchor_on(Box(0, 0, 4, 4), 8), diamond);
    EXPECT_EQ(r.targets[0], (Point2{2, 0}));
    EXPECT_EQ(r.targets[2], (Point2{2, 0}));
    EXPECT_FALSE(r.valid[1]);
    EXPECT_EQ(r.targets[1], (Point2{2, 0}));
    EXPECT_TRUE(r.valid[3]);
    EXPECT_EQ(r.targets[3], (Point2{4, 2}));
}

TEST(CornerProjection, ValidTargetsLieOnTheContour) {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 100; ++t) {
        const Contour c = contour_of(oracle::random_polygon(rng, 3 + t % 38, t % 2 == 1));
        const auto r = match_corner_projection(anchor_on(c.bounds(), 60), c);
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (r.valid[i]) {
                EXPECT_LE(distance_to_contour(r.targets[i], c), 1e-9);
            } else {
                EXPECT_EQ(r.offsets[i], (Point2{0, 0}));
            }
        }
    }
}

TEST(CornerProjection, ConvexShapesInsideTheirBoxAreMostlyValid) {
    std::mt19937_64 rng(24);
    for (int t = 0; t < 50; ++t) {
        const Contour c = contour_of(oracle::random_polygon(rng, 8 + t % 30, true));
        const auto r = match_corner_projection(anchor_on(c.bounds(), 36), c);
        EXPECT_GE(r.valid_count(), 4u);
    }
}

TEST(CornerProjection, AgreesWithIntersectionEnumeration) {
    std::mt19937_64 rng(23);
    std::size_t invalid = 0;
    for (int t = 0; t < 200; ++t) {
        const Contour c = contour_of(oracle::random_polygon(rng, 6 + t % 30, false));
        const auto verts = vertices_of(c);
        const std::size_t nv = verts.size();
        const auto anchor = anchor_on(Box(35, 55, 165, 145), 36);
        const auto r = match_corner_projection(anchor, c);
        std::array<std::size_t, 4> cv{};
        for (std::size_t k = 0; k < 4; ++k) {
            const auto q = anchor.points[anchor.corners[k]];
            cv[k] = oracle::nearest_vertex({q.x, q.y}, verts);
        }
        for (std::size_t i = 0; i < anchor.points.size(); ++i) {
            if (i % 9 == 0) continue;
            const std::size_t side = i / 9;
            const bool vertical = side % 2 == 0;
            const oracle::P p{anchor.points[i].x, anchor.points[i].y};
            double best = 1e300;
            std::size_t seg = nv;
            oracle::P hit{};
            for (std::size_t j = 0; j < nv; ++j) {
                const oracle::P a = verts[j], b = verts[(j + 1) % nv];
                const double au = vertical ? a.x : a.y, bu = vertical ? b.x : b.y;
                const double lu = vertical ? p.x : p.y;
                if ((au - lu) * (bu - lu) > 0 || au == bu) continue;
                const double tt = (lu - au) / (bu - au);
                const oracle::P q{a.x + tt * (b.x - a.x), a.y + tt * (b.y - a.y)};
                const double d = vertical ? std::abs(q.y - p.y) : std::abs(q.x - p.x);
                if (d < best) {
                    best = d;
                    seg = j;
                    hit = q;
                }
            }
            if (seg == nv) {
                EXPECT_FALSE(r.valid[i]);
                EXPECT_EQ(r.source[i], MatchResult::kNoSource);
                continue;
            }
            bool in_part = false;
            for (std::size_t j = cv[side]; j != cv[(side + 1) % 4]; j = (j + 1) % nv) {
                in_part = in_part || j == seg;
            }
            EXPECT_EQ(r.valid[i], in_part) << t << " " << i;
            EXPECT_EQ(r.source[i], seg);
            EXPECT_NEAR(r.targets[i].x, hit.x, 1e-9);
            EXPECT_NEAR(r.targets[i].y, hit.y, 1e-9);
            invalid += in_part ? 0 : 1;
        }
    }
    EXPECT_GT(invalid, 0u);
}

TEST(Dispatch, StrategyNamesRoundTrip) {
    for (auto s : {MatchStrategy::NearestPoint, MatchStrategy::NearestLine,
                   MatchStrategy::CornerProjection}) {
        EXPECT_EQ(parse_mask_strategy(to_string(s)), s);
    }
    EXPECT_FALSE(parse_mask_strategy("pose").has_value());
    const Contour sq({{0, 0}, {4, 0}, {4, 4}, {0, 4}});
    EXPECT_THROW(match_mask(anchor_on(Box(0, 0, 4, 4), 8), sq, MatchStrategy::Pose), Error);
}

TEST(Pose, InvisibleJointsAreInvalid) {
    PoseAnchor a;
    Joints gt{};
    std::array<int, kNumJoints> vis{};
    for (std::size_t j = 0; j < kNumJoints; ++j) {
        a.joints[j] = {static_cast<double>(j), 0.0};
        gt[j] = {static_cast<double>(j) + 1.0, 2.0};
        vis[j] = j % 3 == 0 ? 0 : 2;
    }
    const auto r = match_pose(a, gt, vis);
    for (std::size_t j = 0; j < kNumJoints; ++j) {
        EXPECT_EQ(r.valid[j], vis[j] > 0);
        EXPECT_EQ(r.targets[j], gt[j]);
        EXPECT_EQ(r.offsets[j], (vis[j] > 0 ? Point2{1, 2} : Point2{0, 0}));
    }
    const std::vector<Point2> short_gt(5);
    EXPECT_THROW(match_pose(a, short_gt, vis), Error);
}

TEST(BoxTargets, CornerDifferences) {
    const auto anchor = anchor_on(Box(0, 0, 10, 10), 8);
    const auto t = encode_box_targets(anchor, Box(1, 2, 12, 9));
    EXPECT_EQ(t, (std::array<double, 4>{1, 2, 2, -1}));
}
