#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "psa/codec.hpp"

using namespace psa;

namespace {

MaskAnchor anchor_on(const Box& box, std::size_t n) {
    auto s = sample_box_perimeter(box, n);
    return MaskAnchor{box.center(), box, std::move(s.points), s.corners};
}

}  // namespace

TEST(Decode, AddsOffsetsWhereValid) {
    const std::vector<Point2> pts{{0, 0}, {1, 1}, {2, 2}};
    const std::vector<Point2> off{{1, 0}, {5, 5}, {0, -1}};
    const auto d = decode_points(pts, off, {true, false, true});
    EXPECT_EQ(d.points[0], (Point2{1, 0}));
    EXPECT_EQ(d.points[1], (Point2{1, 1}));
    EXPECT_EQ(d.points[2], (Point2{2, 1}));
    EXPECT_FALSE(d.valid[1]);
    EXPECT_THROW(decode_points(pts, off, {true}), Error);
}

TEST(Decode, InvertsMatching) {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 100; ++t) {
        auto poly = oracle::random_polygon(rng, 3 + t % 30, t % 2 == 0);
        std::vector<Point2> v;
        for (auto p : poly) v.push_back({p.x, p.y});
        const Contour c(v);
        const auto anchor = anchor_on(Box(20, 40, 180, 160), 36);
        for (auto s : {MatchStrategy::NearestPoint, MatchStrategy::NearestLine,
                       MatchStrategy::CornerProjection}) {
            const auto r = match_mask(anchor, c, s);
            const auto d = decode_points(anchor.points, r.offsets, r.valid);
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (!r.valid[i]) continue;
                EXPECT_NEAR(d.points[i].x, r.targets[i].x, 1e-9);
                EXPECT_NEAR(d.points[i].y, r.targets[i].y, 1e-9);
            }
        }
    }
}

TEST(ConstructMask, CornerProjectionUsesValidPointsOnly) {
    const std::vector<Point2> pts{{0, 0}, {4, 0}, {100, 100}, {4, 4}, {0, 4}};
    const auto c = construct_mask(pts, {true, true, false, true, true},
                                  MatchStrategy::CornerProjection);
    EXPECT_EQ(c.size(), 4u);
    EXPECT_DOUBLE_EQ(c.area(), 16.0);
    const auto all = construct_mask(pts, {true, true, false, true, true},
                                    MatchStrategy::NearestLine);
    EXPECT_EQ(all.size(), 5u);
}

TEST(ConstructMask, NeedsThreePoints) {
    const std::vector<Point2> pts{{0, 0}, {4, 0}, {4, 4}, {0, 4}};
    try {
        construct_mask(pts, {true, false, false, true}, MatchStrategy::CornerProjection);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::TooFewValidPoints);
    }
}

TEST(EnclosingBox, ValidPointsOnly) {
    const std::vector<Point2> pts{{1, 2}, {50, 50}, {3, -1}};
    EXPECT_EQ(enclosing_box(pts, {true, false, true}), Box(1, -1, 3, 2));
    EXPECT_THROW(enclosing_box(pts, {false, false, false}), Error);
}

TEST(Nms, OverlapAboveThresholdIsSuppressed) {
    const std::vector<Box> boxes{Box(0, 0, 10, 10), Box(1, 1, 11, 11), Box(20, 20, 30, 30)};
    const std::vector<double> scores{0.9, 0.8, 0.7};
    EXPECT_EQ(nms(boxes, scores, 0.5), (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(nms(boxes, scores, 0.9), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Nms, EqualToThresholdIsKept) {
    // IoU of these boxes is exactly 1/3.
    const std::vector<Box> boxes{Box(0, 0, 2, 2), Box(1, 0, 3, 2)};
    EXPECT_EQ(nms(boxes, std::vector<double>{0.5, 0.6}, 1.0 / 3.0).size(), 2u);
}

TEST(Nms, VisitsByScoreThenIndex) {
    const std::vector<Box> boxes{Box(0, 0, 1, 1), Box(5, 5, 6, 6), Box(9, 9, 10, 10)};
    EXPECT_EQ(nms(boxes, std::vector<double>{0.2, 0.2, 0.9}, 0.5),
              (std::vector<std::size_t>{2, 0, 1}));
}

TEST(Nms, AgreesWithQuadraticReference) {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0, 100), w(5, 40), s(0, 1);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = t % 60;
        std::vector<Box> boxes;
        std::vector<oracle::B> ob;
        std::vector<double> scores;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = u(rng), y = u(rng);
            boxes.emplace_back(x, y, x + w(rng), y + w(rng));
            ob.push_back({boxes.back().x_min(), boxes.back().y_min(), boxes.back().x_max(),
                          boxes.back().y_max()});
            scores.push_back(s(rng));
        }
        EXPECT_EQ(nms(boxes, scores, 0.5), oracle::nms(ob, scores, 0.5));
    }
}

TEST(Nms, ClassWiseSuppression) {
    std::vector<Detection> d(3);
    d[0].score = 0.9;
    d[0].box = Box(0, 0, 10, 10);
    d[1].score = 0.8;
    d[1].box = Box(0, 0, 10, 10);
    d[1].class_id = 1;
    d[2].score = 0.7;
    d[2].mask = Contour({{0, 0}, {10, 0}, {10, 10}, {0, 10}});
    EXPECT_EQ(nms(d, 0.5), (std::vector<std::size_t>{0, 1}));
    Detection empty;
    EXPECT_THROW(empty.nms_box(), Error);
}

TEST(TopK, PerLevelDescending) {
    const std::vector<std::vector<double>> scores{{0.1, 0.9, 0.5}, {0.3, 0.3}};
    const auto top = topk_per_level(scores, 2);
    ASSERT_EQ(top.size(), 4u);
    EXPECT_EQ(top[0].ref.index, 1u);
    EXPECT_EQ(top[1].ref.index, 2u);
    EXPECT_EQ(top[2].ref.level, 1u);
    EXPECT_EQ(top[2].ref.index, 0u);
    EXPECT_EQ(top[3].ref.index, 1u);
}

TEST(TopK, DefaultsMatchInferenceSettings) {
    EXPECT_EQ(kDefaultTopK, 1000u);
    EXPECT_EQ(kDefaultNmsThreshold, 0.5);
}
