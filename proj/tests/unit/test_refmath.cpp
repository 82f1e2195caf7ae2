#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "psa/anchors.hpp"
#include "psa/refmath.hpp"

using namespace psa;

TEST(Focal, ReferenceValues) {
    EXPECT_NEAR(focal_loss(1.0, true), 0.0, 1e-12);
    EXPECT_NEAR(focal_loss(0.5, true, 1.0, 0.0), std::log(2.0), 1e-15);
    EXPECT_NEAR(focal_loss(0.5, true, 0.25, 2.0), 0.25 * 0.25 * std::log(2.0), 1e-15);
    EXPECT_NEAR(focal_loss(0.5, true), 0.04332, 1e-5);
    EXPECT_NEAR(focal_loss(0.5, false), 0.75 * 0.25 * std::log(2.0), 1e-15);
}

TEST(Focal, NonNegativeAndDecreasingForPositives) {
    double prev = focal_loss(0.0, true);
    EXPECT_TRUE(std::isfinite(prev));
    for (int i = 1; i <= 1000; ++i) {
        const double p = i / 1000.0;
        const double v = focal_loss(p, true);
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, prev);
        EXPECT_GE(focal_loss(p, false), 0.0);
        prev = v;
    }
}

TEST(Focal, CrossEntropyAtGammaZero) {
    for (double p : {0.1, 0.3, 0.7, 0.95}) {
        EXPECT_NEAR(focal_loss(p, true, 1.0, 0.0), -std::log(p), 1e-14);
    }
}

TEST(Lambda, TaskPresets) {
    EXPECT_EQ(default_lambda(Task::Segmentation), 0.1);
    EXPECT_EQ(default_lambda(Task::Pose), 10.0);
}

TEST(TotalLoss, PerfectRegressionIsZero) {
    LossInputs in;
    in.lambda = 10.0;
    in.anchors.push_back({{0.9}, 1, {1.5, -2.0}, {1.5, -2.0}, {true, true}});
    in.anchors.push_back({{0.1}, 0, {}, {}, {}});
    const auto v = total_loss(in);
    EXPECT_EQ(v.reg, 0.0);
    EXPECT_EQ(v.num_positive, 1u);
    EXPECT_NEAR(v.total, v.cls, 0.0);
}

TEST(TotalLoss, RegressionIsSummedL1OverValidCoordinates) {
    LossInputs in;
    in.lambda = 10.0;
    in.anchors.push_back({{0.9}, 1, {1.0, 2.0, 50.0, 50.0}, {0.0, 0.0, 0.0, 0.0},
                          {true, true, false, false}});
    EXPECT_NEAR(total_loss(in).reg, 30.0, 1e-12);
}

TEST(TotalLoss, NoPositivesStaysFinite) {
    LossInputs in;
    in.anchors.push_back({{0.3, 0.2}, 0, {}, {}, {}});
    in.anchors.push_back({{0.3, 0.2}, -1, {}, {}, {}});
    const auto v = total_loss(in);
    EXPECT_EQ(v.reg, 0.0);
    EXPECT_TRUE(std::isfinite(v.cls));
    EXPECT_NEAR(v.cls, focal_loss(0.3, false) + focal_loss(0.2, false), 1e-15);
}

TEST(TotalLoss, PermutationInvariantAndLinearInLambda) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.01, 0.99), r(-3, 3);
    LossInputs in;
    in.lambda = 0.1;
    for (int i = 0; i < 40; ++i) {
        AnchorLossInput a;
        a.class_probs = {u(rng), u(rng)};
        a.class_target = i % 3;
        if (a.class_target > 0) {
            for (int k = 0; k < 6; ++k) {
                a.reg_pred.push_back(r(rng));
                a.reg_target.push_back(r(rng));
                a.reg_valid.push_back(k % 4 != 0);
            }
        }
        in.anchors.push_back(a);
    }
    const auto base = total_loss(in);
    auto shuffled = in;
    std::shuffle(shuffled.anchors.begin(), shuffled.anchors.end(), rng);
    const auto s = total_loss(shuffled);
    EXPECT_NEAR(s.cls, base.cls, 1e-12);
    EXPECT_NEAR(s.reg, base.reg, 1e-12);
    auto scaled = in;
    scaled.lambda = 0.3;
    EXPECT_NEAR(total_loss(scaled).reg, 3.0 * base.reg, 1e-12);
}

TEST(TotalLoss, MismatchedLengthsThrow) {
    LossInputs in;
    in.anchors.push_back({{0.9}, 1, {1.0}, {1.0, 2.0}, {true}});
    EXPECT_THROW(total_loss(in), Error);
}

TEST(ShapeIndex, InverseOfGridPlacement) {
    const std::vector<Point2> pts{{4, 4}, {8, 4}};
    const auto c = shape_indexed_coords(pts, 8.0);
    EXPECT_EQ(c[0], (Point2{0, 0}));
    EXPECT_EQ(c[1], (Point2{0.5, 0}));
    for (std::size_t row = 0; row < 5; ++row) {
        for (std::size_t col = 0; col < 7; ++col) {
            const std::vector<Point2> center{location_center(row, col, 16.0)};
            const auto g = shape_indexed_coords(center, 16.0);
            EXPECT_EQ(g[0], (Point2{static_cast<double>(col), static_cast<double>(row)}));
        }
    }
    EXPECT_THROW(shape_indexed_coords(pts, 0.0), Error);
}

TEST(Bilinear, ExactAtCellsAndMidpoints) {
    // 2x2 grid, one channel: row 0 = {0, 0}, row 1 = {4, 4}.
    const FeatureGrid g(2, 2, 1, 8.0, {0, 0, 4, 4});
    const std::vector<Point2> coords{{0, 1}, {0.5, 0.5}, {-5, -5}, {9, 9}};
    const auto v = bilinear_sample(g, coords);
    EXPECT_EQ(v[0][0], 4.0);
    EXPECT_EQ(v[1][0], 2.0);
    EXPECT_EQ(v[2][0], 0.0);
    EXPECT_EQ(v[3][0], 4.0);
}

TEST(Bilinear, ExactOnAffineGrids) {
    const std::size_t h = 6, w = 9, c = 2;
    std::vector<double> values;
    for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x) {
            values.push_back(1.5 * x - 0.25 * y + 3.0);
            values.push_back(-2.0 * x + 0.5 * y);
        }
    const FeatureGrid g(h, w, c, 4.0, values);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(0, w - 1), uy(0, h - 1);
    for (int i = 0; i < 500; ++i) {
        const std::vector<Point2> p{{ux(rng), uy(rng)}};
        const auto v = bilinear_sample(g, p);
        EXPECT_NEAR(v[0][0], 1.5 * p[0].x - 0.25 * p[0].y + 3.0, 1e-9);
        EXPECT_NEAR(v[0][1], -2.0 * p[0].x + 0.5 * p[0].y, 1e-9);
    }
}

TEST(Bilinear, ValidatesGridAndCoords) {
    EXPECT_THROW(FeatureGrid(2, 2, 1, 1.0, {1, 2, 3}), Error);
    EXPECT_THROW(FeatureGrid(0, 2, 1, 1.0, {}), Error);
    const FeatureGrid g(1, 1, 1, 1.0, {7});
    const std::vector<Point2> bad{{NAN, 0}};
    EXPECT_THROW(bilinear_sample(g, bad), Error);
}

TEST(HeadShapes, OutputDimensions) {
    const auto seg = head_output_shapes(Task::Segmentation, 9, 36, 80);
    EXPECT_EQ(seg.classification, (std::vector<std::size_t>{9, 80}));
    EXPECT_EQ(seg.shape_regression, (std::vector<std::size_t>{9, 72}));
    EXPECT_EQ(seg.box_regression, (std::vector<std::size_t>{9, 4}));
    const auto pose = head_output_shapes(Task::Pose, 27, 36, 80);
    EXPECT_EQ(pose.classification, (std::vector<std::size_t>{27, 2}));
    EXPECT_EQ(pose.shape_regression, (std::vector<std::size_t>{27, 34}));
    EXPECT_TRUE(pose.box_regression.empty());
}
