#include <gtest/gtest.h>

#include <complex>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "psa/dataset.hpp"

using namespace psa;

namespace {

const char* kMinimal = R"({
  "images": [{"id": 1, "width": 100, "height": 80}],
  "annotations": [
    {"id": 7, "image_id": 1, "category_id": 1, "bbox": [10, 20, 30, 40],
     "segmentation": [[10, 20, 40, 20, 40, 60, 10, 60]], "area": 1200, "iscrowd": 0}
  ]
})";

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected psa::Error";
    return ErrorKind::Io;
}

}  // namespace

TEST(Parse, MinimalDocument) {
    const auto r = parse_annotations_text(kMinimal);
    ASSERT_EQ(r.records.size(), 1u);
    const auto& rec = r.records[0];
    EXPECT_EQ(rec.annotation_id, 7);
    EXPECT_EQ(rec.image_width, 100u);
    EXPECT_EQ(rec.bbox, Box(10, 20, 40, 60));
    ASSERT_NE(rec.primary_contour(), nullptr);
    EXPECT_DOUBLE_EQ(rec.primary_contour()->area(), 1200.0);
    EXPECT_FALSE(rec.out_of_bounds);
    EXPECT_TRUE(r.warnings.empty());
}

TEST(Parse, RleIsRejectedAndCounted) {
    const auto r = parse_annotations_text(R"({
      "images": [{"id": 1, "width": 10, "height": 10}],
      "annotations": [{"id": 1, "image_id": 1, "bbox": [0, 0, 2, 2],
                       "segmentation": {"counts": [1, 2], "size": [10, 10]}}]})");
    EXPECT_TRUE(r.records.empty());
    EXPECT_EQ(r.rle_rejected, 1u);
}

TEST(Parse, ShortPolygonsAreDroppedWithWarning) {
    const auto r = parse_annotations_text(R"({
      "images": [{"id": 1, "width": 50, "height": 50}],
      "annotations": [{"id": 1, "image_id": 1, "bbox": [0, 0, 20, 20],
                       "segmentation": [[0, 0, 5, 5], [0, 0, 20, 0, 20, 20]]}]})");
    ASSERT_EQ(r.records.size(), 1u);
    EXPECT_EQ(r.records[0].segmentation.size(), 1u);
    EXPECT_EQ(r.polygons_dropped, 1u);
    EXPECT_EQ(r.warnings.size(), 1u);
}

TEST(Parse, LargestPolygonIsPrimary) {
    const auto r = parse_annotations_text(R"({
      "images": [{"id": 1, "width": 50, "height": 50}],
      "annotations": [{"id": 1, "image_id": 1,
                       "segmentation": [[0, 0, 2, 0, 2, 2], [10, 10, 30, 10, 30, 30, 10, 30]]}]})");
    ASSERT_EQ(r.records.size(), 1u);
    EXPECT_DOUBLE_EQ(r.records[0].primary_contour()->area(), 400.0);
    EXPECT_EQ(r.records[0].bbox, Box(10, 10, 30, 30));
}

TEST(Parse, KeypointsAndOutOfBounds) {
    std::string kp;
    for (int j = 0; j < 17; ++j) kp += (j ? "," : "") + std::to_string(5 + j) + ",10," + (j == 3 ? "0" : "2");
    const auto r = parse_annotations_text(R"({"images": [{"id": 2, "width": 20, "height": 20}],
      "annotations": [{"id": 1, "image_id": 2, "bbox": [4, 4, 18, 10], "keypoints": [)" + kp + "]}]}");
    ASSERT_EQ(r.records.size(), 1u);
    ASSERT_TRUE(r.records[0].keypoints.has_value());
    EXPECT_EQ(r.records[0].keypoints->visible_count(), 16u);
    EXPECT_EQ(r.records[0].keypoints->joints[16], (Point2{21, 10}));
    EXPECT_EQ(r.records[0].keypoints->box, Box(4, 4, 22, 14));
    EXPECT_TRUE(r.records[0].out_of_bounds);
    EXPECT_EQ(r.warnings.size(), 1u);
}

TEST(Parse, DiagnosticsCarryLineAndField) {
    try {
        parse_annotations_text("{\n  \"images\": [\n  oops\n]}");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MalformedDocument);
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
    try {
        parse_annotations_text(R"({"images": [{"id": 1, "width": 5, "height": 5}],
          "annotations": [{"image_id": 1, "bbox": [0, 0, "x", 1]}]})");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("annotations[0].bbox[2]"), std::string::npos)
            << e.what();
    }
    EXPECT_EQ(kind_of([] {
                  parse_annotations_text(R"({"images": [], "annotations": [{"image_id": 4}]})");
              }),
              ErrorKind::MalformedDocument);
    EXPECT_EQ(kind_of([] { parse_annotations_text("[]"); }), ErrorKind::MalformedDocument);
    EXPECT_EQ(kind_of([] { parse_annotations("/nonexistent/annotations.json"); }),
              ErrorKind::FileNotFound);
}

TEST(Synth, SeedDeterminesCorpus) {
    SynthParams p;
    p.count = 30;
    p.seed = 4;
    const auto a = records_to_coco_json(generate_synthetic_corpus(p));
    const auto b = records_to_coco_json(generate_synthetic_corpus(p));
    EXPECT_EQ(a, b);
    p.seed = 5;
    EXPECT_NE(a, records_to_coco_json(generate_synthetic_corpus(p)));
    p.kind = SynthKind::Poses;
    EXPECT_EQ(records_to_coco_json(generate_synthetic_corpus(p)),
              records_to_coco_json(generate_synthetic_corpus(p)));
}

TEST(Synth, ConvexFlagYieldsConvexPolygons) {
    SynthParams p;
    p.count = 300;
    p.convex_only = true;
    for (const auto& r : generate_synthetic_corpus(p)) {
        std::vector<oracle::P> v;
        for (const auto& q : r.primary_contour()->vertices()) v.push_back({q.x, q.y});
        EXPECT_TRUE(oracle::convex(v));
    }
}

TEST(Synth, StarShapesIncludeConcavePolygons) {
    SynthParams p;
    p.count = 100;
    p.min_vertices = 8;
    std::size_t concave = 0;
    for (const auto& r : generate_synthetic_corpus(p)) {
        std::vector<oracle::P> v;
        for (const auto& q : r.primary_contour()->vertices()) v.push_back({q.x, q.y});
        concave += oracle::convex(v) ? 0 : 1;
        EXPECT_TRUE(r.primary_contour()->bounds().x_min() >= 0.0);
        EXPECT_TRUE(r.primary_contour()->bounds().y_max() <= 512.0);
    }
    EXPECT_GT(concave, 10u);
}

TEST(Synth, RigidPosesAreSimilarityTransformsOfTheSkeleton) {
    SynthParams p;
    p.kind = SynthKind::Poses;
    p.count = 100;
    p.articulation = 0.0;
    const Joints& s = builtin_skeleton();
    for (const auto& r : generate_synthetic_corpus(p)) {
        const auto& j = r.keypoints->joints;
        EXPECT_EQ(r.keypoints->visible_count(), 17u);
        const std::complex<double> s0(s[0].x, s[0].y), p0(j[0].x, j[0].y);
        const std::complex<double> z =
            (std::complex<double>(j[16].x, j[16].y) - p0) /
            (std::complex<double>(s[16].x, s[16].y) - s0);
        for (std::size_t k = 0; k < kNumJoints; ++k) {
            const auto expect = p0 + z * (std::complex<double>(s[k].x, s[k].y) - s0);
            EXPECT_NEAR(expect.real(), j[k].x, 1e-9);
            EXPECT_NEAR(expect.imag(), j[k].y, 1e-9);
        }
        EXPECT_FALSE(r.out_of_bounds);
    }
}

TEST(Synth, DropoutHidesJoints) {
    SynthParams p;
    p.kind = SynthKind::Poses;
    p.count = 50;
    p.dropout = 0.5;
    std::size_t hidden = 0;
    for (const auto& r : generate_synthetic_corpus(p)) hidden += 17 - r.keypoints->visible_count();
    EXPECT_GT(hidden, 200u);
    EXPECT_LT(hidden, 650u);
}

TEST(Synth, SkeletonIsUnitHeightAndCentered) {
    const Box b = bounding_box(builtin_skeleton());
    EXPECT_NEAR(b.height(), 1.0, 1e-12);
    EXPECT_NEAR(b.center().x, 0.0, 1e-12);
    EXPECT_NEAR(b.center().y, 0.0, 1e-12);
    SynthParams p;
    p.count = 0;
    EXPECT_THROW(generate_synthetic_corpus(p), Error);
}

TEST(Writer, RoundTripsThroughTheParser) {
    for (auto kind : {SynthKind::Contours, SynthKind::Poses}) {
        SynthParams p;
        p.kind = kind;
        p.count = 20;
        p.dropout = 0.1;
        const auto records = generate_synthetic_corpus(p);
        const auto path = std::filesystem::temp_directory_path() / "psa_dataset_test.json";
        write_coco(records, path);
        const auto back = parse_annotations(path);
        std::filesystem::remove(path);
        ASSERT_EQ(back.records.size(), records.size());
        for (std::size_t i = 0; i < records.size(); ++i) {
            EXPECT_EQ(back.records[i].image_id, records[i].image_id);
            EXPECT_NEAR(back.records[i].bbox.x_max(), records[i].bbox.x_max(), 1e-9);
            if (kind == SynthKind::Contours) {
                EXPECT_EQ(back.records[i].primary_contour()->vertices(),
                          records[i].primary_contour()->vertices());
            } else {
                EXPECT_EQ(back.records[i].keypoints->joints, records[i].keypoints->joints);
                EXPECT_EQ(back.records[i].keypoints->visibility, records[i].keypoints->visibility);
            }
        }
    }
}

TEST(Group, FirstSeenImageOrder) {
    std::vector<InstanceRecord> recs(4);
    recs[0].image_id = 3;
    recs[1].image_id = 1;
    recs[2].image_id = 3;
    recs[3].image_id = 2;
    const auto g = group_by_image(recs);
    ASSERT_EQ(g.size(), 3u);
    EXPECT_EQ(g[0].size(), 2u);
    EXPECT_EQ(g[0][1], &recs[2]);
    EXPECT_EQ(g[2][0]->image_id, 2);
}
