#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "topoforge/error.hpp"
#include "topoforge/field.hpp"
#include "topoforge/rng.hpp"
#include "topoforge/volume_io.hpp"

using namespace topoforge;

namespace {

SdfScene unit_torus() { return SdfScene::torus({0, 0, 0}, {0, 0, 1}, 0.25, 0.1); }

SdfScene random_scene(Rng& rng) {
  std::vector<SdfScene> parts;
  for (int i = 0; i < 3; ++i) {
    const Vec3 c{rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)};
    switch (rng.index(4)) {
      case 0: parts.push_back(SdfScene::ball(c, rng.uniform(0.05, 0.2))); break;
      case 1:
        parts.push_back(SdfScene::box(c, {rng.uniform(0.05, 0.15), rng.uniform(0.05, 0.15),
                                          rng.uniform(0.05, 0.15)}));
        break;
      case 2:
        parts.push_back(SdfScene::torus(c, {rng.normal(), rng.normal(), rng.normal()},
                                        rng.uniform(0.1, 0.2), rng.uniform(0.03, 0.06)));
        break;
      default:
        parts.push_back(SdfScene::cylinder(c, {rng.normal(), rng.normal(), rng.normal()},
                                           rng.uniform(0.03, 0.1), rng.uniform(0.05, 0.2)));
    }
  }
  SdfScene u = SdfScene::unite({parts[0], parts[1]});
  return SdfScene::rotate(SdfScene::subtract(u, parts[2]), Mat3::axis_angle({1, 2, 3}, 0.7));
}

}  // namespace

TEST(EvalSdf, PrimitiveValues) {
  EXPECT_DOUBLE_EQ(eval_sdf(SdfScene::ball({0, 0, 0}, 0.3), {0, 0, 0}), -0.3);
  EXPECT_NEAR(eval_sdf(unit_torus(), {0, 0, 0}), 0.15, 1e-15);
  const SdfScene a = SdfScene::ball({0.1, 0, 0}, 0.2);
  const SdfScene b = SdfScene::ball({-0.2, 0.1, 0}, 0.1);
  const SdfScene u = SdfScene::unite({a, b});
  for (Vec3 p : {Vec3{0, 0, 0}, Vec3{0.3, 0.1, -0.2}, Vec3{-0.25, 0.1, 0.05}})
    EXPECT_EQ(eval_sdf(u, p), std::min(eval_sdf(a, p), eval_sdf(b, p)));
}

TEST(EvalSdf, BoxAndCylinderAreExactOnAxes) {
  const SdfScene box = SdfScene::box({0, 0, 0}, {0.2, 0.1, 0.3});
  EXPECT_NEAR(eval_sdf(box, {0.5, 0, 0}), 0.3, 1e-15);
  EXPECT_NEAR(eval_sdf(box, {0, 0, 0}), -0.1, 1e-15);
  EXPECT_NEAR(eval_sdf(box, {0.3, 0.2, 0}), std::sqrt(0.02), 1e-15);
  const SdfScene cyl = SdfScene::cylinder({0, 0, 0}, {0, 0, 2}, 0.1, 0.2);
  EXPECT_NEAR(eval_sdf(cyl, {0, 0, 0.5}), 0.3, 1e-15);
  EXPECT_NEAR(eval_sdf(cyl, {0.4, 0, 0}), 0.3, 1e-15);
  EXPECT_NEAR(eval_sdf(cyl, {0, 0, 0}), -0.1, 1e-15);
}

TEST(EvalSdf, CsgBoundsHoldAtSampledPoints) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const SdfScene a = random_scene(rng);
    const SdfScene b = random_scene(rng);
    const SdfScene u = SdfScene::unite({a, b});
    const SdfScene n = SdfScene::intersect({a, b});
    for (int s = 0; s < 20; ++s) {
      const Vec3 p{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
      const double fa = a.eval(p), fb = b.eval(p);
      EXPECT_LE(u.eval(p), fa);
      EXPECT_LE(u.eval(p), fb);
      EXPECT_GE(n.eval(p), fa);
      EXPECT_GE(n.eval(p), fb);
    }
  }
}

TEST(SdfScene, RejectsInvalidParameters) {
  EXPECT_THROW(SdfScene::ball({0, 0, 0}, 0.0), Error);
  EXPECT_THROW(SdfScene::box({0, 0, 0}, {0.1, -0.1, 0.1}), Error);
  EXPECT_THROW(SdfScene::torus({0, 0, 0}, {0, 0, 0}, 0.2, 0.1), Error);
  Mat3 skew;
  skew(0, 1) = 0.5;
  EXPECT_THROW(SdfScene::rotate(unit_torus(), skew), Error);
  EXPECT_THROW(SdfScene::scale(unit_torus(), -1.0), Error);
  EXPECT_THROW(SdfScene::unite({}), Error);
}

TEST(SdfScene, TextRoundTripPreservesEvaluation) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const SdfScene s = SdfScene::scale(SdfScene::translate(random_scene(rng), {0.01, -0.02, 0.03}), 1.3);
    const SdfScene back = SdfScene::parse(s.to_string());
    EXPECT_EQ(back.to_string(), s.to_string());
    for (int k = 0; k < 10; ++k) {
      const Vec3 p{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
      EXPECT_EQ(back.eval(p), s.eval(p));
    }
  }
  EXPECT_THROW(SdfScene::parse("(ball 0 0 0)"), Error);
  EXPECT_THROW(SdfScene::parse("(sphere 0 0 0 1)"), Error);
  EXPECT_THROW(SdfScene::parse("(ball 0 0 0 1) extra"), Error);
}

TEST(Rasterize, LatticeIncludesBothFaces) {
  const VolumeGrid g = rasterize(SdfScene::ball({0, 0, 0}, 0.5), {2, 2, 2}, {{0, 0, 0}, {1, 1, 1}});
  EXPECT_DOUBLE_EQ(g.at(0, 0, 0), -0.5);
  EXPECT_NEAR(g.at(1, 1, 1), std::sqrt(3.0) - 0.5, 1e-15);
  EXPECT_NEAR(g.at(1, 0, 0), 0.5, 1e-15);
}

TEST(Rasterize, SceneCoveringTheBoxIsNegativeEverywhere) {
  const VolumeGrid g = rasterize(SdfScene::ball({0, 0, 0}, 2.0), {9, 9, 9});
  for (double v : g.values()) EXPECT_LT(v, 0.0);
}

TEST(Rasterize, TorusMinimumWithinOneSpacingOfTubeDepth) {
  const VolumeGrid g = rasterize(unit_torus(), {64, 64, 64});
  // analytic minimum is -r on the core circle; the raster can only miss it
  // by the distance from the circle to the nearest lattice point
  EXPECT_GE(g.min_value(), -0.1 - 1e-12);
  EXPECT_LE(g.min_value(), -0.1 + g.spacing().x);
}

TEST(Rasterize, PositiveHomogeneityUnderUniformScale) {
  Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const SdfScene s = random_scene(rng);
    const double lambda = rng.uniform(0.5, 2.0);
    const VolumeGrid base = rasterize(s, {12, 12, 12});
    const Box3 scaled{lambda * kUnitBounds.min, lambda * kUnitBounds.max};
    const VolumeGrid big = rasterize(SdfScene::scale(s, lambda), {12, 12, 12}, scaled);
    for (std::size_t i = 0; i < base.values().size(); ++i)
      EXPECT_NEAR(big.values()[i], lambda * base.values()[i], 1e-6);
  }
}

TEST(VolumeGrid, ValidatesInvariants) {
  EXPECT_THROW(VolumeGrid({1, 2, 2}, kUnitBounds, std::vector<double>(4)), Error);
  EXPECT_THROW(VolumeGrid({2, 2, 2}, kUnitBounds, std::vector<double>(7)), Error);
  EXPECT_THROW(VolumeGrid({2, 2, 2}, {{0, 0, 0}, {1, 0, 1}}, std::vector<double>(8)), Error);
  std::vector<double> v(8, 0.0);
  v[3] = std::nan("");
  EXPECT_THROW(VolumeGrid({2, 2, 2}, kUnitBounds, v), Error);
}

TEST(Occupancy, ThresholdAndIdempotence) {
  const VolumeGrid neg({2, 2, 2}, kUnitBounds, std::vector<double>(8, -1.0));
  const VolumeGrid pos({2, 2, 2}, kUnitBounds, std::vector<double>(8, 1.0));
  const VolumeGrid zero({2, 2, 2}, kUnitBounds, std::vector<double>(8, 0.0));
  const VolumeGrid on = occupancy(neg), off = occupancy(pos), edge = occupancy(zero);
  for (double v : on.values()) EXPECT_EQ(v, 1.0);
  for (double v : off.values()) EXPECT_EQ(v, 0.0);
  for (double v : edge.values()) EXPECT_EQ(v, 1.0);

  const VolumeGrid ball = rasterize(SdfScene::ball({0, 0, 0}, 0.3), {64, 64, 64});
  const VolumeGrid occ = occupancy(ball);
  double filled = 0.0;
  for (double v : occ.values()) filled += v;
  const double fraction = filled / static_cast<double>(occ.values().size());
  EXPECT_NEAR(fraction, 4.0 / 3.0 * std::numbers::pi * 0.027, 0.005);
  EXPECT_EQ(occ.kind(), FieldKind::kOccupancy);
  const VolumeGrid twice = occupancy(occ);
  EXPECT_TRUE(std::equal(twice.values().begin(), twice.values().end(), occ.values().begin()));
}

TEST(NormalizeScene, Examples) {
  const SdfScene tight = SdfScene::ball({0, 0, 0}, 0.4);
  EXPECT_EQ(normalize_scene(tight).to_string(), tight.to_string());

  const SdfScene big = normalize_scene(SdfScene::ball({0, 0, 0}, 0.8));
  EXPECT_NEAR(big.eval({0, 0, 0}), -0.4, 1e-12);
  EXPECT_NEAR(big.eval({0.4, 0, 0}), 0.0, 1e-12);

  const SdfScene off = normalize_scene(SdfScene::ball({0.3, 0, 0}, 0.1));
  const Box3 b = off.bounds();
  EXPECT_NEAR(b.min.x, -0.4, 1e-12);
  EXPECT_NEAR(b.max.x, 0.4, 1e-12);
  EXPECT_NEAR(off.eval({0, 0, 0}), -0.4, 1e-12);
}

TEST(NormalizeScene, FitsTargetBoxAndIsIdempotent) {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const SdfScene s = SdfScene::translate(SdfScene::scale(random_scene(rng), rng.uniform(0.3, 3.0)),
                                           {rng.uniform(-1, 1), rng.uniform(-1, 1), 0.0});
    const SdfScene n = normalize_scene(s);
    const Box3 b = n.bounds();
    const Vec3 e = b.extent();
    EXPECT_NEAR(std::max({e.x, e.y, e.z}), 0.8, 1e-9);
    for (int a = 0; a < 3; ++a) {
      EXPECT_GE(b.min[a], -0.4 - 1e-9);
      EXPECT_LE(b.max[a], 0.4 + 1e-9);
    }
    const SdfScene again = normalize_scene(n);
    for (int k = 0; k < 20; ++k) {
      const Vec3 p{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
      EXPECT_NEAR(again.eval(p), n.eval(p), 1e-6);
    }
  }
}

TEST(NormalizeScene, EmptyShapeIsAnError) {
  const SdfScene disjoint = SdfScene::intersect(
      {SdfScene::ball({-0.3, 0, 0}, 0.1), SdfScene::ball({0.3, 0, 0}, 0.1)});
  EXPECT_THROW(normalize_scene(disjoint), Error);
  // overlapping boxes but disjoint solids: only the sampling probe sees it
  const SdfScene corner = SdfScene::intersect(
      {SdfScene::ball({-0.1, 0, 0}, 0.12), SdfScene::subtract(SdfScene::ball({0.1, 0, 0}, 0.12),
                                                              SdfScene::ball({0, 0, 0}, 0.3))});
  EXPECT_THROW(normalize_scene(corner), Error);
}

TEST(SampleSurface, BallPointsLieOnSphere) {
  const auto pts = sample_surface(SdfScene::ball({0, 0, 0}, 0.3), 100, 7);
  ASSERT_EQ(pts.size(), 100u);
  for (const Vec3& p : pts) EXPECT_NEAR(norm(p), 0.3, 1e-4);
}

TEST(SampleSurface, DeterministicForSeed) {
  const auto a = sample_surface(unit_torus(), 50, 9);
  const auto b = sample_surface(unit_torus(), 50, 9);
  const auto c = sample_surface(unit_torus(), 50, 10);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(SampleSurface, TorusRadialMeanMatchesAreaWeightedSurface) {
  const auto pts = sample_surface(unit_torus(), 10000, 1);
  double mean = 0.0;
  for (const Vec3& p : pts) mean += std::hypot(p.x, p.y);
  mean /= static_cast<double>(pts.size());
  // area-uniform sampling: E[radial] = R + r^2 / (2R)
  EXPECT_NEAR(mean, 0.25 + 0.01 / 0.5, 0.005);
}

TEST(SampleSurface, EmptySceneFails) {
  const SdfScene corner = SdfScene::intersect(
      {SdfScene::ball({-0.1, 0, 0}, 0.12), SdfScene::subtract(SdfScene::ball({0.1, 0, 0}, 0.12),
                                                              SdfScene::ball({0, 0, 0}, 0.3))});
  SurfaceSampling opts;
  opts.max_attempts_per_point = 50;
  EXPECT_THROW(sample_surface(corner, 10, 1, opts), Error);
}

TEST(VgrdFormat, ExactLayoutAndRoundTrip) {
  RasterFile r;
  r.nx = 2;
  r.ny = 1;
  r.nz = 1;
  r.bounds[3] = 1.0f;
  r.values = {1.0f, -2.5f};
  const std::string bytes = encode_vgrd(r);
  ASSERT_EQ(bytes.size(), kVgrdHeaderBytes + 8);
  EXPECT_EQ(bytes.substr(0, 4), "VGRD");
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[8], 2);
  // 1.0f = 0x3f800000 little-endian
  EXPECT_EQ(static_cast<unsigned char>(bytes[kVgrdHeaderBytes + 3]), 0x3f);
  EXPECT_EQ(static_cast<unsigned char>(bytes[kVgrdHeaderBytes + 2]), 0x80);
  const RasterFile back = decode_vgrd(bytes);
  EXPECT_EQ(back.values, r.values);
  EXPECT_EQ(back.bounds[3], 1.0f);

  EXPECT_THROW(decode_vgrd("VGRX" + bytes.substr(4)), IoError);
  EXPECT_THROW(decode_vgrd(bytes.substr(0, bytes.size() - 1)), IoError);
  EXPECT_THROW(decode_vgrd(bytes + "x"), IoError);
}

TEST(VgrdFormat, VolumeRoundTripThroughFloat) {
  const VolumeGrid g = rasterize(unit_torus(), {5, 6, 7});
  const VolumeGrid back = from_raster(decode_vgrd(encode_vgrd(to_raster(g))));
  EXPECT_EQ(back.dims(), g.dims());
  for (std::size_t i = 0; i < g.values().size(); ++i)
    EXPECT_EQ(back.values()[i], static_cast<double>(static_cast<float>(g.values()[i])));
}
