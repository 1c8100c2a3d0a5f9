#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <gtest/gtest.h>

#include "topoforge/assignment.hpp"
#include "topoforge/error.hpp"
#include "topoforge/pd.hpp"
#include "topoforge/rng.hpp"

using namespace topoforge;

namespace {

PersistencePointSet from_pairs(std::vector<std::pair<double, double>> bd, int dim = 1) {
  std::vector<PersistencePoint> pts;
  for (auto [b, d] : bd) pts.push_back({b, d - b});
  return PersistencePointSet(dim, std::move(pts));
}

PersistencePointSet random_points(Rng& rng, std::size_t n) {
  std::vector<PersistencePoint> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back({rng.uniform(-1, 1), rng.uniform(0, 1)});
  return PersistencePointSet(1, std::move(pts));
}

// Exhaustive matching: each point of A goes to an unused point of B or to
// the diagonal; leftovers of B go to the diagonal. Returns {sum, max}.
std::pair<double, double> brute_match(const std::vector<PersistencePoint>& A,
                                      const std::vector<PersistencePoint>& B) {
  double best_sum = std::numeric_limits<double>::infinity();
  double best_max = best_sum;
  std::vector<bool> used(B.size(), false);
  const auto cost = [](const PersistencePoint& p, const PersistencePoint& q) {
    return std::max(std::abs(p.birth - q.birth), std::abs(p.death() - q.death()));
  };
  const auto rec = [&](auto&& self, std::size_t i, double sum, double mx) -> void {
    if (i == A.size()) {
      for (std::size_t j = 0; j < B.size(); ++j) {
        if (used[j]) continue;
        sum += B[j].persistence / 2;
        mx = std::max(mx, B[j].persistence / 2);
      }
      best_sum = std::min(best_sum, sum);
      best_max = std::min(best_max, mx);
      return;
    }
    self(self, i + 1, sum + A[i].persistence / 2, std::max(mx, A[i].persistence / 2));
    for (std::size_t j = 0; j < B.size(); ++j) {
      if (used[j]) continue;
      used[j] = true;
      const double c = cost(A[i], B[j]);
      self(self, i + 1, sum + c, std::max(mx, c));
      used[j] = false;
    }
  };
  rec(rec, 0, 0.0, 0.0);
  return {best_sum, best_max};
}

}  // namespace

TEST(PointSet, CanonicalOrderAndValidation) {
  const auto s = PersistencePointSet(0, {{0.1, 0.3}, {-0.2, 0.3}, {0.0, 0.5}, {0.4, 0.0}});
  ASSERT_EQ(s.size(), 4u);
  EXPECT_EQ(s.points()[0], (PersistencePoint{0.0, 0.5}));
  EXPECT_EQ(s.points()[1], (PersistencePoint{-0.2, 0.3}));
  EXPECT_EQ(s.points()[2], (PersistencePoint{0.1, 0.3}));
  EXPECT_THROW(PersistencePointSet(0, {{0.0, -0.1}}), Error);
  EXPECT_THROW(PersistencePointSet(0, {{std::nan(""), 0.1}}), Error);
}

TEST(ToPoints, Examples) {
  DiagramMetadata meta{{8, 8, 8}, kUnitBounds, -0.3, 0.6};
  const PersistenceDiagramSet pds(meta, {{1, -0.1, 0.15, 3, 9}, {0, -0.3}});
  const auto loops = to_points(pds, 1);
  ASSERT_EQ(loops.size(), 1u);
  EXPECT_EQ(loops.points()[0].birth, -0.1);
  EXPECT_DOUBLE_EQ(loops.points()[0].persistence, 0.25);
  EXPECT_FALSE(loops.points()[0].capped);

  const auto comps = to_points(pds, 0);
  ASSERT_EQ(comps.size(), 1u);
  EXPECT_TRUE(comps.points()[0].capped);
  EXPECT_DOUBLE_EQ(comps.points()[0].death(), 0.6);
  EXPECT_TRUE(to_points(pds, 0, false).empty());
  EXPECT_TRUE(to_points(PersistenceDiagramSet(meta, {}), 2).empty());
}

TEST(ToPoints, TorusHasOneDominantLoop) {
  const VolumeGrid g = rasterize(SdfScene::torus({0, 0, 0}, {0, 0, 1}, 0.25, 0.1), {64, 64, 64});
  const double h = g.spacing().x;
  const auto pts = to_points(compute_persistence(build_filtration(g)), 1);
  ASSERT_GE(pts.size(), 1u);
  EXPECT_GT(pts.points()[0].persistence, 0.2);
  for (std::size_t i = 1; i < pts.size(); ++i) EXPECT_LT(pts.points()[i].persistence, 4 * h);
}

TEST(TopK, Examples) {
  const auto three = from_pairs({{0, 0.5}, {0, 0.2}, {0.1, 0.2}});
  const auto padded = top_k(three, 16);
  ASSERT_EQ(padded.size(), 16u);
  EXPECT_EQ(padded.real_count(), 3u);
  for (std::size_t i = 3; i < 16; ++i) {
    EXPECT_TRUE(padded.points()[i].pad);
    EXPECT_EQ(padded.points()[i].birth, 0.0);
    EXPECT_EQ(padded.points()[i].persistence, 0.0);
  }

  const auto one = top_k(from_pairs({{0, 0.5}, {0, 0.2}}), 1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one.points()[0], (PersistencePoint{0, 0.5}));

  const auto tie = top_k(PersistencePointSet(1, {{0.1, 0.3}, {-0.2, 0.3}}), 1);
  EXPECT_EQ(tie.points()[0].birth, -0.2);
  EXPECT_THROW(top_k(three, 0), Error);
}

TEST(TopK, Idempotent) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = random_points(rng, rng.index(30));
    for (std::size_t k : {1u, 5u, 16u, 40u}) {
      const auto once = top_k(s, k);
      EXPECT_EQ(top_k(once, k).points(), once.points());
    }
  }
}

TEST(EditTowardDiagonal, Examples) {
  const auto s = PersistencePointSet(1, {{-0.1, 0.25}});
  EXPECT_EQ(edit_toward_diagonal(s, 0, 1.0).points()[0], (PersistencePoint{-0.1, 0.0}));
  EXPECT_EQ(edit_toward_diagonal(s, 0, 0.0).points(), s.points());
  EXPECT_EQ(edit_toward_diagonal(s, 0, 0.5).points()[0].persistence, 0.125);
  EXPECT_THROW(edit_toward_diagonal(s, 1, 0.5), Error);
  EXPECT_THROW(edit_toward_diagonal(s, 0, 1.5), Error);
  EXPECT_THROW(edit_toward_diagonal(s, 0, -0.1), Error);
}

TEST(EditTowardDiagonal, ResortsAndComposes) {
  const auto s = from_pairs({{0, 1.0}, {0.2, 0.7}});
  const auto e = edit_toward_diagonal(s, 0, 1.0);
  EXPECT_EQ(e.points()[0].birth, 0.2);
  EXPECT_EQ(e.points()[1].persistence, 0.0);

  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pts = random_points(rng, 1);
    const double f1 = rng.uniform(), f2 = rng.uniform();
    const auto twice = edit_toward_diagonal(edit_toward_diagonal(pts, 0, f1), 0, f2);
    const auto once = edit_toward_diagonal(pts, 0, 1.0 - (1.0 - f1) * (1.0 - f2));
    EXPECT_NEAR(twice.points()[0].persistence, once.points()[0].persistence, 1e-12);
    EXPECT_LE(twice.points()[0].persistence, pts.points()[0].persistence);
  }
}

TEST(PersistenceImage, EmptyIsZero) {
  const auto img = persistence_image(PersistencePointSet(), {0, 1, 0, 1});
  EXPECT_EQ(img.values.size(), 32u * 32u);
  for (double v : img.values) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(persistence_image(PersistencePointSet(), {0, 0, 0, 1}), Error);
  EXPECT_THROW(persistence_image(PersistencePointSet(), {0, 1, 0, 1}, {.sigma = 0.0}), Error);
  EXPECT_THROW(persistence_image(PersistencePointSet(), {0, 1, 0, 1}, {.width = 0}), Error);
}

TEST(PersistenceImage, SingleCenteredGaussian) {
  const ImageRange range{-0.5, 0.5, 0.0, 1.0};
  PersistenceImageOptions opt;
  opt.width = 33;
  opt.height = 33;
  opt.sigma = 0.1;
  opt.weight = ImageWeight::kConstant;
  const auto img = persistence_image(PersistencePointSet(0, {{0.0, 0.5}}), range, opt);
  const auto arg = std::max_element(img.values.begin(), img.values.end()) - img.values.begin();
  EXPECT_EQ(arg % 33, 16);
  EXPECT_EQ(arg / 33, 16);
  for (int y = 0; y < 33; ++y)
    for (int x = 0; x < 33; ++x) EXPECT_NEAR(img.at(x, y), img.at(32 - x, 32 - y), 1e-12);
  // the center pixel lands exactly on the point
  EXPECT_NEAR(img.at(16, 16), 1.0 / (2 * std::numbers::pi * 0.01), 1e-9);

  opt.weight = ImageWeight::kLinear;
  const auto lin = persistence_image(PersistencePointSet(0, {{0.0, 0.5}}), range, opt);
  EXPECT_NEAR(lin.at(3, 7), 0.5 * img.at(3, 7), 1e-15);
}

TEST(PersistenceImage, AdditiveOverDisjointDiagrams) {
  Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_points(rng, 7), b = random_points(rng, 5);
    std::vector<PersistencePoint> all = a.points();
    all.insert(all.end(), b.points().begin(), b.points().end());
    const ImageRange r{-1, 1, 0, 1};
    const auto ia = persistence_image(a, r), ib = persistence_image(b, r);
    const auto iu = persistence_image(PersistencePointSet(1, all), r);
    for (std::size_t i = 0; i < iu.values.size(); ++i) EXPECT_NEAR(iu.values[i], ia.values[i] + ib.values[i], 1e-9);
  }
}

TEST(PersistenceImage, PaddingContributesNothing) {
  const auto s = from_pairs({{0.1, 0.4}});
  const ImageRange r{-0.2, 0.4, 0, 0.5};
  EXPECT_EQ(persistence_image(top_k(s, 16), r, {.weight = ImageWeight::kConstant}).values,
            persistence_image(s, r, {.weight = ImageWeight::kConstant}).values);
}

TEST(PersistenceImage, DefaultRange) {
  const std::vector<PersistencePointSet> sets{from_pairs({{-0.2, 0.1}, {0.1, 0.5}}), from_pairs({{0.3, 0.4}})};
  const auto r = default_image_range(sets, 0.02);
  EXPECT_EQ(r.birth_min, -0.2);
  EXPECT_EQ(r.birth_max, 0.3);
  EXPECT_EQ(r.persistence_min, 0.0);
  EXPECT_DOUBLE_EQ(r.persistence_max, 0.4);
  const auto single = default_image_range(std::vector<PersistencePointSet>{from_pairs({{0.1, 0.1}})}, 0.02);
  EXPECT_NEAR(single.birth_min, 0.04, 1e-15);
  EXPECT_NEAR(single.birth_max, 0.16, 1e-15);
  EXPECT_NEAR(single.persistence_max, 0.12, 1e-15);
  const auto raster = image_raster(persistence_image(sets[0], r));
  EXPECT_EQ(raster.nx, 32u);
  EXPECT_EQ(raster.nz, 1u);
  EXPECT_EQ(decode_vgrd(encode_vgrd(raster)).values, raster.values);
}

TEST(PersistenceLandscape, Examples) {
  const auto one = from_pairs({{0.2, 1.0}});
  const std::vector<double> apex{0.6};
  EXPECT_NEAR(persistence_landscape(one, 1, apex)[0], 0.4, 1e-15);
  const auto grid = sample_grid(-1, 2, 61);
  for (double v : persistence_landscape(one, 2, grid)) EXPECT_EQ(v, 0.0);

  // Direct tent evaluation at t = 1.5 for pairs (0,2) and (1,3).
  const double t = 1.5;
  const double tent_a = std::max(0.0, std::min(t - 0.0, 2.0 - t));
  const double tent_b = std::max(0.0, std::min(t - 1.0, 3.0 - t));
  const double oracle = std::max(tent_a, tent_b);
  EXPECT_EQ(oracle, 0.5);
  const auto two = from_pairs({{0, 2}, {1, 3}});
  const std::vector<double> at{t};
  EXPECT_EQ(persistence_landscape(two, 1, at)[0], oracle);
  EXPECT_EQ(persistence_landscape(two, 2, at)[0], std::min(tent_a, tent_b));
}

TEST(PersistenceLandscape, LevelsAreOrderedAndLipschitz) {
  Rng rng(14);
  const auto grid = sample_grid(-1.5, 2.5, 401);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_points(rng, 1 + rng.index(12));
    const auto b = random_points(rng, 1 + rng.index(12));
    const auto l1 = persistence_landscape(a, 1, grid);
    const auto l2 = persistence_landscape(a, 2, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_GE(l1[i], l2[i]);
    const auto m1 = persistence_landscape(b, 1, grid);
    double sup = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) sup = std::max(sup, std::abs(l1[i] - m1[i]));
    EXPECT_LE(sup, bottleneck_distance(a, b) + 1e-12);
  }
}

TEST(Assignment, MatchesPermutationSearch) {
  Rng rng(15);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t rows = 1 + rng.index(6);
    const std::size_t cols = rows + rng.index(2);
    std::vector<double> c(rows * cols);
    for (double& x : c) x = rng.uniform(0, 10);
    std::vector<std::size_t> perm(cols);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
      double s = 0;
      for (std::size_t i = 0; i < rows; ++i) s += c[i * cols + perm[i]];
      best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    const auto a = solve_assignment(c, rows, cols);
    EXPECT_NEAR(a.total, best, 1e-9);
    std::vector<std::size_t> used = a.column_of_row;
    std::sort(used.begin(), used.end());
    EXPECT_EQ(std::unique(used.begin(), used.end()), used.end());
  }
  EXPECT_THROW(solve_assignment(std::vector<double>(6, 0.0), 3, 2), Error);
}

TEST(Distances, Examples) {
  const auto unit = from_pairs({{0, 1}});
  const PersistencePointSet empty(1, {});
  EXPECT_EQ(bottleneck_distance(unit, unit), 0.0);
  EXPECT_EQ(wasserstein_distance(unit, unit), 0.0);
  EXPECT_EQ(bottleneck_distance(unit, empty), 0.5);
  EXPECT_EQ(wasserstein_distance(unit, empty), 0.5);
  EXPECT_NEAR(bottleneck_distance(unit, from_pairs({{0.1, 1.1}})), 0.1, 1e-15);
  EXPECT_EQ(bottleneck_distance(empty, empty), 0.0);
  EXPECT_THROW(bottleneck_distance(unit, from_pairs({{0, 1}}, 0)), Error);
}

TEST(Distances, MatchExhaustiveSearch) {
  Rng rng(16);
  for (int trial = 0; trial < 60; ++trial) {
    const auto a = random_points(rng, rng.index(6));
    const auto b = random_points(rng, rng.index(6));
    const auto [sum, mx] = brute_match(a.points(), b.points());
    EXPECT_NEAR(wasserstein_distance(a, b), sum, 1e-12);
    EXPECT_EQ(bottleneck_distance(a, b), mx);
  }
}

TEST(Distances, PseudoMetricProperties) {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = random_points(rng, rng.index(20));
    const auto b = random_points(rng, rng.index(20));
    const auto c = random_points(rng, rng.index(20));
    const double wab = wasserstein_distance(a, b), wbc = wasserstein_distance(b, c);
    const double bab = bottleneck_distance(a, b), bbc = bottleneck_distance(b, c);
    EXPECT_NEAR(wab, wasserstein_distance(b, a), 1e-9);
    EXPECT_EQ(bab, bottleneck_distance(b, a));
    EXPECT_LE(wasserstein_distance(a, c), wab + wbc + 1e-9);
    EXPECT_LE(bottleneck_distance(a, c), bab + bbc + 1e-9);
    EXPECT_LE(bab, wab + 1e-12);
    EXPECT_NEAR(wasserstein_distance(a, a), 0.0, 1e-12);
    EXPECT_EQ(bottleneck_distance(a, a), 0.0);
  }
}

TEST(Distances, IgnorePaddingAndEnforceGuards) {
  Rng rng(18);
  const auto a = random_points(rng, 5), b = random_points(rng, 3);
  EXPECT_EQ(bottleneck_distance(top_k(a, 16), top_k(b, 9)), bottleneck_distance(a, b));
  EXPECT_THROW(bottleneck_distance(random_points(rng, 257), b), Error);
  EXPECT_THROW(wasserstein_distance(a, random_points(rng, 129)), Error);
  EXPECT_NO_THROW(bottleneck_distance(random_points(rng, 256), random_points(rng, 256)));
}

TEST(Stability, SupNormPerturbationBoundsBottleneck) {
  Rng rng(19);
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<double> v(6 * 6 * 6), w(v.size());
    for (double& x : v) x = rng.uniform(-1, 1);
    const double eps = trial % 2 ? 0.01 : 0.005;
    for (std::size_t i = 0; i < v.size(); ++i) w[i] = v[i] + rng.uniform(-eps, eps);
    const auto p = compute_persistence(build_filtration(VolumeGrid({6, 6, 6}, kUnitBounds, v)));
    const auto q = compute_persistence(build_filtration(VolumeGrid({6, 6, 6}, kUnitBounds, w)));
    for (int dim = 0; dim <= 2; ++dim)
      EXPECT_LE(bottleneck_distance(to_points(p, dim), to_points(q, dim)), eps + 1e-9) << dim;
  }
}

TEST(PointsTsv, RoundTrip) {
  const auto s = top_k(PersistencePointSet(0, {{-0.3, 0.9, true, false}, {0.1, 1.0 / 3.0}}), 4);
  const std::string text = format_points_tsv(s, {"seed=1"});
  EXPECT_EQ(text.substr(0, text.find('\n')), "# topoforge-points v1 dim=0");
  const auto back = parse_points_tsv(text);
  EXPECT_EQ(back.dim(), 0);
  EXPECT_EQ(back.points(), s.points());
  EXPECT_THROW(parse_points_tsv("0\t1\t-\n"), IoError);
  EXPECT_THROW(parse_points_tsv("# topoforge-points v1 dim=1\n0\t1\tweird\n"), IoError);
  EXPECT_THROW(parse_points_tsv("# topoforge-points v1 dim=1\n0\t-1\t-\n"), IoError);
}

TEST(LandscapeTsv, Layout) {
  const std::vector<double> ts{0.0, 0.5};
  const std::string text = format_landscape_tsv(ts, {{0.0, 0.25}, {0.0, 0.0}});
  EXPECT_EQ(text, "# topoforge-landscape v1 levels=2\n# t\tlambda1\tlambda2\n0\t0\t0\n0.5\t0.25\t0\n");
  EXPECT_THROW(format_landscape_tsv(ts, {{0.0}}), Error);
}

TEST(DiagramSvg, DrawsDiagonalAndPoints) {
  DiagramMetadata meta{{8, 8, 8}, kUnitBounds, -0.3, 0.6};
  const PersistenceDiagramSet pds(meta, {{1, -0.1, 0.15, 3, 9}, {0, -0.3}});
  const std::string svg = diagram_svg(pds);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
  EXPECT_NE(svg.find("<circle"), std::string::npos);
  EXPECT_NE(svg.find("<path"), std::string::npos);
}
