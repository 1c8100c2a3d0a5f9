#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include <gtest/gtest.h>

#include "topoforge/cubical.hpp"
#include "topoforge/error.hpp"
#include "topoforge/rng.hpp"

using namespace topoforge;

namespace {

VolumeGrid random_grid(Rng& rng, GridDims dims, int levels = 0) {
  std::vector<double> v(dims.count());
  for (double& x : v) {
    x = rng.uniform(-1.0, 1.0);
    // a handful of levels forces many ties in the filtration order
    if (levels > 0) x = std::floor(x * levels) / levels;
  }
  return VolumeGrid(dims, kUnitBounds, std::move(v));
}

using PairKey = std::tuple<int, CellId, CellId, double, double>;

std::vector<PairKey> keys(const PersistenceDiagramSet& pds) {
  std::vector<PairKey> out;
  for (const auto& p : pds.pairs()) out.emplace_back(p.dim, p.birth_cell, p.death_cell, p.birth, p.death);
  std::sort(out.begin(), out.end());
  return out;
}

VolumeGrid constant_grid(GridDims dims, double c) {
  return VolumeGrid(dims, kUnitBounds, std::vector<double>(dims.count(), c));
}

SdfScene torus() { return SdfScene::torus({0, 0, 0}, {0, 0, 1}, 0.25, 0.1); }

}  // namespace

TEST(BuildFiltration, SmallestGridCellCounts) {
  Rng rng(1);
  const VolumeGrid g = random_grid(rng, {2, 2, 2});
  const auto k = build_filtration(g);
  EXPECT_EQ(k.cell_count(0), 8u);
  EXPECT_EQ(k.cell_count(1), 12u);
  EXPECT_EQ(k.cell_count(2), 6u);
  EXPECT_EQ(k.cell_count(3), 1u);
  EXPECT_EQ(k.cell_count(), 27u);
  const auto voxels = k.cells_of_dimension(3);
  ASSERT_EQ(voxels.size(), 1u);
  EXPECT_EQ(k.value(voxels[0]), g.max_value());
}

TEST(BuildFiltration, CellCountFormula) {
  const GridDims d{5, 3, 4};
  const auto k = build_filtration(constant_grid(d, 0.0));
  const std::size_t nx = 5, ny = 3, nz = 4;
  EXPECT_EQ(k.cell_count(0), nx * ny * nz);
  EXPECT_EQ(k.cell_count(1), (nx - 1) * ny * nz + nx * (ny - 1) * nz + nx * ny * (nz - 1));
  EXPECT_EQ(k.cell_count(2), (nx - 1) * (ny - 1) * nz + (nx - 1) * ny * (nz - 1) + nx * (ny - 1) * (nz - 1));
  EXPECT_EQ(k.cell_count(3), (nx - 1) * (ny - 1) * (nz - 1));
  for (int dim = 0; dim < 4; ++dim) EXPECT_EQ(k.cells_of_dimension(dim).size(), k.cell_count(dim));
}

TEST(BuildFiltration, ConstantGridAndUniqueMinimum) {
  const auto k = build_filtration(constant_grid({3, 3, 3}, 0.7));
  for (CellId c = 0; c < k.cell_count(); ++c) EXPECT_EQ(k.value(c), 0.7);

  std::vector<double> v(27, 1.0);
  v[13] = -2.0;
  const auto m = build_filtration(VolumeGrid({3, 3, 3}, kUnitBounds, v));
  int at_min = 0;
  for (CellId c = 0; c < m.cell_count(); ++c) {
    if (m.value(c) == -2.0) {
      ++at_min;
      EXPECT_EQ(m.dimension(c), 0);
      EXPECT_EQ(m.anchor(c), (std::array<int, 3>{1, 1, 1}));
    }
  }
  EXPECT_EQ(at_min, 1);
}

TEST(BuildFiltration, FacesNeverExceedCofaces) {
  Rng rng(2);
  const auto k = build_filtration(random_grid(rng, {7, 6, 5}));
  std::array<CellId, 6> faces{};
  std::array<CellId, 6> cofaces{};
  for (int trial = 0; trial < 2000; ++trial) {
    const auto c = static_cast<CellId>(rng.index(k.cell_count()));
    const int n = k.faces(c, faces);
    EXPECT_EQ(n, 2 * k.dimension(c));
    for (int i = 0; i < n; ++i) {
      EXPECT_LE(k.value(faces[i]), k.value(c));
      EXPECT_EQ(k.dimension(faces[i]), k.dimension(c) - 1);
      EXPECT_TRUE(k.precedes(faces[i], c));
    }
    const int m = k.cofaces(c, cofaces);
    for (int i = 0; i < m; ++i) EXPECT_GE(k.value(cofaces[i]), k.value(c));
  }
}

TEST(BuildFiltration, RejectsDegenerateGrid) {
  EXPECT_THROW(VolumeGrid({1, 4, 4}, kUnitBounds, std::vector<double>(16)), Error);
}

TEST(ComputePersistence, SolidBoxHasOneEssentialComponent) {
  const auto pds = compute_persistence(build_filtration(constant_grid({6, 5, 4}, -1.0)));
  EXPECT_EQ(pds.essential_count(), 1u);
  for (const auto& p : pds.pairs()) {
    if (p.essential()) {
      EXPECT_EQ(p.dim, 0);
      EXPECT_EQ(p.birth, -1.0);
    } else {
      EXPECT_EQ(p.persistence(), 0.0);
    }
  }
  EXPECT_EQ(betti_at(pds, -1.0), (std::array<int, 4>{1, 0, 0, 0}));
  EXPECT_EQ(betti_at(pds, 5.0), (std::array<int, 4>{1, 0, 0, 0}));
  EXPECT_EQ(betti_at(pds, -1.5), (std::array<int, 4>{0, 0, 0, 0}));
}

TEST(ComputePersistence, CellCountIdentity) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const GridDims d{2 + static_cast<int>(rng.index(5)), 2 + static_cast<int>(rng.index(5)),
                     2 + static_cast<int>(rng.index(5))};
    const auto k = build_filtration(random_grid(rng, d, trial % 2 ? 3 : 0));
    const auto pds = compute_persistence(k);
    EXPECT_EQ(2 * pds.finite_count() + pds.essential_count(), k.cell_count());
    EXPECT_EQ(pds.essential_count(), 1u);
    for (const auto& p : pds.pairs()) {
      EXPECT_LE(p.birth, p.death);
      if (!p.essential()) EXPECT_EQ(k.dimension(p.death_cell), k.dimension(p.birth_cell) + 1);
      EXPECT_EQ(k.dimension(p.birth_cell), p.dim);
    }
  }
}

TEST(ComputePersistence, MatchesNaiveReductionOnRandomGrids) {
  Rng rng(4);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(rng.index(6));
    const GridDims d{n, 2 + static_cast<int>(rng.index(6)), 2 + static_cast<int>(rng.index(6))};
    // every third grid is heavily quantized to exercise tie-breaking
    const auto k = build_filtration(random_grid(rng, d, trial % 3 == 0 ? 2 : 0));
    EXPECT_EQ(keys(compute_persistence(k)), keys(compute_persistence_naive(k))) << "trial " << trial;
  }
}

TEST(ComputePersistence, MatchesNaiveOnConstantAndTwoCubeGrids) {
  const auto c = build_filtration(constant_grid({4, 4, 4}, 0.25));
  const auto naive = compute_persistence_naive(c);
  EXPECT_EQ(naive.essential_count(), 1u);
  EXPECT_EQ(keys(naive), keys(compute_persistence(c)));

  Rng rng(5);
  const auto k = build_filtration(random_grid(rng, {2, 2, 2}));
  const auto pds = compute_persistence_naive(k);
  EXPECT_EQ(2 * pds.finite_count() + pds.essential_count(), 27u);
}

TEST(ComputePersistenceNaive, EnforcesSizeGuard) {
  const auto k = build_filtration(constant_grid({30, 30, 30}, 0.0));
  EXPECT_THROW(compute_persistence_naive(k), Error);
  EXPECT_THROW(compute_persistence_naive(build_filtration(constant_grid({4, 4, 4}, 0.0)), {.max_cells = 100}),
               Error);
}

TEST(ComputePersistence, BallIsContractibleAtSurface) {
  const VolumeGrid g = rasterize(SdfScene::ball({0, 0, 0}, 0.3), {64, 64, 64});
  const double h = g.spacing().x;
  const auto pds = compute_persistence(build_filtration(g));
  ASSERT_EQ(pds.essential_count(), 1u);
  const auto dim0 = pds.pairs(0);
  const auto ess = std::find_if(dim0.begin(), dim0.end(), [](const auto& p) { return p.essential(); });
  EXPECT_NEAR(ess->birth, -0.3, h);
  for (int dim = 1; dim <= 2; ++dim)
    for (const auto& p : pds.pairs(dim))
      if (p.birth <= 0.0 && 0.0 < p.death) EXPECT_LE(p.persistence(), 2 * h);
  EXPECT_EQ(betti_at(pds, 0.0), (std::array<int, 4>{1, 0, 0, 0}));
}

TEST(ComputePersistence, BallAgreesWithNaiveAtSixteen) {
  const VolumeGrid g = rasterize(SdfScene::ball({0, 0, 0}, 0.3), {16, 16, 16});
  const auto k = build_filtration(g);
  EXPECT_EQ(keys(compute_persistence(k)), keys(compute_persistence_naive(k)));
}

TEST(ComputePersistence, TorusLoopMatchesAnalyticPair) {
  for (int n : {32, 64}) {
    const VolumeGrid g = rasterize(torus(), {n, n, n});
    const double h = g.spacing().x;
    const auto pds = compute_persistence(build_filtration(g));
    const auto loops = pds.pairs(1);
    const auto best = std::max_element(loops.begin(), loops.end(), [](const auto& a, const auto& b) {
      return a.persistence() < b.persistence();
    });
    ASSERT_NE(best, loops.end());
    EXPECT_NEAR(best->birth, -0.1, 2 * h) << n;
    EXPECT_NEAR(best->death, 0.15, 2 * h) << n;
    EXPECT_EQ(betti_at(pds, 0.0), (std::array<int, 4>{1, 1, 0, 0})) << n;
  }
}

TEST(ComputePersistence, TorusAgreesWithNaiveAtThirtyTwo) {
  const auto k = build_filtration(rasterize(torus(), {32, 32, 32}));
  EXPECT_EQ(keys(compute_persistence(k)), keys(compute_persistence_naive(k, {.max_cells = 300000})));
}

TEST(BettiAt, ReferenceShapes) {
  const auto betti0 = [](const SdfScene& s) {
    return betti_at(compute_persistence(build_filtration(rasterize(s, {48, 48, 48}))), 0.0);
  };
  EXPECT_EQ(betti0(torus()), (std::array<int, 4>{1, 1, 0, 0}));
  EXPECT_EQ(betti0(SdfScene::unite({SdfScene::ball({-0.22, 0, 0}, 0.15), SdfScene::ball({0.22, 0, 0}, 0.15)})),
            (std::array<int, 4>{2, 0, 0, 0}));
  EXPECT_EQ(betti0(SdfScene::subtract(SdfScene::ball({0, 0, 0}, 0.35), SdfScene::ball({0, 0, 0}, 0.2))),
            (std::array<int, 4>{1, 0, 1, 0}));
}

TEST(BettiAt, DisjointUnionIsAdditive) {
  const SdfScene left = SdfScene::torus({-0.25, 0, 0}, {0, 0, 1}, 0.15, 0.06);
  const SdfScene right = SdfScene::subtract(SdfScene::ball({0.25, 0, 0}, 0.2), SdfScene::ball({0.25, 0, 0}, 0.1));
  const auto betti0 = [](const SdfScene& s) {
    return betti_at(compute_persistence(build_filtration(rasterize(s, {48, 48, 48}))), 0.0);
  };
  const auto a = betti0(left);
  const auto b = betti0(right);
  const auto u = betti0(SdfScene::unite({left, right}));
  for (int d = 0; d < 4; ++d) EXPECT_EQ(u[d], a[d] + b[d]) << d;
}

TEST(EulerCharacteristic, Examples) {
  const auto box = build_filtration(constant_grid({5, 5, 5}, -1.0));
  EXPECT_EQ(euler_characteristic_at(box, 0.0), 1);
  const auto t = build_filtration(rasterize(torus(), {40, 40, 40}));
  EXPECT_EQ(euler_characteristic_at(t, 0.0), 0);
}

TEST(EulerCharacteristic, MatchesAlternatingBettiSum) {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const auto k = build_filtration(random_grid(rng, {6, 7, 5}, trial % 2 ? 4 : 0));
    const auto pds = compute_persistence(k);
    for (int i = 0; i < 10; ++i) {
      const double t = rng.uniform(-1.1, 1.1);
      const auto b = betti_at(pds, t);
      EXPECT_EQ(euler_characteristic_at(k, t), b[0] - b[1] + b[2] - b[3]);
    }
  }
}

TEST(ComputePersistence, ShiftAndScaleEquivariance) {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    // dyadic values keep the shifted and scaled arithmetic exact
    std::vector<double> v(6 * 5 * 4);
    for (double& x : v) x = static_cast<double>(rng.index(64)) / 32.0 - 1.0;
    const VolumeGrid g({6, 5, 4}, kUnitBounds, v);
    std::vector<double> shifted(v), scaled(v);
    for (double& x : shifted) x += 0.25;
    for (double& x : scaled) x *= 2.0;
    const auto base = compute_persistence(build_filtration(g));
    const auto s = compute_persistence(build_filtration(VolumeGrid({6, 5, 4}, kUnitBounds, shifted)));
    const auto m = compute_persistence(build_filtration(VolumeGrid({6, 5, 4}, kUnitBounds, scaled)));
    ASSERT_EQ(base.pairs().size(), s.pairs().size());
    ASSERT_EQ(base.pairs().size(), m.pairs().size());
    auto kb = keys(base), ks = keys(s), km = keys(m);
    for (std::size_t i = 0; i < kb.size(); ++i) {
      EXPECT_EQ(std::get<1>(kb[i]), std::get<1>(ks[i]));
      EXPECT_EQ(std::get<2>(kb[i]), std::get<2>(km[i]));
      EXPECT_EQ(std::get<3>(ks[i]), std::get<3>(kb[i]) + 0.25);
      EXPECT_EQ(std::get<4>(ks[i]), std::get<4>(kb[i]) + 0.25);
      EXPECT_EQ(std::get<3>(km[i]), 2.0 * std::get<3>(kb[i]));
      EXPECT_EQ(std::get<4>(km[i]), 2.0 * std::get<4>(kb[i]));
    }
  }
}

TEST(DiagramTsv, FormatAndParse) {
  const auto pds = compute_persistence(build_filtration(constant_grid({3, 3, 3}, -1.0)));
  const std::string text = format_diagram_tsv(pds);
  EXPECT_EQ(text, "# topoforge-pd v1 dims=3x3x3\n# range=-1 -1\n0\t-1\tinf\n");
  const auto back = parse_diagram_tsv(text);
  ASSERT_EQ(back.pairs().size(), 1u);
  EXPECT_TRUE(back.pairs()[0].essential());
  EXPECT_EQ(back.metadata().dims, (GridDims{3, 3, 3}));

  DiagramWriteOptions keep;
  keep.keep_zero_persistence = true;
  EXPECT_EQ(parse_diagram_tsv(format_diagram_tsv(pds, keep)).pairs().size(), pds.pairs().size());

  EXPECT_THROW(parse_diagram_tsv("0\t1\t2\n"), IoError);
  EXPECT_THROW(parse_diagram_tsv("# topoforge-pd v1 dims=2x2x2\n0\t1\n"), IoError);
  EXPECT_THROW(parse_diagram_tsv("# topoforge-pd v1 dims=2x2x2\n0\t2\t1\n"), IoError);
}

TEST(DiagramTsv, TorusRoundTripKeepsValues) {
  const auto pds = compute_persistence(build_filtration(rasterize(torus(), {24, 24, 24})));
  const auto back = parse_diagram_tsv(format_diagram_tsv(pds));
  std::size_t nonzero = 0;
  for (const auto& p : pds.pairs())
    if (p.essential() || p.persistence() > 0) ++nonzero;
  ASSERT_EQ(back.pairs().size(), nonzero);
  EXPECT_EQ(back.metadata().value_max, pds.metadata().value_max);
}
