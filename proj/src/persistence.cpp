#include <algorithm>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "topoforge/cubical.hpp"

namespace topoforge {

namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Cells of one dimension in filtration order, plus the value of each.
struct OrderedCells {
  std::vector<CellId> cells;
  std::vector<double> values;
};

// Buckets every cell by dimension, sorts each bucket by (value, id) and
// records each cell's rank inside its bucket. Ranks across dimensions are
// never compared, so per-bucket ranks realize the global
// (value, dimension, id) order.
void order_cells(const FilteredCubicalComplex& complex, std::array<OrderedCells, 4>& ordered,
                 std::vector<std::uint32_t>& rank) {
  std::array<std::vector<std::pair<double, CellId>>, 4> keyed;
  for (int d = 0; d < 4; ++d) keyed[d].reserve(complex.cell_count(d));
  CellId id = 0;
  for (int z = 0; z < complex.extent_z(); ++z)
    for (int y = 0; y < complex.extent_y(); ++y)
      for (int x = 0; x < complex.extent_x(); ++x, ++id)
        keyed[(x & 1) + (y & 1) + (z & 1)].emplace_back(complex.value(id), id);

  rank.assign(complex.cell_count(), kNone);
  for (int d = 0; d < 4; ++d) {
    auto& k = keyed[d];
    std::sort(k.begin(), k.end());
    ordered[d].cells.resize(k.size());
    ordered[d].values.resize(k.size());
    for (std::size_t r = 0; r < k.size(); ++r) {
      ordered[d].values[r] = k[r].first;
      ordered[d].cells[r] = k[r].second;
      rank[k[r].second] = static_cast<std::uint32_t>(r);
    }
    std::vector<std::pair<double, CellId>>().swap(k);
  }
}

std::uint32_t find_root(std::vector<std::uint32_t>& parent, std::uint32_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

// Reduced columns of the dimension-1 reduction, stored once and never
// modified. Entries are edge ranks in increasing order.
class ColumnPool {
 public:
  std::uint32_t add(const std::vector<std::uint32_t>& column) {
    offsets_.push_back(entries_.size());
    lengths_.push_back(static_cast<std::uint32_t>(column.size()));
    entries_.insert(entries_.end(), column.begin(), column.end());
    return static_cast<std::uint32_t>(offsets_.size() - 1);
  }
  const std::uint32_t* begin(std::uint32_t slot) const { return entries_.data() + offsets_[slot]; }
  const std::uint32_t* end(std::uint32_t slot) const { return begin(slot) + lengths_[slot]; }

 private:
  std::vector<std::uint64_t> offsets_;
  std::vector<std::uint32_t> lengths_;
  std::vector<std::uint32_t> entries_;
};

}  // namespace

PersistenceDiagramSet compute_persistence(const FilteredCubicalComplex& complex) {
  std::array<OrderedCells, 4> ordered;
  std::vector<std::uint32_t> rank;
  order_cells(complex, ordered, rank);

  const auto& vertices = ordered[0];
  const auto& edges = ordered[1];
  const auto& squares = ordered[2];
  const auto& voxels = ordered[3];
  const std::size_t n_edges = edges.cells.size();
  const std::size_t n_squares = squares.cells.size();

  std::vector<PersistencePair> pairs;
  std::array<CellId, 6> adj{};

  // Dimension 0: union-find over vertex ranks; a root is always the oldest
  // vertex of its component, so merging two components kills the younger
  // root (elder rule).
  std::vector<bool> negative_edge(n_edges, false);
  {
    std::vector<std::uint32_t> parent(vertices.cells.size());
    for (std::uint32_t i = 0; i < parent.size(); ++i) parent[i] = i;
    for (std::uint32_t e = 0; e < n_edges; ++e) {
      complex.faces(edges.cells[e], adj);
      const std::uint32_t a = find_root(parent, rank[adj[0]]);
      const std::uint32_t b = find_root(parent, rank[adj[1]]);
      if (a == b) continue;
      const std::uint32_t younger = std::max(a, b);
      const std::uint32_t older = std::min(a, b);
      parent[younger] = older;
      negative_edge[e] = true;
      pairs.push_back({0, vertices.values[younger], edges.values[e], vertices.cells[younger],
                       edges.cells[e]});
    }
    for (std::uint32_t i = 0; i < parent.size(); ++i)
      if (parent[i] == i) pairs.push_back({0, vertices.values[i], kInf, vertices.cells[i], kNoCell});
  }

  // Dimension 2: union-find on the dual graph (voxels plus one exterior
  // node) in reverse filtration order. Each square that merges two dual
  // components is positive and is paired with the younger root voxel;
  // those squares are cleared from the dimension-1 reduction.
  std::vector<bool> cleared_square(n_squares, false);
  {
    const auto exterior = static_cast<std::uint32_t>(voxels.cells.size());
    std::vector<std::uint32_t> parent(voxels.cells.size() + 1);
    for (std::uint32_t i = 0; i < parent.size(); ++i) parent[i] = i;
    for (std::size_t s = n_squares; s-- > 0;) {
      const int n = complex.cofaces(squares.cells[s], adj);
      const std::uint32_t a = find_root(parent, rank[adj[0]]);
      const std::uint32_t b = find_root(parent, n == 2 ? rank[adj[1]] : exterior);
      if (a == b) continue;
      // in reverse order the oldest node has the largest rank; the exterior
      // outranks every voxel
      const std::uint32_t younger = std::min(a, b);
      const std::uint32_t older = std::max(a, b);
      parent[younger] = older;
      cleared_square[s] = true;
      pairs.push_back({2, squares.values[s], voxels.values[younger], squares.cells[s],
                       voxels.cells[younger]});
    }
  }

  // Dimension 1: reduce the remaining square columns left to right. Rows
  // of negative edges are dropped up front (compression); they can never
  // be the pivot of a reduced column.
  {
    std::vector<std::uint32_t> pivot_slot(n_edges, kNone);
    ColumnPool pool;
    std::vector<std::uint32_t> column;
    std::vector<std::uint32_t> scratch;
    column.reserve(64);
    scratch.reserve(64);
    for (std::uint32_t s = 0; s < n_squares; ++s) {
      if (cleared_square[s]) continue;
      column.clear();
      complex.faces(squares.cells[s], adj);
      for (int f = 0; f < 4; ++f) {
        const std::uint32_t e = rank[adj[f]];
        if (!negative_edge[e]) column.push_back(e);
      }
      std::sort(column.begin(), column.end());

      while (!column.empty()) {
        const std::uint32_t slot = pivot_slot[column.back()];
        if (slot == kNone) break;
        scratch.clear();
        std::set_symmetric_difference(column.begin(), column.end(), pool.begin(slot),
                                      pool.end(slot), std::back_inserter(scratch));
        column.swap(scratch);
      }

      if (column.empty()) {
        // positive square that no voxel kills
        pairs.push_back({2, squares.values[s], kInf, squares.cells[s], kNoCell});
        continue;
      }
      const std::uint32_t low = column.back();
      pivot_slot[low] = pool.add(column);
      pairs.push_back({1, edges.values[low], squares.values[s], edges.cells[low], squares.cells[s]});
    }
    for (std::uint32_t e = 0; e < n_edges; ++e)
      if (!negative_edge[e] && pivot_slot[e] == kNone)
        pairs.push_back({1, edges.values[e], kInf, edges.cells[e], kNoCell});
  }

  DiagramMetadata meta{complex.dims(), complex.bounds(), complex.min_value(), complex.max_value()};
  return PersistenceDiagramSet(meta, std::move(pairs));
}

}  // namespace topoforge
