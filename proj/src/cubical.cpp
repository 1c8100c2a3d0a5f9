#include <algorithm>
#include <cmath>
#include <tuple>

#include "topoforge/cubical.hpp"
#include "topoforge/error.hpp"

namespace topoforge {

FilteredCubicalComplex::FilteredCubicalComplex(const VolumeGrid& grid)
    : dims_(grid.dims()),
      bounds_(grid.bounds()),
      values_(grid.values().begin(), grid.values().end()) {
  if (dims_.nx < 2 || dims_.ny < 2 || dims_.nz < 2)
    throw Error("cubical complex needs at least 2 points per axis");
  ex_ = 2 * dims_.nx - 1;
  ey_ = 2 * dims_.ny - 1;
  ez_ = 2 * dims_.nz - 1;
  cell_total_ = static_cast<std::size_t>(ex_) * ey_ * ez_;
  if (cell_total_ >= kNoCell) throw Error("grid too large for 32-bit cell ids");
  const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
  min_value_ = *lo;
  max_value_ = *hi;
}

FilteredCubicalComplex build_filtration(const VolumeGrid& grid) {
  return FilteredCubicalComplex(grid);
}

std::size_t FilteredCubicalComplex::cell_count(int dim) const {
  const std::size_t v[3] = {static_cast<std::size_t>(dims_.nx), static_cast<std::size_t>(dims_.ny),
                            static_cast<std::size_t>(dims_.nz)};
  const std::size_t e[3] = {v[0] - 1, v[1] - 1, v[2] - 1};
  // sum over axis subsets of size `dim` of prod(spanning ? e : v)
  std::size_t total = 0;
  for (int mask = 0; mask < 8; ++mask) {
    if (__builtin_popcount(static_cast<unsigned>(mask)) != dim) continue;
    std::size_t n = 1;
    for (int a = 0; a < 3; ++a) n *= (mask >> a) & 1 ? e[a] : v[a];
    total += n;
  }
  return total;
}

std::array<int, 3> FilteredCubicalComplex::anchor(CellId id) const {
  const CellCoord c = coord(id);
  return {c.x / 2, c.y / 2, c.z / 2};
}

int FilteredCubicalComplex::axis_mask(CellId id) const {
  const CellCoord c = coord(id);
  return (c.x & 1) | ((c.y & 1) << 1) | ((c.z & 1) << 2);
}

double FilteredCubicalComplex::value(CellId id) const {
  const CellCoord c = coord(id);
  const int x0 = c.x >> 1, x1 = (c.x + 1) >> 1;
  const int y0 = c.y >> 1, y1 = (c.y + 1) >> 1;
  const int z0 = c.z >> 1, z1 = (c.z + 1) >> 1;
  double v = vertex(x0, y0, z0);
  if (x1 != x0) v = std::max(v, vertex(x1, y0, z0));
  if (y1 != y0) {
    v = std::max(v, vertex(x0, y1, z0));
    if (x1 != x0) v = std::max(v, vertex(x1, y1, z0));
  }
  if (z1 != z0) {
    v = std::max(v, vertex(x0, y0, z1));
    if (x1 != x0) v = std::max(v, vertex(x1, y0, z1));
    if (y1 != y0) {
      v = std::max(v, vertex(x0, y1, z1));
      if (x1 != x0) v = std::max(v, vertex(x1, y1, z1));
    }
  }
  return v;
}

int FilteredCubicalComplex::faces(CellId id, std::array<CellId, 6>& out) const {
  const CellCoord c = coord(id);
  const CellId strides[3] = {1, static_cast<CellId>(ex_), static_cast<CellId>(ex_) * ey_};
  const int comp[3] = {c.x, c.y, c.z};
  int n = 0;
  for (int a = 0; a < 3; ++a) {
    if (comp[a] & 1) {
      out[n++] = id - strides[a];
      out[n++] = id + strides[a];
    }
  }
  return n;
}

int FilteredCubicalComplex::cofaces(CellId id, std::array<CellId, 6>& out) const {
  const CellCoord c = coord(id);
  const CellId strides[3] = {1, static_cast<CellId>(ex_), static_cast<CellId>(ex_) * ey_};
  const int comp[3] = {c.x, c.y, c.z};
  const int ext[3] = {ex_, ey_, ez_};
  int n = 0;
  for (int a = 0; a < 3; ++a) {
    if ((comp[a] & 1) == 0) {
      if (comp[a] > 0) out[n++] = id - strides[a];
      if (comp[a] + 1 < ext[a]) out[n++] = id + strides[a];
    }
  }
  return n;
}

bool FilteredCubicalComplex::precedes(CellId a, CellId b) const {
  const double va = value(a);
  const double vb = value(b);
  if (va != vb) return va < vb;
  const int da = dimension(a);
  const int db = dimension(b);
  if (da != db) return da < db;
  return a < b;
}

std::vector<CellId> FilteredCubicalComplex::cells_of_dimension(int dim) const {
  std::vector<CellId> out;
  out.reserve(cell_count(dim));
  CellId id = 0;
  for (int z = 0; z < ez_; ++z)
    for (int y = 0; y < ey_; ++y)
      for (int x = 0; x < ex_; ++x, ++id)
        if ((x & 1) + (y & 1) + (z & 1) == dim) out.push_back(id);
  return out;
}

// --- diagram set --------------------------------------------------------------

PersistenceDiagramSet::PersistenceDiagramSet(DiagramMetadata meta, std::vector<PersistencePair> pairs)
    : meta_(meta), pairs_(std::move(pairs)) {
  std::sort(pairs_.begin(), pairs_.end(), [](const PersistencePair& a, const PersistencePair& b) {
    return std::tie(a.dim, a.birth, a.death, a.birth_cell, a.death_cell) <
           std::tie(b.dim, b.birth, b.death, b.birth_cell, b.death_cell);
  });
}

std::vector<PersistencePair> PersistenceDiagramSet::pairs(int dim) const {
  std::vector<PersistencePair> out;
  for (const auto& p : pairs_)
    if (p.dim == dim) out.push_back(p);
  return out;
}

std::size_t PersistenceDiagramSet::essential_count() const {
  return static_cast<std::size_t>(
      std::count_if(pairs_.begin(), pairs_.end(), [](const auto& p) { return p.essential(); }));
}

std::size_t PersistenceDiagramSet::finite_count() const { return pairs_.size() - essential_count(); }

std::array<int, 4> betti_at(const PersistenceDiagramSet& pds, double t) {
  std::array<int, 4> betti{0, 0, 0, 0};
  for (const auto& p : pds.pairs())
    if (p.dim >= 0 && p.dim <= 3 && p.birth <= t && t < p.death) ++betti[p.dim];
  return betti;
}

long long euler_characteristic_at(const FilteredCubicalComplex& complex, double t) {
  long long chi = 0;
  CellId id = 0;
  for (int z = 0; z < complex.extent_z(); ++z) {
    for (int y = 0; y < complex.extent_y(); ++y) {
      for (int x = 0; x < complex.extent_x(); ++x, ++id) {
        if (complex.value(id) <= t) chi += ((x & 1) + (y & 1) + (z & 1)) % 2 == 0 ? 1 : -1;
      }
    }
  }
  return chi;
}

}  // namespace topoforge
