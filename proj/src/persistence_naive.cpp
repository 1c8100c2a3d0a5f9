#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "topoforge/cubical.hpp"
#include "topoforge/error.hpp"

namespace topoforge {

// Reference reduction: every cell gets a column holding the filtration
// positions of its faces; columns are reduced left to right by adding
// earlier reduced columns with the same lowest entry. No clearing, no
// compression, no union-find.
PersistenceDiagramSet compute_persistence_naive(const FilteredCubicalComplex& complex,
                                                const NaiveOptions& options) {
  const std::size_t n = complex.cell_count();
  if (n > options.max_cells)
    throw Error("naive persistence: " + std::to_string(n) + " cells exceeds the limit of " +
                std::to_string(options.max_cells));

  std::vector<CellId> order(n);
  std::iota(order.begin(), order.end(), CellId{0});
  std::vector<double> value(n);
  std::vector<int> dim(n);
  for (CellId c = 0; c < n; ++c) {
    value[c] = complex.value(c);
    dim[c] = complex.dimension(c);
  }
  std::sort(order.begin(), order.end(), [&](CellId a, CellId b) {
    if (value[a] != value[b]) return value[a] < value[b];
    if (dim[a] != dim[b]) return dim[a] < dim[b];
    return a < b;
  });
  std::vector<std::size_t> position(n);
  for (std::size_t i = 0; i < n; ++i) position[order[i]] = i;

  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::vector<std::size_t>> reduced(n);
  std::vector<std::size_t> owner_of_low(n, kUnset);
  std::vector<bool> paired(n, false);
  std::vector<PersistencePair> pairs;
  std::array<CellId, 6> faces{};

  for (std::size_t j = 0; j < n; ++j) {
    auto& col = reduced[j];
    const int count = complex.faces(order[j], faces);
    for (int f = 0; f < count; ++f) col.push_back(position[faces[f]]);
    std::sort(col.begin(), col.end());
    while (!col.empty() && owner_of_low[col.back()] != kUnset) {
      const auto& other = reduced[owner_of_low[col.back()]];
      std::vector<std::size_t> sum;
      std::set_symmetric_difference(col.begin(), col.end(), other.begin(), other.end(),
                                    std::back_inserter(sum));
      col.swap(sum);
    }
    if (col.empty()) continue;
    const std::size_t low = col.back();
    owner_of_low[low] = j;
    paired[low] = true;
    paired[j] = true;
    const CellId birth = order[low];
    const CellId death = order[j];
    pairs.push_back({dim[birth], value[birth], value[death], birth, death});
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (paired[i]) continue;
    const CellId c = order[i];
    pairs.push_back({dim[c], value[c], std::numeric_limits<double>::infinity(), c, kNoCell});
  }

  DiagramMetadata meta{complex.dims(), complex.bounds(), complex.min_value(), complex.max_value()};
  return PersistenceDiagramSet(meta, std::move(pairs));
}

}  // namespace topoforge
