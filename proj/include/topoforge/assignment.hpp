#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace topoforge {

struct Assignment {
  /// column_of_row[i] is the column matched to row i.
  std::vector<std::size_t> column_of_row;
  /// Sum of the matched costs, accumulated in row order.
  double total = 0.0;
};

/// Minimum-cost assignment of every row to a distinct column (Hungarian
/// method with potentials, O(rows^2 * cols)). `cost` is row-major and must
/// be finite; requires rows <= cols.
Assignment solve_assignment(std::span<const double> cost, std::size_t rows, std::size_t cols);

/// Size of a maximum matching in a bipartite graph (Hopcroft-Karp).
/// adjacency[u] lists the right vertices adjacent to left vertex u.
std::size_t maximum_matching(std::size_t right_count,
                             const std::vector<std::vector<std::uint32_t>>& adjacency);

}  // namespace topoforge
