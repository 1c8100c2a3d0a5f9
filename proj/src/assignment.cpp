#include "topoforge/assignment.hpp"

#include <cmath>
#include <limits>
#include <queue>

#include "topoforge/error.hpp"

namespace topoforge {

Assignment solve_assignment(std::span<const double> cost, std::size_t rows, std::size_t cols) {
  if (rows > cols) throw Error("assignment needs rows <= cols");
  if (cost.size() != rows * cols) throw Error("assignment cost matrix has the wrong size");
  for (double c : cost)
    if (!std::isfinite(c)) throw Error("assignment costs must be finite");

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based potentials; row_of_col[0] is the virtual row being inserted.
  std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0);
  std::vector<std::size_t> row_of_col(cols + 1, 0), way(cols + 1, 0);
  std::vector<double> minv(cols + 1);
  std::vector<char> used(cols + 1);

  for (std::size_t i = 1; i <= rows; ++i) {
    row_of_col[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = row_of_col[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * cols + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[row_of_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of_col[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      row_of_col[j0] = row_of_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Assignment out;
  out.column_of_row.assign(rows, 0);
  for (std::size_t j = 1; j <= cols; ++j)
    if (row_of_col[j] != 0) out.column_of_row[row_of_col[j] - 1] = j - 1;
  for (std::size_t i = 0; i < rows; ++i) out.total += cost[i * cols + out.column_of_row[i]];
  return out;
}

std::size_t maximum_matching(std::size_t right_count,
                             const std::vector<std::vector<std::uint32_t>>& adjacency) {
  const std::size_t left_count = adjacency.size();
  constexpr std::size_t kFree = std::numeric_limits<std::size_t>::max();
  constexpr std::size_t kFar = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> match_left(left_count, kFree), match_right(right_count, kFree);
  std::vector<std::size_t> layer(left_count);
  std::vector<std::size_t> next_edge(left_count);

  const auto bfs = [&] {
    std::queue<std::size_t> q;
    bool found = false;
    for (std::size_t u = 0; u < left_count; ++u) {
      if (match_left[u] == kFree) {
        layer[u] = 0;
        q.push(u);
      } else {
        layer[u] = kFar;
      }
    }
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop();
      for (std::uint32_t r : adjacency[u]) {
        const std::size_t w = match_right[r];
        if (w == kFree) {
          found = true;
        } else if (layer[w] == kFar) {
          layer[w] = layer[u] + 1;
          q.push(w);
        }
      }
    }
    return found;
  };

  // Iterative DFS along the BFS layers.
  std::vector<std::size_t> stack;
  const auto augment = [&](std::size_t root) {
    stack.assign(1, root);
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      if (next_edge[u] == adjacency[u].size()) {
        layer[u] = kFar;
        stack.pop_back();
        continue;
      }
      const std::uint32_t r = adjacency[u][next_edge[u]++];
      const std::size_t w = match_right[r];
      if (w == kFree) {
        // flip the path recorded on the stack
        std::size_t right = r;
        for (std::size_t s = stack.size(); s-- > 0;) {
          const std::size_t left = stack[s];
          const std::size_t previous = match_left[left];
          match_left[left] = right;
          match_right[right] = left;
          right = previous;
        }
        return true;
      }
      if (layer[w] == layer[u] + 1) stack.push_back(w);
    }
    return false;
  };

  std::size_t size = 0;
  while (bfs()) {
    std::fill(next_edge.begin(), next_edge.end(), 0);
    for (std::size_t u = 0; u < left_count; ++u)
      if (match_left[u] == kFree && augment(u)) ++size;
  }
  return size;
}

}  // namespace topoforge
