#include "topoforge/pd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "topoforge/assignment.hpp"
#include "topoforge/error.hpp"

namespace topoforge {

namespace {

bool canonical_less(const PersistencePoint& a, const PersistencePoint& b) {
  if (a.pad != b.pad) return b.pad;
  if (a.persistence != b.persistence) return a.persistence > b.persistence;
  if (a.birth != b.birth) return a.birth < b.birth;
  return a.capped < b.capped;
}

std::vector<PersistencePoint> real_points(const PersistencePointSet& s) {
  std::vector<PersistencePoint> out;
  for (const auto& p : s.points())
    if (!p.pad) out.push_back(p);
  return out;
}

// Points on the diagonal match it at zero cost, so they never change a
// matching distance; dropping them first keeps the size guards meaningful.
std::vector<PersistencePoint> off_diagonal(const PersistencePointSet& s) {
  std::vector<PersistencePoint> out;
  for (const auto& p : s.points())
    if (!p.pad && p.persistence > 0.0) out.push_back(p);
  return out;
}

double linf(const PersistencePoint& a, const PersistencePoint& b) {
  return std::max(std::abs(a.birth - b.birth), std::abs(a.death() - b.death()));
}

// Inf-norm distance from a point to the diagonal.
double to_diagonal(const PersistencePoint& p) { return 0.5 * p.persistence; }

void check_pair(const PersistencePointSet& a, const PersistencePointSet& b, std::size_t n,
                std::size_t m, std::size_t guard, const char* what) {
  if (a.dim() != b.dim()) throw Error(std::string(what) + ": diagrams have different dimensions");
  if (n > guard || m > guard)
    throw Error(std::string(what) + ": more than " + std::to_string(guard) + " points");
}

}  // namespace

PersistencePointSet::PersistencePointSet(int dim, std::vector<PersistencePoint> points)
    : dim_(dim), points_(std::move(points)) {
  for (const auto& p : points_) {
    if (!std::isfinite(p.birth) || !std::isfinite(p.persistence) || p.persistence < 0.0)
      throw Error("persistence points need finite birth and persistence >= 0");
  }
  std::stable_sort(points_.begin(), points_.end(), canonical_less);
}

std::size_t PersistencePointSet::real_count() const {
  return static_cast<std::size_t>(
      std::count_if(points_.begin(), points_.end(), [](const auto& p) { return !p.pad; }));
}

PersistencePointSet to_points(const PersistenceDiagramSet& pds, int dim, bool include_essential) {
  if (dim < 0 || dim > 2) throw Error("point sets exist for dimensions 0, 1 and 2");
  const double cap = pds.metadata().value_max;
  std::vector<PersistencePoint> pts;
  for (const auto& pair : pds.pairs()) {
    if (pair.dim != dim) continue;
    if (pair.essential()) {
      if (include_essential) pts.push_back({pair.birth, std::max(0.0, cap - pair.birth), true, false});
    } else {
      pts.push_back({pair.birth, pair.death - pair.birth, false, false});
    }
  }
  return PersistencePointSet(dim, std::move(pts));
}

PersistencePointSet top_k(const PersistencePointSet& points, std::size_t k) {
  if (k == 0) throw Error("top_k needs k >= 1");
  std::vector<PersistencePoint> out(points.points().begin(),
                                    points.points().begin() + std::min(k, points.size()));
  out.resize(k, PersistencePoint{0.0, 0.0, false, true});
  return PersistencePointSet(points.dim(), std::move(out));
}

PersistencePointSet edit_toward_diagonal(const PersistencePointSet& points, std::size_t index,
                                         double factor) {
  if (index >= points.size())
    throw Error("point index " + std::to_string(index) + " out of range (size " +
                std::to_string(points.size()) + ")");
  if (!(factor >= 0.0 && factor <= 1.0)) throw Error("edit factor must lie in [0, 1]");
  std::vector<PersistencePoint> out = points.points();
  out[index].persistence *= 1.0 - factor;
  return PersistencePointSet(points.dim(), std::move(out));
}

// --- images ------------------------------------------------------------------

PersistenceImage persistence_image(const PersistencePointSet& points, const ImageRange& range,
                                   const PersistenceImageOptions& options) {
  if (options.width < 1 || options.height < 1) throw Error("image resolution must be at least 1x1");
  if (!(options.sigma > 0.0) || !std::isfinite(options.sigma)) throw Error("image sigma must be positive");
  if (!(range.birth_max > range.birth_min) || !(range.persistence_max > range.persistence_min) ||
      !std::isfinite(range.birth_max - range.birth_min) ||
      !std::isfinite(range.persistence_max - range.persistence_min))
    throw Error("degenerate image range");

  PersistenceImage img;
  img.width = options.width;
  img.height = options.height;
  img.range = range;
  img.values.assign(static_cast<std::size_t>(img.width) * img.height, 0.0);

  const double dx = (range.birth_max - range.birth_min) / img.width;
  const double dy = (range.persistence_max - range.persistence_min) / img.height;
  const double s2 = options.sigma * options.sigma;
  const double norm = 1.0 / (2.0 * std::numbers::pi * s2);
  std::vector<double> gx(img.width), gy(img.height);
  for (const auto& p : points.points()) {
    if (p.pad) continue;
    const double w = options.weight == ImageWeight::kLinear ? p.persistence : 1.0;
    if (w == 0.0) continue;
    // separable: exp(-(dx^2 + dy^2) / 2s^2) = exp(-dx^2/2s^2) * exp(-dy^2/2s^2)
    for (int x = 0; x < img.width; ++x) {
      const double cx = range.birth_min + (x + 0.5) * dx - p.birth;
      gx[x] = std::exp(-cx * cx / (2.0 * s2));
    }
    for (int y = 0; y < img.height; ++y) {
      const double cy = range.persistence_min + (y + 0.5) * dy - p.persistence;
      gy[y] = w * norm * std::exp(-cy * cy / (2.0 * s2));
    }
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x)
        img.values[static_cast<std::size_t>(y) * img.width + x] += gy[y] * gx[x];
  }
  return img;
}

ImageRange default_image_range(std::span<const PersistencePointSet> sets, double sigma) {
  if (!(sigma > 0.0)) throw Error("image sigma must be positive");
  bool any = false;
  ImageRange r;
  for (const auto& s : sets) {
    for (const auto& p : s.points()) {
      if (p.pad) continue;
      if (!any) {
        r.birth_min = r.birth_max = p.birth;
        any = true;
      }
      r.birth_min = std::min(r.birth_min, p.birth);
      r.birth_max = std::max(r.birth_max, p.birth);
      r.persistence_max = std::max(r.persistence_max, p.persistence);
    }
  }
  if (!(r.birth_max > r.birth_min)) {
    r.birth_min -= 3.0 * sigma;
    r.birth_max += 3.0 * sigma;
  }
  if (!(r.persistence_max > 0.0)) r.persistence_max = 6.0 * sigma;
  return r;
}

RasterFile image_raster(const PersistenceImage& image) {
  RasterFile r;
  r.nx = static_cast<std::uint32_t>(image.width);
  r.ny = static_cast<std::uint32_t>(image.height);
  r.nz = 1;
  r.bounds[0] = static_cast<float>(image.range.birth_min);
  r.bounds[1] = static_cast<float>(image.range.persistence_min);
  r.bounds[2] = 0.0f;
  r.bounds[3] = static_cast<float>(image.range.birth_max);
  r.bounds[4] = static_cast<float>(image.range.persistence_max);
  r.bounds[5] = 0.0f;
  r.values.reserve(image.values.size());
  for (double v : image.values) r.values.push_back(static_cast<float>(v));
  return r;
}

// --- landscapes --------------------------------------------------------------

std::vector<double> sample_grid(double lo, double hi, int count) {
  if (count < 1) throw Error("sample grid needs at least one point");
  if (count == 1) return {lo};
  std::vector<double> t(count);
  for (int i = 0; i < count; ++i) t[i] = lo + (hi - lo) * i / (count - 1);
  t.back() = hi;
  return t;
}

std::vector<double> persistence_landscape(const PersistencePointSet& points, int k,
                                          std::span<const double> ts) {
  if (k < 1) throw Error("landscape level must be >= 1");
  const auto pts = real_points(points);
  std::vector<double> out(ts.size(), 0.0);
  std::vector<double> tents;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    tents.clear();
    for (const auto& p : pts) {
      const double v = std::min(ts[i] - p.birth, p.death() - ts[i]);
      if (v > 0.0) tents.push_back(v);
    }
    if (tents.size() < static_cast<std::size_t>(k)) continue;
    std::nth_element(tents.begin(), tents.begin() + (k - 1), tents.end(), std::greater<>());
    out[i] = tents[k - 1];
  }
  return out;
}

// --- distances ---------------------------------------------------------------

double bottleneck_distance(const PersistencePointSet& a, const PersistencePointSet& b) {
  const auto A = off_diagonal(a);
  const auto B = off_diagonal(b);
  const std::size_t n = A.size(), m = B.size();
  check_pair(a, b, n, m, kBottleneckMaxPoints, "bottleneck");

  // Candidate costs: every edge weight in the augmented graph.
  std::vector<double> candidates{0.0};
  for (const auto& p : A) candidates.push_back(to_diagonal(p));
  for (const auto& q : B) candidates.push_back(to_diagonal(q));
  for (const auto& p : A)
    for (const auto& q : B) candidates.push_back(linf(p, q));
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  // Left: A then diagonal copies of B. Right: B then diagonal copies of A.
  const std::size_t size = n + m;
  std::vector<std::vector<std::uint32_t>> adj(size);
  const auto feasible = [&](double eps) {
    for (auto& row : adj) row.clear();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j)
        if (linf(A[i], B[j]) <= eps) adj[i].push_back(static_cast<std::uint32_t>(j));
      if (to_diagonal(A[i]) <= eps) adj[i].push_back(static_cast<std::uint32_t>(m + i));
    }
    for (std::size_t j = 0; j < m; ++j) {
      auto& row = adj[n + j];
      if (to_diagonal(B[j]) <= eps) row.push_back(static_cast<std::uint32_t>(j));
      for (std::size_t i = 0; i < n; ++i) row.push_back(static_cast<std::uint32_t>(m + i));
    }
    return maximum_matching(size, adj) == size;
  };

  std::size_t lo = 0, hi = candidates.size() - 1;  // the largest candidate always works
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (feasible(candidates[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  return candidates[lo];
}

double wasserstein_distance(const PersistencePointSet& a, const PersistencePointSet& b) {
  const auto A = off_diagonal(a);
  const auto B = off_diagonal(b);
  const std::size_t n = A.size(), m = B.size();
  check_pair(a, b, n, m, kWassersteinMaxPoints, "wasserstein");
  const std::size_t size = n + m;
  if (size == 0) return 0.0;
  // Rows: A then diagonal slots for B. Columns: B then diagonal slots for A.
  std::vector<double> cost(size * size, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) cost[i * size + j] = linf(A[i], B[j]);
    for (std::size_t k = 0; k < n; ++k) cost[i * size + m + k] = to_diagonal(A[i]);
  }
  for (std::size_t l = 0; l < m; ++l)
    for (std::size_t j = 0; j < m; ++j) cost[(n + l) * size + j] = to_diagonal(B[j]);
  return solve_assignment(cost, size, size).total;
}

}  // namespace topoforge
