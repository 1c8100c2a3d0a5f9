#include "topoforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "topoforge/assignment.hpp"
#include "topoforge/error.hpp"
#include "topoforge/text.hpp"

namespace topoforge {

namespace {

void check_points(const PointSet& p, const char* what) {
  if (p.cols() != 3) throw Error(std::string(what) + ": point sets must have 3 columns");
  if (p.rows() == 0) throw Error(std::string(what) + ": empty point set");
  if (!p.allFinite()) throw Error(std::string(what) + ": non-finite coordinates");
}

// Shared by the tree and every brute-force path: a fixed evaluation order
// keeps the two bit-identical.
inline double sq_dist(const PointSet& a, Eigen::Index i, const PointSet& b, Eigen::Index j) {
  const double dx = a(i, 0) - b(j, 0);
  const double dy = a(i, 1) - b(j, 1);
  const double dz = a(i, 2) - b(j, 2);
  return dx * dx + dy * dy + dz * dz;
}

class KdTree {
 public:
  explicit KdTree(const PointSet& pts) : pts_(pts), order_(static_cast<std::size_t>(pts.rows())) {
    std::iota(order_.begin(), order_.end(), Eigen::Index{0});
    nodes_.reserve(2 * order_.size() / kLeaf + 2);
    build(0, order_.size());
  }

  /// Exact minimum squared distance from row i of `q` to the tree points.
  double nearest(const PointSet& q, Eigen::Index i) const {
    double best = std::numeric_limits<double>::infinity();
    search(0, q, i, best);
    return best;
  }

 private:
  static constexpr std::size_t kLeaf = 8;
  struct Node {
    std::size_t begin, end;
    int axis = -1;  // -1 for leaves
    double split = 0.0;
    std::size_t left = 0, right = 0;
  };

  std::size_t build(std::size_t begin, std::size_t end) {
    const std::size_t id = nodes_.size();
    nodes_.push_back({begin, end});
    if (end - begin <= kLeaf) return id;
    Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
    Eigen::Vector3d hi = -lo;
    for (std::size_t k = begin; k < end; ++k)
      for (int a = 0; a < 3; ++a) {
        lo[a] = std::min(lo[a], pts_(order_[k], a));
        hi[a] = std::max(hi[a], pts_(order_[k], a));
      }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                     order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](Eigen::Index x, Eigen::Index y) { return pts_(x, axis) < pts_(y, axis); });
    const double split = pts_(order_[mid], axis);
    const std::size_t l = build(begin, mid);
    const std::size_t r = build(mid, end);
    nodes_[id].axis = axis;
    nodes_[id].split = split;
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  void search(std::size_t id, const PointSet& q, Eigen::Index i, double& best) const {
    const Node& n = nodes_[id];
    if (n.axis < 0) {
      for (std::size_t k = n.begin; k < n.end; ++k) best = std::min(best, sq_dist(q, i, pts_, order_[k]));
      return;
    }
    // left holds coordinates <= split, right holds >= split
    const double diff = q(i, n.axis) - n.split;
    const std::size_t near = diff < 0 ? n.left : n.right;
    const std::size_t far = diff < 0 ? n.right : n.left;
    search(near, q, i, best);
    // a partial sum of squares never exceeds the full one, so this prune is exact
    if (diff * diff <= best) search(far, q, i, best);
  }

  const PointSet& pts_;
  std::vector<Eigen::Index> order_;
  std::vector<Node> nodes_;
};

double directed(const PointSet& from, const PointSet& to, ChamferMode mode) {
  const KdTree tree(to);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < from.rows(); ++i) {
    const double d = tree.nearest(from, i);
    sum += mode == ChamferMode::kSquared ? d : std::sqrt(d);
  }
  return sum / static_cast<double>(from.rows());
}

template <typename F>
void parallel_for(std::size_t n, unsigned threads, F&& body) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += threads) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

Matrix symmetric_sqrt(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
  if (eig.info() != Eigen::Success) throw Error("fid: eigendecomposition failed");
  const Vector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

void check_stats(const FeatureStats& s) {
  const auto d = s.mean.size();
  if (d == 0 || s.covariance.rows() != d || s.covariance.cols() != d)
    throw Error("fid: covariance shape does not match the mean");
  if (!s.mean.allFinite() || !s.covariance.allFinite()) throw Error("fid: non-finite statistics");
  if ((s.covariance - s.covariance.transpose()).cwiseAbs().maxCoeff() > 1e-9)
    throw Error("fid: covariance is not symmetric");
}

}  // namespace

double chamfer(const PointSet& a, const PointSet& b, ChamferMode mode) {
  check_points(a, "chamfer");
  check_points(b, "chamfer");
  return directed(a, b, mode) + directed(b, a, mode);
}

double emd(const PointSet& a, const PointSet& b) {
  check_points(a, "emd");
  check_points(b, "emd");
  if (a.rows() != b.rows()) throw Error("emd: point sets differ in size");
  const auto n = static_cast<std::size_t>(a.rows());
  if (n > kEmdMaxPoints) throw Error("emd: more than " + std::to_string(kEmdMaxPoints) + " points");
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      cost[i * n + j] = std::sqrt(sq_dist(a, static_cast<Eigen::Index>(i), b, static_cast<Eigen::Index>(j)));
  return solve_assignment(cost, n, n).total / static_cast<double>(n);
}

double shape_distance(const PointSet& a, const PointSet& b, const DistanceOptions& options) {
  return options.kind == SetDistance::kEmd ? emd(a, b) : chamfer(a, b, options.chamfer_mode);
}

Matrix cross_distances(const std::vector<PointSet>& rows, const std::vector<PointSet>& cols,
                       const DistanceOptions& options) {
  Matrix d(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  parallel_for(rows.size(), options.threads, [&](std::size_t i) {
    for (std::size_t j = 0; j < cols.size(); ++j)
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = shape_distance(rows[i], cols[j], options);
  });
  return d;
}

Matrix pairwise_distances(const std::vector<PointSet>& shapes, const DistanceOptions& options) {
  const auto n = static_cast<Eigen::Index>(shapes.size());
  Matrix d = Matrix::Zero(n, n);
  parallel_for(shapes.size(), options.threads, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < shapes.size(); ++j)
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = shape_distance(shapes[i], shapes[j], options);
  });
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j) d(i, j) = d(j, i);
  return d;
}

double one_nna_from_distances(const Matrix& d, std::size_t generated_count) {
  const auto n = static_cast<std::size_t>(d.rows());
  if (d.cols() != d.rows()) throw Error("1-NNA needs a square distance matrix");
  if (generated_count < 2 || n < generated_count + 2) throw Error("1-NNA needs at least 2 shapes per set");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t nn = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      if (nn == n || d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) <
                         d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(nn)))
        nn = j;
    }
    if ((i < generated_count) == (nn < generated_count)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

double one_nna(const std::vector<PointSet>& generated, const std::vector<PointSet>& reference,
               const DistanceOptions& options) {
  if (generated.size() < 2 || reference.size() < 2) throw Error("1-NNA needs at least 2 shapes per set");
  std::vector<PointSet> all = generated;
  all.insert(all.end(), reference.begin(), reference.end());
  return one_nna_from_distances(pairwise_distances(all, options), generated.size());
}

double coverage_from_distances(const Matrix& d) {
  if (d.rows() == 0 || d.cols() == 0) throw Error("coverage needs non-empty sets");
  std::vector<char> hit(static_cast<std::size_t>(d.cols()), 0);
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < d.cols(); ++j)
      if (d(i, j) < d(i, best)) best = j;
    hit[static_cast<std::size_t>(best)] = 1;
  }
  return static_cast<double>(std::count(hit.begin(), hit.end(), 1)) / static_cast<double>(d.cols());
}

double coverage(const std::vector<PointSet>& generated, const std::vector<PointSet>& reference,
                const DistanceOptions& options) {
  if (generated.empty() || reference.empty()) throw Error("coverage needs non-empty sets");
  return coverage_from_distances(cross_distances(generated, reference, options));
}

FeatureStats feature_stats(const Matrix& features) {
  if (features.rows() < 2 || features.cols() < 1) throw Error("feature stats need at least 2 rows");
  if (!features.allFinite()) throw Error("feature stats: non-finite features");
  FeatureStats s;
  s.mean = features.colwise().mean().transpose();
  const Matrix centered = features.rowwise() - s.mean.transpose();
  s.covariance = centered.transpose() * centered / static_cast<double>(features.rows() - 1);
  s.covariance = 0.5 * (s.covariance + s.covariance.transpose());
  return s;
}

double fid(const FeatureStats& g, const FeatureStats& r) {
  check_stats(g);
  check_stats(r);
  if (g.mean.size() != r.mean.size()) throw Error("fid: feature dimensions differ");
  const Matrix root_r = symmetric_sqrt(r.covariance);
  Matrix inner = root_r * g.covariance * root_r;
  inner = 0.5 * (inner + inner.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(inner, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw Error("fid: eigendecomposition failed");
  const double cross = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  const double value = (g.mean - r.mean).squaredNorm() + g.covariance.trace() + r.covariance.trace() - 2.0 * cross;
  return std::max(0.0, value);
}

double fid_multiview(const std::vector<std::pair<FeatureStats, FeatureStats>>& views,
                     std::size_t expected_views) {
  if (expected_views == 0) throw Error("fid: view count must be positive");
  if (views.size() != expected_views)
    throw Error("fid: expected " + std::to_string(expected_views) + " views, got " +
                std::to_string(views.size()));
  std::vector<double> per_view;
  per_view.reserve(views.size());
  for (const auto& [g, r] : views) per_view.push_back(fid(g, r));
  std::sort(per_view.begin(), per_view.end());
  double sum = 0.0;
  for (double v : per_view) sum += v;
  return sum / static_cast<double>(views.size());
}

PointSet parse_point_set(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<double> xyz;
  std::size_t line_no = 0;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      std::replace(line.begin(), line.end(), ' ', '\t');
      std::vector<std::string_view> f;
      for (auto tok : split(line, '\t'))
        if (!tok.empty()) f.push_back(tok);
      if (f.size() != 3) throw IoError("expected 3 coordinates");
      for (auto tok : f) {
        const double v = parse_double(tok);
        if (!std::isfinite(v)) throw IoError("non-finite coordinate");
        xyz.push_back(v);
      }
    }
  } catch (const Error& e) {
    throw IoError("point set line " + std::to_string(line_no) + ": " + e.what());
  }
  if (xyz.empty()) throw IoError("point set is empty");
  PointSet p(static_cast<Eigen::Index>(xyz.size() / 3), 3);
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    for (int a = 0; a < 3; ++a) p(i, a) = xyz[static_cast<std::size_t>(3 * i + a)];
  return p;
}

std::string format_point_set(const PointSet& points) {
  std::string out;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    out += format_double(points(i, 0));
    out += '\t';
    out += format_double(points(i, 1));
    out += '\t';
    out += format_double(points(i, 2));
    out += '\n';
  }
  return out;
}

}  // namespace topoforge
