#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "topoforge/latentnet.hpp"

namespace topoforge {

/// Point sets are n x 3 matrices in world units.
using PointSet = Matrix;

enum class ChamferMode {
  kSquared,  // mean squared nearest-neighbor distance, both directions
  kRoot,     // same with plain Euclidean distances
};

/// Symmetric Chamfer distance: mean over A of the nearest distance into B
/// plus mean over B of the nearest distance into A. Nearest neighbors come
/// from a k-d tree whose results equal the brute-force minimum bit for bit.
double chamfer(const PointSet& a, const PointSet& b, ChamferMode mode = ChamferMode::kSquared);

inline constexpr std::size_t kEmdMaxPoints = 1024;

/// Optimal one-to-one matching cost under Euclidean distance, divided by n.
/// Throws Error on a size mismatch or more than kEmdMaxPoints points.
double emd(const PointSet& a, const PointSet& b);

enum class SetDistance { kChamfer, kEmd };

struct DistanceOptions {
  SetDistance kind = SetDistance::kChamfer;
  ChamferMode chamfer_mode = ChamferMode::kSquared;
  /// Worker threads for pairwise matrices; results do not depend on it.
  unsigned threads = 1;
};

double shape_distance(const PointSet& a, const PointSet& b, const DistanceOptions& options);

/// rows x cols matrix of distances from each of `rows` to each of `cols`.
Matrix cross_distances(const std::vector<PointSet>& rows, const std::vector<PointSet>& cols,
                       const DistanceOptions& options);

/// Symmetric matrix over `shapes`; each unordered pair is evaluated once.
Matrix pairwise_distances(const std::vector<PointSet>& shapes, const DistanceOptions& options);

/// Leave-one-out 1-nearest-neighbor accuracy over the concatenation
/// generated ++ reference. Distance ties go to the lower concatenated index.
double one_nna(const std::vector<PointSet>& generated, const std::vector<PointSet>& reference,
               const DistanceOptions& options = {});
/// Same from a precomputed symmetric matrix whose first `generated_count`
/// rows are the generated shapes.
double one_nna_from_distances(const Matrix& distances, std::size_t generated_count);

/// Fraction of reference shapes that are the nearest reference of at least
/// one generated shape (ties to the lower reference index).
double coverage(const std::vector<PointSet>& generated, const std::vector<PointSet>& reference,
                const DistanceOptions& options = {});
/// Same from a generated x reference distance matrix.
double coverage_from_distances(const Matrix& generated_to_reference);

struct FeatureStats {
  Vector mean;
  Matrix covariance;
};

/// Mean and unbiased (n - 1) covariance of the rows of `features`.
FeatureStats feature_stats(const Matrix& features);

/// ||mu_g - mu_r||^2 + Tr(S_g) + Tr(S_r) - 2 Tr((S_r^1/2 S_g S_r^1/2)^1/2),
/// eigenvalues clamped at 0 and the result clamped to >= 0.
double fid(const FeatureStats& generated, const FeatureStats& reference);

inline constexpr std::size_t kDefaultViews = 20;

/// Mean of the per-view FID over (generated, reference) pairs. Throws
/// unless there are exactly `views` pairs. Per-view values are summed in
/// sorted order, so the result does not depend on view order.
double fid_multiview(const std::vector<std::pair<FeatureStats, FeatureStats>>& views,
                     std::size_t expected_views = kDefaultViews);

/// One `x<TAB>y<TAB>z` line per point; '#' lines are comments. Spaces are
/// accepted as separators when reading.
PointSet parse_point_set(std::string_view text);
std::string format_point_set(const PointSet& points);

}  // namespace topoforge
