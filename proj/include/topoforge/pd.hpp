#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "topoforge/cubical.hpp"
#include "topoforge/volume_io.hpp"

namespace topoforge {

/// A diagram point in (birth, persistence) coordinates.
struct PersistencePoint {
  double birth = 0.0;
  double persistence = 0.0;
  /// Death was +inf and has been replaced by the grid maximum.
  bool capped = false;
  /// Zero padding added by top_k; carries no mass anywhere.
  bool pad = false;

  double death() const { return birth + persistence; }
  friend bool operator==(const PersistencePoint&, const PersistencePoint&) = default;
};

/**
 * Points of one homology dimension, kept in canonical order: persistence
 * descending, then birth ascending. Padding always trails the real points.
 */
class PersistencePointSet {
 public:
  PersistencePointSet() = default;
  /// Sorts `points`. Throws Error on negative or non-finite coordinates.
  PersistencePointSet(int dim, std::vector<PersistencePoint> points);

  int dim() const { return dim_; }
  const std::vector<PersistencePoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  /// Number of points that are not padding.
  std::size_t real_count() const;

 private:
  int dim_ = 0;
  std::vector<PersistencePoint> points_;
};

/// Pairs of dimension `dim` as points. Essential classes are capped at the
/// diagram's value_max and flagged; pass include_essential = false to drop
/// them.
PersistencePointSet to_points(const PersistenceDiagramSet& pds, int dim,
                              bool include_essential = true);

/// The first min(k, n) points, then (0, 0) padding up to exactly k.
PersistencePointSet top_k(const PersistencePointSet& points, std::size_t k);

/// Scales the persistence of the point at `index` by (1 - factor), birth
/// fixed; factor 1 puts it on the diagonal. Throws Error on a bad index or
/// a factor outside [0, 1].
PersistencePointSet edit_toward_diagonal(const PersistencePointSet& points, std::size_t index,
                                         double factor);

// --- persistence images ------------------------------------------------------

enum class ImageWeight { kLinear, kConstant };

/// Region of the (birth, persistence) plane covered by an image.
struct ImageRange {
  double birth_min = 0.0;
  double birth_max = 0.0;
  double persistence_min = 0.0;
  double persistence_max = 0.0;
};

struct PersistenceImageOptions {
  int width = 32;
  int height = 32;
  double sigma = 0.02;
  ImageWeight weight = ImageWeight::kLinear;
};

struct PersistenceImage {
  int width = 0;
  int height = 0;
  ImageRange range;
  /// Row-major, row 0 at the lowest persistence.
  std::vector<double> values;

  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// Sum of normalized isotropic Gaussians centered on the real points,
/// weighted by persistence (linear) or 1 (constant), sampled at pixel
/// centers. Throws Error on a degenerate range, sigma <= 0 or an empty
/// resolution.
PersistenceImage persistence_image(const PersistencePointSet& points, const ImageRange& range,
                                   const PersistenceImageOptions& options = {});

/// [min birth, max birth] x [0, max persistence] over the real points of
/// all sets. A degenerate birth span is widened to +-3 sigma around its
/// value and a zero persistence span becomes [0, 6 sigma].
ImageRange default_image_range(std::span<const PersistencePointSet> sets, double sigma);

/// Image as a VGRD raster with nz = 1; x/y bounds carry the range.
RasterFile image_raster(const PersistenceImage& image);

// --- persistence landscapes --------------------------------------------------

/// `count` evenly spaced samples from lo to hi inclusive.
std::vector<double> sample_grid(double lo, double hi, int count);

/// lambda_k(t): the k-th largest tent max(0, min(t - b, d - t)) over the real
/// points, evaluated at each t. k is 1-based.
std::vector<double> persistence_landscape(const PersistencePointSet& points, int k,
                                          std::span<const double> ts);

// --- matching distances ------------------------------------------------------

/// Guards above which the exact matchings are refused.
inline constexpr std::size_t kBottleneckMaxPoints = 256;
inline constexpr std::size_t kWassersteinMaxPoints = 128;

/// Inf-norm bottleneck distance with diagonal augmentation. Padding and
/// zero-persistence points are ignored (the guard counts the rest); capped
/// points count as finite. Throws Error when the dims
/// differ or a diagram exceeds the size guard.
double bottleneck_distance(const PersistencePointSet& a, const PersistencePointSet& b);

/// Order-1 Wasserstein distance with the inf-norm ground metric.
double wasserstein_distance(const PersistencePointSet& a, const PersistencePointSet& b);

// --- text formats ------------------------------------------------------------

/// `# topoforge-points v1 dim=D` header, optional comment lines, then
/// birth<TAB>persistence<TAB>flags with flags one of -, capped, pad.
std::string format_points_tsv(const PersistencePointSet& points,
                              const std::vector<std::string>& comments = {});
PersistencePointSet parse_points_tsv(std::string_view text);

/// t<TAB>lambda_1<TAB>lambda_2... rows under a comment header.
std::string format_landscape_tsv(std::span<const double> ts,
                                 const std::vector<std::vector<double>>& levels,
                                 const std::vector<std::string>& comments = {});

/// Birth/death scatter per dimension with the diagonal; essential classes
/// are drawn as triangles on the top edge.
std::string diagram_svg(const PersistenceDiagramSet& pds);

}  // namespace topoforge
