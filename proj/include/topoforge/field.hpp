#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "topoforge/geometry.hpp"

namespace topoforge {

struct GridDims {
  int nx = 0;
  int ny = 0;
  int nz = 0;

  std::size_t count() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) *
           static_cast<std::size_t>(nz);
  }
  friend bool operator==(const GridDims&, const GridDims&) = default;
};

/// What a raster's values mean.
enum class FieldKind { kSignedDistance, kOccupancy };

inline constexpr Box3 kUnitBounds{{-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}};

/**
 * Dense scalar raster over an axis-aligned box, x varying fastest.
 *
 * Lattice points include both bounding faces: point i along x sits at
 * min.x + (max.x - min.x) * i / (nx - 1). Values are signed distances in
 * world units, or {0, 1} for occupancy rasters.
 */
class VolumeGrid {
 public:
  /// Throws Error unless every axis has >= 2 points, bounds are proper
  /// and all values are finite.
  VolumeGrid(GridDims dims, Box3 bounds, std::vector<double> values,
             FieldKind kind = FieldKind::kSignedDistance);

  const GridDims& dims() const { return dims_; }
  const Box3& bounds() const { return bounds_; }
  std::span<const double> values() const { return values_; }
  FieldKind kind() const { return kind_; }

  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(dims_.nx) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims_.ny) * k);
  }
  double at(int i, int j, int k) const { return values_[index(i, j, k)]; }
  Vec3 point(int i, int j, int k) const;
  /// Lattice spacing per axis.
  Vec3 spacing() const;

  double min_value() const;
  double max_value() const;

 private:
  GridDims dims_;
  Box3 bounds_;
  std::vector<double> values_;
  FieldKind kind_;
};

class SdfScene;
SdfScene normalize_scene(const SdfScene& scene);

namespace scene_detail {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Ball {
  Vec3 center;
  double radius;
};
struct Box {
  Vec3 center;
  Vec3 half;
};
struct Torus {
  Vec3 center;
  Vec3 axis;  // unit
  double ring;
  double tube;
};
struct Cylinder {
  Vec3 center;
  Vec3 axis;  // unit
  double radius;
  double half_height;
};
struct Union {
  std::vector<NodePtr> children;
};
struct Intersection {
  std::vector<NodePtr> children;
};
struct Subtraction {
  NodePtr base;
  NodePtr cut;
};
struct Translate {
  Vec3 offset;
  NodePtr child;
};
struct Rotate {
  Mat3 rotation;
  NodePtr child;
};
struct Scale {
  double factor;
  NodePtr child;
};

struct Node {
  std::variant<Ball, Box, Torus, Cylinder, Union, Intersection, Subtraction, Translate,
               Rotate, Scale>
      shape;
};

}  // namespace scene_detail

/**
 * Immutable CSG expression over analytic solids.
 *
 * Primitives evaluate to their exact signed distance. Booleans use the
 * min/max rules (union = min, intersection = max, subtraction = max(a, -b)),
 * which bound the true distance and keep the zero level set exact.
 * Copies share the underlying tree.
 */
class SdfScene {
 public:
  static SdfScene ball(Vec3 center, double radius);
  static SdfScene box(Vec3 center, Vec3 half_extents);
  static SdfScene torus(Vec3 center, Vec3 axis, double ring_radius, double tube_radius);
  static SdfScene cylinder(Vec3 center, Vec3 axis, double radius, double half_height);

  static SdfScene unite(std::vector<SdfScene> parts);
  static SdfScene intersect(std::vector<SdfScene> parts);
  static SdfScene subtract(SdfScene base, SdfScene cut);
  static SdfScene translate(SdfScene child, Vec3 offset);
  static SdfScene rotate(SdfScene child, const Mat3& rotation);
  static SdfScene scale(SdfScene child, double factor);

  double eval(Vec3 p) const;

  /// Axis-aligned bounds of the occupied set. Tight for primitives, unions
  /// and rigid/uniform-scale transforms of those; conservative below an
  /// intersection or subtraction. Empty when the occupied set provably is.
  Box3 bounds() const;

  /// S-expression text, numbers printed with round-trip precision.
  std::string to_string() const;
  static SdfScene parse(std::string_view text);

  const scene_detail::Node& root() const { return *root_; }

 private:
  friend SdfScene normalize_scene(const SdfScene& scene);
  explicit SdfScene(scene_detail::NodePtr root) : root_(std::move(root)) {}
  scene_detail::NodePtr root_;
};

double eval_sdf(const SdfScene& scene, Vec3 p);

/// Samples the scene at every lattice point of `bounds`.
VolumeGrid rasterize(const SdfScene& scene, GridDims dims, Box3 bounds = kUnitBounds);

/// 1 where the value is <= 0, else 0. An occupancy raster is returned
/// unchanged, so the operation is idempotent.
VolumeGrid occupancy(const VolumeGrid& grid);

/// Extent of the normalization target box [-0.4, 0.4]^3.
inline constexpr double kNormalizedHalfExtent = 0.4;

/// Uniformly scales and translates the scene so its bounds are centered at
/// the origin with the largest axis spanning [-0.4, 0.4]. Throws
/// Error("empty shape") when nothing is occupied.
SdfScene normalize_scene(const SdfScene& scene);

struct SurfaceSampling {
  double tolerance = 1e-4;
  int max_projection_steps = 50;
  /// Give up after this many rejected candidates per requested point.
  int max_attempts_per_point = 2000;
};

/// Points on the zero level set: uniform rejection sampling in a thin band
/// around the surface followed by Newton projection along the numeric
/// gradient. Deterministic for a fixed seed. Throws Error("no surface found").
std::vector<Vec3> sample_surface(const SdfScene& scene, std::size_t n, std::uint64_t seed,
                                 const SurfaceSampling& options = {});

}  // namespace topoforge
