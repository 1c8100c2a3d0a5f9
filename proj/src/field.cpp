#include "topoforge/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "topoforge/error.hpp"
#include "topoforge/rng.hpp"

namespace topoforge {

namespace sd = scene_detail;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Vec3 unit_axis(Vec3 axis) {
  const double len = norm(axis);
  if (!(len > 0.0) || !std::isfinite(len)) throw Error("axis must be a finite non-zero vector");
  // leave already-unit axes alone so printed scenes parse back bit-identical
  if (std::abs(len - 1.0) <= 4 * std::numeric_limits<double>::epsilon()) return axis;
  return (1.0 / len) * axis;
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw Error(std::string(what) + " must be positive");
}

void require_finite(Vec3 v, const char* what) {
  if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z))
    throw Error(std::string(what) + " must be finite");
}

sd::NodePtr make(auto shape) { return std::make_shared<const sd::Node>(sd::Node{std::move(shape)}); }

double eval_node(const sd::Node& node, Vec3 p) {
  return std::visit(
      Overloaded{
          [&](const sd::Ball& b) { return norm(p - b.center) - b.radius; },
          [&](const sd::Box& b) {
            const Vec3 d = p - b.center;
            const Vec3 q{std::abs(d.x) - b.half.x, std::abs(d.y) - b.half.y,
                         std::abs(d.z) - b.half.z};
            const Vec3 outside{std::max(q.x, 0.0), std::max(q.y, 0.0), std::max(q.z, 0.0)};
            return norm(outside) + std::min(std::max({q.x, q.y, q.z}), 0.0);
          },
          [&](const sd::Torus& t) {
            const Vec3 d = p - t.center;
            const double h = dot(d, t.axis);
            const double radial = norm(d - h * t.axis);
            const double a = radial - t.ring;
            return std::sqrt(a * a + h * h) - t.tube;
          },
          [&](const sd::Cylinder& c) {
            const Vec3 d = p - c.center;
            const double h = dot(d, c.axis);
            const double radial = norm(d - h * c.axis);
            const double qr = radial - c.radius;
            const double qh = std::abs(h) - c.half_height;
            const double outside = std::hypot(std::max(qr, 0.0), std::max(qh, 0.0));
            return outside + std::min(std::max(qr, qh), 0.0);
          },
          [&](const sd::Union& u) {
            double v = std::numeric_limits<double>::infinity();
            for (const auto& c : u.children) v = std::min(v, eval_node(*c, p));
            return v;
          },
          [&](const sd::Intersection& u) {
            double v = -std::numeric_limits<double>::infinity();
            for (const auto& c : u.children) v = std::max(v, eval_node(*c, p));
            return v;
          },
          [&](const sd::Subtraction& s) {
            return std::max(eval_node(*s.base, p), -eval_node(*s.cut, p));
          },
          [&](const sd::Translate& t) { return eval_node(*t.child, p - t.offset); },
          [&](const sd::Rotate& r) { return eval_node(*r.child, r.rotation.transposed() * p); },
          [&](const sd::Scale& s) { return s.factor * eval_node(*s.child, (1.0 / s.factor) * p); },
      },
      node.shape);
}

// World placement of a subtree: x_world = scale * rotation * x_local + offset.
struct Placement {
  Mat3 rotation;
  double scale = 1.0;
  Vec3 offset;

  Vec3 apply(Vec3 p) const { return scale * (rotation * p) + offset; }
};

Box3 centered_box(Vec3 c, Vec3 half) { return {c - half, c + half}; }

Box3 empty_box() {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return {{inf, inf, inf}, {-inf, -inf, -inf}};
}

Box3 hull(const Box3& a, const Box3& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  return {{std::min(a.min.x, b.min.x), std::min(a.min.y, b.min.y), std::min(a.min.z, b.min.z)},
          {std::max(a.max.x, b.max.x), std::max(a.max.y, b.max.y), std::max(a.max.z, b.max.z)}};
}

Box3 overlap(const Box3& a, const Box3& b) {
  return {{std::max(a.min.x, b.min.x), std::max(a.min.y, b.min.y), std::max(a.min.z, b.min.z)},
          {std::min(a.max.x, b.max.x), std::min(a.max.y, b.max.y), std::min(a.max.z, b.max.z)}};
}

// Half extents of a ring of radius `ring` around unit axis `a` thickened by
// `tube`, or a segment of half length `half_len` along `a` thickened by a
// disk of radius `radius`.
Vec3 ring_half(Vec3 a, double ring, double tube) {
  Vec3 h;
  for (int i = 0; i < 3; ++i) h[i] = ring * std::sqrt(std::max(0.0, 1.0 - a[i] * a[i])) + tube;
  return h;
}

Vec3 capsule_half(Vec3 a, double half_len, double radius) {
  Vec3 h;
  for (int i = 0; i < 3; ++i)
    h[i] = half_len * std::abs(a[i]) + radius * std::sqrt(std::max(0.0, 1.0 - a[i] * a[i]));
  return h;
}

Box3 bounds_node(const sd::Node& node, const Placement& place) {
  return std::visit(
      Overloaded{
          [&](const sd::Ball& b) {
            const double r = place.scale * b.radius;
            return centered_box(place.apply(b.center), {r, r, r});
          },
          [&](const sd::Box& b) {
            Vec3 half;
            for (int i = 0; i < 3; ++i)
              half[i] = place.scale * (std::abs(place.rotation(i, 0)) * b.half.x +
                                       std::abs(place.rotation(i, 1)) * b.half.y +
                                       std::abs(place.rotation(i, 2)) * b.half.z);
            return centered_box(place.apply(b.center), half);
          },
          [&](const sd::Torus& t) {
            const Vec3 a = place.rotation * t.axis;
            return centered_box(place.apply(t.center),
                                place.scale * ring_half(a, t.ring, t.tube));
          },
          [&](const sd::Cylinder& c) {
            const Vec3 a = place.rotation * c.axis;
            return centered_box(place.apply(c.center),
                                place.scale * capsule_half(a, c.half_height, c.radius));
          },
          [&](const sd::Union& u) {
            Box3 box = empty_box();
            for (const auto& c : u.children) box = hull(box, bounds_node(*c, place));
            return box;
          },
          [&](const sd::Intersection& u) {
            Box3 box = bounds_node(*u.children.front(), place);
            for (std::size_t i = 1; i < u.children.size(); ++i)
              box = overlap(box, bounds_node(*u.children[i], place));
            return box;
          },
          [&](const sd::Subtraction& s) { return bounds_node(*s.base, place); },
          [&](const sd::Translate& t) {
            Placement inner = place;
            inner.offset = place.apply(t.offset);
            return bounds_node(*t.child, inner);
          },
          [&](const sd::Rotate& r) {
            Placement inner = place;
            inner.rotation = place.rotation * r.rotation;
            return bounds_node(*r.child, inner);
          },
          [&](const sd::Scale& s) {
            Placement inner = place;
            inner.scale = place.scale * s.factor;
            return bounds_node(*s.child, inner);
          },
      },
      node.shape);
}

// Maps the solid under x -> factor * x + offset, folding the map into
// primitives where that keeps the tree readable.
sd::NodePtr apply_similarity(const sd::NodePtr& node, double factor, Vec3 offset) {
  const auto moved = [&](Vec3 c) { return factor * c + offset; };
  return std::visit(
      Overloaded{
          [&](const sd::Ball& b) { return make(sd::Ball{moved(b.center), factor * b.radius}); },
          [&](const sd::Box& b) { return make(sd::Box{moved(b.center), factor * b.half}); },
          [&](const sd::Torus& t) {
            return make(sd::Torus{moved(t.center), t.axis, factor * t.ring, factor * t.tube});
          },
          [&](const sd::Cylinder& c) {
            return make(sd::Cylinder{moved(c.center), c.axis, factor * c.radius,
                                     factor * c.half_height});
          },
          [&](const sd::Union& u) {
            sd::Union out;
            for (const auto& c : u.children) out.children.push_back(apply_similarity(c, factor, offset));
            return make(std::move(out));
          },
          [&](const sd::Intersection& u) {
            sd::Intersection out;
            for (const auto& c : u.children) out.children.push_back(apply_similarity(c, factor, offset));
            return make(std::move(out));
          },
          [&](const sd::Subtraction& s) {
            return make(sd::Subtraction{apply_similarity(s.base, factor, offset),
                                        apply_similarity(s.cut, factor, offset)});
          },
          [&](const sd::Translate& t) {
            return apply_similarity(t.child, factor, factor * t.offset + offset);
          },
          [&](const sd::Scale& s) { return apply_similarity(s.child, factor * s.factor, offset); },
          [&](const sd::Rotate&) {
            sd::NodePtr out = node;
            if (factor != 1.0) out = make(sd::Scale{factor, out});
            if (offset != Vec3{}) out = make(sd::Translate{offset, out});
            return out;
          },
      },
      node->shape);
}

}  // namespace

// --- VolumeGrid -------------------------------------------------------------

VolumeGrid::VolumeGrid(GridDims dims, Box3 bounds, std::vector<double> values, FieldKind kind)
    : dims_(dims), bounds_(bounds), values_(std::move(values)), kind_(kind) {
  if (dims_.nx < 2 || dims_.ny < 2 || dims_.nz < 2)
    throw Error("grid needs at least 2 points per axis");
  if (!(bounds_.min.x < bounds_.max.x && bounds_.min.y < bounds_.max.y &&
        bounds_.min.z < bounds_.max.z))
    throw Error("grid bounds must satisfy min < max on every axis");
  if (values_.size() != dims_.count()) throw Error("grid value count does not match dims");
  for (double v : values_)
    if (!std::isfinite(v)) throw Error("grid values must be finite");
}

Vec3 VolumeGrid::spacing() const {
  const Vec3 e = bounds_.extent();
  return {e.x / (dims_.nx - 1), e.y / (dims_.ny - 1), e.z / (dims_.nz - 1)};
}

Vec3 VolumeGrid::point(int i, int j, int k) const {
  const Vec3 e = bounds_.extent();
  return {bounds_.min.x + e.x * i / (dims_.nx - 1), bounds_.min.y + e.y * j / (dims_.ny - 1),
          bounds_.min.z + e.z * k / (dims_.nz - 1)};
}

double VolumeGrid::min_value() const { return *std::min_element(values_.begin(), values_.end()); }
double VolumeGrid::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

// --- SdfScene ---------------------------------------------------------------

SdfScene SdfScene::ball(Vec3 center, double radius) {
  require_finite(center, "center");
  require_positive(radius, "ball radius");
  return SdfScene(make(sd::Ball{center, radius}));
}

SdfScene SdfScene::box(Vec3 center, Vec3 half_extents) {
  require_finite(center, "center");
  require_positive(half_extents.x, "box half extent");
  require_positive(half_extents.y, "box half extent");
  require_positive(half_extents.z, "box half extent");
  return SdfScene(make(sd::Box{center, half_extents}));
}

SdfScene SdfScene::torus(Vec3 center, Vec3 axis, double ring_radius, double tube_radius) {
  require_finite(center, "center");
  require_positive(ring_radius, "torus ring radius");
  require_positive(tube_radius, "torus tube radius");
  return SdfScene(make(sd::Torus{center, unit_axis(axis), ring_radius, tube_radius}));
}

SdfScene SdfScene::cylinder(Vec3 center, Vec3 axis, double radius, double half_height) {
  require_finite(center, "center");
  require_positive(radius, "cylinder radius");
  require_positive(half_height, "cylinder half height");
  return SdfScene(make(sd::Cylinder{center, unit_axis(axis), radius, half_height}));
}

SdfScene SdfScene::unite(std::vector<SdfScene> parts) {
  if (parts.empty()) throw Error("union needs at least one operand");
  sd::Union u;
  for (auto& p : parts) u.children.push_back(std::move(p.root_));
  return SdfScene(make(std::move(u)));
}

SdfScene SdfScene::intersect(std::vector<SdfScene> parts) {
  if (parts.empty()) throw Error("intersection needs at least one operand");
  sd::Intersection u;
  for (auto& p : parts) u.children.push_back(std::move(p.root_));
  return SdfScene(make(std::move(u)));
}

SdfScene SdfScene::subtract(SdfScene base, SdfScene cut) {
  return SdfScene(make(sd::Subtraction{std::move(base.root_), std::move(cut.root_)}));
}

SdfScene SdfScene::translate(SdfScene child, Vec3 offset) {
  require_finite(offset, "offset");
  return SdfScene(make(sd::Translate{offset, std::move(child.root_)}));
}

SdfScene SdfScene::rotate(SdfScene child, const Mat3& rotation) {
  if (!rotation.is_orthonormal(1e-9)) throw Error("rotation matrix must be orthonormal");
  return SdfScene(make(sd::Rotate{rotation, std::move(child.root_)}));
}

SdfScene SdfScene::scale(SdfScene child, double factor) {
  require_positive(factor, "scale factor");
  return SdfScene(make(sd::Scale{factor, std::move(child.root_)}));
}

double SdfScene::eval(Vec3 p) const { return eval_node(*root_, p); }

Box3 SdfScene::bounds() const { return bounds_node(*root_, Placement{}); }

double eval_sdf(const SdfScene& scene, Vec3 p) { return scene.eval(p); }

// --- rasterization ------------------------------------------------------------

VolumeGrid rasterize(const SdfScene& scene, GridDims dims, Box3 bounds) {
  if (dims.nx < 2 || dims.ny < 2 || dims.nz < 2)
    throw Error("grid needs at least 2 points per axis");
  std::vector<double> values(dims.count());
  const Vec3 e = bounds.extent();
  std::size_t idx = 0;
  for (int k = 0; k < dims.nz; ++k) {
    const double z = bounds.min.z + e.z * k / (dims.nz - 1);
    for (int j = 0; j < dims.ny; ++j) {
      const double y = bounds.min.y + e.y * j / (dims.ny - 1);
      for (int i = 0; i < dims.nx; ++i) {
        const double x = bounds.min.x + e.x * i / (dims.nx - 1);
        values[idx++] = scene.eval({x, y, z});
      }
    }
  }
  return VolumeGrid(dims, bounds, std::move(values));
}

VolumeGrid occupancy(const VolumeGrid& grid) {
  if (grid.kind() == FieldKind::kOccupancy) return grid;
  std::vector<double> out(grid.values().size());
  std::transform(grid.values().begin(), grid.values().end(), out.begin(),
                 [](double v) { return v <= 0.0 ? 1.0 : 0.0; });
  return VolumeGrid(grid.dims(), grid.bounds(), std::move(out), FieldKind::kOccupancy);
}

// --- normalization ------------------------------------------------------------

SdfScene normalize_scene(const SdfScene& scene) {
  const Box3 box = scene.bounds();
  if (box.empty()) throw Error("empty shape");

  // The box can be conservative below intersections; a coarse Lipschitz
  // probe proves emptiness when every sample is farther than a cell
  // half-diagonal from the surface.
  constexpr int kProbe = 17;
  const Vec3 e = box.extent();
  const double cell_diag = norm({e.x / (kProbe - 1), e.y / (kProbe - 1), e.z / (kProbe - 1)});
  double lowest = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kProbe; ++k)
    for (int j = 0; j < kProbe; ++j)
      for (int i = 0; i < kProbe; ++i)
        lowest = std::min(lowest, scene.eval({box.min.x + e.x * i / (kProbe - 1),
                                              box.min.y + e.y * j / (kProbe - 1),
                                              box.min.z + e.z * k / (kProbe - 1)}));
  if (lowest > 0.5 * cell_diag) throw Error("empty shape");

  const double largest = std::max({e.x, e.y, e.z});
  if (!(largest > 0.0)) throw Error("empty shape");
  const double factor = 2.0 * kNormalizedHalfExtent / largest;
  const Vec3 center = box.center();
  if (factor == 1.0 && center == Vec3{}) return scene;
  return SdfScene(apply_similarity(
      std::make_shared<const sd::Node>(scene.root()), factor, -factor * center));
}

// --- surface sampling ---------------------------------------------------------

std::vector<Vec3> sample_surface(const SdfScene& scene, std::size_t n, std::uint64_t seed,
                                 const SurfaceSampling& options) {
  const Box3 box = scene.bounds();
  if (box.empty()) throw Error("no surface found");
  const Vec3 e = box.extent();
  const double band = 0.02 * std::max({e.x, e.y, e.z});
  const Box3 region{box.min - Vec3{band, band, band}, box.max + Vec3{band, band, band}};

  constexpr double kStep = 1e-6;
  const auto gradient = [&](Vec3 p) {
    Vec3 g;
    for (int a = 0; a < 3; ++a) {
      Vec3 hi = p;
      Vec3 lo = p;
      hi[a] += kStep;
      lo[a] -= kStep;
      g[a] = (scene.eval(hi) - scene.eval(lo)) / (2.0 * kStep);
    }
    return g;
  };

  Rng rng(seed);
  std::vector<Vec3> points;
  points.reserve(n);
  const std::size_t budget =
      static_cast<std::size_t>(options.max_attempts_per_point) * std::max<std::size_t>(n, 1);
  std::size_t attempts = 0;
  while (points.size() < n) {
    if (++attempts > budget) throw Error("no surface found");
    Vec3 p{rng.uniform(region.min.x, region.max.x), rng.uniform(region.min.y, region.max.y),
           rng.uniform(region.min.z, region.max.z)};
    double f = scene.eval(p);
    if (std::abs(f) > band) continue;
    for (int step = 0; step < options.max_projection_steps && std::abs(f) > 1e-3 * options.tolerance;
         ++step) {
      const Vec3 g = gradient(p);
      const double g2 = dot(g, g);
      if (!(g2 > 1e-12)) break;
      p = p - (f / g2) * g;
      f = scene.eval(p);
    }
    if (std::abs(f) <= options.tolerance) points.push_back(p);
  }
  return points;
}

}  // namespace topoforge
