#include "topoforge/presets.hpp"

#include <cstdio>
#include <numbers>

#include "topoforge/error.hpp"
#include "topoforge/rng.hpp"

namespace topoforge {

namespace {

constexpr Vec3 kOrigin{0.0, 0.0, 0.0};
constexpr Vec3 kZ{0.0, 0.0, 1.0};

Vec3 random_point(Rng& rng, double extent) {
  return {rng.uniform(-extent, extent), rng.uniform(-extent, extent), rng.uniform(-extent, extent)};
}

Vec3 random_axis(Rng& rng) {
  // uniform on the sphere
  const double z = rng.uniform(-1.0, 1.0);
  const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double s = std::sqrt(1.0 - z * z);
  return {s * std::cos(phi), s * std::sin(phi), z};
}

SdfScene random_primitive(Rng& rng) {
  const Vec3 c = random_point(rng, 0.25);
  switch (rng.index(4)) {
    case 0:
      return SdfScene::ball(c, rng.uniform(0.06, 0.18));
    case 1: {
      const Vec3 half{rng.uniform(0.05, 0.16), rng.uniform(0.05, 0.16), rng.uniform(0.05, 0.16)};
      return SdfScene::rotate(SdfScene::box(c, half), Mat3::axis_angle(random_axis(rng), rng.uniform(0.0, std::numbers::pi)));
    }
    case 2: {
      const double ring = rng.uniform(0.1, 0.2);
      return SdfScene::torus(c, random_axis(rng), ring, rng.uniform(0.035, 0.45 * ring));
    }
    default:
      return SdfScene::cylinder(c, random_axis(rng), rng.uniform(0.04, 0.12), rng.uniform(0.06, 0.2));
  }
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"ball", "shell", "torus", "double-torus", "two-balls", "holed-box"};
  return names;
}

Preset make_preset(std::string_view name) {
  if (name == "ball") return {"ball", SdfScene::ball(kOrigin, 0.3), {{1, 0, 0}}};
  if (name == "shell")
    return {"shell", SdfScene::subtract(SdfScene::ball(kOrigin, 0.35), SdfScene::ball(kOrigin, 0.2)), {{1, 0, 1}}};
  if (name == "torus") return {"torus", SdfScene::torus(kOrigin, kZ, 0.25, 0.1), {{1, 1, 0}}};
  if (name == "double-torus") {
    // tubes nearly touch at the origin; the bar fuses them into one genus-2 solid
    auto left = SdfScene::torus({-0.22, 0.0, 0.0}, kZ, 0.16, 0.07);
    auto right = SdfScene::torus({0.22, 0.0, 0.0}, kZ, 0.16, 0.07);
    auto bridge = SdfScene::box(kOrigin, {0.09, 0.04, 0.04});
    return {"double-torus", SdfScene::unite({left, right, bridge}), {{1, 2, 0}}};
  }
  if (name == "two-balls")
    return {"two-balls",
            SdfScene::unite({SdfScene::ball({-0.22, 0.0, 0.0}, 0.15), SdfScene::ball({0.22, 0.0, 0.0}, 0.15)}),
            {{2, 0, 0}}};
  if (name == "holed-box")
    return {"holed-box",
            SdfScene::subtract(SdfScene::box(kOrigin, {0.3, 0.3, 0.15}), SdfScene::cylinder(kOrigin, kZ, 0.12, 0.3)),
            {{1, 1, 0}}};
  throw Error("unknown preset: " + std::string(name));
}

std::vector<Preset> random_csg(std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Preset> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<SdfScene> parts;
    const std::size_t n = 1 + rng.index(4);
    for (std::size_t p = 0; p < n; ++p) parts.push_back(random_primitive(rng));
    SdfScene scene = parts.size() == 1 ? parts.front() : SdfScene::unite(std::move(parts));
    if (rng.uniform() < 0.3) {
      const Vec3 c = random_point(rng, 0.2);
      scene = SdfScene::subtract(std::move(scene), rng.index(2) == 0
                                                       ? SdfScene::ball(c, rng.uniform(0.04, 0.1))
                                                       : SdfScene::cylinder(c, random_axis(rng), rng.uniform(0.03, 0.08), 0.5));
    }
    char name[32];
    std::snprintf(name, sizeof name, "csg_%03zu", i);
    out.push_back({name, std::move(scene), std::nullopt});
  }
  return out;
}

}  // namespace topoforge
