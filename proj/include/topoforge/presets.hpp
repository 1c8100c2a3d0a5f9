#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "topoforge/field.hpp"

namespace topoforge {

/// A named scene with its Betti numbers (beta_0, beta_1, beta_2) at t = 0,
/// when known by construction.
struct Preset {
  std::string name;
  SdfScene scene;
  std::optional<std::array<int, 3>> betti;
};

/// ball, shell, torus, double-torus, two-balls, holed-box.
const std::vector<std::string>& preset_names();

/// Throws Error("unknown preset: ...").
Preset make_preset(std::string_view name);

/// `count` scenes named csg_000, csg_001, ..., each a union of one to four
/// random primitives, sometimes with a cut. Deterministic in `seed`;
/// topology is not known in advance.
std::vector<Preset> random_csg(std::size_t count, std::uint64_t seed);

}  // namespace topoforge
