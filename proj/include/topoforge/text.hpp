#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace topoforge {

/// Shortest decimal that round-trips to the same double; `inf`/`-inf`/`nan`
/// for non-finite values.
std::string format_double(double v);

/// Strict parse of a whole token; accepts `inf` and `-inf`. Throws Error.
double parse_double(std::string_view token);

/// Splits on `sep`, keeping empty fields.
std::vector<std::string_view> split(std::string_view line, char sep);

/// 64-bit FNV-1a, used for config fingerprints.
std::uint64_t fnv1a(std::string_view data);

std::string hex64(std::uint64_t v);

}  // namespace topoforge
