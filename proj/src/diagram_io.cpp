#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "topoforge/cubical.hpp"
#include "topoforge/error.hpp"
#include "topoforge/text.hpp"

namespace topoforge {

namespace {

constexpr std::string_view kHeader = "# topoforge-pd v1 dims=";

GridDims parse_dims(std::string_view text) {
  const auto parts = split(text, 'x');
  if (parts.size() != 3) throw IoError("diagram: malformed dims '" + std::string(text) + "'");
  int d[3];
  for (int i = 0; i < 3; ++i) {
    const double v = parse_double(parts[i]);
    if (v < 1 || v != std::floor(v)) throw IoError("diagram: malformed dims");
    d[i] = static_cast<int>(v);
  }
  return {d[0], d[1], d[2]};
}

}  // namespace

std::string format_diagram_tsv(const PersistenceDiagramSet& pds, const DiagramWriteOptions& options) {
  const auto& m = pds.metadata();
  std::string out;
  out += kHeader;
  out += std::to_string(m.dims.nx) + "x" + std::to_string(m.dims.ny) + "x" +
         std::to_string(m.dims.nz) + "\n";
  out += "# range=" + format_double(m.value_min) + " " + format_double(m.value_max) + "\n";
  for (const auto& c : options.comments) out += "# " + c + "\n";
  for (const auto& p : pds.pairs()) {
    if (p.dim > 2) continue;
    if (!options.keep_zero_persistence && !p.essential() && p.death == p.birth) continue;
    out += std::to_string(p.dim);
    out += '\t';
    out += format_double(p.birth);
    out += '\t';
    out += p.essential() ? "inf" : format_double(p.death);
    out += '\n';
  }
  return out;
}

PersistenceDiagramSet parse_diagram_tsv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line.rfind(kHeader, 0) != 0)
    throw IoError("diagram: missing '# topoforge-pd v1' header");
  DiagramMetadata meta;
  meta.dims = parse_dims(std::string_view(line).substr(kHeader.size()));
  bool have_range = false;
  std::vector<PersistencePair> pairs;
  std::size_t line_no = 1;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      if (line[0] == '#') {
        if (line.rfind("# range=", 0) == 0) {
          const auto parts = split(std::string_view(line).substr(8), ' ');
          if (parts.size() != 2) throw IoError("malformed range");
          meta.value_min = parse_double(parts[0]);
          meta.value_max = parse_double(parts[1]);
          have_range = true;
        }
        continue;
      }
      const auto f = split(line, '\t');
      if (f.size() != 3) throw IoError("expected 3 tab-separated fields");
      PersistencePair p;
      const double dim = parse_double(f[0]);
      if (dim != 0 && dim != 1 && dim != 2 && dim != 3) throw IoError("bad dimension");
      p.dim = static_cast<int>(dim);
      p.birth = parse_double(f[1]);
      p.death = parse_double(f[2]);
      if (!std::isfinite(p.birth) || std::isnan(p.death) || p.death < p.birth)
        throw IoError("invalid birth/death");
      pairs.push_back(p);
    }
  } catch (const Error& e) {
    throw IoError("diagram line " + std::to_string(line_no) + ": " + e.what());
  }
  if (!have_range) {
    // fall back to the extent of the finite values present
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& p : pairs) {
      lo = std::min(lo, p.birth);
      hi = std::max(hi, p.birth);
      if (!p.essential()) hi = std::max(hi, p.death);
    }
    meta.value_min = pairs.empty() ? 0.0 : lo;
    meta.value_max = pairs.empty() ? 0.0 : hi;
  }
  return PersistenceDiagramSet(meta, std::move(pairs));
}

}  // namespace topoforge
