#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "topoforge/error.hpp"
#include "topoforge/pd.hpp"
#include "topoforge/text.hpp"

namespace topoforge {

namespace {

constexpr std::string_view kPointsHeader = "# topoforge-points v1 dim=";

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string format_points_tsv(const PersistencePointSet& points,
                              const std::vector<std::string>& comments) {
  std::string out(kPointsHeader);
  out += std::to_string(points.dim()) + "\n";
  for (const auto& c : comments) out += "# " + c + "\n";
  for (const auto& p : points.points()) {
    out += format_double(p.birth);
    out += '\t';
    out += format_double(p.persistence);
    out += '\t';
    out += p.pad ? "pad" : p.capped ? "capped" : "-";
    out += '\n';
  }
  return out;
}

PersistencePointSet parse_points_tsv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line.rfind(kPointsHeader, 0) != 0)
    throw IoError("points: missing '# topoforge-points v1' header");
  int dim = 0;
  std::vector<PersistencePoint> pts;
  std::size_t line_no = 1;
  try {
    const double d = parse_double(std::string_view(line).substr(kPointsHeader.size()));
    if (d != 0 && d != 1 && d != 2) throw IoError("bad dimension");
    dim = static_cast<int>(d);
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      const auto f = split(line, '\t');
      if (f.size() != 3) throw IoError("expected 3 tab-separated fields");
      PersistencePoint p;
      p.birth = parse_double(f[0]);
      p.persistence = parse_double(f[1]);
      if (f[2] == "pad")
        p.pad = true;
      else if (f[2] == "capped")
        p.capped = true;
      else if (f[2] != "-")
        throw IoError("unknown flag '" + std::string(f[2]) + "'");
      pts.push_back(p);
    }
    return PersistencePointSet(dim, std::move(pts));
  } catch (const Error& e) {
    throw IoError("points line " + std::to_string(line_no) + ": " + e.what());
  }
}

std::string format_landscape_tsv(std::span<const double> ts,
                                 const std::vector<std::vector<double>>& levels,
                                 const std::vector<std::string>& comments) {
  for (const auto& l : levels)
    if (l.size() != ts.size()) throw Error("landscape level length does not match the grid");
  std::string out = "# topoforge-landscape v1 levels=" + std::to_string(levels.size()) + "\n";
  for (const auto& c : comments) out += "# " + c + "\n";
  out += "# t";
  for (std::size_t k = 0; k < levels.size(); ++k) out += "\tlambda" + std::to_string(k + 1);
  out += '\n';
  for (std::size_t i = 0; i < ts.size(); ++i) {
    out += format_double(ts[i]);
    for (const auto& l : levels) {
      out += '\t';
      out += format_double(l[i]);
    }
    out += '\n';
  }
  return out;
}

std::string diagram_svg(const PersistenceDiagramSet& pds) {
  constexpr double kSize = 400.0;
  constexpr double kMargin = 40.0;
  const auto& m = pds.metadata();
  double lo = m.value_min;
  double hi = m.value_max;
  for (const auto& p : pds.pairs()) {
    lo = std::min(lo, p.birth);
    hi = std::max(hi, p.essential() ? p.birth : p.death);
  }
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double span = hi - lo;
  const auto sx = [&](double v) { return kMargin + (v - lo) / span * kSize; };
  const auto sy = [&](double v) { return kMargin + kSize - (v - lo) / span * kSize; };
  static constexpr const char* kColors[] = {"#d62728", "#1f77b4", "#2ca02c"};

  std::string out;
  const std::string full = fixed(kSize + 2 * kMargin);
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + full + "\" height=\"" + full +
         "\" viewBox=\"0 0 " + full + " " + full + "\">\n";
  out += "<rect x=\"" + fixed(kMargin) + "\" y=\"" + fixed(kMargin) + "\" width=\"" + fixed(kSize) +
         "\" height=\"" + fixed(kSize) + "\" fill=\"none\" stroke=\"#888\"/>\n";
  out += "<line x1=\"" + fixed(sx(lo)) + "\" y1=\"" + fixed(sy(lo)) + "\" x2=\"" + fixed(sx(hi)) +
         "\" y2=\"" + fixed(sy(hi)) + "\" stroke=\"#444\" stroke-dasharray=\"4 3\"/>\n";
  out += "<text x=\"" + fixed(kMargin + kSize / 2) + "\" y=\"" + fixed(kSize + 1.7 * kMargin) +
         "\" text-anchor=\"middle\" font-size=\"12\">birth</text>\n";
  out += "<text x=\"12\" y=\"" + fixed(kMargin + kSize / 2) +
         "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 12 " +
         fixed(kMargin + kSize / 2) + ")\">death</text>\n";
  for (int d = 0; d < 3; ++d)
    out += "<text x=\"" + fixed(kMargin + 6) + "\" y=\"" + fixed(kMargin + 16 + 14 * d) +
           "\" font-size=\"11\" fill=\"" + kColors[d] + "\">H" + std::to_string(d) + "</text>\n";
  for (const auto& p : pds.pairs()) {
    if (p.dim > 2) continue;
    if (p.essential()) {
      const double x = sx(p.birth), y = kMargin;
      out += "<path d=\"M" + fixed(x) + " " + fixed(y - 4) + " L" + fixed(x - 4) + " " +
             fixed(y + 3) + " L" + fixed(x + 4) + " " + fixed(y + 3) + " Z\" fill=\"" +
             kColors[p.dim] + "\"/>\n";
    } else {
      if (p.death == p.birth) continue;
      out += "<circle cx=\"" + fixed(sx(p.birth)) + "\" cy=\"" + fixed(sy(p.death)) +
             "\" r=\"2.5\" fill=\"" + kColors[p.dim] + "\" fill-opacity=\"0.7\"/>\n";
    }
  }
  out += "</svg>\n";
  return out;
}

}  // namespace topoforge
