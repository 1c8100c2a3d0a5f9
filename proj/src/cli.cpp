#include "topoforge/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "topoforge/cubical.hpp"
#include "topoforge/error.hpp"
#include "topoforge/field.hpp"
#include "topoforge/metrics.hpp"
#include "topoforge/pd.hpp"
#include "topoforge/presets.hpp"
#include "topoforge/text.hpp"
#include "topoforge/verify.hpp"
#include "topoforge/volume_io.hpp"

namespace topoforge {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct Stamp {
  std::uint64_t seed = 0;
  std::string config_hash;

  std::string comment() const {
    return "tool=topoforge version=" + std::string(kToolVersion) + " seed=" + std::to_string(seed) +
           " config=" + config_hash;
  }
  json header(std::string_view command) const {
    return {{"tool", "topoforge"}, {"version", kToolVersion}, {"command", command}, {"seed", seed},
            {"config_hash", config_hash}};
  }
};

// Output paths and thread counts never change results, so they stay out of
// the hashed config.
Stamp make_stamp(const json& config, std::uint64_t seed) { return {seed, hex64(fnv1a(config.dump()))}; }

unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

// Runs body(i) for i in [0, n) on a bounded pool. The exception of the
// lowest failing index wins, so error reports do not depend on scheduling.
template <typename F>
void for_each_job(std::size_t n, unsigned threads, F&& body) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned w = worker_count(threads, n);
  if (w <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < w; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void require_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw IoError("no such file: " + p.string());
}

void prepare_output_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

void prepare_output_file(const fs::path& file) {
  if (file.has_parent_path()) prepare_output_dir(file.parent_path());
}

std::vector<fs::path> files_with_extension(const fs::path& dir, std::initializer_list<std::string_view> exts) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (std::find(exts.begin(), exts.end(), ext) != exts.end()) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

Box3 cube_bounds(const std::vector<double>& b) {
  if (b.size() != 2 || !(b[0] < b[1])) throw Error("--bounds needs lo < hi");
  return {{b[0], b[0], b[0]}, {b[1], b[1], b[1]}};
}

// --- gen -------------------------------------------------------------------

struct GenOptions {
  std::string preset;
  std::string scene_file;
  std::size_t count = 10;
  int res = 64;
  std::vector<double> bounds{-0.5, 0.5};
  bool occupancy = false;
  std::string out;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

int cmd_gen(const GenOptions& o, std::ostream& out) {
  if (o.preset.empty() == o.scene_file.empty()) throw Error("gen needs exactly one of --preset or --scene");
  if (o.res < 2) throw Error("--res must be at least 2");
  const Box3 bounds = cube_bounds(o.bounds);

  json config{{"command", "gen"}, {"res", o.res}, {"bounds", o.bounds}, {"field", o.occupancy ? "occupancy" : "sdf"}};
  std::vector<Preset> scenes;
  if (!o.scene_file.empty()) {
    require_file(o.scene_file);
    SdfScene scene = SdfScene::parse(read_file(o.scene_file));
    config["scene"] = scene.to_string();
    scenes.push_back({fs::path(o.scene_file).stem().string(), std::move(scene), std::nullopt});
  } else if (o.preset == "random-csg") {
    if (o.count == 0) throw Error("--count must be positive");
    config["preset"] = "random-csg";
    config["count"] = o.count;
    scenes = random_csg(o.count, o.seed);
  } else {
    config["preset"] = o.preset;
    scenes.push_back(make_preset(o.preset));
  }
  const Stamp stamp = make_stamp(config, o.seed);
  const fs::path dir(o.out);
  prepare_output_dir(dir);

  const GridDims dims{o.res, o.res, o.res};
  for_each_job(scenes.size(), o.threads, [&](std::size_t i) {
    VolumeGrid grid = rasterize(scenes[i].scene, dims, bounds);
    if (o.occupancy) grid = occupancy(grid);
    write_vgrd(dir / (scenes[i].name + ".vgrd"), to_raster(grid));
  });

  json manifest = stamp.header("gen");
  manifest["config"] = config;
  json volumes = json::array();
  for (const auto& s : scenes) {
    json v{{"name", s.name}, {"file", s.name + ".vgrd"}, {"scene", s.scene.to_string()}};
    v["betti"] = s.betti ? json(*s.betti) : json(nullptr);
    volumes.push_back(v);
  }
  manifest["volumes"] = volumes;
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
  out << "wrote " << scenes.size() << " volume" << (scenes.size() == 1 ? "" : "s") << " to " << dir.string() << '\n';
  return kExitOk;
}

// --- analyze ---------------------------------------------------------------

struct AnalyzeOptions {
  std::vector<std::string> inputs;
  std::string out;
  bool svg = false;
  double betti_t = 0.0;
  bool betti = false;
  bool keep_zero = false;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

int cmd_analyze(const AnalyzeOptions& o, std::ostream& out) {
  if (o.out.empty() && !o.betti) throw Error("analyze needs --out or --betti");
  if (o.svg && o.out.empty()) throw Error("--svg needs --out");
  std::vector<fs::path> files;
  for (const auto& in : o.inputs) {
    if (fs::is_directory(in)) {
      for (auto& p : files_with_extension(in, {".vgrd"})) files.push_back(p);
    } else {
      require_file(in);
      files.emplace_back(in);
    }
  }
  if (files.empty()) throw IoError("no input volumes");
  std::vector<std::string> names;
  for (const auto& f : files) names.push_back(f.stem().string());
  {
    auto sorted = names;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw Error("two inputs share the name stem");
  }

  json config{{"command", "analyze"}, {"inputs", names}, {"svg", o.svg}, {"keep_zero", o.keep_zero}};
  if (o.betti) config["betti"] = o.betti_t;
  const Stamp stamp = make_stamp(config, o.seed);
  if (!o.out.empty()) prepare_output_dir(o.out);

  std::vector<PersistenceDiagramSet> diagrams(files.size());
  for_each_job(files.size(), o.threads, [&](std::size_t i) {
    diagrams[i] = compute_persistence(build_filtration(from_raster(read_vgrd(files[i]))));
  });

  for (std::size_t i = 0; i < files.size(); ++i) {
    if (!o.out.empty()) {
      DiagramWriteOptions w;
      w.keep_zero_persistence = o.keep_zero;
      w.comments = {stamp.comment(), "source=" + files[i].filename().string()};
      write_file_atomic(fs::path(o.out) / (names[i] + ".pd.tsv"), format_diagram_tsv(diagrams[i], w));
      if (o.svg)
        write_file_atomic(fs::path(o.out) / (names[i] + ".svg"),
                          "<!-- " + stamp.comment() + " -->\n" + diagram_svg(diagrams[i]));
    }
    if (o.betti) {
      const auto b = betti_at(diagrams[i], o.betti_t);
      if (files.size() > 1) out << names[i] << '\t';
      out << b[0] << ' ' << b[1] << ' ' << b[2] << '\n';
    }
  }
  return kExitOk;
}

// --- pd --------------------------------------------------------------------

struct PdOptions {
  std::string op;
  std::string in;
  std::string out;
  int dim = 1;
  bool no_essential = false;
  std::size_t k = 16;
  std::size_t index = 0;
  double factor = 0.0;
  double sigma = 0.02;
  int width = 32;
  int height = 32;
  std::string weight = "linear";
  std::vector<double> range;
  int levels = 5;
  int samples = 100;
  std::vector<double> t_range;
  std::uint64_t seed = 0;
};

PersistencePointSet load_points(const PdOptions& o) {
  require_file(o.in);
  const std::string text = read_file(o.in);
  if (text.rfind("# topoforge-pd", 0) == 0) {
    if (o.dim < 0 || o.dim > 2) throw Error("--dim must be 0, 1 or 2");
    return to_points(parse_diagram_tsv(text), o.dim, !o.no_essential);
  }
  PersistencePointSet points = parse_points_tsv(text);
  if (!o.no_essential) return points;
  std::vector<PersistencePoint> kept;
  for (const auto& p : points.points())
    if (!p.capped) kept.push_back(p);
  return PersistencePointSet(points.dim(), std::move(kept));
}

void emit_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  prepare_output_file(path);
  write_file_atomic(path, text);
}

int cmd_pd(const PdOptions& o, std::ostream& out) {
  json config{{"command", "pd"}, {"op", o.op}, {"input", fs::path(o.in).filename().string()}, {"dim", o.dim},
              {"no_essential", o.no_essential}};
  if (o.op == "topk") config["k"] = o.k;
  if (o.op == "edit") config.update({{"index", o.index}, {"factor", o.factor}});
  if (o.op == "image")
    config.update({{"sigma", o.sigma}, {"width", o.width}, {"height", o.height}, {"weight", o.weight}, {"range", o.range}});
  if (o.op == "landscape") config.update({{"levels", o.levels}, {"samples", o.samples}, {"t_range", o.t_range}});
  const Stamp stamp = make_stamp(config, o.seed);
  const PersistencePointSet points = load_points(o);

  if (o.op == "topk") {
    if (o.k == 0) throw Error("--k must be positive");
    emit_text(o.out, format_points_tsv(top_k(points, o.k), {stamp.comment()}), out);
  } else if (o.op == "edit") {
    emit_text(o.out, format_points_tsv(edit_toward_diagonal(points, o.index, o.factor), {stamp.comment()}), out);
  } else if (o.op == "image") {
    if (o.out.empty()) throw Error("pd image needs --out");
    PersistenceImageOptions opts{o.width, o.height, o.sigma,
                                 o.weight == "constant" ? ImageWeight::kConstant : ImageWeight::kLinear};
    ImageRange range;
    if (o.range.empty()) {
      range = default_image_range(std::span(&points, 1), o.sigma);
    } else {
      if (o.range.size() != 4) throw Error("--range needs birth_min birth_max persistence_min persistence_max");
      range = {o.range[0], o.range[1], o.range[2], o.range[3]};
    }
    const PersistenceImage image = persistence_image(points, range, opts);
    prepare_output_file(o.out);
    write_vgrd(o.out, image_raster(image));
    json meta = stamp.header("pd image");
    meta["config"] = config;
    meta["range"] = {range.birth_min, range.birth_max, range.persistence_min, range.persistence_max};
    write_file_atomic(o.out + ".json", meta.dump(2) + "\n");
  } else {
    if (o.levels < 1 || o.samples < 2) throw Error("--levels must be >= 1 and --samples >= 2");
    double lo = 0.0, hi = 1.0;
    if (o.t_range.size() == 2) {
      lo = o.t_range[0];
      hi = o.t_range[1];
    } else if (!o.t_range.empty()) {
      throw Error("--t-range needs lo hi");
    } else if (points.real_count() > 0) {
      lo = std::numeric_limits<double>::infinity();
      hi = -lo;
      for (const auto& p : points.points()) {
        if (p.pad) continue;
        lo = std::min(lo, p.birth);
        hi = std::max(hi, p.death());
      }
      if (!(hi > lo)) hi = lo + 1.0;
    }
    const auto ts = sample_grid(lo, hi, o.samples);
    std::vector<std::vector<double>> lambdas;
    for (int k = 1; k <= o.levels; ++k) lambdas.push_back(persistence_landscape(points, k, ts));
    emit_text(o.out, format_landscape_tsv(ts, lambdas, {stamp.comment()}), out);
  }
  return kExitOk;
}

// --- metrics ---------------------------------------------------------------

struct MetricsOptions {
  std::string generated;
  std::string reference;
  std::vector<std::string> metrics{"chamfer", "1nna", "cov"};
  std::string dist = "cd";
  bool cd_root = false;
  std::size_t views = kDefaultViews;
  std::string out;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

std::vector<PointSet> load_point_sets(const fs::path& dir) {
  const auto files = files_with_extension(dir, {".tsv", ".xyz", ".txt"});
  if (files.empty()) throw IoError("no point-set files in " + dir.string());
  std::vector<PointSet> out;
  for (const auto& f : files) {
    try {
      out.push_back(parse_point_set(read_file(f)));
    } catch (const IoError& e) {
      throw IoError(f.string() + ": " + e.what());
    }
  }
  return out;
}

std::vector<FeatureStats> load_feature_stats(const fs::path& dir) {
  const auto files = files_with_extension(dir, {".vgrd"});
  if (files.empty()) throw IoError("no feature matrices in " + dir.string());
  std::vector<FeatureStats> out;
  for (const auto& f : files) {
    const RasterFile r = read_vgrd(f);
    if (r.nz != 1) throw IoError(f.string() + ": feature matrices need nz = 1");
    Matrix m(r.ny, r.nx);
    for (std::uint32_t y = 0; y < r.ny; ++y)
      for (std::uint32_t x = 0; x < r.nx; ++x) m(y, x) = r.values[std::size_t{y} * r.nx + x];
    out.push_back(feature_stats(m));
  }
  return out;
}

int cmd_metrics(const MetricsOptions& o, std::ostream& out) {
  const ChamferMode mode = o.cd_root ? ChamferMode::kRoot : ChamferMode::kSquared;
  const DistanceOptions dist{o.dist == "emd" ? SetDistance::kEmd : SetDistance::kChamfer, mode, o.threads};
  json config{{"command", "metrics"}, {"metrics", o.metrics}, {"distance", o.dist}, {"cd_root", o.cd_root},
              {"views", o.views}};
  const Stamp stamp = make_stamp(config, o.seed);
  if (!o.out.empty()) prepare_output_file(o.out);

  const bool wants_points = std::any_of(o.metrics.begin(), o.metrics.end(), [](const auto& m) { return m != "fid"; });
  std::vector<PointSet> gen, ref;
  if (wants_points) {
    gen = load_point_sets(o.generated);
    ref = load_point_sets(o.reference);
  }
  const std::string dist_name = o.dist == "emd" ? "emd" : (o.cd_root ? "chamfer-root" : "chamfer");

  json entries = json::array();
  for (const auto& name : o.metrics) {
    json params;
    double value = 0.0;
    if (name == "chamfer" || name == "emd") {
      if (gen.size() != ref.size()) throw Error(name + " pairs files by name order and needs equal counts");
      std::vector<double> d(gen.size());
      for_each_job(gen.size(), o.threads, [&](std::size_t i) {
        d[i] = name == "emd" ? emd(gen[i], ref[i]) : chamfer(gen[i], ref[i], mode);
      });
      for (double x : d) value += x;
      value /= static_cast<double>(d.size());
      params = {{"pairing", "sorted file name"}, {"pairs", d.size()}, {"aggregate", "mean"}};
      if (name == "chamfer") params["squared"] = !o.cd_root;
    } else if (name == "1nna") {
      value = one_nna(gen, ref, dist);
      params = {{"distance", dist_name}, {"generated", gen.size()}, {"reference", ref.size()}};
    } else if (name == "cov") {
      value = coverage(gen, ref, dist);
      params = {{"distance", dist_name}, {"generated", gen.size()}, {"reference", ref.size()}};
    } else {
      const auto g = load_feature_stats(o.generated);
      const auto r = load_feature_stats(o.reference);
      if (g.size() != r.size()) throw Error("fid needs the same number of views on both sides");
      std::vector<std::pair<FeatureStats, FeatureStats>> views;
      for (std::size_t i = 0; i < g.size(); ++i) views.emplace_back(g[i], r[i]);
      value = fid_multiview(views, o.views);
      params = {{"views", o.views}, {"feature_dim", g.front().mean.size()}};
    }
    entries.push_back({{"metric", name}, {"value", value}, {"parameters", params}, {"seed", o.seed}});
  }
  json report = stamp.header("metrics");
  report["metrics"] = entries;
  const std::string text = report.dump(2) + "\n";
  if (!o.out.empty()) write_file_atomic(o.out, text);
  out << text;
  return kExitOk;
}

// --- verify ----------------------------------------------------------------

struct VerifyOptions {
  std::vector<std::string> only;
  std::string report;
  std::uint64_t seed = 0;
};

int finish_verify(const std::vector<SuiteResult>& results, const char* command, const VerifyOptions& o,
                  const json& config, std::ostream& out, std::ostream& err) {
  const Stamp stamp = make_stamp(config, o.seed);
  out << verify_table(results);
  json report = stamp.header(command);
  report.update(json::parse(verify_report_json(results, o.seed, stamp.config_hash)));
  if (!o.report.empty()) {
    prepare_output_file(o.report);
    write_file_atomic(o.report, report.dump(2) + "\n");
  }
  bool ok = true;
  for (const auto& r : results) {
    ok = ok && r.passed();
    for (const auto& f : r.failures) err << r.name << " failure: " << f << '\n';
  }
  return ok ? kExitOk : kExitVerifyFailed;
}

int cmd_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err) {
  std::vector<std::string> selected;
  for (const auto& name : suite_names())
    if (o.only.empty() || std::find(o.only.begin(), o.only.end(), name) != o.only.end()) selected.push_back(name);
  std::vector<SuiteResult> results;
  for (const auto& name : selected) results.push_back(run_suite(name, o.seed));
  return finish_verify(results, "verify", o, {{"command", "verify"}, {"suites", selected}}, out, err);
}

int cmd_verify_kernels(const VerifyOptions& o, std::ostream& out, std::ostream& err) {
  auto results = kernel_checks(o.seed);
  results.push_back(run_suite("sampler", o.seed));
  return finish_verify(results, "verify-kernels", o, {{"command", "verify-kernels"}}, out, err);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Topological analysis of implicit 3D shapes", "topoforge"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  GenOptions gen;
  auto* g = app.add_subcommand("gen", "Rasterize preset or custom scenes to VGRD volumes");
  g->add_option("--preset", gen.preset, "Named preset or random-csg")
      ->check(CLI::IsMember([] {
        auto names = preset_names();
        names.push_back("random-csg");
        return names;
      }()));
  g->add_option("--scene", gen.scene_file, "Scene description file");
  g->add_option("--count", gen.count, "Number of random-csg scenes");
  g->add_option("--res", gen.res, "Grid points per axis");
  g->add_option("--bounds", gen.bounds, "Cube bounds lo hi")->expected(2);
  g->add_flag("--occupancy", gen.occupancy, "Write 0/1 occupancy instead of SDF");
  g->add_option("--out", gen.out, "Output directory")->required();
  g->add_option("--seed", gen.seed);
  g->add_option("--threads", gen.threads, "Worker threads across volumes (0 = all cores)");

  AnalyzeOptions an;
  auto* a = app.add_subcommand("analyze", "Persistence diagrams of VGRD volumes");
  a->add_option("inputs", an.inputs, "VGRD files or directories")->required();
  a->add_option("--out", an.out, "Output directory for diagrams");
  a->add_flag("--svg", an.svg, "Also write SVG scatter plots");
  auto* betti = a->add_option("--betti", an.betti_t, "Print Betti numbers at this threshold");
  a->add_flag("--keep-zero", an.keep_zero, "Keep zero-persistence pairs in the TSV");
  a->add_option("--seed", an.seed);
  a->add_option("--threads", an.threads, "Worker threads across volumes (0 = all cores)");

  PdOptions pd;
  auto* p = app.add_subcommand("pd", "Persistence point operations");
  p->require_subcommand(1);
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--in", pd.in, "Diagram TSV or point TSV")->required();
    sub->add_option("--out", pd.out, "Output file (stdout for text when omitted)");
    sub->add_option("--dim", pd.dim, "Homology dimension for diagram input");
    sub->add_flag("--no-essential", pd.no_essential, "Drop capped essential points");
    sub->add_option("--seed", pd.seed);
  };
  auto* topk = p->add_subcommand("topk", "Keep the k most persistent points, padded to k");
  add_common(topk);
  topk->add_option("--k", pd.k);
  auto* edit = p->add_subcommand("edit", "Move one point toward the diagonal");
  add_common(edit);
  edit->add_option("--index", pd.index)->required();
  edit->add_option("--factor", pd.factor)->required();
  auto* image = p->add_subcommand("image", "Persistence image as a VGRD raster");
  add_common(image);
  image->add_option("--sigma", pd.sigma);
  image->add_option("--width", pd.width);
  image->add_option("--height", pd.height);
  image->add_option("--weight", pd.weight)->check(CLI::IsMember({"linear", "constant"}));
  image->add_option("--range", pd.range, "birth_min birth_max persistence_min persistence_max")->expected(4);
  auto* land = p->add_subcommand("landscape", "Persistence landscape samples as TSV");
  add_common(land);
  land->add_option("--levels", pd.levels);
  land->add_option("--samples", pd.samples);
  land->add_option("--t-range", pd.t_range)->expected(2);

  MetricsOptions me;
  auto* m = app.add_subcommand("metrics", "Point-set and feature metrics as a JSON report");
  m->add_option("--generated", me.generated, "Directory of generated shapes")->required();
  m->add_option("--reference", me.reference, "Directory of reference shapes")->required();
  m->add_option("--metric", me.metrics, "chamfer, emd, 1nna, cov, fid")
      ->delimiter(',')
      ->check(CLI::IsMember({"chamfer", "emd", "1nna", "cov", "fid"}));
  m->add_option("--dist", me.dist, "Shape distance for 1nna and cov")->check(CLI::IsMember({"cd", "emd"}));
  m->add_flag("--cd-root", me.cd_root, "Chamfer with plain instead of squared distances");
  m->add_option("--views", me.views, "Expected number of FID views");
  m->add_option("--out", me.out, "Also write the report here");
  m->add_option("--seed", me.seed);
  m->add_option("--threads", me.threads, "Worker threads (0 = all cores)");

  VerifyOptions ve;
  auto* v = app.add_subcommand("verify", "Run the self-check suites");
  v->add_option("--only", ve.only, "Comma-separated suites")->delimiter(',')->check(CLI::IsMember(suite_names()));
  v->add_option("--report", ve.report, "JSON report path");
  v->add_option("--seed", ve.seed);

  VerifyOptions vk;
  auto* k = app.add_subcommand("verify-kernels", "Run the latent-stack kernel checks");
  k->add_option("--report", vk.report, "JSON report path");
  k->add_option("--seed", vk.seed);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (g->parsed()) return cmd_gen(gen, out);
    if (a->parsed()) {
      an.betti = betti->count() > 0;
      return cmd_analyze(an, out);
    }
    if (p->parsed()) {
      for (auto* sub : {topk, edit, image, land})
        if (sub->parsed()) pd.op = sub->get_name();
      return cmd_pd(pd, out);
    }
    if (m->parsed()) return cmd_metrics(me, out);
    if (v->parsed()) return cmd_verify(ve, out, err);
    return cmd_verify_kernels(vk, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace topoforge
