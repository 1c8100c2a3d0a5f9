#include "topoforge/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <tuple>

#include <json.hpp>

#include "topoforge/cubical.hpp"
#include "topoforge/error.hpp"
#include "topoforge/latentnet.hpp"
#include "topoforge/pd.hpp"
#include "topoforge/presets.hpp"
#include "topoforge/rng.hpp"

namespace topoforge {

namespace {

using json = nlohmann::json;

VolumeGrid random_grid(Rng& rng, GridDims dims, int levels) {
  std::vector<double> v(dims.count());
  for (double& x : v) {
    x = rng.uniform(-1.0, 1.0);
    if (levels > 0) x = std::floor(x * levels) / levels;
  }
  return VolumeGrid(dims, kUnitBounds, std::move(v));
}

json grid_json(const VolumeGrid& g) {
  const auto v = g.values();
  return {{"dims", {g.dims().nx, g.dims().ny, g.dims().nz}}, {"values", std::vector<double>(v.begin(), v.end())}};
}

SuiteResult named(std::string name) {
  SuiteResult r;
  r.name = std::move(name);
  return r;
}

using PairKey = std::tuple<int, double, double>;

std::vector<PairKey> pair_keys(const PersistenceDiagramSet& pds) {
  std::vector<PairKey> out;
  for (const auto& p : pds.pairs()) out.emplace_back(p.dim, p.birth, p.death);
  std::sort(out.begin(), out.end());
  return out;
}

SuiteResult oracle_suite(std::uint64_t seed) {
  SuiteResult r = named("oracle");
  Rng rng(seed ^ 0x6f7261636c65ULL);
  for (int trial = 0; trial < 30; ++trial) {
    const GridDims d{4 + static_cast<int>(rng.index(5)), 4 + static_cast<int>(rng.index(5)),
                     4 + static_cast<int>(rng.index(5))};
    const VolumeGrid g = random_grid(rng, d, trial % 3 == 0 ? 2 : 0);
    const auto k = build_filtration(g);
    ++r.cases;
    if (pair_keys(compute_persistence(k)) != pair_keys(compute_persistence_naive(k))) {
      json f = grid_json(g);
      f["trial"] = trial;
      r.failures.push_back(f.dump());
    }
  }
  return r;
}

SuiteResult euler_suite(std::uint64_t seed) {
  SuiteResult r = named("euler");
  Rng rng(seed ^ 0x65756c6572ULL);
  const auto scenes = random_csg(5, seed);
  for (const auto& s : scenes) {
    const auto k = build_filtration(rasterize(s.scene, {16, 16, 16}));
    const auto pds = compute_persistence(k);
    for (int i = 0; i < 10; ++i) {
      const double t = rng.uniform(k.min_value(), k.max_value());
      const auto b = betti_at(pds, t);
      const long long chi = euler_characteristic_at(k, t);
      ++r.cases;
      if (chi != static_cast<long long>(b[0]) - b[1] + b[2] - b[3])
        r.failures.push_back(json{{"scene", s.scene.to_string()}, {"res", 16}, {"t", t}, {"chi", chi},
                                  {"betti", b}}.dump());
    }
  }
  return r;
}

SuiteResult stability_suite(std::uint64_t seed) {
  SuiteResult r = named("stability");
  Rng rng(seed ^ 0x737461626cULL);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const GridDims d{7, 7, 7};
    const VolumeGrid a = random_grid(rng, d, 0);
    const double eps = trial % 2 ? 0.01 : 0.005;
    std::vector<double> w(a.values().begin(), a.values().end());
    for (double& x : w) x += rng.uniform(-eps, eps);
    const VolumeGrid b(d, kUnitBounds, w);
    const auto p = compute_persistence(build_filtration(a));
    const auto q = compute_persistence(build_filtration(b));
    for (int dim = 0; dim <= 2; ++dim) {
      const double db = bottleneck_distance(to_points(p, dim), to_points(q, dim));
      worst = std::max(worst, db / eps);
      ++r.cases;
      if (db > eps + 1e-9) {
        json f = grid_json(a);
        f["perturbed"] = w;
        f["dim"] = dim;
        f["eps"] = eps;
        f["bottleneck"] = db;
        r.failures.push_back(f.dump());
      }
    }
  }
  r.measures.emplace_back("max_bottleneck_over_eps", worst);
  return r;
}

Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double lo, double hi) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(lo, hi);
  return m;
}

SuiteResult single_check(std::string name, double measure, bool ok, json detail) {
  SuiteResult r = named(std::move(name));
  r.cases = 1;
  r.measures.emplace_back("value", measure);
  if (!ok) r.failures.push_back(detail.dump());
  return r;
}

SuiteResult sampler_suite(std::uint64_t seed) {
  SuiteResult r = named("sampler");
  const ConditionVector c{ConditionKind::kExternal, Vector::Zero(1)};
  const Denoiser gauss = [](const Matrix& x, double s, const ConditionVector&) { return Matrix(x / (1 + s * s)); };
  constexpr int kSamples = 10000;
  constexpr int kCols = 32;
  Vector mean = Vector::Zero(kCols), sq = Vector::Zero(kCols);
  for (int i = 0; i < kSamples; ++i) {
    const RowVector x = edm_sample(gauss, c, 1, kCols, seed * kSamples + static_cast<std::uint64_t>(i));
    mean += x.transpose();
    sq += x.transpose().cwiseAbs2();
  }
  mean /= kSamples;
  const Vector var = sq / kSamples - mean.cwiseAbs2();
  r.cases = kCols;
  r.measures = {{"max_abs_mean", mean.cwiseAbs().maxCoeff()}, {"min_var", var.minCoeff()}, {"max_var", var.maxCoeff()}};
  for (int j = 0; j < kCols; ++j)
    if (std::abs(mean[j]) >= 0.05 || var[j] < 0.95 || var[j] > 1.05)
      r.failures.push_back(json{{"coordinate", j}, {"mean", mean[j]}, {"var", var[j]}, {"seed", seed}}.dump());
  return r;
}

}  // namespace

std::vector<SuiteResult> kernel_checks(std::uint64_t seed) {
  Rng rng(seed ^ 0x6b65726e656cULL);
  std::vector<SuiteResult> out;
  const double h = 1e-5;

  {
    const double v = kl_loss(Matrix::Zero(4, 8), Matrix::Zero(4, 8)).value;
    out.push_back(single_check("kl_value", v, std::abs(v - 0.5) <= 1e-12, {{"value", v}}));
  }
  {
    double err = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const Matrix mu = random_matrix(rng, 2, 4, -2, 2), lv = random_matrix(rng, 2, 4, -3, 3);
      const auto k = kl_loss(mu, lv);
      for (Eigen::Index i = 0; i < mu.size(); ++i) {
        Matrix p = mu, m = mu, lp = lv, lm = lv;
        p(i) += h;
        m(i) -= h;
        lp(i) += h;
        lm(i) -= h;
        err = std::max(err, std::abs((kl_loss(p, lv).value - kl_loss(m, lv).value) / (2 * h) - k.grad_mu(i)));
        err = std::max(err, std::abs((kl_loss(mu, lp).value - kl_loss(mu, lm).value) / (2 * h) - k.grad_logvar(i)));
      }
    }
    out.push_back(single_check("kl_gradient", err, err <= 1e-6, {{"max_error", err}}));
  }
  {
    double err = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      Vector o(6), p(6);
      for (int i = 0; i < 6; ++i) {
        o[i] = rng.uniform() < 0.5 ? 0.0 : 1.0;
        p[i] = rng.uniform(0.05, 0.95);
      }
      const Vector g = bce_loss(o, p).grad;
      for (int i = 0; i < 6; ++i) {
        Vector a = p, b = p;
        a[i] += h;
        b[i] -= h;
        err = std::max(err, std::abs((bce_loss(o, a).value - bce_loss(o, b).value) / (2 * h) - g[i]));
      }
    }
    out.push_back(single_check("bce_gradient", err, err <= 1e-6, {{"max_error", err}}));
  }
  {
    double worst = 0.0;
    const ConditionVector c{ConditionKind::kExternal, Vector::Zero(1)};
    for (std::uint64_t s = 0; s < 50; ++s) {
      const Matrix z = random_matrix(rng, 8, 4, -1, 1);
      const Denoiser oracle = [&z](const Matrix&, double, const ConditionVector&) { return z; };
      worst = std::max(worst, edm_loss(z, 0.5 + static_cast<double>(s % 5), seed + s, oracle, c));
    }
    out.push_back(single_check("edm_oracle", worst, worst == 0.0, {{"max_loss", worst}}));
  }
  {
    double err = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const auto a = scaled_dot_attention(random_matrix(rng, 5, 8, -3, 3), random_matrix(rng, 7, 8, -3, 3),
                                          random_matrix(rng, 7, 3, -1, 1));
      err = std::max(err, (a.weights.rowwise().sum().array() - 1.0).abs().maxCoeff());
    }
    out.push_back(single_check("attention_rows", err, err <= 1e-9, {{"max_error", err}}));
  }
  {
    LatentConfig config;
    config.latents = 8;
    config.width = 16;
    config.layers = 2;
    const auto params = ParameterStore::seeded(config, seed);
    double err = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      // equal keys keep insertion order, so these inputs reach the encoder permuted
      std::vector<PersistencePoint> pts;
      for (int i = 0; i < 6; ++i) {
        const double b = std::round(rng.uniform(-0.3, 0.1) * 4) / 4, p = std::round(rng.uniform(0.05, 0.4) * 4) / 4;
        pts.push_back({b, p, i % 2 == 0, false});
      }
      const auto ca = topo_encode(top_k(PersistencePointSet(1, pts), 16), params);
      std::reverse(pts.begin(), pts.end());
      const auto cb = topo_encode(top_k(PersistencePointSet(1, pts), 16), params);
      err = std::max(err, (ca.values - cb.values).cwiseAbs().maxCoeff());
    }
    out.push_back(single_check("topo_permutation", err, err <= 1e-9, {{"max_error", err}}));
  }
  return out;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"oracle", "euler", "stability", "kernels", "sampler"};
  return names;
}

SuiteResult run_suite(std::string_view name, std::uint64_t seed) {
  if (name == "oracle") return oracle_suite(seed);
  if (name == "euler") return euler_suite(seed);
  if (name == "stability") return stability_suite(seed);
  if (name == "sampler") return sampler_suite(seed);
  if (name == "kernels") {
    SuiteResult r = named("kernels");
    for (auto& k : kernel_checks(seed)) {
      r.cases += k.cases;
      r.measures.emplace_back(k.name, k.measures.front().second);
      for (auto& f : k.failures) r.failures.push_back(json{{"check", k.name}, {"detail", json::parse(f)}}.dump());
    }
    return r;
  }
  throw Error("unknown suite: " + std::string(name));
}

std::string verify_report_json(const std::vector<SuiteResult>& results, std::uint64_t seed,
                               std::string_view config_hash) {
  json suites = json::array();
  bool all = true;
  for (const auto& r : results) {
    json measures = json::object();
    for (const auto& [k, v] : r.measures) measures[k] = v;
    json failures = json::array();
    for (const auto& f : r.failures) failures.push_back(json::parse(f));
    suites.push_back({{"name", r.name}, {"passed", r.passed()}, {"cases", r.cases},
                      {"failures", failures}, {"measures", measures}});
    all = all && r.passed();
  }
  json report{{"seed", seed}, {"config_hash", config_hash}, {"passed", all}, {"suites", suites}};
  return report.dump(2) + "\n";
}

std::string verify_table(const std::vector<SuiteResult>& results) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-18s %8s %8s  %s\n", "suite", "cases", "failed", "status");
  out += line;
  for (const auto& r : results) {
    std::snprintf(line, sizeof line, "%-18s %8zu %8zu  %s\n", r.name.c_str(), r.cases, r.failures.size(),
                  r.passed() ? "PASS" : "FAIL");
    out += line;
  }
  return out;
}

}  // namespace topoforge
