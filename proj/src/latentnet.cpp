#include "topoforge/latentnet.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "topoforge/error.hpp"
#include "topoforge/rng.hpp"
#include "topoforge/text.hpp"
#include "topoforge/volume_io.hpp"

namespace topoforge {

namespace {

struct Shape {
  std::string name;
  Eigen::Index rows;
  Eigen::Index cols;
};

std::vector<Shape> parameter_shapes(const LatentConfig& c) {
  const Eigen::Index C = c.width, C0 = c.bottleneck, W = c.condition_width;
  std::vector<Shape> s;
  s.push_back({"pe.w", 6 * c.frequencies, C});
  s.push_back({"pe.b", 1, C});
  for (const char* m : {"q", "k", "v", "o"}) s.push_back({std::string("enc.") + m, C, C});
  s.push_back({"kl.mu.w", C, C0});
  s.push_back({"kl.mu.b", 1, C0});
  s.push_back({"kl.logvar.w", C, C0});
  s.push_back({"kl.logvar.b", 1, C0});
  s.push_back({"lift.w", C0, C});
  s.push_back({"lift.b", 1, C});
  for (int l = 0; l < c.layers; ++l)
    for (const char* m : {"q", "k", "v", "o"})
      s.push_back({"self." + std::to_string(l) + "." + m, C, C});
  for (const char* m : {"q", "k", "v"}) s.push_back({std::string("dec.") + m, C, C});
  s.push_back({"occ.w", C, 1});
  s.push_back({"occ.b", 1, 1});
  s.push_back({"betti.table", c.betti_rows, W});
  s.push_back({"topo.lift.w", 2, W});
  s.push_back({"topo.lift.b", 1, W});
  for (const char* m : {"q", "k", "v", "o"}) s.push_back({std::string("topo.") + m, W, W});
  s.push_back({"topo.head.w", W, W});
  s.push_back({"topo.head.b", 1, W});
  for (int b = 0; b < c.denoise_blocks; ++b) {
    const std::string p = "den." + std::to_string(b) + ".";
    for (const char* m : {"q", "k", "v", "o"}) s.push_back({p + "self." + m, C0, C0});
    s.push_back({p + "cross.q", C0, C0});
    s.push_back({p + "cross.k", W, C0});
    s.push_back({p + "cross.v", W, C0});
    s.push_back({p + "cross.o", C0, C0});
  }
  return s;
}

void validate_config(const LatentConfig& c) {
  if (c.latents < 1 || c.width < 1 || c.bottleneck < 1 || c.layers < 0 || c.condition_width < 1 ||
      c.frequencies < 1 || c.pd_tokens < 1 || c.betti_rows < 1 || c.denoise_blocks < 0)
    throw Error("invalid latent configuration");
}

void require_cols(const Matrix& m, Eigen::Index cols, const char* what) {
  if (m.cols() != cols)
    throw Error(std::string(what) + ": expected " + std::to_string(cols) + " columns, got " +
                std::to_string(m.cols()));
}

double sigmoid(double s) {
  if (s >= 0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

std::string config_line(const LatentConfig& c) {
  return "config latents=" + std::to_string(c.latents) + " width=" + std::to_string(c.width) +
         " bottleneck=" + std::to_string(c.bottleneck) + " layers=" + std::to_string(c.layers) +
         " condition_width=" + std::to_string(c.condition_width) +
         " frequencies=" + std::to_string(c.frequencies) + " pd_tokens=" + std::to_string(c.pd_tokens) +
         " betti_rows=" + std::to_string(c.betti_rows) +
         " denoise_blocks=" + std::to_string(c.denoise_blocks);
}

LatentConfig parse_config_line(std::string_view line) {
  LatentConfig c;
  const auto fields = split(line, ' ');
  if (fields.empty() || fields[0] != "config") throw IoError("params: missing config line");
  for (std::size_t i = 1; i < fields.size(); ++i) {
    const auto eq = fields[i].find('=');
    if (eq == std::string_view::npos) throw IoError("params: malformed config field");
    const auto key = fields[i].substr(0, eq);
    const int v = static_cast<int>(parse_double(fields[i].substr(eq + 1)));
    if (key == "latents") c.latents = v;
    else if (key == "width") c.width = v;
    else if (key == "bottleneck") c.bottleneck = v;
    else if (key == "layers") c.layers = v;
    else if (key == "condition_width") c.condition_width = v;
    else if (key == "frequencies") c.frequencies = v;
    else if (key == "pd_tokens") c.pd_tokens = v;
    else if (key == "betti_rows") c.betti_rows = v;
    else if (key == "denoise_blocks") c.denoise_blocks = v;
    else throw IoError("params: unknown config key '" + std::string(key) + "'");
  }
  return c;
}

}  // namespace

// --- parameters -----------------------------------------------------------------

ParameterStore ParameterStore::seeded(const LatentConfig& config, std::uint64_t seed) {
  validate_config(config);
  ParameterStore store;
  store.config_ = config;
  store.seed_ = seed;
  Rng rng(seed);
  for (const auto& s : parameter_shapes(config)) {
    // biases and embedding rows share the scale of their weight matrix
    const double fan_in = s.rows == 1 ? 1.0 : static_cast<double>(s.rows);
    const double scale = s.name == "betti.table" ? 1.0 : 1.0 / std::sqrt(fan_in);
    Matrix m(s.rows, s.cols);
    for (Eigen::Index i = 0; i < s.rows; ++i)
      for (Eigen::Index j = 0; j < s.cols; ++j)
        m(i, j) = static_cast<double>(static_cast<float>(rng.normal() * scale));
    store.tensors_.emplace(s.name, std::move(m));
  }
  return store;
}

const Matrix& ParameterStore::get(const std::string& name) const {
  const auto it = tensors_.find(name);
  if (it == tensors_.end()) throw Error("unknown parameter '" + name + "'");
  return it->second;
}

void ParameterStore::set(const std::string& name, Matrix value) {
  const auto it = tensors_.find(name);
  if (it == tensors_.end()) throw Error("unknown parameter '" + name + "'");
  if (value.rows() != it->second.rows() || value.cols() != it->second.cols())
    throw Error("parameter '" + name + "' has the wrong shape");
  if (!value.allFinite()) throw Error("parameter '" + name + "' must be finite");
  it->second = std::move(value);
}

void ParameterStore::save(const std::filesystem::path& stem) const {
  std::string manifest = "# topoforge-params v1\n" + config_line(config_) + "\nseed " +
                         std::to_string(seed_) + "\n";
  std::string blob;
  for (const auto& [name, m] : tensors_) {
    RasterFile r;
    r.nx = static_cast<std::uint32_t>(m.cols());
    r.ny = static_cast<std::uint32_t>(m.rows());
    r.nz = 1;
    r.values.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) r.values.push_back(static_cast<float>(m(i, j)));
    manifest += name + "\t" + std::to_string(m.rows()) + "\t" + std::to_string(m.cols()) + "\t" +
                std::to_string(blob.size()) + "\n";
    blob += encode_vgrd(r);
  }
  write_file_atomic(std::filesystem::path(stem).concat(".bin"), blob);
  write_file_atomic(std::filesystem::path(stem).concat(".manifest"), manifest);
}

ParameterStore ParameterStore::load(const std::filesystem::path& stem) {
  const std::string manifest = read_file(std::filesystem::path(stem).concat(".manifest"));
  const std::string blob = read_file(std::filesystem::path(stem).concat(".bin"));
  std::istringstream in(manifest);
  std::string line;
  if (!std::getline(in, line) || line != "# topoforge-params v1")
    throw IoError("params: missing '# topoforge-params v1' header");
  ParameterStore store;
  try {
    if (!std::getline(in, line)) throw IoError("params: truncated manifest");
    store.config_ = parse_config_line(line);
    validate_config(store.config_);
    if (!std::getline(in, line) || line.rfind("seed ", 0) != 0) throw IoError("params: missing seed");
    store.seed_ = std::stoull(line.substr(5));
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      const auto f = split(line, '\t');
      if (f.size() != 4) throw IoError("params: malformed manifest line");
      const auto rows = static_cast<std::size_t>(parse_double(f[1]));
      const auto cols = static_cast<std::size_t>(parse_double(f[2]));
      const auto offset = static_cast<std::size_t>(parse_double(f[3]));
      const std::size_t bytes = kVgrdHeaderBytes + 4 * rows * cols;
      if (offset > blob.size() || bytes > blob.size() - offset)
        throw IoError("params: record outside the blob");
      const RasterFile r = decode_vgrd(std::string_view(blob).substr(offset, bytes));
      if (r.nx != cols || r.ny != rows || r.nz != 1) throw IoError("params: record shape mismatch");
      Matrix m(rows, cols);
      for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = r.values[i * cols + j];
      store.tensors_.emplace(std::string(f[0]), std::move(m));
    }
  } catch (const IoError&) {
    throw;
  } catch (const std::exception& e) {
    throw IoError(std::string("params: ") + e.what());
  }
  for (const auto& s : parameter_shapes(store.config_)) {
    const auto it = store.tensors_.find(s.name);
    if (it == store.tensors_.end() || it->second.rows() != s.rows || it->second.cols() != s.cols)
      throw IoError("params: missing or misshapen '" + s.name + "'");
  }
  return store;
}

// --- attention ------------------------------------------------------------------

Matrix softmax_rows(const Matrix& logits) {
  Matrix w(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double mx = logits.row(i).maxCoeff();
    w.row(i) = (logits.row(i).array() - mx).exp().matrix();
    w.row(i) /= w.row(i).sum();
  }
  return w;
}

AttentionResult scaled_dot_attention(const Matrix& q, const Matrix& k, const Matrix& v) {
  if (q.cols() != k.cols() || k.rows() != v.rows() || k.rows() == 0)
    throw Error("attention: shape mismatch");
  AttentionResult r;
  r.weights = softmax_rows(q * k.transpose() / std::sqrt(static_cast<double>(q.cols())));
  r.output = r.weights * v;
  return r;
}

Matrix fourier_features(const Matrix& points, int frequencies) {
  require_cols(points, 3, "fourier features");
  Matrix f(points.rows(), 6 * frequencies);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    Eigen::Index col = 0;
    for (int a = 0; a < 3; ++a) {
      for (int k = 0; k < frequencies; ++k) {
        const double arg = std::ldexp(std::numbers::pi, k) * points(i, a);
        f(i, col++) = std::sin(arg);
        f(i, col++) = std::cos(arg);
      }
    }
  }
  return f;
}

Matrix positional_embed(const Matrix& points, const ParameterStore& params) {
  Matrix out = fourier_features(points, params.config().frequencies) * params.get("pe.w");
  out.rowwise() += params.get("pe.b").row(0);
  return out;
}

AttentionResult cross_attention_encode(const Matrix& points, const Matrix& queries,
                                       const ParameterStore& params) {
  require_cols(points, 3, "cross attention");
  require_cols(queries, 3, "cross attention");
  if (points.rows() == 0 || queries.rows() > points.rows())
    throw Error("cross attention needs 1 <= M <= N");
  const Matrix xq = positional_embed(queries, params);
  const Matrix xk = positional_embed(points, params);
  AttentionResult r =
      scaled_dot_attention(xq * params.get("enc.q"), xk * params.get("enc.k"), xk * params.get("enc.v"));
  r.output = r.output * params.get("enc.o");
  return r;
}

std::vector<std::size_t> farthest_point_indices(const Matrix& points, std::size_t m,
                                                std::size_t start) {
  require_cols(points, 3, "downsample");
  const auto n = static_cast<std::size_t>(points.rows());
  if (m > n) throw Error("downsample: M exceeds the number of points");
  if (m == 0) throw Error("downsample: M must be positive");
  if (start >= n) throw Error("downsample: start index out of range");
  std::vector<std::size_t> chosen{start};
  std::vector<char> taken(n, 0);
  taken[start] = 1;
  std::vector<double> nearest(n);
  for (std::size_t i = 0; i < n; ++i) nearest[i] = (points.row(i) - points.row(start)).squaredNorm();
  while (chosen.size() < m) {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!taken[i] && (best == n || nearest[i] > nearest[best])) best = i;
    chosen.push_back(best);
    taken[best] = 1;
    for (std::size_t i = 0; i < n; ++i)
      nearest[i] = std::min(nearest[i], (points.row(i) - points.row(best)).squaredNorm());
  }
  return chosen;
}

Matrix downsample(const Matrix& points, std::size_t m, std::uint64_t seed) {
  if (points.rows() == 0) throw Error("downsample: no points");
  Rng rng(seed);
  const auto idx = farthest_point_indices(points, m, rng.index(static_cast<std::uint64_t>(points.rows())));
  Matrix out(static_cast<Eigen::Index>(m), 3);
  for (std::size_t i = 0; i < m; ++i) out.row(static_cast<Eigen::Index>(i)) = points.row(idx[i]);
  return out;
}

// --- bottleneck -------------------------------------------------------------------

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

Matrix reparameterize(const Matrix& mu, const Matrix& logvar, const Matrix& eps) {
  if (mu.rows() != logvar.rows() || mu.cols() != logvar.cols() || eps.rows() != mu.rows() ||
      eps.cols() != mu.cols())
    throw Error("reparameterize: shape mismatch");
  return mu + ((0.5 * logvar.array()).exp() * eps.array()).matrix();
}

LatentSet kl_bottleneck(const Matrix& features, const ParameterStore& params, std::uint64_t seed) {
  require_cols(features, params.config().width, "bottleneck");
  LatentSet s;
  s.features = features;
  s.mu = features * params.get("kl.mu.w");
  s.mu.rowwise() += params.get("kl.mu.b").row(0);
  s.logvar = features * params.get("kl.logvar.w");
  s.logvar.rowwise() += params.get("kl.logvar.b").row(0);
  s.logvar = s.logvar.cwiseMax(kLogvarMin).cwiseMin(kLogvarMax);
  s.z = reparameterize(s.mu, s.logvar, gaussian_matrix(s.mu.rows(), s.mu.cols(), seed));
  return s;
}

KlLoss kl_loss(const Matrix& mu, const Matrix& logvar) {
  if (mu.rows() != logvar.rows() || mu.cols() != logvar.cols() || mu.size() == 0)
    throw Error("kl loss: shape mismatch");
  const double n = static_cast<double>(mu.size());
  KlLoss r;
  const auto var = logvar.array().exp();
  r.value = 0.5 * (mu.array().square() + var - logvar.array()).sum() / n;
  r.grad_mu = mu / n;
  r.grad_logvar = (0.5 * (var - 1.0) / n).matrix();
  return r;
}

Matrix lift_latents(const Matrix& z, const ParameterStore& params) {
  require_cols(z, params.config().bottleneck, "lift");
  Matrix x = z * params.get("lift.w");
  x.rowwise() += params.get("lift.b").row(0);
  return x;
}

Matrix self_attention_stack(const Matrix& x, const ParameterStore& params, int layers) {
  if (layers < 1) throw Error("self-attention stack needs L >= 1");
  if (layers > params.config().layers) throw Error("self-attention stack: not enough layers in params");
  require_cols(x, params.config().width, "self attention");
  Matrix h = x;
  for (int l = 0; l < layers; ++l) {
    const std::string p = "self." + std::to_string(l) + ".";
    const auto a = scaled_dot_attention(h * params.get(p + "q"), h * params.get(p + "k"),
                                        h * params.get(p + "v"));
    h += a.output * params.get(p + "o");
  }
  return h;
}

Interpolation query_interpolate(const Eigen::Vector3d& x, const Matrix& latents,
                                const ParameterStore& params) {
  require_cols(latents, params.config().width, "interpolate");
  const Matrix q = positional_embed(x.transpose(), params) * params.get("dec.q");
  const auto a = scaled_dot_attention(q, latents * params.get("dec.k"), latents * params.get("dec.v"));
  return {a.output.row(0), a.weights.row(0).transpose()};
}

double occupancy_head(const RowVector& fx, const ParameterStore& params) {
  const Matrix& w = params.get("occ.w");
  if (fx.size() != w.rows()) throw Error("occupancy head: width mismatch");
  return sigmoid((fx * w)(0, 0) + params.get("occ.b")(0, 0));
}

BceLoss bce_loss(const Vector& target, const Vector& predicted) {
  if (target.size() != predicted.size() || target.size() == 0) throw Error("bce loss: size mismatch");
  const double n = static_cast<double>(target.size());
  BceLoss r;
  r.grad.resize(target.size());
  double sum = 0.0;
  for (Eigen::Index i = 0; i < target.size(); ++i) {
    const double o = target[i];
    const double p = std::clamp(predicted[i], kBceClamp, 1.0 - kBceClamp);
    sum += o * std::log(p) + (1.0 - o) * std::log(1.0 - p);
    r.grad[i] = (p - o) / (p * (1.0 - p)) / n;
  }
  r.value = -sum / n;
  return r;
}

LatentSet encode_shape(const Matrix& surface_points, const ParameterStore& params,
                       std::uint64_t seed) {
  const Matrix queries =
      downsample(surface_points, static_cast<std::size_t>(params.config().latents), seed);
  const Matrix f = cross_attention_encode(surface_points, queries, params).output;
  return kl_bottleneck(f, params, seed + 0x9E3779B97F4A7C15ULL);
}

Vector decode_occupancy(const Matrix& z, const Matrix& queries, const ParameterStore& params) {
  require_cols(queries, 3, "decode");
  const Matrix latents = self_attention_stack(lift_latents(z, params), params, params.config().layers);
  Vector occ(queries.rows());
  for (Eigen::Index i = 0; i < queries.rows(); ++i)
    occ[i] = occupancy_head(query_interpolate(queries.row(i).transpose(), latents, params).value, params);
  return occ;
}

// --- conditions -----------------------------------------------------------------

ConditionVector betti_embed(int beta1, const ParameterStore& params) {
  const Matrix& table = params.get("betti.table");
  if (beta1 < 0 || beta1 >= table.rows()) throw Error("unsupported Betti number");
  return {ConditionKind::kBetti, table.row(beta1).transpose()};
}

ConditionVector topo_encode(const PersistencePointSet& points, const ParameterStore& params) {
  const int tokens = params.config().pd_tokens;
  if (points.size() != static_cast<std::size_t>(tokens))
    throw Error("topology encoder expects exactly " + std::to_string(tokens) + " points, got " +
                std::to_string(points.size()));
  std::vector<Eigen::Index> real;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (!points.points()[i].pad) real.push_back(static_cast<Eigen::Index>(i));

  const Eigen::Index W = params.config().condition_width;
  RowVector pooled = RowVector::Zero(W);
  if (!real.empty()) {
    Matrix g(static_cast<Eigen::Index>(real.size()), 2);
    for (std::size_t r = 0; r < real.size(); ++r) {
      const auto& p = points.points()[static_cast<std::size_t>(real[r])];
      g(static_cast<Eigen::Index>(r), 0) = p.birth;
      g(static_cast<Eigen::Index>(r), 1) = p.persistence;
    }
    Matrix x = g * params.get("topo.lift.w");
    x.rowwise() += params.get("topo.lift.b").row(0);
    // padding is masked by leaving it out of keys, values and the pool
    const auto a = scaled_dot_attention(x * params.get("topo.q"), x * params.get("topo.k"),
                                        x * params.get("topo.v"));
    const Matrix h = x + a.output * params.get("topo.o");
    pooled = h.colwise().mean();
  }
  RowVector out = pooled * params.get("topo.head.w") + params.get("topo.head.b").row(0);
  return {ConditionKind::kPd, out.transpose()};
}

ConditionVector concat_conditions(const std::vector<ConditionVector>& parts) {
  if (parts.empty()) throw Error("concat_conditions needs at least one part");
  Eigen::Index n = 0;
  for (const auto& p : parts) n += p.values.size();
  ConditionVector out{ConditionKind::kConcatenated, Vector(n)};
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.values.segment(at, p.values.size()) = p.values;
    at += p.values.size();
  }
  return out;
}

// --- diffusion ----------------------------------------------------------------------

double edm_loss(const Matrix& z, double sigma, std::uint64_t seed, const Denoiser& denoiser,
                const ConditionVector& c, EdmNorm norm) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error("noise level must be positive");
  if (z.rows() == 0) throw Error("edm loss: empty latent set");
  const Matrix noisy = z + sigma * gaussian_matrix(z.rows(), z.cols(), seed);
  const Matrix d = denoiser(noisy, sigma, c);
  if (d.rows() != z.rows() || d.cols() != z.cols()) throw Error("denoiser changed the latent shape");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double sq = (d.row(i) - z.row(i)).squaredNorm();
    sum += norm == EdmNorm::kSquared ? sq : std::sqrt(sq);
  }
  return sum / static_cast<double>(z.rows());
}

std::vector<double> edm_schedule(const SamplerOptions& o) {
  if (o.steps < 1) throw Error("sampler needs at least one step");
  if (!(o.sigma_min > 0.0) || !(o.sigma_max > o.sigma_min) || !(o.rho > 0.0))
    throw Error("sampler needs 0 < sigma_min < sigma_max and rho > 0");
  std::vector<double> s(static_cast<std::size_t>(o.steps) + 1, 0.0);
  const double a = std::pow(o.sigma_max, 1.0 / o.rho);
  const double b = std::pow(o.sigma_min, 1.0 / o.rho);
  for (int i = 0; i < o.steps; ++i) {
    const double t = o.steps == 1 ? 0.0 : static_cast<double>(i) / (o.steps - 1);
    s[i] = std::pow(a + t * (b - a), o.rho);
  }
  s.front() = o.sigma_max;
  if (o.steps > 1) s[o.steps - 1] = o.sigma_min;
  return s;
}

Matrix edm_sample(const Denoiser& denoiser, const ConditionVector& c, Eigen::Index rows,
                  Eigen::Index cols, std::uint64_t seed, const SamplerOptions& options) {
  const auto sigmas = edm_schedule(options);
  Matrix x = options.sigma_max * gaussian_matrix(rows, cols, seed);
  for (std::size_t i = 0; i + 1 < sigmas.size(); ++i) {
    const double s = sigmas[i], next = sigmas[i + 1];
    const Matrix d = (x - denoiser(x, s, c)) / s;
    Matrix x_next = x + (next - s) * d;
    if (next > 0.0) {
      const Matrix d2 = (x_next - denoiser(x_next, next, c)) / next;
      x_next = x + (next - s) * 0.5 * (d + d2);
    }
    x = std::move(x_next);
  }
  return x;
}

Matrix denoise_block(const Matrix& x, const ConditionVector& c, const ParameterStore& params,
                     int block) {
  const auto& cfg = params.config();
  if (block < 0 || block >= cfg.denoise_blocks) throw Error("denoising block index out of range");
  require_cols(x, cfg.bottleneck, "denoise block");
  const Eigen::Index W = cfg.condition_width;
  if (c.values.size() == 0 || c.values.size() % W != 0)
    throw Error("condition length must be a positive multiple of " + std::to_string(W));
  Matrix tokens(c.values.size() / W, W);
  for (Eigen::Index t = 0; t < tokens.rows(); ++t) tokens.row(t) = c.values.segment(t * W, W).transpose();

  const std::string p = "den." + std::to_string(block) + ".";
  const auto sa = scaled_dot_attention(x * params.get(p + "self.q"), x * params.get(p + "self.k"),
                                       x * params.get(p + "self.v"));
  const Matrix h = x + sa.output * params.get(p + "self.o");
  const auto ca = scaled_dot_attention(h * params.get(p + "cross.q"), tokens * params.get(p + "cross.k"),
                                       tokens * params.get(p + "cross.v"));
  return h + ca.output * params.get(p + "cross.o");
}

Denoiser block_denoiser(const ParameterStore& params) {
  auto shared = std::make_shared<const ParameterStore>(params);
  return [shared](const Matrix& x, double, const ConditionVector& c) {
    Matrix h = x;
    for (int b = 0; b < shared->config().denoise_blocks; ++b) h = denoise_block(h, c, *shared, b);
    return h;
  };
}

}  // namespace topoforge
