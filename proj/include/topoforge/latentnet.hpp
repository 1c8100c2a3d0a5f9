#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "topoforge/pd.hpp"

namespace topoforge {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Sizes of the latent stack. M, C and L are desk-scale choices; the
/// bottleneck width, condition width and token count follow the reference
/// configuration.
struct LatentConfig {
  int latents = 32;          // M
  int width = 64;            // C
  int bottleneck = 32;       // C0
  int layers = 4;            // L
  int condition_width = 256;
  int frequencies = 8;       // per axis, omega_k = 2^k * pi
  int pd_tokens = 16;
  int betti_rows = 5;        // beta_1 in 0..4
  int denoise_blocks = 1;

  friend bool operator==(const LatentConfig&, const LatentConfig&) = default;
};

/// Reference-scale constants that the desk defaults do not use.
inline constexpr int kReferenceDenoiseBlocks = 24;
inline constexpr int kReferenceSurfacePoints = 2048;
inline constexpr int kReferenceQueryPoints = 2048;

inline constexpr double kLogvarMin = -30.0;
inline constexpr double kLogvarMax = 20.0;
inline constexpr double kBceClamp = 1e-7;

/**
 * Named parameter matrices.
 *
 * Seeded stores draw N(0, 1) / sqrt(fan_in) entries rounded to float, so a
 * save/load round trip through the f32 container is bit-exact.
 */
class ParameterStore {
 public:
  ParameterStore() = default;
  static ParameterStore seeded(const LatentConfig& config, std::uint64_t seed);

  const LatentConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }
  const Matrix& get(const std::string& name) const;
  /// Replaces an existing matrix; the shape must match.
  void set(const std::string& name, Matrix value);
  bool contains(const std::string& name) const { return tensors_.count(name) != 0; }
  const std::map<std::string, Matrix>& tensors() const { return tensors_; }

  /// Writes `<stem>.manifest` (name, rows, cols, byte offset per matrix)
  /// and `<stem>.bin` (one VGRD record per matrix, concatenated).
  void save(const std::filesystem::path& stem) const;
  static ParameterStore load(const std::filesystem::path& stem);

 private:
  LatentConfig config_;
  std::uint64_t seed_ = 0;
  std::map<std::string, Matrix> tensors_;
};

struct AttentionResult {
  Matrix output;
  /// Row-stochastic attention matrix (queries x keys).
  Matrix weights;
};

/// Row-wise softmax, max-subtracted.
Matrix softmax_rows(const Matrix& logits);

/// softmax(Q K^T / sqrt(Q.cols())) V.
AttentionResult scaled_dot_attention(const Matrix& q, const Matrix& k, const Matrix& v);

/// sin/cos of omega_k * coordinate per axis: n x 6F, ordered axis, then
/// frequency, then (sin, cos).
Matrix fourier_features(const Matrix& points, int frequencies);

/// Fourier features projected to width C.
Matrix positional_embed(const Matrix& points, const ParameterStore& params);

/// F = W_o softmax(q(PE(P~)) k(PE(P))^T / sqrt(C)) v(PE(P)): M x C.
AttentionResult cross_attention_encode(const Matrix& points, const Matrix& queries,
                                       const ParameterStore& params);

/// Farthest-point sampling starting from `start`; ties go to the lowest
/// index. Returns indices into `points`.
std::vector<std::size_t> farthest_point_indices(const Matrix& points, std::size_t m,
                                                std::size_t start);
/// Same, with the start drawn from `seed`. Returns the selected rows.
Matrix downsample(const Matrix& points, std::size_t m, std::uint64_t seed);

struct LatentSet {
  Matrix features;  // F, M x C
  Matrix z;         // M x C0
  Matrix mu;
  Matrix logvar;    // clamped to [kLogvarMin, kLogvarMax]
};

/// Standard normal M x C0 matrix in row-major draw order.
Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed);

/// z = mu + exp(logvar / 2) * eps.
Matrix reparameterize(const Matrix& mu, const Matrix& logvar, const Matrix& eps);

/// Two linear maps to (mu, logvar), logvar clamped, eps seeded.
LatentSet kl_bottleneck(const Matrix& features, const ParameterStore& params, std::uint64_t seed);

struct KlLoss {
  double value = 0.0;
  Matrix grad_mu;
  Matrix grad_logvar;
};

/// (1 / (M C0)) sum 1/2 (mu^2 + sigma^2 - log sigma^2), without the -1 of
/// the textbook Gaussian KL.
KlLoss kl_loss(const Matrix& mu, const Matrix& logvar);

/// C0 -> C linear lift of the bottleneck.
Matrix lift_latents(const Matrix& z, const ParameterStore& params);

/// L residual single-head self-attention layers: x <- x + W_o attn(x).
Matrix self_attention_stack(const Matrix& x, const ParameterStore& params, int layers);

struct Interpolation {
  RowVector value;  // f_x, length C
  Vector weights;   // softmax over the M latents
};

/// f_x = sum_i softmax_i(q(PE(x)) . k(f_i) / sqrt(C)) v(f_i).
Interpolation query_interpolate(const Eigen::Vector3d& x, const Matrix& latents,
                                const ParameterStore& params);

/// sigmoid(w . f_x + b).
double occupancy_head(const RowVector& fx, const ParameterStore& params);

struct BceLoss {
  double value = 0.0;
  /// dL / d o_hat, evaluated at the clamped predictions.
  Vector grad;
};

/// Mean binary cross-entropy with predictions clamped to
/// [kBceClamp, 1 - kBceClamp].
BceLoss bce_loss(const Vector& target, const Vector& predicted);

/// Full autoencoder pass helpers.
LatentSet encode_shape(const Matrix& surface_points, const ParameterStore& params,
                       std::uint64_t seed);
Vector decode_occupancy(const Matrix& z, const Matrix& queries, const ParameterStore& params);

// --- conditions --------------------------------------------------------------

enum class ConditionKind { kBetti, kPd, kExternal, kConcatenated };

struct ConditionVector {
  ConditionKind kind = ConditionKind::kExternal;
  Vector values;
};

/// Row beta1 of the seeded embedding table. Throws Error("unsupported Betti
/// number") outside the table.
ConditionVector betti_embed(int beta1, const ParameterStore& params);

/// Lift each (birth, persistence) token to the condition width, one
/// residual self-attention layer with padding masked out, mean pool over
/// real tokens and a linear head. Needs exactly `pd_tokens` points.
ConditionVector topo_encode(const PersistencePointSet& points, const ParameterStore& params);

/// Concatenation in order. Throws Error on an empty list.
ConditionVector concat_conditions(const std::vector<ConditionVector>& parts);

// --- diffusion -----------------------------------------------------------------

using Denoiser = std::function<Matrix(const Matrix& x, double sigma, const ConditionVector& c)>;

enum class EdmNorm { kEuclidean, kSquared };

/// (1/M) sum_i ||D(z_i + n_i, sigma, c) - z_i|| with n = sigma * seeded
/// standard normal. kSquared uses the squared norm instead.
double edm_loss(const Matrix& z, double sigma, std::uint64_t seed, const Denoiser& denoiser,
                const ConditionVector& c, EdmNorm norm = EdmNorm::kEuclidean);

struct SamplerOptions {
  int steps = 64;
  double sigma_min = 0.002;
  double sigma_max = 80.0;
  double rho = 7.0;
};

/// sigma_0 = sigma_max > ... > sigma_{N-1} = sigma_min, followed by 0.
std::vector<double> edm_schedule(const SamplerOptions& options);

/// Deterministic Heun integration of the probability-flow ODE along the
/// schedule, starting from sigma_max times a seeded Gaussian. The final
/// step to sigma = 0 is a plain Euler step.
Matrix edm_sample(const Denoiser& denoiser, const ConditionVector& c, Eigen::Index rows,
                  Eigen::Index cols, std::uint64_t seed, const SamplerOptions& options = {});

/// One denoising block: x + self_attn(x), then + cross_attn(x, condition
/// tokens), where the condition is split into rows of condition_width.
Matrix denoise_block(const Matrix& x, const ConditionVector& c, const ParameterStore& params,
                     int block);

/// Denoiser built from the seeded blocks (sigma is ignored).
Denoiser block_denoiser(const ParameterStore& params);

}  // namespace topoforge
