#pragma once

#include <ergotac/random.hpp>
#include <ergotac/sensor.hpp>

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

namespace ergotac
{
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct ArchConfig
{
  int input_dim = kDataDim;
  int cond_dim = kCondDim;
  int latent_dim = 6;
  int initial_width = 300;
  double layer_ratio = 0.8;
  int depth = 4;
  double dropout_p = 0.2;
  double leaky_slope = 0.01;
  double log_sigma_min = -7.0;
  double log_sigma_max = 7.0;
  /// Explicit hidden widths (encoder order). Empty means derive from initial_width/ratio/depth.
  std::vector<int> widths;

  std::vector<int> hidden_widths() const;
};

void validate(const ArchConfig& arch);

/// widths[i] = floor(w0 * ratio^i), i = 0..depth-1.
std::vector<int> layer_widths(int w0, double ratio, int depth);

/// One fully connected layer inside the flat parameter vector: W (rows x cols) then b (rows).
struct LayerShape
{
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  Eigen::Index weight_offset = 0;
  Eigen::Index bias_offset = 0;
};

/// CVAE parameters. Encoder: [x;y] -> hidden stack -> [mu_z; logvar_z].
/// Decoder: [z;y] -> mirrored hidden stack -> [57 sigmoid means; log variance].
class Network
{
public:
  Network() = default;
  explicit Network(const ArchConfig& arch);

  const ArchConfig& arch() const { return arch_; }
  const std::vector<LayerShape>& layers() const { return layers_; }
  std::size_t encoder_hidden() const { return encoder_hidden_; }

  VectorXd& params() { return params_; }
  const VectorXd& params() const { return params_; }
  Eigen::Index num_params() const { return params_.size(); }

  Eigen::Map<const MatrixXd> weight(std::size_t layer) const;
  Eigen::Map<const VectorXd> bias(std::size_t layer) const;

  /// Layer indices: encoder hidden [0, d), encoder head d, decoder hidden (d, 2d], decoder head 2d+1.
  std::size_t encoder_head() const { return encoder_hidden_; }
  std::size_t decoder_first() const { return encoder_hidden_ + 1; }
  std::size_t decoder_head() const { return layers_.size() - 1; }

private:
  ArchConfig arch_;
  std::vector<LayerShape> layers_;
  std::size_t encoder_hidden_ = 0;
  VectorXd params_;
};

/// Kaiming-uniform weights with a = sqrt(5) (bound sqrt(6 / ((1 + a^2) fan_in))) and
/// biases uniform in +-1/sqrt(fan_in). Deterministic given the seed.
Network init_network(const ArchConfig& arch, std::uint64_t seed);

/// Column-major minibatch: one data point per column.
struct Batch
{
  MatrixXd x;  // input_dim x B
  MatrixXd y;  // cond_dim x B

  Eigen::Index size() const { return x.cols(); }
};

Batch make_batch(std::span<const DataPoint> points);
Batch make_batch(const Dataset& data, std::span<const std::size_t> indices);

struct EncoderOutput
{
  MatrixXd mu;      // latent x B
  MatrixXd logvar;  // latent x B
};

struct DecoderOutput
{
  MatrixXd mean;       // input_dim x B, in (0,1)
  MatrixXd log_sigma;  // 1 x B, log of the scalar output variance, bounded
};

/// Smooth bound of the decoder's raw log variance into (lo, hi): centre + half * tanh((raw - centre) / half).
double bound_log_sigma(double raw, double lo, double hi);

/// Eval-mode passes (no dropout). Throw std::invalid_argument on non-finite input.
EncoderOutput encode(const Network& net, const MatrixXd& x, const MatrixXd& y);
DecoderOutput decode(const Network& net, const MatrixXd& z, const MatrixXd& y);

/// z = mu + exp(logvar / 2) * eps.
MatrixXd sample_latent(const MatrixXd& mu, const MatrixXd& logvar, const MatrixXd& eps);
MatrixXd sample_latent(const MatrixXd& mu, const MatrixXd& logvar, Rng& rng);

MatrixXd standard_normal(Eigen::Index rows, Eigen::Index cols, Rng& rng);

struct LossReport
{
  double nll = 0.0;
  double kl = 0.0;
  double total = 0.0;
};

/// Inverted-dropout keep masks, one per hidden layer (entries 0 or 1/(1-p)).
using DropoutMasks = std::vector<MatrixXd>;

DropoutMasks sample_dropout_masks(const Network& net, Eigen::Index batch, Rng& rng);

/// Full forward pass with a fixed reparameterization noise `eps` (latent x B) and
/// optional dropout masks. When `grad` is non-null it receives d(total)/d(params).
LossReport evaluate_loss(const Network& net, const Batch& batch, const MatrixXd& eps, const DropoutMasks* masks,
                         double beta, VectorXd* grad);

/// Eval-mode loss with eps drawn from rng. Throws std::invalid_argument on an empty batch.
LossReport loss(const Network& net, std::span<const DataPoint> batch, Rng& rng, double beta = 1.0);

struct OptimizerConfig
{
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int batch_size = 256;
  double kl_weight = 1.0;
};

void validate(const OptimizerConfig& opt);

struct AdamState
{
  VectorXd m;
  VectorXd v;
  long step = 0;
};

/// `steps` Adam updates on minibatches drawn from `data` (without replacement per epoch,
/// with replacement when the dataset is smaller than a batch). Dropout active.
/// Returns the per-step training loss.
std::vector<LossReport> train_round(Network& net, AdamState& adam, const Dataset& data, int steps,
                                    const OptimizerConfig& opt, Rng& rng);
std::vector<LossReport> train_round(Network& net, const Dataset& data, int steps, const OptimizerConfig& opt,
                                    Rng& rng);

struct GradCheckResult
{
  double max_relative_error = 0.0;
  Eigen::Index worst_index = -1;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
};

/// Eval-mode total loss (no dropout, eps frozen) recomputed in extended precision, so that
/// finite differences of it are not swamped by double rounding noise.
long double reference_loss(const Network& net, const Batch& batch, const MatrixXd& eps, double beta = 1.0);

/// Relative error |a - n| / max(|a|, |n|, floor) for central differences of `objective`
/// at the given parameter indices.
GradCheckResult compare_gradients(const std::function<long double(const VectorXd&)>& objective, const VectorXd& params,
                                  const VectorXd& analytic, std::span<const Eigen::Index> indices, double step = 1e-5,
                                  double floor = 1e-6);

/// Dropout off, eps frozen. Checks at least `count` random parameters plus every layer's
/// first weight and bias entry.
GradCheckResult grad_check(const Network& net, std::span<const DataPoint> batch, Rng& rng, std::size_t count = 200,
                           double beta = 1.0);

/// Checkpoint: "ETCK", uint32 version, arch fields, uint64 parameter count, float64 parameters
/// in layer declaration order (W column-major per layer, then b). A JSON sidecar carries the config.
void save_checkpoint(const Network& net, const std::filesystem::path& path);
Network load_checkpoint(const std::filesystem::path& path);

}  // namespace ergotac
