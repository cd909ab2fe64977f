#include <ergotac/cvae.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace ergotac
{
namespace
{
constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)

bool all_finite(const MatrixXd& m)
{
  return m.allFinite();
}

/// Leaky ReLU for slope in [0, 1].
MatrixXd leaky(const MatrixXd& pre, double slope)
{
  return pre.cwiseMax(slope * pre);
}

double sigmoid(double v)
{
  return 1.0 / (1.0 + std::exp(-v));
}

/// Forward caches for one pass through a hidden stack.
struct StackCache
{
  std::vector<MatrixXd> inputs;  // input to each layer
  std::vector<MatrixXd> pre;     // pre-activations
};

MatrixXd stack_forward(const Network& net, std::size_t first, std::size_t count, MatrixXd h,
                       const DropoutMasks* masks, std::size_t mask_offset, StackCache* cache)
{
  const double slope = net.arch().leaky_slope;
  for (std::size_t l = 0; l < count; ++l)
  {
    MatrixXd pre = net.weight(first + l) * h;
    pre.colwise() += net.bias(first + l);
    MatrixXd act = leaky(pre, slope);
    if (masks != nullptr)
    {
      act.array() *= (*masks)[mask_offset + l].array();
    }
    if (cache != nullptr)
    {
      cache->inputs.push_back(std::move(h));
      cache->pre.push_back(std::move(pre));
    }
    h = std::move(act);
  }
  return h;
}

MatrixXd affine(const Network& net, std::size_t layer, const MatrixXd& h)
{
  MatrixXd out = net.weight(layer) * h;
  out.colwise() += net.bias(layer);
  return out;
}

/// Accumulates weight/bias gradients of `layer` given d(out), returns d(input).
MatrixXd affine_backward(const Network& net, std::size_t layer, const MatrixXd& input, const MatrixXd& d_out,
                         VectorXd& grad)
{
  const LayerShape& s = net.layers()[layer];
  Eigen::Map<MatrixXd>(grad.data() + s.weight_offset, s.rows, s.cols).noalias() += d_out * input.transpose();
  Eigen::Map<VectorXd>(grad.data() + s.bias_offset, s.rows) += d_out.rowwise().sum();
  return net.weight(layer).transpose() * d_out;
}

MatrixXd stack_backward(const Network& net, std::size_t first, const StackCache& cache, MatrixXd d_h,
                        const DropoutMasks* masks, std::size_t mask_offset, VectorXd& grad)
{
  const double slope = net.arch().leaky_slope;
  for (std::size_t l = cache.pre.size(); l-- > 0;)
  {
    if (masks != nullptr)
    {
      d_h.array() *= (*masks)[mask_offset + l].array();
    }
    d_h.array() *= (cache.pre[l].array() > 0.0).select(1.0, Eigen::ArrayXXd::Constant(d_h.rows(), d_h.cols(), slope));
    d_h = affine_backward(net, first + l, cache.inputs[l], d_h, grad);
  }
  return d_h;
}

MatrixXd stack_rows(const MatrixXd& top, const MatrixXd& bottom)
{
  MatrixXd out(top.rows() + bottom.rows(), top.cols());
  out.topRows(top.rows()) = top;
  out.bottomRows(bottom.rows()) = bottom;
  return out;
}
}  // namespace

std::vector<int> layer_widths(int w0, double ratio, int depth)
{
  std::vector<int> widths;
  widths.reserve(static_cast<std::size_t>(std::max(depth, 0)));
  double w = w0;
  for (int i = 0; i < depth; ++i)
  {
    // Guard against 0.8^3 * 300 = 153.6000000001 style rounding on either side.
    widths.push_back(static_cast<int>(std::floor(w + 1e-9)));
    w *= ratio;
  }
  return widths;
}

std::vector<int> ArchConfig::hidden_widths() const
{
  return widths.empty() ? layer_widths(initial_width, layer_ratio, depth) : widths;
}

void validate(const ArchConfig& a)
{
  if (a.input_dim <= 0 || a.cond_dim <= 0 || a.latent_dim <= 0 || a.initial_width <= 0 || a.depth <= 0)
  {
    throw std::invalid_argument("arch: dimensions must be positive");
  }
  if (!(a.layer_ratio > 0.0 && a.layer_ratio <= 1.0))
  {
    throw std::invalid_argument("arch: layer_ratio must be in (0, 1]");
  }
  if (!(a.dropout_p >= 0.0 && a.dropout_p < 1.0))
  {
    throw std::invalid_argument("arch: dropout_p must be in [0, 1)");
  }
  if (!(a.leaky_slope >= 0.0 && a.leaky_slope <= 1.0))
  {
    throw std::invalid_argument("arch: leaky_slope must be in [0, 1]");
  }
  if (!(a.log_sigma_min < a.log_sigma_max))
  {
    throw std::invalid_argument("arch: log_sigma_min must be below log_sigma_max");
  }
  for (int w : a.hidden_widths())
  {
    if (w <= 0)
    {
      throw std::invalid_argument("arch: hidden widths must be positive");
    }
  }
}

Network::Network(const ArchConfig& arch) : arch_(arch)
{
  validate(arch_);
  const auto widths = arch_.hidden_widths();
  Eigen::Index offset = 0;
  auto add = [&](Eigen::Index rows, Eigen::Index cols) {
    LayerShape s{rows, cols, offset, offset + rows * cols};
    offset = s.bias_offset + rows;
    layers_.push_back(s);
  };
  Eigen::Index in = arch_.input_dim + arch_.cond_dim;
  for (int w : widths)
  {
    add(w, in);
    in = w;
  }
  add(2 * arch_.latent_dim, in);
  encoder_hidden_ = widths.size();
  in = arch_.latent_dim + arch_.cond_dim;
  for (auto it = widths.rbegin(); it != widths.rend(); ++it)
  {
    add(*it, in);
    in = *it;
  }
  add(arch_.input_dim + 1, in);
  params_ = VectorXd::Zero(offset);
}

Eigen::Map<const MatrixXd> Network::weight(std::size_t layer) const
{
  const LayerShape& s = layers_[layer];
  return {params_.data() + s.weight_offset, s.rows, s.cols};
}

Eigen::Map<const VectorXd> Network::bias(std::size_t layer) const
{
  const LayerShape& s = layers_[layer];
  return {params_.data() + s.bias_offset, s.rows};
}

Network init_network(const ArchConfig& arch, std::uint64_t seed)
{
  Network net(arch);
  Rng rng(seed);
  const double a = std::sqrt(5.0);
  VectorXd& p = net.params();
  for (const LayerShape& s : net.layers())
  {
    const double fan_in = static_cast<double>(s.cols);
    const double w_bound = std::sqrt(6.0 / ((1.0 + a * a) * fan_in));
    const double b_bound = 1.0 / std::sqrt(fan_in);
    std::uniform_real_distribution<double> w_dist(-w_bound, w_bound);
    std::uniform_real_distribution<double> b_dist(-b_bound, b_bound);
    for (Eigen::Index i = 0; i < s.rows * s.cols; ++i)
    {
      p[s.weight_offset + i] = w_dist(rng);
    }
    for (Eigen::Index i = 0; i < s.rows; ++i)
    {
      p[s.bias_offset + i] = b_dist(rng);
    }
  }
  return net;
}

Batch make_batch(std::span<const DataPoint> points)
{
  Batch b;
  b.x.resize(kDataDim, static_cast<Eigen::Index>(points.size()));
  b.y.resize(kCondDim, static_cast<Eigen::Index>(points.size()));
  for (std::size_t c = 0; c < points.size(); ++c)
  {
    const auto col = static_cast<Eigen::Index>(c);
    b.x.col(col) = Eigen::Map<const VectorXd>(points[c].x.data(), kDataDim);
    b.y.col(col) = Eigen::Map<const VectorXd>(points[c].y.data(), kCondDim);
  }
  return b;
}

Batch make_batch(const Dataset& data, std::span<const std::size_t> indices)
{
  Batch b;
  b.x.resize(kDataDim, static_cast<Eigen::Index>(indices.size()));
  b.y.resize(kCondDim, static_cast<Eigen::Index>(indices.size()));
  for (std::size_t c = 0; c < indices.size(); ++c)
  {
    const auto col = static_cast<Eigen::Index>(c);
    const DataPoint& dp = data[indices[c]];
    b.x.col(col) = Eigen::Map<const VectorXd>(dp.x.data(), kDataDim);
    b.y.col(col) = Eigen::Map<const VectorXd>(dp.y.data(), kCondDim);
  }
  return b;
}

EncoderOutput encode(const Network& net, const MatrixXd& x, const MatrixXd& y)
{
  const ArchConfig& a = net.arch();
  if (x.rows() != a.input_dim || y.rows() != a.cond_dim || x.cols() != y.cols())
  {
    throw std::invalid_argument("encode: input shape mismatch");
  }
  if (!all_finite(x) || !all_finite(y))
  {
    throw std::invalid_argument("encode: non-finite input");
  }
  const MatrixXd h = stack_forward(net, 0, net.encoder_hidden(), stack_rows(x, y), nullptr, 0, nullptr);
  const MatrixXd head = affine(net, net.encoder_head(), h);
  return {head.topRows(a.latent_dim), head.bottomRows(a.latent_dim)};
}

DecoderOutput decode(const Network& net, const MatrixXd& z, const MatrixXd& y)
{
  const ArchConfig& a = net.arch();
  if (z.rows() != a.latent_dim || y.rows() != a.cond_dim || z.cols() != y.cols())
  {
    throw std::invalid_argument("decode: input shape mismatch");
  }
  if (!all_finite(z) || !all_finite(y))
  {
    throw std::invalid_argument("decode: non-finite input");
  }
  const MatrixXd h = stack_forward(net, net.decoder_first(), net.encoder_hidden(), stack_rows(z, y), nullptr, 0,
                                   nullptr);
  const MatrixXd head = affine(net, net.decoder_head(), h);
  DecoderOutput out;
  out.mean = head.topRows(a.input_dim).unaryExpr([](double v) { return sigmoid(v); });
  out.log_sigma = head.bottomRows(1).unaryExpr(
      [&a](double v) { return bound_log_sigma(v, a.log_sigma_min, a.log_sigma_max); });
  return out;
}

MatrixXd standard_normal(Eigen::Index rows, Eigen::Index cols, Rng& rng)
{
  std::normal_distribution<double> gauss(0.0, 1.0);
  MatrixXd eps(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
  {
    for (Eigen::Index r = 0; r < rows; ++r)
    {
      eps(r, c) = gauss(rng);
    }
  }
  return eps;
}

MatrixXd sample_latent(const MatrixXd& mu, const MatrixXd& logvar, const MatrixXd& eps)
{
  return mu.array() + (0.5 * logvar.array()).exp() * eps.array();
}

MatrixXd sample_latent(const MatrixXd& mu, const MatrixXd& logvar, Rng& rng)
{
  return sample_latent(mu, logvar, standard_normal(mu.rows(), mu.cols(), rng));
}

DropoutMasks sample_dropout_masks(const Network& net, Eigen::Index batch, Rng& rng)
{
  DropoutMasks masks;
  const double p = net.arch().dropout_p;
  const double keep_scale = 1.0 / (1.0 - p);
  // Keep when a 32-bit uniform u >= p * 2^32. Each mask draws from its own SplitMix64
  // stream seeded by one draw of rng; the Mersenne Twister is too slow per element here.
  const auto threshold = static_cast<std::uint64_t>(std::llround(p * 4294967296.0));
  const std::size_t hidden = net.encoder_hidden();
  for (std::size_t half = 0; half < 2; ++half)
  {
    const std::size_t first = half == 0 ? 0 : net.decoder_first();
    for (std::size_t l = 0; l < hidden; ++l)
    {
      MatrixXd m(net.layers()[first + l].rows, batch);
      std::uint64_t state = rng();
      double* data = m.data();
      const Eigen::Index n = m.size();
      for (Eigen::Index i = 0; i < n; i += 2)
      {
        state += 0x9e3779b97f4a7c15ULL;
        const std::uint64_t bits = mix_seed(state);
        data[i] = (bits & 0xffffffffULL) >= threshold ? keep_scale : 0.0;
        if (i + 1 < n)
        {
          data[i + 1] = (bits >> 32) >= threshold ? keep_scale : 0.0;
        }
      }
      masks.push_back(std::move(m));
    }
  }
  return masks;
}

LossReport evaluate_loss(const Network& net, const Batch& batch, const MatrixXd& eps, const DropoutMasks* masks,
                         double beta, VectorXd* grad)
{
  const ArchConfig& a = net.arch();
  const Eigen::Index B = batch.size();
  if (B == 0)
  {
    throw std::invalid_argument("loss: empty batch");
  }
  const std::size_t hidden = net.encoder_hidden();
  const double D = static_cast<double>(a.input_dim);
  const int L = a.latent_dim;

  // Encoder.
  StackCache enc;
  const MatrixXd enc_in = stack_rows(batch.x, batch.y);
  const MatrixXd h_enc = stack_forward(net, 0, hidden, enc_in, masks, 0, grad ? &enc : nullptr);
  const MatrixXd head = affine(net, net.encoder_head(), h_enc);
  const MatrixXd mu = head.topRows(L);
  const MatrixXd logvar = head.bottomRows(L);
  const MatrixXd std_z = (0.5 * logvar.array()).exp();
  const MatrixXd z = mu.array() + std_z.array() * eps.array();

  // Decoder.
  StackCache dec;
  const MatrixXd dec_in = stack_rows(z, batch.y);
  const MatrixXd h_dec = stack_forward(net, net.decoder_first(), hidden, dec_in, masks, hidden, grad ? &dec : nullptr);
  const MatrixXd out = affine(net, net.decoder_head(), h_dec);
  const MatrixXd mean = out.topRows(a.input_dim).unaryExpr([](double v) { return sigmoid(v); });
  const Eigen::RowVectorXd raw_ls = out.bottomRows(1);
  const Eigen::RowVectorXd ls =
      raw_ls.unaryExpr([&a](double v) { return bound_log_sigma(v, a.log_sigma_min, a.log_sigma_max); });
  const Eigen::RowVectorXd inv_sigma = (-ls.array()).exp();

  const MatrixXd resid = batch.x - mean;
  const Eigen::RowVectorXd sq = resid.colwise().squaredNorm();
  const double inv_b = 1.0 / static_cast<double>(B);

  LossReport report;
  report.nll = inv_b * (0.5 * D * (kLog2Pi * static_cast<double>(B) + ls.sum()) +
                        0.5 * (sq.array() * inv_sigma.array()).sum());
  report.kl =
      inv_b * 0.5 * (logvar.array().unaryExpr([](double v) { return std::expm1(v) - v; }) + mu.array().square()).sum();
  report.total = report.nll + beta * report.kl;

  if (grad == nullptr)
  {
    return report;
  }
  grad->setZero(net.num_params());

  // d nll / d outputs.
  const double centre = 0.5 * (a.log_sigma_max + a.log_sigma_min);
  const double half = 0.5 * (a.log_sigma_max - a.log_sigma_min);
  MatrixXd d_out(a.input_dim + 1, B);
  for (Eigen::Index c = 0; c < B; ++c)
  {
    for (Eigen::Index r = 0; r < a.input_dim; ++r)
    {
      const double m = mean(r, c);
      d_out(r, c) = -inv_b * resid(r, c) * inv_sigma[c] * m * (1.0 - m);
    }
    const double t = (ls[c] - centre) / half;
    d_out(a.input_dim, c) = (1.0 - t * t) * inv_b * (0.5 * D - 0.5 * sq[c] * inv_sigma[c]);
  }
  MatrixXd d_h = affine_backward(net, net.decoder_head(), h_dec, d_out, *grad);
  const MatrixXd d_dec_in = stack_backward(net, net.decoder_first(), dec, std::move(d_h), masks, hidden, *grad);
  const MatrixXd d_z = d_dec_in.topRows(L);

  // Reparameterization and KL.
  MatrixXd d_head(2 * L, B);
  d_head.topRows(L) = d_z.array() + (beta * inv_b) * mu.array();
  d_head.bottomRows(L) = d_z.array() * eps.array() * 0.5 * std_z.array() +
                         (beta * inv_b * 0.5) * (logvar.array().exp() - 1.0);
  d_h = affine_backward(net, net.encoder_head(), h_enc, d_head, *grad);
  stack_backward(net, 0, enc, std::move(d_h), masks, 0, *grad);
  return report;
}

LossReport loss(const Network& net, std::span<const DataPoint> batch, Rng& rng, double beta)
{
  if (batch.empty())
  {
    throw std::invalid_argument("loss: empty batch");
  }
  const Batch b = make_batch(batch);
  const MatrixXd eps = standard_normal(net.arch().latent_dim, b.size(), rng);
  return evaluate_loss(net, b, eps, nullptr, beta, nullptr);
}

void validate(const OptimizerConfig& opt)
{
  if (!(opt.learning_rate > 0.0) || !(opt.beta1 >= 0.0 && opt.beta1 < 1.0) || !(opt.beta2 >= 0.0 && opt.beta2 < 1.0) ||
      !(opt.epsilon > 0.0) || opt.batch_size <= 0 || !(opt.kl_weight >= 0.0))
  {
    throw std::invalid_argument("optimizer: invalid configuration");
  }
}

std::vector<LossReport> train_round(Network& net, AdamState& adam, const Dataset& data, int steps,
                                    const OptimizerConfig& opt, Rng& rng)
{
  std::vector<LossReport> trace;
  if (steps <= 0)
  {
    return trace;
  }
  if (data.empty())
  {
    throw std::invalid_argument("train_round: empty dataset");
  }
  const Eigen::Index n = net.num_params();
  if (adam.m.size() != n)
  {
    adam.m = VectorXd::Zero(n);
    adam.v = VectorXd::Zero(n);
    adam.step = 0;
  }
  const std::size_t batch_size = static_cast<std::size_t>(opt.batch_size);
  const bool with_replacement = data.size() < batch_size;
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t cursor = data.size();  // forces a shuffle on the first step
  std::vector<std::size_t> idx(batch_size);
  std::uniform_int_distribution<std::size_t> pick(0, data.size() - 1);
  VectorXd grad(n);
  trace.reserve(static_cast<std::size_t>(steps));

  for (int s = 0; s < steps; ++s)
  {
    if (with_replacement)
    {
      for (auto& i : idx)
      {
        i = pick(rng);
      }
    }
    else
    {
      if (cursor + batch_size > order.size())
      {
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      std::copy_n(order.begin() + static_cast<std::ptrdiff_t>(cursor), batch_size, idx.begin());
      cursor += batch_size;
    }
    const Batch batch = make_batch(data, idx);
    const MatrixXd eps = standard_normal(net.arch().latent_dim, batch.size(), rng);
    const DropoutMasks masks = sample_dropout_masks(net, batch.size(), rng);
    trace.push_back(evaluate_loss(net, batch, eps, &masks, opt.kl_weight, &grad));

    ++adam.step;
    adam.m = opt.beta1 * adam.m + (1.0 - opt.beta1) * grad;
    adam.v = opt.beta2 * adam.v + (1.0 - opt.beta2) * grad.cwiseAbs2();
    const double c1 = 1.0 - std::pow(opt.beta1, static_cast<double>(adam.step));
    const double c2 = 1.0 - std::pow(opt.beta2, static_cast<double>(adam.step));
    net.params().array() -=
        opt.learning_rate * (adam.m.array() / c1) / ((adam.v.array() / c2).sqrt() + opt.epsilon);
  }
  return trace;
}

std::vector<LossReport> train_round(Network& net, const Dataset& data, int steps, const OptimizerConfig& opt,
                                    Rng& rng)
{
  AdamState adam;
  return train_round(net, adam, data, steps, opt, rng);
}

long double reference_loss(const Network& net, const Batch& batch, const MatrixXd& eps, double beta)
{
  using MatrixXe = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const long double kLog2PiExt = std::log(2.0L * std::acos(-1.0L));
  const ArchConfig& a = net.arch();
  const Eigen::Index B = batch.size();
  const std::size_t hidden = net.encoder_hidden();
  const long double slope = a.leaky_slope;
  auto layer = [&](std::size_t l, const MatrixXe& in, bool activate) {
    MatrixXe pre = net.weight(l).cast<long double>() * in;
    pre.colwise() += net.bias(l).cast<long double>();
    if (activate)
    {
      pre = pre.unaryExpr([slope](long double v) { return v > 0 ? v : slope * v; });
    }
    return pre;
  };

  MatrixXe h(a.input_dim + a.cond_dim, B);
  h << batch.x.cast<long double>(), batch.y.cast<long double>();
  for (std::size_t l = 0; l < hidden; ++l)
  {
    h = layer(l, h, true);
  }
  const MatrixXe head = layer(net.encoder_head(), h, false);
  const int L = a.latent_dim;
  const MatrixXe mu = head.topRows(L);
  const MatrixXe logvar = head.bottomRows(L);
  const MatrixXe z = mu.array() + (0.5L * logvar.array()).exp() * eps.cast<long double>().array();

  MatrixXe g(L + a.cond_dim, B);
  g << z, batch.y.cast<long double>();
  for (std::size_t l = net.decoder_first(); l < net.decoder_head(); ++l)
  {
    g = layer(l, g, true);
  }
  const MatrixXe out = layer(net.decoder_head(), g, false);

  long double nll = 0.0L;
  for (Eigen::Index c = 0; c < B; ++c)
  {
    const long double centre = 0.5L * (static_cast<long double>(a.log_sigma_max) + a.log_sigma_min);
    const long double half = 0.5L * (static_cast<long double>(a.log_sigma_max) - a.log_sigma_min);
    const long double ls = centre + half * std::tanh((out(a.input_dim, c) - centre) / half);
    long double sq = 0.0L;
    for (int i = 0; i < a.input_dim; ++i)
    {
      const long double m = 1.0L / (1.0L + std::exp(-out(i, c)));
      const long double r = static_cast<long double>(batch.x(i, c)) - m;
      sq += r * r;
    }
    nll += 0.5L * a.input_dim * (kLog2PiExt + ls) + 0.5L * sq * std::exp(-ls);
  }
  const long double kl = 0.5L * (logvar.array().exp() + mu.array().square() - 1.0L - logvar.array()).sum();
  return (nll + static_cast<long double>(beta) * kl) / static_cast<long double>(B);
}

double bound_log_sigma(double raw, double lo, double hi)
{
  const double centre = 0.5 * (hi + lo);
  const double half = 0.5 * (hi - lo);
  return centre + half * std::tanh((raw - centre) / half);
}

GradCheckResult compare_gradients(const std::function<long double(const VectorXd&)>& objective, const VectorXd& params,
                                  const VectorXd& analytic, std::span<const Eigen::Index> indices, double step,
                                  double floor)
{
  GradCheckResult result;
  VectorXd probe = params;
  for (Eigen::Index i : indices)
  {
    const double saved = probe[i];
    probe[i] = saved + step;
    const long double up = objective(probe);
    const long double h_up = static_cast<long double>(probe[i]) - saved;
    probe[i] = saved - step;
    const long double down = objective(probe);
    const long double h_down = saved - static_cast<long double>(probe[i]);
    probe[i] = saved;
    const auto numeric = static_cast<double>((up - down) / (h_up + h_down));
    const double a = analytic[i];
    const double err = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), floor});
    if (err > result.max_relative_error || result.worst_index < 0)
    {
      result.max_relative_error = err;
      result.worst_index = i;
      result.worst_analytic = a;
      result.worst_numeric = numeric;
    }
    ++result.checked;
  }
  return result;
}

GradCheckResult grad_check(const Network& net, std::span<const DataPoint> batch, Rng& rng, std::size_t count,
                           double beta)
{
  const Batch b = make_batch(batch);
  const MatrixXd eps = standard_normal(net.arch().latent_dim, b.size(), rng);
  VectorXd analytic;
  evaluate_loss(net, b, eps, nullptr, beta, &analytic);

  std::vector<Eigen::Index> indices;
  for (const LayerShape& s : net.layers())
  {
    indices.push_back(s.weight_offset);
    indices.push_back(s.bias_offset);
  }
  std::uniform_int_distribution<Eigen::Index> pick(0, net.num_params() - 1);
  while (indices.size() < count + 2 * net.layers().size())
  {
    indices.push_back(pick(rng));
  }

  Network probe_net = net;
  auto objective = [&](const VectorXd& p) {
    probe_net.params() = p;
    return reference_loss(probe_net, b, eps, beta);
  };
  return compare_gradients(objective, net.params(), analytic, indices);
}

namespace
{
constexpr char kCheckpointMagic[4] = {'E', 'T', 'C', 'K'};
constexpr std::uint32_t kCheckpointVersion = 1;

template <typename T>
void put(std::ofstream& out, T v)
{
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in)
{
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T)))
  {
    throw std::runtime_error("checkpoint: truncated file");
  }
  return v;
}

nlohmann::json arch_json(const ArchConfig& a)
{
  return {{"input_dim", a.input_dim},         {"cond_dim", a.cond_dim},
          {"latent_dim", a.latent_dim},       {"initial_width", a.initial_width},
          {"layer_ratio", a.layer_ratio},     {"depth", a.depth},
          {"dropout_p", a.dropout_p},         {"leaky_slope", a.leaky_slope},
          {"log_sigma_min", a.log_sigma_min}, {"log_sigma_max", a.log_sigma_max},
          {"hidden_widths", a.hidden_widths()}};
}
}  // namespace

void save_checkpoint(const Network& net, const std::filesystem::path& path)
{
  static_assert(std::endian::native == std::endian::little, "checkpoint IO assumes a little-endian host");
  std::ofstream out(path, std::ios::binary);
  if (!out)
  {
    throw std::runtime_error("cannot write " + path.string());
  }
  const ArchConfig& a = net.arch();
  const auto widths = a.hidden_widths();
  out.write(kCheckpointMagic, 4);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::int32_t>(out, a.input_dim);
  put<std::int32_t>(out, a.cond_dim);
  put<std::int32_t>(out, a.latent_dim);
  put<std::int32_t>(out, a.initial_width);
  put<std::int32_t>(out, a.depth);
  put<double>(out, a.layer_ratio);
  put<double>(out, a.dropout_p);
  put<double>(out, a.leaky_slope);
  put<double>(out, a.log_sigma_min);
  put<double>(out, a.log_sigma_max);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(widths.size()));
  for (int w : widths)
  {
    put<std::int32_t>(out, w);
  }
  put<std::uint64_t>(out, static_cast<std::uint64_t>(net.num_params()));
  out.write(reinterpret_cast<const char*>(net.params().data()),
            static_cast<std::streamsize>(net.num_params() * static_cast<Eigen::Index>(sizeof(double))));

  std::filesystem::path sidecar = path;
  sidecar += ".json";
  std::ofstream js(sidecar);
  js << nlohmann::json{{"format", "ergotac-checkpoint"},
                       {"version", kCheckpointVersion},
                       {"num_params", net.num_params()},
                       {"arch", arch_json(a)}}
            .dump(2)
     << '\n';
}

Network load_checkpoint(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw std::runtime_error("cannot open checkpoint " + path.string());
  }
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kCheckpointMagic, 4) != 0)
  {
    throw std::runtime_error(path.string() + ": not a checkpoint");
  }
  if (get<std::uint32_t>(in) != kCheckpointVersion)
  {
    throw std::runtime_error(path.string() + ": unsupported checkpoint version");
  }
  ArchConfig a;
  a.input_dim = get<std::int32_t>(in);
  a.cond_dim = get<std::int32_t>(in);
  a.latent_dim = get<std::int32_t>(in);
  a.initial_width = get<std::int32_t>(in);
  a.depth = get<std::int32_t>(in);
  a.layer_ratio = get<double>(in);
  a.dropout_p = get<double>(in);
  a.leaky_slope = get<double>(in);
  a.log_sigma_min = get<double>(in);
  a.log_sigma_max = get<double>(in);
  const auto n_widths = get<std::uint32_t>(in);
  if (n_widths > 4096)
  {
    throw std::runtime_error(path.string() + ": corrupt width table");
  }
  a.widths.resize(n_widths);
  for (auto& w : a.widths)
  {
    w = get<std::int32_t>(in);
  }
  Network net(a);
  if (get<std::uint64_t>(in) != static_cast<std::uint64_t>(net.num_params()))
  {
    throw std::runtime_error(path.string() + ": parameter count does not match architecture");
  }
  if (!in.read(reinterpret_cast<char*>(net.params().data()),
               static_cast<std::streamsize>(net.num_params() * static_cast<Eigen::Index>(sizeof(double)))))
  {
    throw std::runtime_error(path.string() + ": truncated parameters");
  }
  return net;
}

}  // namespace ergotac
