#include <ergotac/entropy.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ergotac
{
namespace
{
constexpr double kLog2Pi = 1.8378770664093454836;
}

double point_entropy(double sigma, int dim)
{
  if (!(sigma > 0.0))
  {
    throw std::invalid_argument("point_entropy: sigma must be > 0");
  }
  if (dim < 1)
  {
    throw std::invalid_argument("point_entropy: dimension must be >= 1");
  }
  const double half_d = 0.5 * dim;
  return half_d * (1.0 + kLog2Pi) + half_d * std::log(sigma);
}

LatentPool make_latent_pool(const Network& net, const Dataset& episode, int count)
{
  if (episode.empty() || count < 1)
  {
    throw std::invalid_argument("make_latent_pool: need a non-empty episode and count >= 1");
  }
  const std::size_t m = std::min(episode.size(), static_cast<std::size_t>(count));
  std::vector<DataPoint> chosen;
  chosen.reserve(m);
  for (std::size_t k = 0; k < m; ++k)
  {
    // Centre of the k-th of m equal slices.
    chosen.push_back(episode[(2 * k + 1) * episode.size() / (2 * m)]);
  }
  const Batch b = make_batch(chosen);
  return {encode(net, b.x, b.y).mu};
}

EntropyMap entropy_map(const Network& net, const LatentPool& pool, const GridSpec& grid, EntropyAveraging mode)
{
  grid.validate();
  if (pool.size() < 1)
  {
    throw std::invalid_argument("entropy_map: empty latent pool");
  }
  const auto cells = static_cast<Eigen::Index>(grid.cells());
  MatrixXd y(kCondDim, cells);
  for (Eigen::Index c = 0; c < cells; ++c)
  {
    const Vec2 u = grid.center(static_cast<std::size_t>(c));
    y(0, c) = u.x();
    y(1, c) = u.y();
  }
  const int dim = net.arch().input_dim;
  Eigen::RowVectorXd accum = Eigen::RowVectorXd::Zero(cells);
  for (Eigen::Index k = 0; k < pool.size(); ++k)
  {
    const MatrixXd z = pool.z.col(k).replicate(1, cells);
    const DecoderOutput out = decode(net, z, y);
    if (mode == EntropyAveraging::entropy)
    {
      for (Eigen::Index c = 0; c < cells; ++c)
      {
        accum[c] += point_entropy(std::exp(out.log_sigma(0, c)), dim);
      }
    }
    else
    {
      accum += out.log_sigma.array().exp().matrix();
    }
  }
  EntropyMap map;
  map.grid = grid;
  map.values.resize(grid.cells());
  const double inv_m = 1.0 / static_cast<double>(pool.size());
  for (Eigen::Index c = 0; c < cells; ++c)
  {
    const double mean = accum[c] * inv_m;
    map.values[static_cast<std::size_t>(c)] = mode == EntropyAveraging::entropy ? mean : point_entropy(mean, dim);
  }
  return map;
}

TargetDistribution uniform_target(const GridSpec& grid)
{
  grid.validate();
  TargetDistribution t;
  t.grid = grid;
  t.values.assign(grid.cells(), 1.0 / static_cast<double>(grid.cells()));
  return t;
}

TargetDistribution to_target(const GridField& map, double floor_fraction)
{
  map.grid.validate();
  if (map.values.size() != map.grid.cells())
  {
    throw std::invalid_argument("to_target: value count does not match grid");
  }
  if (!(floor_fraction >= 0.0 && floor_fraction <= 1.0))
  {
    throw std::invalid_argument("to_target: floor_fraction must be in [0, 1]");
  }
  for (double v : map.values)
  {
    if (!std::isfinite(v))
    {
      throw std::invalid_argument("to_target: non-finite map value");
    }
  }
  const double lo = *std::min_element(map.values.begin(), map.values.end());
  double total = 0.0;
  for (double v : map.values)
  {
    total += v - lo;
  }
  if (!(total > 0.0))
  {
    return uniform_target(map.grid);
  }
  const double n = static_cast<double>(map.grid.cells());
  TargetDistribution t;
  t.grid = map.grid;
  t.values.resize(map.values.size());
  for (std::size_t c = 0; c < map.values.size(); ++c)
  {
    t.values[c] = (1.0 - floor_fraction) * ((map.values[c] - lo) / total) + floor_fraction / n;
  }
  return t;
}

void check_normalized(const GridField& target, double tol)
{
  if (target.values.size() != target.grid.cells() || target.values.empty())
  {
    throw std::invalid_argument("target: value count does not match grid");
  }
  double sum = 0.0;
  for (double v : target.values)
  {
    if (!(v >= 0.0) || !std::isfinite(v))
    {
      throw std::invalid_argument("target: weights must be finite and non-negative");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > tol)
  {
    throw std::invalid_argument("target: weights do not sum to 1");
  }
}

}  // namespace ergotac
