#pragma once

#include <ergotac/cvae.hpp>
#include <ergotac/grid.hpp>

namespace ergotac
{
/// Decoder output entropy over the conditional domain, in nats.
struct EntropyMap : GridField
{
};

/// Normalized cell weights; every cell holds at least floor_fraction / cells.
struct TargetDistribution : GridField
{
};

/// Latent vectors used to probe the decoder across the conditional domain.
struct LatentPool
{
  MatrixXd z;  // latent_dim x M

  Eigen::Index size() const { return z.cols(); }
};

enum class EntropyAveraging
{
  entropy,   // mean of per-latent entropies
  variance,  // entropy of the mean variance
};

/// H = (D/2)(1 + log 2pi) + (D/2) log sigma for Sigma = sigma * I_D.
/// Throws std::invalid_argument for sigma <= 0 or D < 1.
double point_entropy(double sigma, int dim);

/// Encoder means of `count` evenly spaced points of `episode`.
LatentPool make_latent_pool(const Network& net, const Dataset& episode, int count = 16);

EntropyMap entropy_map(const Network& net, const LatentPool& pool, const GridSpec& grid,
                       EntropyAveraging mode = EntropyAveraging::entropy);

/// Shift to non-negative, normalize, then mix with the uniform distribution:
/// phi = (1 - floor) * normalized + floor * uniform. A flat map yields uniform.
TargetDistribution to_target(const GridField& map, double floor_fraction = 0.05);

TargetDistribution uniform_target(const GridSpec& grid);

/// Throws std::invalid_argument unless weights are non-negative and sum to 1 within tol.
void check_normalized(const GridField& target, double tol = 1e-9);

}  // namespace ergotac
