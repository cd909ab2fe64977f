#include <ergotac/entropy.hpp>
#include <ergotac/ergodic.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace ergotac;

namespace
{
TargetDistribution normalized(GridField g)
{
  double total = 0.0;
  for (double v : g.values)
  {
    total += v;
  }
  for (double& v : g.values)
  {
    v /= total;
  }
  return TargetDistribution{std::move(g)};
}

TargetDistribution quadrant_spike()
{
  const GridSpec grid{50, 50};
  GridField g{grid, std::vector<double>(grid.cells(), 0.0)};
  g.values[grid.index(37, 37)] = 1.0;
  return to_target(g, 0.05);
}

TargetDistribution two_blobs()
{
  const GridSpec grid{50, 50};
  GridField g{grid, std::vector<double>(grid.cells())};
  for (std::size_t c = 0; c < grid.cells(); ++c)
  {
    const Vec2 p = grid.center(c);
    g.values[c] = std::exp(-((p - Vec2(0.2, 0.25)).squaredNorm()) / 0.01) +
                  0.6 * std::exp(-((p - Vec2(0.75, 0.7)).squaredNorm()) / 0.02);
  }
  return to_target(normalized(g), 0.05);
}

double median(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}
}  // namespace

TEST(PlannerProperty, SpikeQuadrantOccupancy)
{
  const PlannerConfig cfg;
  const TargetDistribution target = quadrant_spike();
  for (std::uint64_t seed = 0; seed < 5; ++seed)
  {
    Rng rng(seed);
    const Trajectory t = plan_trajectory(target, Vec2(0.5, 0.5), cfg, rng);
    const auto inside = std::count_if(t.points.begin(), t.points.end(),
                                      [](const Vec2& p) { return p.x() >= 0.5 && p.y() >= 0.5; });
    EXPECT_GE(static_cast<double>(inside) / t.size(), 0.6) << "seed " << seed;
  }
}

TEST(PlannerProperty, BeatsRandomWalkOnKlObjective)
{
  const PlannerConfig cfg;
  for (const TargetDistribution& target : {quadrant_spike(), two_blobs()})
  {
    int wins = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
      Rng rng(seed);
      const Vec2 x0(0.5, 0.5);
      const Trajectory planned = plan_trajectory(target, x0, cfg, rng);
      const Trajectory walk = random_walk(x0, cfg.horizon, cfg, rng);
      Rng sample_rng(1000 + seed);
      const TargetSamples s = draw_target_samples(target, 1000, sample_rng);
      wins += kl_objective(planned, s, cfg.kernel_sigma) < kl_objective(walk, s, cfg.kernel_sigma) ? 1 : 0;
    }
    EXPECT_GE(wins, 18);
  }
}

TEST(RandomWalkProperty, LongRunOccupancyIsUniform)
{
  const PlannerConfig cfg;
  Rng rng(17);
  const Trajectory t = random_walk(Vec2(0.1, 0.9), 1'000'000, cfg, rng);
  const GridSpec grid{10, 10};
  std::vector<double> hist(grid.cells(), 0.0);
  for (const auto& p : t.points)
  {
    hist[grid.cell_of(p)] += 1.0 / t.size();
  }
  double tv = 0.0;
  for (double h : hist)
  {
    tv += 0.5 * std::abs(h - 0.01);
  }
  EXPECT_LT(tv, 0.1);
}

TEST(MetricProperty, MediansDecreaseWithSampleCount)
{
  const TargetDistribution target = two_blobs();
  const CoeffSet phi = dist_coeffs(target, 10);
  std::discrete_distribution<std::size_t> pick(target.values.begin(), target.values.end());
  std::uniform_real_distribution<double> jitter(-0.5, 0.5);
  std::vector<double> medians;
  for (int T : {100, 1000, 10000})
  {
    std::vector<double> eps;
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
      Rng rng(derive_seed(seed, "metric", static_cast<std::uint64_t>(T)));
      Trajectory t;
      for (int i = 0; i < T; ++i)
      {
        const Vec2 c = target.grid.center(pick(rng));
        t.points.emplace_back(c.x() + jitter(rng) / 50.0, c.y() + jitter(rng) / 50.0);
      }
      eps.push_back(ergodic_metric(traj_coeffs(t, 10), phi));
    }
    medians.push_back(median(eps));
  }
  EXPECT_GT(medians[0], medians[1]);
  EXPECT_GT(medians[1], medians[2]);
}
