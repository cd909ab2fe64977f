#include <ergotac/entropy.hpp>
#include <ergotac/ergodic.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace ergotac;

namespace
{
constexpr double kPi = std::numbers::pi;

Trajectory stationary(const Vec2& p, int n)
{
  Trajectory t;
  t.points.assign(static_cast<std::size_t>(n), p);
  return t;
}

// Independent basis: normalizer from the explicit integral of cos^2.
double oracle_basis(int k1, int k2, const Vec2& x)
{
  const double n1 = k1 == 0 ? 1.0 : 0.5;
  const double n2 = k2 == 0 ? 1.0 : 0.5;
  return std::cos(k1 * kPi * x.x()) * std::cos(k2 * kPi * x.y()) / std::sqrt(n1 * n2);
}

TargetSamples single_sample(const Vec2& s)
{
  return {{s}, {1.0}};
}
}  // namespace

TEST(Basis, NormalizerValues)
{
  EXPECT_DOUBLE_EQ(h_k(0, 0), 1.0);
  EXPECT_NEAR(h_k(1, 0), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(h_k(1, 1), 0.5, 1e-15);
  EXPECT_NEAR(h_k(2, 0, Vec2(2.0, 3.0)), std::sqrt(1.0 * 3.0), 1e-15);
}

TEST(Basis, PointValues)
{
  EXPECT_NEAR(basis_eval(1, 1, Vec2(0, 0)), 2.0, 1e-15);
  EXPECT_NEAR(basis_eval(1, 0, Vec2(0.5, 0.3)), 0.0, 1e-15);
  EXPECT_NEAR(basis_eval(1, 0, Vec2(0.5, 0.9)), 0.0, 1e-15);
  EXPECT_NEAR(basis_eval(3, 2, Vec2(0.2, 0.7)), oracle_basis(3, 2, Vec2(0.2, 0.7)), 1e-14);
}

TEST(Basis, OrthonormalUnderQuadrature)
{
  constexpr int n = 200;
  constexpr int K = 5;
  std::vector<double> f((K + 1) * (K + 1) * n * n);
  auto at = [&](int k, int c) -> double& { return f[static_cast<std::size_t>(k) * n * n + c]; };
  for (int k1 = 0; k1 <= K; ++k1)
  {
    for (int k2 = 0; k2 <= K; ++k2)
    {
      for (int c = 0; c < n * n; ++c)
      {
        at(k1 * (K + 1) + k2, c) = basis_eval(k1, k2, Vec2((c % n + 0.5) / n, (c / n + 0.5) / n));
      }
    }
  }
  const int terms = (K + 1) * (K + 1);
  double worst = 0.0;
  for (int a = 0; a < terms; ++a)
  {
    for (int b = a; b < terms; ++b)
    {
      double s = 0.0;
      for (int c = 0; c < n * n; ++c)
      {
        s += at(a, c) * at(b, c);
      }
      s /= n * n;
      worst = std::max(worst, std::abs(s - (a == b ? 1.0 : 0.0)));
    }
  }
  EXPECT_LT(worst, 1e-3);
}

TEST(TrajCoeffs, StationaryTrajectories)
{
  const CoeffSet c = traj_coeffs(stationary(Vec2(0.5, 0.5), 10), 4);
  EXPECT_NEAR(c.at(1, 0), 0.0, 1e-15);
  const Vec2 p(0.23, 0.81);
  const CoeffSet d = traj_coeffs(stationary(p, 7), 6);
  for (int k1 = 0; k1 <= 6; ++k1)
  {
    for (int k2 = 0; k2 <= 6; ++k2)
    {
      EXPECT_NEAR(d.at(k1, k2), basis_eval(k1, k2, p), 1e-14);
    }
  }
  EXPECT_THROW(traj_coeffs(Trajectory{}, 3), std::invalid_argument);
}

TEST(TrajCoeffs, UniformSamplesMatchTarget)
{
  Rng rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Trajectory t;
  for (int i = 0; i < 100000; ++i)
  {
    t.points.emplace_back(u(rng), u(rng));
  }
  const CoeffSet c = traj_coeffs(t, 5);
  const CoeffSet phi = dist_coeffs(uniform_target(GridSpec{50, 50}), 5);
  for (std::size_t i = 0; i < c.values.size(); ++i)
  {
    EXPECT_LT(std::abs(c.values[i] - phi.values[i]), 0.02);
  }
}

TEST(DistCoeffs, UniformAndSpike)
{
  const CoeffSet u = dist_coeffs(uniform_target(GridSpec{50, 50}), 8);
  EXPECT_NEAR(u.at(0, 0), 1.0, 1e-12);
  for (int k1 = 0; k1 <= 8; ++k1)
  {
    for (int k2 = 0; k2 <= 8; ++k2)
    {
      if (k1 + k2 > 0)
      {
        EXPECT_LT(std::abs(u.at(k1, k2)), 1e-10);
      }
    }
  }
  GridField spike{GridSpec{20, 20}, std::vector<double>(400, 0.0)};
  const std::size_t cell = spike.grid.index(13, 4);
  spike.values[cell] = 1.0;
  const CoeffSet s = dist_coeffs(spike, 6);
  const Vec2 centre = spike.grid.center(cell);
  for (int k1 = 0; k1 <= 6; ++k1)
  {
    for (int k2 = 0; k2 <= 6; ++k2)
    {
      EXPECT_NEAR(s.at(k1, k2), basis_eval(k1, k2, centre), 1e-14);
    }
  }
}

TEST(Metric, ZeroNonNegativeAndOrderCheck)
{
  const CoeffSet phi = dist_coeffs(uniform_target(GridSpec{50, 50}), 10);
  EXPECT_LE(ergodic_metric(phi, phi), 1e-15);
  Rng rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i)
  {
    Trajectory t;
    for (int j = 0; j < 20; ++j)
    {
      t.points.emplace_back(u(rng), u(rng));
    }
    EXPECT_GE(ergodic_metric(traj_coeffs(t, 10), phi), 0.0);
  }
  EXPECT_THROW(ergodic_metric(traj_coeffs(stationary(Vec2(0.5, 0.5), 2), 3), phi), std::invalid_argument);
}

TEST(Metric, BruteForceOracle)
{
  constexpr int K = 5;
  const Vec2 centre(0.5, 0.5);
  const GridSpec grid{50, 50};
  const double eps = ergodic_metric(traj_coeffs(stationary(centre, 100), K), dist_coeffs(uniform_target(grid), K));
  double oracle = 0.0;
  for (int k1 = 0; k1 <= K; ++k1)
  {
    for (int k2 = 0; k2 <= K; ++k2)
    {
      double phi = 0.0;
      for (std::size_t c = 0; c < grid.cells(); ++c)
      {
        phi += oracle_basis(k1, k2, grid.center(c)) / static_cast<double>(grid.cells());
      }
      const double d = oracle_basis(k1, k2, centre) - phi;
      oracle += d * d / std::pow(1.0 + k1 * k1 + k2 * k2, 1.5);
    }
  }
  EXPECT_NEAR(eps, oracle, 1e-12);
}

TEST(Metric, OrderZeroIsZeroForFeasiblePairs)
{
  Trajectory t;
  for (int i = 0; i < 30; ++i)
  {
    t.points.emplace_back(0.03 * i, 0.9 - 0.02 * i);
  }
  GridField g{GridSpec{7, 5}, std::vector<double>(35, 1.0 / 35.0)};
  EXPECT_NEAR(ergodic_metric(traj_coeffs(t, 0), dist_coeffs(g, 0)), 0.0, 1e-28);
}

TEST(KlObjective, UnitPeakDensity)
{
  const Trajectory one = stationary(Vec2(0.4, 0.6), 1);
  const TargetSamples s = single_sample(Vec2(0.4, 0.6));
  EXPECT_NEAR(kl_objective(one, s, 1.0 / std::sqrt(2.0 * kPi)), 0.0, 1e-14);
  EXPECT_NEAR(kl_objective(one, s, 1.0), std::log(2.0 * kPi), 1e-14);
  EXPECT_NEAR(std::log(2.0 * kPi), 1.8379, 1e-4);
}

TEST(KlObjective, MonotoneInDistanceUntilClamp)
{
  const TargetSamples s = single_sample(Vec2(0.1, 0.1));
  double prev = -1e300;
  bool clamped = false;
  for (int i = 0; i <= 80; ++i)
  {
    const double d = 0.01 * i;
    const double v = kl_objective(stationary(Vec2(0.1 + d, 0.1 + 0.5 * d), 1), s, 0.05);
    if (clamped)
    {
      EXPECT_EQ(v, -kLogClamp);
    }
    else
    {
      EXPECT_GT(v, prev);
    }
    clamped = clamped || v == -kLogClamp;
    prev = v;
  }
  EXPECT_TRUE(clamped);
}

TEST(KlObjective, GradientMatchesFiniteDifferences)
{
  Rng rng(8);
  std::uniform_real_distribution<double> u(0.2, 0.8);
  Trajectory t;
  for (int i = 0; i < 25; ++i)
  {
    t.points.emplace_back(u(rng), u(rng));
  }
  TargetSamples s;
  for (int i = 0; i < 40; ++i)
  {
    s.points.emplace_back(u(rng), u(rng));
    s.weights.push_back(1.0 / 40.0);
  }
  const double sigma = 0.1;
  std::vector<Vec2> grad;
  kl_objective(t, s, sigma, &grad);
  ASSERT_EQ(grad.size(), t.size());
  const double h = 1e-6;
  double worst = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i)
  {
    for (int d = 0; d < 2; ++d)
    {
      Trajectory up = t;
      Trajectory down = t;
      up.points[i][d] += h;
      down.points[i][d] -= h;
      const double numeric = (kl_objective(up, s, sigma) - kl_objective(down, s, sigma)) / (2.0 * h);
      const double a = grad[i][d];
      worst = std::max(worst, std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8}));
    }
  }
  EXPECT_LT(worst, 1e-5);
}

TEST(TargetSamples, ResamplingFollowsWeights)
{
  GridField g{GridSpec{2, 2}, {0.7, 0.1, 0.1, 0.1}};
  Rng rng(4);
  const TargetSamples s = draw_target_samples(g, 100, rng);
  ASSERT_EQ(s.points.size(), 100u);
  int in_first = 0;
  for (std::size_t i = 0; i < s.points.size(); ++i)
  {
    EXPECT_DOUBLE_EQ(s.weights[i], 0.01);
    in_first += g.grid.cell_of(s.points[i]) == 0;
  }
  EXPECT_NEAR(in_first, 70, 1);
}

TEST(Planner, RejectsNonNormalizedTarget)
{
  GridField g{GridSpec{4, 4}, std::vector<double>(16, 0.1)};
  Rng rng(1);
  EXPECT_THROW(plan_trajectory(g, Vec2(0.5, 0.5), PlannerConfig{}, rng), std::invalid_argument);
}

TEST(Planner, UniformTargetImprovesOnInitialization)
{
  const PlannerConfig cfg;
  const GridField target = uniform_target(GridSpec{50, 50});
  const Vec2 x0(0.5, 0.5);
  const double step = cfg.v_max * kTickSeconds;
  std::vector<double> init = spiral_headings(cfg.horizon, step);
  const CoeffSet phi = dist_coeffs(target, 10);
  const double initial = ergodic_metric(traj_coeffs(rollout_headings(x0, init, step), 10), phi);
  for (std::uint64_t seed = 0; seed < 5; ++seed)
  {
    Rng rng(seed);
    const PlanResult r = plan(target, x0, cfg, rng);
    EXPECT_LE(r.final_objective, r.initial_objective);
    EXPECT_TRUE(within_unit_square(r.trajectory));
    EXPECT_LE(ergodic_metric(traj_coeffs(r.trajectory, 10), phi), initial) << "seed " << seed;
  }
}

TEST(Planner, TrajectoriesAreFeasible)
{
  GridField g{GridSpec{10, 10}, std::vector<double>(100, 0.0)};
  g.values[g.grid.index(9, 9)] = 0.5;
  g.values[g.grid.index(0, 9)] = 0.5;
  PlannerConfig cfg;
  cfg.horizon = 800;
  cfg.iterations = 40;
  Rng rng(6);
  const Trajectory t = plan_trajectory(g, Vec2(0.02, 0.03), cfg, rng);
  ASSERT_EQ(t.size(), 800u);
  EXPECT_TRUE(within_unit_square(t));
  EXPECT_LE(max_step(t), cfg.v_max * kTickSeconds * (1.0 + 1e-12));
  EXPECT_NEAR(path_length(t), 799 * cfg.v_max * kTickSeconds, 1e-9);
}

TEST(Planner, VanishingSpeedIsStationary)
{
  PlannerConfig cfg;
  cfg.horizon = 300;
  cfg.iterations = 10;
  cfg.v_max = 1e-9;
  Rng rng(7);
  const Vec2 x0(0.3, 0.7);
  const Trajectory t = plan_trajectory(uniform_target(GridSpec{10, 10}), x0, cfg, rng);
  for (const auto& p : t.points)
  {
    EXPECT_LT((p - x0).norm(), 1e-8);
  }
}

TEST(Planner, DeterministicPerSeed)
{
  PlannerConfig cfg;
  cfg.horizon = 500;
  cfg.iterations = 30;
  GridField g = uniform_target(GridSpec{10, 10});
  g.values.assign(100, 0.5 / 99.0);
  g.values[42] = 0.5;
  Rng a(9);
  Rng b(9);
  EXPECT_EQ(plan_trajectory(g, Vec2(0.5, 0.5), cfg, a).points, plan_trajectory(g, Vec2(0.5, 0.5), cfg, b).points);
}

TEST(RandomWalk, ConstantSpeedInsideSquareDeterministic)
{
  PlannerConfig cfg;
  Rng a(10);
  Rng b(10);
  const Trajectory t = random_walk(Vec2(0.01, 0.99), 5000, cfg, a);
  EXPECT_EQ(t.points, random_walk(Vec2(0.01, 0.99), 5000, cfg, b).points);
  EXPECT_TRUE(within_unit_square(t));
  EXPECT_NEAR(path_length(t), 4999 * cfg.v_max * kTickSeconds, 1e-9);
  EXPECT_LE(max_step(t), cfg.v_max * kTickSeconds * (1.0 + 1e-12));
}

TEST(TrajectoryIo, CsvRoundTripAndMalformed)
{
  Trajectory t;
  t.points = {Vec2(0.1, 0.2), Vec2(1.0 / 3.0, 0.25), Vec2(0.9, 1.0)};
  const auto path = std::filesystem::temp_directory_path() / "ergotac_traj_test.csv";
  write_trajectory_csv(t, path);
  EXPECT_EQ(read_trajectory_csv(path).points, t.points);
  std::ofstream(path) << "tick,x1,x2\n0,0.1\n";
  EXPECT_THROW(read_trajectory_csv(path), std::runtime_error);
  std::ofstream(path) << "t,x,y\n0,0.1,0.2\n";
  EXPECT_THROW(read_trajectory_csv(path), std::runtime_error);
  std::ofstream(path) << "tick,x1,x2\n0,0.1,abc\n";
  EXPECT_THROW(read_trajectory_csv(path), std::runtime_error);
}
