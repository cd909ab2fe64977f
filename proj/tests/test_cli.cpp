#include <ergotac/cli.hpp>
#include <ergotac/config.hpp>
#include <ergotac/entropy.hpp>
#include <ergotac/ergodic.hpp>

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

using namespace ergotac;
namespace fs = std::filesystem;

namespace
{
struct Result
{
  int code = 0;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args)
{
  args.insert(args.begin(), "ergotac");
  std::vector<const char*> argv;
  for (const auto& a : args)
  {
    argv.push_back(a.c_str());
  }
  std::ostringstream out;
  std::ostringstream err;
  Result r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name)
{
  const fs::path p = fs::temp_directory_path() / "ergotac_cli_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

std::string slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

nlohmann::json small_config(const std::string& scene, int seed)
{
  return {{"schema_version", 1},
          {"scene", scene},
          {"method", "active"},
          {"episodes", 2},
          {"ticks_per_episode", 300},
          {"train_steps_per_episode", 5},
          {"seed", seed},
          {"arch", {{"widths", {16, 12}}, {"depth", 2}}},
          {"optimizer", {{"batch_size", 32}}},
          {"planner", {{"iterations", 10}}},
          {"entropy", {{"grid", {10, 10}}, {"pool_size", 4}}},
          {"evaluation", {{"holdout_lines", 6}, {"calibration_lines", 4}}}};
}

fs::path write_config(const std::string& name, const nlohmann::json& j)
{
  const fs::path p = scratch(name);
  std::ofstream(p) << j.dump(2);
  return p;
}
}  // namespace

TEST(Cli, MissingConfigExitsTwoNamingPath)
{
  const fs::path missing = scratch("nope.json");
  const Result r = cli({"run", "--config", missing.string(), "--out", scratch("nope_out").string()});
  EXPECT_EQ(r.code, kExitInvalid);
  EXPECT_NE(r.err.find(missing.string()), std::string::npos);
}

TEST(Cli, InvalidConfigAndUsageExitTwo)
{
  auto j = small_config("blank", 1);
  j["bogus"] = 1;
  EXPECT_EQ(cli({"run", "--config", write_config("bogus.json", j).string(), "--out", scratch("b").string()}).code,
            kExitInvalid);
  EXPECT_EQ(cli({"run"}).code, kExitInvalid);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitInvalid);
  EXPECT_EQ(cli({"scenes", "--show", "no_such_scene"}).code, kExitInvalid);
}

TEST(Cli, RunWritesDeclaredLayout)
{
  const fs::path cfg = write_config("blank.json", small_config("blank", 1));
  const fs::path out = scratch("blank_report");
  const Result r = cli({"run", "--config", cfg.string(), "--out", out.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  for (const char* f : {"config.json", "calibration.csv", "loss.csv", "holdout_mse.csv", "checkpoint.bin",
                        "checkpoint.bin.json", "trajectory_00.csv", "trajectory_01.csv", "entropy_00.csv",
                        "entropy_01.csv", "entropy_00.pgm", "entropy_01.pgm", "target_00.csv", "target_01.csv"})
  {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  // The written config re-validates and reproduces the run.
  const fs::path again = scratch("blank_report_again");
  ASSERT_EQ(cli({"run", "--config", (out / "config.json").string(), "--out", again.string()}).code, kExitOk);
  for (const auto& entry : fs::directory_iterator(out))
  {
    EXPECT_EQ(slurp(entry.path()), slurp(again / entry.path().filename())) << entry.path().filename();
  }
}

TEST(Cli, SeedOverrideMatchesInlineSeed)
{
  const fs::path base = write_config("seed3.json", small_config("triangles", 3));
  const fs::path inline7 = write_config("seed7.json", small_config("triangles", 7));
  const fs::path a = scratch("seed_override");
  const fs::path b = scratch("seed_inline");
  ASSERT_EQ(cli({"run", "--config", base.string(), "--out", a.string(), "--seed", "7"}).code, kExitOk);
  ASSERT_EQ(cli({"run", "--config", inline7.string(), "--out", b.string()}).code, kExitOk);
  for (const auto& entry : fs::directory_iterator(a))
  {
    EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << entry.path().filename();
  }
}

TEST(Cli, CompareWritesTable)
{
  auto j = small_config("triangles", 1);
  const fs::path cfg = write_config("cmp.json", j);
  const fs::path out = scratch("cmp_out");
  const Result r = cli({"compare", "--config", cfg.string(), "--out", out.string(), "--repeats", "2", "--keep-reports"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::ifstream in(out / "comparison.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "seed,mse_active,mse_random,winner");
  int rows = 0;
  while (std::getline(in, line))
  {
    ++rows;
  }
  EXPECT_EQ(rows, 2);
  EXPECT_TRUE(fs::exists(out / "active_seed1" / "holdout_mse.csv"));
  EXPECT_TRUE(fs::exists(out / "random_seed2" / "holdout_mse.csv"));
}

TEST(Cli, ScenesListsCatalog)
{
  const Result r = cli({"scenes"});
  ASSERT_EQ(r.code, kExitOk);
  for (const auto& name : builtin_scene_names())
  {
    EXPECT_NE(r.out.find(name), std::string::npos);
  }
  const Result show = cli({"scenes", "--show", "leaf"});
  ASSERT_EQ(show.code, kExitOk);
  EXPECT_EQ(scene_from_json(nlohmann::json::parse(show.out)).name, "leaf");
}

TEST(Cli, MetricMatchesLibraryAndHandlesErrors)
{
  const fs::path traj_path = scratch("stationary.csv");
  const fs::path target_path = scratch("uniform.csv");
  Trajectory t;
  t.points.assign(50, Vec2(0.5, 0.5));
  write_trajectory_csv(t, traj_path);
  const TargetDistribution u = uniform_target(GridSpec{50, 50});
  write_grid_csv(u, target_path);

  Result r = cli({"metric", "--trajectory", traj_path.string(), "--target", target_path.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  char expected[64];
  std::snprintf(expected, sizeof expected, "%.12g\n",
                ergodic_metric(traj_coeffs(t, 10), dist_coeffs(read_grid_csv(target_path), 10)));
  EXPECT_EQ(r.out, expected);

  r = cli({"metric", "--trajectory", traj_path.string(), "--target", target_path.string(), "--order", "0"});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_NEAR(std::stod(r.out), 0.0, 1e-15);

  const fs::path bad = scratch("bad.csv");
  std::ofstream(bad) << "tick,x1,x2\n0,0.5\n";
  EXPECT_EQ(cli({"metric", "--trajectory", bad.string(), "--target", target_path.string()}).code, kExitInvalid);
  std::ofstream(bad) << "1,2\n3\n";
  EXPECT_EQ(cli({"metric", "--trajectory", traj_path.string(), "--target", bad.string()}).code, kExitInvalid);
  const fs::path unnormalized = scratch("unnormalized.csv");
  std::ofstream(unnormalized) << "1,1\n1,1\n";
  EXPECT_EQ(cli({"metric", "--trajectory", traj_path.string(), "--target", unnormalized.string()}).code,
            kExitInvalid);
}

TEST(Cli, MetricDenseSampleOfTarget)
{
  GridField target{GridSpec{20, 20}, std::vector<double>(400)};
  for (std::size_t c = 0; c < 400; ++c)
  {
    const Vec2 p = target.grid.center(c);
    target.values[c] = std::exp(-8.0 * (p - Vec2(0.3, 0.7)).squaredNorm());
  }
  double total = 0.0;
  for (double v : target.values)
  {
    total += v;
  }
  for (double& v : target.values)
  {
    v /= total;
  }
  Rng rng(3);
  std::discrete_distribution<std::size_t> pick(target.values.begin(), target.values.end());
  std::uniform_real_distribution<double> jitter(-0.5, 0.5);
  Trajectory t;
  for (int i = 0; i < 20000; ++i)
  {
    const Vec2 c = target.grid.center(pick(rng));
    t.points.emplace_back(c.x() + jitter(rng) / 20.0, c.y() + jitter(rng) / 20.0);
  }
  const fs::path traj_path = scratch("dense.csv");
  const fs::path target_path = scratch("gauss.csv");
  write_trajectory_csv(t, traj_path);
  write_grid_csv(target, target_path);
  const Result r = cli({"metric", "--trajectory", traj_path.string(), "--target", target_path.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_LT(std::stod(r.out), 0.02);
}

TEST(Cli, RenderPgm)
{
  const fs::path map = scratch("two.csv");
  const fs::path pgm = scratch("two.pgm");
  std::ofstream(map) << "1,5\n5,1\n";
  ASSERT_EQ(cli({"render", "--map", map.string(), "--out", pgm.string()}).code, kExitOk);
  const std::string bytes = slurp(pgm);
  const std::string header = "P5\n2 2\n255\n";
  ASSERT_EQ(bytes.substr(0, header.size()), header);
  const std::string px = bytes.substr(header.size());
  EXPECT_EQ(px, std::string("\x00\xff\xff\x00", 4));
  std::ofstream(map) << "1,x\n";
  EXPECT_EQ(cli({"render", "--map", map.string(), "--out", pgm.string()}).code, kExitInvalid);
}

TEST(Cli, GradcheckPassesOnSmallNetwork)
{
  auto j = small_config("blank", 1);
  const fs::path cfg = write_config("gc.json", j);
  const Result r = cli({"gradcheck", "--config", cfg.string(), "--count", "50", "--points", "8"});
  EXPECT_EQ(r.code, kExitOk) << r.out << r.err;
}
