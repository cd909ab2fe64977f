#pragma once

#include <ergotac/cvae.hpp>
#include <ergotac/ergodic.hpp>
#include <ergotac/scene.hpp>
#include <ergotac/sensor.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ergotac
{
enum class Method
{
  active,
  random,
};

const char* to_string(Method m);

struct Seeds
{
  std::uint64_t scene = 0;
  std::uint64_t sensor = 0;
  std::uint64_t network = 0;
  std::uint64_t planner = 0;
};

/// Named streams derived from one master seed.
Seeds derive_seeds(std::uint64_t master);

struct EntropyConfig
{
  GridSpec grid{50, 50};
  int pool_size = 16;
  double floor_fraction = 0.05;
  EntropyAveraging averaging = EntropyAveraging::entropy;
};

struct EvaluationConfig
{
  int holdout_lines = 40;      // raster passes for the held-out set
  int calibration_lines = 20;  // raster passes for the calibration sweep
};

struct RunConfig
{
  SceneSpec scene = builtin_scene("blank");
  bool scene_is_builtin = true;
  Method method = Method::active;
  int episodes = 8;
  int ticks_per_episode = 3000;
  int train_steps_per_episode = 300;
  std::uint64_t seed = 0;
  Seeds seeds = derive_seeds(0);
  PlannerConfig planner;
  ArchConfig arch;
  OptimizerConfig optimizer;
  NoiseConfig noise;
  EntropyConfig entropy;
  EvaluationConfig evaluation;
};

/// Throws std::invalid_argument on an inconsistent configuration.
void validate(const RunConfig& cfg);

struct EpisodeRecord
{
  int index = 0;
  Trajectory trajectory;
  std::optional<GridField> target;  // planning target (active method only)
  std::vector<LossReport> losses;
  EntropyMap entropy;               // decoder entropy after this episode's training round
  std::size_t points_collected = 0;
  std::size_t dataset_size = 0;
  double path_length = 0.0;         // normalized units
  double holdout_mse = 0.0;
};

struct RunReport
{
  RunConfig config;
  Calibration calibration;
  std::vector<EpisodeRecord> episodes;
  Network network;

  double final_mse() const { return episodes.empty() ? 0.0 : episodes.back().holdout_mse; }
  double total_path_length() const;
};

/// Boustrophedon sweep of the unit square with `lines` horizontal passes at constant speed.
Trajectory raster_trajectory(int lines, double step_length, double phase = 0.5);

/// Per-channel calibration from a method-independent raster sweep.
Calibration calibration_sweep(const Scene& scene, const NoiseConfig& noise, int lines, double step_length, Rng& rng);

/// Dense raster data set, independent of the exploration method.
Dataset make_holdout(const Scene& scene, const NoiseConfig& noise, const Calibration& calib, int lines,
                     double step_length, Rng& rng);

/// Mean over the holdout of |x - decode(mu_z(x, y), y)|^2 / 57 in eval mode.
/// Throws std::invalid_argument on an empty holdout.
double evaluate_mse(const Network& net, const Dataset& holdout);

/// The closed loop: uniform bootstrap, then alternate entropy-targeted (or random-walk)
/// collection and training on everything collected so far.
RunReport run(const RunConfig& cfg);

/// Writes the report directory (see docs/report_layout.md).
void write_report(const RunReport& report, const std::filesystem::path& dir);

struct ComparisonRow
{
  std::uint64_t seed = 0;
  double mse_a = 0.0;
  double mse_b = 0.0;
};

struct ComparisonTable
{
  std::string label_a;
  std::string label_b;
  std::vector<ComparisonRow> rows;

  int wins_a() const;
  int wins_b() const;
  double median_a() const;
  double median_b() const;
};

/// Runs both configurations for `repeats` master seeds starting at `first_seed`.
/// Throws std::invalid_argument when the configurations differ in anything but the
/// method or do not share the same path budget.
ComparisonTable compare(const RunConfig& a, const RunConfig& b, int repeats, std::uint64_t first_seed,
                        std::vector<RunReport>* reports_a = nullptr, std::vector<RunReport>* reports_b = nullptr);

void write_comparison_csv(const ComparisonTable& table, const std::filesystem::path& path);

/// Returns cfg with a new master seed and re-derived named seeds.
RunConfig with_seed(RunConfig cfg, std::uint64_t seed);

}  // namespace ergotac
