#include <ergotac/config.hpp>
#include <ergotac/explorer.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ergotac
{
const char* to_string(Method m)
{
  return m == Method::active ? "active" : "random";
}

Seeds derive_seeds(std::uint64_t master)
{
  return {derive_seed(master, "scene"), derive_seed(master, "sensor"), derive_seed(master, "network"),
          derive_seed(master, "planner")};
}

RunConfig with_seed(RunConfig cfg, std::uint64_t seed)
{
  cfg.seed = seed;
  cfg.seeds = derive_seeds(seed);
  return cfg;
}

void validate(const RunConfig& cfg)
{
  validate(cfg.scene);
  validate(cfg.arch);
  validate(cfg.optimizer);
  validate(cfg.noise);
  PlannerConfig p = cfg.planner;
  p.horizon = cfg.ticks_per_episode;
  validate(p);
  cfg.entropy.grid.validate();
  if (cfg.episodes < 2)
  {
    throw std::invalid_argument("episodes must be >= 2 (bootstrap plus at least one more)");
  }
  if (cfg.ticks_per_episode < 3)
  {
    throw std::invalid_argument("ticks_per_episode must be >= 3");
  }
  if (cfg.train_steps_per_episode < 0)
  {
    throw std::invalid_argument("train_steps_per_episode must be >= 0");
  }
  if (cfg.entropy.pool_size < 1)
  {
    throw std::invalid_argument("entropy.pool_size must be >= 1");
  }
  if (!(cfg.entropy.floor_fraction >= 0.0 && cfg.entropy.floor_fraction <= 1.0))
  {
    throw std::invalid_argument("entropy.floor_fraction must lie in [0, 1]");
  }
  if (cfg.evaluation.holdout_lines < 1 || cfg.evaluation.calibration_lines < 1)
  {
    throw std::invalid_argument("evaluation raster line counts must be >= 1");
  }
}

double RunReport::total_path_length() const
{
  double total = 0.0;
  for (const auto& e : episodes)
  {
    total += e.path_length;
  }
  return total;
}

Trajectory raster_trajectory(int lines, double step_length, double phase)
{
  if (lines < 1 || !(step_length > 0.0))
  {
    throw std::invalid_argument("raster_trajectory: need lines >= 1 and step_length > 0");
  }
  std::vector<Vec2> way;
  for (int k = 0; k < lines; ++k)
  {
    const double y = (k + phase) / lines;
    const bool forward = k % 2 == 0;
    way.emplace_back(forward ? 0.0 : 1.0, y);
    way.emplace_back(forward ? 1.0 : 0.0, y);
  }
  Trajectory traj;
  traj.points.push_back(way.front());
  std::size_t seg = 0;
  double along = 0.0;  // distance already covered on segment `seg`
  for (;;)
  {
    double need = step_length;
    while (seg + 1 < way.size())
    {
      const double len = (way[seg + 1] - way[seg]).norm();
      if (along + need <= len)
      {
        along += need;
        need = 0.0;
        break;
      }
      need -= len - along;
      along = 0.0;
      ++seg;
    }
    if (need > 0.0)
    {
      break;
    }
    const Vec2 dir = (way[seg + 1] - way[seg]).normalized();
    traj.points.push_back(way[seg] + along * dir);
  }
  return traj;
}

Calibration calibration_sweep(const Scene& scene, const NoiseConfig& noise, int lines, double step_length, Rng& rng)
{
  const Trajectory sweep = raster_trajectory(lines, step_length);
  const auto reads = read_along(scene, sweep, noise, rng);
  return calibrate(reads);
}

Dataset make_holdout(const Scene& scene, const NoiseConfig& noise, const Calibration& calib, int lines,
                     double step_length, Rng& rng)
{
  // Offset from the calibration sweep so the two rasters do not coincide.
  return sample_along(scene, raster_trajectory(lines, step_length, 0.25), noise, calib, rng);
}

double evaluate_mse(const Network& net, const Dataset& holdout)
{
  if (holdout.empty())
  {
    throw std::invalid_argument("evaluate_mse: empty holdout");
  }
  constexpr std::size_t kChunk = 1024;
  double total = 0.0;
  for (std::size_t start = 0; start < holdout.size(); start += kChunk)
  {
    const std::size_t n = std::min(kChunk, holdout.size() - start);
    const Batch b = make_batch(std::span<const DataPoint>(holdout).subspan(start, n));
    const EncoderOutput enc = encode(net, b.x, b.y);
    const DecoderOutput dec = decode(net, enc.mu, b.y);
    total += (b.x - dec.mean).colwise().squaredNorm().sum();
  }
  return total / (static_cast<double>(holdout.size()) * kDataDim);
}

RunReport run(const RunConfig& cfg)
{
  validate(cfg);
  RunReport report;
  report.config = cfg;

  SceneSpec spec = cfg.scene;
  spec.texture_seed = cfg.seeds.scene;
  const Scene scene(spec);

  PlannerConfig pcfg = cfg.planner;
  pcfg.horizon = cfg.ticks_per_episode;
  const double step = pcfg.v_max * kTickSeconds;

  Rng calib_rng(derive_seed(cfg.seeds.sensor, "calibration"));
  report.calibration = calibration_sweep(scene, cfg.noise, cfg.evaluation.calibration_lines, step, calib_rng);
  Rng holdout_rng(derive_seed(cfg.seeds.sensor, "holdout"));
  const Dataset holdout =
      make_holdout(scene, cfg.noise, report.calibration, cfg.evaluation.holdout_lines, step, holdout_rng);

  Network net = init_network(cfg.arch, cfg.seeds.network);
  AdamState adam;
  Rng train_rng(derive_seed(cfg.seeds.network, "train"));

  Dataset data;
  Dataset last_episode;
  Vec2 x0(0.5, 0.5);
  std::vector<double> previous_headings;

  for (int e = 0; e < cfg.episodes; ++e)
  {
    EpisodeRecord rec;
    rec.index = e;
    Rng plan_rng(derive_seed(cfg.seeds.planner, "episode", static_cast<std::uint64_t>(e)));
    if (cfg.method == Method::active)
    {
      TargetDistribution target =
          e == 0 ? uniform_target(cfg.entropy.grid)
                 : to_target(entropy_map(net, make_latent_pool(net, last_episode, cfg.entropy.pool_size),
                                         cfg.entropy.grid, cfg.entropy.averaging),
                             cfg.entropy.floor_fraction);
      PlanResult planned =
          plan(target, x0, pcfg, plan_rng, previous_headings.empty() ? nullptr : &previous_headings);
      rec.trajectory = std::move(planned.trajectory);
      previous_headings = std::move(planned.headings);
      rec.target = std::move(target);
    }
    else
    {
      rec.trajectory = random_walk(x0, cfg.ticks_per_episode, pcfg, plan_rng);
    }
    x0 = rec.trajectory.points.back();
    rec.path_length = path_length(rec.trajectory);

    Rng sensor_rng(derive_seed(cfg.seeds.sensor, "episode", static_cast<std::uint64_t>(e)));
    last_episode = sample_along(scene, rec.trajectory, cfg.noise, report.calibration, sensor_rng);
    rec.points_collected = last_episode.size();
    data.insert(data.end(), last_episode.begin(), last_episode.end());
    rec.dataset_size = data.size();

    rec.losses = train_round(net, adam, data, cfg.train_steps_per_episode, cfg.optimizer, train_rng);
    rec.holdout_mse = evaluate_mse(net, holdout);
    rec.entropy = entropy_map(net, make_latent_pool(net, last_episode, cfg.entropy.pool_size), cfg.entropy.grid,
                              cfg.entropy.averaging);
    report.episodes.push_back(std::move(rec));
  }
  report.network = std::move(net);
  return report;
}

namespace
{
std::string episode_file(const char* stem, int index, const char* ext)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%02d.%s", stem, index, ext);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
  {
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
  return out;
}

void put(std::ostream& out, double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}
}  // namespace

void write_report(const RunReport& report, const std::filesystem::path& dir)
{
  std::filesystem::create_directories(dir);
  open_out(dir / "config.json") << to_json(report.config).dump(2) << '\n';

  {
    auto out = open_out(dir / "calibration.csv");
    out << "channel,min,max\n";
    for (int c = 0; c < kElectrodes; ++c)
    {
      out << c << ',';
      put(out, report.calibration.min[c]);
      out << ',';
      put(out, report.calibration.max[c]);
      out << '\n';
    }
  }

  auto loss = open_out(dir / "loss.csv");
  loss << "episode,step,total,nll,kl\n";
  auto mse = open_out(dir / "holdout_mse.csv");
  mse << "episode,points_collected,dataset_size,path_length,holdout_mse\n";
  for (const auto& e : report.episodes)
  {
    write_trajectory_csv(e.trajectory, dir / episode_file("trajectory", e.index, "csv"));
    write_grid_csv(e.entropy, dir / episode_file("entropy", e.index, "csv"));
    write_pgm(e.entropy, dir / episode_file("entropy", e.index, "pgm"));
    if (e.target)
    {
      write_grid_csv(*e.target, dir / episode_file("target", e.index, "csv"));
    }
    for (std::size_t s = 0; s < e.losses.size(); ++s)
    {
      loss << e.index << ',' << s << ',';
      put(loss, e.losses[s].total);
      loss << ',';
      put(loss, e.losses[s].nll);
      loss << ',';
      put(loss, e.losses[s].kl);
      loss << '\n';
    }
    mse << e.index << ',' << e.points_collected << ',' << e.dataset_size << ',';
    put(mse, e.path_length);
    mse << ',';
    put(mse, e.holdout_mse);
    mse << '\n';
  }
  if (!loss || !mse)
  {
    throw std::runtime_error("failed writing report files in '" + dir.string() + "'");
  }
  save_checkpoint(report.network, dir / "checkpoint.bin");
}

int ComparisonTable::wins_a() const
{
  return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.mse_a < r.mse_b; }));
}

int ComparisonTable::wins_b() const
{
  return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.mse_b < r.mse_a; }));
}

namespace
{
double median(std::vector<double> v)
{
  if (v.empty())
  {
    return 0.0;
  }
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}
}  // namespace

double ComparisonTable::median_a() const
{
  std::vector<double> v;
  for (const auto& r : rows)
  {
    v.push_back(r.mse_a);
  }
  return median(std::move(v));
}

double ComparisonTable::median_b() const
{
  std::vector<double> v;
  for (const auto& r : rows)
  {
    v.push_back(r.mse_b);
  }
  return median(std::move(v));
}

ComparisonTable compare(const RunConfig& a, const RunConfig& b, int repeats, std::uint64_t first_seed,
                        std::vector<RunReport>* reports_a, std::vector<RunReport>* reports_b)
{
  if (repeats < 1)
  {
    throw std::invalid_argument("compare: repeats must be >= 1");
  }
  const double budget_a = a.episodes * (a.ticks_per_episode - 1) * a.planner.v_max;
  const double budget_b = b.episodes * (b.ticks_per_episode - 1) * b.planner.v_max;
  if (budget_a != budget_b)
  {
    throw std::invalid_argument("compare: mismatched path-length budgets");
  }
  auto strip = [](RunConfig c) {
    nlohmann::json j = to_json(with_seed(std::move(c), 0));
    j.erase("method");
    return j;
  };
  if (strip(a) != strip(b))
  {
    throw std::invalid_argument("compare: configurations differ in more than the method");
  }

  ComparisonTable table;
  table.label_a = to_string(a.method);
  table.label_b = to_string(b.method);
  for (int r = 0; r < repeats; ++r)
  {
    const std::uint64_t seed = first_seed + static_cast<std::uint64_t>(r);
    RunReport ra = run(with_seed(a, seed));
    RunReport rb = run(with_seed(b, seed));
    const double step = a.planner.v_max * kTickSeconds;
    if (std::abs(ra.total_path_length() - rb.total_path_length()) > step)
    {
      throw std::runtime_error("compare: path-length parity violated");
    }
    table.rows.push_back({seed, ra.final_mse(), rb.final_mse()});
    if (reports_a)
    {
      reports_a->push_back(std::move(ra));
    }
    if (reports_b)
    {
      reports_b->push_back(std::move(rb));
    }
  }
  return table;
}

void write_comparison_csv(const ComparisonTable& table, const std::filesystem::path& path)
{
  auto out = open_out(path);
  out << "seed,mse_" << table.label_a << ",mse_" << table.label_b << ",winner\n";
  for (const auto& r : table.rows)
  {
    out << r.seed << ',';
    put(out, r.mse_a);
    out << ',';
    put(out, r.mse_b);
    out << ',' << (r.mse_a < r.mse_b ? table.label_a : r.mse_b < r.mse_a ? table.label_b : std::string("tie"))
        << '\n';
  }
  if (!out)
  {
    throw std::runtime_error("failed writing '" + path.string() + "'");
  }
}

}  // namespace ergotac
