#include <ergotac/cli.hpp>
#include <ergotac/config.hpp>
#include <ergotac/entropy.hpp>
#include <ergotac/explorer.hpp>
#include <ergotac/grid.hpp>

#include <CLI11.hpp>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

namespace ergotac
{
void tune_allocator()
{
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
#endif
}

namespace
{
/// Input that cannot be parsed: reported with exit code 2.
class InputError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

template <typename F>
auto load_input(F&& f) -> decltype(f())
{
  try
  {
    return f();
  }
  catch (const std::exception& e)
  {
    throw InputError(e.what());
  }
}

std::string fmt12(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct Options
{
  std::string config;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int repeats = 5;
  bool keep_reports = false;
  std::string scene;
  std::string map;
  std::string output;
  std::string trajectory;
  std::string target;
  int order = 10;
  int count = 200;
  int points = 8;
  double beta = 1.0;
  double tolerance = 1e-4;
};

int cmd_run(const Options& o, std::ostream& out)
{
  const RunConfig cfg = load_run_config(o.config, o.seed);
  const RunReport report = run(cfg);
  write_report(report, o.out_dir);
  out << "episodes " << report.episodes.size() << ", final holdout mse " << fmt12(report.final_mse()) << ", report in "
      << o.out_dir << '\n';
  return kExitOk;
}

int cmd_compare(const Options& o, std::ostream& out)
{
  const RunConfig a = load_run_config(o.config, o.seed);
  RunConfig b = a;
  b.method = a.method == Method::active ? Method::random : Method::active;
  std::vector<RunReport> ra;
  std::vector<RunReport> rb;
  const bool keep = o.keep_reports;
  const ComparisonTable table = compare(a, b, o.repeats, a.seed, keep ? &ra : nullptr, keep ? &rb : nullptr);
  const std::filesystem::path dir(o.out_dir);
  std::filesystem::create_directories(dir);
  write_comparison_csv(table, dir / "comparison.csv");
  for (std::size_t i = 0; i < ra.size(); ++i)
  {
    const std::string tag = "_seed" + std::to_string(table.rows[i].seed);
    write_report(ra[i], dir / (table.label_a + tag));
    write_report(rb[i], dir / (table.label_b + tag));
  }
  out << table.label_a << " wins " << table.wins_a() << ", " << table.label_b << " wins " << table.wins_b() << " of "
      << table.rows.size() << "; median mse " << table.label_a << ' ' << fmt12(table.median_a()) << ", "
      << table.label_b << ' ' << fmt12(table.median_b()) << '\n';
  return kExitOk;
}

int cmd_scenes(const Options& o, std::ostream& out)
{
  if (!o.scene.empty())
  {
    SceneSpec spec;
    try
    {
      spec = builtin_scene(o.scene);
    }
    catch (const std::invalid_argument& e)
    {
      throw InputError(e.what());
    }
    out << scene_to_json(spec).dump(2) << '\n';
    return kExitOk;
  }
  for (const auto& name : builtin_scene_names())
  {
    out << name << '\t' << builtin_scene(name).patches.size() << " patches\n";
  }
  return kExitOk;
}

int cmd_render(const Options& o, std::ostream& out)
{
  const GridField map = load_input([&] { return read_grid_csv(o.map); });
  write_pgm(map, o.output);
  out << map.grid.cols << 'x' << map.grid.rows << " -> " << o.output << '\n';
  return kExitOk;
}

int cmd_metric(const Options& o, std::ostream& out)
{
  if (o.order < 0)
  {
    throw InputError("--order must be >= 0");
  }
  const Trajectory traj = load_input([&] {
    Trajectory t = read_trajectory_csv(o.trajectory);
    if (t.empty())
    {
      throw std::runtime_error("trajectory '" + o.trajectory + "' has no rows");
    }
    return t;
  });
  const GridField target = load_input([&] {
    GridField g = read_grid_csv(o.target);
    check_normalized(g, 1e-6);
    return g;
  });
  out << fmt12(ergodic_metric(traj_coeffs(traj, o.order), dist_coeffs(target, o.order))) << '\n';
  return kExitOk;
}

int cmd_gradcheck(const Options& o, std::ostream& out)
{
  RunConfig cfg;
  if (!o.config.empty())
  {
    cfg = load_run_config(o.config, o.seed);
  }
  else if (o.seed)
  {
    cfg = with_seed(cfg, *o.seed);
  }
  if (o.points < 1 || o.count < 0)
  {
    throw ConfigError("--points must be >= 1 and --count >= 0");
  }
  const Network net = init_network(cfg.arch, cfg.seeds.network);
  Rng rng(derive_seed(cfg.seed, "gradcheck"));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Dataset batch(static_cast<std::size_t>(o.points));
  for (auto& p : batch)
  {
    for (auto& v : p.y)
    {
      v = unit(rng);
    }
    for (auto& v : p.x)
    {
      v = unit(rng);
    }
  }
  const GradCheckResult r = grad_check(net, batch, rng, static_cast<std::size_t>(o.count), o.beta);
  out << "checked " << r.checked << " parameters, max relative error " << fmt12(r.max_relative_error) << '\n';
  return r.max_relative_error < o.tolerance ? kExitOk : kExitRuntime;
}
}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Active tactile exploration with entropy-driven ergodic planning", "ergotac"};
  app.require_subcommand(1);
  Options o;

  auto* run_cmd = app.add_subcommand("run", "Run one closed-loop experiment and write a report directory");
  run_cmd->add_option("--config", o.config, "Run configuration (JSON)")->required();
  run_cmd->add_option("--out", o.out_dir, "Report directory")->required();
  run_cmd->add_option("--seed", o.seed, "Override the master seed");

  auto* cmp_cmd = app.add_subcommand("compare", "Run the config and its opposite method over several seeds");
  cmp_cmd->add_option("--config", o.config, "Run configuration (JSON)")->required();
  cmp_cmd->add_option("--out", o.out_dir, "Output directory")->required();
  cmp_cmd->add_option("--repeats", o.repeats, "Number of seeds")->check(CLI::PositiveNumber);
  cmp_cmd->add_option("--seed", o.seed, "First master seed (default: the config's seed)");
  cmp_cmd->add_flag("--keep-reports", o.keep_reports, "Also write every run's report directory");

  auto* scenes_cmd = app.add_subcommand("scenes", "List catalog scenes, or print one as JSON");
  scenes_cmd->add_option("--show", o.scene, "Scene to print");

  auto* render_cmd = app.add_subcommand("render", "Render a grid CSV as a PGM heatmap");
  render_cmd->add_option("--map", o.map, "Grid CSV")->required();
  render_cmd->add_option("--out", o.output, "PGM file")->required();

  auto* metric_cmd = app.add_subcommand("metric", "Ergodic metric of a trajectory against a target grid");
  metric_cmd->add_option("--trajectory", o.trajectory, "Trajectory CSV (tick,x1,x2)")->required();
  metric_cmd->add_option("--target", o.target, "Normalized target grid CSV")->required();
  metric_cmd->add_option("--order", o.order, "Fourier order K");

  auto* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference check of the CVAE loss gradient");
  grad_cmd->add_option("--config", o.config, "Run configuration supplying the architecture");
  grad_cmd->add_option("--seed", o.seed, "Override the master seed");
  grad_cmd->add_option("--count", o.count, "Random parameters checked in addition to each layer's first");
  grad_cmd->add_option("--points", o.points, "Batch size");
  grad_cmd->add_option("--beta", o.beta, "KL weight");
  grad_cmd->add_option("--tolerance", o.tolerance, "Largest accepted relative error");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::CallForHelp& e)
  {
    out << app.help();
    return kExitOk;
  }
  catch (const CLI::CallForAllHelp& e)
  {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  }
  catch (const CLI::ParseError& e)
  {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  try
  {
    if (run_cmd->parsed())
    {
      return cmd_run(o, out);
    }
    if (cmp_cmd->parsed())
    {
      return cmd_compare(o, out);
    }
    if (scenes_cmd->parsed())
    {
      return cmd_scenes(o, out);
    }
    if (render_cmd->parsed())
    {
      return cmd_render(o, out);
    }
    if (metric_cmd->parsed())
    {
      return cmd_metric(o, out);
    }
    return cmd_gradcheck(o, out);
  }
  catch (const ConfigError& e)
  {
    err << "config error: " << e.what() << '\n';
    return kExitInvalid;
  }
  catch (const InputError& e)
  {
    err << "invalid input: " << e.what() << '\n';
    return kExitInvalid;
  }
  catch (const std::exception& e)
  {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace ergotac
