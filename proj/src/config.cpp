#include <ergotac/config.hpp>

#include <fstream>
#include <initializer_list>
#include <string>

namespace ergotac
{
using nlohmann::json;

namespace
{
void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where)
{
  if (!j.is_object())
  {
    throw ConfigError(where + ": expected an object");
  }
  for (const auto& [key, value] : j.items())
  {
    bool known = false;
    for (const char* a : allowed)
    {
      known = known || key == a;
    }
    if (!known)
    {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where)
{
  if (!j.contains(key))
  {
    return;
  }
  const json& v = j.at(key);
  try
  {
    if constexpr (std::is_same_v<T, double>)
    {
      if (!v.is_number())
      {
        throw ConfigError("not a number");
      }
    }
    else if constexpr (std::is_integral_v<T>)
    {
      if (!v.is_number_integer())
      {
        throw ConfigError("not an integer");
      }
      if constexpr (std::is_unsigned_v<T>)
      {
        if (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)
        {
          throw ConfigError("must be non-negative");
        }
      }
    }
    else if constexpr (std::is_same_v<T, std::string>)
    {
      if (!v.is_string())
      {
        throw ConfigError("not a string");
      }
    }
    out = v.get<T>();
  }
  catch (const std::exception& e)
  {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

Vec2 read_point(const json& v, const std::string& where)
{
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
  {
    throw ConfigError(where + ": expected [x, y]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

json arch_to_json(const ArchConfig& a)
{
  json j = {{"input_dim", a.input_dim},         {"cond_dim", a.cond_dim},
            {"latent_dim", a.latent_dim},       {"initial_width", a.initial_width},
            {"layer_ratio", a.layer_ratio},     {"depth", a.depth},
            {"dropout_p", a.dropout_p},         {"leaky_slope", a.leaky_slope},
            {"log_sigma_min", a.log_sigma_min}, {"log_sigma_max", a.log_sigma_max}};
  if (!a.widths.empty())
  {
    j["widths"] = a.widths;
  }
  return j;
}

ArchConfig arch_from_json(const json& j)
{
  const std::string w = "arch";
  check_keys(j,
             {"input_dim", "cond_dim", "latent_dim", "initial_width", "layer_ratio", "depth", "dropout_p",
              "leaky_slope", "log_sigma_min", "log_sigma_max", "widths"},
             w);
  ArchConfig a;
  read(j, "input_dim", a.input_dim, w);
  read(j, "cond_dim", a.cond_dim, w);
  read(j, "latent_dim", a.latent_dim, w);
  read(j, "initial_width", a.initial_width, w);
  read(j, "layer_ratio", a.layer_ratio, w);
  read(j, "depth", a.depth, w);
  read(j, "dropout_p", a.dropout_p, w);
  read(j, "leaky_slope", a.leaky_slope, w);
  read(j, "log_sigma_min", a.log_sigma_min, w);
  read(j, "log_sigma_max", a.log_sigma_max, w);
  if (j.contains("widths"))
  {
    const json& ws = j.at("widths");
    if (!ws.is_array())
    {
      throw ConfigError("arch.widths: expected an array of integers");
    }
    for (const auto& v : ws)
    {
      if (!v.is_number_integer())
      {
        throw ConfigError("arch.widths: expected an array of integers");
      }
      a.widths.push_back(v.get<int>());
    }
    a.depth = static_cast<int>(a.widths.size());
  }
  if (a.input_dim != kDataDim || a.cond_dim != kCondDim)
  {
    throw ConfigError("arch: input_dim must be 57 and cond_dim 2 for this sensor");
  }
  return a;
}

const char* init_name(PlannerInit init)
{
  switch (init)
  {
    case PlannerInit::spiral: return "spiral";
    case PlannerInit::previous: return "previous";
    case PlannerInit::tour: return "tour";
    default: return "automatic";
  }
}
}  // namespace

json scene_to_json(const SceneSpec& spec)
{
  json patches = json::array();
  for (const auto& p : spec.patches)
  {
    json jp = {{"name", p.name},
               {"height", p.height},
               {"roughness", p.roughness},
               {"texture_wavelength", p.texture_wavelength},
               {"priority", p.priority}};
    if (const auto* disc = std::get_if<Disc>(&p.shape))
    {
      jp["disc"] = {{"center", {disc->center.x(), disc->center.y()}}, {"radius", disc->radius}};
    }
    else
    {
      json verts = json::array();
      for (const auto& v : std::get<Polygon>(p.shape).vertices)
      {
        verts.push_back({v.x(), v.y()});
      }
      jp["polygon"] = verts;
    }
    patches.push_back(jp);
  }
  return {{"name", spec.name},
          {"domain", {{"length_x", spec.domain.length_x}, {"length_y", spec.domain.length_y}}},
          {"background",
           {{"height", spec.background_height},
            {"roughness", spec.background_roughness},
            {"texture_wavelength", spec.background_wavelength}}},
          {"texture_seed", spec.texture_seed},
          {"patches", patches}};
}

SceneSpec scene_from_json(const json& j)
{
  const std::string w = "scene";
  check_keys(j, {"name", "domain", "background", "texture_seed", "patches"}, w);
  SceneSpec spec;
  read(j, "name", spec.name, w);
  read(j, "texture_seed", spec.texture_seed, w);
  if (j.contains("domain"))
  {
    const json& d = j.at("domain");
    check_keys(d, {"length_x", "length_y"}, "scene.domain");
    read(d, "length_x", spec.domain.length_x, "scene.domain");
    read(d, "length_y", spec.domain.length_y, "scene.domain");
  }
  if (j.contains("background"))
  {
    const json& b = j.at("background");
    check_keys(b, {"height", "roughness", "texture_wavelength"}, "scene.background");
    read(b, "height", spec.background_height, "scene.background");
    read(b, "roughness", spec.background_roughness, "scene.background");
    read(b, "texture_wavelength", spec.background_wavelength, "scene.background");
  }
  if (j.contains("patches"))
  {
    const json& ps = j.at("patches");
    if (!ps.is_array())
    {
      throw ConfigError("scene.patches: expected an array");
    }
    for (std::size_t i = 0; i < ps.size(); ++i)
    {
      const std::string pw = "scene.patches[" + std::to_string(i) + "]";
      const json& jp = ps[i];
      check_keys(jp, {"name", "polygon", "disc", "height", "roughness", "texture_wavelength", "priority"}, pw);
      Patch patch;
      read(jp, "name", patch.name, pw);
      read(jp, "height", patch.height, pw);
      read(jp, "roughness", patch.roughness, pw);
      read(jp, "texture_wavelength", patch.texture_wavelength, pw);
      read(jp, "priority", patch.priority, pw);
      if (jp.contains("polygon") == jp.contains("disc"))
      {
        throw ConfigError(pw + ": exactly one of 'polygon' or 'disc' is required");
      }
      if (jp.contains("polygon"))
      {
        const json& verts = jp.at("polygon");
        if (!verts.is_array())
        {
          throw ConfigError(pw + ".polygon: expected an array of [x, y]");
        }
        Polygon poly;
        for (const auto& v : verts)
        {
          poly.vertices.push_back(read_point(v, pw + ".polygon"));
        }
        patch.shape = std::move(poly);
      }
      else
      {
        const json& jd = jp.at("disc");
        check_keys(jd, {"center", "radius"}, pw + ".disc");
        Disc disc;
        if (!jd.contains("center") || !jd.contains("radius"))
        {
          throw ConfigError(pw + ".disc: center and radius are required");
        }
        disc.center = read_point(jd.at("center"), pw + ".disc.center");
        read(jd, "radius", disc.radius, pw + ".disc");
        patch.shape = disc;
      }
      spec.patches.push_back(std::move(patch));
    }
  }
  try
  {
    validate(spec);
  }
  catch (const std::invalid_argument& e)
  {
    throw ConfigError(e.what());
  }
  return spec;
}

json to_json(const RunConfig& cfg)
{
  const auto& p = cfg.planner;
  const auto& o = cfg.optimizer;
  const auto& n = cfg.noise;
  const auto& e = cfg.entropy;
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["scene"] = cfg.scene_is_builtin ? json(cfg.scene.name) : scene_to_json(cfg.scene);
  j["method"] = to_string(cfg.method);
  j["episodes"] = cfg.episodes;
  j["ticks_per_episode"] = cfg.ticks_per_episode;
  j["train_steps_per_episode"] = cfg.train_steps_per_episode;
  j["seed"] = cfg.seed;
  j["seeds"] = {{"scene", cfg.seeds.scene},
                {"sensor", cfg.seeds.sensor},
                {"network", cfg.seeds.network},
                {"planner", cfg.seeds.planner}};
  j["arch"] = arch_to_json(cfg.arch);
  j["optimizer"] = {{"learning_rate", o.learning_rate}, {"beta1", o.beta1},       {"beta2", o.beta2},
                    {"epsilon", o.epsilon},             {"batch_size", o.batch_size}, {"kl_weight", o.kl_weight}};
  j["planner"] = {{"v_max", p.v_max},
                  {"samples", p.samples},
                  {"kernel_sigma", p.kernel_sigma},
                  {"iterations", p.iterations},
                  {"step_size", p.step_size},
                  {"smoothness", p.smoothness},
                  {"fourier_order", p.fourier_order},
                  {"heading_noise", p.heading_noise},
                  {"init", init_name(p.init)}};
  j["noise"] = {{"baseline", n.baseline},
                {"contact_gain", n.contact_gain},
                {"sensor_noise_std", n.sensor_noise_std},
                {"roughness_noise_gain", n.roughness_noise_gain},
                {"drift_per_tick", n.drift_per_tick}};
  j["entropy"] = {{"grid", {e.grid.cols, e.grid.rows}},
                  {"pool_size", e.pool_size},
                  {"floor_fraction", e.floor_fraction},
                  {"averaging", e.averaging == EntropyAveraging::entropy ? "entropy" : "variance"}};
  j["evaluation"] = {{"holdout_lines", cfg.evaluation.holdout_lines},
                     {"calibration_lines", cfg.evaluation.calibration_lines}};
  return j;
}

RunConfig run_config_from_json(const json& j, std::optional<std::uint64_t> seed_override)
{
  check_keys(j,
             {"schema_version", "scene", "method", "episodes", "ticks_per_episode", "train_steps_per_episode", "seed",
              "seeds", "arch", "optimizer", "planner", "noise", "entropy", "evaluation"},
             "config");
  if (!j.contains("schema_version") || !j.at("schema_version").is_number_integer() ||
      j.at("schema_version").get<int>() != kConfigSchemaVersion)
  {
    throw ConfigError("config: schema_version must be " + std::to_string(kConfigSchemaVersion));
  }
  RunConfig cfg;
  const std::string w = "config";

  if (!j.contains("scene"))
  {
    throw ConfigError("config: 'scene' is required");
  }
  const json& js = j.at("scene");
  if (js.is_string())
  {
    try
    {
      cfg.scene = builtin_scene(js.get<std::string>());
    }
    catch (const std::invalid_argument& e)
    {
      throw ConfigError(std::string("config.scene: ") + e.what());
    }
    cfg.scene_is_builtin = true;
  }
  else
  {
    cfg.scene = scene_from_json(js);
    cfg.scene_is_builtin = false;
  }

  std::string method = "active";
  read(j, "method", method, w);
  if (method == "active")
  {
    cfg.method = Method::active;
  }
  else if (method == "random")
  {
    cfg.method = Method::random;
  }
  else
  {
    throw ConfigError("config.method: expected 'active' or 'random'");
  }
  read(j, "episodes", cfg.episodes, w);
  read(j, "ticks_per_episode", cfg.ticks_per_episode, w);
  read(j, "train_steps_per_episode", cfg.train_steps_per_episode, w);
  read(j, "seed", cfg.seed, w);
  if (seed_override)
  {
    cfg.seed = *seed_override;
  }
  cfg.seeds = derive_seeds(cfg.seed);
  if (j.contains("seeds"))
  {
    const json& s = j.at("seeds");
    check_keys(s, {"scene", "sensor", "network", "planner"}, "config.seeds");
    read(s, "scene", cfg.seeds.scene, "config.seeds");
    read(s, "sensor", cfg.seeds.sensor, "config.seeds");
    read(s, "network", cfg.seeds.network, "config.seeds");
    read(s, "planner", cfg.seeds.planner, "config.seeds");
  }
  if (j.contains("arch"))
  {
    cfg.arch = arch_from_json(j.at("arch"));
  }
  if (j.contains("optimizer"))
  {
    const json& o = j.at("optimizer");
    const std::string ow = "config.optimizer";
    check_keys(o, {"learning_rate", "beta1", "beta2", "epsilon", "batch_size", "kl_weight"}, ow);
    read(o, "learning_rate", cfg.optimizer.learning_rate, ow);
    read(o, "beta1", cfg.optimizer.beta1, ow);
    read(o, "beta2", cfg.optimizer.beta2, ow);
    read(o, "epsilon", cfg.optimizer.epsilon, ow);
    read(o, "batch_size", cfg.optimizer.batch_size, ow);
    read(o, "kl_weight", cfg.optimizer.kl_weight, ow);
  }
  if (j.contains("planner"))
  {
    const json& p = j.at("planner");
    const std::string pw = "config.planner";
    check_keys(p,
               {"v_max", "samples", "kernel_sigma", "iterations", "step_size", "smoothness", "fourier_order",
                "heading_noise", "init"},
               pw);
    read(p, "v_max", cfg.planner.v_max, pw);
    read(p, "samples", cfg.planner.samples, pw);
    read(p, "kernel_sigma", cfg.planner.kernel_sigma, pw);
    read(p, "iterations", cfg.planner.iterations, pw);
    read(p, "step_size", cfg.planner.step_size, pw);
    read(p, "smoothness", cfg.planner.smoothness, pw);
    read(p, "fourier_order", cfg.planner.fourier_order, pw);
    read(p, "heading_noise", cfg.planner.heading_noise, pw);
    std::string init = init_name(cfg.planner.init);
    read(p, "init", init, pw);
    if (init == "automatic")
    {
      cfg.planner.init = PlannerInit::automatic;
    }
    else if (init == "spiral")
    {
      cfg.planner.init = PlannerInit::spiral;
    }
    else if (init == "previous")
    {
      cfg.planner.init = PlannerInit::previous;
    }
    else if (init == "tour")
    {
      cfg.planner.init = PlannerInit::tour;
    }
    else
    {
      throw ConfigError(pw + ".init: expected automatic, spiral, previous or tour");
    }
  }
  if (j.contains("noise"))
  {
    const json& n = j.at("noise");
    const std::string nw = "config.noise";
    check_keys(n, {"baseline", "contact_gain", "sensor_noise_std", "roughness_noise_gain", "drift_per_tick"}, nw);
    read(n, "baseline", cfg.noise.baseline, nw);
    read(n, "contact_gain", cfg.noise.contact_gain, nw);
    read(n, "sensor_noise_std", cfg.noise.sensor_noise_std, nw);
    read(n, "roughness_noise_gain", cfg.noise.roughness_noise_gain, nw);
    read(n, "drift_per_tick", cfg.noise.drift_per_tick, nw);
  }
  if (j.contains("entropy"))
  {
    const json& e = j.at("entropy");
    const std::string ew = "config.entropy";
    check_keys(e, {"grid", "pool_size", "floor_fraction", "averaging"}, ew);
    if (e.contains("grid"))
    {
      const json& g = e.at("grid");
      if (!g.is_array() || g.size() != 2 || !g[0].is_number_integer() || !g[1].is_number_integer())
      {
        throw ConfigError(ew + ".grid: expected [G1, G2]");
      }
      cfg.entropy.grid = {g[0].get<int>(), g[1].get<int>()};
    }
    read(e, "pool_size", cfg.entropy.pool_size, ew);
    read(e, "floor_fraction", cfg.entropy.floor_fraction, ew);
    std::string avg = "entropy";
    read(e, "averaging", avg, ew);
    if (avg == "entropy")
    {
      cfg.entropy.averaging = EntropyAveraging::entropy;
    }
    else if (avg == "variance")
    {
      cfg.entropy.averaging = EntropyAveraging::variance;
    }
    else
    {
      throw ConfigError(ew + ".averaging: expected 'entropy' or 'variance'");
    }
  }
  if (j.contains("evaluation"))
  {
    const json& e = j.at("evaluation");
    check_keys(e, {"holdout_lines", "calibration_lines"}, "config.evaluation");
    read(e, "holdout_lines", cfg.evaluation.holdout_lines, "config.evaluation");
    read(e, "calibration_lines", cfg.evaluation.calibration_lines, "config.evaluation");
  }
  try
  {
    validate(cfg);
  }
  catch (const std::invalid_argument& e)
  {
    throw ConfigError(e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ConfigError("cannot open config file '" + path.string() + "'");
  }
  json j;
  try
  {
    j = json::parse(in);
  }
  catch (const json::parse_error& e)
  {
    throw ConfigError("config file '" + path.string() + "': " + e.what());
  }
  try
  {
    return run_config_from_json(j, seed_override);
  }
  catch (const ConfigError& e)
  {
    throw ConfigError("config file '" + path.string() + "': " + e.what());
  }
}

}  // namespace ergotac
