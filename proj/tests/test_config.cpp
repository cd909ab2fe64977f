#include <ergotac/config.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace ergotac;
using nlohmann::json;

namespace
{
json minimal()
{
  return json{{"schema_version", 1}, {"scene", "triangles"}};
}
}  // namespace

TEST(Config, MinimalUsesDefaults)
{
  const RunConfig c = run_config_from_json(minimal());
  EXPECT_EQ(c.scene.name, "triangles");
  EXPECT_TRUE(c.scene_is_builtin);
  EXPECT_EQ(c.method, Method::active);
  EXPECT_EQ(c.episodes, 8);
  EXPECT_EQ(c.ticks_per_episode, 3000);
  EXPECT_EQ(c.train_steps_per_episode, 300);
  EXPECT_EQ(c.arch.latent_dim, 6);
  EXPECT_EQ(c.optimizer.kl_weight, 1.0);
  EXPECT_EQ(c.planner.samples, 100);
  EXPECT_EQ(c.entropy.pool_size, 16);
  EXPECT_EQ(c.seeds.planner, derive_seeds(0).planner);
}

TEST(Config, RoundTripReproducesResolvedJson)
{
  json j = minimal();
  j["method"] = "random";
  j["episodes"] = 3;
  j["seed"] = 42;
  j["optimizer"] = {{"kl_weight", 2.5}, {"batch_size", 64}};
  j["planner"] = {{"samples", 50}, {"init", "spiral"}};
  j["entropy"] = {{"grid", {20, 30}}, {"averaging", "variance"}};
  j["noise"] = {{"drift_per_tick", 1e-4}};
  const RunConfig c = run_config_from_json(j);
  const json resolved = to_json(c);
  const RunConfig back = run_config_from_json(resolved);
  EXPECT_EQ(to_json(back), resolved);
  EXPECT_EQ(back.method, Method::random);
  EXPECT_EQ(back.entropy.grid.cols, 20);
  EXPECT_EQ(back.entropy.grid.rows, 30);
  EXPECT_EQ(back.entropy.averaging, EntropyAveraging::variance);
  EXPECT_EQ(back.optimizer.batch_size, 64);
}

TEST(Config, InlineSceneRoundTrip)
{
  json j = minimal();
  j["scene"] = scene_to_json(builtin_scene("leaf"));
  j["scene"]["name"] = "my_leaf";
  const RunConfig c = run_config_from_json(j);
  EXPECT_FALSE(c.scene_is_builtin);
  EXPECT_EQ(c.scene.name, "my_leaf");
  EXPECT_EQ(scene_to_json(scene_from_json(scene_to_json(c.scene))), scene_to_json(c.scene));
  EXPECT_EQ(run_config_from_json(to_json(c)).scene.patches.size(), builtin_scene("leaf").patches.size());
}

TEST(Config, SchemaErrors)
{
  auto rejects = [](json j) { EXPECT_THROW(run_config_from_json(j), ConfigError) << j.dump(); };
  json j = minimal();
  j["episods"] = 3;
  rejects(j);
  j = minimal();
  j["optimizer"] = {{"learning_rte", 1e-3}};
  rejects(j);
  j = minimal();
  j.erase("schema_version");
  rejects(j);
  j = minimal();
  j["schema_version"] = 2;
  rejects(j);
  j = minimal();
  j["episodes"] = "eight";
  rejects(j);
  j = minimal();
  j["episodes"] = 1;
  rejects(j);
  j = minimal();
  j["scene"] = "no_such_scene";
  rejects(j);
  j = minimal();
  j["method"] = "greedy";
  rejects(j);
  j = minimal();
  j["arch"] = {{"input_dim", 58}};
  rejects(j);
  j = minimal();
  j["planner"] = {{"kernel_sigma", -1.0}};
  rejects(j);
  j = minimal();
  j["entropy"] = {{"grid", {0, 10}}};
  rejects(j);
  rejects(json::array());
}

TEST(Config, SeedOverrideSemantics)
{
  json j = minimal();
  j["seed"] = 3;
  const RunConfig inline7 = [&] {
    json k = j;
    k["seed"] = 7;
    return run_config_from_json(k);
  }();
  const RunConfig overridden = run_config_from_json(j, 7);
  EXPECT_EQ(to_json(inline7), to_json(overridden));
  EXPECT_EQ(overridden.seeds.sensor, derive_seeds(7).sensor);

  j["seeds"] = {{"network", 99}};
  const RunConfig partial = run_config_from_json(j);
  EXPECT_EQ(partial.seeds.network, 99u);
  EXPECT_EQ(partial.seeds.planner, derive_seeds(3).planner);
  EXPECT_EQ(partial.seeds.scene, derive_seeds(3).scene);
}

TEST(Config, NamedSeedsAreDistinct)
{
  const Seeds s = derive_seeds(11);
  EXPECT_NE(s.scene, s.sensor);
  EXPECT_NE(s.sensor, s.network);
  EXPECT_NE(s.network, s.planner);
  EXPECT_EQ(derive_seeds(11).network, s.network);
  EXPECT_NE(derive_seeds(12).network, s.network);
}

TEST(Config, LoadFileErrorsNamePath)
{
  const auto missing = std::filesystem::temp_directory_path() / "ergotac_no_such_config.json";
  try
  {
    load_run_config(missing);
    FAIL() << "expected ConfigError";
  }
  catch (const ConfigError& e)
  {
    EXPECT_NE(std::string(e.what()).find(missing.string()), std::string::npos);
  }
  const auto broken = std::filesystem::temp_directory_path() / "ergotac_broken_config.json";
  std::ofstream(broken) << "{\"schema_version\": 1,";
  EXPECT_THROW(load_run_config(broken), ConfigError);
}
