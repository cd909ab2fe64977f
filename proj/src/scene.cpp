#include <ergotac/scene.hpp>
#include <ergotac/random.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ergotac
{
Vec2 Domain2D::clamp(const Vec2& p) const
{
  return {std::clamp(p.x(), 0.0, length_x), std::clamp(p.y(), 0.0, length_y)};
}

bool shape_contains(const Shape& shape, const Vec2& p)
{
  if (const auto* disc = std::get_if<Disc>(&shape))
  {
    return (p - disc->center).squaredNorm() <= disc->radius * disc->radius;
  }
  return point_in_polygon(p, std::get<Polygon>(shape).vertices);
}

TextureField::TextureField(double wavelength, std::uint64_t seed)
{
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  waves_.reserve(kComponents);
  for (int i = 0; i < kComponents; ++i)
  {
    const double lambda = wavelength * (1.0 + unit(rng));
    const double angle = two_pi * unit(rng);
    const double kmag = two_pi / lambda;
    waves_.push_back({Vec2(kmag * std::cos(angle), kmag * std::sin(angle)), two_pi * unit(rng)});
  }
}

double TextureField::operator()(const Vec2& p) const
{
  if (waves_.empty())
  {
    return 0.0;
  }
  double sum = 0.0;
  for (const auto& w : waves_)
  {
    sum += std::sin(w.k.dot(p) + w.phase);
  }
  return sum / static_cast<double>(waves_.size());
}

void validate(const SceneSpec& spec)
{
  if (!(spec.domain.length_x > 0.0) || !(spec.domain.length_y > 0.0))
  {
    throw std::invalid_argument("scene '" + spec.name + "': domain lengths must be positive");
  }
  if (spec.background_roughness < 0.0 || !(spec.background_wavelength > 0.0))
  {
    throw std::invalid_argument("scene '" + spec.name + "': invalid background material");
  }
  for (const auto& patch : spec.patches)
  {
    const std::string where = "scene '" + spec.name + "', patch '" + patch.name + "': ";
    if (patch.roughness < 0.0)
    {
      throw std::invalid_argument(where + "roughness must be >= 0");
    }
    if (!(patch.texture_wavelength > 0.0))
    {
      throw std::invalid_argument(where + "texture_wavelength must be > 0");
    }
    if (const auto* poly = std::get_if<Polygon>(&patch.shape))
    {
      if (!is_simple_polygon(poly->vertices))
      {
        throw std::invalid_argument(where + "polygon is not simple");
      }
    }
    else if (!(std::get<Disc>(patch.shape).radius > 0.0))
    {
      throw std::invalid_argument(where + "disc radius must be > 0");
    }
  }
}

Scene::Scene(SceneSpec spec) : spec_(std::move(spec))
{
  validate(spec_);
  order_.resize(spec_.patches.size());
  for (std::size_t i = 0; i < order_.size(); ++i)
  {
    order_[i] = i;
  }
  // Higher priority first; among equals the later patch sits on top.
  std::sort(order_.begin(), order_.end(), [this](std::size_t a, std::size_t b) {
    const int pa = spec_.patches[a].priority;
    const int pb = spec_.patches[b].priority;
    return pa != pb ? pa > pb : a > b;
  });
  textures_.reserve(spec_.patches.size());
  for (std::size_t i = 0; i < spec_.patches.size(); ++i)
  {
    textures_.emplace_back(spec_.patches[i].texture_wavelength, derive_seed(spec_.texture_seed, "patch", i));
  }
  background_texture_ = TextureField(spec_.background_wavelength, derive_seed(spec_.texture_seed, "background"));
}

int Scene::owner_at(const Vec2& p) const
{
  for (std::size_t idx : order_)
  {
    if (shape_contains(spec_.patches[idx].shape, p))
    {
      return static_cast<int>(idx);
    }
  }
  return -1;
}

MaterialSample Scene::material_at(const Vec2& p) const
{
  if (!spec_.domain.contains(p))
  {
    throw std::out_of_range("material_at: position outside the scene domain");
  }
  const int owner = owner_at(p);
  if (owner < 0)
  {
    return {spec_.background_height, spec_.background_roughness, background_texture_(p)};
  }
  const auto& patch = spec_.patches[static_cast<std::size_t>(owner)];
  return {patch.height, patch.roughness, textures_[static_cast<std::size_t>(owner)](p)};
}

Scene build_scene(const SceneSpec& spec)
{
  return Scene(spec);
}

namespace
{
Polygon rect(double x0, double y0, double x1, double y1)
{
  return Polygon{{Vec2(x0, y0), Vec2(x1, y0), Vec2(x1, y1), Vec2(x0, y1)}};
}

Polygon leaf_outline(const Vec2& center, double length, double width, double angle_deg)
{
  constexpr int n = 48;
  const double a = angle_deg * std::numbers::pi / 180.0;
  const double c = std::cos(a);
  const double s = std::sin(a);
  Polygon poly;
  for (int i = 0; i < n; ++i)
  {
    const double t = 2.0 * std::numbers::pi * i / n;
    // Pointed tip at t = 0, rounded base, slightly serrated margin.
    const double serration = 1.0 + 0.04 * std::sin(9.0 * t);
    const double u = 0.5 * length * std::cos(t);
    const double v = 0.5 * width * std::sin(t) * (0.75 - 0.25 * std::cos(t)) * serration;
    poly.vertices.emplace_back(center.x() + c * u - s * v, center.y() + s * u + c * v);
  }
  return poly;
}
}  // namespace

const std::vector<std::string>& builtin_scene_names()
{
  static const std::vector<std::string> names = {"triangles", "letter_n", "tape_strips",
                                                 "leaf",      "edge_token", "blank"};
  return names;
}

SceneSpec builtin_scene(std::string_view name)
{
  SceneSpec spec;
  spec.name = std::string(name);
  spec.texture_seed = 0x5eed0000ULL + tag_hash(name);

  if (name == "blank")
  {
    return spec;
  }
  if (name == "triangles")
  {
    // Leather triangles of three finishes on smooth acrylic.
    spec.patches.push_back({"coarse", Polygon{{Vec2(24, 28), Vec2(62, 30), Vec2(40, 64)}}, 1.5, 0.9, 3.0, 0});
    spec.patches.push_back({"medium", Polygon{{Vec2(84, 78), Vec2(122, 82), Vec2(100, 118)}}, 1.5, 0.45, 5.0, 0});
    spec.patches.push_back({"fine", Polygon{{Vec2(26, 96), Vec2(58, 118), Vec2(24, 126)}}, 1.0, 0.2, 2.5, 0});
    return spec;
  }
  if (name == "letter_n")
  {
    spec.patches.push_back({"N",
                            Polygon{{Vec2(30, 25), Vec2(50, 25), Vec2(50, 85), Vec2(95, 25), Vec2(115, 25),
                                     Vec2(115, 120), Vec2(95, 120), Vec2(95, 60), Vec2(50, 120), Vec2(30, 120)}},
                            1.5, 0.7, 3.0, 0});
    return spec;
  }
  if (name == "tape_strips")
  {
    spec.patches.push_back({"painters_low", rect(15, 20, 130, 44), 0.15, 0.5, 2.5, 0});
    spec.patches.push_back({"duct", rect(15, 62, 130, 86), 0.25, 0.2, 5.0, 0});
    spec.patches.push_back({"painters_cross", rect(62, 10, 84, 135), 0.15, 0.35, 3.5, 1});
    return spec;
  }
  if (name == "leaf")
  {
    spec.patches.push_back({"leaf", leaf_outline(Vec2(74, 70), 92.0, 44.0, 35.0), 0.4, 0.6, 2.0, 0});
    return spec;
  }
  if (name == "edge_token")
  {
    // Token flush with the left and bottom domain edges; its top and right
    // edges are exposed inside the reachable area.
    spec.patches.push_back({"token", rect(0, 0, 100, 100), 3.0, 0.05, 4.0, 0});
    return spec;
  }
  throw std::invalid_argument("unknown builtin scene '" + std::string(name) + "'");
}

}  // namespace ergotac
