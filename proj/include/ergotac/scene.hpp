#pragma once

#include <ergotac/geometry.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ergotac
{
/// Physical extent of a tactile scene in millimetres. Positions live in [0,L1]x[0,L2].
struct Domain2D
{
  double length_x = 145.0;
  double length_y = 145.0;

  bool contains(const Vec2& p, double tol = 1e-9) const
  {
    return p.x() >= -tol && p.y() >= -tol && p.x() <= length_x + tol && p.y() <= length_y + tol;
  }
  Vec2 clamp(const Vec2& p) const;
  Vec2 normalize(const Vec2& p) const { return {p.x() / length_x, p.y() / length_y}; }
  Vec2 denormalize(const Vec2& u) const { return {u.x() * length_x, u.y() * length_y}; }
};

struct Polygon
{
  std::vector<Vec2> vertices;  // mm, either winding
};

struct Disc
{
  Vec2 center = Vec2::Zero();  // mm
  double radius = 1.0;         // mm
};

using Shape = std::variant<Polygon, Disc>;

bool shape_contains(const Shape& shape, const Vec2& p);

/// One material region. Overlaps resolve by priority, then list order.
struct Patch
{
  std::string name;
  Shape shape;
  double height = 0.0;              // mm
  double roughness = 0.0;           // amplitude of the stochastic texture, >= 0
  double texture_wavelength = 4.0;  // mm, > 0
  int priority = 0;
};

struct SceneSpec
{
  std::string name;
  Domain2D domain;
  std::vector<Patch> patches;
  double background_height = 0.0;
  double background_roughness = 0.0;
  double background_wavelength = 4.0;
  std::uint64_t texture_seed = 0;
};

struct MaterialSample
{
  double height = 0.0;
  double roughness = 0.0;
  double texture = 0.0;  // deterministic band-limited field value, in [-1,1]
};

/// Band-limited texture: a fixed sum of seeded plane waves whose wavelengths
/// lie in [wavelength, 2*wavelength]. Amplitudes sum to one so the value stays in [-1,1].
class TextureField
{
public:
  static constexpr int kComponents = 12;

  TextureField() = default;
  TextureField(double wavelength, std::uint64_t seed);

  double operator()(const Vec2& p) const;

private:
  struct Wave
  {
    Vec2 k;  // rad/mm
    double phase;
  };
  std::vector<Wave> waves_;
};

/// Compiled, immutable scene. Safe for concurrent queries.
class Scene
{
public:
  explicit Scene(SceneSpec spec);

  const SceneSpec& spec() const { return spec_; }
  const Domain2D& domain() const { return spec_.domain; }

  /// Throws std::out_of_range for positions outside the domain.
  MaterialSample material_at(const Vec2& p) const;

  /// Index of the patch that owns p, or -1 for background.
  int owner_at(const Vec2& p) const;

private:
  SceneSpec spec_;
  std::vector<std::size_t> order_;  // patch indices, highest precedence first
  std::vector<TextureField> textures_;
  TextureField background_texture_;
};

/// Validates and compiles a spec. Throws std::invalid_argument on bad input.
Scene build_scene(const SceneSpec& spec);

void validate(const SceneSpec& spec);

/// Names accepted by builtin_scene(), in catalog order.
const std::vector<std::string>& builtin_scene_names();

/// Catalog scenes. Throws std::invalid_argument for unknown names.
SceneSpec builtin_scene(std::string_view name);

}  // namespace ergotac
