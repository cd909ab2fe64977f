#pragma once

#include <Eigen/Core>

#include <span>
#include <vector>

namespace ergotac
{
using Vec2 = Eigen::Vector2d;

/// Point-in-polygon by crossing number. Points exactly on an edge count as inside.
bool point_in_polygon(const Vec2& p, std::span<const Vec2> vertices);

/// True when the closed polygon has >= 3 vertices, non-zero area and no two
/// non-adjacent edges intersecting.
bool is_simple_polygon(std::span<const Vec2> vertices);

double polygon_area(std::span<const Vec2> vertices);

double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b);

}  // namespace ergotac
