#include <ergotac/geometry.hpp>

#include <algorithm>
#include <cmath>

namespace ergotac
{
namespace
{
double cross(const Vec2& a, const Vec2& b, const Vec2& c)
{
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

bool on_segment(const Vec2& p, const Vec2& a, const Vec2& b)
{
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2)
{
  const double d1 = cross(q1, q2, p1);
  const double d2 = cross(q1, q2, p2);
  const double d3 = cross(p1, p2, q1);
  const double d4 = cross(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
  {
    return true;
  }
  return (d1 == 0 && on_segment(p1, q1, q2)) || (d2 == 0 && on_segment(p2, q1, q2)) ||
         (d3 == 0 && on_segment(q1, p1, p2)) || (d4 == 0 && on_segment(q2, p1, p2));
}
}  // namespace

double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b)
{
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0)
  {
    return (p - a).norm();
  }
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

bool point_in_polygon(const Vec2& p, std::span<const Vec2> v)
{
  const std::size_t n = v.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++)
  {
    if (distance_to_segment(p, v[j], v[i]) == 0.0)
    {
      return true;
    }
    if ((v[i].y() > p.y()) != (v[j].y() > p.y()))
    {
      const double x_cross = v[j].x() + (p.y() - v[j].y()) * (v[i].x() - v[j].x()) / (v[i].y() - v[j].y());
      if (p.x() < x_cross)
      {
        inside = !inside;
      }
    }
  }
  return inside;
}

double polygon_area(std::span<const Vec2> v)
{
  double a = 0.0;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++)
  {
    a += v[j].x() * v[i].y() - v[i].x() * v[j].y();
  }
  return 0.5 * std::abs(a);
}

bool is_simple_polygon(std::span<const Vec2> v)
{
  const std::size_t n = v.size();
  if (n < 3 || polygon_area(v) <= 0.0)
  {
    return false;
  }
  for (std::size_t i = 0; i < n; ++i)
  {
    const Vec2& a1 = v[i];
    const Vec2& a2 = v[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j)
    {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent)
      {
        continue;
      }
      if (segments_intersect(a1, a2, v[j], v[(j + 1) % n]))
      {
        return false;
      }
    }
  }
  return true;
}

}  // namespace ergotac
