#pragma once

#include <ergotac/geometry.hpp>

#include <filesystem>
#include <vector>

namespace ergotac
{
inline constexpr double kTickRateHz = 100.0;
inline constexpr double kTickSeconds = 1.0 / kTickRateHz;

/// Time-ordered sensor positions in normalized domain coordinates, one per 100 Hz tick.
struct Trajectory
{
  std::vector<Vec2> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Sum of per-tick displacements.
double path_length(const Trajectory& traj);

/// Largest per-tick displacement.
double max_step(const Trajectory& traj);

bool within_unit_square(const Trajectory& traj);

/// CSV with header "tick,x1,x2".
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);

/// Throws std::runtime_error on malformed input.
Trajectory read_trajectory_csv(const std::filesystem::path& path);

}  // namespace ergotac
