#include <ergotac/trajectory.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ergotac
{
double path_length(const Trajectory& traj)
{
  double len = 0.0;
  for (std::size_t t = 1; t < traj.points.size(); ++t)
  {
    len += (traj.points[t] - traj.points[t - 1]).norm();
  }
  return len;
}

double max_step(const Trajectory& traj)
{
  double m = 0.0;
  for (std::size_t t = 1; t < traj.points.size(); ++t)
  {
    m = std::max(m, (traj.points[t] - traj.points[t - 1]).norm());
  }
  return m;
}

bool within_unit_square(const Trajectory& traj)
{
  for (const auto& p : traj.points)
  {
    if (!(p.x() >= 0.0 && p.x() <= 1.0 && p.y() >= 0.0 && p.y() <= 1.0))
    {
      return false;
    }
  }
  return true;
}

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path)
{
  std::ofstream out(path);
  if (!out)
  {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << "tick,x1,x2\n";
  char buf[96];
  for (std::size_t t = 0; t < traj.points.size(); ++t)
  {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", t, traj.points[t].x(), traj.points[t].y());
    out << buf;
  }
}

Trajectory read_trajectory_csv(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw std::runtime_error("cannot open trajectory file " + path.string());
  }
  Trajectory traj;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line))
  {
    ++lineno;
    if (line.empty() || (lineno == 1 && line.rfind("tick", 0) == 0))
    {
      continue;
    }
    std::istringstream row(line);
    std::string tick, a, b, extra;
    if (!std::getline(row, tick, ',') || !std::getline(row, a, ',') || !std::getline(row, b, ',') ||
        std::getline(row, extra, ','))
    {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected tick,x1,x2");
    }
    try
    {
      std::size_t pos_a = 0;
      std::size_t pos_b = 0;
      const double x1 = std::stod(a, &pos_a);
      const double x2 = std::stod(b, &pos_b);
      if (pos_a != a.size() || pos_b != b.size())
      {
        throw std::invalid_argument("trailing characters");
      }
      traj.points.emplace_back(x1, x2);
    }
    catch (const std::exception&)
    {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": malformed number");
    }
  }
  if (traj.points.empty())
  {
    throw std::runtime_error(path.string() + ": no trajectory rows");
  }
  return traj;
}

}  // namespace ergotac
