#include <ergotac/grid.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace ergotac
{
std::size_t GridSpec::cell_of(const Vec2& u) const
{
  const int i = std::clamp(static_cast<int>(std::floor(u.x() * cols)), 0, cols - 1);
  const int j = std::clamp(static_cast<int>(std::floor(u.y() * rows)), 0, rows - 1);
  return index(i, j);
}

void write_grid_csv(const GridField& field, const std::filesystem::path& path)
{
  std::ofstream out(path);
  if (!out)
  {
    throw std::runtime_error("cannot write " + path.string());
  }
  char buf[32];
  for (int j = field.grid.rows - 1; j >= 0; --j)
  {
    for (int i = 0; i < field.grid.cols; ++i)
    {
      std::snprintf(buf, sizeof(buf), i == 0 ? "%.17g" : ",%.17g", field.values[field.grid.index(i, j)]);
      out << buf;
    }
    out << '\n';
  }
}

GridField read_grid_csv(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw std::runtime_error("cannot open grid file " + path.string());
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line))
  {
    if (!line.empty() && line.back() == '\r')
    {
      line.pop_back();
    }
    if (line.empty())
    {
      continue;
    }
    std::vector<double> row;
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
    {
      std::size_t used = 0;
      double v = 0.0;
      try
      {
        v = std::stod(cell, &used);
      }
      catch (const std::exception&)
      {
        throw std::runtime_error(path.string() + ": malformed value '" + cell + "'");
      }
      if (used != cell.size() || !std::isfinite(v))
      {
        throw std::runtime_error(path.string() + ": malformed value '" + cell + "'");
      }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
    {
      throw std::runtime_error(path.string() + ": ragged grid rows");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().empty())
  {
    throw std::runtime_error(path.string() + ": empty grid");
  }
  GridField field;
  field.grid = {static_cast<int>(rows.front().size()), static_cast<int>(rows.size())};
  field.values.resize(field.grid.cells());
  for (int r = 0; r < field.grid.rows; ++r)
  {
    const int j = field.grid.rows - 1 - r;
    for (int i = 0; i < field.grid.cols; ++i)
    {
      field.values[field.grid.index(i, j)] = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)];
    }
  }
  return field;
}

void write_pgm(const GridField& field, const std::filesystem::path& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
  {
    throw std::runtime_error("cannot write " + path.string());
  }
  const auto [lo_it, hi_it] = std::minmax_element(field.values.begin(), field.values.end());
  const double lo = *lo_it;
  const double span = *hi_it - lo;
  out << "P5\n" << field.grid.cols << ' ' << field.grid.rows << "\n255\n";
  for (int j = field.grid.rows - 1; j >= 0; --j)
  {
    for (int i = 0; i < field.grid.cols; ++i)
    {
      const double v = field.values[field.grid.index(i, j)];
      const double scaled = span > 0.0 ? (v - lo) / span : 0.0;
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * scaled))));
    }
  }
}

}  // namespace ergotac
