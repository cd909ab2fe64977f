#pragma once

#include <ergotac/geometry.hpp>

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <vector>

namespace ergotac
{
/// Regular G1 x G2 partition of the unit square. Cell (i, j) has i along x1 and
/// j along x2; storage is row-major with index j * G1 + i, row j = 0 at the bottom.
struct GridSpec
{
  int cols = 50;  // G1
  int rows = 50;  // G2

  std::size_t cells() const { return static_cast<std::size_t>(cols) * static_cast<std::size_t>(rows); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * cols + static_cast<std::size_t>(i); }
  Vec2 center(std::size_t idx) const
  {
    const auto i = static_cast<int>(idx % static_cast<std::size_t>(cols));
    const auto j = static_cast<int>(idx / static_cast<std::size_t>(cols));
    return {(i + 0.5) / cols, (j + 0.5) / rows};
  }
  std::size_t cell_of(const Vec2& u) const;
  void validate() const
  {
    if (cols < 1 || rows < 1)
    {
      throw std::invalid_argument("grid dimensions must be >= 1");
    }
  }
};

/// Scalar field over a grid.
struct GridField
{
  GridSpec grid;
  std::vector<double> values;
};

/// CSV: G2 lines of G1 comma-separated values, first line = top row (j = G2-1).
void write_grid_csv(const GridField& field, const std::filesystem::path& path);
GridField read_grid_csv(const std::filesystem::path& path);

/// Binary PGM (P5), min-max scaled to 0..255, first image row = top of the domain
/// so the origin sits at the bottom-left. A constant field renders all zeros.
void write_pgm(const GridField& field, const std::filesystem::path& path);

}  // namespace ergotac
