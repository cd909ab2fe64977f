#include <ergotac/dataset_io.hpp>

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ergotac
{
namespace
{
static_assert(std::endian::native == std::endian::little, "binary dataset IO assumes a little-endian host");

template <typename T>
void put(std::ofstream& out, T value)
{
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::filesystem::path& path)
{
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T)))
  {
    throw std::runtime_error(path.string() + ": truncated dataset");
  }
  return value;
}
}  // namespace

void write_dataset_csv(const Dataset& data, const std::filesystem::path& path)
{
  std::ofstream out(path);
  if (!out)
  {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << "y1,y2";
  for (int i = 0; i < kDataDim; ++i)
  {
    out << ",x" << i;
  }
  out << '\n';
  char buf[32];
  for (const auto& dp : data)
  {
    std::snprintf(buf, sizeof(buf), "%.17g", dp.y[0]);
    out << buf;
    std::snprintf(buf, sizeof(buf), ",%.17g", dp.y[1]);
    out << buf;
    for (double v : dp.x)
    {
      std::snprintf(buf, sizeof(buf), ",%.17g", v);
      out << buf;
    }
    out << '\n';
  }
}

Dataset read_dataset_csv(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw std::runtime_error("cannot open dataset " + path.string());
  }
  Dataset data;
  std::string line;
  std::getline(in, line);  // header
  std::size_t lineno = 1;
  while (std::getline(in, line))
  {
    ++lineno;
    if (line.empty())
    {
      continue;
    }
    std::istringstream row(line);
    std::string cell;
    std::array<double, kCondDim + kDataDim> values{};
    std::size_t n = 0;
    while (std::getline(row, cell, ','))
    {
      if (n >= values.size())
      {
        throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": too many columns");
      }
      values[n++] = std::stod(cell);
    }
    if (n != values.size())
    {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected 59 columns");
    }
    DataPoint dp;
    std::copy_n(values.begin(), kCondDim, dp.y.begin());
    std::copy_n(values.begin() + kCondDim, kDataDim, dp.x.begin());
    data.push_back(dp);
  }
  return data;
}

void write_dataset_binary(const Dataset& data, const std::filesystem::path& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
  {
    throw std::runtime_error("cannot write " + path.string());
  }
  out.write(kDatasetMagic, 4);
  put<std::uint32_t>(out, kDatasetVersion);
  put<std::uint64_t>(out, data.size());
  put<std::uint32_t>(out, kCondDim);
  put<std::uint32_t>(out, kDataDim);
  for (const auto& dp : data)
  {
    for (double v : dp.y)
    {
      put<float>(out, static_cast<float>(v));
    }
    for (double v : dp.x)
    {
      put<float>(out, static_cast<float>(v));
    }
  }
}

Dataset read_dataset_binary(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw std::runtime_error("cannot open dataset " + path.string());
  }
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kDatasetMagic, 4) != 0)
  {
    throw std::runtime_error(path.string() + ": not a dataset file");
  }
  if (get<std::uint32_t>(in, path) != kDatasetVersion)
  {
    throw std::runtime_error(path.string() + ": unsupported dataset version");
  }
  const auto rows = get<std::uint64_t>(in, path);
  if (get<std::uint32_t>(in, path) != kCondDim || get<std::uint32_t>(in, path) != kDataDim)
  {
    throw std::runtime_error(path.string() + ": unexpected row layout");
  }
  constexpr std::uint64_t header_bytes = 4 + 4 + 8 + 4 + 4;
  constexpr std::uint64_t row_bytes = (kCondDim + kDataDim) * sizeof(float);
  if (std::filesystem::file_size(path) != header_bytes + rows * row_bytes)
  {
    throw std::runtime_error(path.string() + ": row count does not match file size");
  }
  Dataset data(rows);
  for (auto& dp : data)
  {
    for (double& v : dp.y)
    {
      v = get<float>(in, path);
    }
    for (double& v : dp.x)
    {
      v = get<float>(in, path);
    }
  }
  return data;
}

}  // namespace ergotac
