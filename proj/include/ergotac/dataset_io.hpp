#pragma once

#include <ergotac/sensor.hpp>

#include <cstdint>
#include <filesystem>

namespace ergotac
{
/// Binary dataset layout, all fields little-endian:
///   char[4]  magic "ETDS"
///   uint32   version (1)
///   uint64   row count
///   uint32   conditional dims (2)
///   uint32   data dims (57)
///   float32  rows[row count][2 + 57]   conditional first, then data
inline constexpr char kDatasetMagic[4] = {'E', 'T', 'D', 'S'};
inline constexpr std::uint32_t kDatasetVersion = 1;

/// One row per point: y1,y2,x0..x56 with a header line.
void write_dataset_csv(const Dataset& data, const std::filesystem::path& path);
Dataset read_dataset_csv(const std::filesystem::path& path);

void write_dataset_binary(const Dataset& data, const std::filesystem::path& path);
Dataset read_dataset_binary(const std::filesystem::path& path);

}  // namespace ergotac
