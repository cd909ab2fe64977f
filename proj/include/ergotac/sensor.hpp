#pragma once

#include <ergotac/random.hpp>
#include <ergotac/scene.hpp>
#include <ergotac/trajectory.hpp>

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace ergotac
{
inline constexpr int kElectrodes = 19;
inline constexpr int kWindow = 3;
inline constexpr int kDataDim = kElectrodes * kWindow;  // 57
inline constexpr int kCondDim = 2;
inline constexpr double kEmitRateHz = 30.0;

/// Electrode offsets (mm) from the sensor centre: three arcs inside a 10 x 7 mm pad.
std::span<const Vec2, kElectrodes> electrode_layout();

struct RawReading
{
  std::array<double, kElectrodes> e{};
  long tick = 0;
};

struct DataPoint
{
  std::array<double, kCondDim> y{};  // position / (L1, L2)
  std::array<double, kDataDim> x{};  // oldest reading first
};

using Dataset = std::vector<DataPoint>;

struct NoiseConfig
{
  double baseline = 1.0;
  double contact_gain = 1.0;        // per mm of surface height
  double sensor_noise_std = 0.02;   // white noise per electrode
  double roughness_noise_gain = 0.5;  // std of the per-read texture noise, scaled by roughness
  double drift_per_tick = 0.0;      // optional linear drift, off by default
};

void validate(const NoiseConfig& cfg);

/// Per-channel affine normalization fitted on a bootstrap sweep, then frozen.
struct Calibration
{
  std::array<double, kElectrodes> min{};
  std::array<double, kElectrodes> max{};

  /// Maps to [0,1] with clipping; degenerate channels map to 0.5.
  double normalize(int channel, double value) const;
};

RawReading read_electrodes(const Scene& scene, const Vec2& center_mm, const NoiseConfig& noise, Rng& rng,
                           long tick = 0);

/// Throws std::invalid_argument on an empty sample list.
Calibration calibrate(std::span<const RawReading> samples);

/// Returns nullopt ("insufficient history") unless given three consecutive readings.
std::optional<DataPoint> assemble_datapoint(std::span<const RawReading> history, const Vec2& position_mm,
                                            const Domain2D& domain, const Calibration& calib);

/// Ticks (0-based) at which a 30 Hz position sample falls, for a trajectory of n ticks.
std::vector<std::size_t> emission_ticks(std::size_t n);

/// Raw reads at every tick of a (normalized) trajectory.
std::vector<RawReading> read_along(const Scene& scene, const Trajectory& traj, const NoiseConfig& noise, Rng& rng);

/// Electrode reads at 100 Hz, data points at 30 Hz paired with the three most recent reads.
Dataset sample_along(const Scene& scene, const Trajectory& traj, const NoiseConfig& noise, const Calibration& calib,
                     Rng& rng);

}  // namespace ergotac
