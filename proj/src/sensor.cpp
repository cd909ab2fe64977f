#include <ergotac/sensor.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ergotac
{
namespace
{
std::array<Vec2, kElectrodes> make_layout()
{
  // Three arcs (inner to outer) on a 10 x 7 mm elliptical pad, open towards the nail side.
  constexpr double semi_x = 5.0;
  constexpr double semi_y = 3.5;
  constexpr std::array<double, 3> radius = {0.30, 0.62, 0.94};
  constexpr std::array<int, 3> count = {5, 7, 7};
  constexpr double span = 150.0 * std::numbers::pi / 180.0;
  std::array<Vec2, kElectrodes> out;
  int k = 0;
  for (int arc = 0; arc < 3; ++arc)
  {
    for (int i = 0; i < count[arc]; ++i)
    {
      const double phi = -span + 2.0 * span * i / (count[arc] - 1);
      out[k++] = Vec2(semi_x * radius[arc] * std::cos(phi), semi_y * radius[arc] * std::sin(phi));
    }
  }
  return out;
}
}  // namespace

std::span<const Vec2, kElectrodes> electrode_layout()
{
  static const std::array<Vec2, kElectrodes> layout = make_layout();
  return layout;
}

void validate(const NoiseConfig& cfg)
{
  if (cfg.sensor_noise_std < 0.0 || cfg.roughness_noise_gain < 0.0)
  {
    throw std::invalid_argument("noise standard deviations must be >= 0");
  }
  if (!std::isfinite(cfg.baseline) || !std::isfinite(cfg.contact_gain) || !std::isfinite(cfg.drift_per_tick))
  {
    throw std::invalid_argument("noise config values must be finite");
  }
}

double Calibration::normalize(int channel, double value) const
{
  const double lo = min[static_cast<std::size_t>(channel)];
  const double hi = max[static_cast<std::size_t>(channel)];
  if (!(hi > lo))
  {
    return 0.5;
  }
  return std::clamp((value - lo) / (hi - lo), 0.0, 1.0);
}

RawReading read_electrodes(const Scene& scene, const Vec2& center_mm, const NoiseConfig& noise, Rng& rng, long tick)
{
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto& domain = scene.domain();
  RawReading r;
  r.tick = tick;
  const auto layout = electrode_layout();
  for (int i = 0; i < kElectrodes; ++i)
  {
    const Vec2 p = domain.clamp(center_mm + layout[static_cast<std::size_t>(i)]);
    const MaterialSample m = scene.material_at(p);
    // Draw both terms unconditionally so the stream layout does not depend on the scene.
    const double rough_noise = noise.roughness_noise_gain * gauss(rng);
    const double white = noise.sensor_noise_std * gauss(rng);
    r.e[static_cast<std::size_t>(i)] = noise.baseline + noise.contact_gain * m.height +
                                       m.roughness * (m.texture + rough_noise) + white +
                                       noise.drift_per_tick * static_cast<double>(tick);
  }
  return r;
}

Calibration calibrate(std::span<const RawReading> samples)
{
  if (samples.empty())
  {
    throw std::invalid_argument("calibrate: no samples");
  }
  Calibration c;
  c.min = samples.front().e;
  c.max = samples.front().e;
  for (const auto& s : samples)
  {
    for (std::size_t i = 0; i < kElectrodes; ++i)
    {
      c.min[i] = std::min(c.min[i], s.e[i]);
      c.max[i] = std::max(c.max[i], s.e[i]);
    }
  }
  return c;
}

std::optional<DataPoint> assemble_datapoint(std::span<const RawReading> history, const Vec2& position_mm,
                                            const Domain2D& domain, const Calibration& calib)
{
  if (history.size() != kWindow)
  {
    return std::nullopt;
  }
  for (std::size_t w = 1; w < history.size(); ++w)
  {
    if (history[w].tick != history[w - 1].tick + 1)
    {
      return std::nullopt;
    }
  }
  DataPoint dp;
  const Vec2 y = domain.normalize(domain.clamp(position_mm));
  dp.y = {y.x(), y.y()};
  for (int w = 0; w < kWindow; ++w)
  {
    for (int i = 0; i < kElectrodes; ++i)
    {
      dp.x[static_cast<std::size_t>(w * kElectrodes + i)] =
          calib.normalize(i, history[static_cast<std::size_t>(w)].e[static_cast<std::size_t>(i)]);
    }
  }
  return dp;
}

std::vector<std::size_t> emission_ticks(std::size_t n)
{
  // Frame j is captured at the end of the tick in which the 30 Hz clock passes (j+1)/30 s.
  std::vector<std::size_t> ticks;
  for (std::size_t j = 0;; ++j)
  {
    const std::size_t t = ((j + 1) * 10 + 2) / 3 - 1;  // ceil((j+1)*100/30) - 1
    if (t >= n)
    {
      break;
    }
    ticks.push_back(t);
  }
  return ticks;
}

std::vector<RawReading> read_along(const Scene& scene, const Trajectory& traj, const NoiseConfig& noise, Rng& rng)
{
  std::vector<RawReading> reads;
  reads.reserve(traj.size());
  const auto& domain = scene.domain();
  for (std::size_t t = 0; t < traj.size(); ++t)
  {
    reads.push_back(read_electrodes(scene, domain.denormalize(traj.points[t]), noise, rng, static_cast<long>(t)));
  }
  return reads;
}

Dataset sample_along(const Scene& scene, const Trajectory& traj, const NoiseConfig& noise, const Calibration& calib,
                     Rng& rng)
{
  const auto reads = read_along(scene, traj, noise, rng);
  const auto& domain = scene.domain();
  Dataset out;
  for (std::size_t t : emission_ticks(traj.size()))
  {
    if (t + 1 < kWindow)
    {
      continue;
    }
    const std::span<const RawReading> history(reads.data() + t + 1 - kWindow, kWindow);
    if (auto dp = assemble_datapoint(history, domain.denormalize(traj.points[t]), domain, calib))
    {
      out.push_back(*dp);
    }
  }
  return out;
}

}  // namespace ergotac
