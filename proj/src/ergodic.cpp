#include <ergotac/ergodic.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ergotac
{
namespace
{
constexpr double kPi = std::numbers::pi;

/// cos(k pi u) for k = 0..order.
void cos_table(double u, int order, std::vector<double>& out)
{
  out.resize(static_cast<std::size_t>(order + 1));
  for (int k = 0; k <= order; ++k)
  {
    out[static_cast<std::size_t>(k)] = std::cos(k * kPi * u);
  }
}

CoeffSet accumulate(const std::vector<Vec2>& points, const std::vector<double>& weights, int order)
{
  if (order < 0)
  {
    throw std::invalid_argument("Fourier order must be >= 0");
  }
  CoeffSet c;
  c.order = order;
  c.values.assign(static_cast<std::size_t>((order + 1) * (order + 1)), 0.0);
  std::vector<double> cx;
  std::vector<double> cy;
  for (std::size_t p = 0; p < points.size(); ++p)
  {
    cos_table(points[p].x(), order, cx);
    cos_table(points[p].y(), order, cy);
    const double w = weights[p];
    for (int k1 = 0; k1 <= order; ++k1)
    {
      for (int k2 = 0; k2 <= order; ++k2)
      {
        c.at(k1, k2) += w * cx[static_cast<std::size_t>(k1)] * cy[static_cast<std::size_t>(k2)];
      }
    }
  }
  for (int k1 = 0; k1 <= order; ++k1)
  {
    for (int k2 = 0; k2 <= order; ++k2)
    {
      c.at(k1, k2) /= h_k(k1, k2);
    }
  }
  return c;
}

double wrap_angle(double a)
{
  return std::remainder(a, 2.0 * kPi);
}
}  // namespace

double h_k(int k1, int k2, const Vec2& lengths)
{
  const double f1 = k1 == 0 ? lengths.x() : 0.5 * lengths.x();
  const double f2 = k2 == 0 ? lengths.y() : 0.5 * lengths.y();
  return std::sqrt(f1 * f2);
}

double basis_eval(int k1, int k2, const Vec2& x, const Vec2& lengths)
{
  return std::cos(k1 * kPi * x.x() / lengths.x()) * std::cos(k2 * kPi * x.y() / lengths.y()) / h_k(k1, k2, lengths);
}

CoeffSet traj_coeffs(const Trajectory& traj, int order)
{
  if (traj.empty())
  {
    throw std::invalid_argument("traj_coeffs: empty trajectory");
  }
  const std::vector<double> w(traj.size(), 1.0 / static_cast<double>(traj.size()));
  return accumulate(traj.points, w, order);
}

CoeffSet dist_coeffs(const GridField& target, int order)
{
  std::vector<Vec2> centers(target.values.size());
  for (std::size_t c = 0; c < centers.size(); ++c)
  {
    centers[c] = target.grid.center(c);
  }
  return accumulate(centers, target.values, order);
}

double ergodic_metric(const CoeffSet& c, const CoeffSet& phi, int n)
{
  if (c.order != phi.order || c.values.size() != phi.values.size())
  {
    throw std::invalid_argument("ergodic_metric: coefficient sets have different index sets");
  }
  const double exponent = -0.5 * (n + 1);
  double eps = 0.0;
  for (int k1 = 0; k1 <= c.order; ++k1)
  {
    for (int k2 = 0; k2 <= c.order; ++k2)
    {
      const double d = c.at(k1, k2) - phi.at(k1, k2);
      eps += std::pow(1.0 + k1 * k1 + k2 * k2, exponent) * d * d;
    }
  }
  return eps;
}

namespace
{
std::uint64_t hilbert_index(std::uint64_t n, std::uint64_t x, std::uint64_t y)
{
  std::uint64_t d = 0;
  for (std::uint64_t s = n / 2; s > 0; s /= 2)
  {
    const std::uint64_t rx = (x & s) > 0 ? 1 : 0;
    const std::uint64_t ry = (y & s) > 0 ? 1 : 0;
    d += s * s * ((3 * rx) ^ ry);
    if (ry == 0)
    {
      if (rx == 1)
      {
        x = n - 1 - x;
        y = n - 1 - y;
      }
      std::swap(x, y);
    }
  }
  return d;
}

std::vector<std::size_t> hilbert_order(const GridSpec& grid)
{
  std::uint64_t n = 1;
  while (n < static_cast<std::uint64_t>(std::max(grid.cols, grid.rows)))
  {
    n *= 2;
  }
  std::vector<std::pair<std::uint64_t, std::size_t>> keyed;
  keyed.reserve(grid.cells());
  for (std::size_t c = 0; c < grid.cells(); ++c)
  {
    const auto i = static_cast<std::uint64_t>(c % static_cast<std::size_t>(grid.cols));
    const auto j = static_cast<std::uint64_t>(c / static_cast<std::size_t>(grid.cols));
    keyed.emplace_back(hilbert_index(n, i, j), c);
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::size_t> order;
  order.reserve(keyed.size());
  for (const auto& [key, c] : keyed)
  {
    order.push_back(c);
  }
  return order;
}
}  // namespace

TargetSamples draw_target_samples(const GridField& target, int count, Rng& rng)
{
  check_normalized(target);
  if (count < 1)
  {
    throw std::invalid_argument("draw_target_samples: count must be >= 1");
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  TargetSamples s;
  s.points.reserve(static_cast<std::size_t>(count));
  s.weights.assign(static_cast<std::size_t>(count), 1.0 / count);
  const double inv_n = 1.0 / count;
  const auto& grid = target.grid;
  // Systematic resampling along a Hilbert ordering of the cells: per-cell counts stay
  // within one of count * weight and the samples spread evenly over the support.
  const std::vector<std::size_t> order = hilbert_order(grid);
  double u = unit(rng) * inv_n;
  double cumulative = 0.0;
  std::size_t pos = 0;
  for (int k = 0; k < count; ++k)
  {
    while (pos + 1 < order.size() && cumulative + target.values[order[pos]] < u)
    {
      cumulative += target.values[order[pos]];
      ++pos;
    }
    const Vec2 c = grid.center(order[pos]);
    s.points.emplace_back(c.x() + (unit(rng) - 0.5) / grid.cols, c.y() + (unit(rng) - 0.5) / grid.rows);
    u += inv_n;
  }
  return s;
}

double kl_objective(const Trajectory& traj, const TargetSamples& samples, double sigma, std::vector<Vec2>* grad)
{
  if (traj.empty())
  {
    throw std::invalid_argument("kl_objective: empty trajectory");
  }
  if (!(sigma > 0.0))
  {
    throw std::invalid_argument("kl_objective: sigma must be > 0");
  }
  const std::size_t T = traj.size();
  const double inv_two_var = 0.5 / (sigma * sigma);
  const double log_norm = -std::log(static_cast<double>(T)) - std::log(2.0 * kPi * sigma * sigma);
  if (grad != nullptr)
  {
    grad->assign(T, Vec2::Zero());
  }
  std::vector<double> expo(T);
  double objective = 0.0;
  for (std::size_t i = 0; i < samples.points.size(); ++i)
  {
    const Vec2& s = samples.points[i];
    double max_e = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < T; ++t)
    {
      expo[t] = -(s - traj.points[t]).squaredNorm() * inv_two_var;
      max_e = std::max(max_e, expo[t]);
    }
    double sum = 0.0;
    for (std::size_t t = 0; t < T; ++t)
    {
      expo[t] = std::exp(expo[t] - max_e);
      sum += expo[t];
    }
    const double log_q = log_norm + max_e + std::log(sum);
    const double w = samples.weights[i];
    if (log_q <= kLogClamp)
    {
      objective -= w * kLogClamp;
      continue;
    }
    objective -= w * log_q;
    if (grad != nullptr)
    {
      // d(-log q)/dx_t = -r_t (s - x_t) / sigma^2 with responsibilities r_t.
      const double scale = -w * 2.0 * inv_two_var / sum;
      for (std::size_t t = 0; t < T; ++t)
      {
        (*grad)[t] += scale * expo[t] * (s - traj.points[t]);
      }
    }
  }
  return objective;
}

void validate(const PlannerConfig& cfg)
{
  if (cfg.horizon < 1 || cfg.samples < 1 || cfg.iterations < 0 || cfg.fourier_order < 0)
  {
    throw std::invalid_argument("planner: counts must be positive");
  }
  if (!(cfg.v_max >= 0.0) || !(cfg.kernel_sigma > 0.0) || !(cfg.step_size > 0.0) || !(cfg.smoothness >= 0.0) ||
      !(cfg.heading_noise >= 0.0))
  {
    throw std::invalid_argument("planner: invalid numeric parameter");
  }
}

namespace
{
/// One constant-speed tick; a heading that would leave the unit square is mirrored in place.
Vec2 advance(const Vec2& x, double& heading, double step_length)
{
  double dx = step_length * std::cos(heading);
  double dy = step_length * std::sin(heading);
  bool mirrored = false;
  if (x.x() + dx < 0.0 || x.x() + dx > 1.0)
  {
    dx = -dx;
    mirrored = true;
  }
  if (x.y() + dy < 0.0 || x.y() + dy > 1.0)
  {
    dy = -dy;
    mirrored = true;
  }
  if (mirrored)
  {
    heading = std::atan2(dy, dx);
  }
  return {std::clamp(x.x() + dx, 0.0, 1.0), std::clamp(x.y() + dy, 0.0, 1.0)};
}
}  // namespace

Trajectory rollout_headings(const Vec2& x0, std::vector<double>& headings, double step_length)
{
  Trajectory traj;
  traj.points.reserve(headings.size() + 1);
  Vec2 x(std::clamp(x0.x(), 0.0, 1.0), std::clamp(x0.y(), 0.0, 1.0));
  traj.points.push_back(x);
  for (double& h : headings)
  {
    x = advance(x, h, step_length);
    traj.points.push_back(x);
  }
  return traj;
}

std::vector<double> spiral_headings(int horizon, double step_length, double arm_spacing)
{
  std::vector<double> headings;
  if (horizon < 2)
  {
    return headings;
  }
  headings.reserve(static_cast<std::size_t>(horizon - 1));
  const double c = arm_spacing / (2.0 * kPi);
  const double r0 = 0.5 * arm_spacing;
  double phi = 0.0;
  for (int t = 0; t + 1 < horizon; ++t)
  {
    const double r = r0 + c * phi;
    // Tangent of r(phi) (cos phi, sin phi).
    headings.push_back(std::atan2(c * std::sin(phi) + r * std::cos(phi), c * std::cos(phi) - r * std::sin(phi)));
    phi += step_length / std::sqrt(r * r + c * c);
  }
  return headings;
}

namespace
{
std::vector<Vec2> nearest_neighbour_order(const Vec2& start, std::vector<Vec2> points)
{
  std::vector<Vec2> order;
  order.reserve(points.size());
  Vec2 cur = start;
  while (!points.empty())
  {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i)
    {
      const double d = (points[i] - cur).squaredNorm();
      if (d < best_d)
      {
        best_d = d;
        best = i;
      }
    }
    cur = points[best];
    order.push_back(cur);
    points[best] = points.back();
    points.pop_back();
  }
  return order;
}

double tour_length(const Vec2& start, const std::vector<Vec2>& order)
{
  double len = 0.0;
  Vec2 cur = start;
  for (const auto& p : order)
  {
    len += (p - cur).norm();
    cur = p;
  }
  return len;
}

/// Constant-speed path through `count` waypoints drawn from the target, nearest-neighbour
/// ordered. Path length left over after the tour is shared equally between waypoints and
/// spent circling each one, so time at a place follows the target weight there.
std::vector<double> tour_headings(const Vec2& x0, const GridField& target, int count, int horizon,
                                  double step_length, double orbit_radius, Rng& rng)
{
  std::vector<double> headings;
  if (horizon < 2)
  {
    return headings;
  }
  const auto n_headings = static_cast<std::size_t>(horizon - 1);
  headings.reserve(n_headings);
  const auto waypoints = nearest_neighbour_order(x0, draw_target_samples(target, count, rng).points);
  const double spare = step_length * static_cast<double>(n_headings) - tour_length(x0, waypoints);
  const auto dwell = static_cast<std::size_t>(std::max(spare, 0.0) / (step_length * waypoints.size()));
  const double turn = step_length / std::max(orbit_radius, step_length);

  Vec2 x = x0;
  double heading = 0.0;
  auto emit = [&](double h) {
    heading = h;
    x = advance(x, heading, step_length);
    headings.push_back(heading);
  };
  for (const auto& w : waypoints)
  {
    while (headings.size() < n_headings && (w - x).norm() >= step_length)
    {
      emit(std::atan2(w.y() - x.y(), w.x() - x.x()));
    }
    for (std::size_t k = 0; k < dwell && headings.size() < n_headings; ++k)
    {
      emit(heading + turn);
    }
  }
  while (headings.size() < n_headings)
  {
    emit(heading + turn);
  }
  return headings;
}

bool is_uniform(const GridField& target)
{
  const double u = 1.0 / static_cast<double>(target.values.size());
  return std::all_of(target.values.begin(), target.values.end(),
                     [u](double v) { return std::abs(v - u) <= 1e-12 * u; });
}

struct HeadingObjective
{
  const TargetSamples& samples;
  double sigma;
  double smoothness;
  Vec2 x0;
  double step_length;

  double smooth_term(const std::vector<double>& h) const
  {
    double s = 0.0;
    for (std::size_t t = 1; t < h.size(); ++t)
    {
      s += 2.0 * (1.0 - std::cos(h[t] - h[t - 1]));
    }
    return smoothness * s;
  }

  /// Rolls out (mirroring headings in place) and evaluates; optional heading gradient.
  double operator()(std::vector<double>& h, Trajectory& traj, std::vector<double>* grad) const
  {
    traj = rollout_headings(x0, h, step_length);
    std::vector<Vec2> gx;
    const double value = kl_objective(traj, samples, sigma, grad ? &gx : nullptr) + smooth_term(h);
    if (grad == nullptr)
    {
      return value;
    }
    grad->assign(h.size(), 0.0);
    Vec2 tail = Vec2::Zero();
    for (std::size_t t = h.size(); t-- > 0;)
    {
      tail += gx[t + 1];
      (*grad)[t] = step_length * (-std::sin(h[t]) * tail.x() + std::cos(h[t]) * tail.y());
    }
    for (std::size_t t = 1; t < h.size(); ++t)
    {
      const double s = 2.0 * smoothness * std::sin(h[t] - h[t - 1]);
      (*grad)[t] += s;
      (*grad)[t - 1] -= s;
    }
    return value;
  }
};
}  // namespace

PlanResult plan(const GridField& target, const Vec2& x0, const PlannerConfig& cfg, Rng& rng,
                const std::vector<double>* previous_headings)
{
  validate(cfg);
  check_normalized(target);
  const double step_length = cfg.v_max * kTickSeconds;
  const TargetSamples samples = draw_target_samples(target, cfg.samples, rng);
  const auto n_headings = static_cast<std::size_t>(cfg.horizon - 1);

  std::vector<double> h;
  PlannerInit init = cfg.init;
  if (init == PlannerInit::automatic)
  {
    init = is_uniform(target) ? PlannerInit::spiral : PlannerInit::tour;
  }
  switch (init)
  {
    case PlannerInit::previous:
      if (previous_headings == nullptr || previous_headings->empty())
      {
        throw std::invalid_argument("plan: previous initialization requested without a previous trajectory");
      }
      h = *previous_headings;
      h.resize(n_headings, h.back());
      break;
    case PlannerInit::tour:
      h = tour_headings(x0, target, cfg.samples, cfg.horizon, step_length, 0.5 * cfg.kernel_sigma, rng);
      break;
    default:
      h = spiral_headings(cfg.horizon, step_length);
      break;
  }

  const HeadingObjective objective{samples, cfg.kernel_sigma, cfg.smoothness, x0, step_length};
  PlanResult result;
  std::vector<double> grad;
  result.initial_objective = objective(h, result.trajectory, &grad);
  double value = result.initial_objective;
  double alpha = cfg.step_size;
  std::vector<double> candidate(h.size());
  Trajectory candidate_traj;

  for (int it = 0; it < cfg.iterations && !h.empty(); ++it)
  {
    double g_max = 0.0;
    for (double g : grad)
    {
      g_max = std::max(g_max, std::abs(g));
    }
    if (!(g_max > 0.0))
    {
      break;
    }
    // Normalized step: the largest heading change equals alpha radians.
    for (std::size_t t = 0; t < h.size(); ++t)
    {
      candidate[t] = wrap_angle(h[t] - alpha * grad[t] / g_max);
    }
    const double cand_value = objective(candidate, candidate_traj, nullptr);
    if (cand_value <= value)
    {
      h.swap(candidate);
      value = objective(h, result.trajectory, &grad);
      ++result.accepted_steps;
      alpha *= 1.25;
    }
    else
    {
      alpha *= 0.5;
    }
  }
  if (h.empty())
  {
    result.trajectory = rollout_headings(x0, h, step_length);
  }
  result.final_objective = value;
  result.headings = std::move(h);
  return result;
}

Trajectory plan_trajectory(const GridField& target, const Vec2& x0, const PlannerConfig& cfg, Rng& rng)
{
  return plan(target, x0, cfg, rng).trajectory;
}

Trajectory random_walk(const Vec2& x0, int horizon, const PlannerConfig& cfg, Rng& rng)
{
  validate(cfg);
  if (horizon < 1)
  {
    throw std::invalid_argument("random_walk: horizon must be >= 1");
  }
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::normal_distribution<double> turn(0.0, cfg.heading_noise);
  const double step_length = cfg.v_max * kTickSeconds;
  Trajectory traj;
  traj.points.reserve(static_cast<std::size_t>(horizon));
  Vec2 x(std::clamp(x0.x(), 0.0, 1.0), std::clamp(x0.y(), 0.0, 1.0));
  traj.points.push_back(x);
  double heading = angle(rng);
  for (int t = 1; t < horizon; ++t)
  {
    x = advance(x, heading, step_length);
    traj.points.push_back(x);
    heading += turn(rng);
  }
  return traj;
}

}  // namespace ergotac
