#pragma once

#include <ergotac/entropy.hpp>
#include <ergotac/random.hpp>
#include <ergotac/trajectory.hpp>

#include <vector>

namespace ergotac
{
/// Fourier coefficients indexed by k = (k1, k2), 0 <= k_i <= K; storage k1 * (K+1) + k2.
struct CoeffSet
{
  int order = 0;  // K
  std::vector<double> values;

  double at(int k1, int k2) const { return values[static_cast<std::size_t>(k1 * (order + 1) + k2)]; }
  double& at(int k1, int k2) { return values[static_cast<std::size_t>(k1 * (order + 1) + k2)]; }
};

/// Normalizer making F_k unit-norm on [0,L1]x[0,L2]: sqrt of prod_i (L_i if k_i = 0 else L_i / 2).
double h_k(int k1, int k2, const Vec2& lengths = Vec2(1.0, 1.0));

/// F_k(x) = (1/h_k) prod_i cos(k_i pi x_i / L_i).
double basis_eval(int k1, int k2, const Vec2& x, const Vec2& lengths = Vec2(1.0, 1.0));

/// c_k = (1/T) sum_t F_k(x(t)). Throws std::invalid_argument on an empty trajectory.
CoeffSet traj_coeffs(const Trajectory& traj, int order);

/// phi_k = sum_cells phi(cell) F_k(cell centre).
CoeffSet dist_coeffs(const GridField& target, int order);

/// eps = sum_k (1 + |k|^2)^(-(n+1)/2) |c_k - phi_k|^2. Throws on mismatched orders.
double ergodic_metric(const CoeffSet& c, const CoeffSet& phi, int n = 2);

/// Weighted points s_i with weights P(s_i).
struct TargetSamples
{
  std::vector<Vec2> points;
  std::vector<double> weights;
};


/// Importance resampling on the grid: N cells drawn by systematic resampling along a
/// Hilbert ordering of the cells, each point jittered uniformly inside its cell, weight 1/N.
TargetSamples draw_target_samples(const GridField& target, int count, Rng& rng);

inline constexpr double kLogClamp = -50.0;

/// -sum_i P(s_i) log q(s_i), q(s) = (1/T) sum_t N(s; x(t), sigma^2 I), with log q clamped below at -50.
/// When `grad` is non-null it receives d/dx(t) for every trajectory point.
double kl_objective(const Trajectory& traj, const TargetSamples& samples, double sigma,
                    std::vector<Vec2>* grad = nullptr);

enum class PlannerInit
{
  automatic,  // spiral for a uniform target, tour otherwise
  spiral,
  previous,
  tour,  // constant-speed path through fresh target samples
};

struct PlannerConfig
{
  int horizon = 3000;                 // ticks at 100 Hz
  double v_max = 120.0 / 145.0;       // domain units per second
  int samples = 100;                  // N
  double kernel_sigma = 0.05;         // sigma_q, normalized units
  int iterations = 200;
  double step_size = 1e-2;            // initial heading step (rad), halved on objective increase
  double smoothness = 1e-4;           // weight of sum_t |u_{t+1} - u_t|^2 / v_max^2
  int fourier_order = 10;             // K used when scoring
  double heading_noise = 0.1;         // random walk heading increment std per tick (rad)
  PlannerInit init = PlannerInit::automatic;
};

void validate(const PlannerConfig& cfg);

struct PlanResult
{
  Trajectory trajectory;
  std::vector<double> headings;  // T-1 per-tick headings actually executed
  double initial_objective = 0.0;
  double final_objective = 0.0;
  int accepted_steps = 0;
};

/// Constant-speed rollout from x0: x_{t+1} = x_t + v dt (cos h_t, sin h_t). A heading that
/// would leave the unit square is mirrored in place, so the returned headings are the executed ones.
Trajectory rollout_headings(const Vec2& x0, std::vector<double>& headings, double step_length);

/// Headings of an Archimedean spiral around x0.
std::vector<double> spiral_headings(int horizon, double step_length, double arm_spacing = 0.06);

/// Optimizes per-tick headings of a constant-speed single integrator against the
/// sample-based KL surrogate. Throws std::invalid_argument for a non-normalized target.
PlanResult plan(const GridField& target, const Vec2& x0, const PlannerConfig& cfg, Rng& rng,
                const std::vector<double>* previous_headings = nullptr);

Trajectory plan_trajectory(const GridField& target, const Vec2& x0, const PlannerConfig& cfg, Rng& rng);

/// Constant-speed, heading-diffusing walk that reflects off the unit square walls.
Trajectory random_walk(const Vec2& x0, int horizon, const PlannerConfig& cfg, Rng& rng);

}  // namespace ergotac
