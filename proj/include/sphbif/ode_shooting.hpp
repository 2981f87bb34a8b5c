#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sphbif/profile.hpp"

namespace sphbif {

/// Emden-Fowler reductions of the radial problems, t = -log r:
///   autonomous  w'' + (c - (n-2)^2/4) w + w^{(n+2)/(n-2)} = 0
///   beta        w'' - ((n-2)/2)^2 w + w^{(n+2)/(n-2)} + c_beta e^{-2t}/(1+e^{-2t})^2 w = 0
enum class Family { autonomous, beta };

std::string_view to_string(Family f);

struct ShootParams {
  int n = 3;
  Family family = Family::autonomous;
  double c = 0.0;     ///< autonomous family
  double beta = 0.0;  ///< beta family
  double a = 1.0;     ///< w(0)
  double b = 0.0;     ///< w'(0)
  double T = 30.0;    ///< integrate over [-T, T]
  double rtol = 1e-10;
  double atol = 1e-12;
  /// Spacing of the output grid; 0 keeps only accepted step points.
  double sample_dt = 0.05;
  double overflow_guard = 1e8;
  long max_steps = 10'000'000;

  static ShootParams autonomous(int n, double c, double a, double b, double T = 30.0);
  static ShootParams beta_family(int n, double beta, double a, double b, double T = 30.0);

  /// n(n-2) - 4 beta.
  double c_beta() const { return double(n) * (n - 2) - 4.0 * beta; }
  /// (n+2)/(n-2).
  double exponent() const { return double(n + 2) / (n - 2); }
  /// Coefficient of w in w'' = q(t) w - w^p: ((n-2)/2)^2 - c, or ((n-2)/2)^2 - c_beta kappa(t).
  double linear_coefficient(double t) const;

  void validate() const;
  nlohmann::json to_json() const;
};

/// e^{-2t}/(1+e^{-2t})^2 = 1/(4 cosh^2 t).
double beta_weight(double t);

struct TrajectorySample {
  double t, w, wp, h;
};

struct ZeroEvent {
  double t;
  /// Bracket from the dense-output bisection.
  double t_lo, t_hi;
  double w;
  double wp;
  /// +1 forward, -1 backward.
  int direction;
};

enum class TrajectoryStatus { positive_on_interval, hit_zero_forward, hit_zero_backward, blowup };

std::string_view to_string(TrajectoryStatus s);

struct Trajectory {
  ShootParams params;
  /// Sorted by t over [t_min, t_max]; includes event points.
  std::vector<TrajectorySample> samples;
  std::vector<ZeroEvent> events;
  TrajectoryStatus status = TrajectoryStatus::positive_on_interval;
  bool crossed_forward = false;
  bool crossed_backward = false;
  double t_min = 0.0;
  double t_max = 0.0;
  long steps = 0;

  std::vector<double> energy_series() const;
  /// Autonomous-family Hamiltonian H along the samples (throws DomainError for the beta family).
  std::vector<double> hamiltonian_series() const;
  double max_w() const;
  double min_w() const;

  void write_csv(const std::filesystem::path& path) const;
  void write_events_csv(const std::filesystem::path& path) const;
  nlohmann::json summary() const;
};

/// h(a, b) = b^2 - ((n-2)/2)^2 a^2 + ((n-2)/n) a^{2n/(n-2)}. Needs a >= 0.
double energy_h(double a, double b, int n);

/// H = 1/2 w'^2 - 1/2 ((n-2)^2/4 - c) w^2 + ((n-2)/(2n)) w^{2n/(n-2)}, conserved by the autonomous family.
double hamiltonian_autonomous(double w, double wp, int n, double c);

struct ShootingCondition {
  bool holds = false;
  double value = 0.0;
};

/// value = h(a, b) + c_beta a^2 / 4; holds iff value < 0.
ShootingCondition check_shooting_condition(double a, double b, int n, double beta);

/// Dormand-Prince 5(4) with dense output, forward to T and backward to -T.
/// Stops at the first zero of w in each direction. Throws BlowupDetected and
/// ToleranceFailure.
Trajectory integrate(const ShootParams& params);

struct EnergyMonitor {
  double max_violation = 0.0;
  double bound = 0.0;
  std::size_t samples_checked = 0;
  /// True when the family is autonomous and the monitor measures |H(t) - H(0)|.
  bool conservation_check = false;
};

/// Beta family: max over samples t >= 0 of h(t) - (h(a,b) + c_beta a^2/4).
/// Autonomous family: max |H(t) - H(0)| over all samples.
EnergyMonitor energy_estimate_monitor(const Trajectory& traj);

enum class Regime { nonexistence, oscillatory };

std::string_view to_string(Regime r);

struct AutonomousClass {
  Regime regime = Regime::oscillatory;
  std::optional<double> equilibrium;
  /// (n-2)^2/4.
  double hardy_threshold = 0.0;
  /// Maximum of w on the homoclinic level H = 0, when oscillatory.
  std::optional<double> homoclinic_max;
};

AutonomousClass classify_autonomous(int n, double c);

/// (n(n-2)/2)^{(n-2)/4}.
double decay_constant(int n);

struct DecayCheck {
  double C_star = 0.0;
  double max_w = 0.0;
  bool ok = false;
};

DecayCheck decay_bound_check(const Trajectory& traj);
/// u sampled in euclidean_r: max over the grid of r^{(n-2)/2} u(r).
DecayCheck decay_bound_check(const RadialProfile& u, int n);

struct PeriodicOrbit {
  double a = 0.0;
  double period = 0.0;
  double w_max = 0.0;
  double w_min = 0.0;
  /// |w - a| at the first return to w' = 0 on the starting side.
  double return_mismatch = 0.0;
  bool periodic = false;
};

/// Orbit of the autonomous family through (a, 0), followed to its first return.
PeriodicOrbit periodic_orbit(int n, double c, double a, double rtol = 1e-12, double atol = 1e-14,
                             double mismatch_tol = 1e-8);

struct PeriodicSweep {
  int n = 3;
  double c = 0.0;
  std::vector<PeriodicOrbit> orbits;
  double sup_w = 0.0;
  double level_set_bound = 0.0;
  double C_star = 0.0;
  bool all_periodic = false;

  nlohmann::json to_json() const;
};

/// Starts a_j = w_h - (w_h - w*) 2^{-j}, j = 1..levels, approaching the homoclinic level from inside.
PeriodicSweep periodic_sweep(int n, double c, int levels = 24);

/// w(t) = r^{(n-2)/2} u(r), r = e^{-t}. Input in euclidean_r, output in emden_fowler.
RadialProfile emden_fowler_transform(const RadialProfile& u, int n);
RadialProfile emden_fowler_inverse(const RadialProfile& w, int n);

enum class Beta0Amplitude { as_stated, corrected };

std::string_view to_string(Beta0Amplitude a);

/// (n-2)(3n-2)/16.
double beta0(int n);

/// as_stated: ((n-2)/2)^{(n-2)/2} (2/(1+r^2))^{(n-2)/4};
/// corrected: ((n-2)/2)^{(n-2)/2} (1+r^2)^{-(n-2)/4}.
double beta0_profile(double r, int n, Beta0Amplitude amp);

struct SingularResidual {
  int n = 3;
  double beta0 = 0.0;
  Beta0Amplitude amplitude = Beta0Amplitude::as_stated;
  /// Residual of u'' + (n-1)/r u' + (n(n-2) - 4 beta0)/(1+r^2)^2 u + u^{(n+2)/(n-2)} in euclidean_r.
  RadialProfile residual;
  double max_abs = 0.0;
};

/// Analytic derivatives on m log-spaced points of [r_lo, r_hi].
SingularResidual singular_solution_residual(int n, Beta0Amplitude amp = Beta0Amplitude::as_stated,
                                            double r_lo = 0.1, double r_hi = 10.0, std::size_t m = 400);

struct PhiFlux {
  /// Increasing r.
  std::vector<double> r, phi, flux;
  /// Largest increase of the flux between consecutive points (<= 0 when strictly decreasing).
  double max_increase = 0.0;
  bool decreasing = false;
};

/// phi = (1+r^2)^{(n-2)/2} u and flux r^{n-1}(1+r^2)^{2-n} phi' from a profile in euclidean_r.
PhiFlux phi_substitution(const RadialProfile& u, int n);
/// The same quantities along a trajectory: phi = (2 cosh t)^{(n-2)/2} w,
/// flux = -(2 cosh t)^{-(n-2)/2} ((n-2)/2 tanh t w + w').
PhiFlux phi_flux_from_trajectory(const Trajectory& traj);

struct SweepPoint {
  double a, b;
  TrajectoryStatus status;
  bool crossed_forward, crossed_backward;
  double t_forward_zero, t_backward_zero;
  /// Monotone flux on the positive segment (beta <= 0 only; true otherwise).
  bool flux_ok;
  double flux_max_increase;
};

struct SweepResult {
  ShootParams base;
  int grid = 20;
  std::uint64_t seed = 0;
  std::vector<SweepPoint> points;

  bool all_cross_both() const;
  bool all_cross_some_side() const;
  bool all_flux_ok() const;
  nlohmann::json to_json() const;
  void write_csv(const std::filesystem::path& path) const;
};

/// grid x grid starts over (0, 3] x [-3, 3] with seeded jitter of a quarter cell.
/// base supplies n, family, c / beta, T and tolerances. threads <= 1 runs serially;
/// results are independent of the thread count.
SweepResult nonexistence_sweep(const ShootParams& base, int grid, std::uint64_t seed, int threads = 1);

}  // namespace sphbif
