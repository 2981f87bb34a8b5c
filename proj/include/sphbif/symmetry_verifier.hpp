#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sphbif/axisym_spectral.hpp"
#include "sphbif/sphere_geometry.hpp"

namespace sphbif {

/// u(r) of a radial function on R^n \ {0}.
using RadialFunction = std::function<double(double)>;

struct Violation {
  std::vector<double> point;
  double lambda = 0.0;
  std::vector<double> center;
  double deficit = 0.0;
};

/// Outcome of a sampled comparison lhs <= rhs; deficit = lhs - rhs.
struct ComparisonReport {
  std::size_t samples_tested = 0;
  /// Length of the point and center vectors (1 on the sphere: theta_{n+1}).
  std::size_t dimension = 0;
  std::size_t violation_count = 0;
  /// First violations in sample order (capped at max_recorded).
  std::vector<Violation> violations;
  double max_deficit = -std::numeric_limits<double>::infinity();
  double slack = 1e-10;
  bool pass = true;

  nlohmann::json to_json() const;
  void write_violations_csv(const std::filesystem::path& path) const;
};

/// u_{y,lambda}(x) = (lambda/|x-y|)^{n-2} u(y + lambda^2 (x-y)/|x-y|^2), n = x.size().
/// Throws DomainError at x = y or when the reflected point is the origin.
double kelvin_rn(const RadialFunction& u, std::span<const double> y, double lambda, std::span<const double> x);

struct RnSampling {
  /// |y| in (0, y_max].
  double y_max = 4.0;
  /// |x - y| in [lambda, lambda + x_spread].
  double x_spread = 6.0;
  double slack = 1e-10;
  std::size_t max_recorded = 100;
  int threads = 1;
};

/// Samples (y, lambda, x) with 0 < lambda < |y| and |x - y| >= lambda and
/// checks u_{y,lambda}(x) <= u(x).
ComparisonReport moving_sphere_check_rn(const RadialFunction& u, int n, std::size_t budget, std::uint64_t seed,
                                        const RnSampling& opts = {});

struct ConditionAReport {
  ComparisonReport comparison;
  /// max |direct - factored| / scale over the samples, scale being the larger of the two squared terms.
  double max_factorization_error = 0.0;
  double factorization_tol = 1e-12;
  bool factorization_ok = true;

  bool pass() const { return comparison.pass && factorization_ok; }
  nlohmann::json to_json() const;
};

/// Direct value lambda^4 |x+z|^2 - |z|^4 |x + lambda^2 z/|z|^2|^2.
double condition_A_direct(std::span<const double> x, std::span<const double> z, double lambda);
/// (lambda^2 - |z|^2) ((lambda^2 + |z|^2)|x|^2 + 2 lambda^2 <x, z>).
double condition_A_factored(std::span<const double> x, std::span<const double> z, double lambda);

/// a(x) = c/|x|^2: checks (lambda/|z|)^4 a(x + lambda^2 z/|z|^2) < a(x + z) on samples with
/// 0 < lambda < |x|, |z| > lambda, and the factorization of the squared-distance form.
ConditionAReport condition_A_check(double c, int n, std::size_t budget, std::uint64_t seed, double slack = 1e-10,
                                   int threads = 1);

struct SphereSampling {
  /// Points per lambda, uniform in the geodesic distance from the pole over (lambda, pi - guard).
  int points = 200;
  /// Keeps samples away from the antipode of the pole, whose image is the pole itself.
  double antipode_guard = 1e-3;
  double slack = 1e-10;
  std::size_t max_recorded = 100;
};

/// For each lambda compares v_{p,lambda} with v on Sigma_{p,lambda} (distance from the pole > lambda).
ComparisonReport moving_sphere_check_sphere(const AxisFunction& v, int n, Pole pole,
                                            std::span<const double> lambdas, const SphereSampling& opts = {});
ComparisonReport moving_sphere_check_sphere(const AxisymFn& v, int n, Pole pole, std::span<const double> lambdas,
                                            const SphereSampling& opts = {});

/// ((n-2)/2)^{(n-2)/2} (1 - t)^{-(n-2)/4}: the singular solution of -Delta v + beta_0 v = v^{(n+2)/(n-2)}
/// in its sphere form, as used for the reflection comparison.
double beta0_sphere_profile(double t, int n);

enum class GFamilyKind { matukuma, power_linear };

struct GFamily {
  GFamilyKind kind = GFamilyKind::matukuma;
  int n = 3;
  double p = 1.0;     ///< matukuma exponent
  double beta = 0.0;  ///< power_linear

  static GFamily matukuma(int n, double p);
  static GFamily power_linear(int n, double beta);
  /// g(t, s) with t = theta_{n+1}.
  double operator()(double t, double s) const;
  std::string name() const;
};

struct GConditionResult {
  std::string name;
  bool holds = false;
  /// Strict version (strict monotonicity or strict inequality) where one exists.
  bool strict = false;
  std::string note;
};

struct GConditionReport {
  GFamily family;
  std::vector<GConditionResult> results;
  /// Matukuma: p = n/(n-2), where (g2) gives way to (g5) with equality.
  double boundary_exponent = 0.0;

  const GConditionResult& get(const std::string& name) const;
  nlohmann::json to_json() const;
};

/// Grid checks of the requested conditions among g1..g8 (g7 and g8 about the south pole).
GConditionReport g_condition_check(const GFamily& family, const std::vector<std::string>& conditions,
                                   int t_points = 101, int s_points = 101, double s_max = 10.0);

}  // namespace sphbif
