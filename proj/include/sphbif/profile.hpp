#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace sphbif {

/// Coordinate a radial profile is sampled in.
///
/// euclidean_r   r in (0, inf), radial coordinate on R^n
/// geodesic_r    r in (0, pi), geodesic distance from the north pole
/// t_cosine      t in (-1, 1), t = theta_{n+1} = cos(geodesic_r)
/// emden_fowler  t in R, t = -log r (Emden-Fowler time)
enum class Coordinate { euclidean_r, geodesic_r, t_cosine, emden_fowler };

std::string_view to_string(Coordinate c);
Coordinate coordinate_from_string(std::string_view s);

/// Samples of a rotationally symmetric function along one coordinate.
struct RadialProfile {
  std::vector<double> grid;
  std::vector<double> values;
  Coordinate coordinate = Coordinate::geodesic_r;

  /// Throws DomainError unless the grid is strictly increasing, inside the
  /// coordinate's admissible range and all values are finite. Positivity is
  /// checked separately because the log-form transforms carry signed data.
  void validate() const;
  void require_positive() const;
  std::size_t size() const { return grid.size(); }
};

/// Chebyshev points of the first kind mapped to (a, b), increasing.
std::vector<double> chebyshev_grid(double a, double b, std::size_t m);

/// Barycentric Lagrange interpolation through a fixed set of samples.
///
/// Weights come from the product formula with running rescaling, which is
/// stable for Chebyshev-distributed nodes. For other grids pass a blending
/// degree d < size()-1 to get Floater-Hormann rational interpolation.
class BarycentricInterpolant {
 public:
  BarycentricInterpolant(std::vector<double> x, std::vector<double> f, int blend_degree = -1);

  /// Interpolant suited to a profile's grid: closed-form Chebyshev weights when
  /// the grid is a first-kind Chebyshev grid, Floater-Hormann (d = 8) otherwise.
  static BarycentricInterpolant for_profile(const RadialProfile& p);

  double operator()(double x) const;
  double derivative(double x) const;

  double lower() const { return x_.front(); }
  double upper() const { return x_.back(); }

 private:
  BarycentricInterpolant() = default;
  std::vector<double> x_, f_, w_;
};

/// True when x coincides (to 1e-12 relative) with chebyshev_grid over some interval.
bool is_chebyshev_grid(std::span<const double> x);

/// Estimate of the interpolation error at the given query points: the
/// difference between the interpolant and one built on every other sample.
double interpolation_error_estimate(const RadialProfile& p, std::span<const double> queries);

void write_profile_csv(const std::filesystem::path& csv, const RadialProfile& p);
/// Writes the CSV plus a `<name>.json` sidecar {coordinate_kind, n, metadata}.
void write_profile(const std::filesystem::path& csv, const RadialProfile& p, int n,
                   const nlohmann::json& metadata = nlohmann::json::object());
RadialProfile read_profile_csv(const std::filesystem::path& csv, Coordinate coordinate);
/// Reads CSV and sidecar; the sidecar fixes the coordinate kind.
RadialProfile read_profile(const std::filesystem::path& csv, int* n_out = nullptr);

}  // namespace sphbif
