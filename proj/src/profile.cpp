#include "sphbif/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sphbif/csv.hpp"
#include "sphbif/errors.hpp"

namespace sphbif {

std::string_view to_string(Coordinate c) {
  switch (c) {
    case Coordinate::euclidean_r: return "euclidean_r";
    case Coordinate::geodesic_r: return "geodesic_r";
    case Coordinate::t_cosine: return "t_cosine";
    case Coordinate::emden_fowler: return "emden_fowler";
  }
  return "unknown";
}

Coordinate coordinate_from_string(std::string_view s) {
  if (s == "euclidean_r") return Coordinate::euclidean_r;
  if (s == "geodesic_r") return Coordinate::geodesic_r;
  if (s == "t_cosine") return Coordinate::t_cosine;
  if (s == "emden_fowler") return Coordinate::emden_fowler;
  throw DomainError("unknown coordinate kind '" + std::string(s) + "'");
}

void RadialProfile::validate() const {
  if (grid.size() != values.size()) throw LengthMismatch("RadialProfile: grid and values differ in length");
  if (grid.size() < 2) throw DomainError("RadialProfile: need at least two samples");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || !std::isfinite(values[i]))
      throw DomainError("RadialProfile: non-finite entry");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw DomainError("RadialProfile: grid not strictly increasing");
  }
  const double lo = grid.front(), hi = grid.back();
  switch (coordinate) {
    case Coordinate::euclidean_r:
      if (lo <= 0.0) throw DomainError("euclidean_r grid must lie in (0, inf)");
      break;
    case Coordinate::geodesic_r:
      if (lo <= 0.0 || hi >= std::numbers::pi) throw DomainError("geodesic_r grid must lie in (0, pi)");
      break;
    case Coordinate::t_cosine:
      if (lo <= -1.0 || hi >= 1.0) throw DomainError("t_cosine grid must lie in (-1, 1)");
      break;
    case Coordinate::emden_fowler:
      break;
  }
}

void RadialProfile::require_positive() const {
  for (double v : values)
    if (!(v > 0.0)) throw DomainError("RadialProfile: values must be positive");
}

std::vector<double> chebyshev_grid(double a, double b, std::size_t m) {
  if (m == 0 || !(b > a)) throw DomainError("chebyshev_grid: need m > 0 and a < b");
  std::vector<double> x(m);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (std::size_t j = 0; j < m; ++j) {
    // cos runs from +1 down to -1, so index from the back to get increasing nodes
    const double theta = std::numbers::pi * (2.0 * double(m - 1 - j) + 1.0) / (2.0 * double(m));
    x[j] = mid + half * std::cos(theta);
  }
  return x;
}

BarycentricInterpolant::BarycentricInterpolant(std::vector<double> x, std::vector<double> f, int blend_degree)
    : x_(std::move(x)), f_(std::move(f)) {
  const std::size_t m = x_.size();
  if (m != f_.size()) throw LengthMismatch("BarycentricInterpolant: size mismatch");
  if (m < 2) throw DomainError("BarycentricInterpolant: need two or more nodes");
  w_.assign(m, 0.0);
  const int n = int(m) - 1;
  if (blend_degree < 0 || blend_degree >= n) {
    const double scale = 4.0 / (x_.back() - x_.front());
    for (std::size_t j = 0; j < m; ++j) {
      double prod = 1.0;
      for (std::size_t k = 0; k < m; ++k)
        if (k != j) prod *= scale * (x_[j] - x_[k]);
      w_[j] = 1.0 / prod;
    }
  } else {
    const int d = blend_degree;
    for (int k = 0; k <= n; ++k) {
      double sum = 0.0;
      for (int i = std::max(0, k - d); i <= std::min(k, n - d); ++i) {
        double prod = 1.0;
        for (int j = i; j <= i + d; ++j)
          if (j != k) prod /= std::abs(x_[k] - x_[j]);
        sum += prod;
      }
      w_[k] = ((k - d) % 2 == 0 ? 1.0 : -1.0) * sum;
    }
  }
}

bool is_chebyshev_grid(std::span<const double> x) {
  const std::size_t m = x.size();
  if (m < 2) return false;
  const double c = std::cos(std::numbers::pi / (2.0 * double(m)));
  const double mid = 0.5 * (x.front() + x.back());
  const double half = 0.5 * (x.back() - x.front()) / c;
  const double tol = 1e-12 * std::max(1.0, std::abs(mid) + half);
  for (std::size_t j = 0; j < m; ++j) {
    const double theta = std::numbers::pi * (2.0 * double(m - 1 - j) + 1.0) / (2.0 * double(m));
    if (std::abs(x[j] - (mid + half * std::cos(theta))) > tol) return false;
  }
  return true;
}

BarycentricInterpolant BarycentricInterpolant::for_profile(const RadialProfile& p) {
  const std::size_t m = p.size();
  if (!is_chebyshev_grid(p.grid)) {
    const int d = std::min<int>(8, int(m) - 2);
    return BarycentricInterpolant(p.grid, p.values, std::max(d, 0));
  }
  BarycentricInterpolant b;
  b.x_ = p.grid;
  b.f_ = p.values;
  b.w_.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    // index j counts from the left end, which is the last classical node
    const std::size_t k = m - 1 - j;
    const double theta = std::numbers::pi * (2.0 * double(k) + 1.0) / (2.0 * double(m));
    b.w_[j] = (k % 2 == 0 ? 1.0 : -1.0) * std::sin(theta);
  }
  return b;
}

double BarycentricInterpolant::operator()(double x) const {
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < x_.size(); ++j) {
    const double diff = x - x_[j];
    if (diff == 0.0) return f_[j];
    const double a = w_[j] / diff;
    num += a * f_[j];
    den += a;
  }
  return num / den;
}

double BarycentricInterpolant::derivative(double x) const {
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (x == x_[i]) {
      double s = 0.0;
      for (std::size_t j = 0; j < x_.size(); ++j)
        if (j != i) s += (w_[j] / w_[i]) * (f_[j] - f_[i]) / (x_[i] - x_[j]);
      return s;
    }
  }
  const double r = (*this)(x);
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < x_.size(); ++j) {
    const double diff = x - x_[j];
    num += w_[j] * (r - f_[j]) / (diff * diff);
    den += w_[j] / diff;
  }
  return num / den;
}

double interpolation_error_estimate(const RadialProfile& p, std::span<const double> queries) {
  if (p.size() < 6) return std::numeric_limits<double>::infinity();
  const auto full = BarycentricInterpolant::for_profile(p);
  std::vector<double> xs, fs;
  for (std::size_t i = 0; i < p.size(); i += 2) {
    xs.push_back(p.grid[i]);
    fs.push_back(p.values[i]);
  }
  if (xs.back() != p.grid.back()) {
    xs.push_back(p.grid.back());
    fs.push_back(p.values.back());
  }
  BarycentricInterpolant coarse(std::move(xs), std::move(fs), 8);
  double err = 0.0;
  for (double q : queries) {
    if (q < full.lower() || q > full.upper()) continue;
    err = std::max(err, std::abs(full(q) - coarse(q)));
  }
  return err;
}

void write_profile_csv(const std::filesystem::path& csv, const RadialProfile& p) {
  io::CsvWriter w({"coordinate", "value"});
  for (std::size_t i = 0; i < p.size(); ++i) w.add_row({p.grid[i], p.values[i]});
  w.save(csv);
}

void write_profile(const std::filesystem::path& csv, const RadialProfile& p, int n, const nlohmann::json& metadata) {
  write_profile_csv(csv, p);
  nlohmann::json side;
  side["coordinate_kind"] = std::string(to_string(p.coordinate));
  side["n"] = n;
  side["metadata"] = metadata;
  auto sidecar = csv;
  sidecar.replace_extension(".json");
  io::write_json(sidecar, side);
}

RadialProfile read_profile_csv(const std::filesystem::path& csv, Coordinate coordinate) {
  const auto table = io::read_csv(csv);
  RadialProfile p;
  p.coordinate = coordinate;
  p.grid = table.numeric_column("coordinate");
  p.values = table.numeric_column("value");
  p.validate();
  return p;
}

RadialProfile read_profile(const std::filesystem::path& csv, int* n_out) {
  auto sidecar = csv;
  sidecar.replace_extension(".json");
  const auto side = io::read_json(sidecar);
  if (n_out) *n_out = side.at("n").get<int>();
  return read_profile_csv(csv, coordinate_from_string(side.at("coordinate_kind").get<std::string>()));
}

}  // namespace sphbif
