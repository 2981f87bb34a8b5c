#include "sphbif/sphere_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "sphbif/errors.hpp"

namespace sphbif {

namespace {

constexpr double kPi = std::numbers::pi;

void check_open_angle(double x, const char* what) {
  if (!(x > 0.0 && x < kPi)) throw DomainError(std::string(what) + " must lie in (0, pi), got " + std::to_string(x));
}

// Geodesic distance from the north pole for a profile abscissa.
double north_distance(Coordinate c, double x) {
  switch (c) {
    case Coordinate::geodesic_r: return x;
    case Coordinate::t_cosine: return std::acos(std::clamp(x, -1.0, 1.0));
    default: throw DomainError("Kelvin transforms need geodesic_r or t_cosine profiles");
  }
}

double to_profile_coordinate(Coordinate c, double north_r) {
  return c == Coordinate::geodesic_r ? north_r : std::cos(north_r);
}

struct Sampled {
  KelvinResult result;
  std::vector<double> image_values;
  std::vector<double> jacobians;
};

Sampled sample_images(const RadialProfile& v, const KelvinParams& kp, const TransformOptions& opts) {
  v.validate();
  const auto interp = BarycentricInterpolant::for_profile(v);
  const double lo = v.grid.front(), hi = v.grid.back();
  const double guard = opts.pole_guard;

  Sampled s;
  auto& res = s.result;
  res.profile.grid = v.grid;
  res.profile.coordinate = v.coordinate;
  res.clamped.assign(v.size(), false);
  std::vector<double> queries;
  queries.reserve(v.size());

  for (std::size_t i = 0; i < v.size(); ++i) {
    double rho = north_distance(v.coordinate, v.grid[i]);
    if (kp.pole == Pole::south) rho = kPi - rho;
    bool clamped = false;
    if (rho < guard || rho > kPi - guard) {
      rho = std::clamp(rho, guard, kPi - guard);
      clamped = true;
    }
    double h = reflect_radius(kp.lambda, rho);
    double img = to_profile_coordinate(v.coordinate, kp.pole == Pole::north ? h : kPi - h);
    // the mirror images of the end points land on the grid up to rounding
    const double slack = 1e-12 * std::max(1.0, std::abs(hi));
    if (img < lo && img >= lo - slack) img = lo;
    if (img > hi && img <= hi + slack) img = hi;
    if (img < lo || img > hi) {
      if (opts.out_of_range == OutOfRange::error)
        throw DomainError("Kelvin image " + std::to_string(img) + " falls outside the profile grid [" +
                          std::to_string(lo) + ", " + std::to_string(hi) + "]");
      img = std::clamp(img, lo, hi);
      clamped = true;
    }
    res.clamped[i] = clamped;
    if (clamped) ++res.clamped_count;
    queries.push_back(img);
    s.image_values.push_back(interp(img));
    s.jacobians.push_back(jacobian_density(kp.lambda, rho, kp.n));
  }
  res.interpolation_tolerance = interpolation_error_estimate(v, queries);
  return s;
}

double tail_of(const AxisymFn& f, double scale = 0.0) { return spectral_tail(f.coeffs(), scale); }

double sup_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

// Drops trailing coefficients at the rounding level so that applying the
// Laplacian (which scales mode k by about k^2) does not amplify noise.
AxisymFn chopped(const AxisymFn& f, double scale) {
  std::vector<double> c(f.coeffs().begin(), f.coeffs().end());
  double big = scale;
  for (double x : c) big = std::max(big, std::abs(x));
  const double floor = 4.0 * std::numeric_limits<double>::epsilon() * big;
  std::size_t last = c.size();
  while (last > 1 && std::abs(c[last - 1]) <= floor) --last;
  std::fill(c.begin() + last, c.end(), 0.0);
  return AxisymFn::from_coeffs(f.basis_ptr(), std::move(c));
}

void require_resolved(double tail, double threshold, const char* what) {
  if (tail > threshold)
    throw ResolutionError(std::string(what) + " not resolved by the basis: spectral tail " + std::to_string(tail) +
                          " exceeds " + std::to_string(threshold));
}

// Builds the spectral representation of v on the basis and checks resolution.
AxisymFn resolved(const AxisFunction& v, const BasisPtr& basis, double threshold, double& tail) {
  std::vector<double> vals;
  vals.reserve(basis->nodes_count());
  for (double t : basis->nodes()) vals.push_back(v(t));
  auto fn = AxisymFn::from_node_values(basis, std::move(vals));
  tail = tail_of(fn);
  require_resolved(tail, threshold, "profile");
  return fn;
}

}  // namespace

void KelvinParams::validate() const {
  check_open_angle(lambda, "lambda");
  if (n < 2) throw DomainError("sphere dimension n must be >= 2");
}

double reflection_denominator(double lambda, double r) {
  // 1 + cos^2 l - 2 cos l cos r = 4 (sin^4(l/2) cos^2(r/2) + cos^4(l/2) sin^2(r/2)), free of cancellation
  const double sa = std::sin(0.5 * lambda), ca = std::cos(0.5 * lambda);
  const double sb = std::sin(0.5 * r), cb = std::cos(0.5 * r);
  return 4.0 * (sa * sa * sa * sa * cb * cb + ca * ca * ca * ca * sb * sb);
}

double reflect_radius(double lambda, double r) {
  check_open_angle(lambda, "lambda");
  check_open_angle(r, "r");
  // in stereographic coordinates from the antipode the map is the inversion
  // tan(h/2) = tan^2(lambda/2) / tan(r/2)
  const double sa = std::sin(0.5 * lambda), ca = std::cos(0.5 * lambda);
  return 2.0 * std::atan2(sa * sa * std::cos(0.5 * r), ca * ca * std::sin(0.5 * r));
}

double jacobian_density(double lambda, double r, int n) {
  check_open_angle(lambda, "lambda");
  check_open_angle(r, "r");
  if (n < 2) throw DomainError("jacobian_density: n must be >= 2");
  const double s = std::sin(lambda);
  return std::pow(s * s / reflection_denominator(lambda, r), n);
}

double distance_from_pole(Pole pole, double t) {
  const double r = std::acos(std::clamp(t, -1.0, 1.0));
  return pole == Pole::north ? r : kPi - r;
}

double axis_coordinate(Pole pole, double r) { return pole == Pole::north ? std::cos(r) : -std::cos(r); }

AxisImage kelvin_image(const KelvinParams& kp, double t) {
  kp.validate();
  if (t < -1.0 || t > 1.0) throw DomainError("kelvin_image: t outside [-1, 1]");
  // cos of the distance from the pole, so the formulas below work for both poles
  const double cr = kp.pole == Pole::north ? t : -t;
  const double sa = std::sin(0.5 * kp.lambda), ca = std::cos(0.5 * kp.lambda);
  const double s2 = sa * sa, c2 = ca * ca;
  // cos^2(r/2) and sin^2(r/2)
  const double cb2 = 0.5 * (1.0 + cr), sb2 = 0.5 * (1.0 - cr);
  const double num = c2 * c2 * sb2, den = s2 * s2 * cb2;
  const double ch = (num - den) / (num + den);
  const double jac = std::pow(s2 * c2 / (s2 * s2 * cb2 + c2 * c2 * sb2), kp.n);
  return {kp.pole == Pole::north ? ch : -ch, jac};
}

double kelvin_value(const AxisFunction& v, const KelvinParams& kp, double t) {
  if (kp.n < 3) throw DomainError("power-form Kelvin transform needs n >= 3");
  const auto img = kelvin_image(kp, t);
  return std::pow(img.jacobian, double(kp.n - 2) / (2.0 * kp.n)) * v(img.t);
}

double kelvin_value_s2(const AxisFunction& v, const KelvinParams& kp, double t) {
  if (kp.n != 2) throw DomainError("logarithmic Kelvin transform needs n = 2");
  const auto img = kelvin_image(kp, t);
  return v(img.t) + 0.5 * std::log(img.jacobian);
}

KelvinResult kelvin_transform_axisym(const RadialProfile& v, const KelvinParams& kp, const TransformOptions& opts) {
  kp.validate();
  if (kp.n < 3) throw DomainError("power-form Kelvin transform needs n >= 3");
  v.require_positive();
  auto s = sample_images(v, kp, opts);
  const double e = double(kp.n - 2) / (2.0 * kp.n);
  s.result.profile.values.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    s.result.profile.values[i] = std::pow(s.jacobians[i], e) * s.image_values[i];
  return std::move(s.result);
}

KelvinResult kelvin_transform_s2(const RadialProfile& v, const KelvinParams& kp, const TransformOptions& opts) {
  kp.validate();
  if (kp.n != 2) throw DomainError("logarithmic Kelvin transform needs n = 2");
  auto s = sample_images(v, kp, opts);
  s.result.profile.values.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    s.result.profile.values[i] = s.image_values[i] + 0.5 * std::log(s.jacobians[i]);
  return std::move(s.result);
}

double spectral_tail(std::span<const double> coeffs, double scale) {
  if (coeffs.empty()) return 0.0;
  const std::size_t k = coeffs.size();
  const std::size_t tail = std::max<std::size_t>(2, k / 8);
  double all = 0.0, end = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    all = std::max(all, std::abs(coeffs[i]));
    if (i + tail >= k) end = std::max(end, std::abs(coeffs[i]));
  }
  all = std::max(all, scale);
  return all > 0.0 ? end / all : 0.0;
}

InvarianceReport conformal_invariance_residual(const AxisymFn& input, const KelvinParams& kp, double tail_threshold) {
  kp.validate();
  if (kp.n < 3) throw DomainError("conformal_invariance_residual needs n >= 3");
  const auto& basis = input.basis();
  if (basis.dimension() != kp.n) throw DomainError("basis dimension differs from the sphere dimension");
  InvarianceReport rep;
  const double vscale = sup_abs(input.node_values());
  rep.tail_v = tail_of(input, vscale);
  require_resolved(rep.tail_v, tail_threshold, "profile");
  const auto v = chopped(input, vscale);

  const int n = kp.n;
  const double shift = n * (n - 2) / 4.0;
  const double ep = double(n - 2) / (2.0 * n), eq = double(n + 2) / (2.0 * n);
  const auto lv = apply_neg_laplacian(v);

  const auto nodes = basis.nodes();
  std::vector<double> transformed(nodes.size()), rhs(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const auto img = kelvin_image(kp, nodes[j]);
    transformed[j] = std::pow(img.jacobian, ep) * v(img.t);
    rhs[j] = std::pow(img.jacobian, eq) * (lv(img.t) + shift * v(img.t));
  }
  const double scale = std::max(sup_abs(transformed), sup_abs(v.node_values()));
  const auto vt = chopped(AxisymFn::from_node_values(v.basis_ptr(), std::move(transformed)), scale);
  rep.tail_transformed = tail_of(vt, scale);
  require_resolved(rep.tail_transformed, tail_threshold, "transformed profile");
  const auto lvt = apply_neg_laplacian(vt);
  const auto lhs = lvt.node_values();
  const auto vtv = vt.node_values();
  for (std::size_t j = 0; j < nodes.size(); ++j)
    rep.residual = std::max(rep.residual, std::abs(lhs[j] + shift * vtv[j] - rhs[j]));
  return rep;
}

InvarianceReport conformal_invariance_residual(const AxisFunction& v, const KelvinParams& kp, const BasisPtr& basis,
                                               double tail_threshold) {
  double tail = 0.0;
  const auto fn = resolved(v, basis, tail_threshold, tail);
  return conformal_invariance_residual(fn, kp, tail_threshold);
}

InvarianceReport conformal_invariance_residual(const RadialProfile& v, const KelvinParams& kp, const BasisPtr& basis,
                                               double tail_threshold) {
  v.validate();
  const auto interp = BarycentricInterpolant::for_profile(v);
  const auto nodes = basis->nodes();
  const double need_lo = v.coordinate == Coordinate::t_cosine ? nodes.front() : std::acos(nodes.back());
  const double need_hi = v.coordinate == Coordinate::t_cosine ? nodes.back() : std::acos(nodes.front());
  if (v.grid.front() > need_lo || v.grid.back() < need_hi)
    throw DomainError("profile grid does not cover the quadrature nodes");
  const Coordinate c = v.coordinate;
  return conformal_invariance_residual(
      [&](double t) { return interp(c == Coordinate::t_cosine ? t : std::acos(std::clamp(t, -1.0, 1.0))); }, kp,
      basis, tail_threshold);
}

InvarianceReport conformal_invariance_residual_s2(const AxisFunction& v, const KelvinParams& kp,
                                                  const BasisPtr& basis, double tail_threshold) {
  kp.validate();
  if (kp.n != 2 || basis->dimension() != 2) throw DomainError("S^2 invariance check needs n = 2");
  InvarianceReport rep;
  const auto raw = resolved(v, basis, tail_threshold, rep.tail_v);
  const auto fn = chopped(raw, std::max(1.0, sup_abs(raw.node_values())));
  const auto lv = apply_neg_laplacian(fn);
  const auto nodes = basis->nodes();
  std::vector<double> transformed(nodes.size()), rhs(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const auto img = kelvin_image(kp, nodes[j]);
    transformed[j] = fn(img.t) + 0.5 * std::log(img.jacobian);
    rhs[j] = img.jacobian * (lv(img.t) + 1.0);
  }
  // additive form: unit scale is the natural floor
  const double scale = std::max({1.0, sup_abs(transformed), sup_abs(fn.node_values())});
  const auto vt = chopped(AxisymFn::from_node_values(basis, std::move(transformed)), scale);
  rep.tail_transformed = tail_of(vt, scale);
  require_resolved(rep.tail_transformed, tail_threshold, "transformed profile");
  const auto lvt = apply_neg_laplacian(vt);
  const auto lhs = lvt.node_values();
  for (std::size_t j = 0; j < nodes.size(); ++j)
    rep.residual = std::max(rep.residual, std::abs(lhs[j] + 1.0 - rhs[j]));
  return rep;
}

double stereographic_factor(double r, int n) { return std::pow(2.0 / (1.0 + r * r), 0.5 * (n - 2)); }

double stereographic_t(double r) {
  if (r <= 1.0) return (r * r - 1.0) / (r * r + 1.0);
  // avoids overflow of r^2 for very large r
  const double q = 1.0 / (r * r);
  return (1.0 - q) / (1.0 + q);
}

double stereographic_r(double t) {
  if (!(t > -1.0 && t < 1.0)) throw DomainError("stereographic_r: t must lie in (-1, 1)");
  return std::sqrt((1.0 + t) / (1.0 - t));
}

RadialProfile stereographic_to_sphere(const RadialProfile& u, int n) {
  if (n < 3) throw DomainError("stereographic transfer needs n >= 3");
  if (u.coordinate != Coordinate::euclidean_r) throw DomainError("stereographic_to_sphere expects euclidean_r");
  u.validate();
  u.require_positive();
  RadialProfile v;
  v.coordinate = Coordinate::t_cosine;
  v.grid.resize(u.size());
  v.values.resize(u.size());
  // t is increasing in r, so the grid order is preserved
  for (std::size_t i = 0; i < u.size(); ++i) {
    v.grid[i] = stereographic_t(u.grid[i]);
    v.values[i] = u.values[i] / stereographic_factor(u.grid[i], n);
  }
  v.validate();
  return v;
}

RadialProfile stereographic_to_plane(const RadialProfile& v, int n) {
  if (n < 3) throw DomainError("stereographic transfer needs n >= 3");
  if (v.coordinate != Coordinate::t_cosine) throw DomainError("stereographic_to_plane expects t_cosine");
  v.validate();
  v.require_positive();
  RadialProfile u;
  u.coordinate = Coordinate::euclidean_r;
  u.grid.resize(v.size());
  u.values.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = stereographic_r(v.grid[i]);
    u.grid[i] = r;
    u.values[i] = v.values[i] * stereographic_factor(r, n);
  }
  u.validate();
  return u;
}

double matukuma_exponent(int n, double p) {
  if (n < 3) throw DomainError("matukuma_exponent: n must be >= 3");
  return 0.5 * ((n - 2) * p - n);
}

double matukuma_g(double t, double s, int n, double p) {
  if (p < 0.0) throw DomainError("matukuma_g: p must be >= 0");
  if (!(t >= -1.0 && t <= 1.0)) throw DomainError("matukuma_g: t outside [-1, 1]");
  if (s < 0.0) throw DomainError("matukuma_g: s must be >= 0");
  const double e = matukuma_exponent(n, p);
  if (t == 1.0 && e < 0.0) throw DomainError("matukuma_g: singular at t = 1 for this exponent");
  const double w = e == 0.0 ? 1.0 : std::pow(1.0 - t, e);
  return 0.5 * w * std::pow(s, p);
}

double MeanFieldForm::K(double t) const { return std::exp(gamma * t); }

MeanFieldForm meanfield_substitution(double alpha, double gamma) {
  if (alpha < 0.0 || gamma < 0.0) throw DomainError("meanfield_substitution: alpha and gamma must be >= 0");
  MeanFieldForm m;
  m.alpha = alpha;
  m.gamma = gamma;
  m.f = 1.0 - alpha / (8.0 * kPi);
  return m;
}

}  // namespace sphbif
