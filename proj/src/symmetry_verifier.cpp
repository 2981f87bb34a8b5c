#include "sphbif/symmetry_verifier.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

#include "sphbif/csv.hpp"
#include "sphbif/errors.hpp"

namespace sphbif {

namespace {

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<double> random_direction(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> d(static_cast<std::size_t>(n));
  double r = 0.0;
  do {
    for (auto& x : d) x = nd(rng);
    r = norm(d);
  } while (r < 1e-8);
  for (auto& x : d) x /= r;
  return d;
}

// Uniform in (0, 1), never 0.
double open_unit(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double x = 0.0;
  while (x == 0.0) x = u(rng);
  return x;
}

template <class F>
void parallel_for(std::size_t count, int threads, F&& fn) {
  const std::size_t nt = std::clamp<std::size_t>(threads > 1 ? std::size_t(threads) : 1, 1, std::max<std::size_t>(count, 1));
  if (nt == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(nt);
  const std::size_t chunk = (count + nt - 1) / nt;
  for (std::size_t k = 0; k < nt; ++k) {
    pool.emplace_back([&, k] {
      try {
        const std::size_t lo = k * chunk, hi = std::min(count, lo + chunk);
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct Sample {
  std::vector<double> point, center;
  double lambda = 0.0;
};

// Serial reduction in sample order, so reports do not depend on the thread count.
ComparisonReport reduce(const std::vector<Sample>& samples, const std::vector<double>& deficits, double slack,
                        std::size_t max_recorded) {
  ComparisonReport rep;
  rep.slack = slack;
  rep.samples_tested = samples.size();
  rep.dimension = samples.empty() ? 0 : samples.front().point.size();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double d = deficits[i];
    rep.max_deficit = std::max(rep.max_deficit, d);
    if (d > slack || std::isnan(d)) {
      ++rep.violation_count;
      if (rep.violations.size() < max_recorded)
        rep.violations.push_back({samples[i].point, samples[i].lambda, samples[i].center, d});
    }
  }
  rep.pass = rep.violation_count == 0;
  return rep;
}

void check_n(int n, const char* who) {
  if (n < 3) throw DomainError(std::string(who) + ": n must be >= 3");
}

}  // namespace

nlohmann::json ComparisonReport::to_json() const {
  nlohmann::json v = nlohmann::json::array();
  for (const auto& x : violations)
    v.push_back({{"point", x.point}, {"lambda", x.lambda}, {"center", x.center}, {"deficit", x.deficit}});
  return {{"samples_tested", samples_tested},
          {"dimension", dimension},
          {"violation_count", violation_count},
          {"max_deficit", std::isfinite(max_deficit) ? nlohmann::json(max_deficit) : nlohmann::json(nullptr)},
          {"slack", slack},
          {"pass", pass},
          {"violations", v}};
}

void ComparisonReport::write_violations_csv(const std::filesystem::path& path) const {
  std::size_t dim = dimension;
  std::vector<std::string> header;
  for (std::size_t i = 0; i < dim; ++i) header.push_back("x" + std::to_string(i));
  header.push_back("lambda");
  for (std::size_t i = 0; i < dim; ++i) header.push_back("y" + std::to_string(i));
  header.push_back("deficit");
  io::CsvWriter w(header);
  for (const auto& v : violations) {
    std::vector<double> row(2 * dim + 2, 0.0);
    for (std::size_t i = 0; i < v.point.size(); ++i) row[i] = v.point[i];
    row[dim] = v.lambda;
    for (std::size_t i = 0; i < v.center.size(); ++i) row[dim + 1 + i] = v.center[i];
    row[2 * dim + 1] = v.deficit;
    w.add_numeric_row(row);
  }
  w.save(path);
}

double kelvin_rn(const RadialFunction& u, std::span<const double> y, double lambda, std::span<const double> x) {
  if (x.size() != y.size()) throw LengthMismatch("kelvin_rn: x and y differ in dimension");
  const int n = int(x.size());
  check_n(n, "kelvin_rn");
  if (!(lambda > 0.0)) throw DomainError("kelvin_rn: lambda must be > 0");
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = x[i] - y[i];
  const double rho2 = dot(d, d);
  if (rho2 == 0.0) throw DomainError("kelvin_rn: x coincides with the center");
  const double f = lambda * lambda / rho2;
  std::vector<double> img(x.size());
  for (std::size_t i = 0; i < d.size(); ++i) img[i] = y[i] + f * d[i];
  const double r = norm(img);
  if (r == 0.0) throw DomainError("kelvin_rn: reflected point is the origin");
  return std::pow(lambda / std::sqrt(rho2), n - 2) * u(r);
}

ComparisonReport moving_sphere_check_rn(const RadialFunction& u, int n, std::size_t budget, std::uint64_t seed,
                                        const RnSampling& opts) {
  check_n(n, "moving_sphere_check_rn");
  if (!(opts.y_max > 0.0) || !(opts.x_spread >= 0.0)) throw DomainError("moving_sphere_check_rn: bad sampling ranges");
  std::mt19937_64 rng(seed);
  std::vector<Sample> samples;
  samples.reserve(budget);
  while (samples.size() < budget) {
    Sample s;
    const double ry = opts.y_max * open_unit(rng);
    s.center = random_direction(n, rng);
    for (auto& c : s.center) c *= ry;
    s.lambda = ry * open_unit(rng);
    const double rho = s.lambda + opts.x_spread * (1.0 - open_unit(rng));
    const auto dir = random_direction(n, rng);
    s.point.resize(std::size_t(n));
    for (int i = 0; i < n; ++i) s.point[i] = s.center[i] + rho * dir[i];
    if (norm(s.point) < 1e-12) continue;
    samples.push_back(std::move(s));
  }
  std::vector<double> deficits(samples.size());
  parallel_for(samples.size(), opts.threads, [&](std::size_t i) {
    const auto& s = samples[i];
    deficits[i] = kelvin_rn(u, s.center, s.lambda, s.point) - u(norm(s.point));
  });
  return reduce(samples, deficits, opts.slack, opts.max_recorded);
}

nlohmann::json ConditionAReport::to_json() const {
  auto j = comparison.to_json();
  j["max_factorization_error"] = max_factorization_error;
  j["factorization_tol"] = factorization_tol;
  j["factorization_ok"] = factorization_ok;
  j["pass"] = pass();
  return j;
}

double condition_A_direct(std::span<const double> x, std::span<const double> z, double lambda) {
  if (x.size() != z.size()) throw LengthMismatch("condition_A_direct: dimension mismatch");
  const double z2 = dot(z, z);
  if (z2 == 0.0) throw DomainError("condition_A_direct: z = 0");
  const double l2 = lambda * lambda;
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double p = x[i] + z[i];
    const double q = x[i] + l2 * z[i] / z2;
    a += p * p;
    b += q * q;
  }
  return l2 * l2 * a - z2 * z2 * b;
}

double condition_A_factored(std::span<const double> x, std::span<const double> z, double lambda) {
  if (x.size() != z.size()) throw LengthMismatch("condition_A_factored: dimension mismatch");
  const double l2 = lambda * lambda, z2 = dot(z, z);
  return (l2 - z2) * ((l2 + z2) * dot(x, x) + 2.0 * l2 * dot(x, z));
}

ConditionAReport condition_A_check(double c, int n, std::size_t budget, std::uint64_t seed, double slack,
                                   int threads) {
  if (!(c > 0.0)) throw DomainError("condition_A_check: c must be > 0");
  check_n(n, "condition_A_check");
  constexpr double x_max = 4.0, z_spread = 6.0;
  std::mt19937_64 rng(seed);
  std::vector<Sample> samples;  // point = x, center = z
  samples.reserve(budget);
  while (samples.size() < budget) {
    Sample s;
    const double rx = x_max * open_unit(rng);
    s.point = random_direction(n, rng);
    for (auto& v : s.point) v *= rx;
    s.lambda = rx * open_unit(rng);
    const double rz = s.lambda + z_spread * open_unit(rng);
    s.center = random_direction(n, rng);
    for (auto& v : s.center) v *= rz;
    double xz = 0.0;
    for (int i = 0; i < n; ++i) xz += (s.point[i] + s.center[i]) * (s.point[i] + s.center[i]);
    if (xz < 1e-20) continue;
    samples.push_back(std::move(s));
  }
  std::vector<double> deficits(samples.size()), ferr(samples.size());
  parallel_for(samples.size(), threads, [&](std::size_t i) {
    const auto& x = samples[i].point;
    const auto& z = samples[i].center;
    const double l = samples[i].lambda, l2 = l * l, z2 = dot(z, z);
    double a1 = 0.0, a2 = 0.0;
    for (int k = 0; k < n; ++k) {
      const double p = x[k] + l2 * z[k] / z2, q = x[k] + z[k];
      a1 += p * p;
      a2 += q * q;
    }
    const double lhs = (l2 * l2 / (z2 * z2)) * c / a1;
    const double rhs = c / a2;
    // strict inequality: equality counts as a violation
    deficits[i] = lhs >= rhs ? std::max(lhs - rhs, std::numeric_limits<double>::min()) : lhs - rhs;
    const double direct = condition_A_direct(x, z, l);
    const double factored = condition_A_factored(x, z, l);
    const double scale = std::max(l2 * l2 * a2, z2 * z2 * a1);
    ferr[i] = std::abs(direct - factored) / scale;
  });
  ConditionAReport rep;
  rep.comparison = reduce(samples, deficits, slack, 100);
  for (double e : ferr) rep.max_factorization_error = std::max(rep.max_factorization_error, e);
  rep.factorization_ok = rep.max_factorization_error < rep.factorization_tol;
  return rep;
}

ComparisonReport moving_sphere_check_sphere(const AxisFunction& v, int n, Pole pole, std::span<const double> lambdas,
                                            const SphereSampling& opts) {
  check_n(n, "moving_sphere_check_sphere");
  if (opts.points < 1) throw DomainError("moving_sphere_check_sphere: points must be >= 1");
  const double pi = std::numbers::pi;
  const double r_hi = pi - opts.antipode_guard;
  std::vector<Sample> samples;
  for (double lam : lambdas) {
    if (!(lam > 0.0 && lam <= 0.5 * pi + 1e-15))
      throw DomainError("moving_sphere_check_sphere: lambda must lie in (0, pi/2]");
    if (!(r_hi > lam)) continue;
    for (int i = 0; i < opts.points; ++i) {
      Sample s;
      s.lambda = lam;
      const double r = lam + (r_hi - lam) * (i + 0.5) / opts.points;
      s.point = {axis_coordinate(pole, r)};
      s.center = {pole == Pole::north ? 1.0 : -1.0};
      samples.push_back(std::move(s));
    }
  }
  std::vector<double> deficits(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const KelvinParams kp{pole, samples[i].lambda, n};
    const double t = samples[i].point[0];
    deficits[i] = kelvin_value(v, kp, t) - v(t);
  }
  return reduce(samples, deficits, opts.slack, opts.max_recorded);
}

ComparisonReport moving_sphere_check_sphere(const AxisymFn& v, int n, Pole pole, std::span<const double> lambdas,
                                            const SphereSampling& opts) {
  return moving_sphere_check_sphere(AxisFunction([&v](double t) { return v(t); }), n, pole, lambdas, opts);
}

double beta0_sphere_profile(double t, int n) {
  check_n(n, "beta0_sphere_profile");
  if (!(t < 1.0 && t >= -1.0)) throw DomainError("beta0_sphere_profile: t must lie in [-1, 1)");
  const double m = 0.5 * (n - 2);
  return std::pow(m, m) * std::pow(1.0 - t, -0.5 * m);
}

GFamily GFamily::matukuma(int n, double p) {
  check_n(n, "GFamily::matukuma");
  if (p < 0.0) throw DomainError("GFamily::matukuma: p must be >= 0");
  GFamily g;
  g.kind = GFamilyKind::matukuma;
  g.n = n;
  g.p = p;
  return g;
}

GFamily GFamily::power_linear(int n, double beta) {
  check_n(n, "GFamily::power_linear");
  GFamily g;
  g.kind = GFamilyKind::power_linear;
  g.n = n;
  g.beta = beta;
  return g;
}

double GFamily::operator()(double t, double s) const {
  if (kind == GFamilyKind::matukuma) return matukuma_g(t, s, n, p);
  const double ps = double(n + 2) / (n - 2);
  return std::pow(s, ps) + (0.25 * n * (n - 2) - beta) * s;
}

std::string GFamily::name() const {
  if (kind == GFamilyKind::matukuma) return "matukuma(n=" + std::to_string(n) + ",p=" + io::format_double(p) + ")";
  return "power_linear(n=" + std::to_string(n) + ",beta=" + io::format_double(beta) + ")";
}

const GConditionResult& GConditionReport::get(const std::string& name) const {
  for (const auto& r : results)
    if (r.name == name) return r;
  throw DomainError("GConditionReport: condition " + name + " was not checked");
}

nlohmann::json GConditionReport::to_json() const {
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& r : results) rs.push_back({{"name", r.name}, {"holds", r.holds}, {"strict", r.strict}, {"note", r.note}});
  return {{"family", family.name()}, {"boundary_exponent", boundary_exponent}, {"results", rs}};
}

namespace {

constexpr double kRel = 1e-12;

// a <= b up to relative rounding; strict when a < b beyond it.
bool le(double a, double b) { return a <= b + kRel * std::max(std::abs(a), std::abs(b)); }
bool lt(double a, double b) { return a < b - kRel * std::max(std::abs(a), std::abs(b)); }

}  // namespace

GConditionReport g_condition_check(const GFamily& family, const std::vector<std::string>& conditions, int t_points,
                                   int s_points, double s_max) {
  if (t_points < 3 || s_points < 2 || !(s_max > 0.0)) throw DomainError("g_condition_check: grid too small");
  const int n = family.n;
  const double ps = double(n + 2) / (n - 2);
  std::vector<double> ts(static_cast<std::size_t>(t_points)), ss(static_cast<std::size_t>(s_points));
  for (int i = 0; i < t_points; ++i) ts[i] = -1.0 + 2.0 * (i + 0.5) / t_points;
  for (int j = 0; j < s_points; ++j) ss[j] = s_max * (j + 1) / s_points;
  std::vector<std::vector<double>> G(ts.size(), std::vector<double>(ss.size()));
  for (std::size_t i = 0; i < ts.size(); ++i)
    for (std::size_t j = 0; j < ss.size(); ++j) G[i][j] = family(ts[i], ss[j]);

  auto g3 = [&] {
    GConditionResult r{"g3", true, true, "s^{-(n+2)/(n-2)} g non-increasing in s"};
    for (std::size_t i = 0; i < ts.size(); ++i)
      for (std::size_t j = 0; j + 1 < ss.size(); ++j) {
        const double a = G[i][j + 1] / std::pow(ss[j + 1], ps), b = G[i][j] / std::pow(ss[j], ps);
        r.holds = r.holds && le(a, b);
        r.strict = r.strict && lt(a, b);
      }
    r.strict = r.strict && r.holds;
    return r;
  };
  auto g5 = [&] {
    GConditionResult r{"g5", true, true, "g non-decreasing toward either pole"};
    for (std::size_t j = 0; j < ss.size(); ++j)
      for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        if (ts[i] > 0.0) {
          r.holds = r.holds && le(G[i][j], G[i + 1][j]);
          r.strict = r.strict && lt(G[i][j], G[i + 1][j]);
        } else if (ts[i + 1] < 0.0) {
          r.holds = r.holds && le(G[i + 1][j], G[i][j]);
          r.strict = r.strict && lt(G[i + 1][j], G[i][j]);
        }
      }
    r.strict = r.strict && r.holds;
    return r;
  };
  // Reflections about the south pole; on the axis the image of t in Sigma_{s,lambda} is again an axis point.
  auto g7 = [&] {
    GConditionResult r{"g7", true, true, "g(theta, s) >= g(image, s) on Sigma_{s,lambda}, 0 < lambda < pi/2"};
    const double pi = std::numbers::pi;
    for (int l = 1; l < 16; ++l) {
      const KelvinParams kp{Pole::south, 0.5 * pi * l / 16.0, n};
      for (int i = 0; i < t_points; ++i) {
        const double rad = kp.lambda + (pi - 1e-3 - kp.lambda) * (i + 0.5) / t_points;
        const double t = axis_coordinate(Pole::south, rad);
        const double ti = kelvin_image(kp, t).t;
        for (double s : ss) {
          const double a = family(t, s), b = family(ti, s);
          r.holds = r.holds && le(b, a);
          r.strict = r.strict && lt(b, a);
        }
      }
    }
    r.strict = r.strict && r.holds;
    return r;
  };

  GConditionReport rep;
  rep.family = family;
  rep.boundary_exponent = double(n) / (n - 2);
  for (const auto& c : conditions) {
    if (c == "g1") {
      rep.results.push_back({"g1", true, false, "g depends on theta only through theta_{n+1}"});
    } else if (c == "g2") {
      GConditionResult r{"g2", true, true, "g strictly increasing in theta_{n+1}"};
      for (std::size_t j = 0; j < ss.size(); ++j)
        for (std::size_t i = 0; i + 1 < ts.size(); ++i) r.holds = r.holds && lt(G[i][j], G[i + 1][j]);
      r.strict = r.holds;
      rep.results.push_back(r);
    } else if (c == "g3") {
      rep.results.push_back(g3());
    } else if (c == "g4") {
      GConditionResult r{"g4", true, true, "g non-decreasing in s"};
      for (std::size_t i = 0; i < ts.size(); ++i)
        for (std::size_t j = 0; j + 1 < ss.size(); ++j) {
          r.holds = r.holds && le(G[i][j], G[i][j + 1]);
          r.strict = r.strict && lt(G[i][j], G[i][j + 1]);
        }
      r.strict = r.strict && r.holds;
      rep.results.push_back(r);
    } else if (c == "g5") {
      rep.results.push_back(g5());
    } else if (c == "g6") {
      const auto a = g5(), b = g3();
      GConditionResult r{"g6", (a.holds && a.strict) || (b.holds && b.strict), false,
                         "g5 strict or s^{-(n+2)/(n-2)} g strictly decreasing"};
      rep.results.push_back(r);
    } else if (c == "g7") {
      rep.results.push_back(g7());
    } else if (c == "g8") {
      const auto a = g7(), b = g3();
      rep.results.push_back({"g8", a.strict || b.strict, false, "g7 strict or s^{-(n+2)/(n-2)} g strictly decreasing"});
    } else {
      throw DomainError("g_condition_check: unknown condition " + c);
    }
  }
  return rep;
}

}  // namespace sphbif
