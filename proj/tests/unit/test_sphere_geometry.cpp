#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sphbif/errors.hpp"
#include "sphbif/sphere_geometry.hpp"

using namespace sphbif;

namespace {
constexpr double pi = std::numbers::pi;

RadialProfile sample_geodesic(std::size_t m, double eps, const std::function<double(double)>& f) {
  RadialProfile p;
  p.coordinate = Coordinate::geodesic_r;
  p.grid = chebyshev_grid(eps, pi - eps, m);
  for (double r : p.grid) p.values.push_back(f(r));
  return p;
}
}  // namespace

TEST_CASE("reflect_radius examples") {
  for (double r : {0.1, 0.7, 1.5, 2.9}) CHECK(reflect_radius(pi / 2, r) == doctest::Approx(pi - r).epsilon(1e-14));
  for (double lam : {0.3, 1.0, 2.5}) CHECK(reflect_radius(lam, lam) == doctest::Approx(lam).epsilon(1e-14));
  CHECK(reflect_radius(pi / 3, pi / 2) == doctest::Approx(std::acos(0.8)).epsilon(1e-14));
  CHECK(reflect_radius(pi / 3, pi / 2) == doctest::Approx(0.6435011087932844).epsilon(1e-14));
  CHECK_THROWS_AS(reflect_radius(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(reflect_radius(1.0, pi), DomainError);
}

TEST_CASE("jacobian_density examples") {
  for (int n : {2, 3, 5})
    for (double r : {0.2, 1.1, 3.0}) CHECK(jacobian_density(pi / 2, r, n) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(jacobian_density(pi / 3, pi / 2, 3) == doctest::Approx(0.216).epsilon(1e-14));
  CHECK_THROWS_AS(jacobian_density(1.0, 1.0, 1), DomainError);
}

TEST_CASE("reflection identities hold on random samples") {
  std::mt19937_64 rng(1234);
  // Closer to the poles the image h sits within ~1e-5 of pi and the double
  // representing it no longer determines r to 1e-12.
  std::uniform_real_distribution<double> ang(0.02, pi - 0.02);
  for (int i = 0; i < 2000; ++i) {
    const double lam = ang(rng), r = ang(rng);
    const double c = std::cos(lam), s = std::sin(lam);
    const double h = reflect_radius(lam, r);
    CHECK(h > 0.0);
    CHECK(h < pi);
    const double lhs = 1.0 + c * c - 2.0 * c * std::cos(h);
    CHECK(std::abs(lhs - std::pow(s, 4) / reflection_denominator(lam, r)) < 1e-12);
    CHECK(std::abs(reflect_radius(lam, h) - r) < 1e-12);
    for (int n : {2, 3, 4}) {
      const double jj = jacobian_density(lam, r, n) * jacobian_density(lam, h, n);
      CHECK(std::abs(jj - 1.0) < 1e-10);
    }
    if (r > lam) {
      const double j = jacobian_density(lam, r, 3);
      if (lam < pi / 2 - 1e-9) CHECK(j < 1.0);
      if (lam > pi / 2 + 1e-9) CHECK(j > 1.0);
    }
  }
}

TEST_CASE("kelvin_image agrees with reflect_radius for both poles") {
  KelvinParams kp{Pole::north, 1.1, 4};
  for (double r : {0.3, 1.7, 2.8}) {
    const auto img = kelvin_image(kp, std::cos(r));
    CHECK(img.t == doctest::Approx(std::cos(reflect_radius(1.1, r))).epsilon(1e-13));
    CHECK(img.jacobian == doctest::Approx(jacobian_density(1.1, r, 4)).epsilon(1e-13));
  }
  kp.pole = Pole::south;
  for (double r : {0.3, 1.7, 2.8}) {
    // r measured from the south pole
    const auto img = kelvin_image(kp, -std::cos(r));
    CHECK(img.t == doctest::Approx(-std::cos(reflect_radius(1.1, r))).epsilon(1e-13));
  }
}

TEST_CASE("power-form Kelvin transform of profiles") {
  SUBCASE("constant at lambda = pi/2") {
    auto v = sample_geodesic(32, 1e-3, [](double) { return 2.0; });
    auto res = kelvin_transform_axisym(v, {Pole::north, pi / 2, 3});
    for (double x : res.profile.values) CHECK(x == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(res.clamped_count == 0);
  }
  SUBCASE("involution at lambda = pi/2") {
    auto v = sample_geodesic(40, 1e-2, [](double r) { return 1.0 + 0.3 * std::cos(r) + 0.1 * std::sin(2 * r); });
    for (auto pole : {Pole::north, Pole::south}) {
      KelvinParams kp{pole, pi / 2, 4};
      auto once = kelvin_transform_axisym(v, kp);
      auto twice = kelvin_transform_axisym(once.profile, kp);
      for (std::size_t i = 0; i < v.size(); ++i)
        CHECK(std::abs(twice.profile.values[i] - v.values[i]) < 1e-12 + 10 * once.interpolation_tolerance);
    }
  }
  SUBCASE("image outside the grid") {
    auto v = sample_geodesic(20, 0.05, [](double) { return 1.0; });
    KelvinParams kp{Pole::north, pi / 3, 3};
    CHECK_THROWS_AS(kelvin_transform_axisym(v, kp), DomainError);
    TransformOptions opt;
    opt.out_of_range = OutOfRange::clamp;
    auto res = kelvin_transform_axisym(v, kp, opt);
    CHECK(res.clamped_count > 0);
  }
  SUBCASE("agrees with the pointwise formula") {
    auto f = [](double t) { return 1.0 + 0.2 * t + 0.1 * t * t; };
    RadialProfile v;
    v.coordinate = Coordinate::t_cosine;
    v.grid = chebyshev_grid(-0.999, 0.999, 48);
    for (double t : v.grid) v.values.push_back(f(t));
    KelvinParams kp{Pole::north, 1.3, 3};
    TransformOptions opt;
    opt.out_of_range = OutOfRange::clamp;
    auto res = kelvin_transform_axisym(v, kp, opt);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (res.clamped[i]) continue;
      CHECK(std::abs(res.profile.values[i] - kelvin_value(f, kp, v.grid[i])) < 1e-12);
    }
  }
  SUBCASE("rejects nonpositive data and n < 3") {
    auto v = sample_geodesic(10, 0.1, [](double r) { return std::cos(r); });
    CHECK_THROWS_AS(kelvin_transform_axisym(v, {Pole::north, pi / 2, 3}), DomainError);
    auto w = sample_geodesic(10, 0.1, [](double) { return 1.0; });
    CHECK_THROWS_AS(kelvin_transform_axisym(w, {Pole::north, pi / 2, 2}), DomainError);
  }
  SUBCASE("pointwise involution for general lambda") {
    auto f = [](double t) { return std::exp(0.4 * t); };
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> lam(0.2, pi - 0.2), tt(-0.99, 0.99);
    for (int i = 0; i < 200; ++i) {
      KelvinParams kp{i % 2 ? Pole::north : Pole::south, lam(rng), 3 + i % 3};
      auto once = [&](double t) { return kelvin_value(f, kp, t); };
      const double t = tt(rng);
      CHECK(kelvin_value(once, kp, t) == doctest::Approx(f(t)).epsilon(1e-11));
    }
  }
}

TEST_CASE("logarithmic Kelvin transform on S^2") {
  auto zero = sample_geodesic(30, 1e-3, [](double) { return 0.0; });
  auto res = kelvin_transform_s2(zero, {Pole::north, pi / 2, 2});
  for (double x : res.profile.values) CHECK(std::abs(x) < 1e-15);
  CHECK(kelvin_value_s2([](double) { return 0.0; }, {Pole::north, pi / 3, 2}, 0.0) ==
        doctest::Approx(std::log(0.6)).epsilon(1e-14));
  CHECK(std::log(0.6) == doctest::Approx(-0.5108256237659907));

  auto v = sample_geodesic(40, 1e-2, [](double r) { return 0.2 * std::cos(r) - 0.1 * std::cos(3 * r); });
  KelvinParams kp{Pole::south, pi / 2, 2};
  auto twice = kelvin_transform_s2(kelvin_transform_s2(v, kp).profile, kp);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(twice.profile.values[i] - v.values[i]) < 1e-12);

  auto f = [](double t) { return 0.3 * t * t - 0.1 * t; };
  for (double lam : {0.4, 1.2, 2.6}) {
    KelvinParams k2{Pole::north, lam, 2};
    auto once = [&](double t) { return kelvin_value_s2(f, k2, t); };
    for (double t : {-0.8, 0.0, 0.5}) CHECK(kelvin_value_s2(once, k2, t) == doctest::Approx(f(t)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(kelvin_transform_s2(zero, {Pole::north, 1.0, 3}), DomainError);
}

TEST_CASE("conformal invariance residual") {
  auto b3 = GegenbauerBasis::build(3, 64);
  SUBCASE("constant") {
    for (double lam : {pi / 2, 1.9, 2.0})
      CHECK(conformal_invariance_residual(AxisymFn::constant(b3, 1.0), {Pole::north, lam, 3}).residual < 1e-10);
    // |J|^{5/6} reaches 15.6 at the north pole here and the Laplacian of the
    // rounding noise near t = 1 sits just above 1e-10
    CHECK(conformal_invariance_residual(AxisymFn::constant(b3, 1.0), {Pole::north, pi / 3, 3}).residual < 1e-9);
    // the Jacobian factor has a branch point just outside [-1, 1] for small lambda
    CHECK_THROWS_AS(conformal_invariance_residual(AxisymFn::constant(b3, 1.0), {Pole::north, 0.5, 3}),
                    ResolutionError);
  }
  SUBCASE("1 + 0.1 t at lambda = pi/3") {
    auto rep = conformal_invariance_residual([](double t) { return 1.0 + 0.1 * t; }, {Pole::north, pi / 3, 3}, b3);
    CHECK(rep.residual < 1e-8);
  }
  SUBCASE("lambda = pi/2 is a mirror") {
    auto rep = conformal_invariance_residual([](double t) { return 1.0 + 0.1 * t + 0.05 * t * t * t; },
                                             {Pole::south, pi / 2, 3}, b3);
    CHECK(rep.residual < 1e-10);
  }
  SUBCASE("higher dimensions") {
    for (int n : {4, 5}) {
      auto b = GegenbauerBasis::build(n, 64);
      auto rep = conformal_invariance_residual([](double t) { return std::exp(0.3 * t); }, {Pole::north, 1.0, n}, b);
      CHECK(rep.residual < 1e-8);
    }
  }
  SUBCASE("profile input") {
    RadialProfile v;
    v.coordinate = Coordinate::t_cosine;
    const double reach = (1.0 - 1e-12) / std::cos(pi / 80.0);
    v.grid = chebyshev_grid(-reach, reach, 40);
    for (double t : v.grid) v.values.push_back(1.0 + 0.1 * t);
    auto rep = conformal_invariance_residual(v, {Pole::north, pi / 3, 3}, b3);
    CHECK(rep.residual < 1e-8);
  }
  SUBCASE("residual decreases with K for 1 + 0.1 t") {
    auto f = [](double t) { return 1.0 + 0.1 * t; };
    KelvinParams kp{Pole::north, pi / 3, 3};
    double prev = 1e300;
    for (int K : {16, 32, 64}) {
      const double r = conformal_invariance_residual(f, kp, GegenbauerBasis::build(3, K), 1.0).residual;
      CHECK(r < prev);
      prev = r;
    }
  }
  SUBCASE("residual does not grow with K") {
    auto f = [](double t) { return 1.0 / (1.6 - t); };
    KelvinParams kp{Pole::north, 1.0, 3};
    auto r8 = conformal_invariance_residual(f, kp, GegenbauerBasis::build(3, 16), 1.0).residual;
    auto r16 = conformal_invariance_residual(f, kp, GegenbauerBasis::build(3, 32), 1.0).residual;
    CHECK(r16 <= r8);
  }
  SUBCASE("unresolved profile") {
    auto b = GegenbauerBasis::build(3, 8);
    CHECK_THROWS_AS(conformal_invariance_residual([](double t) { return 1.0 / (1.05 - t); },
                                                  {Pole::north, 1.0, 3}, b),
                    ResolutionError);
  }
  SUBCASE("S^2 log form") {
    auto b2 = GegenbauerBasis::build(2, 64);
    for (double lam : {1.1, pi / 2, 2.2}) {
      auto rep = conformal_invariance_residual_s2([](double t) { return 0.2 * t - 0.1 * t * t; },
                                                  {Pole::north, lam, 2}, b2);
      CHECK(rep.residual < 1e-8);
    }
  }
}

TEST_CASE("stereographic transfer") {
  CHECK(stereographic_t(1.0) == 0.0);
  CHECK(stereographic_t(1e200) == doctest::Approx(1.0));
  for (double r : {0.01, 0.5, 2.0, 30.0}) CHECK(stereographic_r(stereographic_t(r)) == doctest::Approx(r).epsilon(1e-13));

  RadialProfile u;
  u.coordinate = Coordinate::euclidean_r;
  for (int i = 1; i <= 40; ++i) u.grid.push_back(0.05 * i * i);
  SUBCASE("xi maps to 1") {
    for (double r : u.grid) u.values.push_back(stereographic_factor(r, 5));
    auto v = stereographic_to_sphere(u, 5);
    for (double x : v.values) CHECK(x == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("n = 3 bubble is constant on the sphere") {
    for (double r : u.grid) u.values.push_back(std::pow(3.0, 0.25) / std::sqrt(1.0 + r * r));
    auto v = stereographic_to_sphere(u, 3);
    for (double x : v.values) CHECK(x == doctest::Approx(0.9306048591020996).epsilon(1e-14));
    auto back = stereographic_to_plane(v, 3);
    for (std::size_t i = 0; i < u.size(); ++i) {
      CHECK(back.grid[i] == doctest::Approx(u.grid[i]).epsilon(1e-12));
      CHECK(back.values[i] == doctest::Approx(u.values[i]).epsilon(1e-12));
    }
  }
  SUBCASE("nonpositive data") {
    for (double r : u.grid) u.values.push_back(1.0 - r);
    CHECK_THROWS_AS(stereographic_to_sphere(u, 3), DomainError);
  }
}

TEST_CASE("Matukuma nonlinearity") {
  for (double t : {-1.0, -0.2, 0.6, 1.0}) CHECK(matukuma_g(t, 2.0, 3, 3.0) == doctest::Approx(4.0));
  CHECK(matukuma_g(0.0, 3.0, 3, 1.0) == doctest::Approx(1.5));
  CHECK(matukuma_g(0.5, 0.0, 4, 1.5) == 0.0);
  CHECK(matukuma_exponent(4, 2.0) == 0.0);
  CHECK(matukuma_exponent(3, 1.0) == -1.0);
  CHECK_THROWS_AS(matukuma_g(1.0, 1.0, 3, 1.0), DomainError);
  CHECK(matukuma_g(0.5, 1.0, 3, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("mean field substitution") {
  auto m0 = meanfield_substitution(0.0, 0.0);
  CHECK(m0.f == 1.0);
  for (double t : {-1.0, 0.0, 1.0}) CHECK(m0.K(t) == 1.0);
  CHECK(std::abs(meanfield_substitution(8.0 * pi, 0.0).f) < 1e-15);
  auto m = meanfield_substitution(4.0 * pi, 1.0);
  CHECK(m.f == doctest::Approx(0.5));
  // theta = s is the axis point with theta_3 = -1
  CHECK(m.K(-1.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(m.K(1.0) == doctest::Approx(std::exp(1.0)));
  CHECK_THROWS_AS(meanfield_substitution(-1.0, 0.0), DomainError);
}
