#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <vector>

#include "sphbif/csv.hpp"
#include "sphbif/errors.hpp"
#include "sphbif/symmetry_verifier.hpp"

using namespace sphbif;

namespace {

RadialFunction bubble(int n) {
  const double k = std::pow(double(n) * (n - 2), 0.25 * (n - 2));
  return [n, k](double r) { return k * std::pow(1.0 + r * r, -0.5 * (n - 2)); };
}

RadialFunction fundamental(int n) {
  return [n](double r) { return std::pow(r, 2.0 - n); };
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("kelvin_rn values") {
  const auto u = bubble(3);
  SUBCASE("sphere is fixed") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    for (int k = 0; k < 200; ++k) {
      std::vector<double> y{nd(rng), nd(rng), nd(rng)}, d{nd(rng), nd(rng), nd(rng)};
      const double lam = 0.1 + std::abs(nd(rng));
      const double dn = norm(d);
      std::vector<double> x(3);
      for (int i = 0; i < 3; ++i) x[i] = y[i] + lam * d[i] / dn;
      const double ux = u(norm(x));
      CHECK(std::abs(kelvin_rn(u, y, lam, x) - ux) <= 1e-12 * ux);
    }
  }
  SUBCASE("reflections about the origin") {
    for (int n : {3, 4, 5}) {
      const auto f = fundamental(n);
      const RadialFunction g = [n](double r) { return std::pow(r, -0.5 * (n - 2)); };
      std::mt19937_64 rng(n);
      std::normal_distribution<double> nd;
      const std::vector<double> y(std::size_t(n), 0.0);
      for (int k = 0; k < 200; ++k) {
        std::vector<double> x(static_cast<std::size_t>(n));
        for (auto& v : x) v = nd(rng);
        const double lam = 0.05 + 3.0 * std::abs(nd(rng));
        // |z|^{2-n} goes to the constant lambda^{2-n}; |z|^{-(n-2)/2} is fixed
        const double c = std::pow(lam, 2.0 - n);
        CHECK(std::abs(kelvin_rn(f, y, lam, x) - c) <= 1e-12 * c);
        const double gx = g(norm(x));
        CHECK(std::abs(kelvin_rn(g, y, lam, x) - gx) <= 1e-12 * gx);
      }
    }
  }
  SUBCASE("bubble comparison point") {
    const std::vector<double> y{2, 0, 0}, x{5, 0, 0};
    const double v = kelvin_rn(u, y, 1.0, x);
    // reflected point (2 + 1/3, 0, 0), factor 1/3
    CHECK(v == doctest::Approx(std::pow(3.0, 0.25) / 3.0 / std::sqrt(1.0 + 49.0 / 9.0)).epsilon(1e-14));
    CHECK(v < u(5.0));
  }
  SUBCASE("errors") {
    const std::vector<double> y{1, 0, 0}, x{1, 0, 0}, x2{2, 0, 0}, x4{1, 0}, y2{2, 0, 0}, x5{1.5, 0, 0};
    CHECK_THROWS_AS(kelvin_rn(u, y, 0.5, x), DomainError);
    CHECK_THROWS_AS(kelvin_rn(u, y, 0.0, x2), DomainError);
    CHECK_THROWS_AS(kelvin_rn(u, y, 0.5, x4), LengthMismatch);
    // y = (2,0,0), lambda = 1, x = (1.5,0,0): image is the origin
    CHECK_THROWS_AS(kelvin_rn(u, y2, 1.0, x5), DomainError);
  }
}

TEST_CASE("moving sphere check in R^n") {
  SUBCASE("bubble passes") {
    for (int n : {3, 4, 5}) {
      const auto rep = moving_sphere_check_rn(bubble(n), n, 10000, 11);
      CHECK(rep.samples_tested == 10000);
      CHECK(rep.pass);
      CHECK(rep.max_deficit < 1e-10);
      CHECK(rep.violations.empty());
    }
  }
  SUBCASE("fundamental solution") {
    const auto rep = moving_sphere_check_rn(fundamental(3), 3, 5000, 5);
    CHECK(rep.pass);
  }
  SUBCASE("increasing profile is caught") {
    const RadialFunction inc = [](double r) { return 1.0 + r; };
    const auto rep = moving_sphere_check_rn(inc, 3, 2000, 7);
    CHECK_FALSE(rep.pass);
    CHECK(rep.violation_count > 0);
    CHECK(rep.violations.size() <= 100);
    CHECK(rep.max_deficit > 1e-3);
    const auto& v = rep.violations.front();
    CHECK(v.deficit > rep.slack);
    CHECK(v.lambda < norm(v.center));
  }
  SUBCASE("deterministic and independent of threads") {
    RnSampling one, four;
    four.threads = 4;
    const RadialFunction inc = [](double r) { return 1.0 + r * r; };
    const auto a = moving_sphere_check_rn(inc, 4, 3000, 99, one);
    const auto b = moving_sphere_check_rn(inc, 4, 3000, 99, four);
    CHECK(a.to_json() == b.to_json());
    const auto c = moving_sphere_check_rn(inc, 4, 3000, 100, one);
    CHECK(a.to_json() != c.to_json());
  }
  SUBCASE("violations csv") {
    const RadialFunction inc = [](double r) { return 1.0 + r; };
    auto rep = moving_sphere_check_rn(inc, 3, 200, 1);
    CHECK(rep.dimension == 3);
    const auto path = std::filesystem::temp_directory_path() / "sphbif_violations_test.csv";
    rep.write_violations_csv(path);
    const auto t = io::read_csv(path);
    CHECK(t.header.size() == 8);
    CHECK(t.rows.size() == rep.violations.size());
    std::filesystem::remove(path);
  }
}

TEST_CASE("condition A") {
  SUBCASE("worked example") {
    const std::vector<double> x{1, 0, 0}, z{0, 2, 0};
    CHECK(condition_A_direct(x, z, 0.5) == doctest::Approx(0.3125 - 16.25).epsilon(1e-15));
    CHECK(condition_A_factored(x, z, 0.5) == doctest::Approx(-15.9375).epsilon(1e-15));
  }
  SUBCASE("sweep") {
    const auto rep = condition_A_check(1.0, 3, 100000, 2024);
    CHECK(rep.comparison.samples_tested == 100000);
    CHECK(rep.comparison.violation_count == 0);
    CHECK(rep.comparison.max_deficit < 0.0);
    CHECK(rep.max_factorization_error < 1e-12);
    CHECK(rep.pass());
    for (int n : {4, 6}) CHECK(condition_A_check(2.5, n, 20000, 1).pass());
  }
  SUBCASE("threads") {
    const auto a = condition_A_check(1.0, 3, 5000, 8, 1e-10, 1);
    const auto b = condition_A_check(1.0, 3, 5000, 8, 1e-10, 3);
    CHECK(a.to_json() == b.to_json());
  }
  CHECK_THROWS_AS(condition_A_check(0.0, 3, 10, 1), DomainError);
  CHECK_THROWS_AS(condition_A_check(1.0, 2, 10, 1), DomainError);
}

TEST_CASE("moving sphere check on the sphere") {
  const double pi = std::numbers::pi;
  std::vector<double> grid;
  for (int i = 1; i <= 16; ++i) grid.push_back(0.5 * pi * i / 16.0);

  SUBCASE("constant") {
    for (Pole pole : {Pole::north, Pole::south}) {
      const auto rep = moving_sphere_check_sphere(AxisFunction([](double) { return 2.0; }), 3, pole, grid);
      CHECK(rep.pass);
      CHECK(rep.samples_tested == grid.size() * 200);
    }
    std::vector<double> below(grid.begin(), grid.end() - 1);
    const auto rep = moving_sphere_check_sphere(AxisFunction([](double) { return 2.0; }), 4, Pole::north, below);
    CHECK(rep.max_deficit < 0.0);
  }
  SUBCASE("constant as an expansion") {
    auto b = GegenbauerBasis::build(3, 16);
    const auto v = AxisymFn::constant(b, 1.5);
    CHECK(moving_sphere_check_sphere(v, 3, Pole::south, grid).pass);
  }
  SUBCASE("singular profile about the south pole") {
    for (int n : {3, 4, 5}) {
      const AxisFunction v = [n](double t) { return beta0_sphere_profile(t, n); };
      const auto rep = moving_sphere_check_sphere(v, n, Pole::south, grid);
      CHECK(rep.pass);
    }
  }
  SUBCASE("bump toward the pole is caught") {
    const AxisFunction v = [](double t) { return 1.0 + 50.0 * std::exp(-std::pow((t - 0.95) / 0.05, 2)); };
    const auto rep = moving_sphere_check_sphere(v, 3, Pole::north, grid);
    CHECK_FALSE(rep.pass);
    CHECK(rep.violation_count > 0);
  }
  SUBCASE("lambda range") {
    const std::vector<double> bad{2.0};
    CHECK_THROWS_AS(moving_sphere_check_sphere(AxisFunction([](double) { return 1.0; }), 3, Pole::north, bad),
                    DomainError);
  }
}

TEST_CASE("g conditions") {
  const std::vector<std::string> all{"g1", "g2", "g3", "g4", "g5", "g6", "g7", "g8"};
  SUBCASE("matukuma below the boundary exponent") {
    const auto r = g_condition_check(GFamily::matukuma(3, 2.0), all);
    CHECK(r.boundary_exponent == doctest::Approx(3.0));
    for (const char* c : {"g1", "g2", "g3", "g4", "g7", "g8"}) CHECK_MESSAGE(r.get(c).holds, c);
    CHECK(r.get("g2").strict);
    CHECK_FALSE(r.get("g5").holds);
  }
  SUBCASE("matukuma at the boundary exponent") {
    const auto r = g_condition_check(GFamily::matukuma(3, 3.0), all);
    CHECK_FALSE(r.get("g2").holds);
    CHECK(r.get("g5").holds);
    CHECK_FALSE(r.get("g5").strict);
    CHECK(r.get("g3").strict);
    CHECK(r.get("g6").holds);
    CHECK(r.get("g7").holds);
    CHECK(r.get("g8").holds);
  }
  SUBCASE("matukuma n = 4 sweep over p") {
    for (double p : {0.0, 0.5, 1.0, 1.5, 1.9}) {
      const auto r = g_condition_check(GFamily::matukuma(4, p), {"g2", "g3", "g4"});
      for (const auto& c : r.results) CHECK(c.holds);
    }
    CHECK_FALSE(g_condition_check(GFamily::matukuma(4, 2.5), {"g2"}).get("g2").holds);
  }
  SUBCASE("power linear") {
    const auto r = g_condition_check(GFamily::power_linear(4, 1.0), {"g3", "g4", "g5", "g6"});
    CHECK(r.get("g3").strict);
    CHECK(r.get("g4").holds);
    CHECK(r.get("g5").holds);
    CHECK(r.get("g6").holds);
    const auto e = g_condition_check(GFamily::power_linear(4, 2.0), {"g3", "g6"});
    CHECK(e.get("g3").holds);
    CHECK_FALSE(e.get("g3").strict);
    CHECK_FALSE(e.get("g6").holds);
    CHECK_FALSE(g_condition_check(GFamily::power_linear(3, 1.0), {"g4"}).get("g4").holds);
  }
  SUBCASE("report") {
    const auto r = g_condition_check(GFamily::matukuma(3, 2.0), {"g2"});
    const auto j = r.to_json();
    CHECK(j["results"][0]["name"] == "g2");
    CHECK(j["family"] == "matukuma(n=3,p=2)");
    CHECK_THROWS_AS(r.get("g4"), DomainError);
    CHECK_THROWS_AS(g_condition_check(GFamily::matukuma(3, 2.0), {"g9"}), DomainError);
    CHECK_THROWS_AS(GFamily::matukuma(3, -1.0), DomainError);
  }
}
