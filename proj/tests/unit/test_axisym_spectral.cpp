#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sphbif/axisym_spectral.hpp"
#include "sphbif/errors.hpp"

using namespace sphbif;

namespace {

// Normalized Legendre polynomial sqrt((2k+1)/2) P_k by the textbook recurrence.
double legendre_normalized(int k, double t) {
  double p0 = 1.0, p1 = t;
  if (k == 0) return std::sqrt(0.5);
  for (int j = 1; j < k; ++j) {
    const double p2 = ((2.0 * j + 1.0) * t * p1 - j * p0) / (j + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return std::sqrt((2.0 * k + 1.0) / 2.0) * p1;
}

// Gauss-Legendre nodes by Newton from Chebyshev guesses.
std::vector<double> legendre_roots(int m) {
  std::vector<double> x(m);
  for (int i = 0; i < m; ++i) {
    double t = -std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int j = 1; j < m; ++j) {
        const double p2 = ((2.0 * j + 1.0) * t * p1 - j * p0) / (j + 1.0);
        p0 = p1;
        p1 = p2;
      }
      const double dp = m * (t * p1 - p0) / (t * t - 1.0);
      const double step = p1 / dp;
      t -= step;
      if (std::abs(step) < 1e-16) break;
    }
    x[i] = t;
  }
  return x;
}

}  // namespace

TEST_CASE("eigenvalues are k(k+N-1)") {
  auto b2 = GegenbauerBasis::build(2, 6);
  const double e2[] = {0, 2, 6, 12, 20, 30};
  for (int k = 0; k < 6; ++k) CHECK(b2->eigenvalues()[k] == e2[k]);
  auto b3 = GegenbauerBasis::build(3, 4);
  const double e3[] = {0, 3, 8, 15};
  for (int k = 0; k < 4; ++k) CHECK(b3->eigenvalues()[k] == e3[k]);
}

TEST_CASE("N=2 nodes and basis match an independent Legendre computation") {
  auto b = GegenbauerBasis::build(2, 20, 40);
  const auto roots = legendre_roots(40);
  for (int j = 0; j < 40; ++j) CHECK(b->nodes()[j] == doctest::Approx(roots[j]).epsilon(1e-14));
  for (int k = 0; k < 20; ++k)
    for (int j = 0; j < 40; j += 7) CHECK(std::abs(b->basis(k, j) - legendre_normalized(k, roots[j])) < 1e-12);
}

TEST_CASE("N=3 basis is sqrt(2/pi) U_k") {
  auto b = GegenbauerBasis::build(3, 12);
  std::vector<double> v;
  for (double t : {-0.9, -0.3, 0.2, 0.77}) {
    b->basis_functions(t, 12, v);
    const double th = std::acos(t);
    for (int k = 0; k < 12; ++k) {
      const double u = std::sin((k + 1) * th) / std::sin(th);
      CHECK(std::abs(v[k] - std::sqrt(2.0 / std::numbers::pi) * u) < 1e-12);
    }
  }
}

TEST_CASE("discrete orthonormality for N = 2..6") {
  for (int N = 2; N <= 6; ++N) {
    auto b = GegenbauerBasis::build(N, 64);
    CHECK(b->orthonormality_defect() < 1e-12);
    CHECK(b->nodes_count() == 128);
    for (double w : b->weights()) CHECK(w > 0.0);
  }
}

TEST_CASE("build rejects bad sizes") {
  CHECK_THROWS_AS(GegenbauerBasis::build(1, 8), DomainError);
  CHECK_THROWS_AS(GegenbauerBasis::build(2, 1), DomainError);
  CHECK_THROWS_AS(GegenbauerBasis::build(2, 8, 4), DomainError);
}

TEST_CASE("analyze and synthesize") {
  auto b = GegenbauerBasis::build(3, 24);
  SUBCASE("constant has only mode 0") {
    auto c = AxisymFn::constant(b, 1.0);
    auto coeffs = b->analyze(c.node_values());
    CHECK(coeffs[0] == doctest::Approx(std::sqrt(b->weight_integral())));
    for (int k = 1; k < 24; ++k) CHECK(std::abs(coeffs[k]) < 1e-13);
  }
  SUBCASE("phi_3 gives a unit coefficient") {
    std::vector<double> vals(b->nodes_count());
    for (int j = 0; j < b->nodes_count(); ++j) vals[j] = b->basis(3, j);
    auto coeffs = b->analyze(vals);
    for (int k = 0; k < 24; ++k) CHECK(std::abs(coeffs[k] - (k == 3 ? 1.0 : 0.0)) < 1e-12);
  }
  SUBCASE("random round trip") {
    std::mt19937_64 rng(20240611);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> c(24);
      for (int k = 0; k < 24; ++k) c[k] = g(rng) * std::exp(-0.2 * k);
      auto back = b->analyze(b->synthesize(c));
      for (int k = 0; k < 24; ++k) CHECK(std::abs(back[k] - c[k]) < 1e-12);
    }
  }
  SUBCASE("length mismatch") {
    std::vector<double> wrong(5, 1.0);
    CHECK_THROWS_AS(b->analyze(wrong), LengthMismatch);
    CHECK_THROWS_AS(b->synthesize(wrong), LengthMismatch);
  }
}

TEST_CASE("negative Laplacian") {
  auto b = GegenbauerBasis::build(2, 16);
  SUBCASE("constant maps to zero") {
    auto f = apply_neg_laplacian(AxisymFn::constant(b, 3.0));
    CHECK(f.sup_norm() < 1e-14);
  }
  SUBCASE("t maps to 2t on S^2") {
    std::vector<double> vals(b->nodes().begin(), b->nodes().end());
    auto f = apply_neg_laplacian(AxisymFn::from_node_values(b, vals));
    for (double t : {-0.7, 0.1, 0.9}) CHECK(f(t) == doctest::Approx(2.0 * t).epsilon(1e-12));
  }
  SUBCASE("collocation reproduces the diagonal form") {
    for (int N = 2; N <= 5; ++N) {
      auto bn = GegenbauerBasis::build(N, 24);
      for (int k = 0; k < 24; ++k) {
        auto phi = AxisymFn::mode(bn, k);
        auto col = collocation_neg_laplacian(phi);
        const double scale = std::max(1.0, bn->eigenvalues()[k]) * phi.sup_norm();
        for (int j = 0; j < bn->nodes_count(); ++j)
          CHECK(std::abs(col[j] - bn->eigenvalues()[k] * phi.node_values()[j]) < 1e-10 * scale);
      }
    }
  }
}

TEST_CASE("evaluate") {
  auto b = GegenbauerBasis::build(4, 20);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> c(20);
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = u(rng) * std::pow(0.7, double(k));
  auto f = AxisymFn::from_coeffs(b, c);
  for (int j = 0; j < b->nodes_count(); ++j) CHECK(std::abs(f(b->nodes()[j]) - f.node_values()[j]) < 1e-13);
  auto k = AxisymFn::constant(b, 2.5);
  for (double t : {-1.0, -0.4, 0.0, 1.0}) CHECK(k(t) == doctest::Approx(2.5));
  auto phi1 = AxisymFn::mode(b, 1);
  CHECK(std::abs(phi1(1.0)) > 0.1);
  CHECK(std::abs(phi1(-1.0)) > 0.1);
  CHECK_THROWS_AS(f(1.5), DomainError);
}

TEST_CASE("reflection flips odd modes") {
  auto b = GegenbauerBasis::build(3, 10);
  std::vector<double> c{0.3, 1.0, -0.2, 0.5, 0, 0, 0, 0, 0, 0};
  auto f = AxisymFn::from_coeffs(b, c);
  auto g = f.reflected();
  for (double t : {-0.8, 0.1, 0.6}) CHECK(g(t) == doctest::Approx(f(-t)).epsilon(1e-13));
}

TEST_CASE("nodal class of basis functions") {
  for (int N = 2; N <= 5; ++N) {
    auto b = GegenbauerBasis::build(N, 16);
    std::vector<double> prev;
    for (int k = 1; k <= 10; ++k) {
      auto nc = count_nodal_class(AxisymFn::mode(b, k));
      CHECK(nc.k == k);
      for (bool s : nc.simple) CHECK(s);
      for (double z : nc.zero_locations) CHECK((z > -1.0 && z < 1.0));
      // zeros of phi_k and phi_{k-1} strictly interlace
      if (!prev.empty()) {
        REQUIRE(prev.size() + 1 == nc.zero_locations.size());
        for (std::size_t i = 0; i < prev.size(); ++i) {
          CHECK(nc.zero_locations[i] < prev[i]);
          CHECK(prev[i] < nc.zero_locations[i + 1]);
        }
      }
      prev = nc.zero_locations;
    }
  }
}

TEST_CASE("nodal class examples and failures") {
  auto b = GegenbauerBasis::build(2, 8);
  auto nc1 = count_nodal_class(AxisymFn::mode(b, 1));
  REQUIRE(nc1.k == 1);
  CHECK(std::abs(nc1.zero_locations[0]) < 1e-12);
  auto nc2 = count_nodal_class(AxisymFn::mode(b, 2));
  REQUIRE(nc2.k == 2);
  CHECK(nc2.zero_locations[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-12));
  CHECK(nc2.zero_locations[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));

  // (1 - t): zero at the endpoint
  std::vector<double> vals;
  for (double t : b->nodes()) vals.push_back(1.0 - t);
  CHECK_THROWS_AS(count_nodal_class(AxisymFn::from_node_values(b, vals)), EndpointZero);
  // triple zero: sign changes but the slope vanishes
  vals.clear();
  for (double t : b->nodes()) vals.push_back(std::pow(t - 0.3, 3));
  CHECK_THROWS_AS(count_nodal_class(AxisymFn::from_node_values(b, vals)), NonSimpleZero);
  NodalClass out;
  CHECK_FALSE(try_count_nodal_class(AxisymFn::from_node_values(b, vals), out));
}
