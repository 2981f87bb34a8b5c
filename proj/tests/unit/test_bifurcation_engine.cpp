#include <doctest.h>

#include <cmath>
#include <random>

#include "sphbif/bifurcation_engine.hpp"
#include "sphbif/errors.hpp"

using namespace sphbif;

namespace {

AxisymFn random_small(const BasisPtr& b, std::uint64_t seed, double amp) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> c(b->modes(), 0.0);
  for (int k = 0; k < 10; ++k) c[k] = g(rng) / (1.0 + k * k);
  auto w = AxisymFn::from_coeffs(b, c);
  return w * (amp / w.sup_norm());
}

Eigen::VectorXd as_vec(const AxisymFn& f) {
  const auto c = f.coeffs();
  return Eigen::Map<const Eigen::VectorXd>(c.data(), Eigen::Index(c.size()));
}

}  // namespace

TEST_CASE("nonlinear remainder") {
  for (double p : {2.0, 3.0, 1.7, 4.5}) {
    for (double w : {-0.9, -0.2, -1e-4, 0.0, 1e-6, 0.1, 0.24, 0.26, 2.0}) {
      const double direct = std::pow(1.0 + w, p) - p * w - 1.0;
      const double r = nonlinear_remainder(w, p);
      CHECK(std::abs(r - direct) < 1e-14 * std::max(1.0, std::abs(direct)));
      // small w: agrees with the quadratic term to relative O(w)
      if (w != 0.0 && std::abs(w) < 1e-3) CHECK(r / (0.5 * p * (p - 1.0) * w * w) == doctest::Approx(1.0).epsilon(1e-2));
      const double d = nonlinear_remainder_derivative(w, p);
      CHECK(std::abs(d - p * (std::pow(1.0 + w, p - 1.0) - 1.0)) < 1e-13 * std::max(1.0, std::abs(d)));
    }
  }
  CHECK(nonlinear_remainder(0.0, 3.0) == 0.0);
  CHECK(nonlinear_remainder(1e-8, 3.0) == doctest::Approx(3e-16).epsilon(1e-7));
}

TEST_CASE("problem parameters") {
  CHECK(critical_exponent(3) == 5.0);
  CHECK(std::isinf(critical_exponent(2)));
  CHECK_NOTHROW(ProblemParams{2, 3.0, 1.0}.validate());
  CHECK_THROWS_AS((ProblemParams{3, 5.0, 1.0}.validate()), DomainError);
  CHECK_THROWS_AS((ProblemParams{2, 1.0, 1.0}.validate()), DomainError);
  CHECK_THROWS_AS((ProblemParams{2, 3.0, 0.0}.validate()), DomainError);
  CHECK_THROWS_AS((ProblemParams{1, 3.0, 1.0}.validate()), DomainError);
}

TEST_CASE("residual basics") {
  auto b = GegenbauerBasis::build(2, 24);
  ProblemParams pr{2, 3.0, 1.0};
  CHECK(residual(AxisymFn::constant(b, 0.0), pr).sup_norm() == 0.0);
  // w = 1: -lambda (8 - 3 - 1) = -4 lambda... with p w term: (2)^3 - 3 - 1 = 4, minus (p-1) w = 2 -> -6
  auto r = residual(AxisymFn::constant(b, 1.0), pr);
  CHECK(r.max_value() == doctest::Approx(-6.0).epsilon(1e-13));
  CHECK(r.min_value() == doctest::Approx(-6.0).epsilon(1e-13));
  CHECK_THROWS_AS(residual(AxisymFn::constant(b, -1.5), pr), ConstraintViolation);
  CHECK_THROWS_AS(residual(AxisymFn::constant(b, 0.0), ProblemParams{3, 3.0, 1.0}), DomainError);
}

TEST_CASE("Jacobian matches finite differences") {
  for (int N : {2, 3, 4}) {
    auto b = GegenbauerBasis::build(N, 20);
    const double p = N == 2 ? 3.0 : 0.5 * (1.0 + critical_exponent(N));
    ProblemParams pr{N, p, 2.3};
    auto w = random_small(b, 100 + N, 0.4);
    const Eigen::MatrixXd J = jacobian(w, pr);
    const double eps = 1e-6;
    for (int k = 0; k < 20; k += 3) {
      std::vector<double> cp(w.coeffs().begin(), w.coeffs().end()), cm = cp;
      cp[k] += eps;
      cm[k] -= eps;
      const Eigen::VectorXd fd = (as_vec(residual(AxisymFn::from_coeffs(b, cp), pr)) -
                                  as_vec(residual(AxisymFn::from_coeffs(b, cm), pr))) /
                                 (2.0 * eps);
      CHECK((fd - J.col(k)).norm() < 1e-6 * std::max(1.0, J.col(k).norm()));
    }
    // lambda derivative
    const Eigen::VectorXd Fl = lambda_derivative(w, pr);
    ProblemParams hi = pr, lo = pr;
    hi.lambda += eps;
    lo.lambda -= eps;
    const Eigen::VectorXd fdl = (as_vec(residual(w, hi)) - as_vec(residual(w, lo))) / (2.0 * eps);
    CHECK((fdl - Fl).norm() < 1e-6 * std::max(1.0, Fl.norm()));
  }
}

TEST_CASE("bifurcation points") {
  const auto pts = bifurcation_points(2, 3.0, 3);
  REQUIRE(pts.size() == 3);
  CHECK(pts[0] == 1.0);
  CHECK(pts[1] == 3.0);
  CHECK(pts[2] == 6.0);
  CHECK(bifurcation_point(3, 3.0, 1) == 1.5);
  CHECK(default_switch_offset(2, 3.0, 1) == doctest::Approx(0.02));
  // operator form: mu_k = 1 + nu_k at lambda_k
  for (int k = 1; k < 6; ++k) CHECK(operator_form_mu(bifurcation_point(2, 3.0, k), 3.0) == doctest::Approx(1.0 + k * (k + 1)));
}

TEST_CASE("operator form vanishes with the PDE residual") {
  auto b = GegenbauerBasis::build(2, 48);
  const auto st = branch_switch(1, b, ProblemParams{2, 3.0, 1.2}, 0.1);
  const double mu = operator_form_mu(1.2, 3.0);
  CHECK(residual_operator_form(st.w, mu, 3.0).sup_norm() < 1e-10);
  // linear part: mu_k phi_k is annihilated to first order
  auto phi = AxisymFn::mode(b, 2) * 1e-7;
  const auto f = residual_operator_form(phi, 1.0 + b->eigenvalues()[2], 3.0);
  CHECK(f.sup_norm() < 1e-12);
}

TEST_CASE("class-1 solution near lambda_1") {
  auto b = GegenbauerBasis::build(2, 48);
  const auto pt = branch_switch(1, b, ProblemParams{2, 3.0, 1.2}, 0.1);
  CHECK(pt.nodal_class() == 1);
  CHECK(pt.residual_norm < 1e-10);
  CHECK(pt.bounds_ok);
  const auto rep = validate_solution(pt, 3.0);
  CHECK(rep.passed());
  CHECK(rep.v_max >= std::sqrt(1.2));
  CHECK(rep.max_point_bound == doctest::Approx(std::sqrt(1.2)));
  // the reflected solution is also a solution
  auto refl = BranchPoint{};
  refl.lambda = 1.2;
  refl.w = pt.w.reflected();
  CHECK(residual(refl.w, ProblemParams{2, 3.0, 1.2}).sup_norm() < 1e-9);
  const auto neg = branch_switch(1, b, ProblemParams{2, 3.0, 1.2}, -0.1);
  CHECK(neg.nodal_class() == 1);
  CHECK((as_vec(neg.w) - as_vec(pt.w.reflected())).norm() < 1e-8);
}

TEST_CASE("branch switching arguments") {
  auto b = GegenbauerBasis::build(2, 32);
  CHECK_THROWS_AS(branch_switch(1, b, ProblemParams{2, 3.0, 1.2}, 0.0), DomainError);
  CHECK_THROWS_AS(branch_switch(0, b, ProblemParams{2, 3.0, 1.2}, 0.1), DomainError);
  CHECK_THROWS_AS(branch_switch(40, b, ProblemParams{2, 3.0, 1.2}, 0.1), DomainError);
  const auto pt = branch_switch(2, b, ProblemParams{2, 3.0, 3.1}, 0.1);
  CHECK(pt.nodal_class() == 2);
}

TEST_CASE("continuation keeps the nodal class") {
  auto b = GegenbauerBasis::build(2, 64);
  const double p = 3.0;
  const auto start = branch_switch(1, b, ProblemParams{2, p, 1.02}, 0.1);
  const auto br = continue_branch(start, 1, p, 6.0);
  CHECK(br.stop == StopReason::reached_target);
  REQUIRE(br.points.size() > 2);
  CHECK(br.points.back().lambda == 6.0);
  for (const auto& pt : br.points) CHECK(pt.nodal_class() == 1);
  CHECK(br.points.back().residual_norm < 1e-10);
  CHECK(br.lambda_max == 6.0);
  CHECK(br.summary()["stop_reason"] == "reached_target");

  const auto back = continue_branch(start, 1, p, 0.5);
  CHECK(back.stop == StopReason::target_not_ahead);
  CHECK(back.points.size() == 1);
}

TEST_CASE("validation flags bad profiles") {
  auto b = GegenbauerBasis::build(2, 16);
  BranchPoint pt;
  pt.lambda = 2.0;
  std::vector<double> vals;
  for (double t : b->nodes()) vals.push_back(0.5 * (1.0 - t));
  pt.w = AxisymFn::from_node_values(b, vals);
  const auto rep = validate_solution(pt, 3.0);
  CHECK_FALSE(rep.nodal_ok);
  CHECK_FALSE(rep.passed());

  pt.w = AxisymFn::constant(b, -0.5);
  const auto low = validate_solution(pt, 3.0);
  CHECK(low.constant);
  CHECK_FALSE(low.max_point_ok);
  CHECK(low.to_json()["passed"] == false);
}

TEST_CASE("Newton failures") {
  auto b = GegenbauerBasis::build(2, 16);
  SolverOptions o;
  o.max_iter = 1;
  CHECK_THROWS_AS(newton_solve(random_small(b, 5, 0.6), ProblemParams{2, 3.0, 4.0}, o), NoConvergence);
  CHECK_THROWS_AS(newton_solve(AxisymFn::constant(b, -2.0), ProblemParams{2, 3.0, 4.0}), ConstraintViolation);
}

TEST_CASE("multistart probe below lambda_1") {
  auto b = GegenbauerBasis::build(2, 32);
  const auto rep = uniqueness_probe(b, ProblemParams{2, 3.0, 0.9}, 11, 12);
  CHECK(rep.starts == 12);
  CHECK(rep.to_zero == 12);
  CHECK(rep.max_final_norm < 1e-8);
  const auto again = uniqueness_probe(b, ProblemParams{2, 3.0, 0.9}, 11, 12);
  CHECK(again.final_norms == rep.final_norms);
  CHECK_THROWS_AS(uniqueness_probe(b, ProblemParams{2, 3.0, 0.9}, 1, 3, 0.5, 0.1), DomainError);
}

TEST_CASE("sphere reduction of the radial problem") {
  const auto m = veron_mapping(4, -1.0);
  CHECK(m.N == 3);
  CHECK(m.p == 3.0);
  CHECK(m.lambda == 2.0);
  CHECK(m.threshold == 1.5);
  CHECK(m.c_threshold == -0.5);
  // c at the threshold maps onto lambda at the threshold
  for (int n = 3; n <= 8; ++n) {
    const auto t = veron_mapping(n, -(n - 2) / 4.0);
    CHECK(std::abs(t.lambda - t.threshold) < 1e-15 * t.threshold);
    CHECK(std::abs(t.threshold - t.N / (t.p - 1.0)) < 1e-15 * t.threshold);
  }
  CHECK_THROWS_AS(veron_mapping(2, 0.0), DomainError);

  auto b = GegenbauerBasis::build(3, 48);
  const auto s = veron_nonradial(4, -1.0, b, 3);
  CHECK(s.expected_nonconstant);
  REQUIRE(s.classes.size() == 1);
  CHECK(s.classes[0] == 1);
  const auto none = veron_nonradial(4, -0.4, b, 3);
  CHECK_FALSE(none.expected_nonconstant);
  CHECK(none.solutions.empty());
  CHECK(none.probe.to_nonconstant == 0);
}
