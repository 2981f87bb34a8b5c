#include <algorithm>
#include <cmath>
#include <numbers>

#include "cli.hpp"
#include "sphbif/axisym_spectral.hpp"
#include "sphbif/csv.hpp"
#include "sphbif/bifurcation_engine.hpp"
#include "sphbif/errors.hpp"
#include "sphbif/ode_shooting.hpp"
#include "sphbif/sphere_geometry.hpp"
#include "sphbif/symmetry_verifier.hpp"

namespace sphbif::cli {

namespace {

using nlohmann::json;
constexpr double pi = std::numbers::pi;

class Checks {
 public:
  explicit Checks(std::string suite) : suite_(std::move(suite)) {}

  /// Non-gating checks are reported but do not affect pass.
  void add(const std::string& name, double value, double tol, bool ok, bool gating = true, const std::string& note = {}) {
    json c{{"name", name}, {"value", std::isfinite(value) ? json(value) : json(nullptr)}, {"tol", tol},
           {"pass", ok}, {"gating", gating}};
    if (!note.empty()) c["note"] = note;
    checks_.push_back(c);
    if (gating && !ok && first_.is_null()) first_ = c;
  }
  void fail(const std::string& name, const std::string& what) { add(name, NAN, 0.0, false, true, what); }

  json report() const {
    return {{"suite", suite_}, {"pass", first_.is_null()}, {"checks", checks_}, {"first_failure", first_}};
  }

 private:
  std::string suite_;
  json checks_ = json::array();
  json first_;
};

void spectral_suite(Checks& ck) {
  double worst = 0.0;
  bool nodal = true, interlace = true;
  for (int N = 2; N <= 5; ++N) {
    auto b = GegenbauerBasis::build(N, 24);
    std::vector<double> prev;
    for (int k = 0; k <= 10; ++k) {
      const auto f = AxisymFn::mode(b, k);
      const auto coll = collocation_neg_laplacian(f);
      const auto vals = f.node_values();
      const double nu = double(k) * (k + N - 1);
      double e = 0.0, s = 0.0;
      for (std::size_t j = 0; j < vals.size(); ++j) {
        e = std::max(e, std::abs(coll[j] - nu * vals[j]));
        s = std::max(s, std::abs(vals[j]));
      }
      worst = std::max(worst, e / (std::max(nu, 1.0) * s));
      if (k == 0) continue;
      NodalClass nc;
      if (!try_count_nodal_class(f, nc) || nc.k != k) {
        nodal = false;
        continue;
      }
      if (!prev.empty()) {
        for (std::size_t i = 0; i < prev.size(); ++i)
          interlace = interlace && nc.zero_locations[i] < prev[i] && prev[i] < nc.zero_locations[i + 1];
      }
      prev = nc.zero_locations;
    }
  }
  ck.add("eigen_exactness_rel_error", worst, 1e-10, worst < 1e-10);
  ck.add("nodal_class_equals_k", nodal ? 1.0 : 0.0, 0.0, nodal);
  ck.add("zeros_interlace", interlace ? 1.0 : 0.0, 0.0, interlace);
}

void kelvin_suite(Checks& ck) {
  const auto v = [](double t) { return 1.0 + 0.1 * t + 0.05 * t * t; };
  double worst = 0.0;
  bool ok = true;
  for (int n : {3, 4, 5})
    for (Pole pole : {Pole::north, Pole::south})
      for (double lam : {0.3, 1.0, pi / 3, pi / 2, 2.5}) {
        const auto r = kelvin_identity_report(n, pole, lam, v);
        worst = std::max(worst, r["max_error"].get<double>());
        ok = ok && r["pass"].get<bool>();
      }
  ck.add("reflection_identities", worst, 1e-12, ok);

  const auto f = [](double t) { return 1.0 + 0.1 * t; };
  const KelvinParams kp{Pole::north, pi / 3, 3};
  std::vector<double> res;
  for (int K : {16, 32, 64}) res.push_back(conformal_invariance_residual(f, kp, GegenbauerBasis::build(3, K), 1.0).residual);
  ck.add("conformal_invariance_K64", res[2], 1e-8, res[2] < 1e-8);
  ck.add("conformal_invariance_decreasing", res[0] - res[2], 0.0, res[0] > res[1] && res[1] > res[2]);
}

BranchPoint class_solution(int k, const BasisPtr& basis, double p, double lambda) {
  const int N = basis->dimension();
  const double lk = bifurcation_point(N, p, k);
  const double delta = std::min(default_switch_offset(N, p, k), 0.5 * (lambda - lk));
  const auto start = branch_switch(k, basis, {N, p, lk + delta}, 0.1);
  const auto br = continue_branch(start, k, p, lambda);
  if (br.stop != StopReason::reached_target)
    throw NoConvergence("continuation stopped: " + std::string(to_string(br.stop)));
  return br.points.back();
}

void bifurcation_suite(Checks& ck, const SuiteOptions& opts) {
  auto b = GegenbauerBasis::build(2, 32);
  for (int k : {1, 2}) {
    const std::string tag = "lambda4_class" + std::to_string(k);
    try {
      const auto pt = class_solution(k, b, 3.0, 4.0);
      const auto val = validate_solution(pt, 3.0);
      ck.add(tag + "_residual", pt.residual_norm, 1e-10, pt.residual_norm < 1e-10);
      ck.add(tag + "_nodal_class", pt.nodal_class(), k, pt.nodal_class() == k);
      ck.add(tag + "_validation", val.v_max, 2.0, val.passed() && val.v_max >= 2.0);
    } catch (const NumericalError& e) {
      ck.fail(tag, e.what());
    }
  }
  for (double lam : {0.5, 0.9, 1.0}) {
    const auto rep = uniqueness_probe(b, {2, 3.0, lam}, opts.seed);
    ck.add("multistart_lambda_" + io::format_double(lam), rep.max_final_norm, 1e-8,
           rep.to_zero == rep.starts && rep.max_final_norm < 1e-8);
  }
}

void shooting_suite(Checks& ck, const SuiteOptions& opts) {
  {
    const double a = std::pow(3.0, 0.25) / std::sqrt(2.0);
    auto prm = ShootParams::autonomous(3, 0.0, a, 0.0, 15.0);
    const auto tr = integrate(prm);
    double hmax = 0.0, err = 0.0, wmin = 1e300;
    for (const auto& s : tr.samples) {
      hmax = std::max(hmax, std::abs(hamiltonian_autonomous(s.w, s.wp, 3, 0.0)));
      err = std::max(err, std::abs(s.w - std::pow(3.0, 0.25) / std::sqrt(2.0 * std::cosh(s.t))));
      wmin = std::min(wmin, s.w);
    }
    ck.add("homoclinic_H", hmax, 1e-8, hmax < 1e-8);
    ck.add("homoclinic_pointwise", err, 1e-8, err < 1e-8 && wmin > 0.0);
  }
  {
    const auto cond = check_shooting_condition(0.8, 0.0, 4, 1.5);
    ck.add("shooting_condition_value", cond.value, 1e-9, std::abs(cond.value + 0.1152) < 1e-9 && cond.holds);
    const auto tr = integrate(ShootParams::beta_family(4, 1.5, 0.8, 0.0, 30.0));
    const auto mon = energy_estimate_monitor(tr);
    ck.add("beta_trajectory_positive", tr.min_w(), 0.0,
           tr.status == TrajectoryStatus::positive_on_interval && tr.min_w() > 0.0);
    ck.add("energy_estimate_violation", mon.max_violation, 1e-8, mon.max_violation < 1e-8);
  }
  {
    auto base = ShootParams::autonomous(3, 0.25, 1.0, 0.0, 1e4);
    const auto sw = nonexistence_sweep(base, 20, opts.seed, opts.threads);
    ck.add("hardy_sweep_cross_both", double(sw.points.size()), 400, sw.all_cross_both());
  }
  for (double beta : {0.0, -0.5}) {
    auto base = ShootParams::beta_family(4, beta, 1.0, 0.0, 30.0);
    const auto sw = nonexistence_sweep(base, 20, opts.seed, opts.threads);
    ck.add("beta_sweep_" + io::format_double(beta), double(sw.points.size()), 400, sw.all_cross_some_side() && sw.all_flux_ok());
  }
  {
    const auto ps = periodic_sweep(3, 0.1);
    const double target = std::pow(0.45, 0.25);
    ck.add("periodic_sup", ps.sup_w, 1e-6, std::abs(ps.sup_w - target) < 1e-6 && ps.all_periodic);
    ck.add("decay_constant_bound", ps.C_star, 0.0, ps.sup_w < ps.C_star);
  }
  for (int n : {3, 4, 5}) {
    const auto corr = singular_solution_residual(n, Beta0Amplitude::corrected);
    ck.add("beta0_residual_corrected_n" + std::to_string(n), corr.max_abs, 1e-8, corr.max_abs < 1e-8);
    const auto st = singular_solution_residual(n, Beta0Amplitude::as_stated);
    ck.add("beta0_residual_as_stated_n" + std::to_string(n), st.max_abs, 1e-8, st.max_abs < 1e-8, false,
           "stated amplitude carries an extra factor 2^{(n-2)/4}; reported only");
  }
}

void moving_sphere_suite(Checks& ck, const SuiteOptions& opts, const std::filesystem::path& out,
                         std::vector<std::string>& files) {
  const RadialFunction bubble = [](double r) { return std::pow(3.0, 0.25) / std::sqrt(1.0 + r * r); };
  RnSampling s;
  s.threads = opts.threads;
  const auto rep = moving_sphere_check_rn(bubble, 3, opts.budget, opts.seed, s);
  ck.add("bubble_rn", rep.max_deficit, rep.slack, rep.pass);
  if (!out.empty()) {
    rep.write_violations_csv(out / "moving_sphere_violations.csv");
    files.push_back("moving_sphere_violations.csv");
  }
  const RadialFunction inc = [](double r) { return 1.0 + r; };
  const auto neg = moving_sphere_check_rn(inc, 3, 1000, opts.seed, s);
  ck.add("increasing_profile_detected", double(neg.violation_count), 0.0, !neg.pass);

  std::vector<double> grid;
  for (int i = 1; i <= 16; ++i) grid.push_back(0.5 * pi * i / 16.0);
  for (int n : {3, 4, 5}) {
    const auto sp = moving_sphere_check_sphere([n](double t) { return beta0_sphere_profile(t, n); }, n, Pole::south,
                                               grid);
    ck.add("singular_profile_south_n" + std::to_string(n), sp.max_deficit, sp.slack, sp.pass);
  }
}

void condition_a_suite(Checks& ck, const SuiteOptions& opts, const std::filesystem::path& out,
                       std::vector<std::string>& files) {
  const auto rep = condition_A_check(1.0, 3, 10 * opts.budget, opts.seed, 1e-10, opts.threads);
  ck.add("condition_A_inequality", rep.comparison.max_deficit, rep.comparison.slack, rep.comparison.pass);
  ck.add("condition_A_factorization", rep.max_factorization_error, rep.factorization_tol, rep.factorization_ok);
  if (!out.empty()) {
    rep.comparison.write_violations_csv(out / "condition_a_violations.csv");
    files.push_back("condition_a_violations.csv");
  }
}

void g_suite(Checks& ck) {
  const auto m2 = g_condition_check(GFamily::matukuma(3, 2.0), {"g1", "g2", "g3", "g4"});
  bool ok = true;
  for (const auto& r : m2.results) ok = ok && r.holds;
  ck.add("matukuma_3_2_g1_to_g4", 2.0, m2.boundary_exponent, ok);
  const auto m3 = g_condition_check(GFamily::matukuma(3, 3.0), {"g1", "g2", "g3", "g5", "g6"});
  ck.add("matukuma_3_3_g5_g6_not_g2", 3.0, m3.boundary_exponent,
         !m3.get("g2").holds && m3.get("g5").holds && m3.get("g6").holds && m3.get("g3").holds);
  const auto pl = g_condition_check(GFamily::power_linear(4, 1.0), {"g3"});
  ck.add("power_linear_4_1_g3_strict", 1.0, 2.0, pl.get("g3").strict);
}

}  // namespace


const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"spectral",      "kelvin",      "bifurcation", "shooting",
                                              "moving-sphere", "condition-a", "g-conditions", "all"};
  return names;
}

json run_suite(const std::string& name, const SuiteOptions& opts, const std::filesystem::path& out_dir,
               std::vector<std::string>& files) {
  if (name == "all") {
    json suites = json::array();
    bool pass = true;
    json first;
    for (const auto& s : suite_names()) {
      if (s == "all") continue;
      auto r = run_suite(s, opts, out_dir, files);
      pass = pass && r["pass"].get<bool>();
      if (first.is_null() && !r["first_failure"].is_null()) first = r["first_failure"];
      suites.push_back(std::move(r));
    }
    return {{"suite", "all"}, {"pass", pass}, {"suites", suites}, {"first_failure", first}};
  }
  Checks ck(name);
  try {
    if (name == "spectral") spectral_suite(ck);
    else if (name == "kelvin") kelvin_suite(ck);
    else if (name == "bifurcation") bifurcation_suite(ck, opts);
    else if (name == "shooting") shooting_suite(ck, opts);
    else if (name == "moving-sphere") moving_sphere_suite(ck, opts, out_dir, files);
    else if (name == "condition-a") condition_a_suite(ck, opts, out_dir, files);
    else if (name == "g-conditions") g_suite(ck);
    else throw DomainError("unknown suite " + name);
  } catch (const NumericalError& e) {
    ck.fail("exception", e.what());
  }
  return ck.report();
}

json kelvin_identity_report(int n, Pole pole, double lambda, const std::function<double(double)>& v, double tol) {
  const KelvinParams kp{pole, lambda, n};
  kp.validate();
  double inv = 0.0, jac = 0.0, mirror = 0.0, twice = 0.0;
  const int m = 400;
  for (int i = 0; i < m; ++i) {
    const double r = 1e-3 + (pi - 2e-3) * (i + 0.5) / m;
    const double h = reflect_radius(lambda, r);
    inv = std::max(inv, std::abs(reflect_radius(lambda, h) - r));
    jac = std::max(jac, std::abs(jacobian_density(lambda, r, n) * jacobian_density(lambda, h, n) - 1.0));
    if (lambda == pi / 2) mirror = std::max(mirror, std::abs(h - (pi - r)));
    const double t = axis_coordinate(pole, r);
    const AxisFunction once = [&](double s) { return kelvin_value(v, kp, s); };
    const double back = kelvin_value(once, kp, t);
    twice = std::max(twice, std::abs(back - v(t)) / std::max(1.0, std::abs(v(t))));
  }
  const double fixed_r = std::abs(reflect_radius(lambda, lambda) - lambda);
  const double tl = axis_coordinate(pole, lambda);
  const double fixed_v = std::abs(kelvin_value(v, kp, tl) - v(tl)) / std::max(1.0, std::abs(v(tl)));
  const double worst = std::max({inv, jac, mirror, twice, fixed_r, fixed_v});
  return {{"n", n},
          {"pole", pole == Pole::north ? "north" : "south"},
          {"lambda", lambda},
          {"involution", inv},
          {"jacobian_product", jac},
          {"mirror", mirror},
          {"double_transform", twice},
          {"fixed_sphere_radius", fixed_r},
          {"fixed_sphere_value", fixed_v},
          {"max_error", worst},
          {"tol", tol},
          {"pass", worst < tol}};
}

}  // namespace sphbif::cli
