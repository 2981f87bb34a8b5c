#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "cli.hpp"
#include "sphbif/axisym_spectral.hpp"
#include "sphbif/bifurcation_engine.hpp"
#include "sphbif/errors.hpp"
#include "sphbif/ode_shooting.hpp"
#include "sphbif/sphere_geometry.hpp"
#include "sphbif/symmetry_verifier.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

py::object to_py(const json& j) {
  switch (j.type()) {
    case json::value_t::null:
      return py::none();
    case json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case json::value_t::number_integer:
      return py::int_(j.get<long long>());
    case json::value_t::number_unsigned:
      return py::int_(j.get<unsigned long long>());
    case json::value_t::number_float:
      return py::float_(j.get<double>());
    case json::value_t::string:
      return py::str(j.get<std::string>());
    case json::value_t::array: {
      py::list l;
      for (const auto& x : j) l.append(to_py(x));
      return l;
    }
    case json::value_t::object: {
      py::dict d;
      for (const auto& [k, v] : j.items()) d[py::str(k)] = to_py(v);
      return d;
    }
    default:
      return py::none();
  }
}

sphbif::Pole pole_from(const std::string& s) {
  if (s == "north") return sphbif::Pole::north;
  if (s == "south") return sphbif::Pole::south;
  throw sphbif::DomainError("pole must be 'north' or 'south'");
}

py::dict profile_dict(const sphbif::AxisymFn& w, int m = 201) {
  py::list t, v;
  for (int i = 0; i < m; ++i) {
    const double x = -1.0 + 2.0 * i / (m - 1);
    t.append(x);
    v.append(w(x));
  }
  py::dict d;
  d["t"] = t;
  d["w"] = v;
  return d;
}

py::dict point_dict(const sphbif::BranchPoint& pt, double p) {
  py::dict d;
  d["lambda"] = pt.lambda;
  d["nodal_class"] = pt.nodal_class();
  d["residual_norm"] = pt.residual_norm;
  d["sup_norm"] = pt.sup_norm();
  d["validation"] = to_py(sphbif::validate_solution(pt, p).to_json());
  d["profile"] = profile_dict(pt.w);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral bifurcation, shooting and moving-sphere checks on spheres";

  auto base = py::register_exception<sphbif::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<sphbif::DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<sphbif::LengthMismatch>(m, "LengthMismatch", PyExc_ValueError);
  py::register_exception<sphbif::NumericalError>(m, "NumericalError", base.ptr());

  m.def("version", &sphbif::cli::tool_version);

  m.def("eigenvalues", [](int N, int K) {
    auto b = sphbif::GegenbauerBasis::build(N, K);
    const auto e = b->eigenvalues();
    return std::vector<double>(e.begin(), e.end());
  }, py::arg("N"), py::arg("K"));

  m.def("nodal_zeros", [](int N, int k, int K) {
    auto b = sphbif::GegenbauerBasis::build(N, K);
    return sphbif::count_nodal_class(sphbif::AxisymFn::mode(b, k)).zero_locations;
  }, py::arg("N"), py::arg("k"), py::arg("K") = 32);

  m.def("critical_exponent", &sphbif::critical_exponent, py::arg("N"));
  m.def("bifurcation_points", &sphbif::bifurcation_points, py::arg("N"), py::arg("p"), py::arg("k_max"));

  m.def("solve_class", [](int N, double p, int k, double lam, int K, double amplitude) {
    auto basis = sphbif::GegenbauerBasis::build(N, K);
    const double lk = sphbif::bifurcation_point(N, p, k);
    if (!(lam > lk)) throw sphbif::DomainError("lambda must exceed lambda_k");
    const double delta = std::min(sphbif::default_switch_offset(N, p, k), 0.5 * (lam - lk));
    const auto start = sphbif::branch_switch(k, basis, {N, p, lk + delta}, amplitude);
    const auto br = sphbif::continue_branch(start, k, p, lam);
    py::dict d = point_dict(br.points.back(), p);
    d["branch"] = to_py(br.summary());
    py::list lams, norms;
    for (const auto& q : br.points) {
      lams.append(q.lambda);
      norms.append(q.sup_norm());
    }
    d["branch_lambda"] = lams;
    d["branch_sup_norm"] = norms;
    return d;
  }, py::arg("N"), py::arg("p"), py::arg("k"), py::arg("lam"), py::arg("K") = 32, py::arg("amplitude") = 0.1);

  m.def("uniqueness_probe", [](int N, double p, double lam, std::uint64_t seed, int starts, int K) {
    auto basis = sphbif::GegenbauerBasis::build(N, K);
    return to_py(sphbif::uniqueness_probe(basis, {N, p, lam}, seed, starts).to_json());
  }, py::arg("N"), py::arg("p"), py::arg("lam"), py::arg("seed") = 42, py::arg("starts") = 50, py::arg("K") = 32);

  m.def("veron", [](int n, double c, int K, std::uint64_t seed) {
    const auto map = sphbif::veron_mapping(n, c);
    auto basis = sphbif::GegenbauerBasis::build(map.N, K);
    return to_py(sphbif::veron_nonradial(n, c, basis, seed).to_json());
  }, py::arg("n"), py::arg("c"), py::arg("K") = 48, py::arg("seed") = 42);

  m.def("shoot", [](int n, double a, double b, std::optional<double> c, std::optional<double> beta, double T,
                    double rtol, double atol, double dt) {
    if (c && beta) throw sphbif::DomainError("give either c or beta");
    auto prm = beta ? sphbif::ShootParams::beta_family(n, *beta, a, b, T)
                    : sphbif::ShootParams::autonomous(n, c.value_or(0.0), a, b, T);
    prm.rtol = rtol;
    prm.atol = atol;
    prm.sample_dt = dt;
    const auto tr = sphbif::integrate(prm);
    py::dict d = to_py(tr.summary());
    py::list t, w, wp, h;
    for (const auto& s : tr.samples) {
      t.append(s.t);
      w.append(s.w);
      wp.append(s.wp);
      h.append(s.h);
    }
    d["t"] = t;
    d["w"] = w;
    d["wprime"] = wp;
    d["h"] = h;
    const auto mon = sphbif::energy_estimate_monitor(tr);
    d["energy_max_violation"] = mon.max_violation;
    d["energy_bound"] = mon.bound;
    return d;
  }, py::arg("n"), py::arg("a"), py::arg("b") = 0.0, py::kw_only(), py::arg("c") = py::none(),
     py::arg("beta") = py::none(), py::arg("T") = 30.0, py::arg("rtol") = 1e-10, py::arg("atol") = 1e-12,
     py::arg("dt") = 0.05);

  m.def("energy_h", &sphbif::energy_h, py::arg("a"), py::arg("b"), py::arg("n"));
  m.def("shooting_condition", [](double a, double b, int n, double beta) {
    const auto s = sphbif::check_shooting_condition(a, b, n, beta);
    return py::make_tuple(s.holds, s.value);
  }, py::arg("a"), py::arg("b"), py::arg("n"), py::arg("beta"));
  m.def("decay_constant", &sphbif::decay_constant, py::arg("n"));
  m.def("beta0", &sphbif::beta0, py::arg("n"));
  m.def("periodic_sweep", [](int n, double c, int levels) { return to_py(sphbif::periodic_sweep(n, c, levels).to_json()); },
        py::arg("n"), py::arg("c"), py::arg("levels") = 24);
  m.def("nonexistence_sweep", [](int n, std::optional<double> c, std::optional<double> beta, int grid,
                                 std::uint64_t seed, double T, int threads) {
    auto prm = beta ? sphbif::ShootParams::beta_family(n, *beta, 1.0, 0.0, T)
                    : sphbif::ShootParams::autonomous(n, c.value_or(0.0), 1.0, 0.0, T);
    py::gil_scoped_release nogil;
    const auto r = sphbif::nonexistence_sweep(prm, grid, seed, threads);
    py::gil_scoped_acquire gil;
    return to_py(r.to_json());
  }, py::arg("n"), py::kw_only(), py::arg("c") = py::none(), py::arg("beta") = py::none(), py::arg("grid") = 20,
     py::arg("seed") = 42, py::arg("T") = 30.0, py::arg("threads") = 1);

  m.def("kelvin_value", [](const std::function<double(double)>& v, const std::string& pole, double lam, int n,
                           double t) { return sphbif::kelvin_value(v, {pole_from(pole), lam, n}, t); },
        py::arg("v"), py::arg("pole"), py::arg("lam"), py::arg("n"), py::arg("t"));
  m.def("kelvin_rn", [](const std::function<double(double)>& u, const std::vector<double>& y, double lam,
                        const std::vector<double>& x) { return sphbif::kelvin_rn(u, y, lam, x); },
        py::arg("u"), py::arg("y"), py::arg("lam"), py::arg("x"));
  m.def("moving_sphere_check_rn", [](const std::function<double(double)>& u, int n, std::size_t budget,
                                     std::uint64_t seed) {
    return to_py(sphbif::moving_sphere_check_rn(u, n, budget, seed).to_json());
  }, py::arg("u"), py::arg("n"), py::arg("budget") = 10000, py::arg("seed") = 42);
  m.def("condition_A_check", [](double c, int n, std::size_t budget, std::uint64_t seed) {
    return to_py(sphbif::condition_A_check(c, n, budget, seed).to_json());
  }, py::arg("c"), py::arg("n"), py::arg("budget") = 100000, py::arg("seed") = 42);
  m.def("g_condition_check", [](const std::string& family, int n, double param, const std::vector<std::string>& conds) {
    sphbif::GFamily g;
    if (family == "matukuma") g = sphbif::GFamily::matukuma(n, param);
    else if (family == "power_linear") g = sphbif::GFamily::power_linear(n, param);
    else throw sphbif::DomainError("family must be 'matukuma' or 'power_linear'");
    return to_py(sphbif::g_condition_check(g, conds).to_json());
  }, py::arg("family"), py::arg("n"), py::arg("param"), py::arg("conditions"));

  m.def("verify", [](const std::string& suite, std::uint64_t seed, std::size_t budget) {
    sphbif::cli::SuiteOptions so;
    so.seed = seed;
    so.budget = budget;
    std::vector<std::string> files;
    return to_py(sphbif::cli::run_suite(suite, so, {}, files));
  }, py::arg("suite") = "all", py::arg("seed") = 42, py::arg("budget") = 10000);

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = sphbif::cli::run(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
