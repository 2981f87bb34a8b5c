#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <optional>
#include <type_traits>

#include <CLI11.hpp>

#include "sphbif/axisym_spectral.hpp"
#include "sphbif/bifurcation_engine.hpp"
#include "sphbif/csv.hpp"
#include "sphbif/errors.hpp"
#include "sphbif/ode_shooting.hpp"
#include "sphbif/profile.hpp"
#include "sphbif/sphere_geometry.hpp"

#ifndef SPHBIF_VERSION
#define SPHBIF_VERSION "0.0.0"
#endif

namespace sphbif::cli {

using nlohmann::json;

std::string tool_version() { return SPHBIF_VERSION; }

json RunManifest::to_json() const {
  return {{"command", command}, {"params", params},       {"seed", seed},          {"tolerances", tolerances},
          {"tool_version", tool_version}, {"outputs", outputs}, {"wall_time", wall_time}};
}

namespace {

/// Options of one subcommand that can also come from the config file.
class Binder {
 public:
  explicit Binder(CLI::App* app) : app_(app) {}

  template <class T>
  CLI::Option* opt(const std::string& name, T& ref, const std::string& desc) {
    auto* o = app_->add_option("--" + name, ref, desc)->capture_default_str();
    apply_.push_back([o, &ref, name](const json& c) {
      if (o->count() == 0 && c.contains(name)) ref = c.at(name).get<T>();
    });
    record_.push_back([&ref, name](json& j) { j[name] = ref; });
    return o;
  }

  CLI::Option* flag(const std::string& name, bool& ref, const std::string& desc) {
    auto* o = app_->add_flag("--" + name, ref, desc);
    apply_.push_back([o, &ref, name](const json& c) {
      if (o->count() == 0 && c.contains(name)) ref = c.at(name).get<bool>();
    });
    record_.push_back([&ref, name](json& j) { j[name] = ref; });
    return o;
  }

  /// Option recorded only when present, e.g. a family selector.
  CLI::Option* optional(const std::string& name, std::optional<double>& ref, const std::string& desc) {
    auto* o = app_->add_option("--" + name, ref, desc);
    apply_.push_back([o, &ref, name](const json& c) {
      if (o->count() == 0 && c.contains(name) && !c.at(name).is_null()) ref = c.at(name).get<double>();
    });
    record_.push_back([&ref, name](json& j) { j[name] = ref ? json(*ref) : json(nullptr); });
    return o;
  }

  void apply(const json& c) const {
    for (const auto& f : apply_) f(c);
  }
  json record() const {
    json j = json::object();
    for (const auto& f : record_) f(j);
    return j;
  }
  CLI::App* app() const { return app_; }

 private:
  CLI::App* app_;
  std::vector<std::function<void(const json&)>> apply_;
  std::vector<std::function<void(json&)>> record_;
};

struct Globals {
  std::uint64_t seed = 42;
  std::string out = "sphbif_out";
  std::string config;
  int threads = 1;
};

class Output {
 public:
  explicit Output(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

  std::filesystem::path file(const std::string& name) {
    if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
    return dir_ / name;
  }
  void add(const std::vector<std::string>& names) {
    for (const auto& n : names) file(n);
  }
  void json_file(const std::string& name, const json& j) { io::write_json(file(name), j); }

  void manifest(RunManifest m) {
    m.outputs = files_;
    std::sort(m.outputs.begin(), m.outputs.end());
    io::write_json(dir_ / "manifest.json", m.to_json());
  }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

struct Ctx {
  Globals g;
  json params;
  json tolerances = json::object();
  int exit = Exit::ok;
  std::ostream* out = nullptr;
};

Pole parse_pole(const std::string& s) {
  if (s == "north") return Pole::north;
  if (s == "south") return Pole::south;
  throw DomainError("pole must be north or south");
}

// ---------------------------------------------------------------- eig

struct EigArgs {
  int N = 2, K = 16, M = -1;
};

void cmd_eig(const EigArgs& a, Ctx& ctx, Output& out) {
  auto b = GegenbauerBasis::build(a.N, a.K, a.M);
  io::CsvWriter ev({"k", "nu", "nu_rayleigh", "collocation_rel_error", "nodal_class"});
  io::CsvWriter zs({"k", "index", "t", "slope"});
  double worst = 0.0;
  const auto w = b->weights();
  for (int k = 0; k < a.K; ++k) {
    const auto f = AxisymFn::mode(b, k);
    const auto coll = collocation_neg_laplacian(f);
    const auto vals = f.node_values();
    const double nu = b->eigenvalues()[k];
    double e = 0.0, s = 0.0, ray = 0.0;
    for (std::size_t j = 0; j < vals.size(); ++j) {
      e = std::max(e, std::abs(coll[j] - nu * vals[j]));
      s = std::max(s, std::abs(vals[j]));
      ray += w[j] * coll[j] * vals[j];
    }
    const double rel = e / (std::max(nu, 1.0) * s);
    worst = std::max(worst, rel);
    int cls = 0;
    if (k > 0) {
      NodalClass nc;
      cls = try_count_nodal_class(f, nc) ? nc.k : -1;
      for (std::size_t i = 0; i < nc.zero_locations.size(); ++i)
        zs.add_numeric_row({double(k), double(i), nc.zero_locations[i], nc.slopes[i]});
    }
    ev.add_numeric_row({double(k), nu, ray, rel, double(cls)});
  }
  ev.save(out.file("eigenvalues.csv"));
  zs.save(out.file("zeros.csv"));
  out.json_file("summary.json", {{"basis", b->describe()}, {"max_collocation_rel_error", worst}});
  *ctx.out << "eig: N=" << a.N << " K=" << a.K << " max collocation error " << worst << "\n";
}

// ---------------------------------------------------------------- branch

struct BranchArgs {
  int N = 2;
  double p = 3.0;
  int k = 1;
  double lambda_max = 6.0;
  int K = 32;
  double amplitude = 0.1;
  std::optional<double> offset;
  double ds = 0.05, ds_max = 0.5;
  int max_steps = 5000;
  double newton_tol = 1e-11;
};

void write_profile_table(const std::filesystem::path& path, const AxisymFn& w, double lambda, double p) {
  io::CsvWriter cw({"t", "w", "v"});
  const double scale = std::pow(lambda, 1.0 / (p - 1.0));
  const int m = 201;
  for (int i = 0; i < m; ++i) {
    const double t = -1.0 + 2.0 * i / (m - 1);
    const double wv = w(t);
    cw.add_numeric_row({t, wv, scale * (wv + 1.0)});
  }
  cw.save(path);
}

void cmd_branch(const BranchArgs& a, Ctx& ctx, Output& out) {
  if (a.k < 1) throw DomainError("k must be >= 1");
  const double lk = bifurcation_point(a.N, a.p, a.k);
  const double delta = a.offset ? *a.offset : default_switch_offset(a.N, a.p, a.k);
  ProblemParams prm{a.N, a.p, lk + delta};
  prm.validate();
  if (!(a.lambda_max > lk)) throw DomainError("lambda-max must exceed lambda_k = " + io::format_double(lk));
  auto basis = GegenbauerBasis::build(a.N, a.K);
  SolverOptions so;
  so.newton_tol = a.newton_tol;
  ContinuationOptions co;
  co.ds_init = a.ds;
  co.ds_max = a.ds_max;
  co.max_steps = a.max_steps;
  co.newton = so;
  ctx.tolerances = {{"newton_tol", so.newton_tol}, {"ds_min", co.ds_min}, {"positivity_floor", so.positivity_floor}};

  const auto start = branch_switch(a.k, basis, prm, a.amplitude, so);
  const auto br = continue_branch(start, a.k, a.p, a.lambda_max, co);

  io::CsvWriter cw({"index", "lambda", "sup_norm", "w_plus_1_min", "v_max", "nodal_class", "residual_norm"});
  for (std::size_t i = 0; i < br.points.size(); ++i) {
    const auto& q = br.points[i];
    const double vmax = std::pow(q.lambda, 1.0 / (a.p - 1.0)) * (q.w.max_value() + 1.0);
    cw.add_numeric_row({double(i), q.lambda, q.sup_norm(), q.min_w_plus_1, vmax, double(q.nodal_class()), q.residual_norm});
  }
  cw.save(out.file("branch.csv"));
  const auto& last = br.points.back();
  write_profile_table(out.file("solution.csv"), last.w, last.lambda, a.p);
  const auto val = validate_solution(last, a.p);
  out.json_file("summary.json", {{"lambda_k", lk}, {"branch", br.summary()}, {"final_validation", val.to_json()}});
  *ctx.out << "branch: k=" << a.k << " points=" << br.points.size() << " stop=" << to_string(br.stop)
           << " final lambda=" << last.lambda << " class=" << last.nodal_class() << "\n";
  if (br.stop != StopReason::reached_target) {
    ctx.exit = Exit::numerical_failure;
    *ctx.out << "branch did not reach lambda-max: " << br.message << "\n";
  } else if (!val.passed()) {
    ctx.exit = Exit::validation_failure;
  }
}

// ---------------------------------------------------------------- shoot

struct ShootArgs {
  int n = 3;
  double c = 0.0;
  std::optional<double> beta;
  double a = 1.0, b = 0.0, T = 30.0;
  double rtol = 1e-10, atol = 1e-12, dt = 0.05;
  bool grid = false;
  int grid_size = 20;
  bool periodic = false;
  int levels = 24;
};

void cmd_shoot(const ShootArgs& a, Ctx& ctx, Output& out) {
  ShootParams prm = a.beta ? ShootParams::beta_family(a.n, *a.beta, a.a, a.b, a.T)
                           : ShootParams::autonomous(a.n, a.c, a.a, a.b, a.T);
  prm.rtol = a.rtol;
  prm.atol = a.atol;
  prm.sample_dt = a.dt;
  prm.validate();
  ctx.tolerances = {{"rtol", prm.rtol}, {"atol", prm.atol}};
  ctx.params["family"] = std::string(to_string(prm.family));

  if (a.periodic) {
    if (a.beta) throw DomainError("--periodic needs the autonomous family");
    const auto ps = periodic_sweep(a.n, a.c, a.levels);
    io::CsvWriter cw({"a", "period", "w_max", "w_min", "return_mismatch", "periodic"});
    for (const auto& o : ps.orbits)
      cw.add_numeric_row({o.a, o.period, o.w_max, o.w_min, o.return_mismatch, o.periodic ? 1.0 : 0.0});
    cw.save(out.file("periodic.csv"));
    out.json_file("summary.json", ps.to_json());
    *ctx.out << "periodic: sup w=" << io::format_double(ps.sup_w) << " level-set bound="
             << io::format_double(ps.level_set_bound) << " C*=" << io::format_double(ps.C_star) << "\n";
    if (!ps.all_periodic) ctx.exit = Exit::validation_failure;
    return;
  }
  if (a.grid) {
    const auto sw = nonexistence_sweep(prm, a.grid_size, ctx.g.seed, ctx.g.threads);
    sw.write_csv(out.file("sweep.csv"));
    out.json_file("summary.json", sw.to_json());
    *ctx.out << "sweep: " << sw.points.size() << " starts, all cross both sides: " << sw.all_cross_both()
             << ", all cross some side: " << sw.all_cross_some_side() << ", flux ok: " << sw.all_flux_ok() << "\n";
    return;
  }
  const auto tr = integrate(prm);
  tr.write_csv(out.file("trajectory.csv"));
  tr.write_events_csv(out.file("events.csv"));
  json s = tr.summary();
  const auto mon = energy_estimate_monitor(tr);
  s["energy_monitor"] = {{"max_violation", mon.max_violation},
                         {"bound", mon.bound},
                         {"samples_checked", mon.samples_checked},
                         {"conservation_check", mon.conservation_check}};
  if (prm.family == Family::beta) {
    const auto cond = check_shooting_condition(a.a, a.b, a.n, *a.beta);
    s["shooting_condition"] = {{"value", cond.value}, {"holds", cond.holds}};
  } else {
    const auto cls = classify_autonomous(a.n, a.c);
    s["regime"] = std::string(to_string(cls.regime));
    s["hamiltonian_start"] = hamiltonian_autonomous(a.a, a.b, a.n, a.c);
  }
  out.json_file("summary.json", s);
  *ctx.out << "shoot: status=" << to_string(tr.status) << " t in [" << tr.t_min << ", " << tr.t_max
           << "] energy monitor " << mon.max_violation << "\n";
}

// ---------------------------------------------------------------- kelvin

struct KelvinArgs {
  int n = 3;
  std::string pole = "north";
  double lambda = std::numbers::pi / 3;
  std::string function = "linear";
  std::string profile;
  int K = 64;
  int points = 201;
};

std::function<double(double)> builtin_function(const std::string& name, int n) {
  if (name == "linear") return [](double t) { return 1.0 + 0.1 * t; };
  if (name == "cubic") return [](double t) { return 1.0 + 0.1 * t + 0.05 * t * t * t; };
  if (name == "exp") return [](double t) { return std::exp(0.3 * t); };
  if (name == "beta0") {
    if (n < 3) throw DomainError("beta0 profile needs n >= 3");
    return [n](double t) {
      const double m = 0.5 * (n - 2);
      return std::pow(m, m) * std::pow(1.0 - t, -0.5 * m);
    };
  }
  throw DomainError("unknown function " + name);
}

void cmd_kelvin(const KelvinArgs& a, Ctx& ctx, Output& out) {
  const KelvinParams kp{parse_pole(a.pole), a.lambda, a.n};
  kp.validate();
  if (!a.profile.empty()) {
    int n_file = a.n;
    const auto v = read_profile(a.profile, &n_file);
    KelvinParams kf = kp;
    kf.n = n_file;
    const auto res = n_file == 2 ? kelvin_transform_s2(v, kf) : kelvin_transform_axisym(v, kf);
    write_profile(out.file("kelvin_profile.csv"), res.profile, n_file,
                  {{"pole", a.pole}, {"lambda", a.lambda}, {"source", a.profile}});
    out.file("kelvin_profile.json");
    out.json_file("summary.json", {{"interpolation_tolerance", res.interpolation_tolerance},
                                   {"clamped_count", res.clamped_count}});
    *ctx.out << "kelvin: transformed " << v.size() << " samples\n";
    return;
  }
  if (a.points < 2) throw DomainError("points must be >= 2");
  const auto f = builtin_function(a.function, a.n);
  io::CsvWriter cw({"t", "v", "v_transformed", "jacobian"});
  for (int i = 0; i < a.points; ++i) {
    const double r = 1e-3 + (std::numbers::pi - 2e-3) * i / (a.points - 1);
    const double t = axis_coordinate(kp.pole, r);
    const auto img = kelvin_image(kp, t);
    cw.add_numeric_row({t, f(t), kelvin_value(f, kp, t), img.jacobian});
  }
  cw.save(out.file("kelvin.csv"));
  json s{{"identities", kelvin_identity_report(a.n, kp.pole, a.lambda, f)}};
  ctx.tolerances = {{"identity_tol", 1e-12}};
  try {
    const auto inv = conformal_invariance_residual(f, kp, GegenbauerBasis::build(a.n, a.K), 1.0);
    s["conformal_invariance"] = {{"K", a.K}, {"residual", inv.residual}, {"tail_v", inv.tail_v},
                                 {"tail_transformed", inv.tail_transformed}};
  } catch (const ResolutionError& e) {
    s["conformal_invariance"] = {{"K", a.K}, {"error", e.what()}};
  }
  out.json_file("summary.json", s);
  const bool ok = s["identities"]["pass"].get<bool>();
  *ctx.out << "kelvin: identities max error " << s["identities"]["max_error"].get<double>() << "\n";
  if (!ok) ctx.exit = Exit::validation_failure;
}

// ---------------------------------------------------------------- veron

struct VeronArgs {
  int n = 4;
  double c = -1.0;
  int K = 48;
};

void cmd_veron(const VeronArgs& a, Ctx& ctx, Output& out) {
  if (a.n < 3) throw DomainError("n must be >= 3");
  const auto map = veron_mapping(a.n, a.c);
  auto basis = GegenbauerBasis::build(map.N, a.K);
  const auto sum = veron_nonradial(a.n, a.c, basis, ctx.g.seed);
  io::CsvWriter cw({"nodal_class", "lambda_k", "lambda", "sup_norm", "residual_norm"});
  for (const auto& s : sum.solutions)
    cw.add_numeric_row({double(s.nodal_class()), bifurcation_point(map.N, map.p, std::max(s.nodal_class(), 1)), s.lambda,
                        s.sup_norm(), s.residual_norm});
  cw.save(out.file("veron.csv"));
  out.json_file("summary.json", sum.to_json());
  *ctx.out << "veron: n=" << a.n << " c=" << a.c << " lambda=" << map.lambda << " threshold=" << map.threshold
           << " (c threshold " << map.c_threshold << "), classes found: " << sum.classes.size() << "\n";
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  std::string suite = "all";
  std::size_t budget = 10000;
};

void cmd_verify(const VerifyArgs& a, Ctx& ctx, Output& out) {
  SuiteOptions so;
  so.seed = ctx.g.seed;
  so.budget = a.budget;
  so.threads = ctx.g.threads;
  std::vector<std::string> files;
  const auto rep = run_suite(a.suite, so, out.dir(), files);
  out.add(files);
  out.json_file("verify_report.json", rep);
  const bool pass = rep["pass"].get<bool>();
  *ctx.out << "verify " << a.suite << ": " << (pass ? "PASS" : "FAIL") << "\n";
  if (!pass) {
    *ctx.out << "first failure: " << rep["first_failure"].dump() << "\n";
    ctx.exit = Exit::validation_failure;
  }
}

json load_config(const std::string& path, const std::string& command, Globals& g, const CLI::App& app) {
  if (path.empty()) return json::object();
  const json j = io::read_json(path);
  if (!j.is_object()) throw DomainError("config must be a JSON object");
  auto take_global = [&](const char* key, auto& ref) {
    if (app.get_option(std::string("--") + key)->count() == 0 && j.contains(key))
      ref = j.at(key).get<std::decay_t<decltype(ref)>>();
  };
  take_global("seed", g.seed);
  take_global("threads", g.threads);
  take_global("out", g.out);
  if (j.contains("command") && j.contains("params")) {
    if (j.at("command").get<std::string>() != command)
      throw DomainError("config manifest is for command " + j.at("command").get<std::string>());
    return j.at("params");
  }
  if (j.contains(command) && j.at(command).is_object()) return j.at(command);
  return j;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  CLI::App app{"Bifurcation, shooting and symmetry checks for semilinear equations on spheres", "sphbif"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--config", g.config, "JSON config file or a previous manifest.json");
  app.add_option("--threads", g.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

  EigArgs eig;
  auto* s_eig = app.add_subcommand("eig", "Eigenpairs and nodal zeros of the axisymmetric basis");
  Binder b_eig(s_eig);
  b_eig.opt("N", eig.N, "Sphere dimension");
  b_eig.opt("K", eig.K, "Number of modes");
  b_eig.opt("M", eig.M, "Quadrature nodes (default 2K)");

  BranchArgs br;
  auto* s_br = app.add_subcommand("branch", "Branch of nonconstant solutions from lambda_k");
  Binder b_br(s_br);
  b_br.opt("N", br.N, "Sphere dimension");
  b_br.opt("p", br.p, "Exponent");
  b_br.opt("k", br.k, "Nodal class / bifurcation index");
  b_br.opt("lambda-max", br.lambda_max, "Continuation target");
  b_br.opt("K", br.K, "Number of modes");
  b_br.opt("amplitude", br.amplitude, "Seed amplitude along phi_k");
  b_br.optional("offset", br.offset, "lambda - lambda_k of the switch point");
  b_br.opt("ds", br.ds, "Initial arclength step");
  b_br.opt("ds-max", br.ds_max, "Largest arclength step");
  b_br.opt("max-steps", br.max_steps, "Continuation step limit");
  b_br.opt("newton-tol", br.newton_tol, "Newton residual tolerance");

  ShootArgs sh;
  auto* s_sh = app.add_subcommand("shoot", "Emden-Fowler shooting");
  Binder b_sh(s_sh);
  b_sh.opt("n", sh.n, "Space dimension");
  b_sh.opt("c", sh.c, "Autonomous family coefficient");
  b_sh.optional("beta", sh.beta, "Selects the beta family");
  b_sh.opt("a", sh.a, "w(0)");
  b_sh.opt("b", sh.b, "w'(0)");
  b_sh.opt("T", sh.T, "Half-length of the time interval");
  b_sh.opt("rtol", sh.rtol, "Relative tolerance");
  b_sh.opt("atol", sh.atol, "Absolute tolerance");
  b_sh.opt("dt", sh.dt, "Output spacing");
  b_sh.flag("grid", sh.grid, "Sweep a grid of starts instead");
  b_sh.opt("grid-size", sh.grid_size, "Grid points per axis");
  b_sh.flag("periodic", sh.periodic, "Periodic orbits below the homoclinic level");
  b_sh.opt("levels", sh.levels, "Periodic orbits to follow");

  KelvinArgs kv;
  auto* s_kv = app.add_subcommand("kelvin", "Conformal reflection of an axisymmetric function on S^n");
  Binder b_kv(s_kv);
  b_kv.opt("n", kv.n, "Sphere dimension");
  b_kv.opt("pole", kv.pole, "north or south")->check(CLI::IsMember({"north", "south"}));
  b_kv.opt("lambda", kv.lambda, "Reflection radius");
  b_kv.opt("function", kv.function, "Built-in test function")
      ->check(CLI::IsMember({"linear", "cubic", "exp", "beta0"}));
  b_kv.opt("profile", kv.profile, "Profile CSV with JSON sidecar (overrides --function)");
  b_kv.opt("K", kv.K, "Modes for the invariance residual");
  b_kv.opt("points", kv.points, "Output samples");

  VeronArgs ve;
  auto* s_ve = app.add_subcommand("veron", "Nonradial solutions via the sphere reduction");
  Binder b_ve(s_ve);
  b_ve.opt("n", ve.n, "Space dimension");
  b_ve.opt("c", ve.c, "Coefficient of |x|^{-2} u");
  b_ve.opt("K", ve.K, "Number of modes");

  VerifyArgs vf;
  auto* s_vf = app.add_subcommand("verify", "Property suites");
  Binder b_vf(s_vf);
  b_vf.opt("suite", vf.suite, "Suite name")->check(CLI::IsMember(suite_names()));
  b_vf.opt("budget", vf.budget, "Sample budget");

  for (auto* s : {s_eig, s_br, s_sh, s_kv, s_ve, s_vf}) s->fallthrough();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return Exit::ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return Exit::ok;
  } catch (const CLI::CallForVersion&) {
    out << tool_version() << "\n";
    return Exit::ok;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return Exit::usage_error;
  }

  const std::vector<std::pair<CLI::App*, Binder*>> subs{{s_eig, &b_eig}, {s_br, &b_br}, {s_sh, &b_sh},
                                                        {s_kv, &b_kv},   {s_ve, &b_ve}, {s_vf, &b_vf}};
  CLI::App* used = app.get_subcommands().front();
  Binder* binder = nullptr;
  for (const auto& [a, b] : subs)
    if (a == used) binder = b;
  const std::string command = used->get_name();

  Ctx ctx;
  ctx.out = &out;
  std::optional<Output> output;
  try {
    const json cfg = load_config(g.config, command, g, app);
    binder->apply(cfg);
    if (command == "verify" &&
        std::find(suite_names().begin(), suite_names().end(), vf.suite) == suite_names().end())
      throw DomainError("unknown suite " + vf.suite);
    if (g.threads < 1) throw DomainError("threads must be >= 1");
    ctx.g = g;
    ctx.params = binder->record();
    output.emplace(g.out);
    if (command == "eig") cmd_eig(eig, ctx, *output);
    else if (command == "branch") cmd_branch(br, ctx, *output);
    else if (command == "shoot") cmd_shoot(sh, ctx, *output);
    else if (command == "kelvin") cmd_kelvin(kv, ctx, *output);
    else if (command == "veron") cmd_veron(ve, ctx, *output);
    else cmd_verify(vf, ctx, *output);
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << "\n";
    return Exit::usage_error;
  } catch (const LengthMismatch& e) {
    err << "usage error: " << e.what() << "\n";
    return Exit::usage_error;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    ctx.exit = Exit::numerical_failure;
    if (output) output->json_file("error.json", {{"command", command}, {"error", e.what()}, {"params", ctx.params}});
  } catch (const nlohmann::json::exception& e) {
    err << "usage error: bad config value: " << e.what() << "\n";
    return Exit::usage_error;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return Exit::usage_error;
  }

  if (output) {
    RunManifest m;
    m.command = command;
    m.params = ctx.params;
    m.seed = ctx.g.seed;
    m.tolerances = ctx.tolerances;
    m.tool_version = tool_version();
    m.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    output->manifest(std::move(m));
  }
  return ctx.exit;
}

}  // namespace sphbif::cli
