#include "sphbif/ode_shooting.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <thread>

#include <boost/numeric/odeint.hpp>

#include "sphbif/csv.hpp"
#include "sphbif/errors.hpp"

namespace sphbif {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::array<double, 2>;
using Dense = odeint::dense_output_runge_kutta<
    odeint::controlled_runge_kutta<odeint::runge_kutta_dopri5<State>>>;

// w'' = q(t) w - |w|^{p-1} w in the variable s, t = dir * s. The odd
// extension of the power is only ever evaluated inside the step that
// crosses w = 0; the crossing itself ends the integration.
struct Rhs {
  const ShootParams* p;
  double dir;
  double expo;
  void operator()(const State& x, State& dx, double s) const {
    dx[0] = x[1];
    dx[1] = p->linear_coefficient(dir * s) * x[0] - std::pow(std::abs(x[0]), expo - 1.0) * x[0];
  }
};

// Shrinks (lo, hi] around the first sign change of component idx; returns hi.
double bisect(Dense& st, int idx, double& lo, double& hi) {
  State x;
  st.calc_state(lo, x);
  const double sign_lo = x[idx] > 0.0 ? 1.0 : -1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    st.calc_state(mid, x);
    if (x[idx] * sign_lo > 0.0) lo = mid;
    else hi = mid;
  }
  return hi;
}

// Looks for a sign change of component idx inside the last step by probing the
// dense output; returns the bracket (lo, hi) of the first one.
bool find_sign_change(Dense& st, int idx, double s0, double s1, double sign0, double& lo, double& hi) {
  constexpr int probes = 8;
  State x;
  double prev = s0;
  for (int i = 1; i <= probes; ++i) {
    const double s = s0 + (s1 - s0) * i / probes;
    st.calc_state(s, x);
    if (!(x[idx] * sign0 > 0.0)) {
      lo = prev;
      hi = s;
      return true;
    }
    prev = s;
  }
  return false;
}

struct HalfRun {
  std::vector<TrajectorySample> samples;  // in s, with y' = dy/ds
  bool crossed = false;
  ZeroEvent event{};
  double s_end = 0.0;
  long steps = 0;
};

double h_of(double w, double wp, int n) { return energy_h(std::abs(w), wp, n); }

HalfRun run_half(const ShootParams& p, double dir) {
  HalfRun out;
  const Rhs rhs{&p, dir, p.exponent()};
  Dense st = odeint::make_dense_output(p.atol, p.rtol, odeint::runge_kutta_dopri5<State>());
  State x0{p.a, dir * p.b};
  st.initialize(x0, 0.0, std::min(1e-2, p.T));
  out.samples.push_back({0.0, x0[0], x0[1], h_of(x0[0], x0[1], p.n)});
  double next_out = p.sample_dt;
  State x;
  while (true) {
    const auto [s0, s1] = st.do_step(rhs);
    ++out.steps;
    const State& cur = st.current_state();
    if (!std::isfinite(cur[0]) || !std::isfinite(cur[1]) || std::abs(cur[0]) > p.overflow_guard ||
        std::abs(cur[1]) > p.overflow_guard)
      throw BlowupDetected("trajectory exceeded the overflow guard near t = " + std::to_string(dir * s1));
    if (out.steps > p.max_steps) throw ToleranceFailure("step budget exhausted");
    if (st.current_time_step() < 1e-15 * std::max(1.0, s1))
      throw ToleranceFailure("step size underflow near t = " + std::to_string(dir * s1));

    const double s_stop = std::min(s1, p.T);
    double lo = 0.0, hi = 0.0;
    const bool cross = find_sign_change(st, 0, s0, s_stop, 1.0, lo, hi);
    double s_evt = 0.0;
    if (cross) s_evt = bisect(st, 0, lo, hi);
    const double s_last = cross ? s_evt : s_stop;

    if (p.sample_dt > 0.0) {
      for (; next_out < s_last; next_out = p.sample_dt * std::round(next_out / p.sample_dt + 1.0)) {
        st.calc_state(next_out, x);
        out.samples.push_back({next_out, x[0], x[1], h_of(x[0], x[1], p.n)});
      }
    } else if (!cross && s1 < p.T) {
      out.samples.push_back({s1, cur[0], cur[1], h_of(cur[0], cur[1], p.n)});
    }

    if (cross) {
      st.calc_state(s_evt, x);
      out.crossed = true;
      out.event = {dir * s_evt, 0.0, 0.0, x[0], dir * x[1], dir > 0 ? 1 : -1};
      out.event.t_lo = dir > 0 ? lo : -hi;
      out.event.t_hi = dir > 0 ? hi : -lo;
      out.samples.push_back({s_evt, x[0], x[1], h_of(x[0], x[1], p.n)});
      out.s_end = s_evt;
      return out;
    }
    if (s1 >= p.T) {
      st.calc_state(p.T, x);
      if (out.samples.back().t < p.T) out.samples.push_back({p.T, x[0], x[1], h_of(x[0], x[1], p.n)});
      out.s_end = p.T;
      return out;
    }
  }
}

}  // namespace

std::string_view to_string(Family f) { return f == Family::autonomous ? "autonomous_c" : "beta"; }

std::string_view to_string(TrajectoryStatus s) {
  switch (s) {
    case TrajectoryStatus::positive_on_interval: return "positive_on_interval";
    case TrajectoryStatus::hit_zero_forward: return "hit_zero_forward";
    case TrajectoryStatus::hit_zero_backward: return "hit_zero_backward";
    case TrajectoryStatus::blowup: return "blowup";
  }
  return "unknown";
}

std::string_view to_string(Regime r) { return r == Regime::nonexistence ? "nonexistence" : "oscillatory"; }

std::string_view to_string(Beta0Amplitude a) { return a == Beta0Amplitude::as_stated ? "as_stated" : "corrected"; }

ShootParams ShootParams::autonomous(int n, double c, double a, double b, double T) {
  ShootParams p;
  p.n = n;
  p.family = Family::autonomous;
  p.c = c;
  p.a = a;
  p.b = b;
  p.T = T;
  return p;
}

ShootParams ShootParams::beta_family(int n, double beta, double a, double b, double T) {
  ShootParams p;
  p.n = n;
  p.family = Family::beta;
  p.beta = beta;
  p.a = a;
  p.b = b;
  p.T = T;
  return p;
}

double beta_weight(double t) {
  const double ch = std::cosh(t);
  return std::isinf(ch) ? 0.0 : 0.25 / (ch * ch);
}

double ShootParams::linear_coefficient(double t) const {
  const double k0 = 0.25 * (n - 2) * (n - 2);
  return family == Family::autonomous ? k0 - c : k0 - c_beta() * beta_weight(t);
}

void ShootParams::validate() const {
  if (n < 3) throw DomainError("n must be >= 3");
  if (!(a > 0.0)) throw DomainError("initial value a must be positive");
  if (!(T > 0.0)) throw DomainError("T must be positive");
  if (!std::isfinite(b) || !std::isfinite(c) || !std::isfinite(beta)) throw DomainError("non-finite parameter");
  if (!(rtol > 0.0 && atol > 0.0)) throw DomainError("tolerances must be positive");
  if (sample_dt < 0.0) throw DomainError("sample_dt must be >= 0");
}

nlohmann::json ShootParams::to_json() const {
  nlohmann::json j{{"n", n}, {"family", std::string(to_string(family))}, {"a", a}, {"b", b}, {"T", T},
                   {"rtol", rtol}, {"atol", atol}, {"sample_dt", sample_dt}};
  if (family == Family::autonomous) j["c"] = c;
  else {
    j["beta"] = beta;
    j["c_beta"] = c_beta();
  }
  return j;
}

double energy_h(double a, double b, int n) {
  if (a < 0.0) throw DomainError("energy_h: a must be >= 0");
  const double k = 0.5 * (n - 2);
  return b * b - k * k * a * a + (double(n - 2) / n) * std::pow(a, 2.0 * n / (n - 2));
}

double hamiltonian_autonomous(double w, double wp, int n, double c) {
  const double k = 0.25 * (n - 2) * (n - 2) - c;
  return 0.5 * wp * wp - 0.5 * k * w * w + (double(n - 2) / (2.0 * n)) * std::pow(std::abs(w), 2.0 * n / (n - 2));
}

ShootingCondition check_shooting_condition(double a, double b, int n, double beta) {
  if (!(a > 0.0)) throw DomainError("check_shooting_condition: a must be positive");
  const double cb = double(n) * (n - 2) - 4.0 * beta;
  ShootingCondition r;
  r.value = energy_h(a, b, n) + 0.25 * cb * a * a;
  r.holds = r.value < 0.0;
  return r;
}

Trajectory integrate(const ShootParams& params) {
  params.validate();
  Trajectory tr;
  tr.params = params;
  const auto fwd = run_half(params, 1.0);
  const auto bwd = run_half(params, -1.0);
  tr.steps = fwd.steps + bwd.steps;
  for (auto it = bwd.samples.rbegin(); it != bwd.samples.rend(); ++it) {
    if (it->t == 0.0) continue;
    tr.samples.push_back({-it->t, it->w, -it->wp, it->h});
  }
  tr.samples.insert(tr.samples.end(), fwd.samples.begin(), fwd.samples.end());
  tr.t_min = -bwd.s_end;
  tr.t_max = fwd.s_end;
  tr.crossed_forward = fwd.crossed;
  tr.crossed_backward = bwd.crossed;
  if (bwd.crossed) tr.events.push_back(bwd.event);
  if (fwd.crossed) tr.events.push_back(fwd.event);
  if (fwd.crossed) tr.status = TrajectoryStatus::hit_zero_forward;
  else if (bwd.crossed) tr.status = TrajectoryStatus::hit_zero_backward;
  return tr;
}

std::vector<double> Trajectory::energy_series() const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.h);
  return out;
}

std::vector<double> Trajectory::hamiltonian_series() const {
  if (params.family != Family::autonomous) throw DomainError("H is conserved only for the autonomous family");
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(hamiltonian_autonomous(s.w, s.wp, params.n, params.c));
  return out;
}

double Trajectory::max_w() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples) m = std::max(m, s.w);
  return m;
}

double Trajectory::min_w() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) m = std::min(m, s.w);
  return m;
}

void Trajectory::write_csv(const std::filesystem::path& path) const {
  io::CsvWriter csv({"t", "w", "wprime", "h"});
  for (const auto& s : samples) csv.add_row({s.t, s.w, s.wp, s.h});
  csv.save(path);
}

void Trajectory::write_events_csv(const std::filesystem::path& path) const {
  io::CsvWriter csv({"t", "t_lo", "t_hi", "w", "wprime", "direction"});
  for (const auto& e : events) csv.add_row({e.t, e.t_lo, e.t_hi, e.w, e.wp, double(e.direction)});
  csv.save(path);
}

nlohmann::json Trajectory::summary() const {
  nlohmann::json ev = nlohmann::json::array();
  for (const auto& e : events) ev.push_back({{"t", e.t}, {"w", e.w}, {"direction", e.direction}});
  return {{"params", params.to_json()},
          {"status", std::string(to_string(status))},
          {"crossed_forward", crossed_forward},
          {"crossed_backward", crossed_backward},
          {"t_min", t_min},
          {"t_max", t_max},
          {"samples", samples.size()},
          {"steps", steps},
          {"events", ev},
          {"max_w", max_w()},
          {"min_w", min_w()}};
}

EnergyMonitor energy_estimate_monitor(const Trajectory& traj) {
  EnergyMonitor m;
  const auto& p = traj.params;
  if (p.family == Family::autonomous) {
    m.conservation_check = true;
    const double h0 = hamiltonian_autonomous(p.a, p.b, p.n, p.c);
    m.bound = h0;
    for (const auto& s : traj.samples) {
      m.max_violation = std::max(m.max_violation, std::abs(hamiltonian_autonomous(s.w, s.wp, p.n, p.c) - h0));
      ++m.samples_checked;
    }
    return m;
  }
  if (p.c_beta() < 0.0) throw DomainError("energy monitor needs c_beta >= 0");
  m.bound = check_shooting_condition(p.a, p.b, p.n, p.beta).value;
  m.max_violation = -std::numeric_limits<double>::infinity();
  for (const auto& s : traj.samples) {
    if (s.t < 0.0) continue;
    m.max_violation = std::max(m.max_violation, s.h - m.bound);
    ++m.samples_checked;
  }
  return m;
}

AutonomousClass classify_autonomous(int n, double c) {
  if (n < 3) throw DomainError("classify_autonomous: n must be >= 3");
  AutonomousClass out;
  out.hardy_threshold = 0.25 * (n - 2) * (n - 2);
  const double k = out.hardy_threshold - c;
  if (c >= out.hardy_threshold) {
    out.regime = Regime::nonexistence;
    return out;
  }
  out.regime = Regime::oscillatory;
  out.equilibrium = std::pow(k, 0.25 * (n - 2));
  out.homoclinic_max = std::pow(n * k / (n - 2), 0.25 * (n - 2));
  return out;
}

double decay_constant(int n) {
  if (n < 3) throw DomainError("decay_constant: n must be >= 3");
  return std::pow(0.5 * n * (n - 2), 0.25 * (n - 2));
}

DecayCheck decay_bound_check(const Trajectory& traj) {
  DecayCheck d;
  d.C_star = decay_constant(traj.params.n);
  d.max_w = traj.max_w();
  d.ok = d.max_w <= d.C_star;
  return d;
}

DecayCheck decay_bound_check(const RadialProfile& u, int n) {
  u.validate();
  if (u.coordinate != Coordinate::euclidean_r) throw DomainError("decay_bound_check expects euclidean_r");
  DecayCheck d;
  d.C_star = decay_constant(n);
  d.max_w = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < u.size(); ++i)
    d.max_w = std::max(d.max_w, std::pow(u.grid[i], 0.5 * (n - 2)) * u.values[i]);
  d.ok = d.max_w <= d.C_star;
  return d;
}

PeriodicOrbit periodic_orbit(int n, double c, double a, double rtol, double atol, double mismatch_tol) {
  const auto cls = classify_autonomous(n, c);
  if (cls.regime != Regime::oscillatory) throw DomainError("periodic_orbit: no oscillatory regime for this c");
  if (!(a > 0.0)) throw DomainError("periodic_orbit: a must be positive");
  ShootParams p = ShootParams::autonomous(n, c, a, 0.0);
  const Rhs rhs{&p, 1.0, p.exponent()};
  State d0;
  rhs({a, 0.0}, d0, 0.0);
  if (std::abs(d0[1]) < 1e-14 * std::max(1.0, a)) throw DomainError("periodic_orbit: a is the equilibrium");

  PeriodicOrbit orb;
  orb.a = a;
  Dense st = odeint::make_dense_output(atol, rtol, odeint::runge_kutta_dopri5<State>());
  st.initialize(State{a, 0.0}, 0.0, 1e-3);
  double sign = d0[1] > 0.0 ? 1.0 : -1.0;  // sign of w' just after the start
  int turns = 0;
  double w_turn = a;
  State x;
  constexpr double t_cap = 1e5;
  while (st.current_time() < t_cap) {
    const auto [s0, s1] = st.do_step(rhs);
    const State& cur = st.current_state();
    if (cur[0] <= 0.0) return orb;  // left the positive region
    if (!std::isfinite(cur[0]) || std::abs(cur[0]) > 1e8) throw BlowupDetected("periodic_orbit: blowup");
    double lo, hi;
    // the first step starts on w' = 0; skip its left endpoint
    const double from = s0 == 0.0 ? s0 + 1e-3 * (s1 - s0) : s0;
    if (!find_sign_change(st, 1, from, s1, sign, lo, hi)) continue;
    const double s_evt = bisect(st, 1, lo, hi);
    st.calc_state(s_evt, x);
    ++turns;
    sign = -sign;
    if (turns == 1) {
      w_turn = x[0];
      // a second turn can lie in the same step
      double lo2, hi2;
      if (find_sign_change(st, 1, s_evt + 1e-12 * std::max(1.0, s_evt), s1, sign, lo2, hi2)) {
        const double s2 = bisect(st, 1, lo2, hi2);
        st.calc_state(s2, x);
        turns = 2;
        orb.period = s2;
      }
    } else {
      orb.period = s_evt;
    }
    if (turns == 2) {
      orb.w_max = std::max(a, w_turn);
      orb.w_min = std::min(a, w_turn);
      orb.return_mismatch = std::abs(x[0] - a);
      orb.periodic = orb.return_mismatch < mismatch_tol && orb.w_min > 0.0;
      return orb;
    }
  }
  return orb;
}

nlohmann::json PeriodicSweep::to_json() const {
  nlohmann::json o = nlohmann::json::array();
  for (const auto& p : orbits)
    o.push_back({{"a", p.a}, {"period", p.period}, {"w_max", p.w_max}, {"w_min", p.w_min},
                 {"return_mismatch", p.return_mismatch}, {"periodic", p.periodic}});
  return {{"n", n}, {"c", c}, {"sup_w", sup_w}, {"level_set_bound", level_set_bound},
          {"C_star", C_star}, {"all_periodic", all_periodic}, {"orbits", o}};
}

PeriodicSweep periodic_sweep(int n, double c, int levels) {
  const auto cls = classify_autonomous(n, c);
  if (cls.regime != Regime::oscillatory) throw DomainError("periodic_sweep: no periodic orbits for this c");
  if (levels < 1) throw DomainError("periodic_sweep: levels must be >= 1");
  PeriodicSweep sw;
  sw.n = n;
  sw.c = c;
  sw.level_set_bound = *cls.homoclinic_max;
  sw.C_star = decay_constant(n);
  const double ws = *cls.equilibrium, wh = *cls.homoclinic_max;
  sw.all_periodic = true;
  for (int j = 1; j <= levels; ++j) {
    const auto orb = periodic_orbit(n, c, wh - (wh - ws) * std::ldexp(1.0, -j));
    sw.all_periodic = sw.all_periodic && orb.periodic;
    if (orb.periodic) sw.sup_w = std::max(sw.sup_w, orb.w_max);
    sw.orbits.push_back(orb);
  }
  return sw;
}

RadialProfile emden_fowler_transform(const RadialProfile& u, int n) {
  u.validate();
  if (u.coordinate != Coordinate::euclidean_r) throw DomainError("emden_fowler_transform expects euclidean_r");
  u.require_positive();
  RadialProfile w;
  w.coordinate = Coordinate::emden_fowler;
  for (std::size_t i = u.size(); i-- > 0;) {
    const double r = u.grid[i];
    if (!(r > 0.0)) throw DomainError("emden_fowler_transform: r must be positive");
    w.grid.push_back(-std::log(r));
    w.values.push_back(std::pow(r, 0.5 * (n - 2)) * u.values[i]);
  }
  return w;
}

RadialProfile emden_fowler_inverse(const RadialProfile& w, int n) {
  w.validate();
  if (w.coordinate != Coordinate::emden_fowler) throw DomainError("emden_fowler_inverse expects emden_fowler");
  RadialProfile u;
  u.coordinate = Coordinate::euclidean_r;
  for (std::size_t i = w.size(); i-- > 0;) {
    const double r = std::exp(-w.grid[i]);
    u.grid.push_back(r);
    u.values.push_back(std::pow(r, -0.5 * (n - 2)) * w.values[i]);
  }
  return u;
}

double beta0(int n) {
  if (n < 3) throw DomainError("beta0: n must be >= 3");
  return double(n - 2) * (3 * n - 2) / 16.0;
}

double beta0_profile(double r, int n, Beta0Amplitude amp) {
  const double m = 0.25 * (n - 2);
  double A = std::pow(0.5 * (n - 2), 0.5 * (n - 2));
  if (amp == Beta0Amplitude::as_stated) A *= std::pow(2.0, m);
  return A * std::pow(1.0 + r * r, -m);
}

SingularResidual singular_solution_residual(int n, Beta0Amplitude amp, double r_lo, double r_hi, std::size_t m) {
  if (!(r_lo > 0.0 && r_hi > r_lo) || m < 2) throw DomainError("singular_solution_residual: bad grid");
  SingularResidual out;
  out.n = n;
  out.beta0 = beta0(n);
  out.amplitude = amp;
  out.residual.coordinate = Coordinate::euclidean_r;
  const double mm = 0.25 * (n - 2);
  const double A = beta0_profile(0.0, n, amp);
  const double cb = double(n) * (n - 2) - 4.0 * out.beta0;
  const double p = double(n + 2) / (n - 2);
  for (std::size_t i = 0; i < m; ++i) {
    const double r = r_lo * std::pow(r_hi / r_lo, double(i) / double(m - 1));
    const double q = 1.0 + r * r;
    const double u = A * std::pow(q, -mm);
    const double du = -2.0 * mm * A * r * std::pow(q, -mm - 1.0);
    const double d2u = -2.0 * mm * A * std::pow(q, -mm - 1.0) + 4.0 * mm * (mm + 1.0) * A * r * r * std::pow(q, -mm - 2.0);
    const double res = d2u + (n - 1) / r * du + cb / (q * q) * u + std::pow(u, p);
    out.residual.grid.push_back(r);
    out.residual.values.push_back(res);
    out.max_abs = std::max(out.max_abs, std::abs(res));
  }
  return out;
}

namespace {

void finish_flux(PhiFlux& f, double tol_rel) {
  double scale = 0.0;
  for (double v : f.flux) scale = std::max(scale, std::abs(v));
  f.max_increase = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < f.flux.size(); ++i) f.max_increase = std::max(f.max_increase, f.flux[i] - f.flux[i - 1]);
  if (f.flux.size() < 2) f.max_increase = 0.0;
  f.decreasing = f.max_increase <= tol_rel * scale;
}

}  // namespace

PhiFlux phi_substitution(const RadialProfile& u, int n) {
  u.validate();
  if (u.coordinate != Coordinate::euclidean_r) throw DomainError("phi_substitution expects euclidean_r");
  u.require_positive();
  const auto interp = BarycentricInterpolant::for_profile(u);
  PhiFlux f;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = u.grid[i], q = 1.0 + r * r;
    const double du = interp.derivative(r);
    const double phi = std::pow(q, 0.5 * (n - 2)) * u.values[i];
    const double dphi = (n - 2) * r * std::pow(q, 0.5 * (n - 4)) * u.values[i] + std::pow(q, 0.5 * (n - 2)) * du;
    f.r.push_back(r);
    f.phi.push_back(phi);
    f.flux.push_back(std::pow(r, n - 1) * std::pow(q, 2.0 - n) * dphi);
  }
  finish_flux(f, 1e-9);
  return f;
}

PhiFlux phi_flux_from_trajectory(const Trajectory& traj) {
  const int n = traj.params.n;
  PhiFlux f;
  for (auto it = traj.samples.rbegin(); it != traj.samples.rend(); ++it) {
    const double t = it->t;
    const double ch2 = 2.0 * std::cosh(t);
    f.r.push_back(std::exp(-t));
    f.phi.push_back(std::pow(ch2, 0.5 * (n - 2)) * it->w);
    f.flux.push_back(-std::pow(ch2, -0.5 * (n - 2)) * (0.5 * (n - 2) * std::tanh(t) * it->w + it->wp));
  }
  finish_flux(f, 10.0 * traj.params.rtol);
  return f;
}

bool SweepResult::all_cross_both() const {
  return std::all_of(points.begin(), points.end(), [](const SweepPoint& p) { return p.crossed_forward && p.crossed_backward; });
}

bool SweepResult::all_cross_some_side() const {
  return std::all_of(points.begin(), points.end(), [](const SweepPoint& p) { return p.crossed_forward || p.crossed_backward; });
}

bool SweepResult::all_flux_ok() const {
  return std::all_of(points.begin(), points.end(), [](const SweepPoint& p) { return p.flux_ok; });
}

nlohmann::json SweepResult::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : points)
    out.push_back({{"a", p.a}, {"b", p.b}, {"status", std::string(to_string(p.status))},
                   {"crossed_forward", p.crossed_forward}, {"crossed_backward", p.crossed_backward},
                   {"flux_ok", p.flux_ok}});
  return {{"params", base.to_json()},
          {"grid", {{"size", grid}, {"a_range", {0.0, 3.0}}, {"b_range", {-3.0, 3.0}}, {"seed", seed}}},
          {"all_cross_both", all_cross_both()},
          {"all_cross_some_side", all_cross_some_side()},
          {"all_flux_ok", all_flux_ok()},
          {"outcomes", out}};
}

void SweepResult::write_csv(const std::filesystem::path& path) const {
  io::CsvWriter csv({"a", "b", "status", "crossed_forward", "crossed_backward", "t_forward_zero", "t_backward_zero",
                     "flux_ok", "flux_max_increase"});
  for (const auto& p : points)
    csv.add_row(std::vector<std::string>{io::format_double(p.a), io::format_double(p.b),
                                         std::string(to_string(p.status)), p.crossed_forward ? "1" : "0",
                                         p.crossed_backward ? "1" : "0", io::format_double(p.t_forward_zero),
                                         io::format_double(p.t_backward_zero), p.flux_ok ? "1" : "0",
                                         io::format_double(p.flux_max_increase)});
  csv.save(path);
}

SweepResult nonexistence_sweep(const ShootParams& base, int grid, std::uint64_t seed, int threads) {
  if (grid < 2) throw DomainError("sweep grid must be >= 2");
  base.validate();
  SweepResult res;
  res.base = base;
  res.grid = grid;
  res.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double da = 3.0 / grid, db = 6.0 / (grid - 1);
  std::vector<std::pair<double, double>> starts;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const double a = da * (i + 1 - 0.25 * u(rng));
      const double b = std::clamp(-3.0 + db * j + 0.25 * db * (u(rng) - 0.5), -3.0, 3.0);
      starts.emplace_back(a, b);
    }
  res.points.resize(starts.size());
  const bool check_flux = base.family == Family::beta && base.beta <= 0.0;
  auto work = [&](std::size_t idx) {
    ShootParams p = base;
    p.a = starts[idx].first;
    p.b = starts[idx].second;
    p.sample_dt = 0.0;
    SweepPoint sp{p.a, p.b, TrajectoryStatus::blowup, false, false, NAN, NAN, true, 0.0};
    try {
      const auto tr = integrate(p);
      sp.status = tr.status;
      sp.crossed_forward = tr.crossed_forward;
      sp.crossed_backward = tr.crossed_backward;
      if (tr.crossed_forward) sp.t_forward_zero = tr.t_max;
      if (tr.crossed_backward) sp.t_backward_zero = tr.t_min;
      if (check_flux) {
        const auto f = phi_flux_from_trajectory(tr);
        sp.flux_ok = f.decreasing;
        sp.flux_max_increase = f.max_increase;
      }
    } catch (const BlowupDetected&) {
      sp.flux_ok = !check_flux;
    }
    res.points[idx] = sp;
  };
  if (threads <= 1) {
    for (std::size_t i = 0; i < starts.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = next++; i < starts.size(); i = next++) work(i);
        } catch (...) {
          errors[t] = std::current_exception();
          next = starts.size();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  return res;
}

}  // namespace sphbif
