#include "sphbif/bifurcation_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "sphbif/errors.hpp"

namespace sphbif {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Coefficient-space view of the problem on one basis.
struct Discretization {
  explicit Discretization(const BasisPtr& b) : basis(b), K(b->modes()), M(b->nodes_count()), B(K, M), BW(K, M), nu(K) {
    for (int k = 0; k < K; ++k) {
      nu(k) = b->eigenvalues()[k];
      for (int j = 0; j < M; ++j) {
        B(k, j) = b->basis(k, j);
        BW(k, j) = B(k, j) * b->weights()[j];
      }
    }
  }

  Eigen::VectorXd values(const Eigen::VectorXd& c) const { return B.transpose() * c; }

  static double min_plus_one(const Eigen::VectorXd& vals) { return 1.0 + vals.minCoeff(); }

  Eigen::VectorXd remainder(const Eigen::VectorXd& vals, double p) const {
    Eigen::VectorXd r(M);
    for (int j = 0; j < M; ++j) r(j) = nonlinear_remainder(vals(j), p);
    return r;
  }

  Eigen::VectorXd F(const Eigen::VectorXd& c, const Eigen::VectorXd& vals, double lambda, double p) const {
    Eigen::VectorXd out = (nu.array() - lambda * (p - 1.0)).matrix().cwiseProduct(c);
    out.noalias() -= lambda * (BW * remainder(vals, p));
    return out;
  }

  Eigen::VectorXd F_lambda(const Eigen::VectorXd& c, const Eigen::VectorXd& vals, double p) const {
    Eigen::VectorXd out = -(p - 1.0) * c;
    out.noalias() -= BW * remainder(vals, p);
    return out;
  }

  Eigen::MatrixXd J(const Eigen::VectorXd& vals, double lambda, double p) const {
    Eigen::MatrixXd scaled = BW;
    for (int j = 0; j < M; ++j) scaled.col(j) *= nonlinear_remainder_derivative(vals(j), p);
    Eigen::MatrixXd out = -lambda * (scaled * B.transpose());
    out.diagonal() += (nu.array() - lambda * (p - 1.0)).matrix();
    return out;
  }

  AxisymFn fn(const Eigen::VectorXd& c) const {
    return AxisymFn::from_coeffs(basis, std::vector<double>(c.data(), c.data() + c.size()));
  }

  BasisPtr basis;
  int K, M;
  Eigen::MatrixXd B, BW;
  Eigen::VectorXd nu;
};

Eigen::VectorXd coeff_vector(const AxisymFn& w) {
  const auto c = w.coeffs();
  return Eigen::Map<const Eigen::VectorXd>(c.data(), Eigen::Index(c.size()));
}

void require_admissible(const Eigen::VectorXd& vals) {
  if (!(Discretization::min_plus_one(vals) > 0.0))
    throw ConstraintViolation("w + 1 <= 0 at a quadrature node");
}

Eigen::VectorXd solve_linear(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  Eigen::VectorXd x = A.partialPivLu().solve(b);
  if (!x.allFinite()) x = A.fullPivLu().solve(b);
  if (!x.allFinite()) throw NoConvergence("singular linear system in Newton step");
  return x;
}

bool is_constant(const AxisymFn& w) {
  const double lo = w.min_value(), hi = w.max_value();
  return hi - lo <= 1e-9 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
}

BranchPoint make_point(const Discretization& d, const Eigen::VectorXd& c, double lambda, double p, double rnorm,
                       int iters) {
  BranchPoint pt;
  pt.lambda = lambda;
  pt.w = d.fn(c);
  pt.residual_norm = rnorm;
  pt.iterations = iters;
  pt.min_w_plus_1 = 1.0 + pt.w.min_value();
  if (!is_constant(pt.w)) pt.nodal_valid = try_count_nodal_class(pt.w, pt.nodal);
  pt.bounds_ok = validate_solution(pt, p).passed();
  return pt;
}

// Largest step fraction in (0, 1] keeping min(w + 1) above the floor.
double admissible_fraction(const Discretization& d, const Eigen::VectorXd& c, const Eigen::VectorXd& dc,
                           double floor, Eigen::VectorXd& vals_out) {
  double alpha = 1.0;
  while (alpha > 1e-12) {
    vals_out = d.values(c + alpha * dc);
    if (Discretization::min_plus_one(vals_out) > floor) return alpha;
    alpha *= 0.5;
  }
  return 0.0;
}

struct NewtonOutcome {
  Eigen::VectorXd c;
  double rnorm = kInf;
  int iters = 0;
};

NewtonOutcome newton_core(const Discretization& d, Eigen::VectorXd c, double lambda, double p,
                          const SolverOptions& opts) {
  Eigen::VectorXd vals = d.values(c);
  require_admissible(vals);
  for (int it = 0; it <= opts.max_iter; ++it) {
    Eigen::VectorXd F = d.F(c, vals, lambda, p);
    const double rnorm = F.norm();
    if (!std::isfinite(rnorm)) throw NoConvergence("non-finite residual in Newton iteration");
    const bool small = rnorm < opts.newton_tol;
    if (small && opts.step_tol <= 0.0) return {c, rnorm, it};
    if (it == opts.max_iter) break;
    Eigen::VectorXd dc = solve_linear(d.J(vals, lambda, p), -F);
    if (small && dc.norm() < opts.step_tol) {
      c += dc;
      vals = d.values(c);
      require_admissible(vals);
      return {c, d.F(c, vals, lambda, p).norm(), it + 1};
    }
    const double alpha = admissible_fraction(d, c, dc, opts.positivity_floor, vals);
    if (alpha == 0.0) throw ConstraintViolation("no Newton step keeps w + 1 above the floor");
    c += alpha * dc;
  }
  throw NoConvergence("Newton did not converge in " + std::to_string(opts.max_iter) + " iterations at lambda = " +
                      std::to_string(lambda));
}

// Newton on F(c, lambda) = 0 together with one scalar constraint a . (c, lambda) = b.
struct BorderedOutcome {
  Eigen::VectorXd c;
  double lambda = 0.0;
  double rnorm = kInf;
  int iters = 0;
  bool ok = false;
};

BorderedOutcome bordered_newton(const Discretization& d, Eigen::VectorXd c, double lambda, double p,
                                const Eigen::VectorXd& a_c, double a_l, double b, int max_iter,
                                const SolverOptions& opts) {
  BorderedOutcome out;
  const int K = d.K;
  Eigen::VectorXd vals = d.values(c);
  if (!(Discretization::min_plus_one(vals) > opts.positivity_floor)) return out;
  for (int it = 0; it <= max_iter; ++it) {
    const Eigen::VectorXd F = d.F(c, vals, lambda, p);
    const double g = a_c.dot(c) + a_l * lambda - b;
    const double rnorm = F.norm();
    if (!std::isfinite(rnorm) || lambda <= 0.0) return out;
    if (rnorm < opts.newton_tol && std::abs(g) < 1e-13 * std::max(1.0, std::abs(b))) {
      out = {c, lambda, rnorm, it, true};
      return out;
    }
    if (it == max_iter) break;
    Eigen::MatrixXd A(K + 1, K + 1);
    A.topLeftCorner(K, K) = d.J(vals, lambda, p);
    A.topRightCorner(K, 1) = d.F_lambda(c, vals, p);
    A.bottomLeftCorner(1, K) = a_c.transpose();
    A(K, K) = a_l;
    Eigen::VectorXd rhs(K + 1);
    rhs.head(K) = -F;
    rhs(K) = -g;
    Eigen::VectorXd step;
    try {
      step = solve_linear(A, rhs);
    } catch (const NoConvergence&) {
      return out;
    }
    const Eigen::VectorXd dc = step.head(K);
    const double alpha = admissible_fraction(d, c, dc, opts.positivity_floor, vals);
    if (alpha == 0.0) return out;
    c += alpha * dc;
    lambda += alpha * step(K);
  }
  return out;
}

}  // namespace

void ProblemParams::validate() const {
  if (N < 2) throw DomainError("N must be >= 2");
  if (!(p > 1.0)) throw DomainError("p must exceed 1");
  if (!(p < critical_exponent(N))) throw DomainError("p must be below the critical exponent (N+2)/(N-2)");
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
}

double critical_exponent(int N) {
  if (N < 2) throw DomainError("critical_exponent: N must be >= 2");
  return N == 2 ? kInf : double(N + 2) / double(N - 2);
}

double nonlinear_remainder(double w, double p) {
  if (std::abs(w) < 0.25) {
    // binomial series from the quadratic term on
    double coef = p * (p - 1.0) / 2.0, pw = w * w, sum = 0.0;
    for (int j = 2; j < 80; ++j) {
      const double term = coef * pw;
      sum += term;
      if (std::abs(term) <= 1e-18 * std::abs(sum) || coef == 0.0) break;
      coef *= (p - j) / (j + 1.0);
      pw *= w;
    }
    return sum;
  }
  return std::pow(1.0 + w, p) - p * w - 1.0;
}

double nonlinear_remainder_derivative(double w, double p) { return p * std::expm1((p - 1.0) * std::log1p(w)); }

AxisymFn residual(const AxisymFn& w, const ProblemParams& params) {
  params.validate();
  if (w.basis().dimension() != params.N) throw DomainError("basis dimension differs from N");
  Discretization d(w.basis_ptr());
  const auto c = coeff_vector(w);
  const auto vals = d.values(c);
  require_admissible(vals);
  return d.fn(d.F(c, vals, params.lambda, params.p));
}

double operator_form_mu(double lambda, double p) { return (p - 1.0) * lambda + 1.0; }

AxisymFn residual_operator_form(const AxisymFn& w, double mu, double p) {
  Discretization d(w.basis_ptr());
  const auto c = coeff_vector(w);
  const auto vals = d.values(c);
  require_admissible(vals);
  const Eigen::VectorXd T = (d.nu.array() + 1.0).inverse().matrix();
  const Eigen::VectorXd R = d.BW * d.remainder(vals, p);
  const Eigen::VectorXd f = c - mu * T.cwiseProduct(c) - ((mu - 1.0) / (p - 1.0)) * T.cwiseProduct(R);
  return d.fn(f);
}

Eigen::MatrixXd jacobian(const AxisymFn& w, const ProblemParams& params) {
  params.validate();
  Discretization d(w.basis_ptr());
  const auto vals = d.values(coeff_vector(w));
  require_admissible(vals);
  return d.J(vals, params.lambda, params.p);
}

Eigen::VectorXd lambda_derivative(const AxisymFn& w, const ProblemParams& params) {
  params.validate();
  Discretization d(w.basis_ptr());
  const auto c = coeff_vector(w);
  const auto vals = d.values(c);
  require_admissible(vals);
  return d.F_lambda(c, vals, params.p);
}

BranchPoint newton_solve(const AxisymFn& w0, const ProblemParams& params, const SolverOptions& opts) {
  params.validate();
  if (w0.basis().dimension() != params.N) throw DomainError("basis dimension differs from N");
  Discretization d(w0.basis_ptr());
  const auto out = newton_core(d, coeff_vector(w0), params.lambda, params.p, opts);
  return make_point(d, out.c, params.lambda, params.p, out.rnorm, out.iters);
}

double bifurcation_point(int N, double p, int k) {
  if (N < 2 || !(p > 1.0) || k < 0) throw DomainError("bifurcation_point: need N >= 2, p > 1, k >= 0");
  return double(k) * double(k + N - 1) / (p - 1.0);
}

std::vector<double> bifurcation_points(int N, double p, int k_max) {
  std::vector<double> out;
  for (int k = 1; k <= k_max; ++k) out.push_back(bifurcation_point(N, p, k));
  return out;
}

double default_switch_offset(int N, double p, int k) {
  return 1e-2 * (bifurcation_point(N, p, k + 1) - bifurcation_point(N, p, k));
}

BranchPoint branch_switch(int k, const BasisPtr& basis, const ProblemParams& params, double s,
                          const SolverOptions& opts) {
  params.validate();
  if (k < 1 || k >= basis->modes()) throw DomainError("branch_switch: mode index out of range");
  if (s == 0.0) throw DomainError("branch_switch: amplitude s must be nonzero");
  if (basis->dimension() != params.N) throw DomainError("basis dimension differs from N");
  Discretization d(basis);
  const double lk = bifurcation_point(params.N, params.p, k);
  std::string last_issue = "no attempt converged";

  auto accept = [&](const Eigen::VectorXd& c, double rnorm, int iters, BranchPoint& out) {
    out = make_point(d, c, params.lambda, params.p, rnorm, iters);
    if (out.nodal_valid && out.nodal.k == k) return true;
    last_issue = "converged to a solution of nodal class " + std::to_string(out.nodal_class());
    return false;
  };

  BranchPoint pt;
  for (double sign : {1.0, -1.0}) {
    Eigen::VectorXd c0 = Eigen::VectorXd::Zero(d.K);
    c0(k) = sign * s;
    try {
      const auto out = newton_core(d, c0, params.lambda, params.p, opts);
      if (accept(out.c, out.rnorm, out.iters, pt)) return pt;
    } catch (const NumericalError& e) {
      last_issue = e.what();
    }

    // Crandall-Rabinowitz: fix the phi_k coefficient at sigma and solve for (c, lambda).
    // March sigma until lambda(sigma) brackets the target, then refine by regula falsi.
    Eigen::VectorXd a = Eigen::VectorXd::Zero(d.K);
    a(k) = 1.0;
    auto solve_at = [&](double sigma, Eigen::VectorXd guess, double lguess) {
      guess(k) = sigma;
      return bordered_newton(d, guess, lguess, params.p, a, 0.0, sigma, 60, opts);
    };
    const double target = params.lambda;
    const double ltol = 1e-12 * std::max(1.0, target);
    double sa = sign * s;
    auto ba = solve_at(sa, c0, lk);
    if (!ba.ok) continue;
    bool hit = std::abs(ba.lambda - target) < ltol;
    // lambda(sigma) - lambda_k grows with |sigma| near the bifurcation point
    const double sgn = sa > 0.0 ? 1.0 : -1.0;
    const double dir = (ba.lambda < target) == (ba.lambda > lk) ? sgn : -sgn;
    double h = 0.5 * std::abs(s), sb = sa;
    BorderedOutcome bb = ba;
    bool bracketed = false;
    for (int it = 0; it < 400 && !hit && !bracketed && h > 1e-10; ++it) {
      const double trial = sb + dir * h;
      if (trial * sgn <= 0.0) {
        h *= 0.5;
        continue;
      }
      auto bt = solve_at(trial, bb.c, bb.lambda);
      if (!bt.ok) {
        h *= 0.5;
        continue;
      }
      sa = sb;
      ba = bb;
      sb = trial;
      bb = bt;
      hit = std::abs(bb.lambda - target) < ltol;
      bracketed = (ba.lambda - target) * (bb.lambda - target) < 0.0;
      h = std::min(1.5 * h, 0.5);
    }
    int side = 0;
    for (int it = 0; it < 200 && bracketed && !hit; ++it) {
      double ga = ba.lambda - target, gb = bb.lambda - target;
      if (side == 1) ga *= 0.5;
      if (side == -1) gb *= 0.5;
      const double sm = sb - gb * (sb - sa) / (gb - ga);
      auto bm = solve_at(sm, std::abs(sm - sa) < std::abs(sm - sb) ? ba.c : bb.c,
                         std::abs(sm - sa) < std::abs(sm - sb) ? ba.lambda : bb.lambda);
      if (!bm.ok) break;
      if (std::abs(bm.lambda - target) < ltol || std::abs(sb - sa) < 1e-15) {
        bb = bm;
        hit = true;
        break;
      }
      if ((bm.lambda - target) * (bb.lambda - target) < 0.0) {
        sa = sb;
        ba = bb;
        side = 0;
      } else {
        side = -1;
      }
      sb = sm;
      bb = bm;
      if (side == 0) side = 1;
    }
    auto& b1 = bb;
    if (!hit) {
      last_issue = "Crandall-Rabinowitz march did not reach the target lambda; use continuation for targets far from lambda_k";
      continue;
    }
    try {
      const auto out = newton_core(d, b1.c, params.lambda, params.p, opts);
      if (accept(out.c, out.rnorm, out.iters, pt)) return pt;
    } catch (const NumericalError& e) {
      last_issue = e.what();
    }
  }
  if (last_issue.rfind("converged to a solution", 0) == 0) throw NodalMismatch("branch_switch: " + last_issue);
  throw NoConvergence("branch_switch: " + last_issue);
}

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::reached_target: return "reached_target";
    case StopReason::target_not_ahead: return "target_not_ahead";
    case StopReason::fold_limit: return "fold_limit";
    case StopReason::step_collapse: return "step_collapse";
    case StopReason::nodal_change: return "nodal_change";
    case StopReason::validation_failure: return "validation_failure";
    case StopReason::max_steps: return "max_steps";
  }
  return "unknown";
}

nlohmann::json Branch::summary() const {
  nlohmann::json j;
  j["origin_k"] = origin_k;
  j["points"] = points.size();
  j["lambda_coverage"] = {lambda_min, lambda_max};
  j["stop_reason"] = std::string(to_string(stop));
  j["folds"] = folds;
  j["message"] = message;
  return j;
}

Branch continue_branch(const BranchPoint& start, int origin_k, double p, double lambda_target,
                       const ContinuationOptions& opts) {
  Branch br;
  br.origin_k = origin_k;
  br.points.push_back(start);
  br.lambda_min = br.lambda_max = start.lambda;
  if (!(lambda_target > start.lambda)) {
    br.stop = StopReason::target_not_ahead;
    br.message = "target lambda is not above the start; nothing to do under the increasing-lambda policy";
    return br;
  }
  const auto& basis = start.w.basis_ptr();
  Discretization d(basis);
  ProblemParams check{basis->dimension(), p, start.lambda};
  check.validate();

  Eigen::VectorXd c = coeff_vector(start.w);
  double lambda = start.lambda;

  // initial tangent from J z = -F_lambda
  Eigen::VectorXd tc;
  double tl = 1.0;
  {
    const auto vals = d.values(c);
    require_admissible(vals);
    tc = solve_linear(d.J(vals, lambda, p), -d.F_lambda(c, vals, p));
    const double nrm = std::sqrt(tc.squaredNorm() + 1.0);
    tc /= nrm;
    tl = 1.0 / nrm;
  }

  double ds = opts.ds_init;
  int nodal_retries = 0;
  for (int step = 0; step < opts.max_steps; ++step) {
    const Eigen::VectorXd cp = c + ds * tc;
    const double lp = lambda + ds * tl;
    const double b = tc.dot(cp) + tl * lp;
    auto out = bordered_newton(d, cp, lp, p, tc, tl, b, opts.corrector_max_iter, opts.newton);
    if (!out.ok) {
      ds *= 0.5;
      if (ds < opts.ds_min) {
        br.stop = StopReason::step_collapse;
        br.message = "arclength step fell below " + std::to_string(opts.ds_min) + " near lambda = " +
                     std::to_string(lambda);
        return br;
      }
      continue;
    }

    // the last point before the target is reached: land exactly on it
    const bool crossing = out.lambda >= lambda_target && lambda < lambda_target;
    BranchPoint pt;
    if (crossing) {
      const double f = (lambda_target - lambda) / (out.lambda - lambda);
      Eigen::VectorXd guess = c + f * (out.c - c);
      try {
        const auto land = newton_core(d, guess, lambda_target, p, opts.newton);
        pt = make_point(d, land.c, lambda_target, p, land.rnorm, land.iters);
      } catch (const NumericalError&) {
        ds *= 0.5;
        if (ds < opts.ds_min) {
          br.stop = StopReason::step_collapse;
          br.message = "could not land on the target lambda";
          return br;
        }
        continue;
      }
    } else {
      pt = make_point(d, out.c, out.lambda, p, out.rnorm, out.iters);
    }

    if (!pt.nodal_valid || pt.nodal.k != origin_k) {
      // a large step can jump to a neighbouring branch; retry smaller first
      if (nodal_retries < 4 && ds * 0.5 >= opts.ds_min) {
        ++nodal_retries;
        ds *= 0.5;
        continue;
      }
      br.stop = StopReason::nodal_change;
      br.message = "nodal class changed from " + std::to_string(origin_k) + " to " +
                   std::to_string(pt.nodal_class()) + " at lambda = " + std::to_string(pt.lambda) +
                   " (suspected numerical crossing)";
      return br;
    }
    nodal_retries = 0;
    const auto report = validate_solution(pt, p);
    if (!report.passed()) {
      br.stop = StopReason::validation_failure;
      br.message = "validation failed at lambda = " + std::to_string(pt.lambda) + ": " + report.to_json().dump();
      return br;
    }

    const Eigen::VectorXd new_c = coeff_vector(pt.w);
    const double new_l = pt.lambda;
    br.points.push_back(pt);
    br.lambda_min = std::min(br.lambda_min, new_l);
    br.lambda_max = std::max(br.lambda_max, new_l);
    if (crossing) {
      br.stop = StopReason::reached_target;
      return br;
    }

    // secant tangent, with fold detection on the lambda component
    Eigen::VectorXd sc = new_c - c;
    double sl = new_l - lambda;
    const double nrm = std::sqrt(sc.squaredNorm() + sl * sl);
    sc /= nrm;
    sl /= nrm;
    if ((sl > 0.0) != (tl > 0.0)) {
      ++br.folds;
      if (br.folds > opts.fold_limit) {
        br.stop = StopReason::fold_limit;
        br.message = "fold budget exhausted";
        return br;
      }
    }
    tc = sc;
    tl = sl;
    c = new_c;
    lambda = new_l;
    if (out.iters <= 3) ds = std::min(1.5 * ds, opts.ds_max);
    else if (out.iters >= 8) ds *= 0.7;
  }
  br.stop = StopReason::max_steps;
  br.message = "step budget exhausted";
  return br;
}

nlohmann::json ValidationReport::to_json() const {
  return {{"v_min", v_min},
          {"v_max", v_max},
          {"v_ratio", v_ratio},
          {"v_positive", v_positive},
          {"min_w_plus_1", min_w_plus_1},
          {"floor_ok", floor_ok},
          {"constant", constant},
          {"nodal_ok", nodal_ok},
          {"nodal_message", nodal_message},
          {"max_point_bound", max_point_bound},
          {"max_point_ok", max_point_ok},
          {"lambda_within_cap", lambda_within_cap},
          {"passed", passed()}};
}

ValidationReport validate_solution(const BranchPoint& pt, double p, double Lambda_cap, double floor) {
  ValidationReport r;
  const double scale = std::pow(pt.lambda, 1.0 / (p - 1.0));
  const double wmin = pt.w.min_value(), wmax = pt.w.max_value();
  r.v_min = scale * (1.0 + wmin);
  r.v_max = scale * (1.0 + wmax);
  r.v_positive = r.v_min > 0.0 && std::isfinite(r.v_max);
  r.v_ratio = r.v_positive ? r.v_max / r.v_min : kInf;
  r.min_w_plus_1 = 1.0 + wmin;
  r.floor_ok = r.min_w_plus_1 >= floor;
  r.lambda_within_cap = pt.lambda <= Lambda_cap;
  r.max_point_bound = scale;
  r.max_point_ok = r.v_max >= scale;
  r.constant = is_constant(pt.w);
  if (r.constant) {
    r.nodal_ok = true;
    r.nodal_message = "constant solution";
  } else {
    NodalClass nc;
    try {
      nc = count_nodal_class(pt.w);
      r.nodal_ok = true;
      r.nodal_message = "class " + std::to_string(nc.k);
    } catch (const NumericalError& e) {
      r.nodal_ok = false;
      r.nodal_message = e.what();
    }
  }
  return r;
}

SolverOptions probe_solver_options() {
  SolverOptions o;
  o.max_iter = 300;
  o.step_tol = 1e-12;
  return o;
}

nlohmann::json MultistartReport::to_json() const {
  return {{"starts", starts},
          {"to_zero", to_zero},
          {"to_nonconstant", to_nonconstant},
          {"failed", failed},
          {"max_final_norm", max_final_norm},
          {"final_norms", final_norms},
          {"nodal_classes", nodal_classes}};
}

MultistartReport uniqueness_probe(const BasisPtr& basis, const ProblemParams& params, std::uint64_t seed, int starts,
                                  double amp_lo, double amp_hi, double zero_tol) {
  params.validate();
  if (!(amp_lo > 0.0 && amp_hi >= amp_lo && amp_hi < 1.0)) throw DomainError("amplitude range must lie in (0, 1)");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(amp_lo, amp_hi);
  std::normal_distribution<double> gauss;
  const int modes = std::min(basis->modes(), 8);
  const auto opts = probe_solver_options();
  MultistartReport rep;
  rep.starts = starts;
  for (int i = 0; i < starts; ++i) {
    const double a = amp(rng);
    std::vector<double> c(basis->modes(), 0.0);
    for (int k = 0; k < modes; ++k) c[k] = gauss(rng) / (1.0 + k);
    auto w0 = AxisymFn::from_coeffs(basis, c);
    w0 = w0 * (a / w0.sup_norm());
    try {
      const auto pt = newton_solve(w0, params, opts);
      const double nrm = pt.w.sup_norm();
      rep.final_norms.push_back(nrm);
      rep.max_final_norm = std::max(rep.max_final_norm, nrm);
      if (nrm <= zero_tol) {
        ++rep.to_zero;
        rep.nodal_classes.push_back(-1);
      } else {
        ++rep.to_nonconstant;
        rep.nodal_classes.push_back(pt.nodal_class());
      }
    } catch (const NumericalError&) {
      ++rep.failed;
      rep.final_norms.push_back(std::numeric_limits<double>::quiet_NaN());
      rep.nodal_classes.push_back(-2);
    }
  }
  return rep;
}

VeronMapping veron_mapping(int n, double c) {
  if (n < 3) throw DomainError("veron_mapping: n must be >= 3");
  VeronMapping m;
  m.n = n;
  m.c = c;
  m.N = n - 1;
  m.p = double(n + 2) / double(n - 2);
  m.lambda = (n - 2) * (n - 2) / 4.0 - c;
  m.threshold = double(n - 1) * double(n - 2) / 4.0;
  m.c_threshold = -(n - 2) / 4.0;
  return m;
}

nlohmann::json VeronSummary::to_json() const {
  nlohmann::json j;
  j["n"] = map.n;
  j["c"] = map.c;
  j["N"] = map.N;
  j["p"] = map.p;
  j["lambda"] = map.lambda;
  j["lambda_threshold"] = map.threshold;
  j["c_threshold"] = map.c_threshold;
  j["expected_nonconstant"] = expected_nonconstant;
  j["nonconstant_found"] = solutions.size();
  j["classes"] = classes;
  nlohmann::json bs = nlohmann::json::array();
  for (const auto& b : branches) bs.push_back(b.summary());
  j["branches"] = bs;
  j["probe"] = probe.to_json();
  j["notes"] = notes;
  return j;
}

VeronSummary veron_nonradial(int n, double c, const BasisPtr& basis, std::uint64_t seed,
                             const ContinuationOptions& opts) {
  VeronSummary s;
  s.map = veron_mapping(n, c);
  const auto& m = s.map;
  ProblemParams params{m.N, m.p, m.lambda};
  params.validate();
  if (basis->dimension() != m.N) throw DomainError("basis dimension must be n - 1");
  s.expected_nonconstant = m.lambda > m.threshold;

  for (int k = 1; bifurcation_point(m.N, m.p, k) < m.lambda && k < basis->modes() / 2; ++k) {
    const double lk = bifurcation_point(m.N, m.p, k);
    double delta = default_switch_offset(m.N, m.p, k);
    if (lk + delta >= m.lambda) delta = 0.5 * (m.lambda - lk);
    ProblemParams seed_params{m.N, m.p, lk + delta};
    BranchPoint start;
    try {
      start = branch_switch(k, basis, seed_params, 0.1, opts.newton);
    } catch (const NumericalError& e) {
      s.notes.push_back("k = " + std::to_string(k) + ": branch switch failed: " + e.what());
      continue;
    }
    auto br = continue_branch(start, k, m.p, m.lambda, opts);
    if (br.stop == StopReason::reached_target) {
      s.solutions.push_back(br.points.back());
      s.classes.push_back(k);
    } else {
      s.notes.push_back("k = " + std::to_string(k) + ": " + std::string(to_string(br.stop)) + ": " + br.message);
    }
    s.branches.push_back(std::move(br));
  }
  s.probe = uniqueness_probe(basis, params, seed);
  return s;
}

}  // namespace sphbif
