#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "sphbif/axisym_spectral.hpp"

namespace sphbif {

/// -Delta_{S^N} v = v^p - lambda v, written for w = lambda^{-1/(p-1)} v - 1:
///   -Delta w = lambda ((w + 1)^p - w - 1),  w > -1.
struct ProblemParams {
  int N = 2;
  double p = 3.0;
  double lambda = 1.0;

  /// Throws DomainError unless N >= 2, 1 < p < N* and lambda > 0.
  void validate() const;
};

/// (N+2)/(N-2) for N >= 3, +inf for N = 2.
double critical_exponent(int N);

struct SolverOptions {
  double newton_tol = 1e-11;
  int max_iter = 50;
  /// Floor kept on min(w + 1) by step halving.
  double positivity_floor = 1e-10;
  /// When positive, convergence also requires the last Newton step to be
  /// shorter than this. Needed near singular Jacobians, where a small
  /// residual does not imply a small error.
  double step_tol = 0.0;
};

/// (w+1)^p - p w - 1, accurate for small |w|.
double nonlinear_remainder(double w, double p);
/// p ((w+1)^{p-1} - 1), accurate for small |w|.
double nonlinear_remainder_derivative(double w, double p);

/// F(w, lambda) = -Delta w - lambda((w+1)^p - w - 1). Throws ConstraintViolation if w + 1 <= 0 at a node.
AxisymFn residual(const AxisymFn& w, const ProblemParams& params);

/// f(w, mu) = w - mu T w - g(w, mu), T = (-Delta + I)^{-1}, g = ((mu-1)/(p-1)) T((w+1)^p - p w - 1).
AxisymFn residual_operator_form(const AxisymFn& w, double mu, double p);

/// mu = (p - 1) lambda + 1.
double operator_form_mu(double lambda, double p);

/// dF/dc in coefficient space: diag(nu_k) - lambda Galerkin(p (w+1)^{p-1} - 1).
Eigen::MatrixXd jacobian(const AxisymFn& w, const ProblemParams& params);

/// dF/dlambda in coefficient space.
Eigen::VectorXd lambda_derivative(const AxisymFn& w, const ProblemParams& params);

struct BranchPoint {
  double lambda = 0.0;
  AxisymFn w;
  NodalClass nodal;
  /// False when w is (numerically) constant or has a non-simple or endpoint zero.
  bool nodal_valid = false;
  double residual_norm = 0.0;
  bool bounds_ok = false;
  double min_w_plus_1 = 0.0;
  int iterations = 0;

  double sup_norm() const { return w.sup_norm(); }
  /// Nodal class, or -1 when undefined.
  int nodal_class() const { return nodal_valid ? nodal.k : -1; }
};

/// Damped Newton at fixed lambda from w0. Throws NoConvergence after
/// max_iter and ConstraintViolation when no admissible step exists.
BranchPoint newton_solve(const AxisymFn& w0, const ProblemParams& params, const SolverOptions& opts = {});

/// lambda_k = k(k + N - 1)/(p - 1) for k = 1..k_max.
std::vector<double> bifurcation_points(int N, double p, int k_max);
double bifurcation_point(int N, double p, int k);
/// Default seed offset 1e-2 (lambda_{k+1} - lambda_k).
double default_switch_offset(int N, double p, int k);

/// Solution in S_k near lambda_k. params.lambda is the target (typically
/// lambda_k + delta). Newton from s phi_k first, then a Crandall-Rabinowitz
/// bordered solve with <w, phi_k> fixed. Throws NoConvergence or NodalMismatch.
BranchPoint branch_switch(int k, const BasisPtr& basis, const ProblemParams& params, double s,
                          const SolverOptions& opts = {});

enum class StopReason {
  reached_target,
  target_not_ahead,
  fold_limit,
  step_collapse,
  nodal_change,
  validation_failure,
  max_steps,
};

std::string_view to_string(StopReason r);

struct ContinuationOptions {
  double ds_init = 0.05;
  double ds_max = 0.5;
  double ds_min = 1e-8;
  int max_steps = 5000;
  int fold_limit = 4;
  int corrector_max_iter = 12;
  SolverOptions newton;
};

struct Branch {
  int origin_k = 0;
  std::vector<BranchPoint> points;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  StopReason stop = StopReason::max_steps;
  int folds = 0;
  std::string message;

  nlohmann::json summary() const;
};

/// Pseudo-arclength continuation from a converged start towards
/// lambda_target (increasing lambda preferred, folds followed). Ends by
/// landing exactly on lambda_target or with the stop reason recorded.
Branch continue_branch(const BranchPoint& start, int origin_k, double p, double lambda_target,
                       const ContinuationOptions& opts = {});

struct ValidationReport {
  double v_min = 0.0;
  double v_max = 0.0;
  double v_ratio = 0.0;
  bool v_positive = false;
  double min_w_plus_1 = 0.0;
  bool floor_ok = false;
  bool constant = false;
  bool nodal_ok = false;
  std::string nodal_message;
  double max_point_bound = 0.0;
  bool max_point_ok = false;
  bool lambda_within_cap = true;

  bool passed() const { return v_positive && floor_ok && nodal_ok && max_point_ok; }
  nlohmann::json to_json() const;
};

/// Checks the a priori bounds on v = lambda^{1/(p-1)} (w + 1), the
/// positivity floor, simple interior zeros with nonvanishing endpoints and
/// the maximum-point inequality max v >= lambda^{1/(p-1)}.
ValidationReport validate_solution(const BranchPoint& pt, double p, double Lambda_cap = 1e300,
                                   double floor = 1e-10);

struct MultistartReport {
  int starts = 0;
  int to_zero = 0;
  int to_nonconstant = 0;
  int failed = 0;
  double max_final_norm = 0.0;
  std::vector<double> final_norms;
  std::vector<int> nodal_classes;

  nlohmann::json to_json() const;
};

/// Newton from `starts` seeded random starts with sup-norm in [amp_lo, amp_hi].
/// Solutions with sup |w| <= zero_tol count as the constant solution.
MultistartReport uniqueness_probe(const BasisPtr& basis, const ProblemParams& params, std::uint64_t seed,
                                  int starts = 50, double amp_lo = 1e-3, double amp_hi = 0.5,
                                  double zero_tol = 1e-8);

/// Options used by the multistart probe: residual and step criteria with a
/// larger iteration budget, since Newton only converges linearly at lambda_1.
SolverOptions probe_solver_options();

/// Radial-to-sphere reduction of v_tt + Delta_{S^{n-1}} v - ((n-2)^2/4 - c) v + v^{(n+2)/(n-2)} = 0.
struct VeronMapping {
  int n = 4;
  double c = 0.0;
  int N = 3;
  double p = 3.0;
  double lambda = 0.0;
  /// N/(p - 1) = (n-1)(n-2)/4.
  double threshold = 0.0;
  /// -(n-2)/4.
  double c_threshold = 0.0;
};

VeronMapping veron_mapping(int n, double c);

struct VeronSummary {
  VeronMapping map;
  bool expected_nonconstant = false;
  std::vector<BranchPoint> solutions;
  std::vector<int> classes;
  std::vector<Branch> branches;
  MultistartReport probe;
  std::vector<std::string> notes;

  nlohmann::json to_json() const;
};

/// Searches nonconstant solutions of the mapped sphere problem: one branch
/// per lambda_k < lambda continued to lambda, plus a multistart probe.
VeronSummary veron_nonradial(int n, double c, const BasisPtr& basis, std::uint64_t seed,
                             const ContinuationOptions& opts = {});

}  // namespace sphbif
