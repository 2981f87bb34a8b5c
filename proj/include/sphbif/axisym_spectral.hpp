#pragma once

#include <memory>
#include <span>
#include <vector>

#include <json.hpp>

namespace sphbif {

/// Eigenbasis of -Laplacian on S^N restricted to functions of t = theta_{N+1}.
///
/// The k-th basis function is the Gegenbauer polynomial of parameter (N-1)/2,
/// orthonormal for the weight (1 - t^2)^{(N-2)/2} on [-1, 1]; its eigenvalue
/// nu_k = k(k + N - 1) is assigned in closed form. Quadrature is the M-point
/// Gauss rule for the same weight. Immutable once built.
class GegenbauerBasis {
 public:
  /// Throws DomainError for N < 2, K < 2 or M < K and BasisError when the
  /// discrete orthonormality defect exceeds 1e-10.
  static std::shared_ptr<const GegenbauerBasis> build(int N, int K, int M = -1);

  int dimension() const { return N_; }
  int modes() const { return K_; }
  int nodes_count() const { return M_; }
  /// Exponent a of the weight (1 - t^2)^a.
  double weight_exponent() const { return 0.5 * (N_ - 2); }

  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  std::span<const double> eigenvalues() const { return eigenvalues_; }
  /// phi_k(t_j), stored row-major by mode: basis(k, j).
  double basis(int k, int j) const { return basis_[std::size_t(k) * M_ + j]; }
  /// Largest |sum_j w_j phi_a phi_b - delta_ab| seen at construction.
  double orthonormality_defect() const { return defect_; }
  /// Integral of the weight over [-1, 1].
  double weight_integral() const { return mass_; }

  std::vector<double> analyze(std::span<const double> node_values) const;
  std::vector<double> synthesize(std::span<const double> coeffs) const;

  /// Clenshaw summation of sum_k c_k phi_k(t). Throws DomainError outside [-1, 1].
  double evaluate(std::span<const double> coeffs, double t) const;
  /// First and second t-derivatives of sum_k c_k phi_k at t.
  void evaluate_derivatives(std::span<const double> coeffs, double t, double& value, double& d1, double& d2) const;

  /// phi_k(t), phi_k'(t), phi_k''(t) for k < count via the three-term recurrence.
  void basis_functions(double t, int count, std::vector<double>& value, std::vector<double>* d1 = nullptr,
                       std::vector<double>* d2 = nullptr) const;

  /// Recurrence coefficient: t phi_k = b_{k+1} phi_{k+1} + b_k phi_{k-1}.
  double recurrence(int k) const;

  nlohmann::json describe() const;

 private:
  GegenbauerBasis(int N, int K, int M);

  int N_, K_, M_;
  double mass_ = 0.0, defect_ = 0.0;
  std::vector<double> nodes_, weights_, eigenvalues_, basis_;
};

using BasisPtr = std::shared_ptr<const GegenbauerBasis>;

/// Gauss nodes and weights for (1 - t^2)^a on [-1, 1] (symmetric Jacobi rule).
void gauss_gegenbauer(int m, double a, std::vector<double>& nodes, std::vector<double>& weights);

/// Axisymmetric function on S^N: spectral coefficients plus cached node values.
class AxisymFn {
 public:
  AxisymFn() = default;
  static AxisymFn from_coeffs(BasisPtr basis, std::vector<double> coeffs);
  static AxisymFn from_node_values(BasisPtr basis, std::vector<double> values);
  static AxisymFn zero(BasisPtr basis);
  /// Constant c.
  static AxisymFn constant(BasisPtr basis, double c);
  /// Unit coefficient on mode k.
  static AxisymFn mode(BasisPtr basis, int k, double amplitude = 1.0);

  const GegenbauerBasis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const { return basis_; }
  std::span<const double> coeffs() const { return coeffs_; }
  std::span<const double> node_values() const { return values_; }

  double operator()(double t) const { return basis_->evaluate(coeffs_, t); }
  double derivative(double t) const;

  /// Max |f| over nodes and both endpoints.
  double sup_norm() const;
  double coeff_norm() const;
  double min_value() const;
  double max_value() const;

  AxisymFn operator+(const AxisymFn& o) const;
  AxisymFn operator-(const AxisymFn& o) const;
  AxisymFn operator*(double s) const;
  /// f(-t); odd modes flip sign.
  AxisymFn reflected() const;

 private:
  AxisymFn(BasisPtr basis, std::vector<double> coeffs, std::vector<double> values);

  BasisPtr basis_;
  std::vector<double> coeffs_, values_;
};

/// coeffs_k -> nu_k coeffs_k.
AxisymFn apply_neg_laplacian(const AxisymFn& f);

/// Pointwise -(1 - t^2) f'' + N t f' at the quadrature nodes computed from
/// derivatives of the synthesized profile (cross-check of the diagonal form).
std::vector<double> collocation_neg_laplacian(const AxisymFn& f);

struct NodalOptions {
  int fine_grid_size = 4096;
  double simplicity_tol = 1e-6;
  /// Endpoint floor relative to sup |f|.
  double value_floor = 1e-10;
};

struct NodalClass {
  int k = 0;
  std::vector<double> zero_locations;
  std::vector<bool> simple;
  std::vector<double> slopes;
  double endpoint_minus = 0.0;
  double endpoint_plus = 0.0;
};

/// Counts and refines the interior zeros of f. Throws NonSimpleZero when a
/// bracketed root has |f'| <= simplicity_tol * sup|f| and EndpointZero when
/// |f(+-1)| is below the floor; both mean f is in no nodal class S_k.
NodalClass count_nodal_class(const AxisymFn& f, const NodalOptions& opts = {});

/// Non-throwing variant: returns false instead of throwing and still fills
/// whatever was found.
bool try_count_nodal_class(const AxisymFn& f, NodalClass& out, const NodalOptions& opts = {});

}  // namespace sphbif
