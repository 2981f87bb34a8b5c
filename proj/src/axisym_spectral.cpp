#include "sphbif/axisym_spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "sphbif/errors.hpp"

namespace sphbif {

namespace {

double weight_mass(double a) {
  return std::exp(0.5 * std::log(std::numbers::pi) + std::lgamma(a + 1.0) - std::lgamma(a + 1.5));
}

// Orthonormal symmetric-Jacobi recurrence coefficient b_k, k >= 1.
double recurrence_coeff(int k, double a) {
  const double kk = k;
  return std::sqrt(kk * (kk + 2.0 * a) / ((2.0 * kk + 2.0 * a - 1.0) * (2.0 * kk + 2.0 * a + 1.0)));
}

// phi_m(t) and phi_m'(t) for the orthonormal family.
void top_polynomial(int m, double a, double mass, double t, double& p, double& dp) {
  double pm1 = 0.0, dpm1 = 0.0;
  double p0 = 1.0 / std::sqrt(mass), dp0 = 0.0;
  for (int k = 0; k < m; ++k) {
    const double bk = k > 0 ? recurrence_coeff(k, a) : 0.0;
    const double bk1 = recurrence_coeff(k + 1, a);
    const double pn = (t * p0 - bk * pm1) / bk1;
    const double dpn = (p0 + t * dp0 - bk * dpm1) / bk1;
    pm1 = p0;
    dpm1 = dp0;
    p0 = pn;
    dp0 = dpn;
  }
  p = p0;
  dp = dp0;
}

}  // namespace

void gauss_gegenbauer(int m, double a, std::vector<double>& nodes, std::vector<double>& weights) {
  if (m < 1) throw DomainError("gauss_gegenbauer: need m >= 1");
  const double mass = weight_mass(a);
  nodes.assign(m, 0.0);
  weights.assign(m, 0.0);
  if (m > 1) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd sub(m - 1);
    for (int k = 1; k < m; ++k) sub(k - 1) = recurrence_coeff(k, a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    for (int j = 0; j < m; ++j) nodes[j] = es.eigenvalues()(j);
  }
  // Newton polish on phi_m, then symmetrize.
  for (int j = 0; j < m; ++j) {
    double t = nodes[j];
    for (int it = 0; it < 20; ++it) {
      double p, dp;
      top_polynomial(m, a, mass, t, p, dp);
      const double dt = p / dp;
      t -= dt;
      if (std::abs(dt) < 1e-17) break;
    }
    nodes[j] = t;
  }
  std::sort(nodes.begin(), nodes.end());
  for (int j = 0; j < m / 2; ++j) {
    const double s = 0.5 * (nodes[m - 1 - j] - nodes[j]);
    nodes[j] = -s;
    nodes[m - 1 - j] = s;
  }
  if (m % 2 == 1) nodes[m / 2] = 0.0;
  // Christoffel weights 1 / sum_{k<m} phi_k(t_j)^2.
  for (int j = 0; j < m; ++j) {
    const double t = nodes[j];
    double pm1 = 0.0, p0 = 1.0 / std::sqrt(mass);
    double sum = p0 * p0;
    for (int k = 0; k + 1 < m; ++k) {
      const double bk = k > 0 ? recurrence_coeff(k, a) : 0.0;
      const double pn = (t * p0 - bk * pm1) / recurrence_coeff(k + 1, a);
      pm1 = p0;
      p0 = pn;
      sum += p0 * p0;
    }
    weights[j] = 1.0 / sum;
  }
}

GegenbauerBasis::GegenbauerBasis(int N, int K, int M) : N_(N), K_(K), M_(M) {}

std::shared_ptr<const GegenbauerBasis> GegenbauerBasis::build(int N, int K, int M) {
  if (M < 0) M = 2 * K;
  if (N < 2) throw DomainError("GegenbauerBasis: sphere dimension N must be >= 2");
  if (K < 2) throw DomainError("GegenbauerBasis: need K >= 2 modes");
  if (M < K) throw DomainError("GegenbauerBasis: need M >= K quadrature nodes");
  auto b = std::shared_ptr<GegenbauerBasis>(new GegenbauerBasis(N, K, M));
  const double a = b->weight_exponent();
  b->mass_ = weight_mass(a);
  gauss_gegenbauer(M, a, b->nodes_, b->weights_);
  b->eigenvalues_.resize(K);
  for (int k = 0; k < K; ++k) b->eigenvalues_[k] = double(k) * double(k + N - 1);
  b->basis_.assign(std::size_t(K) * M, 0.0);
  std::vector<double> vals;
  for (int j = 0; j < M; ++j) {
    b->basis_functions(b->nodes_[j], K, vals);
    for (int k = 0; k < K; ++k) b->basis_[std::size_t(k) * M + j] = vals[k];
  }
  double defect = 0.0;
  for (int p = 0; p < K; ++p) {
    for (int q = p; q < K; ++q) {
      double s = 0.0;
      for (int j = 0; j < M; ++j) s += b->weights_[j] * b->basis(p, j) * b->basis(q, j);
      defect = std::max(defect, std::abs(s - (p == q ? 1.0 : 0.0)));
    }
  }
  b->defect_ = defect;
  if (defect > 1e-10)
    throw BasisError("GegenbauerBasis: orthonormality defect " + std::to_string(defect) + " exceeds 1e-10");
  return b;
}

double GegenbauerBasis::recurrence(int k) const { return k <= 0 ? 0.0 : recurrence_coeff(k, weight_exponent()); }

void GegenbauerBasis::basis_functions(double t, int count, std::vector<double>& value, std::vector<double>* d1,
                                      std::vector<double>* d2) const {
  value.assign(count, 0.0);
  if (d1) d1->assign(count, 0.0);
  if (d2) d2->assign(count, 0.0);
  if (count == 0) return;
  const double a = weight_exponent();
  value[0] = 1.0 / std::sqrt(mass_);
  for (int k = 0; k + 1 < count; ++k) {
    const double bk = k > 0 ? recurrence_coeff(k, a) : 0.0;
    const double bk1 = recurrence_coeff(k + 1, a);
    const double prev = k > 0 ? value[k - 1] : 0.0;
    value[k + 1] = (t * value[k] - bk * prev) / bk1;
    if (d1) {
      auto& d = *d1;
      const double dprev = k > 0 ? d[k - 1] : 0.0;
      d[k + 1] = (value[k] + t * d[k] - bk * dprev) / bk1;
      if (d2) {
        auto& dd = *d2;
        const double ddprev = k > 0 ? dd[k - 1] : 0.0;
        dd[k + 1] = (2.0 * d[k] + t * dd[k] - bk * ddprev) / bk1;
      }
    }
  }
}

std::vector<double> GegenbauerBasis::analyze(std::span<const double> node_values) const {
  if (int(node_values.size()) != M_) throw LengthMismatch("analyze: expected one value per quadrature node");
  std::vector<double> c(K_, 0.0);
  for (int k = 0; k < K_; ++k) {
    const double* row = &basis_[std::size_t(k) * M_];
    double s = 0.0;
    for (int j = 0; j < M_; ++j) s += weights_[j] * row[j] * node_values[j];
    c[k] = s;
  }
  return c;
}

std::vector<double> GegenbauerBasis::synthesize(std::span<const double> coeffs) const {
  if (int(coeffs.size()) != K_) throw LengthMismatch("synthesize: expected one coefficient per mode");
  std::vector<double> v(M_, 0.0);
  for (int k = 0; k < K_; ++k) {
    const double ck = coeffs[k];
    if (ck == 0.0) continue;
    const double* row = &basis_[std::size_t(k) * M_];
    for (int j = 0; j < M_; ++j) v[j] += ck * row[j];
  }
  return v;
}

double GegenbauerBasis::evaluate(std::span<const double> coeffs, double t) const {
  if (!(t >= -1.0 && t <= 1.0)) throw DomainError("evaluate: t outside [-1, 1]");
  const int K = int(coeffs.size());
  if (K == 0) return 0.0;
  const double a = weight_exponent();
  // y_k = c_k + (t / b_{k+1}) y_{k+1} - (b_{k+1} / b_{k+2}) y_{k+2}
  double y1 = 0.0, y2 = 0.0;
  for (int k = K - 1; k >= 0; --k) {
    const double bk1 = recurrence_coeff(k + 1, a);
    const double bk2 = recurrence_coeff(k + 2, a);
    const double y = coeffs[k] + (t / bk1) * y1 - (bk1 / bk2) * y2;
    y2 = y1;
    y1 = y;
  }
  return y1 / std::sqrt(mass_);
}

void GegenbauerBasis::evaluate_derivatives(std::span<const double> coeffs, double t, double& value, double& d1,
                                           double& d2) const {
  if (!(t >= -1.0 && t <= 1.0)) throw DomainError("evaluate_derivatives: t outside [-1, 1]");
  std::vector<double> v, dv, ddv;
  basis_functions(t, int(coeffs.size()), v, &dv, &ddv);
  value = d1 = d2 = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    value += coeffs[k] * v[k];
    d1 += coeffs[k] * dv[k];
    d2 += coeffs[k] * ddv[k];
  }
}

nlohmann::json GegenbauerBasis::describe() const {
  return {{"N", N_}, {"K", K_}, {"M", M_}};
}

// ---------------------------------------------------------------------------

AxisymFn::AxisymFn(BasisPtr basis, std::vector<double> coeffs, std::vector<double> values)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)), values_(std::move(values)) {
  for (double c : coeffs_)
    if (!std::isfinite(c)) throw DomainError("AxisymFn: non-finite coefficient");
}

AxisymFn AxisymFn::from_coeffs(BasisPtr basis, std::vector<double> coeffs) {
  if (int(coeffs.size()) != basis->modes()) throw LengthMismatch("AxisymFn: coefficient count != K");
  auto values = basis->synthesize(coeffs);
  return AxisymFn(std::move(basis), std::move(coeffs), std::move(values));
}

AxisymFn AxisymFn::from_node_values(BasisPtr basis, std::vector<double> values) {
  auto coeffs = basis->analyze(values);
  return from_coeffs(std::move(basis), std::move(coeffs));
}

AxisymFn AxisymFn::zero(BasisPtr basis) {
  std::vector<double> c(basis->modes(), 0.0);
  return from_coeffs(std::move(basis), std::move(c));
}

AxisymFn AxisymFn::constant(BasisPtr basis, double c) {
  std::vector<double> coeffs(basis->modes(), 0.0);
  coeffs[0] = c * std::sqrt(basis->weight_integral());
  return from_coeffs(std::move(basis), std::move(coeffs));
}

AxisymFn AxisymFn::mode(BasisPtr basis, int k, double amplitude) {
  if (k < 0 || k >= basis->modes()) throw DomainError("AxisymFn::mode: k outside basis");
  std::vector<double> coeffs(basis->modes(), 0.0);
  coeffs[k] = amplitude;
  return from_coeffs(std::move(basis), std::move(coeffs));
}

double AxisymFn::derivative(double t) const {
  double v, d1, d2;
  basis_->evaluate_derivatives(coeffs_, t, v, d1, d2);
  return d1;
}

double AxisymFn::sup_norm() const {
  double m = std::max(std::abs((*this)(-1.0)), std::abs((*this)(1.0)));
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double AxisymFn::coeff_norm() const {
  double s = 0.0;
  for (double c : coeffs_) s += c * c;
  return std::sqrt(s);
}

double AxisymFn::min_value() const {
  double m = std::min((*this)(-1.0), (*this)(1.0));
  for (double v : values_) m = std::min(m, v);
  return m;
}

double AxisymFn::max_value() const {
  double m = std::max((*this)(-1.0), (*this)(1.0));
  for (double v : values_) m = std::max(m, v);
  return m;
}

AxisymFn AxisymFn::operator+(const AxisymFn& o) const {
  if (basis_ != o.basis_) throw LengthMismatch("AxisymFn: different bases");
  std::vector<double> c(coeffs_);
  for (std::size_t k = 0; k < c.size(); ++k) c[k] += o.coeffs_[k];
  return from_coeffs(basis_, std::move(c));
}

AxisymFn AxisymFn::operator-(const AxisymFn& o) const { return *this + o * -1.0; }

AxisymFn AxisymFn::operator*(double s) const {
  std::vector<double> c(coeffs_);
  for (double& x : c) x *= s;
  return from_coeffs(basis_, std::move(c));
}

AxisymFn AxisymFn::reflected() const {
  std::vector<double> c(coeffs_);
  for (std::size_t k = 1; k < c.size(); k += 2) c[k] = -c[k];
  return from_coeffs(basis_, std::move(c));
}

AxisymFn apply_neg_laplacian(const AxisymFn& f) {
  std::vector<double> c(f.coeffs().begin(), f.coeffs().end());
  const auto nu = f.basis().eigenvalues();
  for (std::size_t k = 0; k < c.size(); ++k) c[k] *= nu[k];
  return AxisymFn::from_coeffs(f.basis_ptr(), std::move(c));
}

std::vector<double> collocation_neg_laplacian(const AxisymFn& f) {
  const auto& b = f.basis();
  const double N = b.dimension();
  std::vector<double> out(b.nodes_count());
  for (int j = 0; j < b.nodes_count(); ++j) {
    const double t = b.nodes()[j];
    double v, d1, d2;
    b.evaluate_derivatives(f.coeffs(), t, v, d1, d2);
    out[j] = -(1.0 - t * t) * d2 + N * t * d1;
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

enum class NodalFailure { none, endpoint, nonsimple };

NodalFailure nodal_scan(const AxisymFn& f, NodalClass& out, const NodalOptions& opts) {
  if (opts.fine_grid_size < 3) throw DomainError("count_nodal_class: fine grid too small");
  const int G = opts.fine_grid_size;
  std::vector<double> t(G), g(G);
  double sup = 0.0;
  for (int i = 0; i < G; ++i) {
    t[i] = i == G - 1 ? 1.0 : -1.0 + 2.0 * double(i) / double(G - 1);
    g[i] = f(t[i]);
    sup = std::max(sup, std::abs(g[i]));
  }
  if (!(sup > 0.0)) throw DomainError("count_nodal_class: f vanishes identically");

  out = NodalClass{};
  out.endpoint_minus = g.front();
  out.endpoint_plus = g.back();

  auto add_root = [&](double r) {
    const double slope = f.derivative(r);
    out.zero_locations.push_back(r);
    out.slopes.push_back(slope);
    out.simple.push_back(std::abs(slope) > opts.simplicity_tol * sup);
  };

  for (int i = 0; i + 1 < G; ++i) {
    const double a = g[i], b = g[i + 1];
    if (b == 0.0 && i + 1 < G - 1) {
      add_root(t[i + 1]);
      continue;
    }
    if (a == 0.0) continue;
    if ((a < 0.0) == (b < 0.0) || b == 0.0) continue;
    double lo = t[i], hi = t[i + 1], flo = a;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double fm = f(mid);
      if (fm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    add_root(0.5 * (lo + hi));
  }
  out.k = int(out.zero_locations.size());

  const double floor = opts.value_floor * sup;
  if (std::abs(out.endpoint_minus) <= floor || std::abs(out.endpoint_plus) <= floor) return NodalFailure::endpoint;
  for (bool s : out.simple)
    if (!s) return NodalFailure::nonsimple;
  return NodalFailure::none;
}

}  // namespace

NodalClass count_nodal_class(const AxisymFn& f, const NodalOptions& opts) {
  NodalClass out;
  switch (nodal_scan(f, out, opts)) {
    case NodalFailure::endpoint:
      throw EndpointZero("count_nodal_class: profile vanishes at a pole");
    case NodalFailure::nonsimple:
      throw NonSimpleZero("count_nodal_class: a zero fails the simplicity test");
    case NodalFailure::none:
      break;
  }
  return out;
}

bool try_count_nodal_class(const AxisymFn& f, NodalClass& out, const NodalOptions& opts) {
  return nodal_scan(f, out, opts) == NodalFailure::none;
}

}  // namespace sphbif
