#pragma once

#include <functional>
#include <vector>

#include "sphbif/axisym_spectral.hpp"
#include "sphbif/profile.hpp"

namespace sphbif {

/// Poles on the symmetry axis; the only centers axisymmetric data need.
enum class Pole { north, south };

/// Conformal reflection of S^n in the geodesic sphere of radius lambda
/// about a pole. It maps (r, omega) to (h_lambda(r), omega) in geodesic
/// polar coordinates about the pole and fixes the sphere r = lambda.
struct KelvinParams {
  Pole pole = Pole::north;
  double lambda = 0.0;
  int n = 3;

  void validate() const;
};

/// 1 + cos^2(lambda) - 2 cos(lambda) cos(r).
double reflection_denominator(double lambda, double r);

/// h_lambda(r) in (0, pi). Evaluated with atan2 of
///   sin h = sin^2(lambda) sin(r) / D,  cos h = (2 cos lambda - (1 + cos^2 lambda) cos r) / D
/// so that it stays accurate near both poles.
double reflect_radius(double lambda, double r);

/// |J|(r) = (sin^2(lambda) / D(r))^n.
double jacobian_density(double lambda, double r, int n);

/// Geodesic distance from the pole of the axis point with theta_{n+1} = t.
double distance_from_pole(Pole pole, double t);
/// Inverse of distance_from_pole.
double axis_coordinate(Pole pole, double r);

struct AxisImage {
  double t = 0.0;         // theta_{n+1} of the image point
  double jacobian = 1.0;  // |J| at the source point
};

/// Image of the axis point t under the reflection, with the Jacobian density.
AxisImage kelvin_image(const KelvinParams& kp, double t);

/// Functions of t = theta_{n+1}.
using AxisFunction = std::function<double(double)>;

/// v_{p,lambda}(t) = |J|^{(n-2)/(2n)} v(image t), n >= 3.
double kelvin_value(const AxisFunction& v, const KelvinParams& kp, double t);
/// v_{p,lambda}(t) = v(image t) + log|J| / 2, n = 2.
double kelvin_value_s2(const AxisFunction& v, const KelvinParams& kp, double t);

enum class OutOfRange { error, clamp };

struct TransformOptions {
  OutOfRange out_of_range = OutOfRange::error;
  /// Points closer than this to either pole are clamped and flagged.
  double pole_guard = 1e-6;
};

struct KelvinResult {
  RadialProfile profile;
  /// Estimated interpolation error at the image points.
  double interpolation_tolerance = 0.0;
  std::vector<bool> clamped;
  std::size_t clamped_count = 0;
};

/// Power-form transform of a profile sampled in geodesic_r or t_cosine.
/// Image points are resampled by barycentric interpolation.
KelvinResult kelvin_transform_axisym(const RadialProfile& v, const KelvinParams& kp, const TransformOptions& opts = {});
/// Additive logarithmic transform on S^2.
KelvinResult kelvin_transform_s2(const RadialProfile& v, const KelvinParams& kp, const TransformOptions& opts = {});

struct InvarianceReport {
  /// sup over quadrature nodes of |-L v_{p,lambda} - |J|^{(n+2)/(2n)} (-L v) o phi|
  double residual = 0.0;
  /// Relative size of the trailing spectral coefficients of v and of v_{p,lambda}.
  double tail_v = 0.0;
  double tail_transformed = 0.0;
};

/// Magnitude of the last max(2, K/8) coefficients relative to the largest
/// coefficient or to `scale`, whichever is bigger.
double spectral_tail(std::span<const double> coeffs, double scale = 0.0);

/// Conformal covariance check of the conformal Laplacian L = Delta - n(n-2)/4.
/// Throws ResolutionError when v's spectral tail exceeds tail_threshold.
InvarianceReport conformal_invariance_residual(const AxisymFn& v, const KelvinParams& kp,
                                               double tail_threshold = 1e-10);
InvarianceReport conformal_invariance_residual(const AxisFunction& v, const KelvinParams& kp, const BasisPtr& basis,
                                               double tail_threshold = 1e-10);
InvarianceReport conformal_invariance_residual(const RadialProfile& v, const KelvinParams& kp, const BasisPtr& basis,
                                               double tail_threshold = 1e-10);

/// Same check for the S^2 log form: -Delta v_{p,lambda} + 1 = |J| ((-Delta v) o phi + 1).
InvarianceReport conformal_invariance_residual_s2(const AxisFunction& v, const KelvinParams& kp,
                                                  const BasisPtr& basis, double tail_threshold = 1e-10);

/// xi(r) = (2 / (1 + r^2))^{(n-2)/2}.
double stereographic_factor(double r, int n);
/// theta_{n+1} of the point projecting to radius r.
double stereographic_t(double r);
double stereographic_r(double t);

/// u(r) on R^n -> v(t) = u / xi on S^n with t = (r^2 - 1)/(r^2 + 1).
RadialProfile stereographic_to_sphere(const RadialProfile& u, int n);
/// Inverse of stereographic_to_sphere.
RadialProfile stereographic_to_plane(const RadialProfile& v, int n);

/// Exponent of (1 - t) in the Matukuma nonlinearity: ((n-2)/2)(p - n/(n-2)).
double matukuma_exponent(int n, double p);
/// g(t, s) = (1 - t)^{matukuma_exponent} s^p / 2.
double matukuma_g(double t, double s, int n, double p);

/// Coefficients of -Delta v + alpha/(8 pi) = K e^{2v} on S^2 obtained from
/// the mean field equation: K(theta) = exp(-gamma <s, theta>) and f = 1 - alpha/(8 pi).
struct MeanFieldForm {
  double alpha = 0.0;
  double gamma = 0.0;
  double f = 1.0;
  /// K at the axis point with theta_3 = t; <s, theta> = -t.
  double K(double t) const;
};

MeanFieldForm meanfield_substitution(double alpha, double gamma);

}  // namespace sphbif
