#pragma once

// Integration over matrix space (Lebesgue), over SO(n) and Stiefel manifolds
// (Haar), and over the cone P_m of positive definite matrices.

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "matplane/matspace.hpp"
#include "matplane/parallel.hpp"

namespace matplane {

using cplx = std::complex<double>;

enum class Scheme { gauss_hermite_tensor, truncated_grid, monte_carlo };

std::string to_string(Scheme s);
/// Throws BadSpec for an unknown name.
Scheme scheme_from_string(const std::string& name);

struct QuadratureSpec {
  Scheme scheme = Scheme::gauss_hermite_tensor;
  std::int64_t order_or_samples = 12;
  double truncation_radius = 6.0;
  std::uint64_t seed = 0;
  double target_rel_tol = 1e-3;
  /// Gauss-Hermite node scale and Monte Carlo proposal width. A rule with
  /// scale s is exact for polynomials times exp(-|x|^2 / s^2).
  double scale = 1.0;
  Execution exec = Execution::parallel;

  /// Throws BadSpec when order_or_samples < 1, radius <= 0, tol <= 0 or scale <= 0.
  void validate() const;
  /// Same spec with a different order or sample count.
  QuadratureSpec with_order(std::int64_t order) const;
  QuadratureSpec with_seed(std::uint64_t s) const;
};

template <class T>
struct IntegralResultT {
  T value{};
  double error_estimate = 0.0;
  std::int64_t samples_used = 0;
};
using IntegralResult = IntegralResultT<double>;
using ComplexIntegralResult = IntegralResultT<cplx>;

using MatFn = std::function<double(const Mat&)>;
using MatFnC = std::function<cplx(const Mat&)>;

/// Evaluation cap; 10^8 unless MATPLANE_BUDGET_CAP is set.
std::int64_t budget_cap();
/// Throws BudgetExceeded when `evaluations` exceeds budget_cap().
void check_budget(double evaluations, const char* what);

/// One-dimensional rule on the real line or an interval.
struct Rule1d {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite nodes with full weights w_i exp(z_i^2), so that
/// sum W_i f(z_i) approximates the integral of f over the real line.
const Rule1d& gauss_hermite_rule(int order);
/// Gauss-Legendre rule on [-1, 1].
const Rule1d& gauss_legendre_rule(int order);
/// Gauss-Legendre rule mapped to [a, b].
Rule1d gauss_legendre_on(int order, double a, double b);
/// Composite Gauss-Legendre on [0, R] with panels [0,1], [1,2], [2,4], ...
Rule1d radial_panels(int order, double radius);

/// Integral over M_{p,q} (entries laid out column-major) of f.
///
/// gauss_hermite_tensor: order^{pq} nodes scaled by spec.scale; error is the
/// difference to the rule of order ceil(order/2).
/// truncated_grid: hyperspherical product rule on the Frobenius ball of
/// radius truncation_radius; same error estimate.
/// monte_carlo: Gaussian importance sampling with width spec.scale; error is
/// the standard error.
IntegralResult integrate_matrix_space(const MatFn& f, int p, int q, const QuadratureSpec& spec);
ComplexIntegralResult integrate_matrix_space_complex(const MatFnC& f, int p, int q,
                                                     const QuadratureSpec& spec);

/// Which compact group to integrate over.
struct GroupDomain {
  enum class Kind { special_orthogonal, stiefel } kind = Kind::special_orthogonal;
  int n = 1;
  int p = 1;

  static GroupDomain so(int n) { return {Kind::special_orthogonal, n, n}; }
  static GroupDomain stiefel(int n, int p) { return {Kind::stiefel, n, p}; }
  /// 1 for SO(n) (normalized Haar measure), sigma_{n,p} for V_{n,p}.
  double total_mass() const;
};

/// Monte Carlo over the group; f receives the rotation (n x n) or frame (n x p).
/// SO(n) returns the sample mean; Stiefel returns sigma_{n,p} times the mean.
/// Requires spec.scheme == monte_carlo (BadSpec otherwise).
IntegralResult integrate_group(const MatFn& f, const GroupDomain& domain, const QuadratureSpec& spec);
ComplexIntegralResult integrate_group_complex(const MatFnC& f, const GroupDomain& domain,
                                              const QuadratureSpec& spec);

/// Integral over P_m of f(r) |r|^{weight_exponent} dr through r = u'u, u upper
/// triangular with positive diagonal, dr = 2^m prod_i u_ii^{m-i+1} du.
///
/// truncated_grid: Gauss-Legendre of the given order on [0, R] for diagonal and
/// [-R, R] for off-diagonal entries of u. monte_carlo: half-normal/normal
/// proposal of width spec.scale. gauss_hermite_tensor is rejected (BadSpec).
IntegralResult integrate_spd_cone(const MatFn& f, int m, double weight_exponent,
                                  const QuadratureSpec& spec);
ComplexIntegralResult integrate_spd_cone_complex(const MatFnC& f, int m, double weight_exponent,
                                                 const QuadratureSpec& spec);

}  // namespace matplane
