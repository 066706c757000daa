#pragma once

// Radon and dual Radon transforms of matrix k-planes, Riesz potentials,
// the matrix Fourier transform, the central slice theorem and the two
// inversion routes, plus the identity checks built on them.

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <stop_token>
#include <string>
#include <vector>

#include "matplane/lattice.hpp"
#include "matplane/matspace.hpp"
#include "matplane/quadrature.hpp"

namespace matplane {

/// A real function on M_{n,m} with optional oracles.
///
/// Plane-indexed callables take xi as a plain n x (n-k) matrix with
/// orthonormal columns; k is n - xi.cols().
struct FieldFunction {
  int n = 0;
  int m = 0;
  std::string name;
  std::function<double(const Mat&)> evaluate;
  /// lambda with f(x) = O(|I_m + x'x|^{-lambda/2}).
  std::optional<double> decay_lambda;

  struct ClosedForms {
    std::function<double(const Mat& xi, const Mat& t)> radon;
    std::function<cplx(const Mat& y)> fourier;
    /// t-Fourier transform of the Radon data, int exp(i tr(b't)) fhat(xi, t) dt.
    std::function<cplx(const Mat& xi, const Mat& b)> radon_fourier_t;
    std::optional<double> mass;
  } closed;

  double operator()(const Mat& x) const { return evaluate(x); }
  static FieldFunction zero(int n, int m);
};

/// A real function of matrix planes (xi, t).
struct PlaneFunction {
  int n = 0;
  int m = 0;
  int k = 0;
  std::function<double(const Mat& xi, const Mat& t)> evaluate;
  /// Optional closed-form int exp(i tr(b't)) phi(xi, t) dt.
  std::function<cplx(const Mat& xi, const Mat& b)> fourier_t;

  double operator()(const Mat& xi, const Mat& t) const { return evaluate(xi, t); }
  static PlaneFunction zero(const Dims& d);
  /// Radon data of f from its closed forms (BadSpec if f has none).
  static PlaneFunction closed_radon(const FieldFunction& f, int k);
  /// Radon data of f computed by quadrature on every call.
  static PlaneFunction computed_radon(const FieldFunction& f, int k, const QuadratureSpec& spec);
};

/// Quadrature settings for operations that nest several integrals.
struct QuadraturePlan {
  QuadratureSpec matrix_space;  // smooth Lebesgue integrals
  QuadratureSpec group;         // SO(n) and Stiefel averages
  QuadratureSpec cone;          // integrals over P_m
  QuadratureSpec kernel;        // singular Riesz kernel, truncated_grid

  static QuadraturePlan defaults(std::uint64_t seed = 0);
  QuadraturePlan with_seed(std::uint64_t seed) const;
};

/// Two sides of an identity, each with its own error estimate.
struct CheckResult {
  cplx lhs{};
  cplx rhs{};
  double lhs_error = 0.0;
  double rhs_error = 0.0;
  double residual = 0.0;
};

/// |lhs - rhs| / max(|rhs|, floor).
double relative_residual(cplx lhs, cplx rhs, double floor = 1e-300);

// ---- Radon transform ----

/// int_{M_{k,m}} f(g_xi [u; t]) du with g_xi = complete_to_rotation(xi, xi_0).
/// truncated_grid specs are Cauchy-tested at radii R/4, R/2, R and raise
/// DivergenceSuspected when the last relative change exceeds target_rel_tol.
IntegralResult radon(const FieldFunction& f, const MatrixPlane& plane, const QuadratureSpec& spec);
/// Same with an explicit rotation g (g xi_0 is the plane frame).
IntegralResult radon(const FieldFunction& f, const Rotation& g, const Mat& t,
                     const QuadratureSpec& spec);

/// int_{M_{n-k,m}} fhat(xi, t) dt; equals the mass of f for every xi.
IntegralResult radon_mass(const FieldFunction& f, const StiefelFrame& xi, const QuadratureSpec& spec);

// ---- dual transform ----

/// int_{SO(n)} phi(gamma xi_0, xi_0' gamma' x) d gamma, normalized Haar measure.
IntegralResult dual_radon(const PlaneFunction& phi, const Mat& x, const QuadratureSpec& spec);
/// sigma_{n,n-k}^{-1} int_{V_{n,n-k}} phi(xi, xi' x) d xi.
IntegralResult dual_radon_stiefel(const PlaneFunction& phi, const Mat& x, const QuadratureSpec& spec);

// ---- Riesz potentials ----

enum class RieszBranch { identity, convolution, group_average };

/// Which formula evaluates I^alpha on M_{n,m}; UnsupportedOrder if none does.
RieszBranch riesz_branch(int n, int m, cplx alpha);

/// I^alpha f(x). alpha = 0 gives f(x). Integer alpha in 1..k0 uses
/// c int du int d gamma f(x - gamma [u; 0]) with plan.group and
/// plan.matrix_space; Re alpha > m-1 uses the convolution with
/// |y|_m^{alpha-n} / gamma_{n,m}(alpha) on plan.kernel, with zero weight where
/// |y|_m < 1e-12. Throws ExcludedOrder, UnsupportedOrder, and
/// DivergenceSuspected when f.decay_lambda <= Re alpha + m - 1.
ComplexIntegralResult riesz(const FieldFunction& f, cplx alpha, const Mat& x,
                            const QuadraturePlan& plan);

/// c1 int_{M_{n,k}} |y|_k^{m-n} dy int_{M_{k,m-k}} f(x - [y, yz]) dz, computed
/// in polar coordinates y = v r^{1/2}: Stiefel Monte Carlo over v
/// (plan.group), cone rule over r (plan.cone), Gauss-Hermite over w = r^{1/2} z
/// (plan.matrix_space).
IntegralResult riesz_alt(const FieldFunction& f, int k, const Mat& x, const QuadraturePlan& plan);

// ---- Fourier transform and slices ----

/// (F f)(y) = int exp(i tr(y'x)) f(x) dx.
ComplexIntegralResult fourier(const FieldFunction& f, const Mat& y, const QuadratureSpec& spec);

struct SliceFactors {
  StiefelFrame xi;  // n x (n-k)
  Mat b;            // (n-k) x m
};

/// (xi, b) = (g_v xi_0, u_0 r^{1/2}) for y = v r^{1/2}, g_v v_0 = v.
/// Throws InjectivityViolated when n-k < m and RankDeficient for rank(y) < m.
SliceFactors slice_decompose(const Mat& y, const Dims& dims);

/// int_{M_{n-k,m}} exp(i tr(b't)) phi(xi, t) dt.
ComplexIntegralResult plane_fourier_t(const PlaneFunction& phi, const Mat& xi, const Mat& b,
                                      const QuadratureSpec& spec);

/// (F f)(xi b) against the t-Fourier transform of the computed Radon data at b.
CheckResult slice_check(const FieldFunction& f, const Mat& y, const Dims& dims,
                        const QuadratureSpec& spec);
CheckResult slice_check(const FieldFunction& f, const SliceFactors& factors, const Dims& dims,
                        const QuadratureSpec& spec);

// ---- identity checks ----

/// lhs = c * dual_radon(radon f)(x) with group seed plan.group.seed; rhs =
/// I^k f(x) with a derived seed.
CheckResult fuglede_check(const FieldFunction& f, const Mat& x, int k, const QuadraturePlan& plan);

/// int f(x) phi-check(x) dx against sigma_{n,n-k}^{-1} int int phi fhat d xi dt.
/// lhs: SO(n) Monte Carlo outside, Gauss-Hermite over x inside. rhs: Stiefel
/// Monte Carlo outside (derived seed), Gauss-Hermite over t and u inside.
CheckResult duality_check(const FieldFunction& f, const PlaneFunction& phi, const Dims& dims,
                          const QuadraturePlan& plan);

// ---- inversion ----

enum class InversionMode { semi_analytic, quadrature };

/// Fourier inversion of Radon data at x. semi_analytic uses fhat.fourier_t;
/// quadrature computes it with plan.matrix_space. Outer integrals: Stiefel
/// Monte Carlo (plan.group) over V_{n,m}, cone rule (plan.cone) over P_m.
/// In quadrature mode the inner rule must resolve exp(i tr(b't)) for
/// |b|^2 = tr r over the whole cone range; Gauss-Hermite of order N is
/// reliable up to roughly |b| ~ sqrt(2N).
IntegralResult invert_fourier(const PlaneFunction& fhat, const Mat& x, const QuadraturePlan& plan,
                              InversionMode mode = InversionMode::semi_analytic);

struct ReconstructionResult {
  RealField field;
  std::size_t rank_deficient_filled = 0;
};

/// Fills (F f)(y) on space.dual() through slice factors and the t-Fourier
/// transform of the Radon data, then inverts the lattice transform. Rank
/// deficient frequencies take the mean of the values at y +- delta*d for a
/// fixed generic full-rank unit direction d, delta = 0.25 * min frequency
/// spacing. Cancellation is checked between slabs of the first axis.
ReconstructionResult reconstruct_via_slices(const PlaneFunction& fhat, const LatticeGeometry& space,
                                            const QuadraturePlan& plan,
                                            InversionMode mode = InversionMode::semi_analytic,
                                            Execution exec = Execution::parallel,
                                            std::stop_token stop = {});

// ---- non-injectivity ----

/// Smooth step: 0 for s <= eps, 1 for s >= 2 eps.
double smooth_cutoff(double s, double eps);

struct WitnessResult {
  RealField psi;
  double sup_psi = 0.0;
  /// sup over sampled planes of the lattice plane sums of psi.
  double sup_radon = 0.0;
  /// Same plane family applied to the uncut Gaussian reference.
  double sup_radon_reference = 0.0;
  int directions = 0;
};

/// psi = inverse lattice transform of exp(-|y|^2) chi_eps(|y|_m) on a lattice
/// of `extent` points per axis and frequency spacing `freq_spacing`, scaled
/// so that the uncut reference has unit peak. Plane sums run over the
/// discrete planes {c : p'c = s mod L} for primitive integer directions p,
/// weighted by the in-plane cell size. WrongRegime when n-k >= m.
WitnessResult noninjectivity_witness(const Dims& dims, double epsilon, int extent,
                                     double freq_spacing = 0.4,
                                     Execution exec = Execution::parallel);

// ---- Cayley-Laplace operator ----

enum class LaplaceMode { fourier_multiplier, finite_difference };
enum class Boundary { periodic, zero };

struct LaplaceOptions {
  LaplaceMode mode = LaplaceMode::fourier_multiplier;
  Boundary boundary = Boundary::periodic;
  int stencil_order = 6;  // 2, 4 or 6
};

struct LaplaceResult {
  RealField field;
  /// 1 where a finite-difference stencil reached past the boundary.
  std::vector<std::uint8_t> contaminated;
};

/// Fourier symbol of det(d'd): (-1)^m det(y'y).
double cayley_laplace_symbol(const Mat& y);

LaplaceResult cayley_laplace_apply(const RealField& field, const LaplaceOptions& opts,
                                   Execution exec = Execution::parallel);

/// Max relative deviation, over full-rank points of the frequency lattice,
/// between (symbol of (-1)^m Delta_m) * |y|_m^{-alpha} and |y|_m^{-(alpha-2)}.
double cayley_laplace_multiplier_residual(const LatticeGeometry& freq, double alpha);

// ---- Phi'-pairing ----

struct PairingOptions {
  double envelope = 2.0;      // a in exp(-|y|^2 / a)
  double epsilon = 1.0;       // det-root cutoff, smooth step on [eps, 2 eps]
  std::int64_t rotations = 64;
  std::uint64_t seed = 0;
  QuadratureSpec radon_spec = QuadratureSpec{Scheme::gauss_hermite_tensor, 2};
};

/// Fourier data of the pairing test function on `freq`.
ComplexField pairing_test_fourier(const LatticeGeometry& freq, const PairingOptions& opts);

struct PairingResult {
  double a = 0.0;
  double b = 0.0;
  double residual = 0.0;
};

/// A = <f, phi> and B = c <g-check, I^{-k} phi> on `space`. g is the Radon
/// data of f from the tensor Gauss-Hermite rule of opts.radon_spec, and
/// g-check its lattice dual transform over opts.rotations Haar rotations.
PairingResult phi_pairing_check(const FieldFunction& f, int k, const ComplexField& phi_fourier,
                                const LatticeGeometry& space, const PairingOptions& opts,
                                Execution exec = Execution::parallel);

/// Mean over r < count of term(r, x) at every lattice point x, summed in
/// index order. Kernel behind the pairing check and the benchmark.
RealField dual_radon_lattice(const std::function<double(std::size_t, const Mat&)>& term,
                             std::size_t count, const LatticeGeometry& space, Execution exec);
/// phi(gamma xi_0, xi_0' gamma' x) averaged over the given n x n rotations.
RealField dual_radon_lattice(const PlaneFunction& phi, const LatticeGeometry& space,
                             const std::vector<Mat>& rotations, Execution exec);

}  // namespace matplane
