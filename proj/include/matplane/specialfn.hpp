#pragma once

// Siegel gamma function, Stiefel volumes and the normalizing constants of the
// Riesz potential, Fuglede formula and the alternate Riesz representation.

#include <complex>
#include <optional>

#include "matplane/errors.hpp"

namespace matplane {

using cplx = std::complex<double>;

/// Arguments within this distance of a nonpositive integer are poles.
inline constexpr double kPoleTolerance = 1e-9;

/// True when z is within kPoleTolerance of {0, -1, -2, ...}.
bool is_gamma_pole(cplx z);

/// Scalar gamma function (Lanczos, g = 7, with reflection). Throws PoleError
/// with factor index 0 at a pole.
cplx gamma_fn(cplx z);

/// Index j of the first factor Gamma(alpha - j/2), j < m, that is a pole.
std::optional<int> siegel_pole_factor(int m, cplx alpha);

/// Gamma_m(alpha) = pi^{m(m-1)/4} prod_{j<m} Gamma(alpha - j/2).
cplx siegel_gamma(int m, cplx alpha);

/// |Gamma_m(a) - pi^{k(m-k)/2} Gamma_k(a) Gamma_{m-k}(a - k/2)| / |Gamma_m(a)|.
double siegel_gamma_recursion_check(int m, int k, cplx alpha);

/// Gamma_m(a) / Gamma_m(a + k/2), evaluated through the reduced form
/// Gamma_k(a + (k-m)/2) / Gamma_k(a + k/2).
cplx gamma_ratio(int m, int k, cplx alpha);

/// sigma_{n,m} = 2^m pi^{nm/2} / Gamma_m(n/2), total mass of V_{n,m}.
double stiefel_volume(int n, int m);

/// Orders removed from the Riesz family: n-m+1, n-m+2, ... for m >= 2 and
/// n, n+2, ... for m = 1. Only real integers can be excluded.
bool riesz_excluded(int n, int m, cplx alpha);

/// gamma_{n,m}(alpha) = 2^{alpha m} pi^{nm/2} Gamma_m(alpha/2) / Gamma_m((n-alpha)/2).
/// Throws ExcludedOrder for excluded alpha and PoleError when Gamma_m(alpha/2)
/// itself is singular (e.g. alpha = 1 for m = 2).
cplx riesz_const(int n, int m, cplx alpha);

/// Literal membership test: alpha in {0, ..., k0}, or Re alpha > m-1 and,
/// for real alpha, alpha - (n-m) not an integer. Requires m >= 2.
bool wallach_contains(int n, int m, cplx alpha);

/// c = 2^{-km} pi^{-km/2} Gamma_m((n-k)/2) / Gamma_m(n/2). Finite exactly when
/// n - k >= m; otherwise PoleError.
double fuglede_const(int n, int m, int k);

/// c1 = 2^{-km} pi^{k(k-n-m)/2} Gamma_k((n-m)/2) / Gamma_k(k/2), for
/// m >= 2 and k <= min(m-1, n-m); OutOfRange otherwise.
double dual_rep_const(int n, int m, int k);

}  // namespace matplane
