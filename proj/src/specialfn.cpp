#include "matplane/specialfn.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace matplane {

namespace {

constexpr double kPi = std::numbers::pi;

// B_{2j} / (2j (2j - 1)), j = 1..8.
constexpr std::array<double, 8> kStirling = {1.0 / 12.0,   -1.0 / 360.0,  1.0 / 1260.0,
                                             -1.0 / 1680.0, 1.0 / 1188.0,  -691.0 / 360360.0,
                                             1.0 / 156.0,  -3617.0 / 122400.0};

// Shift to Re z >= 15 by the recurrence, then the Stirling series.
cplx gamma_impl(cplx z) {
  if (z.imag() == 0.0) return std::tgamma(z.real());
  if (z.real() < 0.5) return kPi / (std::sin(kPi * z) * gamma_impl(1.0 - z));
  cplx prod = 1.0;
  while (z.real() < 15.0) {
    prod *= z;
    z += 1.0;
  }
  const cplx inv = 1.0 / z;
  const cplx inv2 = inv * inv;
  cplx series = 0.0;
  cplx p = inv;
  for (double c : kStirling) {
    series += c * p;
    p *= inv2;
  }
  const cplx lg = (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * kPi) + series;
  return std::exp(lg) / prod;
}

bool near_integer(cplx z, double* nearest = nullptr) {
  const double r = std::round(z.real());
  if (nearest) *nearest = r;
  return std::abs(z - cplx(r, 0.0)) < kPoleTolerance;
}

}  // namespace

bool is_gamma_pole(cplx z) {
  double r = 0.0;
  return near_integer(z, &r) && r <= 0.0;
}

cplx gamma_fn(cplx z) {
  if (is_gamma_pole(z)) throw PoleError("gamma function pole", 0);
  return gamma_impl(z);
}

std::optional<int> siegel_pole_factor(int m, cplx alpha) {
  for (int j = 0; j < m; ++j)
    if (is_gamma_pole(alpha - 0.5 * j)) return j;
  return std::nullopt;
}

cplx siegel_gamma(int m, cplx alpha) {
  if (m < 1) throw InvalidDims("Siegel gamma needs m >= 1");
  if (auto j = siegel_pole_factor(m, alpha))
    throw PoleError("Siegel gamma pole at factor " + std::to_string(*j), *j);
  cplx p = std::pow(kPi, m * (m - 1) / 4.0);
  for (int j = 0; j < m; ++j) p *= gamma_impl(alpha - 0.5 * j);
  return p;
}

double siegel_gamma_recursion_check(int m, int k, cplx alpha) {
  if (k < 1 || k >= m) throw OutOfRange("recursion check needs 1 <= k < m");
  const cplx lhs = siegel_gamma(m, alpha);
  const cplx rhs = std::pow(kPi, k * (m - k) / 2.0) * siegel_gamma(k, alpha) *
                   siegel_gamma(m - k, alpha - 0.5 * k);
  return std::abs(lhs - rhs) / std::abs(lhs);
}

cplx gamma_ratio(int m, int k, cplx alpha) {
  if (m < 1 || k < 1) throw InvalidDims("gamma ratio needs m, k >= 1");
  const cplx den = siegel_gamma(k, alpha + 0.5 * k);
  return siegel_gamma(k, alpha + 0.5 * (k - m)) / den;
}

double stiefel_volume(int n, int m) {
  if (m < 1 || n < m) throw InvalidDims("Stiefel volume needs n >= m >= 1");
  return std::pow(2.0, m) * std::pow(kPi, n * m / 2.0) / siegel_gamma(m, 0.5 * n).real();
}

bool riesz_excluded(int n, int m, cplx alpha) {
  double r = 0.0;
  if (!near_integer(alpha, &r)) return false;
  const int a = static_cast<int>(r);
  if (m >= 2) return a >= n - m + 1;
  return a >= n && (a - n) % 2 == 0;
}

cplx riesz_const(int n, int m, cplx alpha) {
  if (riesz_excluded(n, m, alpha))
    throw ExcludedOrder("order is excluded from the Riesz family");
  return std::pow(2.0, alpha * static_cast<double>(m)) * std::pow(kPi, n * m / 2.0) *
         siegel_gamma(m, 0.5 * alpha) / siegel_gamma(m, 0.5 * (static_cast<double>(n) - alpha));
}

bool wallach_contains(int n, int m, cplx alpha) {
  if (m < 2) throw OutOfRange("Wallach set is defined for m >= 2");
  const int k0 = std::min(m - 1, n - m);
  double r = 0.0;
  if (near_integer(alpha, &r) && r >= 0.0 && r <= k0) return true;
  if (alpha.real() <= m - 1) return false;
  if (std::abs(alpha.imag()) >= kPoleTolerance) return true;
  return !near_integer(alpha - static_cast<double>(n - m));
}

double fuglede_const(int n, int m, int k) {
  if (k <= 0 || k >= n) throw InvalidDims("fuglede constant needs 0 < k < n");
  return std::pow(2.0, -k * m) * std::pow(kPi, -k * m / 2.0) *
         (siegel_gamma(m, 0.5 * (n - k)) / siegel_gamma(m, 0.5 * n)).real();
}

double dual_rep_const(int n, int m, int k) {
  if (m < 2) throw OutOfRange("alternate representation needs m >= 2");
  const int k0 = std::min(m - 1, n - m);
  if (k < 1 || k > k0)
    throw OutOfRange("k=" + std::to_string(k) + " exceeds k0=" + std::to_string(k0));
  return std::pow(2.0, -k * m) * std::pow(kPi, k * (k - n - m) / 2.0) *
         (siegel_gamma(k, 0.5 * (n - m)) / siegel_gamma(k, 0.5 * k)).real();
}

}  // namespace matplane
