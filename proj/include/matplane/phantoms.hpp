#pragma once

// Test functions with closed-form oracles, and the truncation study of the
// boundary L^p function.

#include <string>
#include <utility>
#include <vector>

#include "matplane/transforms.hpp"

namespace matplane {

enum class PhantomKind { gaussian, shifted_gaussian, det_decay, boundary_lp, rank_supported };

std::string to_string(PhantomKind k);
/// Throws BadSpec for an unknown name.
PhantomKind phantom_kind_from_string(const std::string& name);

struct PhantomSpec {
  PhantomKind kind = PhantomKind::gaussian;
  int n = 3;
  int m = 2;
  Mat shift;             // shifted_gaussian: y0 (n x m)
  double lambda = 0.0;   // det_decay
  double p = 1.0;        // boundary_lp
  double epsilon = 0.3;  // rank_supported

  /// Throws BadSpec when the kind's parameter is out of range.
  void validate() const;
};

/// gaussian: exp(-tr x'x) with mass, Radon, Fourier and t-Fourier oracles.
/// shifted_gaussian: exp(-tr (x+y0)'(x+y0)) with the shifted oracles.
/// det_decay: |I_m + x'x|^{-lambda/2}, decay_lambda = lambda.
/// boundary_lp: |2I_m + x'x|^{-(n+m-1)/(2p)} / log|2I_m + x'x|.
/// rank_supported: nearest-sample lookup into the non-injectivity witness
/// built with k = n - 1 (periodic lattice, 32 points per axis when nm <= 4).
FieldFunction make_phantom(const PhantomSpec& spec);

/// p0 = (n+m-1)/(k+m-1).
double critical_exponent(const Dims& dims);

using TruncationSeries = std::vector<std::pair<double, double>>;

/// Radon integrals of the boundary_lp function at (xi_0, 0) over Frobenius
/// balls of radius 1, 2, 4, ..., 128, each on a truncated_grid with the
/// order of `spec`. Requires p >= p0 (WrongRegime otherwise).
TruncationSeries divergence_demo(const Dims& dims, double p, const QuadratureSpec& spec);
/// Same ladder in the convergent regime p < p0 (WrongRegime otherwise).
TruncationSeries convergence_demo(const Dims& dims, double p, const QuadratureSpec& spec);

}  // namespace matplane
