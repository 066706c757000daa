#include <cmath>
#include <cstdlib>
#include <numbers>

#include "doctest.h"
#include "matplane/quadrature.hpp"
#include "matplane/specialfn.hpp"

using namespace matplane;

namespace {

constexpr double kPi = std::numbers::pi;

double gauss(const Mat& x) { return std::exp(-x.squaredNorm()); }

}  // namespace

TEST_CASE("one-dimensional rules") {
  for (int order : {1, 4, 9, 20}) {
    const auto& gh = gauss_hermite_rule(order);
    double mass = 0.0, second = 0.0;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
      const double z = gh.nodes[i];
      mass += gh.weights[i] * std::exp(-z * z);
      second += gh.weights[i] * z * z * std::exp(-z * z);
    }
    CHECK(mass == doctest::Approx(std::sqrt(kPi)).epsilon(1e-13));
    if (order >= 2) CHECK(second == doctest::Approx(std::sqrt(kPi) / 2).epsilon(1e-13));

    const auto& gl = gauss_legendre_rule(order);
    double s = 0.0, p = 0.0;
    const int deg = 2 * order - 1;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      s += gl.weights[i];
      p += gl.weights[i] * std::pow(gl.nodes[i] + 1.0, deg);
    }
    CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(p == doctest::Approx(std::pow(2.0, deg + 1) / (deg + 1)).epsilon(1e-12));
  }
  const auto mapped = gauss_legendre_on(5, 1.0, 3.0);
  double cube = 0.0;
  for (std::size_t i = 0; i < mapped.nodes.size(); ++i) cube += mapped.weights[i] * std::pow(mapped.nodes[i], 3);
  CHECK(cube == doctest::Approx(20.0).epsilon(1e-13));
  const auto panels = radial_panels(6, 10.0);
  double r2 = 0.0;
  for (std::size_t i = 0; i < panels.nodes.size(); ++i) {
    CHECK(panels.nodes[i] >= 0.0);
    CHECK(panels.nodes[i] <= 10.0);
    r2 += panels.weights[i] * panels.nodes[i] * panels.nodes[i];
  }
  CHECK(r2 == doctest::Approx(1000.0 / 3.0).epsilon(1e-12));
  CHECK_THROWS_AS(gauss_hermite_rule(0), BadSpec);
}

TEST_CASE("spec validation and names") {
  QuadratureSpec s;
  CHECK_NOTHROW(s.validate());
  s.order_or_samples = 0;
  CHECK_THROWS_AS(s.validate(), BadSpec);
  s = QuadratureSpec{};
  s.truncation_radius = -1.0;
  CHECK_THROWS_AS(s.validate(), BadSpec);
  s = QuadratureSpec{};
  s.scale = 0.0;
  CHECK_THROWS_AS(s.validate(), BadSpec);
  for (Scheme sc : {Scheme::gauss_hermite_tensor, Scheme::truncated_grid, Scheme::monte_carlo})
    CHECK(scheme_from_string(to_string(sc)) == sc);
  CHECK_THROWS_AS(scheme_from_string("simpson"), BadSpec);
  CHECK(QuadratureSpec{}.with_order(7).order_or_samples == 7);
  CHECK(QuadratureSpec{}.with_seed(9).seed == 9u);
}

TEST_CASE("Gauss-Hermite tensor rule on matrix space") {
  const QuadratureSpec spec{Scheme::gauss_hermite_tensor, 10};
  CHECK(integrate_matrix_space(gauss, 2, 2, spec).value == doctest::Approx(kPi * kPi).epsilon(1e-12));

  // exp(-tr x'Ax) over M_{p,q}: pi^{pq/2} det(A)^{-q/2}.
  Mat a(3, 3);
  a << 2.0, 0.3, 0.0, 0.3, 1.0, -0.2, 0.0, -0.2, 1.5;
  const auto r = integrate_matrix_space([&](const Mat& x) { return std::exp(-(x.transpose() * a * x).trace()); },
                                        3, 2, spec.with_order(16));
  CHECK(r.value == doctest::Approx(std::pow(kPi, 3.0) / a.determinant()).epsilon(1e-6));

  // Fourier transform of the Gaussian: pi^{pq/2} exp(-|y|^2 / 4).
  Mat y(2, 2);
  y << 0.7, -1.1, 0.4, 0.9;
  const auto f = integrate_matrix_space_complex(
      [&](const Mat& x) { return std::polar(gauss(x), (y.transpose() * x).trace()); }, 2, 2, spec);
  CHECK(std::abs(f.value - kPi * kPi * std::exp(-0.25 * y.squaredNorm())) < 1e-10);

  // Scaled rule integrates a wider Gaussian exactly.
  QuadratureSpec wide = spec;
  wide.scale = 3.0;
  const auto w = integrate_matrix_space([](const Mat& x) { return std::exp(-x.squaredNorm() / 9.0); }, 1, 2, wide);
  CHECK(w.value == doctest::Approx(9.0 * kPi).epsilon(1e-12));
}

TEST_CASE("truncated grid on Frobenius balls") {
  QuadratureSpec spec{Scheme::truncated_grid, 16, 1.0};
  // Volume of the unit ball in R^d.
  for (auto [p, q] : {std::pair{1, 1}, std::pair{1, 2}, std::pair{1, 3}, std::pair{2, 2}}) {
    const int d = p * q;
    const double vol = std::pow(kPi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
    CHECK(integrate_matrix_space([](const Mat&) { return 1.0; }, p, q, spec).value ==
          doctest::Approx(vol).epsilon(1e-12));
  }
  spec.truncation_radius = 7.0;
  CHECK(integrate_matrix_space(gauss, 2, 2, spec.with_order(24)).value == doctest::Approx(kPi * kPi).epsilon(1e-8));
  // Off-centre integrand: rotational symmetry of the rule is not enough.
  const auto r = integrate_matrix_space([](const Mat& x) { return std::exp(-(x.array() - 0.5).square().sum()); },
                                        1, 3, spec.with_order(24));
  CHECK(r.value == doctest::Approx(std::pow(kPi, 1.5)).epsilon(1e-7));
}

TEST_CASE("Monte Carlo: accuracy, reproducibility and execution independence") {
  QuadratureSpec spec{Scheme::monte_carlo, 50000};
  spec.seed = 11;
  spec.scale = 1.5;
  const auto r = integrate_matrix_space(gauss, 2, 2, spec);
  CHECK(r.samples_used == 50000);
  CHECK(r.error_estimate > 0.0);
  CHECK(std::abs(r.value - kPi * kPi) < 4.0 * r.error_estimate);
  CHECK(integrate_matrix_space(gauss, 2, 2, spec).value == r.value);
  QuadratureSpec serial = spec;
  serial.exec = Execution::serial;
  CHECK(integrate_matrix_space(gauss, 2, 2, serial).value == r.value);
  CHECK(integrate_matrix_space(gauss, 2, 2, spec.with_seed(12)).value != r.value);
}

TEST_CASE("group integrals") {
  QuadratureSpec spec{Scheme::monte_carlo, 40000};
  spec.seed = 3;
  // For Haar g in SO(n), n >= 3: E tr g = 0 and E (tr g)^2 = 1.
  const auto t1 = integrate_group([](const Mat& g) { return g.trace(); }, GroupDomain::so(4), spec);
  const auto t2 = integrate_group([](const Mat& g) { return g.trace() * g.trace(); }, GroupDomain::so(4), spec);
  CHECK(std::abs(t1.value) < 4.0 * t1.error_estimate);
  CHECK(std::abs(t2.value - 1.0) < 4.0 * t2.error_estimate);

  const auto mass = integrate_group([](const Mat&) { return 1.0; }, GroupDomain::stiefel(4, 2), spec);
  CHECK(mass.value == doctest::Approx(stiefel_volume(4, 2)).epsilon(1e-12));
  CHECK(GroupDomain::stiefel(4, 2).total_mass() == doctest::Approx(stiefel_volume(4, 2)));
  // int_{S^2} v_1^2 dv = 4 pi / 3.
  const auto v2 = integrate_group([](const Mat& v) { return v(0, 0) * v(0, 0); }, GroupDomain::stiefel(3, 1), spec);
  CHECK(std::abs(v2.value - 4.0 * kPi / 3.0) < 4.0 * v2.error_estimate);

  CHECK_THROWS_AS(integrate_group([](const Mat&) { return 1.0; }, GroupDomain::so(3), QuadratureSpec{}), BadSpec);
}

TEST_CASE("cone integrals reproduce the Siegel gamma function") {
  const QuadratureSpec grid{Scheme::truncated_grid, 28, 7.0};
  for (int m = 1; m <= 3; ++m) {
    for (double a : {1.5, 2.0, 3.25}) {
      if (a <= 0.5 * (m - 1)) continue;
      CAPTURE(m);
      CAPTURE(a);
      const double ref = siegel_gamma(m, a).real();
      const auto r = integrate_spd_cone([](const Mat& s) { return std::exp(-s.trace()); }, m, a - 0.5 * (m + 1),
                                        m == 3 ? QuadratureSpec{Scheme::truncated_grid, 16, 5.0} : grid);
      CHECK(r.value == doctest::Approx(ref).epsilon(m == 3 ? 1e-3 : 1e-6));
    }
  }
  QuadratureSpec mc{Scheme::monte_carlo, 200000};
  mc.seed = 5;
  const auto r = integrate_spd_cone([](const Mat& s) { return std::exp(-s.trace()); }, 2, 0.5, mc);
  CHECK(std::abs(r.value - siegel_gamma(2, 2.0).real()) < 4.0 * r.error_estimate);
  CHECK_THROWS_AS(integrate_spd_cone([](const Mat&) { return 1.0; }, 2, 0.0, QuadratureSpec{}), BadSpec);
}

TEST_CASE("evaluation cap") {
  CHECK(budget_cap() == 100000000);
  CHECK_THROWS_AS(integrate_matrix_space(gauss, 3, 3, QuadratureSpec{Scheme::gauss_hermite_tensor, 12}),
                  BudgetExceeded);
  setenv("MATPLANE_BUDGET_CAP", "1000", 1);
  CHECK(budget_cap() == 1000);
  CHECK_THROWS_AS(integrate_matrix_space(gauss, 2, 2, QuadratureSpec{Scheme::gauss_hermite_tensor, 6}),
                  BudgetExceeded);
  CHECK_NOTHROW(integrate_matrix_space(gauss, 1, 2, QuadratureSpec{Scheme::gauss_hermite_tensor, 6}));
  unsetenv("MATPLANE_BUDGET_CAP");
}
