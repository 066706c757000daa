#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "matplane/phantoms.hpp"

using namespace matplane;

namespace {

constexpr double kPi = std::numbers::pi;

Mat random_mat(int r, int c, Rng& rng, double sd = 1.0) {
  std::normal_distribution<double> z(0.0, sd);
  Mat x(r, c);
  for (int i = 0; i < x.size(); ++i) x.data()[i] = z(rng);
  return x;
}

}  // namespace

TEST_CASE("phantom names") {
  for (auto k : {PhantomKind::gaussian, PhantomKind::shifted_gaussian, PhantomKind::det_decay,
                 PhantomKind::boundary_lp, PhantomKind::rank_supported})
    CHECK(phantom_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(phantom_kind_from_string("cube"), BadSpec);
}

TEST_CASE("phantom validation") {
  PhantomSpec s;
  CHECK_NOTHROW(s.validate());
  s.kind = PhantomKind::shifted_gaussian;
  CHECK_THROWS_AS(s.validate(), BadSpec);
  s.shift = Mat::Zero(3, 2);
  CHECK_NOTHROW(s.validate());
  s = PhantomSpec{};
  s.kind = PhantomKind::det_decay;
  CHECK_THROWS_AS(make_phantom(s), BadSpec);
  s = PhantomSpec{};
  s.kind = PhantomKind::boundary_lp;
  s.p = 0.9;
  CHECK_THROWS_AS(s.validate(), BadSpec);
  s = PhantomSpec{};
  s.kind = PhantomKind::rank_supported;
  s.m = 1;
  CHECK_THROWS_AS(s.validate(), BadSpec);
  s.m = 2;
  s.epsilon = 0.0;
  CHECK_THROWS_AS(s.validate(), BadSpec);
  s = PhantomSpec{};
  s.n = 0;
  CHECK_THROWS_AS(s.validate(), BadSpec);
}

TEST_CASE("Gaussian oracles against quadrature") {
  Rng rng = make_rng(21);
  PhantomSpec s;
  s.kind = PhantomKind::shifted_gaussian;
  s.shift = random_mat(3, 2, rng, 0.5);
  PhantomSpec c;
  for (const FieldFunction& f : {make_phantom(c), make_phantom(s)}) {
    CAPTURE(f.name);
    const QuadratureSpec gh{Scheme::gauss_hermite_tensor, 12};
    CHECK(integrate_matrix_space(f.evaluate, 3, 2, gh.with_order(16)).value ==
          doctest::Approx(*f.closed.mass).epsilon(1e-9));
    const Mat xi = haar_stiefel(3, 2, rng).matrix();
    const Mat t = random_mat(2, 2, rng);
    CHECK(radon(f, MatrixPlane::make(StiefelFrame::make(xi), t), gh).value ==
          doctest::Approx(f.closed.radon(xi, t)).epsilon(1e-10));

    const Mat y = random_mat(3, 2, rng, 0.7);
    CHECK(std::abs(fourier(f, y, gh.with_order(14)).value - f.closed.fourier(y)) < 1e-8);

    // t-Fourier of quadrature-computed Radon data, independent of the closed Radon form.
    const PlaneFunction computed = PlaneFunction::computed_radon(f, 1, gh);
    const Mat b = random_mat(2, 2, rng, 0.7);
    CHECK(std::abs(plane_fourier_t(computed, xi, b, gh).value - f.closed.radon_fourier_t(xi, b)) < 1e-8);
  }
}

TEST_CASE("decaying phantoms") {
  PhantomSpec s;
  s.kind = PhantomKind::det_decay;
  s.lambda = 3.0;
  const FieldFunction f = make_phantom(s);
  CHECK(f.decay_lambda == 3.0);
  Mat x = Mat::Zero(3, 2);
  CHECK(f(x) == 1.0);
  x(0, 0) = 1.0;
  x(1, 1) = 2.0;
  // I + x'x = diag(2, 5).
  CHECK(f(x) == doctest::Approx(std::pow(10.0, -1.5)));

  s = PhantomSpec{};
  s.kind = PhantomKind::boundary_lp;
  s.p = 2.0;
  const FieldFunction g = make_phantom(s);
  // |2 I_2| = 4: 4^{-(3+2-1)/4} / log 4.
  CHECK(g(Mat::Zero(3, 2)) == doctest::Approx(0.25 / std::log(4.0)));
  CHECK_FALSE(g.decay_lambda.has_value());
}

TEST_CASE("critical exponent and the truncation ladders") {
  CHECK(critical_exponent(Dims::make(3, 2, 1)) == 2.0);
  CHECK(critical_exponent(Dims::make(4, 2, 2)) == doctest::Approx(5.0 / 3.0));
  CHECK(critical_exponent(Dims::make(5, 1, 2)) == doctest::Approx(2.5));
  const Dims d = Dims::make(3, 2, 1);
  const QuadratureSpec spec{Scheme::truncated_grid, 16};
  CHECK_THROWS_AS(divergence_demo(d, 1.5, spec), WrongRegime);
  CHECK_THROWS_AS(convergence_demo(d, 2.0, spec), WrongRegime);
  CHECK_THROWS_AS(convergence_demo(d, 0.5, spec), BadSpec);

  const auto div = divergence_demo(d, 2.0, spec);
  REQUIRE(div.size() == 8u);
  CHECK(div.front().first == 1.0);
  CHECK(div.back().first == 128.0);
  for (std::size_t i = 1; i < div.size(); ++i) CHECK(div[i].second > div[i - 1].second);

  const auto conv = convergence_demo(d, 1.2, spec);
  const double last = std::abs(conv[7].second - conv[6].second) / conv[7].second;
  const double first = std::abs(conv[1].second - conv[0].second) / conv[1].second;
  CHECK(last < first);
}

TEST_CASE("rank-supported phantom samples the witness lattice") {
  PhantomSpec s;
  s.kind = PhantomKind::rank_supported;
  s.n = 2;
  s.m = 2;
  const FieldFunction f = make_phantom(s);
  const WitnessResult w = noninjectivity_witness(Dims::make(2, 2, 1), s.epsilon, 32);
  const auto& g = w.psi.geometry;
  for (std::size_t i : {std::size_t{0}, std::size_t{12345}, g.size() / 2, g.size() - 1}) {
    const Mat x = g.point(i);
    CHECK(f(x) == w.psi.data[i]);
    // Periodic: shifting by one lattice period along an axis is invisible.
    Mat shifted = x;
    shifted(1, 0) += g.extents()[2] * g.spacing()[2];
    CHECK(f(shifted) == w.psi.data[i]);
  }
}
