#include <cmath>
#include <random>

#include "doctest.h"
#include "matplane/matspace.hpp"

using namespace matplane;

namespace {

Mat gaussian(int r, int c, Rng& rng) {
  std::normal_distribution<double> z;
  Mat x(r, c);
  for (int i = 0; i < x.size(); ++i) x.data()[i] = z(rng);
  return x;
}

double orth_defect(const Mat& g) {
  return (g.transpose() * g - Mat::Identity(g.cols(), g.cols())).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("dims validation and regime") {
  CHECK_THROWS_AS(Dims::make(3, 2, 0), InvalidDims);
  CHECK_THROWS_AS(Dims::make(3, 2, 3), InvalidDims);
  CHECK_THROWS_AS(Dims::make(9, 2, 1), InvalidDims);
  CHECK_THROWS_AS(Dims::make(3, 0, 1), InvalidDims);
  const Dims d = Dims::make(3, 2, 1);
  CHECK(d.injective());
  CHECK(d.codim() == 2);
  CHECK(d.k0() == 1);
  CHECK_FALSE(Dims::make(2, 2, 1).injective());
}

TEST_CASE("det_root matches sqrt det(x'x) and vanishes off full rank") {
  Rng rng = make_rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat x = gaussian(4, 2, rng);
    const double ref = std::sqrt((x.transpose() * x).determinant());
    CHECK(det_root(x) == doctest::Approx(ref).epsilon(1e-12));
  }
  Mat x = gaussian(3, 2, rng);
  x.col(1) = 2.0 * x.col(0);
  CHECK(det_root(x) == 0.0);
  CHECK(det_root(gaussian(2, 3, rng)) == 0.0);
  CHECK(matrix_rank(x) == 1);
  CHECK(matrix_rank(gaussian(4, 3, rng)) == 3);
}

TEST_CASE("SPD square roots") {
  Rng rng = make_rng(2);
  const Mat a = gaussian(5, 3, rng);
  const SpdMatrix r = SpdMatrix::make(a.transpose() * a);
  const Mat s = r.sqrt();
  CHECK((s * s - r.matrix()).norm() < 1e-12 * r.matrix().norm());
  CHECK((s - s.transpose()).norm() < 1e-13);
  CHECK((r.inv_sqrt() * s - Mat::Identity(3, 3)).norm() < 1e-12);

  Mat bad = Mat::Identity(2, 2);
  bad(0, 1) = 0.5;
  CHECK_THROWS_AS(SpdMatrix::make(bad), ShapeMismatch);
  Mat indefinite = Mat::Identity(2, 2);
  indefinite(1, 1) = -1.0;
  CHECK_THROWS(SpdMatrix::make(indefinite));
}

TEST_CASE("frames and canonical anchors") {
  CHECK_THROWS_AS(StiefelFrame::make(Mat::Ones(3, 2)), ShapeMismatch);
  const Mat xi0 = canonical_xi0(3, 1).matrix();
  CHECK(xi0.rows() == 3);
  CHECK(xi0.cols() == 2);
  CHECK(xi0(0, 0) == 0.0);
  CHECK(xi0(1, 0) == 1.0);
  CHECK(xi0(2, 1) == 1.0);
  const Mat lam0 = canonical_lambda0(3, 1).matrix();
  CHECK((xi0.transpose() * lam0).norm() == 0.0);
  CHECK(canonical_u0(3, 1, 2).matrix().isIdentity());
  // xi_0' v_0 = u_0, the relation the slice factors rely on.
  for (int n = 3; n <= 6; ++n)
    for (int m = 1; m <= n - 1; ++m)
      for (int k = 1; n - k >= m; ++k)
        CHECK((canonical_xi0(n, k).matrix().transpose() * canonical_v0(n, m).matrix() -
               canonical_u0(n, k, m).matrix())
                  .norm() == 0.0);
}

TEST_CASE("polar decomposition reassembles x") {
  Rng rng = make_rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat x = gaussian(4, 2, rng);
    const auto p = polar_decompose(x);
    CHECK((p.v.matrix() * p.r_sqrt - x).norm() < 1e-12 * x.norm());
    CHECK(p.v.orthonormality_defect() < 1e-13);
    CHECK((p.r.matrix() - x.transpose() * x).norm() < 1e-12 * x.squaredNorm());
  }
  Mat x = gaussian(3, 2, rng);
  x.col(1).setZero();
  CHECK_THROWS_AS(polar_decompose(x), RankDeficient);
  CHECK_THROWS_AS(polar_decompose(gaussian(2, 3, rng)), RankDeficient);
}

TEST_CASE("completion to a rotation maps anchor onto frame") {
  Rng rng = make_rng(4);
  for (int n = 2; n <= 6; ++n) {
    for (int p = 1; p < n; ++p) {
      const StiefelFrame frame = haar_stiefel(n, p, rng);
      const StiefelFrame anchor = canonical_xi0(n, n - p);
      const Rotation g = complete_to_rotation(frame, anchor);
      CHECK((g.matrix() * anchor.matrix() - frame.matrix()).norm() < 1e-12);
      CHECK(orth_defect(g.matrix()) < 1e-12);
      CHECK(g.matrix().determinant() == doctest::Approx(1.0).epsilon(1e-12));
      // Deterministic: same inputs, same rotation.
      CHECK(complete_to_rotation(frame, anchor).matrix() == g.matrix());
    }
  }
  const Rotation r = haar_rotation(3, 9);
  Mat flipped = r.matrix();
  flipped.col(0) *= -1.0;
  CHECK_THROWS_AS(complete_to_rotation(StiefelFrame::make(flipped), StiefelFrame::make(Mat::Identity(3, 3))),
                  OrientationMismatch);
  CHECK_THROWS_AS(complete_to_rotation(canonical_xi0(4, 1), canonical_xi0(3, 1)), ShapeMismatch);
}

TEST_CASE("Haar samplers: membership, reproducibility, moments") {
  for (int n = 2; n <= 5; ++n) {
    const Mat g = haar_rotation(n, 17).matrix();
    CHECK(orth_defect(g) < 1e-12);
    CHECK(g.determinant() == doctest::Approx(1.0));
    CHECK(haar_rotation(n, 17).matrix() == g);
    CHECK(haar_rotation(n, 18).matrix() != g);
    CHECK(haar_stiefel(n + 1, n, 5).orthonormality_defect() < 1e-12);
  }
  // For Haar g in SO(n): E g_ij = 0 and E g_ij^2 = 1/n.
  Rng rng = make_rng(21);
  const int n = 4, samples = 20000;
  double s1 = 0.0, s2 = 0.0;
  int negative = 0;
  for (int i = 0; i < samples; ++i) {
    const Mat g = haar_rotation(n, rng).matrix();
    s1 += g(1, 2);
    s2 += g(1, 2) * g(1, 2);
    negative += haar_orthogonal(3, rng).determinant() < 0.0 ? 1 : 0;
  }
  const double sd = std::sqrt(1.0 / n / samples);
  CHECK(std::abs(s1 / samples) < 4.0 * sd);
  CHECK(s2 / samples == doctest::Approx(1.0 / n).epsilon(0.03));
  CHECK(negative > samples / 2 - 400);
  CHECK(negative < samples / 2 + 400);
}

TEST_CASE("matrix planes: points satisfy xi'x = t and canonical form is O(n-k) invariant") {
  Rng rng = make_rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const StiefelFrame xi = haar_stiefel(4, 2, rng);
    const Mat t = gaussian(2, 3, rng);
    const MatrixPlane plane = MatrixPlane::make(xi, t);
    const Mat u = gaussian(2, 3, rng);
    const Mat x = plane_point(plane, u);
    CHECK((xi.matrix().transpose() * x - t).norm() < 1e-12);
    CHECK((PlaneChart(plane).point(u) - x).norm() == 0.0);

    const Mat theta = haar_orthogonal(2, rng);
    const MatrixPlane same =
        MatrixPlane::make(StiefelFrame::make(xi.matrix() * theta.transpose()), theta * t);
    const auto a = plane_canonical(plane);
    const auto b = plane_canonical(same);
    CHECK((a.projector - b.projector).norm() < 1e-12);
    CHECK((a.offset - b.offset).norm() < 1e-12);
  }
  CHECK_THROWS_AS(MatrixPlane::make(canonical_xi0(3, 1), Mat::Zero(3, 2)), ShapeMismatch);
}
