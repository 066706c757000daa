#include "matplane/matspace.hpp"

#include <cmath>
#include <random>
#include <string>

namespace matplane {

namespace {

Mat gaussian_matrix(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat a(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) a(i, j) = normal(rng);
  return a;
}

// Full orthogonal Q of a Householder QR with the columns of Q multiplied by
// sign(R_ii) for i < p, so that the first p columns reproduce an orthonormal
// input exactly up to rounding.
Mat signed_householder_q(const Mat& a) {
  const int n = static_cast<int>(a.rows());
  const int p = static_cast<int>(a.cols());
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ() * Mat::Identity(n, n);
  const Mat& r = qr.matrixQR();
  for (int i = 0; i < std::min(n, p); ++i)
    if (r(i, i) < 0.0) q.col(i) = -q.col(i);
  return q;
}

void check_dim(int v, const char* name) {
  if (v < 1 || v > kMaxDim)
    throw InvalidDims(std::string(name) + " must lie in [1, " + std::to_string(kMaxDim) +
                      "], got " + std::to_string(v));
}

}  // namespace

Dims Dims::make(int n, int m, int k) {
  check_dim(n, "n");
  check_dim(m, "m");
  if (k <= 0 || k >= n)
    throw InvalidDims("k must satisfy 0 < k < n, got k=" + std::to_string(k) +
                      " with n=" + std::to_string(n));
  return Dims{n, m, k};
}

double det_root(const Mat& x) {
  if (x.rows() < x.cols()) return 0.0;
  const Mat g = x.transpose() * x;
  const double d = g.determinant();
  return d > 0.0 ? std::sqrt(d) : 0.0;
}

int matrix_rank(const Mat& x, double rel_tol) {
  if (x.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(x);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++r;
  return r;
}

SpdMatrix SpdMatrix::make(const Mat& r) {
  if (r.rows() != r.cols() || r.rows() == 0) throw ShapeMismatch("SPD matrix must be square");
  const double scale = std::max(r.cwiseAbs().maxCoeff(), 1e-300);
  if ((r - r.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ShapeMismatch("matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(r);
  if (es.eigenvalues().minCoeff() <= 0.0) throw RankDeficient("matrix is not positive definite");
  return SpdMatrix(r);
}

Mat SpdMatrix::sqrt() const {
  Eigen::SelfAdjointEigenSolver<Mat> es(r_);
  const auto& q = es.eigenvectors();
  return q * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() * q.transpose();
}

Mat SpdMatrix::inv_sqrt() const {
  Eigen::SelfAdjointEigenSolver<Mat> es(r_);
  const auto& q = es.eigenvectors();
  return q * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * q.transpose();
}

double StiefelFrame::orthonormality_defect() const {
  const int p = cols();
  return (v_.transpose() * v_ - Mat::Identity(p, p)).cwiseAbs().maxCoeff();
}

StiefelFrame StiefelFrame::make(const Mat& v) {
  if (v.cols() < 1 || v.cols() > v.rows()) throw ShapeMismatch("frame needs 1 <= p <= n");
  StiefelFrame f(v);
  if (f.orthonormality_defect() > kTolerance)
    throw ShapeMismatch("columns are not orthonormal");
  return f;
}

Rotation Rotation::make(const Mat& g) {
  if (g.rows() != g.cols()) throw ShapeMismatch("rotation must be square");
  const int n = static_cast<int>(g.rows());
  if ((g.transpose() * g - Mat::Identity(n, n)).cwiseAbs().maxCoeff() > kOrthTolerance)
    throw ShapeMismatch("matrix is not orthogonal");
  if (std::abs(g.determinant() - 1.0) > kDetTolerance)
    throw OrientationMismatch("determinant is not +1");
  return Rotation(g);
}

StiefelFrame canonical_xi0(int n, int k) {
  Mat v = Mat::Zero(n, n - k);
  v.bottomRows(n - k).setIdentity();
  return StiefelFrame::assume_orthonormal(v);
}

StiefelFrame canonical_v0(int n, int m) {
  if (m > n) throw ShapeMismatch("v0 needs m <= n");
  Mat v = Mat::Zero(n, m);
  v.bottomRows(m).setIdentity();
  return StiefelFrame::assume_orthonormal(v);
}

StiefelFrame canonical_u0(int n, int k, int m) { return canonical_v0(n - k, m); }

StiefelFrame canonical_lambda0(int n, int k) {
  Mat v = Mat::Zero(n, k);
  v.topRows(k).setIdentity();
  return StiefelFrame::assume_orthonormal(v);
}

PolarDecomposition polar_decompose(const Mat& x, double rel_threshold) {
  const int n = static_cast<int>(x.rows());
  const int m = static_cast<int>(x.cols());
  if (n < m) throw RankDeficient("polar decomposition needs n >= m");
  Eigen::JacobiSVD<Mat> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (s(0) == 0.0 || s(m - 1) < rel_threshold * s(0))
    throw RankDeficient("matrix is rank deficient");
  // x = U S W' gives v = U W' and r^{1/2} = W S W'.
  const Mat& u = svd.matrixU();
  const Mat& w = svd.matrixV();
  Mat v = u * w.transpose();
  Mat rs = w * s.asDiagonal() * w.transpose();
  Mat r = x.transpose() * x;
  return {StiefelFrame::assume_orthonormal(std::move(v)), SpdMatrix::assume_valid(std::move(r)),
          std::move(rs)};
}

Rotation complete_to_rotation(const StiefelFrame& frame, const StiefelFrame& anchor) {
  if (frame.rows() != anchor.rows() || frame.cols() != anchor.cols())
    throw ShapeMismatch("frame and anchor shapes differ");
  const int n = frame.rows();
  const int p = frame.cols();
  Mat qf = signed_householder_q(frame.matrix());
  const Mat qa = signed_householder_q(anchor.matrix());
  if (qf.determinant() * qa.determinant() < 0.0) {
    if (p == n) throw OrientationMismatch("square frames with opposite orientation");
    qf.col(n - 1) = -qf.col(n - 1);
  }
  return Rotation::assume_valid(qf * qa.transpose());
}

Rotation haar_rotation(int n, Rng& rng) {
  Mat q = signed_householder_q(gaussian_matrix(n, n, rng));
  if (q.determinant() < 0.0) q.col(0) = -q.col(0);
  return Rotation::assume_valid(std::move(q));
}

Rotation haar_rotation(int n, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return haar_rotation(n, rng);
}

Mat haar_orthogonal(int n, Rng& rng) {
  Mat q = haar_rotation(n, rng).matrix();
  if (std::bernoulli_distribution(0.5)(rng)) q.col(0) = -q.col(0);
  return q;
}

Mat haar_orthogonal(int n, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return haar_orthogonal(n, rng);
}

StiefelFrame haar_stiefel(int n, int p, Rng& rng) {
  if (p < 1 || p > n) throw ShapeMismatch("Stiefel sampler needs 1 <= p <= n");
  const Mat q = signed_householder_q(gaussian_matrix(n, p, rng));
  return StiefelFrame::assume_orthonormal(q.leftCols(p));
}

StiefelFrame haar_stiefel(int n, int p, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return haar_stiefel(n, p, rng);
}

MatrixPlane MatrixPlane::make(StiefelFrame xi, Mat t) {
  if (t.rows() != xi.cols()) throw ShapeMismatch("offset must have n-k rows");
  if (xi.cols() >= xi.rows()) throw ShapeMismatch("plane frame needs n-k < n columns");
  return MatrixPlane{std::move(xi), std::move(t)};
}

PlaneCanonicalForm plane_canonical(const MatrixPlane& plane) {
  const Mat& xi = plane.xi.matrix();
  return {xi * xi.transpose(), xi * plane.t};
}

PlaneChart::PlaneChart(const MatrixPlane& plane)
    : g_(complete_to_rotation(plane.xi, canonical_xi0(plane.n(), plane.k())).matrix()),
      t_(plane.t),
      k_(plane.k()) {}

PlaneChart::PlaneChart(const Rotation& g, Mat t)
    : g_(g.matrix()), t_(std::move(t)), k_(g.size() - static_cast<int>(t_.rows())) {
  if (k_ <= 0) throw ShapeMismatch("offset has too many rows for the rotation");
}

void PlaneChart::point_into(const Mat& u, Mat& out) const {
  // g [u; t] = g_left u + g_right t
  out.noalias() = g_.leftCols(k_) * u;
  out.noalias() += g_.rightCols(g_.cols() - k_) * t_;
}

Mat PlaneChart::point(const Mat& u) const {
  Mat x(g_.rows(), t_.cols());
  point_into(u, x);
  return x;
}

Mat plane_point(const MatrixPlane& plane, const Mat& u) {
  if (u.rows() != plane.k() || u.cols() != plane.m())
    throw ShapeMismatch("u must be k x m");
  return PlaneChart(plane).point(u);
}

}  // namespace matplane
