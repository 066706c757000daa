#pragma once

// Matrix points, Stiefel frames, rotations and matrix k-planes in the space
// M_{n,m} of real n x m matrices.

#include <Eigen/Dense>
#include <cstdint>
#include <utility>

#include "matplane/errors.hpp"
#include "matplane/rng.hpp"

namespace matplane {

/// Largest supported n or m. Small matrices live on the stack.
inline constexpr int kMaxDim = 8;

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;
using MatrixPoint = Mat;

/// The triple (n, m, k): ambient M_{n,m} and matrix k-planes, 0 < k < n.
struct Dims {
  int n = 0;
  int m = 0;
  int k = 0;

  /// Validates 0 < k < n, m >= 1 and n, m <= kMaxDim; throws InvalidDims.
  static Dims make(int n, int m, int k);

  bool injective() const noexcept { return n - k >= m; }
  int codim() const noexcept { return n - k; }
  /// Discrete Wallach bound min(m-1, n-m); negative when n < m.
  int k0() const noexcept { return std::min(m - 1, n - m); }

  friend bool operator==(const Dims&, const Dims&) = default;
};

/// |x|_m = det(x'x)^{1/2}; zero when rank(x) < m.
double det_root(const Mat& x);

/// Numerical rank from singular values with cutoff rel_tol * sigma_max.
int matrix_rank(const Mat& x, double rel_tol = 1e-10);

/// Symmetric positive-definite m x m matrix.
class SpdMatrix {
 public:
  /// Validates symmetry (relative 1e-12) and strict positivity of the spectrum.
  static SpdMatrix make(const Mat& r);
  /// For values produced internally as x'x of a full-rank x.
  static SpdMatrix assume_valid(Mat r) { return SpdMatrix(std::move(r)); }

  const Mat& matrix() const noexcept { return r_; }
  int size() const noexcept { return static_cast<int>(r_.rows()); }
  double det() const { return r_.determinant(); }
  Mat sqrt() const;
  Mat inv_sqrt() const;

 private:
  explicit SpdMatrix(Mat r) : r_(std::move(r)) {}
  Mat r_;
};

/// An n x p matrix with orthonormal columns, an element of V_{n,p}.
class StiefelFrame {
 public:
  static constexpr double kTolerance = 1e-12;

  /// Validates ||v'v - I_p||_inf <= kTolerance; throws ShapeMismatch otherwise.
  static StiefelFrame make(const Mat& v);
  /// Skips validation. Only for matrices that are orthonormal by construction.
  static StiefelFrame assume_orthonormal(Mat v) { return StiefelFrame(std::move(v)); }

  const Mat& matrix() const noexcept { return v_; }
  int rows() const noexcept { return static_cast<int>(v_.rows()); }
  int cols() const noexcept { return static_cast<int>(v_.cols()); }
  /// max |v'v - I|.
  double orthonormality_defect() const;

 private:
  explicit StiefelFrame(Mat v) : v_(std::move(v)) {}
  Mat v_;
};

/// An element of SO(n).
class Rotation {
 public:
  static constexpr double kOrthTolerance = 1e-12;
  static constexpr double kDetTolerance = 1e-10;

  static Rotation make(const Mat& g);
  static Rotation assume_valid(Mat g) { return Rotation(std::move(g)); }
  static Rotation identity(int n) { return Rotation(Mat::Identity(n, n)); }

  const Mat& matrix() const noexcept { return g_; }
  int size() const noexcept { return static_cast<int>(g_.rows()); }

 private:
  explicit Rotation(Mat g) : g_(std::move(g)) {}
  Mat g_;
};

/// xi_0 = [0; I_{n-k}] in V_{n,n-k}.
StiefelFrame canonical_xi0(int n, int k);
/// v_0 = [0; I_m] in V_{n,m}.
StiefelFrame canonical_v0(int n, int m);
/// u_0 = [0; I_m] in V_{n-k,m}.
StiefelFrame canonical_u0(int n, int k, int m);
/// lambda_0 = [I_k; 0] in V_{n,k}.
StiefelFrame canonical_lambda0(int n, int k);

struct PolarDecomposition {
  StiefelFrame v;
  SpdMatrix r;   // x'x
  Mat r_sqrt;    // r^{1/2}
};

/// x = v r^{1/2} with r = x'x. Requires n >= m and smallest singular value
/// above rel_threshold * largest; throws RankDeficient otherwise.
PolarDecomposition polar_decompose(const Mat& x, double rel_threshold = 1e-10);

/// Deterministic g in SO(n) with g * anchor = frame.
///
/// Both frames are completed to orthonormal bases by Householder QR with the
/// R-diagonal made positive; g = Q_frame Q_anchor'. If that product has
/// determinant -1 the last completed column of Q_frame is negated. Throws
/// ShapeMismatch for differing shapes and OrientationMismatch when p = n and
/// the frames have opposite orientation.
Rotation complete_to_rotation(const StiefelFrame& frame, const StiefelFrame& anchor);

/// Haar-distributed rotation (Gaussian QR, R-diagonal sign fix, one column
/// negated when det = -1).
Rotation haar_rotation(int n, std::uint64_t seed);
Rotation haar_rotation(int n, Rng& rng);

/// Haar-distributed element of O(n): a Haar rotation with its first column
/// negated on a fair coin.
Mat haar_orthogonal(int n, std::uint64_t seed);
Mat haar_orthogonal(int n, Rng& rng);

/// Uniform frame on V_{n,p} (thin QR of an n x p Gaussian, sign fixed).
StiefelFrame haar_stiefel(int n, int p, std::uint64_t seed);
StiefelFrame haar_stiefel(int n, int p, Rng& rng);

/// A matrix k-plane {x : xi' x = t}, xi in V_{n,n-k}, t in M_{n-k,m}.
///
/// (xi, t) and (xi theta', theta t) describe the same plane for theta in
/// O(n-k); compare planes only through plane_canonical().
struct MatrixPlane {
  StiefelFrame xi;
  Mat t;

  static MatrixPlane make(StiefelFrame xi, Mat t);
  int n() const noexcept { return xi.rows(); }
  int k() const noexcept { return xi.rows() - xi.cols(); }
  int m() const noexcept { return static_cast<int>(t.cols()); }
};

struct PlaneCanonicalForm {
  Mat projector;  // xi xi', n x n
  Mat offset;     // lambda = xi t, n x m
};

PlaneCanonicalForm plane_canonical(const MatrixPlane& plane);

/// Points of a plane, x = g [u; t], for a fixed rotation g with g xi_0 = xi.
class PlaneChart {
 public:
  /// Uses the deterministic completion complete_to_rotation(xi, xi_0).
  explicit PlaneChart(const MatrixPlane& plane);
  /// Uses a caller-supplied rotation; g * xi_0 must equal plane.xi.
  PlaneChart(const Rotation& g, Mat t);

  /// x = g [u; t] for u in M_{k,m}.
  Mat point(const Mat& u) const;
  /// Writes x = g [u; t] into `out` (resized as needed).
  void point_into(const Mat& u, Mat& out) const;

  const Mat& rotation() const noexcept { return g_; }
  int k() const noexcept { return k_; }
  int m() const noexcept { return static_cast<int>(t_.cols()); }

 private:
  Mat g_;
  Mat t_;
  int k_;
};

/// x = g_xi [u; t].
Mat plane_point(const MatrixPlane& plane, const Mat& u);

}  // namespace matplane
