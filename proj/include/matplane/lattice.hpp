#pragma once

// Rectangular lattices in M_{n,m}, centered discrete Fourier transforms and
// the MPLN binary container.
//
// Axis (a, i) of the lattice is entry x_{a,i} and has index a*m + i. Data is
// row-major with the last axis fastest. Sample j on an axis of extent L and
// spacing h sits at (j - L/2) h; L must be even.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "matplane/matspace.hpp"

namespace matplane {

using cplx = std::complex<double>;

class LatticeGeometry {
 public:
  LatticeGeometry() = default;
  /// Validates extents (even, >= 2), spacings (> 0) and sizes (n*m axes).
  LatticeGeometry(int n, int m, std::vector<int> extents, std::vector<double> spacing);
  static LatticeGeometry uniform(int n, int m, int extent, double spacing);

  int n() const noexcept { return n_; }
  int m() const noexcept { return m_; }
  int axes() const noexcept { return n_ * m_; }
  const std::vector<int>& extents() const noexcept { return extents_; }
  const std::vector<double>& spacing() const noexcept { return spacing_; }
  std::size_t size() const noexcept { return size_; }
  std::size_t stride(int axis) const { return strides_[axis]; }

  /// Coordinate of index j on an axis.
  double coord(int axis, int j) const { return (j - extents_[axis] / 2) * spacing_[axis]; }
  /// Index of the axis coordinate along `axis` of a flat index.
  int index_on_axis(std::size_t flat, int axis) const {
    return static_cast<int>((flat / strides_[axis]) % static_cast<std::size_t>(extents_[axis]));
  }
  void unflatten(std::size_t flat, int* idx) const;
  std::size_t flatten(const int* idx) const;
  /// Lattice point as an n x m matrix.
  Mat point(std::size_t flat) const;
  void point_into(std::size_t flat, Mat& out) const;
  double cell_volume() const;

  /// Frequency lattice: same extents, spacing 2 pi / (L h). The dual of the
  /// dual is the original lattice.
  LatticeGeometry dual() const;

  /// True when some index lies within `reach` samples of an edge.
  bool near_boundary(std::size_t flat, int reach) const;

  friend bool operator==(const LatticeGeometry&, const LatticeGeometry&) = default;

 private:
  int n_ = 0;
  int m_ = 0;
  std::vector<int> extents_;
  std::vector<double> spacing_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

template <class T>
struct LatticeField {
  LatticeGeometry geometry;
  std::vector<T> data;

  LatticeField() = default;
  explicit LatticeField(LatticeGeometry g) : geometry(std::move(g)), data(geometry.size(), T{}) {}
  LatticeField(LatticeGeometry g, std::vector<T> d) : geometry(std::move(g)), data(std::move(d)) {}
};
using RealField = LatticeField<double>;
using ComplexField = LatticeField<cplx>;

/// Samples of the continuous transform (F f)(y) = int exp(i tr(y'x)) f(x) dx on
/// the dual lattice, approximated by the lattice sum with cell volume. In place.
void lattice_fourier_inplace(const LatticeGeometry& space, std::vector<cplx>& data);
/// Inverse of lattice_fourier_inplace: frequency samples on space.dual() to
/// values on `space`, with the (2 pi)^{-nm} normalization. In place.
void lattice_inverse_fourier_inplace(const LatticeGeometry& space, std::vector<cplx>& data);

ComplexField lattice_fourier(const RealField& f);
/// Returns the real part of the inverse transform on `space`.
RealField lattice_inverse_fourier_real(const LatticeGeometry& space, std::vector<cplx> freq);

/// Samples fn at every lattice point.
template <class Fn>
RealField sample_field(const LatticeGeometry& g, Fn&& fn);

/// MPLN container: "MPLN", u32 version (1), u32 n, u32 m, u32 extents[nm],
/// f64 spacing[nm], f64 payload, all little-endian.
void write_mpln(std::ostream& os, const RealField& f);
void write_mpln(const std::string& path, const RealField& f);
RealField read_mpln(std::istream& is);
RealField read_mpln(const std::string& path);

/// CSV of a 1-D or 2-D slice through `anchor` (a flat index) along the given
/// axes. Columns: coordinates of the free axes, then value.
void write_csv_slice(std::ostream& os, const RealField& f, std::size_t anchor,
                     const std::vector<int>& free_axes);

}  // namespace matplane

#include "matplane/lattice_impl.hpp"
