#include "matplane/lattice.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <numbers>
#include <ostream>

#include "matplane/errors.hpp"
#include "matplane/parallel.hpp"

namespace matplane {

static_assert(std::endian::native == std::endian::little, "MPLN I/O assumes a little-endian host");

namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex mu;
  return mu;
}

void centered_dft(const LatticeGeometry& g, std::vector<cplx>& data, int sign, double factor) {
  if (data.size() != g.size()) throw ShapeMismatch("lattice data size does not match geometry");
  const int d = g.axes();
  const auto parity = [&](std::size_t i) {
    int s = 0;
    for (int a = 0; a < d; ++a) s += g.index_on_axis(i, a);
    return (s & 1) ? -1.0 : 1.0;
  };
  double post = factor;
  for (int a = 0; a < d; ++a)
    if ((g.extents()[a] / 2) % 2) post = -post;

  parallel_for(data.size(), [&](std::size_t i) { data[i] *= parity(i); });

  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    plan = fftw_plan_dft(d, g.extents().data(), p, p, sign, FFTW_ESTIMATE);
  }
  if (!plan) throw Error("FFTW planning failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }

  parallel_for(data.size(), [&](std::size_t i) { data[i] *= parity(i) * post; });
}

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw Error("truncated MPLN stream");
  return v;
}

}  // namespace

LatticeGeometry::LatticeGeometry(int n, int m, std::vector<int> extents, std::vector<double> spacing)
    : n_(n), m_(m), extents_(std::move(extents)), spacing_(std::move(spacing)) {
  if (n < 1 || m < 1 || n > kMaxDim || m > kMaxDim) throw InvalidDims("lattice dims out of range");
  const int d = n * m;
  if (static_cast<int>(extents_.size()) != d || static_cast<int>(spacing_.size()) != d)
    throw ShapeMismatch("lattice needs one extent and spacing per axis");
  strides_.assign(d, 1);
  size_ = 1;
  for (int a = d - 1; a >= 0; --a) {
    if (extents_[a] < 2 || extents_[a] % 2) throw BadSpec("lattice extents must be even and >= 2");
    if (!(spacing_[a] > 0.0)) throw BadSpec("lattice spacing must be positive");
    strides_[a] = size_;
    size_ *= static_cast<std::size_t>(extents_[a]);
  }
}

LatticeGeometry LatticeGeometry::uniform(int n, int m, int extent, double spacing) {
  return LatticeGeometry(n, m, std::vector<int>(n * m, extent), std::vector<double>(n * m, spacing));
}

void LatticeGeometry::unflatten(std::size_t flat, int* idx) const {
  for (int a = axes() - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % static_cast<std::size_t>(extents_[a]));
    flat /= static_cast<std::size_t>(extents_[a]);
  }
}

std::size_t LatticeGeometry::flatten(const int* idx) const {
  std::size_t f = 0;
  for (int a = 0; a < axes(); ++a) f += static_cast<std::size_t>(idx[a]) * strides_[a];
  return f;
}

void LatticeGeometry::point_into(std::size_t flat, Mat& out) const {
  out.resize(n_, m_);
  for (int a = axes() - 1; a >= 0; --a) {
    const int j = static_cast<int>(flat % static_cast<std::size_t>(extents_[a]));
    flat /= static_cast<std::size_t>(extents_[a]);
    out(a / m_, a % m_) = coord(a, j);
  }
}

Mat LatticeGeometry::point(std::size_t flat) const {
  Mat x(n_, m_);
  point_into(flat, x);
  return x;
}

double LatticeGeometry::cell_volume() const {
  double v = 1.0;
  for (double h : spacing_) v *= h;
  return v;
}

LatticeGeometry LatticeGeometry::dual() const {
  std::vector<double> s(spacing_.size());
  for (std::size_t a = 0; a < s.size(); ++a)
    s[a] = 2.0 * std::numbers::pi / (extents_[a] * spacing_[a]);
  return LatticeGeometry(n_, m_, extents_, s);
}

bool LatticeGeometry::near_boundary(std::size_t flat, int reach) const {
  for (int a = 0; a < axes(); ++a) {
    const int j = index_on_axis(flat, a);
    if (j < reach || j >= extents_[a] - reach) return true;
  }
  return false;
}

void lattice_fourier_inplace(const LatticeGeometry& space, std::vector<cplx>& data) {
  centered_dft(space, data, FFTW_BACKWARD, space.cell_volume());
}

void lattice_inverse_fourier_inplace(const LatticeGeometry& space, std::vector<cplx>& data) {
  const double vol = space.dual().cell_volume() / std::pow(2.0 * std::numbers::pi, space.axes());
  centered_dft(space, data, FFTW_FORWARD, vol);
}

ComplexField lattice_fourier(const RealField& f) {
  std::vector<cplx> d(f.data.begin(), f.data.end());
  lattice_fourier_inplace(f.geometry, d);
  return ComplexField(f.geometry.dual(), std::move(d));
}

RealField lattice_inverse_fourier_real(const LatticeGeometry& space, std::vector<cplx> freq) {
  lattice_inverse_fourier_inplace(space, freq);
  RealField out(space);
  for (std::size_t i = 0; i < freq.size(); ++i) out.data[i] = freq[i].real();
  return out;
}

void write_mpln(std::ostream& os, const RealField& f) {
  const auto& g = f.geometry;
  os.write("MPLN", 4);
  put<std::uint32_t>(os, 1);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.n()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.m()));
  for (int e : g.extents()) put<std::uint32_t>(os, static_cast<std::uint32_t>(e));
  for (double h : g.spacing()) put<double>(os, h);
  os.write(reinterpret_cast<const char*>(f.data.data()),
           static_cast<std::streamsize>(f.data.size() * sizeof(double)));
  if (!os) throw Error("failed to write MPLN stream");
}

void write_mpln(const std::string& path, const RealField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path);
  write_mpln(os, f);
}

RealField read_mpln(std::istream& is) {
  char magic[4] = {};
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "MPLN", 4) != 0) throw Error("not an MPLN stream");
  if (get<std::uint32_t>(is) != 1) throw Error("unsupported MPLN version");
  const int n = static_cast<int>(get<std::uint32_t>(is));
  const int m = static_cast<int>(get<std::uint32_t>(is));
  if (n < 1 || m < 1 || n > kMaxDim || m > kMaxDim) throw Error("MPLN dims out of range");
  std::vector<int> ext(n * m);
  std::vector<double> sp(n * m);
  for (auto& e : ext) e = static_cast<int>(get<std::uint32_t>(is));
  for (auto& h : sp) h = get<double>(is);
  RealField f(LatticeGeometry(n, m, ext, sp));
  is.read(reinterpret_cast<char*>(f.data.data()),
          static_cast<std::streamsize>(f.data.size() * sizeof(double)));
  if (!is) throw Error("truncated MPLN payload");
  return f;
}

RealField read_mpln(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  return read_mpln(is);
}

void write_csv_slice(std::ostream& os, const RealField& f, std::size_t anchor,
                     const std::vector<int>& free_axes) {
  const auto& g = f.geometry;
  if (free_axes.empty() || free_axes.size() > 2) throw BadSpec("CSV slices are 1-D or 2-D");
  for (int a : free_axes)
    if (a < 0 || a >= g.axes()) throw BadSpec("slice axis out of range");
  std::vector<int> idx(g.axes());
  g.unflatten(anchor, idx.data());
  for (int a : free_axes) os << 'x' << a / g.m() << a % g.m() << ',';
  os << "value\n";
  os.precision(17);
  const int l0 = g.extents()[free_axes[0]];
  const int l1 = free_axes.size() == 2 ? g.extents()[free_axes[1]] : 1;
  for (int i = 0; i < l0; ++i)
    for (int j = 0; j < l1; ++j) {
      idx[free_axes[0]] = i;
      os << g.coord(free_axes[0], i) << ',';
      if (free_axes.size() == 2) {
        idx[free_axes[1]] = j;
        os << g.coord(free_axes[1], j) << ',';
      }
      os << f.data[g.flatten(idx.data())] << '\n';
    }
}

}  // namespace matplane
