#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "matplane/lattice.hpp"
#include "matplane/lattice_impl.hpp"

using namespace matplane;

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST_CASE("geometry indexing") {
  const LatticeGeometry g(2, 2, {4, 6, 2, 8}, {0.5, 0.25, 1.0, 0.1});
  CHECK(g.axes() == 4);
  CHECK(g.size() == 4u * 6u * 2u * 8u);
  CHECK(g.stride(3) == 1u);
  CHECK(g.stride(0) == 6u * 2u * 8u);
  CHECK(g.coord(1, 0) == doctest::Approx(-0.75));
  CHECK(g.coord(1, 3) == 0.0);
  CHECK(g.cell_volume() == doctest::Approx(0.5 * 0.25 * 1.0 * 0.1));
  int idx[4];
  for (std::size_t flat : {std::size_t{0}, std::size_t{17}, g.size() - 1}) {
    g.unflatten(flat, idx);
    CHECK(g.flatten(idx) == flat);
    for (int a = 0; a < 4; ++a) CHECK(g.index_on_axis(flat, a) == idx[a]);
    const Mat x = g.point(flat);
    CHECK(x(1, 0) == doctest::Approx(g.coord(2, idx[2])));
  }
  CHECK(g.dual().dual() == g);
  CHECK(g.dual().spacing()[0] == doctest::Approx(2.0 * kPi / (4 * 0.5)));
  CHECK(g.near_boundary(0, 1));
  CHECK_THROWS_AS(LatticeGeometry::uniform(1, 2, 5, 0.1), BadSpec);
  CHECK_THROWS_AS(LatticeGeometry::uniform(1, 2, 4, 0.0), BadSpec);
  CHECK_THROWS_AS(LatticeGeometry(1, 2, {4}, {0.1}), ShapeMismatch);
}

TEST_CASE("lattice Fourier transform samples the continuous transform") {
  // exp(-|x|^2) on M_{1,2}: transform pi exp(-|y|^2 / 4).
  const auto g = LatticeGeometry::uniform(1, 2, 32, std::sqrt(2.0 * kPi / 32));
  const RealField f = sample_field(g, [](const Mat& x) { return std::exp(-x.squaredNorm()); });
  const ComplexField ft = lattice_fourier(f);
  CHECK(ft.geometry == g.dual());
  // Inner half of the frequency box, away from the periodic images.
  double worst = 0.0;
  for (std::size_t i = 0; i < ft.data.size(); ++i) {
    const Mat y = ft.geometry.point(i);
    if (y.cwiseAbs().maxCoeff() > 3.5) continue;
    worst = std::max(worst, std::abs(ft.data[i] - kPi * std::exp(-0.25 * y.squaredNorm())));
  }
  CHECK(worst < 1e-10);

  // Shift theorem picks the sign convention: f(x - a) -> exp(i tr(y'a)) F(y).
  Mat a(1, 2);
  a << 2.0 * g.spacing()[0], -1.0 * g.spacing()[1];
  const RealField fs = sample_field(g, [&](const Mat& x) { return std::exp(-(x - a).squaredNorm()); });
  const ComplexField fts = lattice_fourier(fs);
  for (std::size_t i : {std::size_t{100}, std::size_t{517}, std::size_t{530}}) {
    const Mat y = ft.geometry.point(i);
    CHECK(std::abs(fts.data[i] - std::polar(1.0, (y.transpose() * a).trace()) * ft.data[i]) < 1e-10);
  }
}

TEST_CASE("inverse transform round trip") {
  const auto g = LatticeGeometry(2, 1, {8, 6}, {0.3, 0.7});
  const RealField f = sample_field(g, [](const Mat& x) { return std::sin(x(0, 0)) + x(1, 0) * x(1, 0); });
  const ComplexField ft = lattice_fourier(f);
  const RealField back = lattice_inverse_fourier_real(g, ft.data);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(back.data[i] == doctest::Approx(f.data[i]).epsilon(1e-12));
}

TEST_CASE("MPLN container round trip and layout") {
  const auto g = LatticeGeometry(1, 2, {4, 2}, {0.5, 0.25});
  RealField f(g);
  for (std::size_t i = 0; i < f.data.size(); ++i) f.data[i] = 0.5 * static_cast<double>(i) - 1.0;
  std::stringstream ss;
  write_mpln(ss, f);
  const std::string bytes = ss.str();
  CHECK(bytes.substr(0, 4) == "MPLN");
  CHECK(bytes.size() == 4u + 4u + 4u + 4u + 2u * 4u + 2u * 8u + 8u * 8u);
  CHECK(static_cast<unsigned char>(bytes[4]) == 1);  // version, little-endian
  const RealField back = read_mpln(ss);
  CHECK(back.geometry == g);
  CHECK(back.data == f.data);

  std::stringstream bad("MPLX0000");
  CHECK_THROWS_AS(read_mpln(bad), Error);
  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(read_mpln(truncated), Error);
}

TEST_CASE("CSV slices") {
  const auto g = LatticeGeometry::uniform(1, 2, 4, 1.0);
  const RealField f = sample_field(g, [](const Mat& x) { return x(0, 0) + 10.0 * x(0, 1); });
  std::ostringstream os;
  write_csv_slice(os, f, 0, {1});
  std::istringstream is(os.str());
  std::string line;
  int lines = 0;
  while (std::getline(is, line)) ++lines;
  CHECK(lines == 5);  // header and four samples
  CHECK_THROWS_AS(write_csv_slice(os, f, 0, {}), BadSpec);
}
