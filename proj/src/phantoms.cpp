#include "matplane/phantoms.hpp"

#include <cmath>
#include <memory>
#include <numbers>

namespace matplane {

namespace {

constexpr double kPi = std::numbers::pi;

FieldFunction gaussian(int n, int m) {
  FieldFunction f;
  f.n = n;
  f.m = m;
  f.name = "gaussian";
  const double mass = std::pow(kPi, n * m / 2.0);
  f.evaluate = [](const Mat& x) { return std::exp(-x.squaredNorm()); };
  f.closed.mass = mass;
  f.closed.radon = [n, m](const Mat& xi, const Mat& t) {
    const int k = n - static_cast<int>(xi.cols());
    return std::pow(kPi, k * m / 2.0) * std::exp(-t.squaredNorm());
  };
  f.closed.fourier = [mass](const Mat& y) { return cplx(mass * std::exp(-0.25 * y.squaredNorm())); };
  f.closed.radon_fourier_t = [mass](const Mat&, const Mat& b) {
    return cplx(mass * std::exp(-0.25 * b.squaredNorm()));
  };
  return f;
}

FieldFunction shifted_gaussian(int n, int m, const Mat& y0) {
  FieldFunction f;
  f.n = n;
  f.m = m;
  f.name = "shifted_gaussian";
  const double mass = std::pow(kPi, n * m / 2.0);
  f.evaluate = [y0](const Mat& x) { return std::exp(-(x + y0).squaredNorm()); };
  f.closed.mass = mass;
  f.closed.radon = [n, m, y0](const Mat& xi, const Mat& t) {
    const int k = n - static_cast<int>(xi.cols());
    return std::pow(kPi, k * m / 2.0) * std::exp(-(t + xi.transpose() * y0).squaredNorm());
  };
  f.closed.fourier = [mass, y0](const Mat& y) {
    return std::polar(mass * std::exp(-0.25 * y.squaredNorm()), -(y.transpose() * y0).trace());
  };
  f.closed.radon_fourier_t = [mass, y0](const Mat& xi, const Mat& b) {
    return std::polar(mass * std::exp(-0.25 * b.squaredNorm()),
                      -(b.transpose() * xi.transpose() * y0).trace());
  };
  return f;
}

double boundary_value(const Mat& x, int n, double p) {
  const int m = static_cast<int>(x.cols());
  const Mat a = 2.0 * Mat::Identity(m, m) + x.transpose() * x;
  const double d = a.determinant();
  return std::pow(d, -(n + m - 1) / (2.0 * p)) / std::log(d);
}

TruncationSeries truncation_ladder(const Dims& dims, double p, const QuadratureSpec& spec) {
  QuadratureSpec s = spec;
  s.scheme = Scheme::truncated_grid;
  const PlaneChart chart(Rotation::identity(dims.n), Mat::Zero(dims.codim(), dims.m));
  const int n = dims.n;
  const MatFn integrand = [&](const Mat& u) {
    Mat x;
    chart.point_into(u, x);
    return boundary_value(x, n, p);
  };
  TruncationSeries out;
  for (double r = 1.0; r <= 128.0; r *= 2.0) {
    s.truncation_radius = r;
    out.emplace_back(r, integrate_matrix_space(integrand, dims.k, dims.m, s).value);
  }
  return out;
}

}  // namespace

std::string to_string(PhantomKind k) {
  switch (k) {
    case PhantomKind::gaussian:
      return "gaussian";
    case PhantomKind::shifted_gaussian:
      return "shifted_gaussian";
    case PhantomKind::det_decay:
      return "det_decay";
    case PhantomKind::boundary_lp:
      return "boundary_lp";
    case PhantomKind::rank_supported:
      return "rank_supported";
  }
  return "unknown";
}

PhantomKind phantom_kind_from_string(const std::string& name) {
  for (auto k : {PhantomKind::gaussian, PhantomKind::shifted_gaussian, PhantomKind::det_decay,
                 PhantomKind::boundary_lp, PhantomKind::rank_supported})
    if (to_string(k) == name) return k;
  throw BadSpec("unknown phantom '" + name + "'");
}

void PhantomSpec::validate() const {
  if (n < 1 || m < 1 || n > kMaxDim || m > kMaxDim) throw BadSpec("phantom dims out of range");
  switch (kind) {
    case PhantomKind::shifted_gaussian:
      if (shift.rows() != n || shift.cols() != m) throw BadSpec("shift must be n x m");
      break;
    case PhantomKind::det_decay:
      if (!(lambda > 0.0)) throw BadSpec("det_decay needs lambda > 0");
      break;
    case PhantomKind::boundary_lp:
      if (!(p >= 1.0)) throw BadSpec("boundary_lp needs p >= 1");
      break;
    case PhantomKind::rank_supported:
      if (!(epsilon > 0.0)) throw BadSpec("rank_supported needs epsilon > 0");
      if (m < 2) throw BadSpec("rank_supported needs m >= 2");
      break;
    case PhantomKind::gaussian:
      break;
  }
}

FieldFunction make_phantom(const PhantomSpec& spec) {
  spec.validate();
  const int n = spec.n;
  const int m = spec.m;
  switch (spec.kind) {
    case PhantomKind::gaussian:
      return gaussian(n, m);
    case PhantomKind::shifted_gaussian:
      return shifted_gaussian(n, m, spec.shift);
    case PhantomKind::det_decay: {
      FieldFunction f;
      f.n = n;
      f.m = m;
      f.name = "det_decay";
      f.decay_lambda = spec.lambda;
      const double lam = spec.lambda;
      f.evaluate = [lam](const Mat& x) {
        const int q = static_cast<int>(x.cols());
        const Mat a = Mat::Identity(q, q) + x.transpose() * x;
        return std::pow(a.determinant(), -0.5 * lam);
      };
      return f;
    }
    case PhantomKind::boundary_lp: {
      FieldFunction f;
      f.n = n;
      f.m = m;
      f.name = "boundary_lp";
      const double p = spec.p;
      f.evaluate = [n, p](const Mat& x) { return boundary_value(x, n, p); };
      return f;
    }
    case PhantomKind::rank_supported: {
      int extent = 32;
      while (extent > 2 && std::pow(extent, n * m) > 1048576.0) extent -= 2;
      auto w = std::make_shared<WitnessResult>(
          noninjectivity_witness(Dims::make(n, m, n - 1), spec.epsilon, extent));
      FieldFunction f;
      f.n = n;
      f.m = m;
      f.name = "rank_supported";
      f.evaluate = [w](const Mat& x) {
        const auto& g = w->psi.geometry;
        std::vector<int> idx(g.axes());
        for (int a = 0; a < g.axes(); ++a) {
          const int len = g.extents()[a];
          long j = std::lround(x(a / g.m(), a % g.m()) / g.spacing()[a]) + len / 2;
          j = ((j % len) + len) % len;
          idx[a] = static_cast<int>(j);
        }
        return w->psi.data[g.flatten(idx.data())];
      };
      return f;
    }
  }
  throw BadSpec("unknown phantom kind");
}

double critical_exponent(const Dims& dims) {
  return static_cast<double>(dims.n + dims.m - 1) / (dims.k + dims.m - 1);
}

TruncationSeries divergence_demo(const Dims& dims, double p, const QuadratureSpec& spec) {
  if (p < critical_exponent(dims)) throw WrongRegime("p below p0: use convergence_demo");
  return truncation_ladder(dims, p, spec);
}

TruncationSeries convergence_demo(const Dims& dims, double p, const QuadratureSpec& spec) {
  if (p >= critical_exponent(dims)) throw WrongRegime("p at or above p0: use divergence_demo");
  if (p < 1.0) throw BadSpec("p must be >= 1");
  return truncation_ladder(dims, p, spec);
}

}  // namespace matplane
