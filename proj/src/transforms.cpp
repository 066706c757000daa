#include "matplane/transforms.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "matplane/specialfn.hpp"

namespace matplane {

namespace {

constexpr double kPi = std::numbers::pi;

QuadratureSpec serial(QuadratureSpec s) {
  s.exec = Execution::serial;
  return s;
}

void require_dims(const FieldFunction& f, const Mat& x) {
  if (x.rows() != f.n || x.cols() != f.m) throw ShapeMismatch("point does not match field dims");
}

// Symmetric square root of an SPD matrix; closed form for m <= 2.
Mat spd_sqrt(const Mat& r) {
  if (r.rows() == 1) {
    Mat s(1, 1);
    s(0, 0) = std::sqrt(r(0, 0));
    return s;
  }
  if (r.rows() == 2) {
    const double sd = std::sqrt(std::max(r.determinant(), 0.0));
    Mat s = r;
    s(0, 0) += sd;
    s(1, 1) += sd;
    return s / std::sqrt(r.trace() + 2.0 * sd);
  }
  return SpdMatrix::assume_valid(r).sqrt();
}

}  // namespace

FieldFunction FieldFunction::zero(int n, int m) {
  FieldFunction f;
  f.n = n;
  f.m = m;
  f.name = "zero";
  f.evaluate = [](const Mat&) { return 0.0; };
  f.closed.radon = [](const Mat&, const Mat&) { return 0.0; };
  f.closed.fourier = [](const Mat&) { return cplx(0.0); };
  f.closed.radon_fourier_t = [](const Mat&, const Mat&) { return cplx(0.0); };
  f.closed.mass = 0.0;
  return f;
}

PlaneFunction PlaneFunction::zero(const Dims& d) {
  PlaneFunction p;
  p.n = d.n;
  p.m = d.m;
  p.k = d.k;
  p.evaluate = [](const Mat&, const Mat&) { return 0.0; };
  p.fourier_t = [](const Mat&, const Mat&) { return cplx(0.0); };
  return p;
}

PlaneFunction PlaneFunction::closed_radon(const FieldFunction& f, int k) {
  if (!f.closed.radon) throw BadSpec("field '" + f.name + "' has no closed-form Radon transform");
  PlaneFunction p;
  p.n = f.n;
  p.m = f.m;
  p.k = k;
  p.evaluate = f.closed.radon;
  p.fourier_t = f.closed.radon_fourier_t;
  return p;
}

PlaneFunction PlaneFunction::computed_radon(const FieldFunction& f, int k, const QuadratureSpec& spec) {
  PlaneFunction p;
  p.n = f.n;
  p.m = f.m;
  p.k = k;
  const QuadratureSpec inner = serial(spec);
  p.evaluate = [f, inner, k](const Mat& xi, const Mat& t) {
    const auto frame = StiefelFrame::assume_orthonormal(xi);
    const Rotation g = complete_to_rotation(frame, canonical_xi0(f.n, k));
    return radon(f, g, t, inner).value;
  };
  return p;
}

QuadraturePlan QuadraturePlan::defaults(std::uint64_t seed) {
  QuadraturePlan p;
  p.matrix_space = QuadratureSpec{Scheme::gauss_hermite_tensor, 12, 6.0, seed, 1e-3, 1.0};
  p.group = QuadratureSpec{Scheme::monte_carlo, 20000, 6.0, seed, 1e-2, 1.0};
  p.cone = QuadratureSpec{Scheme::truncated_grid, 12, 6.0, seed, 1e-3, 1.0};
  p.kernel = QuadratureSpec{Scheme::truncated_grid, 12, 6.0, seed, 1e-2, 1.0};
  return p;
}

QuadraturePlan QuadraturePlan::with_seed(std::uint64_t seed) const {
  QuadraturePlan p = *this;
  p.matrix_space.seed = p.group.seed = p.cone.seed = p.kernel.seed = seed;
  return p;
}

double relative_residual(cplx lhs, cplx rhs, double floor) {
  return std::abs(lhs - rhs) / std::max(std::abs(rhs), floor);
}

// ---- Radon ----

IntegralResult radon(const FieldFunction& f, const Rotation& g, const Mat& t,
                     const QuadratureSpec& spec) {
  if (g.size() != f.n || t.cols() != f.m) throw ShapeMismatch("plane does not match field dims");
  const int k = f.n - static_cast<int>(t.rows());
  if (k <= 0) throw ShapeMismatch("offset has too many rows");
  const PlaneChart chart(g, t);
  const MatFn integrand = [&](const Mat& u) {
    Mat x;
    chart.point_into(u, x);
    return f.evaluate(x);
  };
  if (spec.scheme != Scheme::truncated_grid) return integrate_matrix_space(integrand, k, f.m, spec);

  const double r = spec.truncation_radius;
  QuadratureSpec s = spec;
  s.truncation_radius = 0.25 * r;
  const auto quarter = integrate_matrix_space(integrand, k, f.m, s);
  s.truncation_radius = 0.5 * r;
  const auto half = integrate_matrix_space(integrand, k, f.m, s);
  auto full = integrate_matrix_space(integrand, k, f.m, spec);
  const double change = std::abs(full.value - half.value);
  if (change > spec.target_rel_tol * std::max(std::abs(full.value), 1e-300)) {
    std::ostringstream os;
    os << "truncated integrals " << quarter.value << ", " << half.value << ", " << full.value
       << " at radii " << 0.25 * r << ", " << 0.5 * r << ", " << r << " do not settle";
    throw DivergenceSuspected(os.str());
  }
  full.error_estimate = std::max(full.error_estimate, change);
  full.samples_used += quarter.samples_used + half.samples_used;
  return full;
}

IntegralResult radon(const FieldFunction& f, const MatrixPlane& plane, const QuadratureSpec& spec) {
  const Rotation g = complete_to_rotation(plane.xi, canonical_xi0(plane.n(), plane.k()));
  return radon(f, g, plane.t, spec);
}

IntegralResult radon_mass(const FieldFunction& f, const StiefelFrame& xi, const QuadratureSpec& spec) {
  const int n = xi.rows();
  const int k = n - xi.cols();
  const Rotation g = complete_to_rotation(xi, canonical_xi0(n, k));
  const QuadratureSpec inner = serial(spec);
  return integrate_matrix_space(
      [&](const Mat& t) { return radon(f, g, t, inner).value; }, n - k, f.m, spec);
}

// ---- dual ----

IntegralResult dual_radon(const PlaneFunction& phi, const Mat& x, const QuadratureSpec& spec) {
  const int c = phi.n - phi.k;
  return integrate_group(
      [&](const Mat& gamma) {
        const Mat xi = gamma.rightCols(c);
        const Mat t = xi.transpose() * x;
        return phi.evaluate(xi, t);
      },
      GroupDomain::so(phi.n), spec);
}

IntegralResult dual_radon_stiefel(const PlaneFunction& phi, const Mat& x, const QuadratureSpec& spec) {
  const int c = phi.n - phi.k;
  auto r = integrate_group(
      [&](const Mat& xi) {
        const Mat t = xi.transpose() * x;
        return phi.evaluate(xi, t);
      },
      GroupDomain::stiefel(phi.n, c), spec);
  const double sigma = stiefel_volume(phi.n, c);
  r.value /= sigma;
  r.error_estimate /= sigma;
  return r;
}

// ---- Riesz ----

RieszBranch riesz_branch(int n, int m, cplx alpha) {
  if (std::abs(alpha) < kPoleTolerance) return RieszBranch::identity;
  const double ar = std::round(alpha.real());
  const bool integral = std::abs(alpha - cplx(ar, 0.0)) < kPoleTolerance;
  if (m >= 2 && integral && ar >= 1.0 && ar <= std::min(m - 1, n - m))
    return RieszBranch::group_average;
  if (riesz_excluded(n, m, alpha)) throw ExcludedOrder("order is excluded from the Riesz family");
  if (alpha.real() > m - 1) return RieszBranch::convolution;
  throw UnsupportedOrder("no evaluable representation of the Riesz potential for this order");
}

ComplexIntegralResult riesz(const FieldFunction& f, cplx alpha, const Mat& x,
                            const QuadraturePlan& plan) {
  require_dims(f, x);
  const int n = f.n;
  const int m = f.m;
  const RieszBranch branch = riesz_branch(n, m, alpha);
  if (branch == RieszBranch::identity) return {cplx(f.evaluate(x)), 0.0, 1};
  if (f.decay_lambda && *f.decay_lambda <= alpha.real() + m - 1)
    throw DivergenceSuspected("decay exponent too small for this order");

  if (branch == RieszBranch::group_average) {
    const int k = static_cast<int>(std::lround(alpha.real()));
    const double c = fuglede_const(n, m, k);
    const QuadratureSpec inner = serial(plan.matrix_space);
    const auto r = integrate_group(
        [&](const Mat& gamma) {
          const auto lead = gamma.leftCols(k);
          return integrate_matrix_space(
                     [&](const Mat& u) {
                       const Mat y = x - lead * u;
                       return f.evaluate(y);
                     },
                     k, m, inner)
              .value;
        },
        GroupDomain::so(n), plan.group);
    return {cplx(c * r.value), c * r.error_estimate, r.samples_used};
  }

  const cplx inv_gamma = 1.0 / riesz_const(n, m, alpha);
  const cplx expo = alpha - static_cast<double>(n);
  const auto r = integrate_matrix_space_complex(
      [&](const Mat& y) {
        const double d = det_root(y);
        if (d < 1e-12) return cplx(0.0);
        return f.evaluate(x - y) * std::exp(expo * std::log(d));
      },
      n, m, plan.kernel);
  return {r.value * inv_gamma, r.error_estimate * std::abs(inv_gamma), r.samples_used};
}

IntegralResult riesz_alt(const FieldFunction& f, int k, const Mat& x, const QuadraturePlan& plan) {
  require_dims(f, x);
  const int n = f.n;
  const int m = f.m;
  const double c1 = dual_rep_const(n, m, k);
  if (f.decay_lambda && *f.decay_lambda <= k + m - 1)
    throw DivergenceSuspected("decay exponent too small for this order");
  const QuadratureSpec cone = serial(plan.cone);
  const QuadratureSpec inner = serial(plan.matrix_space);
  // With w = r^{1/2} z the inner integrand keeps unit width for every r; the
  // Jacobian |r|^{-(m-k)/2} moves the cone weight from (m-k-1)/2 to -1/2.
  const double w_exp = -0.5;
  const auto r = integrate_group(
      [&](const Mat& v) {
        return integrate_spd_cone(
                   [&](const Mat& rr) {
                     Mat p(n, m);
                     p.leftCols(k) = v * spd_sqrt(rr);
                     return integrate_matrix_space(
                                      [&](const Mat& w) {
                                        p.rightCols(m - k) = v * w;
                                        return f.evaluate(x - p);
                                      },
                                      k, m - k, inner)
                                      .value;
                   },
                   k, w_exp, cone)
            .value;
      },
      GroupDomain::stiefel(n, k), plan.group);
  const double scale = c1 * std::pow(2.0, -k);
  return {scale * r.value, scale * r.error_estimate, r.samples_used};
}

// ---- Fourier ----

ComplexIntegralResult fourier(const FieldFunction& f, const Mat& y, const QuadratureSpec& spec) {
  require_dims(f, y);
  return integrate_matrix_space_complex(
      [&](const Mat& x) {
        const double phase = (y.transpose() * x).trace();
        return std::polar(f.evaluate(x), phase);
      },
      f.n, f.m, spec);
}

SliceFactors slice_decompose(const Mat& y, const Dims& dims) {
  if (y.rows() != dims.n || y.cols() != dims.m) throw ShapeMismatch("frequency does not match dims");
  if (!dims.injective()) throw InjectivityViolated("slice factors need n - k >= m");
  const auto polar = polar_decompose(y);
  const Rotation gv = complete_to_rotation(polar.v, canonical_v0(dims.n, dims.m));
  Mat xi = gv.matrix() * canonical_xi0(dims.n, dims.k).matrix();
  Mat b = canonical_u0(dims.n, dims.k, dims.m).matrix() * polar.r_sqrt;
  return {StiefelFrame::assume_orthonormal(std::move(xi)), std::move(b)};
}

ComplexIntegralResult plane_fourier_t(const PlaneFunction& phi, const Mat& xi, const Mat& b,
                                      const QuadratureSpec& spec) {
  return integrate_matrix_space_complex(
      [&](const Mat& t) {
        const double phase = (b.transpose() * t).trace();
        return std::polar(phi.evaluate(xi, t), phase);
      },
      phi.n - phi.k, phi.m, spec);
}

CheckResult slice_check(const FieldFunction& f, const SliceFactors& fac, const Dims& dims,
                        const QuadratureSpec& spec) {
  const Mat y = fac.xi.matrix() * fac.b;
  const auto lhs = fourier(f, y, spec);
  const Rotation g = complete_to_rotation(fac.xi, canonical_xi0(dims.n, dims.k));
  const QuadratureSpec inner = serial(spec);
  const auto rhs = integrate_matrix_space_complex(
      [&](const Mat& t) {
        const double phase = (fac.b.transpose() * t).trace();
        return std::polar(radon(f, g, t, inner).value, phase);
      },
      dims.n - dims.k, dims.m, spec);
  CheckResult c{lhs.value, rhs.value, lhs.error_estimate, rhs.error_estimate, 0.0};
  c.residual = relative_residual(c.lhs, c.rhs, 1e-12);
  return c;
}

CheckResult slice_check(const FieldFunction& f, const Mat& y, const Dims& dims,
                        const QuadratureSpec& spec) {
  return slice_check(f, slice_decompose(y, dims), dims, spec);
}

// ---- identity checks ----

CheckResult fuglede_check(const FieldFunction& f, const Mat& x, int k, const QuadraturePlan& plan) {
  require_dims(f, x);
  const Dims dims = Dims::make(f.n, f.m, k);
  const double c = fuglede_const(dims.n, dims.m, k);
  const int codim = dims.codim();
  const QuadratureSpec inner = serial(plan.matrix_space);
  const auto lhs = integrate_group(
      [&](const Mat& gamma) {
        const Mat t = gamma.rightCols(codim).transpose() * x;
        return radon(f, Rotation::assume_valid(gamma), t, inner).value;
      },
      GroupDomain::so(dims.n), plan.group);
  const QuadraturePlan rplan = plan.with_seed(derive_seed(plan.group.seed, 0x52494553ULL));
  const auto rhs = riesz(f, cplx(k), x, rplan);
  CheckResult r{cplx(c * lhs.value), rhs.value, c * lhs.error_estimate, rhs.error_estimate, 0.0};
  r.residual = relative_residual(r.lhs, r.rhs, 1e-12);
  return r;
}

CheckResult duality_check(const FieldFunction& f, const PlaneFunction& phi, const Dims& dims,
                          const QuadraturePlan& plan) {
  if (phi.n != dims.n || phi.m != dims.m || phi.k != dims.k || f.n != dims.n || f.m != dims.m)
    throw ShapeMismatch("duality check inputs disagree on dims");
  const int codim = dims.codim();
  const QuadratureSpec inner = serial(plan.matrix_space);
  const auto lhs = integrate_group(
      [&](const Mat& gamma) {
        const Mat xi = gamma.rightCols(codim);
        return integrate_matrix_space(
                   [&](const Mat& x) {
                     const double fx = f.evaluate(x);
                     if (fx == 0.0) return 0.0;
                     const Mat t = xi.transpose() * x;
                     return fx * phi.evaluate(xi, t);
                   },
                   dims.n, dims.m, inner)
            .value;
      },
      GroupDomain::so(dims.n), plan.group);

  QuadratureSpec gspec = plan.group;
  gspec.seed = derive_seed(plan.group.seed, 0x4455414CULL);
  const StiefelFrame xi0 = canonical_xi0(dims.n, dims.k);
  const auto rhs = integrate_group(
      [&](const Mat& xi) {
        const auto frame = StiefelFrame::assume_orthonormal(xi);
        const Rotation g = complete_to_rotation(frame, xi0);
        return integrate_matrix_space(
                   [&](const Mat& t) {
                     const double p = phi.evaluate(xi, t);
                     if (p == 0.0) return 0.0;
                     return p * radon(f, g, t, inner).value;
                   },
                   codim, dims.m, inner)
            .value;
      },
      GroupDomain::stiefel(dims.n, codim), gspec);
  const double sigma = stiefel_volume(dims.n, codim);
  CheckResult r{cplx(lhs.value), cplx(rhs.value / sigma), lhs.error_estimate,
                rhs.error_estimate / sigma, 0.0};
  r.residual = std::abs(r.lhs - r.rhs) <= 1e-300 ? 0.0 : relative_residual(r.lhs, r.rhs, 1e-12);
  return r;
}

// ---- inversion ----

IntegralResult invert_fourier(const PlaneFunction& fhat, const Mat& x, const QuadraturePlan& plan,
                              InversionMode mode) {
  const Dims dims = Dims::make(fhat.n, fhat.m, fhat.k);
  if (!dims.injective()) throw InjectivityViolated("Fourier inversion needs n - k >= m");
  if (x.rows() != dims.n || x.cols() != dims.m) throw ShapeMismatch("point does not match dims");
  if (mode == InversionMode::semi_analytic && !fhat.fourier_t)
    throw BadSpec("semi-analytic inversion needs a closed-form t-Fourier transform");
  const int n = dims.n;
  const int m = dims.m;
  const StiefelFrame xi0 = canonical_xi0(n, dims.k);
  const StiefelFrame v0 = canonical_v0(n, m);
  const Mat u0 = canonical_u0(n, dims.k, m).matrix();
  if ((xi0.matrix().transpose() * v0.matrix() - u0).cwiseAbs().maxCoeff() != 0.0)
    throw Error("canonical frames violate xi_0' v_0 = u_0");

  const QuadratureSpec cone = serial(plan.cone);
  const QuadratureSpec inner = serial(plan.matrix_space);
  const auto r = integrate_group_complex(
      [&](const Mat& v) {
        const Rotation gv = complete_to_rotation(StiefelFrame::assume_orthonormal(v), v0);
        const Mat xi = gv.matrix() * xi0.matrix();
        return integrate_spd_cone_complex(
                   [&](const Mat& rr) {
                     const Mat s = spd_sqrt(rr);
                     const Mat b = u0 * s;
                     const cplx h = mode == InversionMode::semi_analytic
                                        ? fhat.fourier_t(xi, b)
                                        : plane_fourier_t(fhat, xi, b, inner).value;
                     const double phase = -(x.transpose() * v * s).trace();
                     return h * std::polar(1.0, phase);
                   },
                   m, 0.5 * (n - m - 1), cone)
            .value;
      },
      GroupDomain::stiefel(n, m), plan.group);
  const double norm = std::pow(2.0, -m) * std::pow(2.0 * kPi, -n * m);
  return {norm * r.value.real(), norm * r.error_estimate, r.samples_used};
}

}  // namespace matplane
