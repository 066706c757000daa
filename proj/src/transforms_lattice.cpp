// Lattice-based operations: slice reconstruction, the non-injectivity
// witness, the Cayley-Laplace operator and the Phi'-pairing check.

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "matplane/specialfn.hpp"
#include "matplane/transforms.hpp"

namespace matplane {

namespace {

// Fixed full-rank direction used to bridge rank-deficient frequencies.
Mat generic_direction(int n, int m) {
  Mat d(n, m);
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < m; ++i) d(a, i) = std::sin(1.0 + 2.3 * a + 0.71 * i * (i + 1) + 0.37 * a * i);
  return d / d.norm();
}

bool full_rank(const Mat& y) {
  Eigen::JacobiSVD<Mat> svd(y);
  const auto& s = svd.singularValues();
  const double smax = s(0);
  return smax > 0.0 && s(s.size() - 1) > 1e-8 * std::max(1.0, smax);
}

void for_each_slab(const LatticeGeometry& g, Execution exec, const std::stop_token& stop,
                   const std::function<void(std::size_t)>& body) {
  const std::size_t slabs = static_cast<std::size_t>(g.extents()[0]);
  const std::size_t per = g.size() / slabs;
  for (std::size_t s = 0; s < slabs; ++s) {
    if (stop.stop_requested()) throw Cancelled("reconstruction cancelled");
    parallel_for(per, [&](std::size_t i) { body(s * per + i); }, exec);
  }
}

// ---- stencils ----

struct Stencil {
  int reach;
  std::vector<double> coeffs;  // offsets -reach..reach
};

Stencil first_derivative(int order) {
  switch (order) {
    case 2:
      return {1, {-0.5, 0.0, 0.5}};
    case 4:
      return {2, {1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12}};
    case 6:
      return {3, {-1.0 / 60, 3.0 / 20, -3.0 / 4, 0.0, 3.0 / 4, -3.0 / 20, 1.0 / 60}};
  }
  throw BadSpec("stencil order must be 2, 4 or 6");
}

Stencil second_derivative(int order) {
  switch (order) {
    case 2:
      return {1, {1.0, -2.0, 1.0}};
    case 4:
      return {2, {-1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12}};
    case 6:
      return {3, {1.0 / 90, -3.0 / 20, 3.0 / 2, -49.0 / 18, 3.0 / 2, -3.0 / 20, 1.0 / 90}};
  }
  throw BadSpec("stencil order must be 2, 4 or 6");
}

// dst (+)= scale * stencil(src) along one axis.
void apply_stencil(const LatticeGeometry& g, const std::vector<double>& src, std::vector<double>& dst,
                   int axis, const Stencil& st, double scale, Boundary boundary, bool accumulate,
                   Execution exec) {
  const int len = g.extents()[axis];
  const auto stride = static_cast<std::ptrdiff_t>(g.stride(axis));
  parallel_for(
      g.size(),
      [&](std::size_t i) {
        const int j = g.index_on_axis(i, axis);
        double acc = 0.0;
        for (int o = -st.reach; o <= st.reach; ++o) {
          const double c = st.coeffs[o + st.reach];
          if (c == 0.0) continue;
          int jj = j + o;
          if (jj < 0 || jj >= len) {
            if (boundary == Boundary::zero) continue;
            jj = (jj + len) % len;
          }
          acc += c * src[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) +
                                                  (jj - j) * stride)];
        }
        if (accumulate)
          dst[i] += scale * acc;
        else
          dst[i] = scale * acc;
      },
      exec);
}

// (d'd)_{ij} f = sum_a d^2 f / dx_{a,i} dx_{a,j}.
std::vector<double> apply_block(const LatticeGeometry& g, const std::vector<double>& f, int i,
                                int j, int order, Boundary boundary, Execution exec) {
  const int m = g.m();
  std::vector<double> out(g.size(), 0.0);
  if (i == j) {
    const Stencil s2 = second_derivative(order);
    for (int a = 0; a < g.n(); ++a) {
      const int ax = a * m + i;
      const double h = g.spacing()[ax];
      apply_stencil(g, f, out, ax, s2, 1.0 / (h * h), boundary, true, exec);
    }
    return out;
  }
  const Stencil s1 = first_derivative(order);
  std::vector<double> tmp(g.size());
  for (int a = 0; a < g.n(); ++a) {
    const int axj = a * m + j;
    const int axi = a * m + i;
    apply_stencil(g, f, tmp, axj, s1, 1.0 / g.spacing()[axj], boundary, false, exec);
    apply_stencil(g, tmp, out, axi, s1, 1.0 / g.spacing()[axi], boundary, true, exec);
  }
  return out;
}

int permutation_sign(const std::vector<int>& p) {
  int s = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) s = -s;
  return s;
}

}  // namespace

// ---- reconstruction ----

ReconstructionResult reconstruct_via_slices(const PlaneFunction& fhat, const LatticeGeometry& space,
                                            const QuadraturePlan& plan, InversionMode mode,
                                            Execution exec, std::stop_token stop) {
  const Dims dims = Dims::make(fhat.n, fhat.m, fhat.k);
  if (!dims.injective()) throw InjectivityViolated("slice reconstruction needs n - k >= m");
  if (space.n() != dims.n || space.m() != dims.m) throw ShapeMismatch("lattice does not match dims");
  if (mode == InversionMode::semi_analytic && !fhat.fourier_t)
    throw BadSpec("semi-analytic reconstruction needs a closed-form t-Fourier transform");
  const LatticeGeometry freq = space.dual();
  const QuadratureSpec inner = [&] {
    QuadratureSpec s = plan.matrix_space;
    s.exec = Execution::serial;
    return s;
  }();
  const auto transform_at = [&](const Mat& y) {
    const SliceFactors f = slice_decompose(y, dims);
    if (mode == InversionMode::semi_analytic) return fhat.fourier_t(f.xi.matrix(), f.b);
    return plane_fourier_t(fhat, f.xi.matrix(), f.b, inner).value;
  };
  const Mat dir = generic_direction(dims.n, dims.m);
  const double delta =
      0.25 * *std::min_element(freq.spacing().begin(), freq.spacing().end());

  std::vector<cplx> data(freq.size());
  std::vector<std::uint8_t> filled(freq.size(), 0);
  for_each_slab(freq, exec, stop, [&](std::size_t i) {
    Mat y;
    freq.point_into(i, y);
    if (full_rank(y)) {
      data[i] = transform_at(y);
      return;
    }
    filled[i] = 1;
    data[i] = 0.5 * (transform_at(y + delta * dir) + transform_at(y - delta * dir));
  });
  ReconstructionResult out;
  out.rank_deficient_filled = std::accumulate(filled.begin(), filled.end(), std::size_t{0});
  out.field = lattice_inverse_fourier_real(space, std::move(data));
  return out;
}

// ---- non-injectivity witness ----

double smooth_cutoff(double s, double eps) {
  if (s <= eps) return 0.0;
  if (s >= 2.0 * eps) return 1.0;
  const double t = (s - eps) / eps;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

WitnessResult noninjectivity_witness(const Dims& dims, double epsilon, int extent,
                                     double freq_spacing, Execution exec) {
  if (dims.injective()) throw WrongRegime("the witness needs n - k < m");
  if (!(epsilon > 0.0)) throw BadSpec("epsilon must be positive");
  const int n = dims.n;
  const int m = dims.m;
  const int codim = dims.codim();
  const LatticeGeometry freq = LatticeGeometry::uniform(n, m, extent, freq_spacing);
  const LatticeGeometry space = freq.dual();
  const double h = space.spacing()[0];

  std::vector<cplx> cut(freq.size());
  std::vector<cplx> ref(freq.size());
  parallel_for(
      freq.size(),
      [&](std::size_t i) {
        Mat y;
        freq.point_into(i, y);
        const double g = std::exp(-y.squaredNorm());
        ref[i] = g;
        cut[i] = g * smooth_cutoff(det_root(y), epsilon);
      },
      exec);
  RealField psi = lattice_inverse_fourier_real(space, std::move(cut));
  RealField psi_ref = lattice_inverse_fourier_real(space, std::move(ref));

  std::vector<int> centre(space.axes(), extent / 2);
  const double peak = psi_ref.data[space.flatten(centre.data())];
  for (auto& v : psi.data) v /= peak;
  for (auto& v : psi_ref.data) v /= peak;

  // Integer plane frames P (n x codim) with unimodular completions.
  std::vector<Mat> frames;
  std::vector<double> weights;
  if (codim == 1) {
    std::vector<int> c(n, -2);
    const auto total = static_cast<int>(std::pow(5, n));
    for (int code = 0; code < total; ++code) {
      int rem = code;
      int g = 0;
      int first = 0;
      for (int a = 0; a < n; ++a) {
        c[a] = rem % 5 - 2;
        rem /= 5;
        g = std::gcd(g, std::abs(c[a]));
        if (first == 0 && c[a] != 0) first = c[a];
      }
      if (g != 1 || first < 0) continue;
      Mat p(n, 1);
      for (int a = 0; a < n; ++a) p(a, 0) = c[a];
      frames.push_back(p);
      weights.push_back(std::pow(h, dims.k * m) * std::pow(p.norm(), m));
    }
  } else {
    std::vector<int> sel(n, 0);
    std::fill(sel.end() - codim, sel.end(), 1);
    do {
      Mat p = Mat::Zero(n, codim);
      int col = 0;
      for (int a = 0; a < n; ++a)
        if (sel[a]) p(a, col++) = 1.0;
      frames.push_back(p);
      weights.push_back(std::pow(h, dims.k * m));
    } while (std::next_permutation(sel.begin(), sel.end()));
  }

  const std::size_t bins = static_cast<std::size_t>(std::pow(extent, codim * m));
  std::vector<double> sup_cut(frames.size(), 0.0);
  std::vector<double> sup_ref(frames.size(), 0.0);
  parallel_for(
      frames.size(),
      [&](std::size_t fidx) {
        const Mat& p = frames[fidx];
        std::vector<double> acc(bins, 0.0);
        std::vector<double> acc_ref(bins, 0.0);
        std::vector<int> idx(space.axes());
        for (std::size_t i = 0; i < space.size(); ++i) {
          space.unflatten(i, idx.data());
          std::size_t bin = 0;
          for (int r = 0; r < codim; ++r)
            for (int col = 0; col < m; ++col) {
              long s = 0;
              for (int a = 0; a < n; ++a)
                s += std::lround(p(a, r)) * (idx[a * m + col] - extent / 2);
              s = ((s % extent) + extent) % extent;
              bin = bin * static_cast<std::size_t>(extent) + static_cast<std::size_t>(s);
            }
          acc[bin] += psi.data[i];
          acc_ref[bin] += psi_ref.data[i];
        }
        double sc = 0.0;
        double sr = 0.0;
        for (std::size_t b = 0; b < bins; ++b) {
          sc = std::max(sc, std::abs(acc[b]));
          sr = std::max(sr, std::abs(acc_ref[b]));
        }
        sup_cut[fidx] = sc * weights[fidx];
        sup_ref[fidx] = sr * weights[fidx];
      },
      exec);

  WitnessResult w;
  w.directions = static_cast<int>(frames.size());
  w.sup_radon = *std::max_element(sup_cut.begin(), sup_cut.end());
  w.sup_radon_reference = *std::max_element(sup_ref.begin(), sup_ref.end());
  for (double v : psi.data) w.sup_psi = std::max(w.sup_psi, std::abs(v));
  w.psi = std::move(psi);
  return w;
}

// ---- Cayley-Laplace ----

double cayley_laplace_symbol(const Mat& y) {
  const double d = (y.transpose() * y).determinant();
  return (y.cols() % 2 ? -1.0 : 1.0) * d;
}

LaplaceResult cayley_laplace_apply(const RealField& field, const LaplaceOptions& opts,
                                   Execution exec) {
  const LatticeGeometry& g = field.geometry;
  if (field.data.size() != g.size()) throw ShapeMismatch("field size does not match geometry");
  const int m = g.m();
  LaplaceResult res;
  res.contaminated.assign(g.size(), 0);

  if (opts.mode == LaplaceMode::fourier_multiplier) {
    std::vector<cplx> data(field.data.begin(), field.data.end());
    lattice_fourier_inplace(g, data);
    const LatticeGeometry freq = g.dual();
    parallel_for(
        g.size(),
        [&](std::size_t i) {
          Mat y;
          freq.point_into(i, y);
          data[i] *= cayley_laplace_symbol(y);
        },
        exec);
    res.field = lattice_inverse_fourier_real(g, std::move(data));
    return res;
  }

  const int reach = first_derivative(opts.stencil_order).reach * (m == 1 ? 1 : 2);
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<double> total(g.size(), 0.0);
  do {
    std::vector<double> cur = field.data;
    for (int i = m - 1; i >= 0; --i)
      cur = apply_block(g, cur, i, perm[i], opts.stencil_order, opts.boundary, exec);
    const double sign = permutation_sign(perm);
    for (std::size_t p = 0; p < total.size(); ++p) total[p] += sign * cur[p];
  } while (std::next_permutation(perm.begin(), perm.end()));

  parallel_for(
      g.size(), [&](std::size_t i) { res.contaminated[i] = g.near_boundary(i, reach) ? 1 : 0; },
      exec);
  res.field = RealField(g, std::move(total));
  return res;
}

double cayley_laplace_multiplier_residual(const LatticeGeometry& freq, double alpha) {
  double worst = 0.0;
  for (std::size_t i = 0; i < freq.size(); ++i) {
    const Mat y = freq.point(i);
    const double d = (y.transpose() * y).determinant();
    if (!(d > 0.0) || !full_rank(y)) continue;
    const double parity = y.cols() % 2 ? -1.0 : 1.0;
    const double lhs = parity * cayley_laplace_symbol(y) * std::pow(d, -0.5 * alpha);
    const double rhs = std::pow(d, -0.5 * (alpha - 2.0));
    worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
  }
  return worst;
}

// ---- Phi'-pairing ----

ComplexField pairing_test_fourier(const LatticeGeometry& freq, const PairingOptions& opts) {
  ComplexField out(freq);
  parallel_for(freq.size(), [&](std::size_t i) {
    Mat y;
    freq.point_into(i, y);
    out.data[i] = std::exp(-y.squaredNorm() / opts.envelope) * smooth_cutoff(det_root(y), opts.epsilon);
  });
  return out;
}

RealField dual_radon_lattice(const std::function<double(std::size_t, const Mat&)>& term,
                             std::size_t count, const LatticeGeometry& space, Execution exec) {
  RealField out(space);
  parallel_for(
      space.size(),
      [&](std::size_t i) {
        Mat x;
        space.point_into(i, x);
        double s = 0.0;
        for (std::size_t r = 0; r < count; ++r) s += term(r, x);
        out.data[i] = s / static_cast<double>(count);
      },
      exec);
  return out;
}

RealField dual_radon_lattice(const PlaneFunction& phi, const LatticeGeometry& space,
                             const std::vector<Mat>& rotations, Execution exec) {
  const int codim = phi.n - phi.k;
  std::vector<Mat> frames;
  for (const Mat& g : rotations) frames.push_back(g.rightCols(codim));
  return dual_radon_lattice(
      [&](std::size_t r, const Mat& x) {
        const Mat t = frames[r].transpose() * x;
        return phi.evaluate(frames[r], t);
      },
      frames.size(), space, exec);
}

PairingResult phi_pairing_check(const FieldFunction& f, int k, const ComplexField& phi_fourier,
                                const LatticeGeometry& space, const PairingOptions& opts,
                                Execution exec) {
  const Dims dims = Dims::make(f.n, f.m, k);
  if (!dims.injective()) throw InjectivityViolated("the pairing inversion needs n - k >= m");
  if (space.n() != f.n || space.m() != f.m) throw ShapeMismatch("lattice does not match field");
  if (!(phi_fourier.geometry == space.dual())) throw ShapeMismatch("test data is not on the dual lattice");
  if (opts.radon_spec.scheme != Scheme::gauss_hermite_tensor || opts.rotations < 1)
    throw BadSpec("pairing needs a Gauss-Hermite radon rule and at least one rotation");

  const LatticeGeometry& freq = phi_fourier.geometry;
  std::vector<cplx> lifted(freq.size());
  parallel_for(
      freq.size(),
      [&](std::size_t i) {
        Mat y;
        freq.point_into(i, y);
        lifted[i] = phi_fourier.data[i] * std::pow(det_root(y), k);
      },
      exec);
  const RealField phi = lattice_inverse_fourier_real(space, phi_fourier.data);
  const RealField iphi = lattice_inverse_fourier_real(space, std::move(lifted));

  // Radon data by the tensor Gauss-Hermite rule over u in M_{k,m}.
  const int order = static_cast<int>(opts.radon_spec.order_or_samples);
  const double scale = opts.radon_spec.scale;
  const Rule1d& rule = gauss_hermite_rule(order);
  const int du = k * dims.m;
  const auto nodes = static_cast<std::size_t>(std::llround(std::pow(order, du)));
  // The cap bounds the quadrature behind one backprojected value; the lattice
  // size is fixed by the caller.
  check_budget(static_cast<double>(opts.rotations) * static_cast<double>(nodes),
               "pairing dual transform");
  std::vector<Mat> us;
  std::vector<double> ws;
  for (std::size_t idx = 0; idx < nodes; ++idx) {
    Mat u(k, dims.m);
    double w = std::pow(scale, du);
    std::size_t r = idx;
    for (int e = 0; e < du; ++e) {
      const auto j = r % static_cast<std::size_t>(order);
      r /= static_cast<std::size_t>(order);
      u(e % k, e / k) = scale * rule.nodes[j];
      w *= rule.weights[j];
    }
    us.push_back(u);
    ws.push_back(w);
  }

  const auto count = static_cast<std::size_t>(opts.rotations);
  std::vector<Mat> projectors;
  std::vector<std::vector<Mat>> offsets(count);
  for (std::size_t r = 0; r < count; ++r) {
    const Mat g = haar_rotation(dims.n, split_seed(opts.seed, r)).matrix();
    const Mat xi = g.rightCols(dims.codim());
    projectors.push_back(xi * xi.transpose());
    for (const Mat& u : us) offsets[r].push_back(g.leftCols(k) * u);
  }
  // g[u; xi'x] = g_left u + xi xi' x.
  const RealField gcheck = dual_radon_lattice(
      [&](std::size_t r, const Mat& x) {
        const Mat p = projectors[r] * x;
        double s = 0.0;
        for (std::size_t j = 0; j < nodes; ++j) s += ws[j] * f.evaluate(p + offsets[r][j]);
        return s;
      },
      count, space, exec);

  const double vol = space.cell_volume();
  double a = 0.0;
  double b = 0.0;
  for (std::size_t i = 0; i < space.size(); ++i) {
    Mat x;
    space.point_into(i, x);
    a += f.evaluate(x) * phi.data[i];
    b += gcheck.data[i] * iphi.data[i];
  }
  PairingResult res;
  res.a = a * vol;
  res.b = fuglede_const(dims.n, dims.m, k) * b * vol;
  res.residual = std::abs(res.a - res.b) / std::max(std::abs(res.a), 1e-300);
  if (res.a == 0.0 && res.b == 0.0) res.residual = 0.0;
  return res;
}

}  // namespace matplane
