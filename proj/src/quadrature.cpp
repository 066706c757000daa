#include "matplane/quadrature.hpp"

#include <cmath>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>

#include "matplane/specialfn.hpp"

namespace matplane {

namespace {

constexpr double kPi = std::numbers::pi;

Rule1d golub_welsch(int order, const std::function<double(int)>& offdiag, double mass) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(order, order);
  for (int i = 1; i < order; ++i) j(i, i - 1) = j(i - 1, i) = offdiag(i);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  Rule1d r;
  r.nodes.resize(order);
  r.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    r.nodes[i] = es.eigenvalues()(i);
    const double v = es.eigenvectors()(0, i);
    r.weights[i] = mass * v * v;
  }
  return r;
}

template <class Build>
const Rule1d& cached_rule(std::map<int, std::unique_ptr<Rule1d>>& cache, std::mutex& mu, int order,
                          Build&& build) {
  if (order < 1) throw BadSpec("rule order must be >= 1");
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<Rule1d>(build(order));
  return *slot;
}

int half_order(std::int64_t order) { return static_cast<int>((order + 1) / 2); }

double ipow(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

// ---- Gauss-Hermite tensor ----

template <class T, class F>
T hermite_tensor(const F& f, int p, int q, int order, double scale, Execution exec) {
  const Rule1d& rule = gauss_hermite_rule(order);
  const int d = p * q;
  const std::size_t total = static_cast<std::size_t>(std::llround(std::pow(order, d)));
  const T sum = chunked_index_sum<T>(
      total,
      [&](std::size_t idx) {
        Mat x(p, q);
        double w = 1.0;
        for (int e = 0; e < d; ++e) {
          const int i = static_cast<int>(idx % order);
          idx /= order;
          x(e % p, e / p) = scale * rule.nodes[i];
          w *= rule.weights[i];
        }
        return T(w * f(x));
      },
      exec);
  return sum * ipow(scale, d);
}

// ---- hyperspherical product rule on the Frobenius ball ----

struct SphereRule {
  int dim = 0;
  std::vector<double> dirs;  // dim entries per direction
  std::vector<double> weights;
  std::size_t size() const { return weights.size(); }
};

SphereRule sphere_rule(int d, int order) {
  SphereRule s;
  s.dim = d;
  if (d == 1) {
    s.dirs = {1.0, -1.0};
    s.weights = {1.0, 1.0};
    return s;
  }
  const int naz = 2 * order;
  const Rule1d polar = gauss_legendre_on(order, 0.0, kPi);
  const int npolar = d - 2;
  std::size_t count = naz;
  for (int i = 0; i < npolar; ++i) count *= order;
  s.dirs.resize(count * d);
  s.weights.resize(count);
  std::vector<double> dir(d);
  for (std::size_t c = 0; c < count; ++c) {
    std::size_t idx = c;
    double w = 2.0 * kPi / naz;
    double sprod = 1.0;
    for (int j = 0; j < npolar; ++j) {
      const int i = static_cast<int>(idx % order);
      idx /= order;
      const double th = polar.nodes[i];
      w *= polar.weights[i] * ipow(std::sin(th), d - 2 - j);
      dir[j] = sprod * std::cos(th);
      sprod *= std::sin(th);
    }
    const double phi = 2.0 * kPi * static_cast<double>(idx) / naz;
    dir[d - 2] = sprod * std::cos(phi);
    dir[d - 1] = sprod * std::sin(phi);
    std::copy(dir.begin(), dir.end(), s.dirs.begin() + static_cast<std::ptrdiff_t>(c * d));
    s.weights[c] = w;
  }
  return s;
}

template <class T, class F>
T ball_rule(const F& f, int p, int q, int order, double radius, Execution exec) {
  const int d = p * q;
  const Rule1d radial = radial_panels(order, radius);
  const SphereRule sphere = sphere_rule(d, order);
  const std::size_t nr = radial.nodes.size();
  const std::size_t total = nr * sphere.size();
  return chunked_index_sum<T>(
      total,
      [&](std::size_t idx) {
        const std::size_t ir = idx % nr;
        const std::size_t is = idx / nr;
        const double r = radial.nodes[ir];
        Mat x(p, q);
        const double* dir = &sphere.dirs[is * d];
        for (int e = 0; e < d; ++e) x(e % p, e / p) = r * dir[e];
        const double w = radial.weights[ir] * ipow(r, d - 1) * sphere.weights[is];
        return T(w * f(x));
      },
      exec);
}

double ball_rule_size(int d, std::int64_t order, double radius) {
  const double nr = static_cast<double>(radial_panels(static_cast<int>(order), radius).nodes.size());
  if (d == 1) return 2.0 * nr;
  return nr * 2.0 * order * std::pow(static_cast<double>(order), d - 2);
}

// ---- generic dispatch ----

template <class T, class F>
IntegralResultT<T> matrix_space_impl(const F& f, int p, int q, const QuadratureSpec& spec) {
  spec.validate();
  if (p < 1 || q < 1) throw ShapeMismatch("matrix space needs p, q >= 1");
  const int d = p * q;
  IntegralResultT<T> res;
  switch (spec.scheme) {
    case Scheme::gauss_hermite_tensor: {
      const int n1 = static_cast<int>(spec.order_or_samples);
      const int n2 = half_order(n1);
      const double evals = std::pow(n1, d) + std::pow(n2, d);
      check_budget(evals, "Gauss-Hermite tensor rule");
      res.value = hermite_tensor<T>(f, p, q, n1, spec.scale, spec.exec);
      const T coarse = hermite_tensor<T>(f, p, q, n2, spec.scale, spec.exec);
      res.error_estimate = std::abs(res.value - coarse);
      res.samples_used = static_cast<std::int64_t>(evals);
      break;
    }
    case Scheme::truncated_grid: {
      const int n1 = static_cast<int>(spec.order_or_samples);
      const int n2 = half_order(n1);
      const double evals = ball_rule_size(d, n1, spec.truncation_radius) +
                           ball_rule_size(d, n2, spec.truncation_radius);
      check_budget(evals, "truncated grid");
      res.value = ball_rule<T>(f, p, q, n1, spec.truncation_radius, spec.exec);
      const T coarse = ball_rule<T>(f, p, q, n2, spec.truncation_radius, spec.exec);
      res.error_estimate = std::abs(res.value - coarse);
      res.samples_used = static_cast<std::int64_t>(evals);
      break;
    }
    case Scheme::monte_carlo: {
      const auto n = static_cast<std::size_t>(spec.order_or_samples);
      check_budget(static_cast<double>(n), "Monte Carlo");
      const double s = spec.scale;
      const double log_norm = -0.5 * d * std::log(kPi * s * s);
      const double sd = s / std::sqrt(2.0);
      const auto stats = chunked_sample_sum<T>(
          n, spec.seed,
          [&](Rng& rng) {
            std::normal_distribution<double> normal(0.0, sd);
            Mat x(p, q);
            for (int e = 0; e < d; ++e) x(e % p, e / p) = normal(rng);
            const double log_q = log_norm - x.squaredNorm() / (s * s);
            return T(f(x) * std::exp(-log_q));
          },
          spec.exec);
      res.value = stats.mean();
      res.error_estimate = stats.standard_error();
      res.samples_used = static_cast<std::int64_t>(n);
      break;
    }
  }
  return res;
}

template <class T, class F>
IntegralResultT<T> group_impl(const F& f, const GroupDomain& dom, const QuadratureSpec& spec) {
  spec.validate();
  if (spec.scheme != Scheme::monte_carlo)
    throw BadSpec("group integrals support only the monte_carlo scheme");
  if (dom.n < 1 || dom.p < 1 || dom.p > dom.n) throw ShapeMismatch("invalid group domain");
  const auto n = static_cast<std::size_t>(spec.order_or_samples);
  check_budget(static_cast<double>(n), "group Monte Carlo");
  const auto stats = chunked_sample_sum<T>(
      n, spec.seed,
      [&](Rng& rng) {
        if (dom.kind == GroupDomain::Kind::special_orthogonal)
          return T(f(haar_rotation(dom.n, rng).matrix()));
        return T(f(haar_stiefel(dom.n, dom.p, rng).matrix()));
      },
      spec.exec);
  const double mass = dom.total_mass();
  IntegralResultT<T> res;
  res.value = stats.mean() * mass;
  res.error_estimate = stats.standard_error() * mass;
  res.samples_used = static_cast<std::int64_t>(n);
  return res;
}

// Cone rule on the Cholesky factor; coordinates: diagonal first, then the
// strict upper triangle in column order.
template <class T, class F>
T cone_grid(const F& f, int m, double w_exp, int order, double radius, Execution exec) {
  const Rule1d diag = gauss_legendre_on(order, 0.0, radius);
  const Rule1d off = gauss_legendre_on(order, -radius, radius);
  const int nvar = m * (m + 1) / 2;
  const std::size_t total = static_cast<std::size_t>(std::llround(std::pow(order, nvar)));
  return chunked_index_sum<T>(
      total,
      [&](std::size_t idx) {
        Mat u = Mat::Zero(m, m);
        double w = std::pow(2.0, m);
        for (int i = 0; i < m; ++i) {
          const int a = static_cast<int>(idx % order);
          idx /= order;
          const double uii = diag.nodes[a];
          u(i, i) = uii;
          w *= diag.weights[a] * std::pow(uii, m - i + 2.0 * w_exp);
        }
        for (int j = 1; j < m; ++j)
          for (int i = 0; i < j; ++i) {
            const int a = static_cast<int>(idx % order);
            idx /= order;
            u(i, j) = off.nodes[a];
            w *= off.weights[a];
          }
        const Mat r = u.transpose() * u;
        return T(w * f(r));
      },
      exec);
}

template <class T, class F>
IntegralResultT<T> cone_impl(const F& f, int m, double w_exp, const QuadratureSpec& spec) {
  spec.validate();
  if (m < 1 || m > kMaxDim) throw ShapeMismatch("cone rank out of range");
  const int nvar = m * (m + 1) / 2;
  IntegralResultT<T> res;
  switch (spec.scheme) {
    case Scheme::gauss_hermite_tensor:
      throw BadSpec("cone integrals do not support gauss_hermite_tensor");
    case Scheme::truncated_grid: {
      const int n1 = static_cast<int>(spec.order_or_samples);
      const int n2 = half_order(n1);
      const double evals = std::pow(n1, nvar) + std::pow(n2, nvar);
      check_budget(evals, "cone grid");
      res.value = cone_grid<T>(f, m, w_exp, n1, spec.truncation_radius, spec.exec);
      const T coarse = cone_grid<T>(f, m, w_exp, n2, spec.truncation_radius, spec.exec);
      res.error_estimate = std::abs(res.value - coarse);
      res.samples_used = static_cast<std::int64_t>(evals);
      break;
    }
    case Scheme::monte_carlo: {
      const auto n = static_cast<std::size_t>(spec.order_or_samples);
      check_budget(static_cast<double>(n), "cone Monte Carlo");
      const double s = spec.scale;
      const double log_dens1 = -0.5 * std::log(2.0 * kPi * s * s);
      const auto stats = chunked_sample_sum<T>(
          n, spec.seed,
          [&](Rng& rng) {
            std::normal_distribution<double> normal(0.0, s);
            Mat u = Mat::Zero(m, m);
            double jac = std::pow(2.0, m);
            double log_q = 0.0;
            for (int i = 0; i < m; ++i) {
              const double uii = std::abs(normal(rng));
              u(i, i) = uii;
              jac *= std::pow(uii, m - i + 2.0 * w_exp);
              log_q += std::log(2.0) + log_dens1 - uii * uii / (2 * s * s);
            }
            for (int j = 1; j < m; ++j)
              for (int i = 0; i < j; ++i) {
                const double v = normal(rng);
                u(i, j) = v;
                log_q += log_dens1 - v * v / (2 * s * s);
              }
            const Mat r = u.transpose() * u;
            return T(jac * f(r) * std::exp(-log_q));
          },
          spec.exec);
      res.value = stats.mean();
      res.error_estimate = stats.standard_error();
      res.samples_used = static_cast<std::int64_t>(n);
      break;
    }
  }
  return res;
}

}  // namespace

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::gauss_hermite_tensor:
      return "gauss_hermite_tensor";
    case Scheme::truncated_grid:
      return "truncated_grid";
    case Scheme::monte_carlo:
      return "monte_carlo";
  }
  return "unknown";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "gauss_hermite_tensor") return Scheme::gauss_hermite_tensor;
  if (name == "truncated_grid") return Scheme::truncated_grid;
  if (name == "monte_carlo") return Scheme::monte_carlo;
  throw BadSpec("unknown quadrature scheme '" + name + "'");
}

void QuadratureSpec::validate() const {
  if (order_or_samples < 1) throw BadSpec("order_or_samples must be >= 1");
  if (!(truncation_radius > 0.0)) throw BadSpec("truncation_radius must be > 0");
  if (!(target_rel_tol > 0.0)) throw BadSpec("target_rel_tol must be > 0");
  if (!(scale > 0.0)) throw BadSpec("scale must be > 0");
}

QuadratureSpec QuadratureSpec::with_order(std::int64_t order) const {
  QuadratureSpec s = *this;
  s.order_or_samples = order;
  return s;
}

QuadratureSpec QuadratureSpec::with_seed(std::uint64_t sd) const {
  QuadratureSpec s = *this;
  s.seed = sd;
  return s;
}

std::int64_t budget_cap() {
  if (const char* env = std::getenv("MATPLANE_BUDGET_CAP")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v >= 1.0) return static_cast<std::int64_t>(v);
  }
  return 100'000'000;
}

void check_budget(double evaluations, const char* what) {
  const auto cap = budget_cap();
  if (evaluations > static_cast<double>(cap))
    throw BudgetExceeded(std::string(what) + " needs " + std::to_string(evaluations) +
                         " evaluations, cap is " + std::to_string(cap));
}

const Rule1d& gauss_hermite_rule(int order) {
  static std::map<int, std::unique_ptr<Rule1d>> cache;
  static std::mutex mu;
  return cached_rule(cache, mu, order, [](int n) {
    Rule1d r = golub_welsch(n, [](int i) { return std::sqrt(0.5 * i); }, std::sqrt(kPi));
    for (int i = 0; i < n; ++i) r.weights[i] *= std::exp(r.nodes[i] * r.nodes[i]);
    return r;
  });
}

const Rule1d& gauss_legendre_rule(int order) {
  static std::map<int, std::unique_ptr<Rule1d>> cache;
  static std::mutex mu;
  return cached_rule(cache, mu, order, [](int n) {
    return golub_welsch(
        n, [](int i) { return i / std::sqrt(4.0 * i * i - 1.0); }, 2.0);
  });
}

Rule1d gauss_legendre_on(int order, double a, double b) {
  const Rule1d& g = gauss_legendre_rule(order);
  Rule1d r;
  const double h = 0.5 * (b - a);
  const double c = 0.5 * (b + a);
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    r.nodes.push_back(c + h * g.nodes[i]);
    r.weights.push_back(h * g.weights[i]);
  }
  return r;
}

Rule1d radial_panels(int order, double radius) {
  Rule1d r;
  double a = 0.0;
  double b = 1.0;
  while (a < radius) {
    const double hi = std::min(b, radius);
    Rule1d p = gauss_legendre_on(order, a, hi);
    r.nodes.insert(r.nodes.end(), p.nodes.begin(), p.nodes.end());
    r.weights.insert(r.weights.end(), p.weights.begin(), p.weights.end());
    a = hi;
    b = 2.0 * b;
  }
  return r;
}

IntegralResult integrate_matrix_space(const MatFn& f, int p, int q, const QuadratureSpec& spec) {
  return matrix_space_impl<double>(f, p, q, spec);
}

ComplexIntegralResult integrate_matrix_space_complex(const MatFnC& f, int p, int q,
                                                     const QuadratureSpec& spec) {
  return matrix_space_impl<cplx>(f, p, q, spec);
}

double GroupDomain::total_mass() const {
  return kind == Kind::special_orthogonal ? 1.0 : stiefel_volume(n, p);
}

IntegralResult integrate_group(const MatFn& f, const GroupDomain& domain, const QuadratureSpec& spec) {
  return group_impl<double>(f, domain, spec);
}

ComplexIntegralResult integrate_group_complex(const MatFnC& f, const GroupDomain& domain,
                                              const QuadratureSpec& spec) {
  return group_impl<cplx>(f, domain, spec);
}

IntegralResult integrate_spd_cone(const MatFn& f, int m, double weight_exponent,
                                  const QuadratureSpec& spec) {
  return cone_impl<double>(f, m, weight_exponent, spec);
}

ComplexIntegralResult integrate_spd_cone_complex(const MatFnC& f, int m, double weight_exponent,
                                                 const QuadratureSpec& spec) {
  return cone_impl<cplx>(f, m, weight_exponent, spec);
}

}  // namespace matplane
