#include "matplane/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include "matplane/specialfn.hpp"

namespace matplane {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

const std::vector<std::pair<Experiment, const char*>>& experiment_names() {
  static const std::vector<std::pair<Experiment, const char*>> names = {
      {Experiment::special_tables, "special_tables"},
      {Experiment::mass_check, "mass_check"},
      {Experiment::slice_check, "slice_check"},
      {Experiment::fuglede, "fuglede"},
      {Experiment::riesz_crosscheck, "riesz_crosscheck"},
      {Experiment::invert, "invert"},
      {Experiment::reconstruct, "reconstruct"},
      {Experiment::noninjectivity, "noninjectivity"},
      {Experiment::divergence, "divergence"},
      {Experiment::duality, "duality"},
      {Experiment::phi_pairing, "phi_pairing"},
      {Experiment::cayley_laplace, "cayley_laplace"}};
  return names;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

json spec_to_json(const QuadratureSpec& s) {
  return {{"scheme", to_string(s.scheme)},
          {"order_or_samples", s.order_or_samples},
          {"truncation_radius", s.truncation_radius},
          {"seed", s.seed},
          {"target_rel_tol", s.target_rel_tol},
          {"scale", s.scale}};
}

template <class T>
void read_field(const json& j, const char* key, T& out, const std::string& path) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(path + "." + key, e.what());
  }
}

void spec_from_json(const json& j, QuadratureSpec& s, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  std::string scheme = to_string(s.scheme);
  read_field(j, "scheme", scheme, path);
  try {
    s.scheme = scheme_from_string(scheme);
  } catch (const BadSpec& e) {
    throw ConfigError(path + ".scheme", e.what());
  }
  read_field(j, "order_or_samples", s.order_or_samples, path);
  read_field(j, "truncation_radius", s.truncation_radius, path);
  read_field(j, "seed", s.seed, path);
  read_field(j, "target_rel_tol", s.target_rel_tol, path);
  read_field(j, "scale", s.scale, path);
}

json mat_to_json(const Mat& x) {
  json rows = json::array();
  for (int a = 0; a < x.rows(); ++a) {
    json r = json::array();
    for (int i = 0; i < x.cols(); ++i) r.push_back(x(a, i));
    rows.push_back(r);
  }
  return rows;
}

Mat mat_from_json(const json& j, const std::string& path) {
  try {
    const auto rows = j.get<std::vector<std::vector<double>>>();
    if (rows.empty() || rows.size() > kMaxDim) throw ConfigError(path, "bad matrix size");
    Mat x(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (std::size_t a = 0; a < rows.size(); ++a) {
      if (rows[a].size() != rows[0].size()) throw ConfigError(path, "ragged matrix");
      for (std::size_t i = 0; i < rows[a].size(); ++i) x(static_cast<int>(a), static_cast<int>(i)) = rows[a][i];
    }
    return x;
  } catch (const json::exception& e) {
    throw ConfigError(path, e.what());
  }
}

Mat random_matrix(int n, int m, double sd, Rng& rng) {
  std::normal_distribution<double> normal(0.0, sd);
  Mat x(n, m);
  for (int i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
  return x;
}

void finish(CaseRecord& c, double tol) {
  c.pass = c.error.empty() && c.residual <= tol;
}

// Runs `body` on a fresh case, recording errors and (optionally) wall time.
template <class Body>
void add_case(ExperimentReport& rep, const std::string& label, Body&& body) {
  CaseRecord c;
  c.label = label;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const Error& e) {
    c.error = e.what();
    c.pass = false;
  }
  c.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rep.cases.push_back(std::move(c));
}

double interior_rel_error(const RealField& got, const std::function<double(const Mat&)>& truth) {
  const auto& g = got.geometry;
  double worst = 0.0;
  double peak = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    bool inside = true;
    for (int a = 0; a < g.axes() && inside; ++a) {
      const int j = g.index_on_axis(i, a);
      const int len = g.extents()[a];
      inside = j >= len / 4 && j < len - len / 4;
    }
    if (!inside) continue;
    const double t = truth(g.point(i));
    peak = std::max(peak, std::abs(t));
    worst = std::max(worst, std::abs(got.data[i] - t));
  }
  return peak > 0.0 ? worst / peak : worst;
}

// ---- experiments ----

void run_special(const ExperimentConfig& cfg, ExperimentReport& rep) {
  const int m = cfg.params.special_m;
  rep.tolerance = cfg.params.tolerance.value_or(1e-12);
  const auto& p = cfg.params;
  for (double a = p.alpha_lo; a <= p.alpha_hi + 1e-12; a += p.alpha_step) {
    add_case(rep, "alpha=" + fmt(a), [&](CaseRecord& c) {
      c.inputs = {{"m", m}, {"alpha", a}};
      if (auto j = siegel_pole_factor(m, a)) {
        c.note = "pole at factor " + std::to_string(*j);
        c.pass = true;
        return;
      }
      c.lhs = siegel_gamma(m, a);
      if (m >= 2) {
        c.rhs = std::pow(kPi, (m - 1) / 2.0) * siegel_gamma(1, a) * siegel_gamma(m - 1, a - 0.5);
        c.residual = siegel_gamma_recursion_check(m, 1, a);
      } else {
        c.rhs = gamma_fn(a);
        c.residual = relative_residual(c.lhs, c.rhs);
      }
      finish(c, rep.tolerance);
    });
  }
}

void run_mass(const ExperimentConfig& cfg, ExperimentReport& rep, const FieldFunction& f) {
  rep.tolerance = cfg.params.tolerance.value_or(0.01);
  const auto plan = cfg.seeded_plan();
  Rng rng = make_rng(derive_seed(cfg.seed, 1));
  const double mass = f.closed.mass
                          ? *f.closed.mass
                          : integrate_matrix_space(f.evaluate, f.n, f.m, plan.matrix_space).value;
  for (int i = 0; i < cfg.params.cases.value_or(3); ++i) {
    const StiefelFrame xi = haar_stiefel(cfg.dims.n, cfg.dims.codim(), rng);
    add_case(rep, "frame " + std::to_string(i), [&](CaseRecord& c) {
      c.inputs = {{"xi", mat_to_json(xi.matrix())}};
      const auto r = radon_mass(f, xi, plan.matrix_space);
      c.lhs = r.value;
      c.lhs_error = r.error_estimate;
      c.rhs = mass;
      c.residual = relative_residual(c.lhs, c.rhs);
      finish(c, rep.tolerance);
    });
  }
}

void run_slice(const ExperimentConfig& cfg, ExperimentReport& rep, const FieldFunction& f) {
  rep.tolerance = cfg.params.tolerance.value_or(1e-3);
  const auto plan = cfg.seeded_plan();
  Rng rng = make_rng(derive_seed(cfg.seed, 2));
  for (int i = 0; i < cfg.params.cases.value_or(20); ++i) {
    Mat y = random_matrix(cfg.dims.n, cfg.dims.m, 1.0, rng);
    add_case(rep, "frequency " + std::to_string(i), [&](CaseRecord& c) {
      c.inputs = {{"y", mat_to_json(y)}};
      const auto r = slice_check(f, y, cfg.dims, plan.matrix_space);
      c.lhs = r.lhs;
      c.rhs = r.rhs;
      c.lhs_error = r.lhs_error;
      c.rhs_error = r.rhs_error;
      c.residual = r.residual;
      finish(c, rep.tolerance);
    });
  }
}

std::vector<Mat> fuglede_points(const ExperimentConfig& cfg, int count) {
  Rng rng = make_rng(derive_seed(cfg.seed, 3));
  std::vector<Mat> xs{Mat::Zero(cfg.dims.n, cfg.dims.m)};
  while (static_cast<int>(xs.size()) < count) {
    Mat x = random_matrix(cfg.dims.n, cfg.dims.m, 0.5, rng);
    if (x.norm() > 2.0) x *= 2.0 / x.norm();
    xs.push_back(x);
  }
  return xs;
}

void run_fuglede(const ExperimentConfig& cfg, ExperimentReport& rep, const FieldFunction& f) {
  rep.tolerance = cfg.params.tolerance.value_or(0.02);
  const auto plan = cfg.seeded_plan();
  const auto xs = fuglede_points(cfg, cfg.params.cases.value_or(6));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    add_case(rep, "point " + std::to_string(i), [&](CaseRecord& c) {
      c.inputs = {{"x", mat_to_json(xs[i])}};
      const auto r = fuglede_check(f, xs[i], cfg.dims.k, plan.with_seed(split_seed(cfg.seed, i)));
      c.lhs = r.lhs;
      c.rhs = r.rhs;
      c.lhs_error = r.lhs_error;
      c.rhs_error = r.rhs_error;
      c.residual = r.residual;
      finish(c, rep.tolerance);
    });
  }
}

void run_riesz_cross(const ExperimentConfig& cfg, ExperimentReport& rep, const FieldFunction& f) {
  rep.tolerance = cfg.params.tolerance.value_or(0.02);
  const auto plan = cfg.seeded_plan();
  const auto xs = fuglede_points(cfg, cfg.params.cases.value_or(3));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    add_case(rep, "point " + std::to_string(i), [&](CaseRecord& c) {
      c.inputs = {{"x", mat_to_json(xs[i])}, {"k", cfg.dims.k}};
      const auto base = plan.with_seed(split_seed(cfg.seed, i));
      const auto a = riesz(f, cplx(cfg.dims.k), xs[i], base);
      const auto b = riesz_alt(f, cfg.dims.k, xs[i],
                               base.with_seed(derive_seed(split_seed(cfg.seed, i), 0x414c54ULL)));
      c.lhs = a.value;
      c.rhs = b.value;
      c.lhs_error = a.error_estimate;
      c.rhs_error = b.error_estimate;
      c.residual = relative_residual(c.lhs, c.rhs);
      finish(c, rep.tolerance);
    });
  }
}

void run_invert(const ExperimentConfig& cfg, ExperimentReport& rep, const FieldFunction& f) {
  const double tol_centre = cfg.params.tolerance.value_or(0.02);
  const double tol_off = cfg.params.tolerance.value_or(0.03);
  rep.tolerance = tol_off;
  const auto plan = cfg.seeded_plan();
  const PlaneFunction fhat = PlaneFunction::closed_radon(f, cfg.dims.k);
  std::vector<Mat> xs{Mat::Zero(cfg.dims.n, cfg.dims.m),
                      0.5 * canonical_v0(cfg.dims.n, cfg.dims.m).matrix()};
  Rng rng = make_rng(derive_seed(cfg.seed, 4));
  while (static_cast<int>(xs.size()) < cfg.params.cases.value_or(2))
    xs.push_back(random_matrix(cfg.dims.n, cfg.dims.m, 0.3, rng));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    add_case(rep, "point " + std::to_string(i), [&](CaseRecord& c) {
      c.inputs = {{"x", mat_to_json(xs[i])}, {"mode", "semi_analytic"}};
      const auto r = invert_fourier(fhat, xs[i], plan.with_seed(split_seed(cfg.seed, i)));
      c.lhs = r.value;
      c.lhs_error = r.error_estimate;
      c.rhs = f.evaluate(xs[i]);
      c.residual = relative_residual(c.lhs, c.rhs);
      finish(c, i == 0 ? tol_centre : tol_off);
    });
  }
}

std::vector<int> extents_or(const ExperimentConfig& cfg, std::vector<int> dflt) {
  return cfg.params.extents.empty() ? dflt : cfg.params.extents;
}

void run_reconstruct(const ExperimentConfig& cfg, ExperimentReport& rep, const FieldFunction& f) {
  rep.tolerance = cfg.params.tolerance.value_or(0.05);
  const auto plan = cfg.seeded_plan();
  const PlaneFunction fhat = PlaneFunction::closed_radon(f, cfg.dims.k);
  for (int ext : extents_or(cfg, {8})) {
    const double h = cfg.params.spacing.value_or(std::sqrt(kPi / (2.0 * ext)));
    add_case(rep, "lattice " + std::to_string(ext), [&](CaseRecord& c) {
      c.inputs = {{"extent", ext}, {"spacing", h}};
      const auto space = LatticeGeometry::uniform(cfg.dims.n, cfg.dims.m, ext, h);
      const auto r = reconstruct_via_slices(fhat, space, plan);
      c.residual = interior_rel_error(r.field, f.evaluate);
      c.lhs = c.residual;
      c.note = std::to_string(r.rank_deficient_filled) + " rank-deficient frequencies bridged";
      finish(c, rep.tolerance);
    });
  }
}

void run_noninjectivity(const ExperimentConfig& cfg, ExperimentReport& rep) {
  rep.tolerance = cfg.params.tolerance.value_or(1e-3);
  for (int ext : extents_or(cfg, {32})) {
    add_case(rep, "lattice " + std::to_string(ext), [&](CaseRecord& c) {
      const double dy = cfg.params.spacing.value_or(0.4);
      c.inputs = {{"extent", ext}, {"epsilon", cfg.params.epsilon}, {"freq_spacing", dy}};
      const auto w = noninjectivity_witness(cfg.dims, cfg.params.epsilon, ext, dy);
      c.lhs = w.sup_radon;
      c.rhs = w.sup_psi;
      c.residual = w.sup_psi > 0.0 ? w.sup_radon / w.sup_psi : 0.0;
      c.note = "reference plane sup " + fmt(w.sup_radon_reference) + " over " +
               std::to_string(w.directions) + " directions";
      c.pass = c.residual <= rep.tolerance && w.sup_psi >= 0.1;
    });
  }
}

void run_divergence(const ExperimentConfig& cfg, ExperimentReport& rep) {
  const double p0 = critical_exponent(cfg.dims);
  const double p = cfg.params.p.value_or(p0);
  const auto plan = cfg.seeded_plan();
  QuadratureSpec spec = plan.matrix_space;
  spec.scheme = Scheme::truncated_grid;
  const bool diverging = p >= p0;
  rep.tolerance = cfg.params.tolerance.value_or(diverging ? 10.0 : 0.01);
  add_case(rep, diverging ? "divergent ladder" : "convergent ladder", [&](CaseRecord& c) {
    const auto series =
        diverging ? divergence_demo(cfg.dims, p, spec) : convergence_demo(cfg.dims, p, spec);
    json rows = json::array();
    bool increasing = true;
    for (std::size_t i = 0; i < series.size(); ++i) {
      rows.push_back({series[i].first, series[i].second});
      if (i > 0 && !(series[i].second > series[i - 1].second)) increasing = false;
    }
    c.inputs = {{"p", p}, {"p0", p0}, {"series", rows}};
    c.lhs = series.back().second;
    c.rhs = series.front().second;
    if (diverging) {
      c.residual = series.back().second / series.front().second;
      c.pass = increasing && c.residual >= rep.tolerance;
      c.note = "residual is last/first; target is at least the tolerance";
    } else {
      const double prev = series[series.size() - 2].second;
      c.residual = std::abs(series.back().second - prev) / std::abs(series.back().second);
      c.pass = increasing && c.residual <= rep.tolerance;
    }
  });
}

void run_duality(const ExperimentConfig& cfg, ExperimentReport& rep, const FieldFunction& f) {
  rep.tolerance = cfg.params.tolerance.value_or(0.03);
  const auto plan = cfg.seeded_plan();
  PlaneFunction phi;
  phi.n = cfg.dims.n;
  phi.m = cfg.dims.m;
  phi.k = cfg.dims.k;
  phi.evaluate = [](const Mat&, const Mat& t) { return std::exp(-t.squaredNorm()); };
  add_case(rep, "gaussian plane weight", [&](CaseRecord& c) {
    const auto r = duality_check(f, phi, cfg.dims, plan);
    c.lhs = r.lhs;
    c.rhs = r.rhs;
    c.lhs_error = r.lhs_error;
    c.rhs_error = r.rhs_error;
    c.residual = r.residual;
    finish(c, rep.tolerance);
  });
}

void run_pairing(const ExperimentConfig& cfg, ExperimentReport& rep, const FieldFunction& f) {
  rep.tolerance = cfg.params.tolerance.value_or(0.05);
  PairingOptions opts;
  opts.seed = cfg.seed;
  std::vector<double> residuals;
  for (int ext : extents_or(cfg, {8, 12, 16})) {
    add_case(rep, "lattice " + std::to_string(ext), [&](CaseRecord& c) {
      const double h = cfg.params.spacing.value_or(std::sqrt(2.0 * kPi / ext));
      c.inputs = {{"extent", ext}, {"spacing", h}};
      const auto space = LatticeGeometry::uniform(cfg.dims.n, cfg.dims.m, ext, h);
      const auto data = pairing_test_fourier(space.dual(), opts);
      const auto r = phi_pairing_check(f, cfg.dims.k, data, space, opts);
      c.lhs = r.a;
      c.rhs = r.b;
      c.residual = r.residual;
      residuals.push_back(r.residual);
      c.pass = c.error.empty();
    });
  }
  // Only the finest lattice must meet the tolerance; the sequence must decrease.
  bool decreasing = true;
  for (std::size_t i = 1; i < residuals.size(); ++i)
    if (!(residuals[i] < residuals[i - 1])) decreasing = false;
  if (!rep.cases.empty()) {
    auto& last = rep.cases.back();
    last.pass = last.error.empty() && last.residual <= rep.tolerance && decreasing;
    if (!decreasing) last.note = "residuals do not decrease with resolution";
  }
}

void run_laplace(const ExperimentConfig& cfg, ExperimentReport& rep, const FieldFunction& f) {
  rep.tolerance = cfg.params.tolerance.value_or(0.01);
  const int ext = extents_or(cfg, {16}).front();
  const double h = cfg.params.spacing.value_or(0.3);
  const auto space = LatticeGeometry::uniform(cfg.dims.n, cfg.dims.m, ext, h);
  add_case(rep, "multiplier identity", [&](CaseRecord& c) {
    c.inputs = {{"extent", ext}, {"alpha", cfg.params.alpha}};
    c.residual = cayley_laplace_multiplier_residual(space.dual(), cfg.params.alpha);
    finish(c, 1e-12);
  });
  add_case(rep, "finite difference vs multiplier", [&](CaseRecord& c) {
    c.inputs = {{"extent", ext}, {"spacing", h}, {"stencil_order", 6}};
    const RealField field = sample_field(space, f.evaluate);
    const auto mult = cayley_laplace_apply(field, {LaplaceMode::fourier_multiplier});
    const auto fd = cayley_laplace_apply(field, {LaplaceMode::finite_difference});
    RealField diff = fd.field;
    const auto& mref = mult.field;
    c.residual = interior_rel_error(
        diff, [&](const Mat& x) {
          std::vector<int> idx(space.axes());
          for (int a = 0; a < space.axes(); ++a)
            idx[a] = static_cast<int>(std::lround(x(a / space.m(), a % space.m()) / h)) + ext / 2;
          return mref.data[space.flatten(idx.data())];
        });
    finish(c, rep.tolerance);
  });
}

}  // namespace

// ---- names ----

std::string to_string(Experiment e) {
  for (const auto& [k, v] : experiment_names())
    if (k == e) return v;
  return "unknown";
}

Experiment experiment_from_string(const std::string& name) {
  for (const auto& [k, v] : experiment_names())
    if (name == v) return k;
  throw ConfigError("experiment", "unknown experiment '" + name + "'");
}

const std::vector<Experiment>& all_experiments() {
  static const std::vector<Experiment> all = [] {
    std::vector<Experiment> v;
    for (const auto& kv : experiment_names()) v.push_back(kv.first);
    return v;
  }();
  return all;
}

// ---- config ----

ExperimentConfig ExperimentConfig::defaults(Experiment e) {
  ExperimentConfig c;
  c.experiment = e;
  if (e == Experiment::noninjectivity) {
    c.dims = Dims{2, 2, 1};
    c.phantom.kind = PhantomKind::rank_supported;
    c.phantom.n = 2;
    c.phantom.m = 2;
  }
  if (e == Experiment::divergence) c.phantom.kind = PhantomKind::boundary_lp;
  if (e == Experiment::duality) {
    // Both sides nest a full-dimensional rule inside the group average.
    c.quadrature.group.order_or_samples = 256;
    c.quadrature.matrix_space.order_or_samples = 8;
  }
  if (e == Experiment::special_tables) c.format = OutputFormat::csv;
  return c;
}

QuadraturePlan ExperimentConfig::seeded_plan() const { return quadrature.with_seed(seed); }

QuadratureSpec* ExperimentConfig::budget_spec() {
  switch (experiment) {
    case Experiment::fuglede:
    case Experiment::riesz_crosscheck:
    case Experiment::invert:
    case Experiment::duality:
      return &quadrature.group;
    case Experiment::mass_check:
    case Experiment::slice_check:
    case Experiment::divergence:
      return &quadrature.matrix_space;
    default:
      return nullptr;
  }
}

void ExperimentConfig::validate() const {
  if (dims.n < 1 || dims.n > kMaxDim) throw ConfigError("dims.n", "must lie in [1, 8]");
  if (dims.m < 1 || dims.m > kMaxDim) throw ConfigError("dims.m", "must lie in [1, 8]");
  if (dims.k <= 0 || dims.k >= dims.n) throw ConfigError("dims.k", "must satisfy 0 < k < n");
  const bool injective = dims.n - dims.k >= dims.m;
  switch (experiment) {
    case Experiment::noninjectivity:
      if (injective) throw ConfigError("dims.k", "noninjectivity needs n - k < m");
      break;
    case Experiment::slice_check:
    case Experiment::invert:
    case Experiment::reconstruct:
    case Experiment::phi_pairing:
    case Experiment::fuglede:
      if (!injective) throw ConfigError("dims.k", "this experiment needs n - k >= m");
      break;
    case Experiment::riesz_crosscheck:
      if (dims.m < 2 || dims.k > std::min(dims.m - 1, dims.n - dims.m))
        throw ConfigError("dims.k", "needs m >= 2 and k <= min(m-1, n-m)");
      break;
    default:
      break;
  }
  if (experiment != Experiment::special_tables && experiment != Experiment::noninjectivity &&
      experiment != Experiment::divergence && (phantom.n != dims.n || phantom.m != dims.m))
    throw ConfigError("phantom", "phantom dims must match dims");
  try {
    phantom.validate();
  } catch (const BadSpec& e) {
    throw ConfigError("phantom", e.what());
  }
  const std::pair<const char*, const QuadratureSpec*> specs[] = {
      {"quadrature.matrix_space", &quadrature.matrix_space},
      {"quadrature.group", &quadrature.group},
      {"quadrature.cone", &quadrature.cone},
      {"quadrature.kernel", &quadrature.kernel}};
  for (const auto& [name, s] : specs) {
    try {
      s->validate();
    } catch (const BadSpec& e) {
      throw ConfigError(name, e.what());
    }
  }
  if (quadrature.group.scheme != Scheme::monte_carlo)
    throw ConfigError("quadrature.group.scheme", "group integrals need monte_carlo");
  if (quadrature.cone.scheme == Scheme::gauss_hermite_tensor)
    throw ConfigError("quadrature.cone.scheme", "cone integrals do not support gauss_hermite_tensor");
  for (int e : params.extents)
    if (e < 2 || e % 2) throw ConfigError("params.extents", "lattice extents must be even and >= 2");
  if (params.spacing && !(*params.spacing > 0.0)) throw ConfigError("params.spacing", "must be > 0");
  if (params.cases && *params.cases < 1) throw ConfigError("params.cases", "must be >= 1");
  if (!(params.alpha_step > 0.0)) throw ConfigError("params.alpha_grid", "step must be > 0");
  if (params.special_m < 1 || params.special_m > kMaxDim) throw ConfigError("params.m", "out of range");
  if (!(params.epsilon > 0.0)) throw ConfigError("params.epsilon", "must be > 0");
  if (params.p && !(*params.p >= 1.0)) throw ConfigError("params.p", "must be >= 1");
}

json config_to_json(const ExperimentConfig& c) {
  json ph = {{"kind", to_string(c.phantom.kind)},
             {"lambda", c.phantom.lambda},
             {"p", c.phantom.p},
             {"epsilon", c.phantom.epsilon}};
  if (c.phantom.kind == PhantomKind::shifted_gaussian) ph["shift"] = mat_to_json(c.phantom.shift);
  json params = {{"alpha", c.params.alpha},
                 {"epsilon", c.params.epsilon},
                 {"m", c.params.special_m},
                 {"alpha_grid", {c.params.alpha_lo, c.params.alpha_hi, c.params.alpha_step}}};
  if (c.params.p) params["p"] = *c.params.p;
  if (c.params.cases) params["cases"] = *c.params.cases;
  if (c.params.tolerance) params["tolerance"] = *c.params.tolerance;
  if (!c.params.extents.empty()) params["extents"] = c.params.extents;
  if (c.params.spacing) params["spacing"] = *c.params.spacing;
  json out = {{"experiment", to_string(c.experiment)},
              {"dims", {{"n", c.dims.n}, {"m", c.dims.m}, {"k", c.dims.k}}},
              {"phantom", ph},
              {"quadrature",
               {{"matrix_space", spec_to_json(c.quadrature.matrix_space)},
                {"group", spec_to_json(c.quadrature.group)},
                {"cone", spec_to_json(c.quadrature.cone)},
                {"kernel", spec_to_json(c.quadrature.kernel)}}},
              {"seed", c.seed},
              {"params", params},
              {"output", {{"format", c.format == OutputFormat::json ? "json" : "csv"}}}};
  if (c.output_path) out["output"]["path"] = *c.output_path;
  return out;
}

ExperimentConfig config_from_json(const json& j, ExperimentConfig c) {
  if (!j.is_object()) throw ConfigError("config", "expected a JSON object");
  if (j.contains("experiment")) {
    std::string name;
    read_field(j, "experiment", name, "config");
    const Experiment e = experiment_from_string(name);
    if (e != c.experiment) {
      ExperimentConfig d = ExperimentConfig::defaults(e);
      d.seed = c.seed;
      c = d;
    }
  }
  if (j.contains("dims")) {
    const json& d = j["dims"];
    read_field(d, "n", c.dims.n, "dims");
    read_field(d, "m", c.dims.m, "dims");
    read_field(d, "k", c.dims.k, "dims");
  }
  c.phantom.n = c.dims.n;
  c.phantom.m = c.dims.m;
  if (j.contains("phantom")) {
    const json& p = j["phantom"];
    if (p.is_string()) {
      try {
        c.phantom.kind = phantom_kind_from_string(p.get<std::string>());
      } catch (const BadSpec& e) {
        throw ConfigError("phantom.kind", e.what());
      }
    } else {
      std::string kind = to_string(c.phantom.kind);
      read_field(p, "kind", kind, "phantom");
      try {
        c.phantom.kind = phantom_kind_from_string(kind);
      } catch (const BadSpec& e) {
        throw ConfigError("phantom.kind", e.what());
      }
      read_field(p, "lambda", c.phantom.lambda, "phantom");
      read_field(p, "p", c.phantom.p, "phantom");
      read_field(p, "epsilon", c.phantom.epsilon, "phantom");
      if (p.contains("shift")) c.phantom.shift = mat_from_json(p["shift"], "phantom.shift");
    }
  }
  if (j.contains("quadrature")) {
    const json& q = j["quadrature"];
    if (q.contains("matrix_space")) spec_from_json(q["matrix_space"], c.quadrature.matrix_space, "quadrature.matrix_space");
    if (q.contains("group")) spec_from_json(q["group"], c.quadrature.group, "quadrature.group");
    if (q.contains("cone")) spec_from_json(q["cone"], c.quadrature.cone, "quadrature.cone");
    if (q.contains("kernel")) spec_from_json(q["kernel"], c.quadrature.kernel, "quadrature.kernel");
  }
  read_field(j, "seed", c.seed, "config");
  if (j.contains("output")) {
    const json& o = j["output"];
    std::string path;
    if (o.contains("path")) {
      read_field(o, "path", path, "output");
      c.output_path = path;
    }
    std::string fmt_name;
    read_field(o, "format", fmt_name, "output");
    if (fmt_name == "json") c.format = OutputFormat::json;
    else if (fmt_name == "csv") c.format = OutputFormat::csv;
    else if (!fmt_name.empty()) throw ConfigError("output.format", "expected json or csv");
  }
  if (j.contains("params")) {
    const json& p = j["params"];
    auto& P = c.params;
    read_field(p, "alpha", P.alpha, "params");
    read_field(p, "epsilon", P.epsilon, "params");
    read_field(p, "m", P.special_m, "params");
    double v = 0.0;
    int iv = 0;
    if (p.contains("p")) { read_field(p, "p", v, "params"); P.p = v; }
    if (p.contains("cases")) { read_field(p, "cases", iv, "params"); P.cases = iv; }
    if (p.contains("tolerance")) { read_field(p, "tolerance", v, "params"); P.tolerance = v; }
    if (p.contains("spacing")) { read_field(p, "spacing", v, "params"); P.spacing = v; }
    read_field(p, "extents", P.extents, "params");
    if (p.contains("alpha_grid")) {
      std::vector<double> g;
      read_field(p, "alpha_grid", g, "params");
      if (g.size() != 3) throw ConfigError("params.alpha_grid", "expected [lo, hi, step]");
      P.alpha_lo = g[0];
      P.alpha_hi = g[1];
      P.alpha_step = g[2];
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config", "cannot open " + path);
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw ConfigError("config", e.what());
  }
  ExperimentConfig base;
  if (j.contains("experiment") && j["experiment"].is_string())
    base = ExperimentConfig::defaults(experiment_from_string(j["experiment"].get<std::string>()));
  return config_from_json(j, base);
}

// ---- reports ----

json ExperimentReport::to_json() const {
  json cs = json::array();
  for (const auto& c : cases) {
    json r = {{"label", c.label}, {"inputs", c.inputs}, {"lhs", c.lhs.real()}, {"rhs", c.rhs.real()},
              {"lhs_error", c.lhs_error}, {"rhs_error", c.rhs_error}, {"residual", c.residual},
              {"pass", c.pass}};
    if (c.lhs.imag() != 0.0) r["lhs_imag"] = c.lhs.imag();
    if (c.rhs.imag() != 0.0) r["rhs_imag"] = c.rhs.imag();
    if (!c.error.empty()) r["error"] = c.error;
    if (!c.note.empty()) r["note"] = c.note;
    if (config.timing) r["wall_seconds"] = c.wall_seconds;
    cs.push_back(std::move(r));
  }
  return {{"tool", "matplane"}, {"version", kVersion}, {"seed", config.seed},
          {"config", config_to_json(config)}, {"tolerance", tolerance},
          {"pass", pass}, {"cases", cs}};
}

std::string ExperimentReport::to_csv() const {
  std::ostringstream os;
  if (config.experiment == Experiment::special_tables) {
    const auto& p = config.params;
    return special_gamma_csv(p.special_m, p.alpha_lo, p.alpha_hi, p.alpha_step);
  }
  os << "label,lhs,rhs,lhs_error,rhs_error,residual,pass,error";
  if (config.timing) os << ",wall_seconds";
  os << '\n';
  for (const auto& c : cases) {
    os << '"' << c.label << "\"," << fmt(c.lhs.real()) << ',' << fmt(c.rhs.real()) << ','
       << fmt(c.lhs_error) << ',' << fmt(c.rhs_error) << ',' << fmt(c.residual) << ','
       << (c.pass ? "true" : "false") << ",\"" << c.error << '"';
    if (config.timing) os << ',' << fmt(c.wall_seconds);
    os << '\n';
  }
  return os.str();
}

void ExperimentReport::write() const {
  if (!config.output_path) return;
  std::ofstream os(*config.output_path);
  if (!os) throw Error("cannot write " + *config.output_path);
  if (config.format == OutputFormat::json)
    os << to_json().dump(2) << '\n';
  else
    os << to_csv();
}

ExperimentReport run(const ExperimentConfig& config) {
  config.validate();
  ExperimentReport rep;
  rep.config = config;
  const auto field = [&] { return make_phantom(config.phantom); };
  switch (config.experiment) {
    case Experiment::special_tables:
      run_special(config, rep);
      break;
    case Experiment::mass_check:
      run_mass(config, rep, field());
      break;
    case Experiment::slice_check:
      run_slice(config, rep, field());
      break;
    case Experiment::fuglede:
      run_fuglede(config, rep, field());
      break;
    case Experiment::riesz_crosscheck:
      run_riesz_cross(config, rep, field());
      break;
    case Experiment::invert:
      run_invert(config, rep, field());
      break;
    case Experiment::reconstruct:
      run_reconstruct(config, rep, field());
      break;
    case Experiment::noninjectivity:
      run_noninjectivity(config, rep);
      break;
    case Experiment::divergence:
      run_divergence(config, rep);
      break;
    case Experiment::duality:
      run_duality(config, rep, field());
      break;
    case Experiment::phi_pairing:
      run_pairing(config, rep, field());
      break;
    case Experiment::cayley_laplace:
      run_laplace(config, rep, field());
      break;
  }
  rep.pass = !rep.cases.empty();
  for (const auto& c : rep.cases) rep.pass = rep.pass && c.pass;
  return rep;
}

// ---- convergence ----

std::string ConvergenceTable::to_csv() const {
  std::ostringstream os;
  os << "budget,residual,error_estimate\n";
  for (const auto& r : rows) os << r.budget << ',' << fmt(r.residual) << ',' << fmt(r.error_estimate) << '\n';
  return os.str();
}

ConvergenceTable convergence_study(const ExperimentConfig& config,
                                   const std::vector<std::int64_t>& ladder) {
  if (ladder.empty()) throw ConfigError("ladder", "needs at least one budget");
  ExperimentConfig c = config;
  if (!c.budget_spec()) throw ConfigError("experiment", "experiment does not support budget scaling");
  ConvergenceTable t;
  for (auto b : ladder) {
    c.budget_spec()->order_or_samples = b;
    const ExperimentReport rep = run(c);
    ConvergenceRow row;
    row.budget = b;
    for (const auto& cs : rep.cases) {
      if (!cs.error.empty()) throw Error("case '" + cs.label + "' failed: " + cs.error);
      row.residual = std::max(row.residual, cs.residual);
      const double scale = std::max(std::abs(cs.rhs), 1e-300);
      row.error_estimate = std::max(row.error_estimate, (cs.lhs_error + cs.rhs_error) / scale);
    }
    t.rows.push_back(row);
  }
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    const auto& a = t.rows[i - 1];
    const auto& b = t.rows[i];
    if (b.residual > a.residual + 2.0 * (a.error_estimate + b.error_estimate)) t.trend_ok = false;
  }
  return t;
}

std::string special_gamma_csv(int m, double lo, double hi, double step) {
  std::ostringstream os;
  os << "alpha,re,im,pole_factor\n";
  const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (int i = 0; i < count; ++i) {
    const double a = lo + i * step;
    os << fmt(a) << ',';
    if (auto j = siegel_pole_factor(m, a)) {
      os << ",," << *j << '\n';
      continue;
    }
    const cplx g = siegel_gamma(m, a);
    os << fmt(g.real()) << ',' << fmt(g.imag()) << ",\n";
  }
  return os.str();
}

}  // namespace matplane
