// matplane: run verification experiments on matrix k-plane transforms.
//
// Exit status: 0 pass, 1 fail or operation error, 2 configuration error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "matplane/harness.hpp"
#include "matplane/specialfn.hpp"

using namespace matplane;

namespace {

struct RunFlags {
  std::string experiment;
  std::string config;
  std::optional<int> n, m, k;
  std::optional<std::string> phantom;
  std::optional<double> alpha, p, tolerance, spacing, epsilon;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> budget;
  std::optional<int> cases;
  std::vector<int> extents;
  std::optional<std::string> out, format;
  bool timing = false;
};

void add_run_options(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("experiment", f.experiment, "Experiment name")->required();
  cmd->add_option("--config", f.config, "JSON config file; flags override its values");
  cmd->add_option("--n", f.n, "Rows of the matrix space");
  cmd->add_option("--m", f.m, "Columns of the matrix space");
  cmd->add_option("--k", f.k, "Plane dimension parameter, 0 < k < n");
  cmd->add_option("--phantom", f.phantom, "gaussian, shifted_gaussian, det_decay, boundary_lp, rank_supported");
  cmd->add_option("--alpha", f.alpha, "Order for cayley_laplace");
  cmd->add_option("--p", f.p, "Exponent for divergence");
  cmd->add_option("--seed", f.seed, "Base seed");
  cmd->add_option("--budget", f.budget, "Samples or order of the experiment's main integral");
  cmd->add_option("--tolerance", f.tolerance, "Pass threshold on the residual");
  cmd->add_option("--cases", f.cases, "Number of random cases");
  cmd->add_option("--extent", f.extents, "Lattice points per axis (repeatable)");
  cmd->add_option("--spacing", f.spacing, "Lattice spacing");
  cmd->add_option("--epsilon", f.epsilon, "Cutoff for noninjectivity");
  cmd->add_option("--out", f.out, "Report path (stdout when omitted)");
  cmd->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_flag("--timing", f.timing, "Include wall time per case");
}

ExperimentConfig build_config(const RunFlags& f) {
  ExperimentConfig c = ExperimentConfig::defaults(experiment_from_string(f.experiment));
  if (!f.config.empty()) {
    c = load_config(f.config);
    if (c.experiment != experiment_from_string(f.experiment))
      throw ConfigError("experiment", "config file names " + to_string(c.experiment));
  }
  if (f.n) c.dims.n = *f.n;
  if (f.m) c.dims.m = *f.m;
  if (f.k) c.dims.k = *f.k;
  c.phantom.n = c.dims.n;
  c.phantom.m = c.dims.m;
  if (f.phantom) {
    try {
      c.phantom.kind = phantom_kind_from_string(*f.phantom);
    } catch (const BadSpec& e) {
      throw ConfigError("phantom.kind", e.what());
    }
  }
  if (f.alpha) c.params.alpha = *f.alpha;
  if (f.p) {
    c.params.p = *f.p;
    c.phantom.p = *f.p;
  }
  if (f.seed) c.seed = *f.seed;
  if (f.tolerance) c.params.tolerance = *f.tolerance;
  if (f.cases) c.params.cases = *f.cases;
  if (!f.extents.empty()) c.params.extents = f.extents;
  if (f.spacing) c.params.spacing = *f.spacing;
  if (f.epsilon) c.params.epsilon = *f.epsilon;
  if (f.out) c.output_path = *f.out;
  if (f.format) c.format = *f.format == "csv" ? OutputFormat::csv : OutputFormat::json;
  if (f.timing) c.timing = true;
  if (f.budget) {
    QuadratureSpec* s = c.budget_spec();
    if (!s) throw ConfigError("budget", "experiment has no scalable budget");
    s->order_or_samples = *f.budget;
  }
  return c;
}

int emit(const ExperimentReport& rep) {
  if (rep.config.output_path) {
    rep.write();
    int failed = 0;
    for (const auto& c : rep.cases) failed += c.pass ? 0 : 1;
    std::cerr << to_string(rep.config.experiment) << ": " << (rep.pass ? "PASS" : "FAIL") << " ("
              << rep.cases.size() - failed << "/" << rep.cases.size() << " cases)\n";
  } else if (rep.config.format == OutputFormat::json) {
    std::cout << rep.to_json().dump(2) << '\n';
  } else {
    std::cout << rep.to_csv();
  }
  return rep.pass ? 0 : 1;
}

std::vector<std::int64_t> parse_ladder(const std::string& s) {
  std::vector<std::int64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoll(item));
    } catch (const std::exception&) {
      throw ConfigError("ladder", "bad budget '" + item + "'");
    }
  }
  return out;
}

void parse_grid(const std::string& s, double& lo, double& hi, double& step) {
  if (std::sscanf(s.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || !(step > 0.0) || hi < lo)
    throw ConfigError("alpha_grid", "expected lo:hi:step with step > 0");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix k-plane transform verification"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "Run one experiment and report pass/fail");
  add_run_options(run_cmd, run_flags);

  RunFlags conv_flags;
  std::string ladder;
  auto* conv_cmd = app.add_subcommand("converge", "Re-run an experiment over a budget ladder");
  add_run_options(conv_cmd, conv_flags);
  conv_cmd->add_option("--ladder", ladder, "Comma-separated budgets")->required();

  std::string table;
  int special_m = 2;
  std::string grid = "0.5:5:0.25";
  std::string special_out;
  auto* special_cmd = app.add_subcommand("special", "Emit special-function tables");
  special_cmd->add_option("table", table, "Table name")->required()->check(CLI::IsMember({"gamma"}));
  special_cmd->add_option("--m", special_m, "Matrix order")->check(CLI::Range(1, kMaxDim));
  special_cmd->add_option("--alpha-grid", grid, "lo:hi:step");
  special_cmd->add_option("--out", special_out, "CSV path; '-' or 'csv' for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) return emit(run(build_config(run_flags)));
    if (*conv_cmd) {
      const auto t = convergence_study(build_config(conv_flags), parse_ladder(ladder));
      std::cout << t.to_csv();
      std::cerr << "trend " << (t.trend_ok ? "ok" : "violated") << '\n';
      return t.trend_ok ? 0 : 1;
    }
    if (*special_cmd) {
      double lo = 0.0, hi = 0.0, step = 0.0;
      parse_grid(grid, lo, hi, step);
      const std::string csv = special_gamma_csv(special_m, lo, hi, step);
      if (special_out.empty() || special_out == "-" || special_out == "csv") {
        std::cout << csv;
      } else {
        std::ofstream os(special_out);
        if (!os) throw Error("cannot write " + special_out);
        os << csv;
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
