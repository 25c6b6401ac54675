#include "cli.hpp"

#include "mkkc/bench.hpp"
#include "mkkc/io.hpp"
#include "mkkc/kernels.hpp"
#include "mkkc/metrics.hpp"
#include "mkkc/rounding.hpp"
#include "mkkc/simgen.hpp"
#include "mkkc/solver.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>

namespace mkkc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ClusterOptions {
  std::vector<std::string> views;
  std::vector<std::string> kernels;
  std::string rbf_sigma;
  double gamma = 0.5;
  int k = 2;
  std::string variant = "minmax";
  int max_iter = 500;
  double tol = 1e-4;
  int n_starts = 100;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::string truth;
  std::string nmi_mode = "standard";
  bool standardize = false;
};

struct BenchOptions {
  std::string config;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> replicates;
  std::optional<int> threads;
  std::optional<int> n_starts;
};

struct SimgenOptions {
  std::string scenario = "B";
  int noise = 0;
  int redundant = 0;
  double rho = 0.9;
  std::uint64_t seed = 1;
  int n_per_cluster = 100;
  int p = 4;
  double mu_sep = 3.25;
  std::string out_dir = ".";
};

/// "rbf", "rbf:<gamma>", "rbf-paper-real" or "linear".
KernelSpec parse_kernel(const std::string& text, double default_gamma, bool paper_real) {
  KernelSpec spec{KernelKind::Rbf, default_gamma, paper_real};
  if (text == "linear") return {KernelKind::Linear, 0.0, false};
  if (text == "rbf") return spec;
  if (text == "rbf-paper-real") return {KernelKind::Rbf, 0.0, true};
  if (text.rfind("rbf:", 0) == 0) {
    try {
      std::size_t used = 0;
      spec.gamma = std::stod(text.substr(4), &used);
      if (used != text.size() - 4 || !(spec.gamma > 0)) throw std::invalid_argument("gamma");
    } catch (const std::exception&) {
      throw InputError("kernel '" + text + "': gamma must be a positive number");
    }
    spec.gamma_from_features = false;
    return spec;
  }
  throw InputError("unknown kernel '" + text + "' (expected rbf, rbf:<gamma>, rbf-paper-real or linear)");
}

json theta_json(const VectorXd& theta) {
  json arr = json::array();
  for (Index v = 0; v < theta.size(); ++v) arr.push_back(theta(v));
  return arr;
}

int cmd_cluster(const ClusterOptions& opt, std::ostream& out) {
  const auto variant = parse_variant(opt.variant);
  if (!variant) throw InputError("unknown variant '" + opt.variant + "'");
  if (opt.k < 2) throw InputError("k must be at least 2");
  if (!opt.rbf_sigma.empty() && opt.rbf_sigma != "paper-real")
    throw InputError("--rbf-sigma accepts only 'paper-real'");
  NmiMode nmi_mode = NmiMode::Standard;
  if (opt.nmi_mode == "paper-compat") nmi_mode = NmiMode::PaperCompat;
  else if (opt.nmi_mode != "standard") throw InputError("--nmi-mode must be 'standard' or 'paper-compat'");

  const bool paper_real = opt.rbf_sigma == "paper-real";
  std::vector<KernelSpec> specs;
  for (const auto& k : opt.kernels) specs.push_back(parse_kernel(k, opt.gamma, paper_real));
  if (specs.empty()) specs.push_back({KernelKind::Rbf, opt.gamma, paper_real});
  if (specs.size() != 1 && specs.size() != opt.views.size())
    throw ShapeError("give one --kernel for all views or one per view (" + std::to_string(opt.views.size()) + ")");

  std::vector<DataView<double>> views;
  for (const auto& path : opt.views) {
    MatrixXd X = io::read_matrix_csv(path);
    if (opt.standardize) X = standardize_columns(X);
    views.push_back({std::move(X), fs::path(path).filename().string()});
  }
  const Index n = views.front().X.rows();
  for (std::size_t v = 1; v < views.size(); ++v)
    if (views[v].X.rows() != n)
      throw ShapeError(opt.views[v] + " has " + std::to_string(views[v].X.rows()) + " samples, " + opt.views[0] +
                       " has " + std::to_string(n));
  if (opt.k >= n) throw InputError("k=" + std::to_string(opt.k) + " must be smaller than the sample count " + std::to_string(n));

  std::optional<HardAssignment> truth;
  if (!opt.truth.empty()) {
    truth = io::read_labels_csv(opt.truth);
    if (truth->size() != n) throw ShapeError("truth file has " + std::to_string(truth->size()) + " labels, expected " + std::to_string(n));
  }

  const KernelBundle<double> bundle = prepare_bundle(views, specs);
  SolveConfig config;
  config.k = opt.k;
  config.max_iter = opt.max_iter;
  config.tol = opt.tol;
  config.seed = opt.seed;
  config.variant = *variant;
  const SolveResult<double> result = solve(bundle, config);
  const HardAssignment labels = round_assignment(result.H.H, opt.k, opt.n_starts, opt.seed);

  json summary;
  summary["variant"] = std::string(variant_name(*variant));
  summary["k"] = opt.k;
  summary["n"] = n;
  summary["views"] = opt.views;
  summary["objective"] = result.trace.iterations.empty() ? 0.0 : result.trace.iterations.back().objective;
  summary["iterations"] = result.trace.iterations.size();
  summary["converged"] = result.converged;
  summary["eigengap_warning"] = result.H.eigengap_warning;
  summary["theta"] = theta_json(result.theta.theta);
  if (truth) {
    summary["metrics"] = {{"ari", adjusted_rand_index(labels, *truth)},
                          {"nmi", normalized_mutual_information(labels, *truth, nmi_mode)},
                          {"purity", purity(labels, *truth)}};
  }

  std::string theta_csv = "view,theta\n";
  for (Index v = 0; v < result.theta.theta.size(); ++v)
    theta_csv += std::to_string(v + 1) + "," + io::format_double(result.theta.theta(v)) + "\n";

  const fs::path dir = opt.out_dir;
  io::write_text_file(dir / "assignments.csv", io::format_labels_csv(labels));
  io::write_text_file(dir / "theta.csv", theta_csv);
  io::write_text_file(dir / "summary.json", summary.dump(2) + "\n");
  out << "clustered " << n << " samples into " << opt.k << " clusters (" << variant_name(*variant) << ", "
      << result.trace.iterations.size() << " iterations" << (result.converged ? "" : ", not converged") << ")\n";
  return kOk;
}

int cmd_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err) {
  ExperimentGrid grid;
  if (opt.config == "paper-tables") {
    grid = paper_tables_grid();
  } else {
    json config;
    try {
      config = json::parse(io::read_text_file(opt.config));
    } catch (const json::parse_error& e) {
      throw InputError(opt.config + ": invalid JSON: " + e.what());
    }
    grid = parse_grid_config(config);
  }
  if (opt.seed) grid.base_seed = *opt.seed;
  if (opt.replicates) grid.replicates = *opt.replicates;
  if (opt.threads) grid.threads = *opt.threads;
  if (opt.n_starts) grid.n_starts = *opt.n_starts;

  const GridRun run = run_grid(grid);
  const fs::path dir = opt.out_dir;
  io::write_text_file(dir / "results.csv", emit_table(run.rows, TableFormat::Csv));
  for (const auto& t : run.trajectories)
    io::write_text_file(dir / ("theta_" + t.cell_id + ".csv"), emit_theta_trajectory(t.result));
  out << emit_pivot_markdown(run.rows);

  if (run.any_error()) {
    for (const auto& r : run.rows)
      if (!r.error.empty())
        err << "cell " << r.scenario << " " << r.level << " " << variant_name(r.variant) << ": " << r.error << "\n";
    return kRunFailed;
  }
  return kOk;
}

int cmd_simgen(const SimgenOptions& opt, std::ostream& out) {
  ScenarioSpec spec;
  if (opt.scenario == "A") spec.scenario = Scenario::A;
  else if (opt.scenario == "B") spec.scenario = Scenario::B;
  else if (opt.scenario == "C") spec.scenario = Scenario::C;
  else throw InputError("unknown scenario '" + opt.scenario + "' (expected A, B or C)");
  if (opt.noise > 0 && opt.redundant > 0) throw InputError("--noise and --redundant are mutually exclusive");
  if (opt.noise < 0 || opt.redundant < 0) throw InputError("perturbation counts must be nonnegative");
  if (opt.noise > 0) {
    spec.perturbation = Perturbation::Noise;
    spec.count = opt.noise;
  } else if (opt.redundant > 0) {
    spec.perturbation = Perturbation::Redundant;
    spec.count = opt.redundant;
  }
  if (!(opt.rho > 0.0 && opt.rho <= 1.0)) throw InputError("--rho must lie in (0, 1]");
  spec.rho = opt.rho;
  spec.seed = opt.seed;
  spec.n_per_cluster = opt.n_per_cluster;
  spec.p = opt.p;
  spec.mu_sep = opt.mu_sep;

  const LabeledMultiview data = generate(spec);
  const fs::path dir = opt.out_dir;
  for (std::size_t v = 0; v < data.views.size(); ++v) {
    std::vector<std::string> header;
    for (Index j = 0; j < data.views[v].X.cols(); ++j) header.push_back("f" + std::to_string(j + 1));
    io::write_text_file(dir / ("view" + std::to_string(v + 1) + ".csv"), io::format_matrix_csv(data.views[v].X, header));
  }
  io::write_text_file(dir / "truth.csv", io::format_labels_csv(data.truth));
  out << "wrote " << data.views.size() << " views of " << data.truth.size() << " samples to " << dir.string() << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Min-max multiple kernel k-means clustering", "mkkc"};
  app.require_subcommand(1);

  ClusterOptions cluster;
  auto* c = app.add_subcommand("cluster", "Cluster samples described by one CSV file per view");
  c->add_option("--view", cluster.views, "Per-view CSV (rows = samples); repeat once per view")->required();
  c->add_option("--kernel", cluster.kernels,
                "rbf, rbf:<gamma>, rbf-paper-real or linear; once for all views or once per view");
  c->add_option("--rbf-sigma", cluster.rbf_sigma,
                "'paper-real': rbf gamma = 1/(2+p^2) with p the view's feature count, "
                "for k(x,y) = exp(-gamma ||x-y||^2)");
  c->add_option("--gamma", cluster.gamma, "Default rbf gamma")->capture_default_str();
  c->add_option("-k,--k", cluster.k, "Number of clusters")->required();
  c->add_option("--variant", cluster.variant, "minmax, minmax-minc, minmin, uniform or single-best")->capture_default_str();
  c->add_option("--max-iter", cluster.max_iter)->capture_default_str()->check(CLI::PositiveNumber);
  c->add_option("--tol", cluster.tol)->capture_default_str()->check(CLI::PositiveNumber);
  c->add_option("--n-starts", cluster.n_starts, "k-means restarts (1000 reproduces the original protocol)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  c->add_option("--seed", cluster.seed)->capture_default_str();
  c->add_option("--out", cluster.out_dir, "Output directory")->capture_default_str();
  c->add_option("--truth", cluster.truth, "Ground-truth labels CSV; adds metrics to summary.json");
  c->add_option("--nmi-mode", cluster.nmi_mode, "standard or paper-compat")->capture_default_str();
  c->add_flag("--standardize", cluster.standardize, "Standardize every feature before building kernels");

  BenchOptions bench;
  auto* b = app.add_subcommand("bench", "Run a simulation grid");
  b->add_option("config", bench.config, "JSON grid config, or the preset name 'paper-tables'")->required();
  b->add_option("--out", bench.out_dir, "Output directory")->capture_default_str();
  b->add_option("--seed", bench.seed, "Override base_seed");
  b->add_option("--replicates", bench.replicates)->check(CLI::PositiveNumber);
  b->add_option("--threads", bench.threads, "Worker threads (also capped by MKKC_THREADS)")->check(CLI::PositiveNumber);
  b->add_option("--n-starts", bench.n_starts)->check(CLI::PositiveNumber);

  SimgenOptions sim;
  auto* s = app.add_subcommand("simgen", "Write a simulated scenario as per-view CSVs plus truth.csv");
  s->add_option("--scenario", sim.scenario, "A, B or C")->capture_default_str();
  s->add_option("--noise", sim.noise, "Noise columns appended to view 1");
  s->add_option("--redundant", sim.redundant, "Redundant columns appended to view 1");
  s->add_option("--rho", sim.rho, "Correlation of redundant columns with their source")->capture_default_str();
  s->add_option("--seed", sim.seed)->capture_default_str();
  s->add_option("--n-per-cluster", sim.n_per_cluster)->capture_default_str();
  s->add_option("--p", sim.p, "Informative features per view")->capture_default_str();
  s->add_option("--mu-sep", sim.mu_sep)->capture_default_str();
  s->add_option("--out", sim.out_dir, "Output directory")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  }

  try {
    if (c->parsed()) return cmd_cluster(cluster, out);
    if (b->parsed()) return cmd_bench(bench, out, err);
    return cmd_simgen(sim, out);
  } catch (const DegenerateError& e) {
    err << "error: " << e.what() << "\n";
    return kDegenerate;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
    return kDegenerate;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRunFailed;
  }
}

}  // namespace mkkc::cli
