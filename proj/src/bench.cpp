#include "mkkc/bench.hpp"

#include "mkkc/io.hpp"
#include "mkkc/rounding.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <thread>
#include <tuple>

namespace mkkc {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Data seed shared by all variants of one (cell, replicate) so methods are
/// compared on the same draw.
std::uint64_t data_seed(std::uint64_t base, const ScenarioSpec& cell, int replicate) {
  const std::string key = scenario_label(cell) + "|" + level_label(cell) + "|" +
                          std::to_string(cell.p) + "|" + io::format_double(cell.mu_sep) + "|" +
                          std::to_string(cell.n_per_cluster);
  return combine_seed(combine_seed(base, fnv1a(key)), static_cast<std::uint64_t>(replicate));
}

struct VariantOutcome {
  std::vector<double> scores;
  std::vector<double> theta;
  int iterations = 0;
  bool converged = false;
  std::string error;
  std::optional<SolveResult<double>> solve;
};

struct JobOutcome {
  std::vector<VariantOutcome> variants;
};

JobOutcome run_job(const ExperimentGrid& grid, const ScenarioSpec& cell, int replicate) {
  JobOutcome out;
  out.variants.resize(grid.variants.size());

  ScenarioSpec spec = cell;
  spec.seed = data_seed(grid.base_seed, cell, replicate);
  LabeledMultiview data;
  KernelBundle<double> bundle;
  try {
    data = generate(spec);
    bundle = prepare_bundle(data.views, {grid.kernel});
  } catch (const std::exception& e) {
    for (auto& v : out.variants) v.error = e.what();
    return out;
  }

  const int k = data.truth.k;
  for (std::size_t vi = 0; vi < grid.variants.size(); ++vi) {
    VariantOutcome& o = out.variants[vi];
    const Variant variant = grid.variants[vi];
    try {
      SolveConfig config;
      config.k = k;
      config.max_iter = grid.max_iter;
      config.tol = grid.tol;
      config.variant = variant;
      config.seed = combine_seed(spec.seed, static_cast<std::uint64_t>(variant));
      SolveResult<double> result = solve(bundle, config);
      const HardAssignment pred = round_assignment(result.H.H, k, grid.n_starts, config.seed);
      for (Metric m : grid.metrics) o.scores.push_back(score(m, pred, data.truth, grid.nmi_mode));
      o.theta.assign(result.theta.theta.data(), result.theta.theta.data() + result.theta.theta.size());
      o.iterations = static_cast<int>(result.trace.iterations.size());
      o.converged = result.converged;
      if (replicate == 0) o.solve = std::move(result);
    } catch (const std::exception& e) {
      o.error = e.what();
    }
  }
  return out;
}

struct CellOrder {
  bool operator()(const ScenarioSpec& a, const ScenarioSpec& b) const {
    const auto count = [](const ScenarioSpec& s) { return s.perturbation == Perturbation::None ? 0 : s.count; };
    const auto rho = [](const ScenarioSpec& s) { return s.perturbation == Perturbation::Redundant ? s.rho : 0.0; };
    return std::make_tuple(a.scenario, a.perturbation, rho(a), count(a)) <
           std::make_tuple(b.scenario, b.perturbation, rho(b), count(b));
  }
};

std::string sanitize(std::string s) {
  for (char& c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.')) c = '_';
  return s;
}

std::string fixed3(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string join_theta(const std::vector<double>& theta, bool full_precision) {
  std::string out;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (i) out += ';';
    out += full_precision ? io::format_double(theta[i]) : fixed3(theta[i]);
  }
  return out;
}

}  // namespace

bool GridRun::any_error() const {
  return std::any_of(rows.begin(), rows.end(), [](const ResultRow& r) { return !r.error.empty(); });
}

int worker_threads(int requested) {
  int threads = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MKKC_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) threads = std::min(threads > 0 ? threads : cap, cap);
  }
  return std::max(1, threads);
}

void validate(const ExperimentGrid& grid) {
  if (grid.scenarios.empty()) throw InputError("grid has no scenarios");
  if (grid.variants.empty()) throw InputError("grid has no variants");
  if (grid.metrics.empty()) throw InputError("grid has no metrics");
  if (grid.replicates < 1) throw InputError("replicates must be at least 1");
  if (grid.n_starts < 1) throw InputError("n_starts must be at least 1");
  if (grid.max_iter < 1) throw InputError("max_iter must be at least 1");
  if (!(grid.tol > 0)) throw InputError("tol must be positive");
  for (const ScenarioSpec& s : grid.scenarios) validate(s);
}

GridRun run_grid(const ExperimentGrid& grid) {
  validate(grid);
  std::vector<ScenarioSpec> cells = grid.scenarios;
  std::stable_sort(cells.begin(), cells.end(), CellOrder{});

  const std::size_t reps = static_cast<std::size_t>(grid.replicates);
  const std::size_t jobs = cells.size() * reps;
  std::vector<JobOutcome> outcomes(jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs; j = next++)
      outcomes[j] = run_job(grid, cells[j / reps], static_cast<int>(j % reps));
  };
  const int threads = std::min<int>(worker_threads(grid.threads), static_cast<int>(jobs));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<std::size_t> variant_order(grid.variants.size());
  for (std::size_t i = 0; i < variant_order.size(); ++i) variant_order[i] = i;
  std::stable_sort(variant_order.begin(), variant_order.end(),
                   [&](std::size_t a, std::size_t b) { return grid.variants[a] < grid.variants[b]; });

  GridRun run;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const ScenarioSpec& cell = cells[c];
    for (std::size_t vi : variant_order) {
      std::vector<double> sums(grid.metrics.size(), 0.0);
      std::vector<double> theta;
      double iterations = 0.0;
      bool converged = true;
      std::string error;
      for (std::size_t r = 0; r < reps; ++r) {
        const VariantOutcome& o = outcomes[c * reps + r].variants[vi];
        if (!o.error.empty()) {
          if (error.empty()) error = "replicate " + std::to_string(r) + ": " + o.error;
          continue;
        }
        for (std::size_t mi = 0; mi < sums.size(); ++mi) sums[mi] += o.scores[mi];
        if (theta.empty()) theta.assign(o.theta.size(), 0.0);
        for (std::size_t t = 0; t < theta.size(); ++t) theta[t] += o.theta[t] / static_cast<double>(reps);
        iterations += o.iterations / static_cast<double>(reps);
        converged = converged && o.converged;
      }
      const Variant variant = grid.variants[vi];
      if (const auto& first = outcomes[c * reps].variants[vi]; first.solve)
        run.trajectories.push_back({sanitize(scenario_label(cell) + "_" + level_label(cell) + "_" +
                                             std::string(variant_name(variant))),
                                    *first.solve});

      std::vector<std::size_t> metric_order(grid.metrics.size());
      for (std::size_t i = 0; i < metric_order.size(); ++i) metric_order[i] = i;
      std::stable_sort(metric_order.begin(), metric_order.end(),
                       [&](std::size_t a, std::size_t b) { return grid.metrics[a] < grid.metrics[b]; });
      for (std::size_t mi : metric_order) {
        ResultRow row;
        row.scenario = scenario_label(cell);
        row.level = level_label(cell);
        row.variant = variant;
        row.metric = grid.metrics[mi];
        row.value = error.empty() ? sums[mi] / static_cast<double>(reps)
                                  : std::numeric_limits<double>::quiet_NaN();
        row.theta_final = theta;
        row.iterations = iterations;
        row.converged = error.empty() && converged;
        row.error = error;
        run.rows.push_back(std::move(row));
      }
    }
  }
  return run;
}

std::string emit_table(const std::vector<ResultRow>& rows, TableFormat format) {
  const bool csv = format == TableFormat::Csv;
  std::string out = csv ? "scenario,level,variant,metric,value,theta,iterations,converged,status\n"
                        : "| scenario | level | variant | metric | value | theta | iterations | converged | status |\n"
                          "|---|---|---|---|---|---|---|---|---|\n";
  for (const ResultRow& r : rows) {
    const std::string status = r.error.empty() ? "ok" : "error: " + r.error;
    std::vector<std::string> fields = {
        r.scenario,
        r.level,
        std::string(variant_name(r.variant)),
        std::string(metric_name(r.metric)),
        csv ? io::format_double(r.value) : fixed3(r.value),
        join_theta(r.theta_final, csv),
        csv ? io::format_double(r.iterations) : fixed3(r.iterations),
        r.converged ? "true" : "false",
        status,
    };
    if (csv) {
      for (std::string& f : fields)
        if (f.find_first_of(",\"\n") != std::string::npos) {
          std::string quoted = "\"";
          for (char ch : f) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
          f = quoted + "\"";
        }
      for (std::size_t i = 0; i < fields.size(); ++i) out += (i ? "," : "") + fields[i];
      out += '\n';
    } else {
      out += "|";
      for (const std::string& f : fields) out += " " + f + " |";
      out += '\n';
    }
  }
  return out;
}

std::string emit_pivot_markdown(const std::vector<ResultRow>& rows) {
  std::vector<std::string> scenarios;
  std::map<std::string, std::vector<std::string>> levels;
  for (const ResultRow& r : rows) {
    if (std::find(scenarios.begin(), scenarios.end(), r.scenario) == scenarios.end())
      scenarios.push_back(r.scenario);
    auto& ls = levels[r.scenario];
    if (std::find(ls.begin(), ls.end(), r.level) == ls.end()) ls.push_back(r.level);
  }

  std::string out;
  for (const std::string& s : scenarios) {
    const auto& ls = levels[s];
    out += "### Scenario " + s + "\n\n| method | metric |";
    for (const auto& l : ls) out += " " + l + " |";
    out += "\n|---|---|";
    for (std::size_t i = 0; i < ls.size(); ++i) out += "---|";
    out += '\n';

    std::vector<std::pair<Variant, Metric>> keys;
    std::map<std::pair<Variant, Metric>, std::map<std::string, double>> values;
    for (const ResultRow& r : rows) {
      if (r.scenario != s) continue;
      const auto key = std::make_pair(r.variant, r.metric);
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
      values[key][r.level] = r.value;
    }
    std::stable_sort(keys.begin(), keys.end());
    for (const auto& key : keys) {
      out += "| " + std::string(variant_name(key.first)) + " | " + std::string(metric_name(key.second)) + " |";
      for (const auto& l : ls) {
        const auto it = values[key].find(l);
        out += " " + (it == values[key].end() ? std::string("") : fixed3(it->second)) + " |";
      }
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

std::string emit_theta_trajectory(const SolveResult<double>& result) {
  const Index m = result.trace.iterations.empty() ? result.theta.theta.size()
                                                  : result.trace.iterations.front().theta.size();
  std::string out = "iter";
  for (Index v = 0; v < m; ++v) out += ",theta_" + std::to_string(v + 1);
  out += ",objective,delta\n";
  for (std::size_t t = 0; t < result.trace.iterations.size(); ++t) {
    const auto& e = result.trace.iterations[t];
    out += std::to_string(t + 1);
    for (Index v = 0; v < e.theta.size(); ++v) out += "," + io::format_double(e.theta(v));
    out += "," + io::format_double(e.objective) + "," + io::format_double(e.delta_theta) + "\n";
  }
  return out;
}

ExperimentGrid paper_tables_grid(std::uint64_t base_seed) {
  ExperimentGrid grid;
  grid.base_seed = base_seed;
  grid.nmi_mode = NmiMode::PaperCompat;
  grid.variants = all_variants();
  grid.metrics = {Metric::Ari, Metric::Nmi, Metric::Purity};
  for (Scenario s : {Scenario::A, Scenario::B, Scenario::C}) {
    for (int n = 0; n <= 10; ++n) {
      ScenarioSpec spec;
      spec.scenario = s;
      spec.perturbation = Perturbation::Noise;
      spec.count = n;
      grid.scenarios.push_back(spec);
    }
    for (double rho : {0.45, 0.72, 0.90, 0.97, 1.0})
      for (int n = 2; n <= 10; n += 2) {
        ScenarioSpec spec;
        spec.scenario = s;
        spec.perturbation = Perturbation::Redundant;
        spec.count = n;
        spec.rho = rho;
        grid.scenarios.push_back(spec);
      }
  }
  return grid;
}

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& key, const std::string& what) {
  throw InputError("config key '" + key + "': " + what);
}

template <typename T>
T get_as(const json& node, const std::string& key) {
  try {
    return node.get<T>();
  } catch (const json::exception&) {
    config_error(key, "has the wrong type");
  }
}

Scenario parse_scenario(const std::string& name, const std::string& key) {
  if (name == "A") return Scenario::A;
  if (name == "B") return Scenario::B;
  if (name == "C") return Scenario::C;
  config_error(key, "unknown scenario '" + name + "' (expected A, B or C)");
}

void read_scenarios(const json& list, ExperimentGrid& grid) {
  if (!list.is_array() || list.empty()) config_error("scenarios", "must be a nonempty array");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string at = "scenarios[" + std::to_string(i) + "]";
    const json& entry = list[i];
    if (!entry.is_object()) config_error(at, "must be an object");
    for (const auto& [k, v] : entry.items())
      if (k != "scenario" && k != "perturbation" && k != "levels" && k != "rho" && k != "n_per_cluster" &&
          k != "p" && k != "mu_sep")
        config_error(at + "." + k, "unknown key");
    if (!entry.contains("scenario")) config_error(at + ".scenario", "is required");

    ScenarioSpec base;
    base.scenario = parse_scenario(get_as<std::string>(entry["scenario"], at + ".scenario"), at + ".scenario");
    const std::string pert = entry.contains("perturbation")
                                 ? get_as<std::string>(entry["perturbation"], at + ".perturbation")
                                 : "none";
    if (pert == "none") base.perturbation = Perturbation::None;
    else if (pert == "noise") base.perturbation = Perturbation::Noise;
    else if (pert == "redundant") base.perturbation = Perturbation::Redundant;
    else config_error(at + ".perturbation", "unknown perturbation '" + pert + "' (expected none, noise or redundant)");
    if (entry.contains("n_per_cluster")) base.n_per_cluster = get_as<int>(entry["n_per_cluster"], at + ".n_per_cluster");
    if (entry.contains("p")) base.p = get_as<int>(entry["p"], at + ".p");
    if (entry.contains("mu_sep")) base.mu_sep = get_as<double>(entry["mu_sep"], at + ".mu_sep");

    std::vector<double> rhos = {base.rho};
    if (entry.contains("rho") && base.perturbation == Perturbation::Redundant) {
      const json& r = entry["rho"];
      rhos = r.is_array() ? get_as<std::vector<double>>(r, at + ".rho")
                          : std::vector<double>{get_as<double>(r, at + ".rho")};
    }
    std::vector<int> levels = {0};
    if (entry.contains("levels")) levels = get_as<std::vector<int>>(entry["levels"], at + ".levels");
    if (levels.empty()) config_error(at + ".levels", "must not be empty");
    for (double rho : rhos)
      for (int level : levels) {
        ScenarioSpec spec = base;
        spec.count = level;
        spec.rho = rho;
        try {
          validate(spec);
        } catch (const InputError& e) {
          config_error(at, e.what());
        }
        grid.scenarios.push_back(spec);
      }
  }
}

}  // namespace

ExperimentGrid parse_grid_config(const json& config) {
  if (!config.is_object()) throw InputError("config must be a JSON object");
  static const std::vector<std::string> known = {"preset", "scenarios", "variants", "metrics", "replicates",
                                                 "base_seed", "nmi_mode", "gamma", "n_starts", "max_iter",
                                                 "tol", "threads"};
  for (const auto& [k, v] : config.items())
    if (std::find(known.begin(), known.end(), k) == known.end()) config_error(k, "unknown key");

  ExperimentGrid grid;
  if (config.contains("preset")) {
    const auto preset = get_as<std::string>(config["preset"], "preset");
    if (preset != "paper-tables") config_error("preset", "unknown preset '" + preset + "'");
    grid = paper_tables_grid();
  } else {
    grid.variants = all_variants();
    grid.metrics = {Metric::Ari, Metric::Nmi, Metric::Purity};
  }

  if (config.contains("scenarios")) {
    grid.scenarios.clear();
    read_scenarios(config["scenarios"], grid);
  }
  if (grid.scenarios.empty()) config_error("scenarios", "is required");
  if (config.contains("variants")) {
    grid.variants.clear();
    const json& list = config["variants"];
    if (!list.is_array() || list.empty()) config_error("variants", "must be a nonempty array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto name = get_as<std::string>(list[i], "variants[" + std::to_string(i) + "]");
      const auto v = parse_variant(name);
      if (!v) config_error("variants[" + std::to_string(i) + "]", "unknown variant '" + name + "'");
      grid.variants.push_back(*v);
    }
  }
  if (config.contains("metrics")) {
    grid.metrics.clear();
    const json& list = config["metrics"];
    if (!list.is_array() || list.empty()) config_error("metrics", "must be a nonempty array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto name = get_as<std::string>(list[i], "metrics[" + std::to_string(i) + "]");
      const auto m = parse_metric(name);
      if (!m) config_error("metrics[" + std::to_string(i) + "]", "unknown metric '" + name + "'");
      grid.metrics.push_back(*m);
    }
  }
  if (config.contains("replicates")) grid.replicates = get_as<int>(config["replicates"], "replicates");
  if (config.contains("base_seed")) grid.base_seed = get_as<std::uint64_t>(config["base_seed"], "base_seed");
  if (config.contains("n_starts")) grid.n_starts = get_as<int>(config["n_starts"], "n_starts");
  if (config.contains("max_iter")) grid.max_iter = get_as<int>(config["max_iter"], "max_iter");
  if (config.contains("tol")) grid.tol = get_as<double>(config["tol"], "tol");
  if (config.contains("threads")) grid.threads = get_as<int>(config["threads"], "threads");
  if (config.contains("gamma")) {
    grid.kernel.gamma = get_as<double>(config["gamma"], "gamma");
    if (!(grid.kernel.gamma > 0)) config_error("gamma", "must be positive");
  }
  if (config.contains("nmi_mode")) {
    const auto mode = get_as<std::string>(config["nmi_mode"], "nmi_mode");
    if (mode == "standard") grid.nmi_mode = NmiMode::Standard;
    else if (mode == "paper-compat") grid.nmi_mode = NmiMode::PaperCompat;
    else config_error("nmi_mode", "expected 'standard' or 'paper-compat'");
  }
  if (grid.replicates < 1) config_error("replicates", "must be at least 1");
  if (grid.n_starts < 1) config_error("n_starts", "must be at least 1");
  if (grid.max_iter < 1) config_error("max_iter", "must be at least 1");
  if (!(grid.tol > 0)) config_error("tol", "must be positive");
  return grid;
}

}  // namespace mkkc
