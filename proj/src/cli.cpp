#include "sparse_lingam/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sparse_lingam/metrics.hpp"
#include "sparse_lingam/pipeline.hpp"
#include "sparse_lingam/synth.hpp"

namespace sparse_lingam {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::parse:
    case ErrorKind::missing_data:
      return exit_code::parse;
    case ErrorKind::parameter:
      return exit_code::parameter;
    case ErrorKind::io:
      return exit_code::io;
    case ErrorKind::degenerate:
    case ErrorKind::rank_deficient:
    case ErrorKind::singular:
    case ErrorKind::divergence:
    case ErrorKind::selection:
      return exit_code::numerical;
  }
  return exit_code::numerical;
}

std::string format_double(double v) {
  if (v == 0.0) return "0";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string matrix_to_csv(const Matrix& m) {
  std::string out;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string heatmap_ppm(const Matrix& b, int cell) {
  if (b.rows() != b.cols()) {
    throw Error(ErrorKind::parameter, "heatmap needs a square matrix");
  }
  if (cell < 1) throw Error(ErrorKind::parameter, "cell size must be >= 1");
  const Index d = b.rows();
  const double scale = max_abs(b);
  const Index side = d * cell;
  std::string out = "P6\n" + std::to_string(side) + " " + std::to_string(side) + "\n255\n";
  std::vector<unsigned char> colors(static_cast<std::size_t>(3 * d * d));
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      const double t = scale > 0.0 ? std::clamp(b(i, j) / scale, -1.0, 1.0) : 0.0;
      const auto fade = static_cast<unsigned char>(std::lround(255.0 * (1.0 - std::abs(t))));
      unsigned char* px = &colors[static_cast<std::size_t>(3 * (i * d + j))];
      px[0] = t < 0.0 ? fade : 255;
      px[1] = fade;
      px[2] = t > 0.0 ? fade : 255;
    }
  }
  out.reserve(out.size() + static_cast<std::size_t>(3 * side * side));
  for (Index y = 0; y < side; ++y) {
    const Index i = y / cell;
    for (Index x = 0; x < side; ++x) {
      const auto* px = &colors[static_cast<std::size_t>(3 * (i * d + x / cell))];
      out.append(reinterpret_cast<const char*>(px), 3);
    }
  }
  return out;
}

// ---- RunConfig <-> JSON ---------------------------------------------------

std::string run_config_to_json(const RunConfig& c) {
  ojson j;
  j["format"] = "sparse-lingam/run-config";
  j["version"] = 1;
  j["command"] = c.command;
  j["input"] = c.input;
  j["output_dir"] = c.output_dir;
  j["output"] = c.output;
  j["d"] = c.d;
  j["n"] = c.n;
  j["graph"] = c.graph;
  j["edges"] = c.edges ? ojson(*c.edges) : ojson(nullptr);
  j["noise"] = c.noise;
  j["seed"] = c.seed;
  j["ar1"] = c.ar1 ? ojson(*c.ar1) : ojson(nullptr);
  j["lambda"] = c.lambda;
  j["alpha"] = c.alpha ? ojson(*c.alpha) : ojson(nullptr);
  j["alpha_grid"] = c.alpha_grid;
  j["k_folds"] = c.k_folds;
  j["omega1"] = c.omega1;
  j["omega2"] = c.omega2;
  j["gamma"] = c.gamma;
  j["rho"] = c.rho;
  j["eta"] = c.eta;
  j["u_max"] = c.u_max;
  j["max_outer"] = c.max_outer;
  j["replicates"] = c.replicates;
  j["window"] = c.window ? ojson(*c.window) : ojson(nullptr);
  j["log1p"] = c.log1p;
  j["jobs"] = c.jobs;
  j["header"] = c.header;
  j["delimiter"] = std::string(1, c.delimiter);
  j["cell"] = c.cell;
  return j.dump(2) + "\n";
}

namespace {

template <class T>
void read_field(const nlohmann::json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

template <class T>
void read_optional(const nlohmann::json& j, const char* key, std::optional<T>& dst) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    dst.reset();
  } else {
    dst = j.at(key).get<T>();
  }
}

}  // namespace

RunConfig run_config_from_json(const std::string& text, RunConfig c) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_object()) throw Error(ErrorKind::parse, "run config must be a JSON object");
    read_field(j, "command", c.command);
    read_field(j, "input", c.input);
    read_field(j, "output_dir", c.output_dir);
    read_field(j, "output", c.output);
    read_field(j, "d", c.d);
    read_field(j, "n", c.n);
    read_field(j, "graph", c.graph);
    read_optional(j, "edges", c.edges);
    read_field(j, "noise", c.noise);
    read_field(j, "seed", c.seed);
    read_optional(j, "ar1", c.ar1);
    read_field(j, "lambda", c.lambda);
    read_optional(j, "alpha", c.alpha);
    read_field(j, "alpha_grid", c.alpha_grid);
    read_field(j, "k_folds", c.k_folds);
    read_field(j, "omega1", c.omega1);
    read_field(j, "omega2", c.omega2);
    read_field(j, "gamma", c.gamma);
    read_field(j, "rho", c.rho);
    read_field(j, "eta", c.eta);
    read_field(j, "u_max", c.u_max);
    read_field(j, "max_outer", c.max_outer);
    read_field(j, "replicates", c.replicates);
    read_optional(j, "window", c.window);
    read_field(j, "log1p", c.log1p);
    read_field(j, "jobs", c.jobs);
    read_field(j, "header", c.header);
    if (j.contains("delimiter")) {
      const auto s = j.at("delimiter").get<std::string>();
      if (s.size() != 1) throw Error(ErrorKind::parse, "delimiter must be one character");
      c.delimiter = s[0];
    }
    read_field(j, "cell", c.cell);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("run config JSON: ") + e.what());
  }
  return c;
}

namespace {

// ---- helpers --------------------------------------------------------------

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent seed for (run seed, replicate, stream).
std::uint64_t derive_seed(std::uint64_t seed, int replicate, int stream) {
  return splitmix(splitmix(splitmix(seed) ^ static_cast<std::uint64_t>(replicate)) ^
                  static_cast<std::uint64_t>(stream));
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorKind::io, "write failed for " + path.string());
}

fs::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create " + dir + ": " + ec.message());
  return fs::path(dir);
}

SolverConfig solver_config(const RunConfig& c) {
  SolverConfig s;
  s.lambda = c.lambda;
  s.gamma = c.gamma;
  s.rho = c.rho;
  s.eta = c.eta;
  s.u_max = c.u_max;
  s.max_outer = c.max_outer;
  s.validate();
  return s;
}

PipelineConfig pipeline_config(const RunConfig& c, std::uint64_t seed, int jobs) {
  if (!(c.omega1 >= 0.0) || !(c.omega2 >= 0.0)) {
    throw Error(ErrorKind::parameter, "omega1 and omega2 must be >= 0");
  }
  PipelineConfig p;
  p.solver = solver_config(c);
  p.grid = AlphaGrid::parse(c.alpha_grid);
  p.k_folds = c.k_folds;
  if (c.alpha) {
    if (!(*c.alpha >= 0.0) || *c.alpha >= 1.0) {
      throw Error(ErrorKind::parameter, "alpha must lie in [0, 1)");
    }
    p.fixed_alpha = *c.alpha;
  }
  p.omega1 = c.omega1;
  p.omega2 = c.omega2;
  p.seed = seed;
  p.jobs = jobs;
  return p;
}

GraphTruth make_truth(const RunConfig& c, std::uint64_t seed, int replicate) {
  if (c.d < 2) throw Error(ErrorKind::parameter, "d must be >= 2");
  const double edges = c.edges.value_or(static_cast<double>(c.d));
  GraphTruth skeleton;
  const auto kind = parse_graph_kind(c.graph);
  if (kind == GraphKind::er) {
    skeleton = gen_er_graph(c.d, edges, derive_seed(seed, replicate, 0));
  } else {
    const int m = std::max(1, static_cast<int>(std::lround(edges / c.d)));
    skeleton = gen_sf_graph(c.d, m, derive_seed(seed, replicate, 0));
  }
  std::optional<NoiseDist> fixed;
  if (c.noise != "mixed") fixed = parse_noise_dist(c.noise);
  auto truth = assign_weights_and_noises(skeleton, derive_seed(seed, replicate, 1), fixed);
  truth.seed = seed;
  return truth;
}

Dataset simulate_replicate(const RunConfig& c, const GraphTruth& truth,
                           std::uint64_t seed, int replicate) {
  if (c.n < 2) throw Error(ErrorKind::parameter, "n must be >= 2");
  return sample_data(truth, c.n, derive_seed(seed, replicate, 2));
}

ojson summary_json(const Summary& s) {
  ojson j;
  j["median"] = s.median;
  j["q1"] = s.q1;
  j["q3"] = s.q3;
  j["min"] = s.min;
  j["max"] = s.max;
  return j;
}

ojson diagnostics_json(const PipelineResult& r, const Dataset& data,
                       const RunConfig& c) {
  ojson j;
  j["format"] = "sparse-lingam/fit-diagnostics";
  j["version"] = 1;
  j["n_samples"] = data.n_samples();
  j["n_vars"] = data.n_vars();
  j["alpha"] = r.alpha;
  j["alpha_source"] = r.cv ? "cv" : "fixed";
  j["converged"] = r.converged;
  j["initial_converged"] = r.initial_converged;
  j["cutoff_applied"] = r.estimate.cutoff_applied;
  j["cutoff_violating"] = r.escalation.cutoff_violating;
  j["acyclic"] = r.estimate.acyclic;
  j["degenerate_permutation"] = r.estimate.degenerate_permutation;
  j["edges"] = (r.estimate.b.array() != 0.0).count();

  const auto& state = r.escalation.state;
  j["outer_iterations"] = state.outer_iterations;
  j["inner_iterations"] = state.inner_iterations;
  auto dens = ojson::array();
  for (const auto& d : state.densities) {
    dens.push_back({{"kind", to_string(d.kind)},
                    {"super_statistic", d.super_statistic},
                    {"sub_statistic", d.sub_statistic},
                    {"nonidentifiable", d.nonidentifiable}});
  }
  j["densities"] = std::move(dens);

  auto steps = ojson::array();
  for (const auto& s : r.escalation.steps) {
    steps.push_back({{"alpha", s.alpha}, {"cutoff", s.cutoff}, {"converged", s.converged}});
  }
  j["escalation"] = std::move(steps);

  if (r.cv) {
    ojson cv;
    cv["selected_alpha"] = r.cv->selected_alpha;
    auto folds = ojson::array();
    for (const auto& f : r.cv->folds) {
      ojson fj;
      fj["failed"] = f.failed;
      fj["argmax_alpha"] = f.failed ? ojson(nullptr) : ojson(f.argmax_alpha);
      auto ll = ojson::array();
      for (const double v : f.heldout_loglik) {
        ll.push_back(std::isfinite(v) ? ojson(v) : ojson(nullptr));
      }
      fj["heldout_loglik"] = std::move(ll);
      fj["converged"] = f.converged;
      folds.push_back(std::move(fj));
    }
    cv["folds"] = std::move(folds);
    j["cv"] = std::move(cv);
  } else {
    j["cv"] = nullptr;
  }

  auto hist = ojson::array();
  for (const auto& h : state.history) {
    hist.push_back({h.iteration, h.primal_residual, h.w_change});
  }
  j["residual_history"] = std::move(hist);
  j["config"] = ojson::parse(run_config_to_json(c));
  return j;
}

std::string order_csv(const std::vector<Index>& order) {
  std::string out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(order[i]);
  }
  return out + "\n";
}

CsvOptions csv_options(const RunConfig& c) {
  CsvOptions o;
  o.delimiter = c.delimiter;
  o.header = c.header;
  return o;
}

Dataset load_input(const RunConfig& c) {
  if (c.input.empty()) throw Error(ErrorKind::parameter, "--input is required");
  if (!fs::exists(c.input)) throw Error(ErrorKind::io, "no such file: " + c.input);
  if (c.window) {
    const auto series = load_series(c.input, csv_options(c));
    return slice_windows(series, *c.window, c.log1p);
  }
  if (c.log1p) throw Error(ErrorKind::parameter, "--log1p needs --window");
  return load_csv(c.input, csv_options(c));
}

// ---- benchmark ------------------------------------------------------------

struct ReplicateRow {
  MetricsReport metrics;
  double alpha = 0.0;
  double cutoff = 0.0;
  double first_cutoff = 0.0;  // at the selected alpha, before escalation
  bool converged = false;
  bool cutoff_violating = false;
  std::string error;

  bool flagged() const { return !error.empty() || !converged || cutoff_violating; }
};

ReplicateRow run_replicate(const RunConfig& c, int r) {
  ReplicateRow row;
  try {
    const auto truth = make_truth(c, c.seed, r);
    const auto data = simulate_replicate(c, truth, c.seed, r);
    const auto res = estimate_dag(data, pipeline_config(c, derive_seed(c.seed, r, 3), 1));
    row.metrics = evaluate(res.b_raw, truth.b);
    row.alpha = res.alpha;
    row.cutoff = res.estimate.cutoff_applied;
    row.first_cutoff = res.escalation.steps.front().cutoff;
    row.converged = res.converged;
    row.cutoff_violating = res.escalation.cutoff_violating;
  } catch (const Error& e) {
    row.error = to_string(e.kind());
  }
  return row;
}

}  // namespace

// ---- commands -------------------------------------------------------------

int cmd_simulate(const RunConfig& c, std::ostream& out) {
  const auto dir = prepare_dir(c.output_dir);
  if (c.ar1) {
    if (c.n < 1) throw Error(ErrorKind::parameter, "n must be >= 1");
    const auto series = simulate_ar1(static_cast<std::size_t>(c.n), *c.ar1,
                                     derive_seed(c.seed, 0, 2));
    std::string text;
    for (const double v : series) text += format_double(v) + "\n";
    write_file(dir / "series.csv", text);
    write_file(dir / "config.json", run_config_to_json(c));
    out << "simulated AR(1) series of length " << c.n << " -> "
        << (dir / "series.csv").string() << "\n";
    return exit_code::ok;
  }
  const auto truth = make_truth(c, c.seed, 0);
  const auto data = simulate_replicate(c, truth, c.seed, 0);
  write_file(dir / "data.csv", matrix_to_csv(data.values));
  write_file(dir / "truth.json", truth_to_json(truth));
  write_file(dir / "config.json", run_config_to_json(c));
  out << "simulated " << data.n_samples() << " rows x " << data.n_vars()
      << " variables, " << truth.n_edges() << " edges -> "
      << (dir / "data.csv").string() << "\n";
  return exit_code::ok;
}

int cmd_fit(const RunConfig& c, std::ostream& out) {
  const auto data = load_input(c);
  const auto cfg = pipeline_config(c, c.seed, c.jobs);
  const auto dir = prepare_dir(c.output_dir);
  const auto res = estimate_dag(data, cfg);

  write_file(dir / "B_hat.csv", matrix_to_csv(res.b_raw));
  write_file(dir / "B_hat_standardized.csv", matrix_to_csv(res.estimate.b));
  write_file(dir / "causal_order.csv", order_csv(res.estimate.causal_order));
  write_file(dir / "diagnostics.json", diagnostics_json(res, data, c).dump(2) + "\n");

  out << "alpha " << format_double(res.alpha) << ", "
      << (res.estimate.b.array() != 0.0).count() << " edges, cutoff "
      << format_double(res.estimate.cutoff_applied)
      << (res.converged ? "" : ", NOT CONVERGED")
      << (res.escalation.cutoff_violating ? ", cutoff above omega1" : "") << "\n";
  return res.converged ? exit_code::ok : exit_code::nonconvergence;
}

int cmd_benchmark(const RunConfig& c, std::ostream& out) {
  if (c.replicates < 1) throw Error(ErrorKind::parameter, "replicates must be >= 1");
  // Fail fast on bad parameters before spending time on replicates.
  make_truth(c, c.seed, 0);
  pipeline_config(c, c.seed, 1);
  const auto dir = prepare_dir(c.output_dir);

  std::vector<ReplicateRow> rows(static_cast<std::size_t>(c.replicates));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < c.replicates; r = next++) {
      rows[static_cast<std::size_t>(r)] = run_replicate(c, r);
    }
  };
  const int jobs = std::clamp(c.jobs, 1, c.replicates);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::string csv =
      "replicate,distance,shd,fdr,tpr,estimated_edges,true_edges,alpha,cutoff,"
      "first_cutoff,converged,cutoff_violating,flagged,error\n";
  std::vector<double> distance, shd, fdr, tpr;
  for (int r = 0; r < c.replicates; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    const auto& m = row.metrics;
    csv += std::to_string(r) + ',' + format_double(m.distance) + ',' +
           std::to_string(m.shd) + ',' + format_double(m.fdr) + ',' +
           format_double(m.tpr) + ',' + std::to_string(m.estimated_edges) + ',' +
           std::to_string(m.true_edges) + ',' + format_double(row.alpha) + ',' +
           format_double(row.cutoff) + ',' + format_double(row.first_cutoff) + ',' +
           (row.converged ? "1" : "0") + ',' +
           (row.cutoff_violating ? "1" : "0") + ',' + (row.flagged() ? "1" : "0") +
           ',' + row.error + '\n';
    if (row.flagged()) continue;
    distance.push_back(m.distance);
    shd.push_back(static_cast<double>(m.shd));
    fdr.push_back(m.fdr);
    tpr.push_back(m.tpr);
  }

  ojson summary;
  summary["format"] = "sparse-lingam/benchmark-summary";
  summary["version"] = 1;
  summary["replicates"] = c.replicates;
  summary["summarized"] = distance.size();
  summary["flagged"] = static_cast<std::size_t>(c.replicates) - distance.size();
  ojson metrics;
  const std::pair<const char*, const std::vector<double>*> cols[] = {
      {"distance", &distance}, {"shd", &shd}, {"fdr", &fdr}, {"tpr", &tpr}};
  for (const auto& [name, values] : cols) {
    metrics[name] = values->empty() ? ojson(nullptr) : summary_json(summarize(*values));
  }
  summary["metrics"] = std::move(metrics);
  summary["config"] = ojson::parse(run_config_to_json(c));

  write_file(dir / "metrics.csv", csv);
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  out << c.replicates << " replicates, " << distance.size() << " summarized";
  if (!tpr.empty()) {
    out << ", median TPR " << format_double(quantile(tpr, 0.5)) << ", median FDR "
        << format_double(quantile(fdr, 0.5)) << ", median SHD "
        << format_double(quantile(shd, 0.5));
  }
  out << "\n";
  return exit_code::ok;
}

int cmd_heatmap(const RunConfig& c, std::ostream& out) {
  if (c.input.empty()) throw Error(ErrorKind::parameter, "--input is required");
  if (c.output.empty()) throw Error(ErrorKind::parameter, "--output is required");
  if (!fs::exists(c.input)) throw Error(ErrorKind::io, "no such file: " + c.input);
  std::ifstream in(c.input, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + c.input);
  const auto table = parse_csv(in, csv_options(c));
  write_file(c.output, heatmap_ppm(table.values, c.cell));
  out << "wrote " << c.output << "\n";
  return exit_code::ok;
}

// ---- argument parsing -----------------------------------------------------

namespace {

std::optional<std::string> find_config_path(int argc, const char* const* argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return std::nullopt;
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::io, "cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct Flags {
  std::optional<double> edges, ar1, alpha;
  std::optional<int> window;
  std::optional<std::uint64_t> seed;
  std::string delimiter;
};

void add_common(CLI::App* app, RunConfig& c, Flags& f, std::string& config_path) {
  app->add_option("--config", config_path, "JSON run config; flags override it");
  app->add_option("--seed", f.seed, "Seed (falls back to SPARSE_LINGAM_SEED)");
  app->add_option("--delimiter", f.delimiter, "CSV delimiter");
  app->add_flag("--header", c.header, "Input CSV has a header row");
}

void add_generation(CLI::App* app, RunConfig& c, Flags& f) {
  app->add_option("--d", c.d, "Number of variables");
  app->add_option("--n", c.n, "Sample size (series length with --ar1)");
  app->add_option("--graph", c.graph, "er or sf")->check(CLI::IsMember({"er", "sf"}));
  app->add_option("--edges", f.edges, "Expected edge count (default d)");
  app->add_option("--noise", c.noise, "mixed, laplace, uniform or exponential")
      ->check(CLI::IsMember({"mixed", "laplace", "uniform", "exponential"}));
}

void add_solver(CLI::App* app, RunConfig& c, Flags& f) {
  app->add_option("--lambda", c.lambda, "Total penalty");
  app->add_option("--alpha", f.alpha, "Fixed alpha; skips cross-validation");
  app->add_option("--alpha-grid", c.alpha_grid, "lo:hi:count, log-spaced");
  app->add_option("--k-folds", c.k_folds, "Cross-validation folds");
  app->add_option("--omega1", c.omega1, "Largest acceptable acyclification cutoff");
  app->add_option("--omega2", c.omega2, "Final truncation threshold");
  app->add_option("--gamma", c.gamma, "Adaptive-lasso exponent");
  app->add_option("--rho", c.rho, "ADMM penalty");
  app->add_option("--eta", c.eta, "W learning rate");
  app->add_option("--u-max", c.u_max, "Inner W steps per outer iteration");
  app->add_option("--max-outer", c.max_outer, "Outer iteration limit");
  app->add_option("--jobs", c.jobs, "Worker threads");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  bool config_seed = false;
  try {
    if (const auto path = find_config_path(argc, argv)) {
      const auto text = read_text(*path);
      c = run_config_from_json(text, c);
      config_seed = nlohmann::json::parse(text).contains("seed");
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  }

  CLI::App app{"Sparse LiNGAM estimation"};
  app.require_subcommand(1);
  Flags f;
  std::string config_path;

  auto* sim = app.add_subcommand("simulate", "Sample a random DAG and data");
  add_common(sim, c, f, config_path);
  add_generation(sim, c, f);
  sim->add_option("--output-dir", c.output_dir, "Output directory");
  sim->add_option("--ar1", f.ar1, "Write an AR(1) series with this coefficient");

  auto* fitc = app.add_subcommand("fit", "Estimate B from a CSV table");
  add_common(fitc, c, f, config_path);
  add_solver(fitc, c, f);
  fitc->add_option("--input", c.input, "Input CSV");
  fitc->add_option("--output-dir", c.output_dir, "Output directory");
  fitc->add_option("--window", f.window, "Treat input as a series cut into windows");
  fitc->add_flag("--log1p", c.log1p, "Map the series through log(1 + x)");

  auto* bench = app.add_subcommand("benchmark", "Simulate, fit and score replicates");
  add_common(bench, c, f, config_path);
  add_generation(bench, c, f);
  add_solver(bench, c, f);
  bench->add_option("--replicates", c.replicates, "Number of replicates");
  bench->add_option("--output-dir", c.output_dir, "Output directory");

  auto* heat = app.add_subcommand("heatmap", "Render a matrix CSV as a PPM image");
  add_common(heat, c, f, config_path);
  heat->add_option("--input", c.input, "Matrix CSV");
  heat->add_option("--output", c.output, "Output .ppm path");
  heat->add_option("--cell", c.cell, "Pixels per entry");

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
    app.parse(args);
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return exit_code::ok;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_code::usage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  c.command = chosen->get_name();
  if (f.edges) c.edges = f.edges;
  if (f.ar1) c.ar1 = f.ar1;
  if (f.alpha) c.alpha = f.alpha;
  if (f.window) c.window = f.window;
  if (!f.delimiter.empty()) {
    if (f.delimiter.size() != 1) {
      err << "error: --delimiter must be a single character\n";
      return exit_code::usage;
    }
    c.delimiter = f.delimiter[0];
  }
  if (f.seed) {
    c.seed = *f.seed;
  } else if (const char* env = std::getenv("SPARSE_LINGAM_SEED");
             !config_seed && env && *env) {
    const std::string text = env;
    std::uint64_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
      err << "error: SPARSE_LINGAM_SEED is not an unsigned integer\n";
      return exit_code::parameter;
    }
    c.seed = v;
  }

  try {
    if (c.command == "simulate") return cmd_simulate(c, out);
    if (c.command == "fit") return cmd_fit(c, out);
    if (c.command == "benchmark") return cmd_benchmark(c, out);
    return cmd_heatmap(c, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e.kind());
  }
}

}  // namespace sparse_lingam
