// Command-line front end: synthesize benchmark data, run one method through
// the full pipeline, or compare several methods across several datasets with
// rank statistics. Exit codes: 0 success, 1 runtime/numerical failure,
// 2 usage or configuration error.

#include <CLI11.hpp>
#include <Eigen/Dense>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "mtor/dataset.hpp"
#include "mtor/errors.hpp"
#include "mtor/evaluate.hpp"
#include "mtor/grid_search.hpp"
#include "mtor/mt_wrls.hpp"
#include "mtor/report.hpp"
#include "mtor/similarity.hpp"
#include "mtor/stats.hpp"
#include "mtor/task_graph.hpp"

namespace {

using nlohmann::json;

json load_config(const std::string& path) {
  if (path.empty()) {
    return json::object();
  }
  std::ifstream in(path);
  if (!in) {
    throw mtor::InvalidInputError("cannot open config file: " + path);
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw mtor::InvalidInputError("config file " + path + " is not valid JSON: " + e.what());
  }
}

/// Config value unless the flag was given explicitly on the command line.
template <class T>
void resolve(const CLI::Option* opt, const json& cfg, const char* key, T& value) {
  if (opt != nullptr && opt->count() > 0) {
    return;  // command line wins
  }
  if (cfg.contains(key)) {
    try {
      value = cfg.at(key).get<T>();
    } catch (const json::exception& e) {
      throw mtor::InvalidInputError(std::string("config key '") + key + "': " + e.what());
    }
  }
}

std::optional<std::vector<double>> grid_axis(const json& cfg, const char* axis) {
  if (!cfg.contains("grids") || !cfg.at("grids").contains(axis)) {
    return std::nullopt;
  }
  return cfg.at("grids").at(axis).get<std::vector<double>>();
}

mtor::GridAxes grid_axes_from_config(const json& cfg) {
  mtor::GridAxes axes;
  axes.sigma = grid_axis(cfg, "sigma");
  axes.lambda = grid_axis(cfg, "lambda");
  axes.nu = grid_axis(cfg, "nu");
  axes.eta0 = grid_axis(cfg, "eta0");
  return axes;
}

json grid_axes_json(const mtor::GridAxes& axes) {
  json j = json::object();
  if (axes.sigma) j["sigma"] = *axes.sigma;
  if (axes.lambda) j["lambda"] = *axes.lambda;
  if (axes.nu) j["nu"] = *axes.nu;
  if (axes.eta0) j["eta0"] = *axes.eta0;
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) {
    throw mtor::InvalidInputError("cannot open output file: " + path);
  }
  out << j.dump(2) << "\n";
}

void write_manifest(const std::string& dir, const std::string& command, const json& config,
                    std::vector<std::string> files) {
  json manifest;
  manifest["command"] = command;
  manifest["config"] = config;
  files.push_back("manifest.json");
  manifest["files"] = files;
  write_json_file(dir + "/manifest.json", manifest);
}

struct PipelineFlags {
  mtor::PipelineConfig pipeline;
  int dictionary_cap = 512;
};

/// Registers the shared pipeline flags on a subcommand; returns the options
/// for later config resolution.
struct PipelineOptions {
  CLI::Option* lag;
  CLI::Option* mu;
  CLI::Option* gamma;
  CLI::Option* elm;
  CLI::Option* elm_hidden;
  CLI::Option* elm_seed;
  CLI::Option* standardize;
  CLI::Option* sims_on_raw;
  CLI::Option* dict_cap;
};

PipelineOptions add_pipeline_flags(CLI::App* cmd, PipelineFlags& flags) {
  PipelineOptions opts;
  opts.lag = cmd->add_option("--lag", flags.pipeline.lag, "Autoregressive embedding lag");
  opts.mu = cmd->add_option("--mu", flags.pipeline.mu, "Training fraction of embedded samples");
  opts.gamma = cmd->add_option("--gamma", flags.pipeline.gamma,
                               "Interaction-matrix shrinkage weight");
  opts.elm = cmd->add_flag("--elm", flags.pipeline.use_elm,
                           "Map embedded inputs through a fixed random tanh layer");
  opts.elm_hidden =
      cmd->add_option("--elm-hidden", flags.pipeline.elm_hidden, "Hidden units of the map");
  opts.elm_seed = cmd->add_option("--elm-seed", flags.pipeline.elm_seed, "Seed of the map");
  opts.standardize = cmd->add_flag("--standardize", flags.pipeline.standardize,
                                   "Standardize features on training statistics");
  opts.sims_on_raw = cmd->add_flag("--sims-on-raw", flags.pipeline.sims_on_raw,
                                   "Estimate similarities on raw instead of differenced series");
  opts.dict_cap = cmd->add_option("--dict-cap", flags.dictionary_cap,
                                  "Dictionary capacity of the kernel methods");
  return opts;
}

void resolve_pipeline(const PipelineOptions& opts, const json& cfg, PipelineFlags& flags) {
  resolve(opts.lag, cfg, "lag", flags.pipeline.lag);
  resolve(opts.mu, cfg, "mu", flags.pipeline.mu);
  resolve(opts.gamma, cfg, "gamma", flags.pipeline.gamma);
  resolve(opts.elm, cfg, "elm", flags.pipeline.use_elm);
  resolve(opts.elm_hidden, cfg, "elm_hidden", flags.pipeline.elm_hidden);
  resolve(opts.elm_seed, cfg, "elm_seed", flags.pipeline.elm_seed);
  resolve(opts.standardize, cfg, "standardize", flags.pipeline.standardize);
  resolve(opts.sims_on_raw, cfg, "sims_on_raw", flags.pipeline.sims_on_raw);
  resolve(opts.dict_cap, cfg, "dictionary_cap", flags.dictionary_cap);
}

json pipeline_flags_json(const PipelineFlags& flags) {
  json j = mtor::pipeline_config_json(flags.pipeline);
  j["dictionary_cap"] = flags.dictionary_cap;
  return j;
}

// ---------------------------------------------------------------------------

int cmd_synth(int tasks, long len, double coupling, std::uint64_t seed, const std::string& out) {
  const mtor::MultiTaskDataset ds = mtor::synth_generate(tasks, len, coupling, seed);
  mtor::write_csv_tasks(out, ds);
  const mtor::SimilarityMatrix sims = mtor::SimilarityMatrix::from_series(ds.series);
  double lo = 1.0;
  double hi = 0.0;
  for (int t = 0; t < sims.tasks(); ++t) {
    for (int j = 0; j < sims.tasks(); ++j) {
      if (t == j) continue;
      lo = std::min(lo, sims(t, j));
      hi = std::max(hi, sims(t, j));
    }
  }
  std::cout << "wrote " << out << ": " << ds.tasks() << " tasks x " << ds.length()
            << " points; pairwise similarity range [" << std::setprecision(3) << lo << ", " << hi
            << "]\n";
  return 0;
}

struct OracleProbe {
  double max_deviation = 0.0;
  long prefixes = 0;
  double lambda = 1.0;
};

/// Exactness probe: a fresh sigma=1 multi-task recursive model against the
/// closed-form solve after every one of the first (up to) 60 test samples.
OracleProbe probe_against_closed_form(const mtor::PreparedExperiment& prep, double lambda) {
  auto graph =
      std::make_shared<const mtor::TaskGraph>(prep.sims, prep.config.gamma, lambda);
  mtor::MtWrlsModel model(graph, prep.stream.dim(), 1.0);
  std::vector<mtor::MtSample> seen;
  OracleProbe probe;
  probe.lambda = lambda;
  for (Eigen::Index row = prep.train_rows; row < prep.stream.rows() && probe.prefixes < 60;
       ++row) {
    for (int t = 0; t < prep.stream.tasks() && probe.prefixes < 60; ++t) {
      mtor::MtSample s{t, prep.stream.X[t].row(row).transpose(), prep.stream.y[t](row)};
      model.step(s.task, s.x, s.y);
      seen.push_back(s);
      const Eigen::VectorXd w = mtor::mt_batch_oracle(seen, *graph);
      probe.max_deviation =
          std::max(probe.max_deviation, (model.core().w - w).cwiseAbs().maxCoeff());
      ++probe.prefixes;
    }
  }
  return probe;
}

int cmd_run(const std::string& data, const std::string& method, const PipelineFlags& flags,
            const mtor::GridAxes& axes, bool oracle_check, double oracle_lambda,
            const std::string& out_dir, const json& resolved_config) {
  const mtor::MethodKind kind = mtor::method_from_name(method);
  const mtor::MultiTaskDataset ds = mtor::load_csv_tasks(data);
  const mtor::PreparedExperiment prep = mtor::prepare_experiment(ds, flags.pipeline);
  const std::vector<mtor::HyperParams> grid = mtor::build_grid(kind, axes);
  const mtor::MethodRunReport run =
      mtor::run_method(prep, kind, flags.dictionary_cap, &grid);

  std::filesystem::create_directories(out_dir);
  json report;
  report["command"] = "run";
  report["config"] = resolved_config;
  report["dataset"] = {{"source", ds.source},
                       {"tasks", ds.tasks()},
                       {"length", ds.length()},
                       {"embedded_rows", prep.stream.rows()},
                       {"train_rows", prep.train_rows},
                       {"test_rows", prep.test_rows},
                       {"input_dim", prep.stream.dim()}};
  json sims = json::array();
  for (int t = 0; t < prep.sims.tasks(); ++t) {
    json row = json::array();
    for (int j = 0; j < prep.sims.tasks(); ++j) {
      row.push_back(prep.sims(t, j));
    }
    sims.push_back(std::move(row));
  }
  report["similarities"] = std::move(sims);
  if (prep.elm) {
    report["elm"] = prep.elm->to_json();
  }
  report["report"] = mtor::method_report_json(run);

  if (oracle_check) {
    if (kind != mtor::MethodKind::MtWrls) {
      throw mtor::InvalidInputError("--oracle-check requires --method mt-wrls");
    }
    const OracleProbe probe = probe_against_closed_form(prep, oracle_lambda);
    std::cout << "oracle check (sigma=1, lambda=" << probe.lambda
              << "): max deviation " << std::scientific << std::setprecision(3)
              << probe.max_deviation << std::defaultfloat << " over " << probe.prefixes
              << " prefixes\n";
    report["oracle_check"] = {{"max_deviation", probe.max_deviation},
                              {"prefixes", probe.prefixes},
                              {"lambda", probe.lambda},
                              {"sigma", 1.0}};
  }

  write_json_file(out_dir + "/report.json", report);
  std::vector<std::string> files = {"report.json"};
  for (const std::string& path : mtor::write_trace_csvs(out_dir, method, run.eval)) {
    files.push_back(std::filesystem::path(path).filename().string());
  }
  write_manifest(out_dir, "run", resolved_config, std::move(files));

  std::cout << method << ": mean RELRMSE " << std::setprecision(6) << run.mean.relrmse
            << ", mean RELMAE " << run.mean.relmae << " (hyperparameters "
            << mtor::hyperparams_json(kind, run.chosen).dump() << ")\n"
            << "report: " << out_dir << "/report.json\n";
  return 0;
}

int cmd_compare(const std::vector<std::string>& data_files, int synth_datasets, int tasks,
                long len, double coupling, std::uint64_t seed,
                const std::vector<std::string>& methods, const PipelineFlags& flags,
                const mtor::GridAxes& axes, int workers, const std::string& out_dir,
                const json& resolved_config) {
  if (methods.size() < 2) {
    throw mtor::InvalidInputError("compare needs at least 2 methods");
  }
  std::vector<mtor::MethodKind> kinds;
  kinds.reserve(methods.size());
  for (const auto& name : methods) {
    kinds.push_back(mtor::method_from_name(name));
  }

  std::vector<mtor::MultiTaskDataset> datasets;
  if (!data_files.empty()) {
    for (const auto& path : data_files) {
      datasets.push_back(mtor::load_csv_tasks(path));
    }
  } else {
    for (int k = 0; k < synth_datasets; ++k) {
      datasets.push_back(mtor::synth_generate(tasks, len, coupling, seed + k));
    }
  }
  if (datasets.size() < 2) {
    throw mtor::InvalidInputError("compare needs at least 2 datasets (files or --synth-datasets)");
  }

  // Custom grid axes apply uniformly; each method expands its own grid.
  // run_compare uses default grids unless axes are present.
  mtor::CompareReport report;
  const bool custom = axes.sigma || axes.lambda || axes.nu || axes.eta0;
  if (!custom) {
    report = mtor::run_compare(datasets, kinds, flags.pipeline, flags.dictionary_cap, workers);
  } else {
    // Same flow with per-method custom grids.
    std::vector<mtor::PreparedExperiment> preps;
    preps.reserve(datasets.size());
    report.methods = kinds;
    for (const auto& ds : datasets) {
      report.dataset_sources.push_back(ds.source);
      preps.push_back(mtor::prepare_experiment(ds, flags.pipeline));
    }
    const int K = static_cast<int>(datasets.size());
    const int M = static_cast<int>(kinds.size());
    report.runs.assign(K, std::vector<mtor::MethodRunReport>(M));
    report.mean_relrmse.resize(K, M);
    report.mean_relmae.resize(K, M);
    for (int k = 0; k < K; ++k) {
      for (int m = 0; m < M; ++m) {
        const std::vector<mtor::HyperParams> grid = mtor::build_grid(kinds[m], axes);
        report.runs[k][m] = mtor::run_method(preps[k], kinds[m], flags.dictionary_cap, &grid);
        report.mean_relrmse(k, m) = report.runs[k][m].mean.relrmse;
        report.mean_relmae(k, m) = report.runs[k][m].mean.relmae;
      }
    }
    report.stats = mtor::friedman_fisher(report.mean_relrmse);
  }

  std::filesystem::create_directories(out_dir);
  json compare_json = mtor::compare_report_json(report);
  compare_json["command"] = "compare";
  compare_json["config"] = resolved_config;
  write_json_file(out_dir + "/compare.json", compare_json);
  mtor::write_summary_csv(out_dir + "/summary.csv", report);
  write_manifest(out_dir, "compare", resolved_config, {"compare.json", "summary.csv"});

  std::cout << "Friedman statistic " << std::setprecision(6) << report.stats.statistic
            << " (p = " << report.stats.p_value << ")\n";
  for (std::size_t m = 0; m < kinds.size(); ++m) {
    std::cout << "  " << std::left << std::setw(12) << mtor::method_name(kinds[m])
              << " mean RELRMSE " << std::setw(10) << report.mean_relrmse.col(m).mean()
              << " mean rank " << std::setw(8) << report.stats.mean_ranks(m) << " victories "
              << report.stats.victories[m] << " defeats " << report.stats.defeats[m] << "\n";
  }
  std::cout << "summary: " << out_dir << "/summary.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online multi-task regression benchmark"};
  app.require_subcommand(1);

  // synth ------------------------------------------------------------------
  auto* synth = app.add_subcommand("synth", "Generate a coupled synthetic dataset CSV");
  int s_tasks = 10;
  long s_len = 400;
  double s_coupling = 0.8;
  std::uint64_t s_seed = 1;
  std::string s_out = "dataset.csv";
  synth->add_option("--tasks", s_tasks, "Number of tasks (columns)");
  synth->add_option("--len", s_len, "Points per task");
  synth->add_option("--coupling", s_coupling, "Shared-component weight in [0,1]");
  synth->add_option("--seed", s_seed, "Generator seed");
  synth->add_option("--out", s_out, "Output CSV path");

  // run ----------------------------------------------------------------
  auto* run = app.add_subcommand("run", "Run one method through the full pipeline");
  std::string r_config;
  std::string r_data;
  std::string r_method = "mt-wrls";
  std::string r_out = "out";
  bool r_oracle_check = false;
  double r_oracle_lambda = 1.0;
  PipelineFlags r_flags;
  run->add_option("--config", r_config, "JSON config file (flags override it)");
  auto* r_data_opt = run->add_option("--data", r_data, "Dataset CSV, one column per task");
  auto* r_method_opt =
      run->add_option("--method", r_method,
                      "mt-wrls | mt-oslssvr | wrls | oslssvr | mogd | persistence");
  auto* r_out_opt = run->add_option("--out", r_out, "Output directory");
  const PipelineOptions r_popts = add_pipeline_flags(run, r_flags);
  run->add_flag("--oracle-check", r_oracle_check,
                "Probe the recursive solution against the closed form (mt-wrls)");
  run->add_option("--oracle-lambda", r_oracle_lambda, "Regularizer used by the probe");

  // compare ------------------------------------------------------------
  auto* compare = app.add_subcommand("compare", "Compare methods across datasets");
  std::string c_config;
  std::vector<std::string> c_data;
  std::vector<std::string> c_methods;
  int c_synth_datasets = 0;
  int c_tasks = 10;
  long c_len = 400;
  double c_coupling = 0.9;
  std::uint64_t c_seed = 1;
  int c_workers = static_cast<int>(std::thread::hardware_concurrency());
  std::string c_out = "out";
  PipelineFlags c_flags;
  compare->add_option("--config", c_config, "JSON config file (flags override it)");
  auto* c_data_opt =
      compare->add_option("--data", c_data, "Dataset CSVs (repeat or comma-separate)")
          ->delimiter(',');
  auto* c_methods_opt =
      compare->add_option("--methods", c_methods, "Methods to compare")->delimiter(',');
  auto* c_synth_opt = compare->add_option("--synth-datasets", c_synth_datasets,
                                          "Generate this many synthetic datasets instead");
  auto* c_tasks_opt = compare->add_option("--tasks", c_tasks, "Synthetic tasks per dataset");
  auto* c_len_opt = compare->add_option("--len", c_len, "Synthetic points per task");
  auto* c_coupling_opt = compare->add_option("--coupling", c_coupling, "Synthetic coupling");
  auto* c_seed_opt =
      compare->add_option("--seed", c_seed, "Base seed; dataset k uses seed + k");
  auto* c_workers_opt = compare->add_option("--workers", c_workers, "Parallel run threads");
  auto* c_out_opt = compare->add_option("--out", c_out, "Output directory");
  const PipelineOptions c_popts = add_pipeline_flags(compare, c_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed()) {
      return cmd_synth(s_tasks, s_len, s_coupling, s_seed, s_out);
    }
    if (run->parsed()) {
      const json cfg = load_config(r_config);
      resolve(r_data_opt, cfg, "data", r_data);
      resolve(r_method_opt, cfg, "method", r_method);
      resolve(r_out_opt, cfg, "out", r_out);
      resolve_pipeline(r_popts, cfg, r_flags);
      const mtor::GridAxes axes = grid_axes_from_config(cfg);
      if (r_data.empty()) {
        throw mtor::InvalidInputError("run needs --data (or a 'data' config key)");
      }
      json resolved = pipeline_flags_json(r_flags);
      resolved["data"] = r_data;
      resolved["method"] = r_method;
      resolved["out"] = r_out;
      const json axes_json = grid_axes_json(axes);
      if (!axes_json.empty()) {
        resolved["grids"] = axes_json;
      }
      return cmd_run(r_data, r_method, r_flags, axes, r_oracle_check, r_oracle_lambda, r_out,
                     resolved);
    }
    // compare
    const json cfg = load_config(c_config);
    resolve(c_data_opt, cfg, "datasets", c_data);
    resolve(c_methods_opt, cfg, "methods", c_methods);
    resolve(c_synth_opt, cfg, "synth_datasets", c_synth_datasets);
    resolve(c_tasks_opt, cfg, "tasks", c_tasks);
    resolve(c_len_opt, cfg, "len", c_len);
    resolve(c_coupling_opt, cfg, "coupling", c_coupling);
    resolve(c_seed_opt, cfg, "seed", c_seed);
    resolve(c_workers_opt, cfg, "workers", c_workers);
    resolve(c_out_opt, cfg, "out", c_out);
    resolve_pipeline(c_popts, cfg, c_flags);
    const mtor::GridAxes axes = grid_axes_from_config(cfg);
    json resolved = pipeline_flags_json(c_flags);
    resolved["datasets"] = c_data;
    resolved["methods"] = c_methods;
    resolved["synth_datasets"] = c_synth_datasets;
    resolved["tasks"] = c_tasks;
    resolved["len"] = c_len;
    resolved["coupling"] = c_coupling;
    resolved["seed"] = c_seed;
    resolved["workers"] = c_workers;
    resolved["out"] = c_out;
    const json axes_json = grid_axes_json(axes);
    if (!axes_json.empty()) {
      resolved["grids"] = axes_json;
    }
    return cmd_compare(c_data, c_synth_datasets, c_tasks, c_len, c_coupling, c_seed, c_methods,
                       c_flags, axes, c_workers, c_out, resolved);
  } catch (const mtor::InvalidInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
