#include "mtor/report.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <future>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <numeric>

#include "mtor/errors.hpp"

namespace mtor {

MethodRunReport run_method(const PreparedExperiment& prep, MethodKind kind, int dictionary_cap,
                           const std::vector<HyperParams>* grid) {
  MethodRunReport report;
  report.kind = kind;

  const std::vector<HyperParams> own_grid =
      grid ? std::vector<HyperParams>() : default_grid(kind);
  const std::vector<HyperParams>& candidates = grid ? *grid : own_grid;

  const auto t0 = std::chrono::steady_clock::now();
  const GridSearchResult gs = grid_search(kind, prep.stream, prep.train_rows, prep.sims,
                                          prep.config.gamma, candidates, dictionary_cap);
  report.chosen = gs.best;
  report.train_rmse = gs.best_rmse;
  report.grid_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const ModelFactory factory = make_factory(kind, gs.best, prep.sims, prep.config.gamma,
                                            prep.stream.dim(), dictionary_cap);
  report.eval = evaluate_online(prep.stream, prep.train_rows, prep.stream.rows(), factory);
  report.test_seconds = report.eval.seconds;

  const int T = prep.stream.tasks();
  report.per_task.reserve(T);
  for (int t = 0; t < T; ++t) {
    const Eigen::VectorXd zeros = Eigen::VectorXd::Zero(report.eval.actual[t].size());
    report.per_task.push_back(metrics(report.eval.predicted[t], report.eval.actual[t], zeros));
  }
  for (const Metrics& m : report.per_task) {
    report.mean.rmse += m.rmse / T;
    report.mean.mae += m.mae / T;
    report.mean.relrmse += m.relrmse / T;
    report.mean.relmae += m.relmae / T;
  }
  return report;
}

CompareReport run_compare(const std::vector<MultiTaskDataset>& datasets,
                          const std::vector<MethodKind>& methods, const PipelineConfig& config,
                          int dictionary_cap, int max_workers) {
  const int K = static_cast<int>(datasets.size());
  const int M = static_cast<int>(methods.size());
  if (K < 2 || M < 2) {
    throw InvalidInputError("comparison needs >= 2 datasets and >= 2 methods, got " +
                            std::to_string(K) + " and " + std::to_string(M));
  }
  const auto t0 = std::chrono::steady_clock::now();

  CompareReport report;
  report.methods = methods;
  std::vector<PreparedExperiment> preps;
  preps.reserve(K);
  for (const auto& ds : datasets) {
    report.dataset_sources.push_back(ds.source);
    preps.push_back(prepare_experiment(ds, config));
  }

  report.runs.assign(K, std::vector<MethodRunReport>(M));
  const int workers = std::max(1, max_workers);
  if (workers == 1) {
    for (int k = 0; k < K; ++k) {
      for (int m = 0; m < M; ++m) {
        report.runs[k][m] = run_method(preps[k], methods[m], dictionary_cap);
      }
    }
  } else {
    // Waves of independent (dataset, method) runs; results land in
    // preassigned slots, so the merge is race-free.
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(static_cast<std::size_t>(K) * M);
    for (int k = 0; k < K; ++k) {
      for (int m = 0; m < M; ++m) {
        pairs.emplace_back(k, m);
      }
    }
    for (std::size_t base = 0; base < pairs.size(); base += workers) {
      std::vector<std::future<MethodRunReport>> wave;
      const std::size_t end = std::min(pairs.size(), base + workers);
      for (std::size_t i = base; i < end; ++i) {
        wave.push_back(std::async(std::launch::async, [&, i]() {
          return run_method(preps[pairs[i].first], methods[pairs[i].second], dictionary_cap);
        }));
      }
      for (std::size_t i = base; i < end; ++i) {
        report.runs[pairs[i].first][pairs[i].second] = wave[i - base].get();
      }
    }
  }

  report.mean_relrmse.resize(K, M);
  report.mean_relmae.resize(K, M);
  for (int k = 0; k < K; ++k) {
    for (int m = 0; m < M; ++m) {
      report.mean_relrmse(k, m) = report.runs[k][m].mean.relrmse;
      report.mean_relmae(k, m) = report.runs[k][m].mean.relmae;
    }
  }
  report.stats = friedman_fisher(report.mean_relrmse);
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

nlohmann::json hyperparams_json(MethodKind kind, const HyperParams& params) {
  nlohmann::json j = nlohmann::json::object();
  switch (kind) {
    case MethodKind::MtWrls:
    case MethodKind::StlWrls:
      j["sigma"] = params.sigma;
      j["lambda"] = params.lambda;
      break;
    case MethodKind::MtOslssvr:
    case MethodKind::StlOslssvr:
      j["lambda"] = params.lambda;
      j["nu"] = params.nu;
      break;
    case MethodKind::Mogd:
      j["eta0"] = params.eta0;
      j["lambda"] = params.lambda;
      break;
    case MethodKind::Persistence:
      break;
  }
  return j;
}

nlohmann::json metrics_json(const Metrics& m) {
  return {{"rmse", m.rmse}, {"mae", m.mae}, {"relrmse", m.relrmse}, {"relmae", m.relmae}};
}

nlohmann::json method_report_json(const MethodRunReport& report) {
  nlohmann::json j;
  j["method"] = method_name(report.kind);
  j["hyperparameters"] = hyperparams_json(report.kind, report.chosen);
  j["train_rmse"] = report.train_rmse;
  j["grid_seconds"] = report.grid_seconds;
  j["test_seconds"] = report.test_seconds;
  auto& per_task = j["per_task"] = nlohmann::json::array();
  for (const Metrics& m : report.per_task) {
    per_task.push_back(metrics_json(m));
  }
  j["mean"] = metrics_json(report.mean);
  return j;
}

nlohmann::json compare_report_json(const CompareReport& report) {
  nlohmann::json j;
  auto& methods = j["methods"] = nlohmann::json::array();
  for (MethodKind kind : report.methods) {
    methods.push_back(method_name(kind));
  }
  j["datasets"] = report.dataset_sources;

  auto matrix_json = [](const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        row.push_back(m(r, c));
      }
      rows.push_back(std::move(row));
    }
    return rows;
  };
  j["mean_relrmse"] = matrix_json(report.mean_relrmse);
  j["mean_relmae"] = matrix_json(report.mean_relmae);

  auto& runs = j["runs"] = nlohmann::json::array();
  for (std::size_t k = 0; k < report.runs.size(); ++k) {
    nlohmann::json row = nlohmann::json::array();
    for (const MethodRunReport& r : report.runs[k]) {
      nlohmann::json cell;
      cell["method"] = method_name(r.kind);
      cell["hyperparameters"] = hyperparams_json(r.kind, r.chosen);
      cell["mean"] = metrics_json(r.mean);
      row.push_back(std::move(cell));
    }
    runs.push_back(std::move(row));
  }

  nlohmann::json stats;
  stats["friedman_statistic"] = report.stats.statistic;
  stats["p_value"] = report.stats.p_value;
  stats["significant"] = report.stats.significant;
  stats["alpha"] = report.stats.alpha;
  stats["lsd"] = report.stats.lsd;
  stats["mean_ranks"] = std::vector<double>(
      report.stats.mean_ranks.data(), report.stats.mean_ranks.data() + report.stats.mean_ranks.size());
  stats["victories"] = report.stats.victories;
  stats["defeats"] = report.stats.defeats;
  auto& calls = stats["calls"] = nlohmann::json::array();
  for (Eigen::Index r = 0; r < report.stats.calls.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < report.stats.calls.cols(); ++c) {
      row.push_back(report.stats.calls(r, c));
    }
    calls.push_back(std::move(row));
  }
  j["statistics"] = std::move(stats);
  j["seconds"] = report.seconds;
  return j;
}

nlohmann::json pipeline_config_json(const PipelineConfig& config) {
  return {{"lag", config.lag},
          {"mu", config.mu},
          {"gamma", config.gamma},
          {"use_elm", config.use_elm},
          {"elm_hidden", config.elm_hidden},
          {"elm_seed", config.elm_seed},
          {"standardize", config.standardize},
          {"sims_on_raw", config.sims_on_raw}};
}

std::vector<std::string> write_trace_csvs(const std::string& dir, const std::string& prefix,
                                          const OnlineEvalResult& eval) {
  std::vector<std::string> paths;
  for (std::size_t t = 0; t < eval.actual.size(); ++t) {
    const std::string path = dir + "/" + prefix + "_task" + std::to_string(t) + ".csv";
    std::ofstream out(path);
    if (!out) {
      throw InvalidInputError("cannot open trace file: " + path);
    }
    out << std::setprecision(17) << "actual,predicted,persistence\n";
    for (Eigen::Index i = 0; i < eval.actual[t].size(); ++i) {
      out << eval.actual[t](i) << "," << eval.predicted[t](i) << ",0\n";
    }
    paths.push_back(path);
  }
  return paths;
}

void write_summary_csv(const std::string& path, const CompareReport& report) {
  std::ofstream out(path);
  if (!out) {
    throw InvalidInputError("cannot open summary file: " + path);
  }
  const int M = static_cast<int>(report.methods.size());
  std::vector<int> order(M);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return report.stats.mean_ranks(a) < report.stats.mean_ranks(b);
  });
  out << std::setprecision(17) << "method,relrmse,relmae\n";
  for (int m : order) {
    out << method_name(report.methods[m]) << "," << report.mean_relrmse.col(m).mean() << ","
        << report.mean_relmae.col(m).mean() << "\n";
  }
}

}  // namespace mtor
