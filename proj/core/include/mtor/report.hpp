#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "mtor/dataset.hpp"
#include "mtor/evaluate.hpp"
#include "mtor/grid_search.hpp"
#include "mtor/stats.hpp"

namespace mtor {

/// One method evaluated on one prepared experiment: the grid-search winner,
/// its test-segment traces, and per-task / mean error metrics.
struct MethodRunReport {
  MethodKind kind = MethodKind::Persistence;
  HyperParams chosen;
  double train_rmse = 0.0;  // winning candidate's training prequential RMSE
  double grid_seconds = 0.0;
  double test_seconds = 0.0;
  OnlineEvalResult eval;
  std::vector<Metrics> per_task;
  Metrics mean;  // arithmetic mean of the per-task metrics
};

/// Grid search on the training rows, then a fresh model of the winning
/// candidate evaluated prequentially on the test rows. A null grid uses the
/// method's default grid.
MethodRunReport run_method(const PreparedExperiment& prep, MethodKind kind, int dictionary_cap,
                           const std::vector<HyperParams>* grid = nullptr);

/// Several methods across several datasets: per-dataset mean metrics feed
/// the rank comparison.
struct CompareReport {
  std::vector<MethodKind> methods;
  std::vector<std::string> dataset_sources;
  Eigen::MatrixXd mean_relrmse;  // datasets x methods
  Eigen::MatrixXd mean_relmae;
  std::vector<std::vector<MethodRunReport>> runs;  // [dataset][method]
  FriedmanFisherResult stats;
  double seconds = 0.0;
};

/// Runs every (dataset, method) pair; pairs execute on up to max_workers
/// threads (1 = serial). Needs >= 2 datasets and >= 2 methods.
CompareReport run_compare(const std::vector<MultiTaskDataset>& datasets,
                          const std::vector<MethodKind>& methods, const PipelineConfig& config,
                          int dictionary_cap, int max_workers = 1);

nlohmann::json hyperparams_json(MethodKind kind, const HyperParams& params);
nlohmann::json metrics_json(const Metrics& m);
nlohmann::json method_report_json(const MethodRunReport& report);
nlohmann::json compare_report_json(const CompareReport& report);
nlohmann::json pipeline_config_json(const PipelineConfig& config);

/// One CSV per task, "<prefix>_task<t>.csv" under dir, with the columns
/// actual, predicted, persistence. Returns the paths written.
std::vector<std::string> write_trace_csvs(const std::string& dir, const std::string& prefix,
                                          const OnlineEvalResult& eval);

/// Method-per-row summary (method, relrmse, relmae), rows ordered by mean
/// rank; mirrors the comparison tables' layout.
void write_summary_csv(const std::string& path, const CompareReport& report);

}  // namespace mtor
