#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "mtor/dataset.hpp"
#include "mtor/feature_maps.hpp"
#include "mtor/similarity.hpp"

namespace mtor {

/// Sequential train/test split: the first floor(mu * n) samples train, the
/// rest test, no shuffling.
struct SplitSpec {
  double mu = 0.275;

  /// (train, test) counts for n samples. Throws if the test side would be
  /// empty.
  std::pair<Eigen::Index, Eigen::Index> counts(Eigen::Index n) const;
};

/// Predict-then-train step interface every online method implements. step()
/// must return the prediction computed before the target is used.
class OnlineRegressor {
 public:
  virtual ~OnlineRegressor() = default;
  virtual double step(int task, const Eigen::VectorXd& x, double y) = 0;
};

using ModelFactory = std::function<std::unique_ptr<OnlineRegressor>()>;

/// Target-preserving baseline in differenced space: predicting zero change
/// reproduces the previous raw value.
class PersistenceModel : public OnlineRegressor {
 public:
  double step(int, const Eigen::VectorXd&, double) override { return 0.0; }
};

/// Embedded multi-task stream: per-task design rows and targets with one
/// shared row count. Samples are replayed row-major with tasks interleaved
/// round-robin within each row.
struct EmbeddedStream {
  std::vector<Eigen::MatrixXd> X;
  std::vector<Eigen::VectorXd> y;

  int tasks() const { return static_cast<int>(X.size()); }
  Eigen::Index rows() const { return X.empty() ? 0 : X.front().rows(); }
  int dim() const { return X.empty() ? 0 : static_cast<int>(X.front().cols()); }
};

/// Knobs of the shared preprocessing pipeline (differencing is always on:
/// models, metrics, and similarities all live in differenced space).
struct PipelineConfig {
  int lag = 9;
  double mu = 0.275;
  double gamma = 1.0;           // interaction-matrix shrinkage
  bool use_elm = false;
  int elm_hidden = 20;
  std::uint64_t elm_seed = 1;
  bool standardize = false;     // optional, fitted on training rows only
  bool sims_on_raw = false;     // similarities default to the differenced series
};

/// Everything a method run needs: the embedded stream, the split row counts,
/// and similarities estimated from the training prefix only.
struct PreparedExperiment {
  EmbeddedStream stream;
  Eigen::Index train_rows = 0;
  Eigen::Index test_rows = 0;
  SimilarityMatrix sims = SimilarityMatrix::edgeless(1);
  std::optional<ElmMap> elm;
  PipelineConfig config;
};

/// difference -> ar_embed -> (optional ELM map) -> split; similarities come
/// from the training prefix of each task's series (differenced by default).
PreparedExperiment prepare_experiment(const MultiTaskDataset& dataset,
                                      const PipelineConfig& config);

/// Prequential pass over stream rows [begin_row, end_row): a fresh model
/// from the factory predicts each sample before training on it. Model
/// errors propagate with the stream position appended.
struct OnlineEvalResult {
  std::vector<Eigen::VectorXd> actual;     // per task over the row range
  std::vector<Eigen::VectorXd> predicted;  // per task
  double pooled_rmse = 0.0;                // all tasks pooled
  double seconds = 0.0;
};
OnlineEvalResult evaluate_online(const EmbeddedStream& stream, Eigen::Index begin_row,
                                 Eigen::Index end_row, const ModelFactory& factory);

/// Error metrics of one task's predictions against the persistence
/// baseline's on the same targets.
struct Metrics {
  double rmse = 0.0;
  double mae = 0.0;
  double relrmse = 0.0;  // rmse / persistence rmse
  double relmae = 0.0;   // mae / persistence mae
};
Metrics metrics(const Eigen::VectorXd& predictions, const Eigen::VectorXd& actuals,
                const Eigen::VectorXd& persistence_preds);

/// Cumulative and per-step-averaged difference between a method's running
/// losses and the per-prefix oracle losses.
struct RegretCurve {
  Eigen::VectorXd cumulative;
  Eigen::VectorXd averaged;  // cumulative(n) / (n + 1)
};
RegretCurve regret_curve(const Eigen::VectorXd& step_losses,
                         const Eigen::VectorXd& oracle_losses);

}  // namespace mtor
