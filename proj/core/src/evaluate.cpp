#include "mtor/evaluate.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "mtor/errors.hpp"

namespace mtor {

std::pair<Eigen::Index, Eigen::Index> SplitSpec::counts(Eigen::Index n) const {
  if (!(mu > 0.0 && mu < 1.0)) {
    throw InvalidInputError("split fraction mu must lie in (0, 1), got " + std::to_string(mu));
  }
  if (n < 1) {
    throw InvalidInputError("cannot split an empty sample set");
  }
  const auto train = static_cast<Eigen::Index>(std::floor(mu * static_cast<double>(n)));
  const Eigen::Index test = n - train;
  if (test < 1) {
    throw InvalidInputError("split leaves an empty test segment (n=" + std::to_string(n) +
                            ", mu=" + std::to_string(mu) + ")");
  }
  return {train, test};
}

PreparedExperiment prepare_experiment(const MultiTaskDataset& dataset,
                                      const PipelineConfig& config) {
  if (dataset.tasks() < 1) {
    throw InvalidInputError("dataset has no tasks");
  }
  const Eigen::Index raw_len = dataset.length();
  for (const auto& s : dataset.series) {
    if (s.size() != raw_len) {
      throw InvalidInputError("task series have unequal lengths");
    }
  }

  PreparedExperiment prep;
  prep.config = config;

  std::vector<Eigen::VectorXd> diffs;
  diffs.reserve(dataset.tasks());
  for (const auto& s : dataset.series) {
    diffs.push_back(difference(s));
  }

  std::optional<ElmMap> elm;
  for (int t = 0; t < dataset.tasks(); ++t) {
    ArEmbedding emb = ar_embed(diffs[t], config.lag);
    if (config.use_elm) {
      if (!elm) {
        elm.emplace(static_cast<int>(emb.X.cols()), config.elm_hidden, config.elm_seed);
      }
      emb.X = elm->map_rows(emb.X);
    }
    prep.stream.X.push_back(std::move(emb.X));
    prep.stream.y.push_back(std::move(emb.y));
  }
  prep.elm = std::move(elm);

  const SplitSpec split{config.mu};
  const auto [train, test] = split.counts(prep.stream.rows());
  if (train < 1) {
    throw InvalidInputError("training segment is empty after embedding (rows=" +
                            std::to_string(prep.stream.rows()) +
                            ", mu=" + std::to_string(config.mu) +
                            "); need more data or a larger mu");
  }
  prep.train_rows = train;
  prep.test_rows = test;

  if (config.standardize) {
    if (train < 2) {
      throw InvalidInputError("standardization needs at least 2 training rows");
    }
    Eigen::MatrixXd train_rows_all(train * dataset.tasks(), prep.stream.dim());
    for (int t = 0; t < dataset.tasks(); ++t) {
      train_rows_all.middleRows(t * train, train) = prep.stream.X[t].topRows(train);
    }
    Standardizer std_;
    std_.fit(train_rows_all);
    for (auto& X : prep.stream.X) {
      X = std_.transform(X);
    }
  }

  // Similarities must not peek past the training boundary: embedded training
  // row (train - 1) reaches differenced index lag + train - 1, so the
  // estimation prefix stops there.
  const Eigen::Index sim_len = config.lag + train;
  std::vector<Eigen::VectorXd> sim_basis;
  sim_basis.reserve(dataset.tasks());
  for (int t = 0; t < dataset.tasks(); ++t) {
    if (config.sims_on_raw) {
      sim_basis.push_back(dataset.series[t].head(std::min<Eigen::Index>(sim_len + 1, raw_len)));
    } else {
      sim_basis.push_back(diffs[t].head(sim_len));
    }
  }
  prep.sims = dataset.tasks() > 1 ? SimilarityMatrix::from_series(sim_basis)
                                  : SimilarityMatrix::edgeless(1);
  return prep;
}

OnlineEvalResult evaluate_online(const EmbeddedStream& stream, Eigen::Index begin_row,
                                 Eigen::Index end_row, const ModelFactory& factory) {
  if (begin_row < 0 || end_row > stream.rows() || begin_row >= end_row) {
    throw InvalidInputError("bad stream row range [" + std::to_string(begin_row) + ", " +
                            std::to_string(end_row) + ") for " + std::to_string(stream.rows()) +
                            " rows");
  }
  const int T = stream.tasks();
  const Eigen::Index rows = end_row - begin_row;
  OnlineEvalResult result;
  result.actual.assign(T, Eigen::VectorXd(rows));
  result.predicted.assign(T, Eigen::VectorXd(rows));

  const auto t0 = std::chrono::steady_clock::now();
  std::unique_ptr<OnlineRegressor> model = factory();
  double sq_sum = 0.0;
  for (Eigen::Index i = begin_row; i < end_row; ++i) {
    for (int t = 0; t < T; ++t) {
      const double y = stream.y[t](i);
      double prediction = 0.0;
      try {
        prediction = model->step(t, stream.X[t].row(i).transpose(), y);
      } catch (const NumericalBreakdownError& e) {
        throw NumericalBreakdownError(std::string(e.what()) + " [stream row " +
                                      std::to_string(i) + ", task " + std::to_string(t) + "]");
      } catch (const CapacityError& e) {
        throw CapacityError(std::string(e.what()) + " [stream row " + std::to_string(i) +
                            ", task " + std::to_string(t) + "]");
      } catch (const SingularMatrixError& e) {
        throw SingularMatrixError(std::string(e.what()) + " [stream row " + std::to_string(i) +
                                  ", task " + std::to_string(t) + "]");
      }
      result.actual[t](i - begin_row) = y;
      result.predicted[t](i - begin_row) = prediction;
      sq_sum += (prediction - y) * (prediction - y);
    }
  }
  result.pooled_rmse = std::sqrt(sq_sum / static_cast<double>(rows * T));
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

Metrics metrics(const Eigen::VectorXd& predictions, const Eigen::VectorXd& actuals,
                const Eigen::VectorXd& persistence_preds) {
  const Eigen::Index n = actuals.size();
  if (n < 1 || predictions.size() != n || persistence_preds.size() != n) {
    throw InvalidInputError("metrics need equal-length non-empty prediction/actual vectors");
  }
  Metrics m;
  const Eigen::ArrayXd err = (predictions - actuals).array();
  const Eigen::ArrayXd base_err = (persistence_preds - actuals).array();
  m.rmse = std::sqrt(err.square().mean());
  m.mae = err.abs().mean();
  const double base_rmse = std::sqrt(base_err.square().mean());
  const double base_mae = base_err.abs().mean();
  if (base_rmse <= 0.0 || base_mae <= 0.0) {
    throw DivisionByZeroError(
        "persistence baseline has zero error (constant series); relative metrics undefined");
  }
  m.relrmse = m.rmse / base_rmse;
  m.relmae = m.mae / base_mae;
  return m;
}

RegretCurve regret_curve(const Eigen::VectorXd& step_losses,
                         const Eigen::VectorXd& oracle_losses) {
  if (step_losses.size() != oracle_losses.size()) {
    throw InvalidInputError("regret needs equal-length loss streams");
  }
  RegretCurve out;
  out.cumulative.resize(step_losses.size());
  out.averaged.resize(step_losses.size());
  double running = 0.0;
  for (Eigen::Index i = 0; i < step_losses.size(); ++i) {
    running += step_losses(i) - oracle_losses(i);
    out.cumulative(i) = running;
    out.averaged(i) = running / static_cast<double>(i + 1);
  }
  return out;
}

}  // namespace mtor
