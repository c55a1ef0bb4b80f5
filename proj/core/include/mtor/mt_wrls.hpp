#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "mtor/task_graph.hpp"
#include "mtor/wrls.hpp"

namespace mtor {

/// One observation of one task.
struct MtSample {
  int task = 0;
  Eigen::VectorXd x;
  double y = 0.0;
};

/// A per-task input viewed in the stacked space: a length d*T vector that is
/// zero outside the task's block.
struct StackedInput {
  int task = 0;
  Eigen::VectorXd x;

  Eigen::VectorXd stacked(int tasks) const;
};

/// Kronecker product helper: lifts a T x T coupling matrix to the stacked
/// space, M (kron) I_d.
Eigen::MatrixXd kron_identity(const Eigen::MatrixXd& M, Eigen::Index d);

/// Multi-task recursive least squares on the stacked space. The single-task
/// recursion runs unchanged over dimension d*T; the task structure enters
/// only through the initialization P(0) = lambda^{-1} A^{-1} (kron) I_d,
/// w(0) = 0. One model per evaluation stream.
class MtWrlsModel {
 public:
  /// Throws InvalidInputError when lambda <= 0 (P(0) undefined) and
  /// CapacityError when d * T exceeds `stacked_cap`.
  MtWrlsModel(std::shared_ptr<const TaskGraph> graph, Eigen::Index d, double sigma,
              Eigen::Index stacked_cap = 2000);

  /// Predict with the task's current block, then run one stacked update.
  /// Returns the pre-update prediction.
  double step(int task, const Eigen::VectorXd& x, double y);

  /// Pre-update prediction only; depends on block `task` of w alone.
  double predict(int task, const Eigen::VectorXd& x) const;

  int tasks() const { return graph_->tasks(); }
  Eigen::Index input_dim() const { return d_; }
  const WrlsState& core() const { return core_; }
  const TaskGraph& graph() const { return *graph_; }

  /// Block t of the stacked parameter vector.
  Eigen::VectorXd task_weights(int task) const;

 private:
  std::shared_ptr<const TaskGraph> graph_;
  Eigen::Index d_;
  WrlsState core_;
};

/// Dense closed-form solution of the graph-regularized problem restricted to
/// the observed samples: {X'X + lambda A (kron) I_d} w = X'y on the stacked
/// design. Test-grade reference.
Eigen::VectorXd mt_batch_oracle(const std::vector<MtSample>& samples, const TaskGraph& graph);

/// Full regularized objective of a sample prefix at stacked parameters w:
/// sum of squared errors plus lambda * w'(A kron I_d)w. Used by the regret
/// diagnostics.
double mt_objective(const std::vector<MtSample>& samples, const TaskGraph& graph,
                    const Eigen::VectorXd& w_stacked);

}  // namespace mtor
