#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "mtor/mt_oslssvr.hpp"
#include "mtor/task_graph.hpp"
#include "mtor/wrls.hpp"

namespace mtor {

/// Multi-task online gradient descent: one weight column per task, updated
/// by the gradient of the instantaneous regularized loss with a decaying
/// rate eta_0 / sqrt(i). Only the observed task's column moves per step; the
/// coupling term still pulls it toward its graph neighbours.
class MogdState {
 public:
  MogdState(std::shared_ptr<const TaskGraph> graph, int input_dim, double eta0);

  /// Returns the pre-update prediction, then applies one gradient step.
  double step(int task, const Eigen::VectorXd& x, double y);
  double predict(int task, const Eigen::VectorXd& x) const;

  const Eigen::MatrixXd& weights() const { return W_; }
  long steps_taken() const { return iter_; }
  const TaskGraph& graph() const { return *graph_; }

 private:
  std::shared_ptr<const TaskGraph> graph_;
  double eta0_;
  Eigen::MatrixXd W_;  // input_dim x tasks
  long iter_ = 0;
};

/// Independent recursive least squares per task: the no-transfer baseline.
/// Each task gets its own weight vector and covariance, initialized to
/// init_scale * I.
class StlWrls {
 public:
  StlWrls(int tasks, int input_dim, double sigma, double init_scale);

  double step(int task, const Eigen::VectorXd& x, double y);
  double predict(int task, const Eigen::VectorXd& x) const;

  int tasks() const { return static_cast<int>(states_.size()); }
  const WrlsState& state(int task) const;

 private:
  std::vector<WrlsState> states_;
};

/// Independent sparse kernel regression per task: each task runs its own
/// single-task dictionary and coefficients (a one-node graph with unit
/// self-weight, so the kernel reduces to the scaled dot product).
class StlOslssvr {
 public:
  StlOslssvr(int tasks, double lambda, double nu, int dictionary_cap = 512);

  double step(int task, const Eigen::VectorXd& x, double y);
  double predict(int task, const Eigen::VectorXd& x) const;

  int tasks() const { return static_cast<int>(states_.size()); }
  const OslssvrState& state(int task) const;

 private:
  std::vector<OslssvrState> states_;
};

}  // namespace mtor
