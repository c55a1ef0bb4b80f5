#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mtor/task_graph.hpp"

namespace mtor {

/// Multi-task kernel: K((x,s), (x2,t)) = (x . x2) * A_inv[s, t]. Computed in
/// the original d-dimensional space; the stacked space never materializes.
double mt_kernel_eval(const Eigen::VectorXd& x, int s, const Eigen::VectorXd& x2, int t,
                      const TaskGraph& graph);

/// A retained support input with its task tag.
struct DictAtom {
  Eigen::VectorXd x;
  int task = 0;
};

/// Result of the approximate-linear-dependency test for a candidate input:
/// squared residual of the best reconstruction from the current atoms and
/// the reconstruction coefficients. Residuals inside the estimate's own
/// rounding band are reported as exactly 0, so a numerically representable
/// input can never be mistaken for a novel one.
struct AldResult {
  double delta = 0.0;
  Eigen::VectorXd coeffs;    // a = K_dict_inv * k_vec, empty for an empty dictionary
  Eigen::VectorXd k_vec;     // kernel of each atom against the candidate
  double k_nn = 0.0;         // kernel of the candidate against itself
};

/// Support dictionary: atoms, their kernel matrix and its incrementally
/// maintained inverse, and the ALD sparsity threshold nu. Atoms are admitted
/// only while delta > nu held against the dictionary at insertion time.
class KernelDictionary {
 public:
  KernelDictionary(std::shared_ptr<const TaskGraph> graph, double nu);

  /// ALD test against the current atoms; costs size() + 1 kernel
  /// evaluations. An empty dictionary reports delta = k_nn with no coeffs.
  AldResult ald_test(const Eigen::VectorXd& x, int task) const;

  /// Inserts an atom using quantities from its ald_test. Requires
  /// result.delta > 0 for the inverse extension.
  void admit(const Eigen::VectorXd& x, int task, const AldResult& result);

  int size() const { return static_cast<int>(atoms_.size()); }
  const std::vector<DictAtom>& atoms() const { return atoms_; }
  const Eigen::MatrixXd& kernel_matrix() const { return K_; }
  const Eigen::MatrixXd& kernel_inverse() const { return K_inv_; }
  double nu() const { return nu_; }
  const TaskGraph& graph() const { return *graph_; }
  std::shared_ptr<const TaskGraph> graph_ptr() const { return graph_; }

  /// Kernel evaluations performed by ald_test since construction.
  std::uint64_t kernel_eval_count() const { return kernel_evals_; }

 private:
  std::shared_ptr<const TaskGraph> graph_;
  double nu_;
  std::vector<DictAtom> atoms_;
  Eigen::MatrixXd K_;
  Eigen::MatrixXd K_inv_;
  mutable std::uint64_t kernel_evals_ = 0;
};

/// Online sparse least-squares SVR state on the multi-task kernel. Tracks
/// the stationary point of the dictionary-compressed dual problem: alpha
/// solves (B K + lambda I) alpha = r where B accumulates the reconstruction
/// rows of all samples and r their targets. One state per stream; the graph
/// is shared read-only.
class OslssvrState {
 public:
  /// Requires a symmetric interaction matrix (the kernel must be symmetric)
  /// and lambda > 0, nu >= 0.
  OslssvrState(std::shared_ptr<const TaskGraph> graph, double lambda, double nu,
               int dictionary_cap = 512);

  /// Predict with the pre-update coefficients, then absorb the sample:
  /// admitted atoms extend the dictionary and all recursion matrices by one
  /// row/column, rejected samples enter through their reconstruction
  /// coefficients. Returns the pre-update prediction.
  double step(int task, const Eigen::VectorXd& x, double y);

  /// Dual prediction sum_m alpha_m K(atom_m, (x, task)); 0 for an empty
  /// dictionary. Pure query, does not touch the evaluation counters.
  double predict(int task, const Eigen::VectorXd& x) const;

  const KernelDictionary& dictionary() const { return dict_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  double lambda() const { return lambda_; }
  long samples_seen() const { return samples_seen_; }

  /// Stacked-space weights induced by the representer expansion,
  /// sum_m alpha_m (A_inv kron I_d) stacked(atom_m). Predictions equal
  /// block(task) . x of this vector.
  Eigen::VectorXd effective_stacked_weights() const;

  /// Kernel evaluations performed by step() so far.
  std::uint64_t kernel_eval_count() const { return dict_.kernel_eval_count(); }

  /// Dictionary snapshot (task, alpha, input components) as CSV.
  void export_dictionary_csv(const std::string& path) const;

 private:
  void admit_sample(const Eigen::VectorXd& x, int task, double y, const AldResult& ald);
  void absorb_sample(double y, const AldResult& ald);
  void refresh_alpha();

  KernelDictionary dict_;
  double lambda_;
  int cap_;
  long samples_seen_ = 0;
  long updates_since_polish_ = 0;
  Eigen::MatrixXd B_;      // sum of reconstruction-row outer products
  Eigen::VectorXd r_;      // sum of target-weighted reconstruction rows
  Eigen::MatrixXd M_;      // B K + lambda I
  Eigen::MatrixXd M_inv_;  // maintained incrementally alongside M
  Eigen::VectorXd alpha_;
};

/// Dense stationary point alpha = (K + lambda I)^{-1} y of the dual problem.
/// Test-grade reference; K must be symmetric.
Eigen::VectorXd lssvr_batch_oracle(const Eigen::MatrixXd& K, const Eigen::VectorXd& y,
                                   double lambda);

}  // namespace mtor
