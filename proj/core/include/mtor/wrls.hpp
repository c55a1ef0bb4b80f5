#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

namespace mtor {

/// Weighted recursive least squares state: parameter vector w, inverse
/// correlation matrix P, forgetting factor sigma in (0, 1], step counter n.
/// P is kept symmetric by resymmetrizing after every update. The state is
/// exclusively owned by one evaluation stream; copies are deep.
struct WrlsState {
  Eigen::VectorXd w;
  Eigen::MatrixXd P;
  double sigma = 1.0;
  long n = 0;

  Eigen::Index dim() const { return w.size(); }
};

/// Fresh state with w = w0, P = P0, n = 0. P0 must be symmetric positive
/// definite and sigma in (0, 1]; otherwise InvalidInputError.
WrlsState wrls_init(Eigen::Index dim, const Eigen::MatrixXd& P0, const Eigen::VectorXd& w0,
                    double sigma);

/// One recursive update. Returns the prediction x'w made with the
/// pre-update parameters, then applies gain, a-priori error, parameter and
/// P updates in that order. Throws NumericalBreakdownError when the gain
/// denominator sigma + x'Px is not positive.
double wrls_step(WrlsState& state, const Eigen::VectorXd& x, double y);

/// Same recursion for an input that is zero outside one contiguous block:
/// x has `block` at offset, zeros elsewhere. Only the touched columns of P
/// enter the gain computation, so the matrix-vector work is O(dim * block)
/// while the rank-one P update stays O(dim^2).
double wrls_step_block(WrlsState& state, Eigen::Index offset, const Eigen::VectorXd& block,
                       double y);

/// Dense reference solution of the sigma-weighted regularized problem:
/// w = (sum_i sigma^(n-i) x_i x_i' + sigma^n P0^{-1})^{-1} sum_i sigma^(n-i) y_i x_i.
/// Rows of X are the inputs. Test-grade reference, direct solve.
Eigen::VectorXd wrls_batch_oracle(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                  const Eigen::MatrixXd& P0, double sigma);

/// Snapshot round-trip of (w, P, sigma, n) as JSON.
nlohmann::json wrls_to_json(const WrlsState& state);
WrlsState wrls_from_json(const nlohmann::json& j);

}  // namespace mtor
