#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mtor/evaluate.hpp"
#include "mtor/similarity.hpp"

namespace mtor {

enum class MethodKind { MtWrls, MtOslssvr, StlWrls, StlOslssvr, Mogd, Persistence };

/// Parses the CLI-facing names: mt-wrls, mt-oslssvr, wrls, oslssvr, mogd,
/// persistence. Unknown names throw InvalidInputError.
MethodKind method_from_name(const std::string& name);
std::string method_name(MethodKind kind);

/// One grid candidate; each method reads only the fields it uses.
struct HyperParams {
  double sigma = 1.0;   // forgetting factor (recursive least squares)
  double lambda = 1.0;  // regularizer weight
  double nu = 1e-2;     // dictionary sparsity threshold
  double eta0 = 0.1;    // gradient base step size
};

/// Per-axis overrides of the built-in search grids; unset axes keep their
/// defaults.
struct GridAxes {
  std::optional<std::vector<double>> sigma;
  std::optional<std::vector<double>> lambda;
  std::optional<std::vector<double>> nu;
  std::optional<std::vector<double>> eta0;
};

/// Search grids, enumerated with the first-listed hyperparameter outermost
/// so "first in grid order" is well-defined:
///   (mt-)wrls:    sigma {0.01,0.2,0.4,0.6,0.8,1.0} x lambda L
///   (mt-)oslssvr: lambda L x nu {1e-3,1e-2,1e-1}
///   mogd:         eta0 {1e-3,1e-2,1e-1,1,10} x lambda L
///   persistence:  a single no-op candidate
/// with L = {1e-10,1e-4,1e-3,1e-2,1e-1,1,1e1,1e2,1e3,1e4,1e10}.
std::vector<HyperParams> build_grid(MethodKind kind, const GridAxes& axes);
std::vector<HyperParams> default_grid(MethodKind kind);

/// Wraps any model exposing step(task, x, y) in the evaluation interface.
template <class Model>
class StepAdapter final : public OnlineRegressor {
 public:
  explicit StepAdapter(Model model) : model_(std::move(model)) {}
  double step(int task, const Eigen::VectorXd& x, double y) override {
    return model_.step(task, x, y);
  }
  Model& model() { return model_; }
  const Model& model() const { return model_; }

 private:
  Model model_;
};

/// Factory for a fresh model of the given kind and candidate. Graph-based
/// methods build their interaction matrix here from (sims, gamma,
/// candidate.lambda); construction errors surface at call time.
ModelFactory make_factory(MethodKind kind, const HyperParams& params,
                          const SimilarityMatrix& sims, double gamma, int input_dim,
                          int dictionary_cap);

struct GridSearchResult {
  HyperParams best;
  double best_rmse = 0.0;
  // Every candidate with its training prequential RMSE; failed candidates
  // carry +inf.
  std::vector<std::pair<HyperParams, double>> scored;
};

/// Exhaustive search over the candidates: each one runs the same prequential
/// protocol on the training rows and is scored by pooled RMSE; the argmin
/// wins, ties resolved to the earliest candidate. Throws
/// NumericalBreakdownError if every candidate fails.
GridSearchResult grid_search(MethodKind kind, const EmbeddedStream& stream,
                             Eigen::Index train_rows, const SimilarityMatrix& sims, double gamma,
                             const std::vector<HyperParams>& candidates, int dictionary_cap);

}  // namespace mtor
