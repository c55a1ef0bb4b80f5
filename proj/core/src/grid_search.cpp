#include "mtor/grid_search.hpp"

#include <cmath>
#include <limits>

#include "mtor/contenders.hpp"
#include "mtor/errors.hpp"
#include "mtor/mt_oslssvr.hpp"
#include "mtor/mt_wrls.hpp"
#include "mtor/task_graph.hpp"

namespace mtor {

namespace {

const std::vector<double> kSigmaGrid = {0.01, 0.2, 0.4, 0.6, 0.8, 1.0};
const std::vector<double> kLambdaGrid = {1e-10, 1e-4, 1e-3, 1e-2, 1e-1, 1.0,
                                         1e1,   1e2,  1e3,  1e4,  1e10};
const std::vector<double> kNuGrid = {1e-3, 1e-2, 1e-1};
const std::vector<double> kEtaGrid = {1e-3, 1e-2, 1e-1, 1.0, 10.0};

}  // namespace

MethodKind method_from_name(const std::string& name) {
  if (name == "mt-wrls") return MethodKind::MtWrls;
  if (name == "mt-oslssvr") return MethodKind::MtOslssvr;
  if (name == "wrls") return MethodKind::StlWrls;
  if (name == "oslssvr") return MethodKind::StlOslssvr;
  if (name == "mogd") return MethodKind::Mogd;
  if (name == "persistence") return MethodKind::Persistence;
  throw InvalidInputError(
      "unknown method '" + name +
      "' (expected mt-wrls, mt-oslssvr, wrls, oslssvr, mogd, or persistence)");
}

std::string method_name(MethodKind kind) {
  switch (kind) {
    case MethodKind::MtWrls: return "mt-wrls";
    case MethodKind::MtOslssvr: return "mt-oslssvr";
    case MethodKind::StlWrls: return "wrls";
    case MethodKind::StlOslssvr: return "oslssvr";
    case MethodKind::Mogd: return "mogd";
    case MethodKind::Persistence: return "persistence";
  }
  throw InvalidInputError("unhandled method kind");
}

std::vector<HyperParams> build_grid(MethodKind kind, const GridAxes& axes) {
  const std::vector<double>& sigmas = axes.sigma.value_or(kSigmaGrid);
  const std::vector<double>& lambdas = axes.lambda.value_or(kLambdaGrid);
  const std::vector<double>& nus = axes.nu.value_or(kNuGrid);
  const std::vector<double>& etas = axes.eta0.value_or(kEtaGrid);
  std::vector<HyperParams> grid;
  switch (kind) {
    case MethodKind::MtWrls:
    case MethodKind::StlWrls:
      for (double sigma : sigmas) {
        for (double lambda : lambdas) {
          HyperParams p;
          p.sigma = sigma;
          p.lambda = lambda;
          grid.push_back(p);
        }
      }
      break;
    case MethodKind::MtOslssvr:
    case MethodKind::StlOslssvr:
      for (double lambda : lambdas) {
        for (double nu : nus) {
          HyperParams p;
          p.lambda = lambda;
          p.nu = nu;
          grid.push_back(p);
        }
      }
      break;
    case MethodKind::Mogd:
      for (double eta0 : etas) {
        for (double lambda : lambdas) {
          HyperParams p;
          p.eta0 = eta0;
          p.lambda = lambda;
          grid.push_back(p);
        }
      }
      break;
    case MethodKind::Persistence:
      grid.emplace_back();
      break;
  }
  if (grid.empty()) {
    throw InvalidInputError("grid for " + method_name(kind) + " is empty");
  }
  return grid;
}

std::vector<HyperParams> default_grid(MethodKind kind) { return build_grid(kind, GridAxes{}); }

ModelFactory make_factory(MethodKind kind, const HyperParams& params,
                          const SimilarityMatrix& sims, double gamma, int input_dim,
                          int dictionary_cap) {
  const int tasks = sims.tasks();
  switch (kind) {
    case MethodKind::MtWrls: {
      auto graph = std::make_shared<const TaskGraph>(sims, gamma, params.lambda);
      const double sigma = params.sigma;
      return [graph, input_dim, sigma]() -> std::unique_ptr<OnlineRegressor> {
        return std::make_unique<StepAdapter<MtWrlsModel>>(MtWrlsModel(graph, input_dim, sigma));
      };
    }
    case MethodKind::MtOslssvr: {
      auto graph = std::make_shared<const TaskGraph>(sims, gamma, params.lambda);
      const double lambda = params.lambda;
      const double nu = params.nu;
      return [graph, lambda, nu, dictionary_cap]() -> std::unique_ptr<OnlineRegressor> {
        return std::make_unique<StepAdapter<OslssvrState>>(
            OslssvrState(graph, lambda, nu, dictionary_cap));
      };
    }
    case MethodKind::StlWrls: {
      // Edgeless-graph equivalent: A = gamma I, so the per-task prior
      // covariance is (lambda * gamma)^{-1} I.
      if (!(params.lambda > 0.0) || !(gamma > 0.0)) {
        throw InvalidInputError("single-task least squares needs lambda > 0 and gamma > 0");
      }
      const double init_scale = 1.0 / (params.lambda * gamma);
      const double sigma = params.sigma;
      return [tasks, input_dim, sigma, init_scale]() -> std::unique_ptr<OnlineRegressor> {
        return std::make_unique<StepAdapter<StlWrls>>(
            StlWrls(tasks, input_dim, sigma, init_scale));
      };
    }
    case MethodKind::StlOslssvr: {
      const double lambda = params.lambda;
      const double nu = params.nu;
      return [tasks, lambda, nu, dictionary_cap]() -> std::unique_ptr<OnlineRegressor> {
        return std::make_unique<StepAdapter<StlOslssvr>>(
            StlOslssvr(tasks, lambda, nu, dictionary_cap));
      };
    }
    case MethodKind::Mogd: {
      auto graph = std::make_shared<const TaskGraph>(sims, gamma, params.lambda);
      const double eta0 = params.eta0;
      return [graph, input_dim, eta0]() -> std::unique_ptr<OnlineRegressor> {
        return std::make_unique<StepAdapter<MogdState>>(MogdState(graph, input_dim, eta0));
      };
    }
    case MethodKind::Persistence:
      return []() -> std::unique_ptr<OnlineRegressor> {
        return std::make_unique<PersistenceModel>();
      };
  }
  throw InvalidInputError("unhandled method kind");
}

GridSearchResult grid_search(MethodKind kind, const EmbeddedStream& stream,
                             Eigen::Index train_rows, const SimilarityMatrix& sims, double gamma,
                             const std::vector<HyperParams>& candidates, int dictionary_cap) {
  if (candidates.empty()) {
    throw InvalidInputError("grid search needs at least one candidate");
  }
  GridSearchResult result;
  result.scored.reserve(candidates.size());
  constexpr double kFailed = std::numeric_limits<double>::infinity();
  std::string first_error;
  int best_index = -1;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    double score = kFailed;
    try {
      const ModelFactory factory =
          make_factory(kind, candidates[c], sims, gamma, stream.dim(), dictionary_cap);
      score = evaluate_online(stream, 0, train_rows, factory).pooled_rmse;
      if (!std::isfinite(score)) {
        score = kFailed;
      }
    } catch (const std::exception& e) {
      if (first_error.empty()) {
        first_error = e.what();
      }
    }
    result.scored.emplace_back(candidates[c], score);
    if (score != kFailed && (best_index < 0 || score < result.best_rmse)) {
      best_index = static_cast<int>(c);
      result.best_rmse = score;
    }
  }
  if (best_index < 0) {
    throw NumericalBreakdownError("all " + std::to_string(candidates.size()) +
                                  " grid candidates failed; first error: " + first_error);
  }
  result.best = candidates[static_cast<std::size_t>(best_index)];
  return result;
}

}  // namespace mtor
