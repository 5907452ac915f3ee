#include "vybench/predictors.hpp"

#include <cmath>
#include <stdexcept>

#include "vybench/common.hpp"
#include "vybench/gp.hpp"
#include "vybench/mlp.hpp"
#include "vybench/rng.hpp"
#include "vybench/svm.hpp"

namespace vybench {

Family family_from_string(const std::string& name) {
  if (name == "svm") return Family::svm;
  if (name == "gp") return Family::gp;
  if (name == "mlp") return Family::mlp;
  throw DataError("unknown predictor family '" + name + "'");
}

std::string to_string(Family family) {
  switch (family) {
    case Family::svm: return "svm";
    case Family::gp: return "gp";
    case Family::mlp: return "mlp";
  }
  return "?";
}

std::string to_string(Problem problem) {
  return problem == Problem::classification ? "classification" : "regression";
}

Eigen::MatrixXd rbf_kernel(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                           double gamma) {
  if (A.cols() != B.cols()) {
    throw std::invalid_argument("rbf_kernel: feature dimension mismatch");
  }
  if (gamma <= 0.0) throw std::invalid_argument("rbf_kernel: gamma must be positive");

  const Eigen::VectorXd a_sq = A.rowwise().squaredNorm();
  const Eigen::VectorXd b_sq = B.rowwise().squaredNorm();
  Eigen::MatrixXd dist2 = -2.0 * A * B.transpose();
  dist2.colwise() += a_sq;
  dist2.rowwise() += b_sq.transpose();
  return (-gamma * dist2.cwiseMax(0.0)).array().exp();
}

double default_gamma(const Eigen::MatrixXd& X) {
  const double dim = static_cast<double>(X.cols());
  const double mean = X.mean();
  const double var = (X.array() - mean).square().mean();
  if (var <= 0.0) return 1.0 / dim;
  return 1.0 / (dim * var);
}

namespace {

void require_finite(const Eigen::MatrixXd& X, const char* what) {
  if (!X.allFinite()) throw DataError(std::string(what) + ": non-finite input");
}

double resolve_gamma(const PredictorSpec& spec, const Eigen::MatrixXd& X) {
  // SVM follows the 1/(dim*var) heuristic; GP keeps a unit length-scale.
  const double fallback =
      spec.family == Family::gp ? 0.5 : default_gamma(X);
  return spec.param("gamma", fallback);
}

mlp::TrainOptions mlp_options(const PredictorSpec& spec) {
  mlp::TrainOptions options;
  options.learning_rate = spec.param("learning_rate", 1e-3);
  options.batch_size = static_cast<int>(spec.param("batch_size", 32));
  options.epochs = static_cast<int>(spec.param("epochs", 10));
  return options;
}

mlp::Net build_mlp(const PredictorSpec& spec, int input_dim, bool sigmoid_output,
                   Rng& rng) {
  const int hidden = static_cast<int>(spec.param("hidden_width", 16));
  // "depth 4": four weight layers, i.e. three hidden layers plus the output.
  const int hidden_layers = static_cast<int>(spec.param("hidden_layers", 3));
  return mlp::Net(input_dim, hidden, hidden_layers, sigmoid_output, rng);
}

}  // namespace

TrainedPredictor train_classifier(const PredictorSpec& spec, const Eigen::MatrixXd& X,
                                  std::span<const int> y) {
  if (spec.problem != Problem::classification) {
    throw std::invalid_argument("train_classifier: spec.problem must be classification");
  }
  if (X.rows() < 4) throw DataError("train_classifier: need at least 4 rows");
  if (static_cast<std::size_t>(X.rows()) != y.size()) {
    throw std::invalid_argument("train_classifier: X/y length mismatch");
  }
  require_finite(X, "train_classifier");

  bool has_pos = false, has_neg = false;
  for (const int label : y) {
    if (label != 0 && label != 1) throw DataError("train_classifier: labels must be 0/1");
    (label == 1 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) throw DataError("train_classifier: single-class labels");

  TrainedPredictor trained;
  trained.spec = spec;
  trained.feature_dim = static_cast<int>(X.cols());

  switch (spec.family) {
    case Family::svm: {
      trained.state = svm::train_classifier(X, y, spec.param("C", 1.0),
                                            resolve_gamma(spec, X),
                                            spec.param("tol", 1e-3));
      break;
    }
    case Family::gp: {
      trained.state = gp::train_classifier(X, y, resolve_gamma(spec, X));
      break;
    }
    case Family::mlp: {
      Rng rng(spec.seed);
      mlp::Net net = build_mlp(spec, static_cast<int>(X.cols()), true, rng);
      Eigen::VectorXd target(X.rows());
      for (Eigen::Index i = 0; i < target.size(); ++i) {
        target[i] = y[static_cast<std::size_t>(i)];
      }
      mlp::train(net, X, target, mlp_options(spec), rng);
      trained.state = net.model();
      break;
    }
  }
  return trained;
}

std::pair<std::vector<int>, std::vector<double>> predict(const TrainedPredictor& model,
                                                         const Eigen::MatrixXd& X) {
  if (model.spec.problem != Problem::classification) {
    throw std::invalid_argument("predict: model is not a classifier");
  }
  if (X.rows() > 0 && static_cast<int>(X.cols()) != model.feature_dim) {
    throw std::invalid_argument("predict: feature dimension mismatch");
  }

  Eigen::VectorXd scores;
  double threshold = 0.5;
  if (const auto* svm_model = std::get_if<SvmModel>(&model.state)) {
    scores = svm::decision_values(*svm_model, X);
    threshold = 0.0;
  } else if (const auto* gp_model = std::get_if<GpClassifierModel>(&model.state)) {
    scores = gp::predict_proba(*gp_model, X);
  } else if (const auto* mlp_model = std::get_if<MlpModel>(&model.state)) {
    const mlp::Net net(*mlp_model);
    const Eigen::VectorXd logits = net.forward(X);
    scores.resize(logits.size());
    for (Eigen::Index i = 0; i < logits.size(); ++i) {
      scores[i] = 1.0 / (1.0 + std::exp(-logits[i]));
    }
  } else {
    throw std::invalid_argument("predict: model state is not a classifier");
  }

  std::vector<int> labels(static_cast<std::size_t>(scores.size()));
  std::vector<double> out(static_cast<std::size_t>(scores.size()));
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    out[static_cast<std::size_t>(i)] = scores[i];
    labels[static_cast<std::size_t>(i)] = scores[i] > threshold ? 1 : 0;
  }
  return {std::move(labels), std::move(out)};
}

TrainedPredictor train_regressor(const PredictorSpec& spec, const Eigen::MatrixXd& X,
                                 std::span<const double> y) {
  if (spec.problem != Problem::regression) {
    throw std::invalid_argument("train_regressor: spec.problem must be regression");
  }
  if (X.rows() < 3) throw DataError("train_regressor: need at least 3 rows");
  if (static_cast<std::size_t>(X.rows()) != y.size()) {
    throw std::invalid_argument("train_regressor: X/y length mismatch");
  }
  require_finite(X, "train_regressor");
  for (const double v : y) {
    if (!std::isfinite(v)) throw DataError("train_regressor: non-finite target");
  }

  TrainedPredictor trained;
  trained.spec = spec;
  trained.feature_dim = static_cast<int>(X.cols());

  switch (spec.family) {
    case Family::svm: {
      trained.state = svm::train_regressor(X, y, spec.param("C", 1.0),
                                           resolve_gamma(spec, X),
                                           spec.param("epsilon", 0.1),
                                           spec.param("tol", 1e-3));
      break;
    }
    case Family::gp: {
      trained.state = gp::train_regressor(X, y, resolve_gamma(spec, X),
                                          spec.param("noise", 1e-2));
      break;
    }
    case Family::mlp: {
      Rng rng(spec.seed);
      mlp::Net net = build_mlp(spec, static_cast<int>(X.cols()), false, rng);
      Eigen::VectorXd target(X.rows());
      for (Eigen::Index i = 0; i < target.size(); ++i) {
        target[i] = y[static_cast<std::size_t>(i)];
      }
      mlp::train(net, X, target, mlp_options(spec), rng);
      trained.state = net.model();
      break;
    }
  }
  return trained;
}

std::vector<double> predict_values(const TrainedPredictor& model,
                                   const Eigen::MatrixXd& X) {
  if (model.spec.problem != Problem::regression) {
    throw std::invalid_argument("predict_values: model is not a regressor");
  }
  if (X.rows() > 0 && static_cast<int>(X.cols()) != model.feature_dim) {
    throw std::invalid_argument("predict_values: feature dimension mismatch");
  }

  Eigen::VectorXd values;
  if (const auto* svm_model = std::get_if<SvmModel>(&model.state)) {
    values = svm::decision_values(*svm_model, X);
  } else if (const auto* gp_model = std::get_if<GpRegressorModel>(&model.state)) {
    values = gp::predict_mean(*gp_model, X);
  } else if (const auto* mlp_model = std::get_if<MlpModel>(&model.state)) {
    const mlp::Net net(*mlp_model);
    values = net.forward(X);
  } else {
    throw std::invalid_argument("predict_values: model state is not a regressor");
  }

  return std::vector<double>(values.data(), values.data() + values.size());
}

}  // namespace vybench
