#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace vybench {

enum class Family { svm, gp, mlp };
enum class Problem { classification, regression };

Family family_from_string(const std::string& name);
std::string to_string(Family family);
std::string to_string(Problem problem);

// Hyperparameters not present in the map take the family defaults:
//   svm: C=1, tol=1e-3, epsilon=0.1 (regression), gamma=1/(dim*var(X))
//   gp:  gamma=0.5 (unit length-scale), noise=1e-2 (regression)
//   mlp: hidden=16, depth=4 weight layers, lr=1e-3, batch=32, epochs=10
struct PredictorSpec {
  Family family = Family::svm;
  Problem problem = Problem::classification;
  std::map<std::string, double> hyperparameters;
  std::uint64_t seed = 0;

  double param(const std::string& name, double fallback) const {
    const auto it = hyperparameters.find(name);
    return it == hyperparameters.end() ? fallback : it->second;
  }
};

// Kernel-machine state shared by SVM classification and regression:
// f(x) = sum_i coef[i] * k(x_i, x) + bias.
struct SvmModel {
  Eigen::MatrixXd support_points;
  Eigen::VectorXd coef;
  double bias = 0.0;
  double gamma = 0.0;
  double kkt_violation = 0.0;  // at convergence, for diagnostics/tests
  Eigen::VectorXd alpha;       // raw duals in [0, C], box-checked in tests
  double box_c = 0.0;
};

struct GpClassifierModel {
  Eigen::MatrixXd train_points;
  Eigen::VectorXd grad_at_mode;      // t - pi(f_hat); predictive mean weights
  Eigen::VectorXd w_sqrt;            // sqrt of likelihood curvature at mode
  Eigen::MatrixXd chol_b;            // lower factor of B = I + W^0.5 K W^0.5
  double gamma = 0.0;
  double mode_grad_norm = 0.0;       // objective gradient norm at the mode
};

struct GpRegressorModel {
  Eigen::MatrixXd train_points;
  Eigen::VectorXd weights;  // (K + noise*I)^-1 (y - y_mean)
  double y_mean = 0.0;
  double gamma = 0.0;
};

struct MlpModel {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  bool sigmoid_output = false;
};

struct TrainedPredictor {
  PredictorSpec spec;
  int feature_dim = 0;
  std::variant<SvmModel, GpClassifierModel, GpRegressorModel, MlpModel> state;
};

// K[i][j] = exp(-gamma * ||A_i - B_j||^2).
Eigen::MatrixXd rbf_kernel(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                           double gamma);

// The 1/(dim * var) heuristic; 1/dim when the features are constant.
double default_gamma(const Eigen::MatrixXd& X);

// Binary labels in {0,1}; X rows >= 4 and both classes required.
TrainedPredictor train_classifier(const PredictorSpec& spec, const Eigen::MatrixXd& X,
                                  std::span<const int> y);

// Labels from thresholding scores: 0 for SVM decision values, 0.5 for
// probabilities. Scores are monotone confidences suitable for ROC-AUC.
std::pair<std::vector<int>, std::vector<double>> predict(const TrainedPredictor& model,
                                                         const Eigen::MatrixXd& X);

// X rows >= 3; targets finite (normalized scores in practice).
TrainedPredictor train_regressor(const PredictorSpec& spec, const Eigen::MatrixXd& X,
                                 std::span<const double> y);

// Raw outputs, no clipping; callers may clip to [0,1] for reporting.
std::vector<double> predict_values(const TrainedPredictor& model,
                                   const Eigen::MatrixXd& X);

}  // namespace vybench
