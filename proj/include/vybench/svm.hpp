#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>

#include "vybench/predictors.hpp"

namespace vybench::svm {

// Solution of min 1/2 a'Qa + p'a  s.t.  y'a = 0, 0 <= a <= C, by sequential
// minimal optimization over maximal-violating pairs. After the loop the free
// variables are re-solved exactly from the KKT system, which makes the
// result independent of training-row order.
struct SmoResult {
  Eigen::VectorXd alpha;
  double bias = 0.0;           // the equality multiplier, recovered from KKT
  double kkt_violation = 0.0;  // m(a) - M(a) at exit
  std::int64_t iterations = 0;
};

SmoResult smo_solve(const Eigen::MatrixXd& Q, const Eigen::VectorXd& p,
                    const Eigen::VectorXi& y, double C, double tol,
                    std::int64_t max_iterations);

// C-SVC with RBF kernel. Labels in {0,1}.
SvmModel train_classifier(const Eigen::MatrixXd& X, std::span<const int> y, double C,
                          double gamma, double tol);

// epsilon-SVR through the doubled-variable formulation.
SvmModel train_regressor(const Eigen::MatrixXd& X, std::span<const double> y, double C,
                         double gamma, double epsilon, double tol);

// Decision values / regression outputs f(x) = sum coef_i k(x_i, x) + bias.
Eigen::VectorXd decision_values(const SvmModel& model, const Eigen::MatrixXd& X);

}  // namespace vybench::svm
