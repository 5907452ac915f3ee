#pragma once

#include <Eigen/Dense>
#include <span>

#include "vybench/predictors.hpp"

namespace vybench::gp {

// Binary Laplace approximation with a logistic link. Newton iterations on
// the mode use the B = I + W^0.5 K W^0.5 factorization; converges when the
// posterior objective gradient norm drops to 1e-6 (50 iterations cap).
GpClassifierModel train_classifier(const Eigen::MatrixXd& X, std::span<const int> y,
                                   double gamma);

// Class-1 probabilities by 20-point Gauss-Hermite averaging of the sigmoid
// over the latent predictive Gaussian.
Eigen::VectorXd predict_proba(const GpClassifierModel& model, const Eigen::MatrixXd& X);

// Exact GP regression on mean-centered targets, Cholesky of K + noise*I with
// jitter escalation 1e-10 -> 1e-6 when the factorization fails.
GpRegressorModel train_regressor(const Eigen::MatrixXd& X, std::span<const double> y,
                                 double gamma, double noise);

Eigen::VectorXd predict_mean(const GpRegressorModel& model, const Eigen::MatrixXd& X);

}  // namespace vybench::gp
