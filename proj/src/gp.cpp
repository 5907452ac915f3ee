#include "vybench/gp.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

#include "vybench/common.hpp"

namespace vybench::gp {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Gauss-Hermite nodes/weights by Golub-Welsch on the Jacobi matrix.
struct GaussHermite {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

const GaussHermite& gauss_hermite_20() {
  static const GaussHermite gh = [] {
    constexpr int n = 20;
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
      const double off = std::sqrt(k / 2.0);
      jacobi(k - 1, k) = off;
      jacobi(k, k - 1) = off;
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    GaussHermite out;
    out.nodes = solver.eigenvalues();
    out.weights.resize(n);
    const double sqrt_pi = std::sqrt(3.14159265358979323846);
    for (int k = 0; k < n; ++k) {
      const double first = solver.eigenvectors()(0, k);
      out.weights[k] = sqrt_pi * first * first;
    }
    return out;
  }();
  return gh;
}

// Cholesky with escalating diagonal jitter.
Eigen::LLT<Eigen::MatrixXd> chol_with_jitter(Eigen::MatrixXd m, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) return llt;
  for (double jitter = 1e-10; jitter <= 1e-6 + 1e-18; jitter *= 10.0) {
    Eigen::MatrixXd jittered = m;
    jittered.diagonal().array() += jitter;
    llt.compute(jittered);
    if (llt.info() == Eigen::Success) return llt;
  }
  throw DataError(std::string(what) + ": kernel matrix not positive definite");
}

}  // namespace

GpClassifierModel train_classifier(const Eigen::MatrixXd& X, std::span<const int> y,
                                   double gamma) {
  const int n = static_cast<int>(X.rows());
  Eigen::VectorXd target(n);
  for (int i = 0; i < n; ++i) target[i] = y[static_cast<std::size_t>(i)];

  const Eigen::MatrixXd K = rbf_kernel(X, X, gamma);

  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd pi(n), w_sqrt(n), grad(n);
  Eigen::MatrixXd chol_l;
  double grad_norm = 0.0;

  for (int iter = 0; iter < 50; ++iter) {
    for (int i = 0; i < n; ++i) {
      pi[i] = sigmoid(f[i]);
      grad[i] = target[i] - pi[i];
      w_sqrt[i] = std::sqrt(std::max(pi[i] * (1.0 - pi[i]), 0.0));
    }

    // Newton step via B = I + W^0.5 K W^0.5 (stable for tiny W).
    Eigen::MatrixXd b_mat = w_sqrt.asDiagonal() * K * w_sqrt.asDiagonal();
    b_mat.diagonal().array() += 1.0;
    const Eigen::LLT<Eigen::MatrixXd> llt = chol_with_jitter(std::move(b_mat), "gp classifier");
    chol_l = llt.matrixL();

    const Eigen::VectorXd w = w_sqrt.array().square();
    const Eigen::VectorXd b_vec = w.cwiseProduct(f) + grad;
    const Eigen::VectorXd inner = llt.solve(w_sqrt.cwiseProduct(K * b_vec));
    a = b_vec - w_sqrt.cwiseProduct(inner);
    f = K * a;

    // Objective gradient at the new iterate; K^-1 f equals a by construction.
    Eigen::VectorXd new_grad(n);
    for (int i = 0; i < n; ++i) new_grad[i] = target[i] - sigmoid(f[i]);
    grad_norm = (new_grad - a).norm();
    if (grad_norm <= 1e-6) break;
  }

  GpClassifierModel model;
  model.train_points = X;
  for (int i = 0; i < n; ++i) {
    pi[i] = sigmoid(f[i]);
    w_sqrt[i] = std::sqrt(std::max(pi[i] * (1.0 - pi[i]), 0.0));
  }
  model.grad_at_mode = target - pi;
  model.w_sqrt = w_sqrt;
  Eigen::MatrixXd b_mat = w_sqrt.asDiagonal() * K * w_sqrt.asDiagonal();
  b_mat.diagonal().array() += 1.0;
  model.chol_b = chol_with_jitter(std::move(b_mat), "gp classifier").matrixL();
  model.gamma = gamma;
  model.mode_grad_norm = grad_norm;
  return model;
}

Eigen::VectorXd predict_proba(const GpClassifierModel& model, const Eigen::MatrixXd& X) {
  const int m = static_cast<int>(X.rows());
  if (m == 0) return Eigen::VectorXd();

  const Eigen::MatrixXd k_star = rbf_kernel(model.train_points, X, model.gamma);
  const Eigen::VectorXd mean = k_star.transpose() * model.grad_at_mode;

  // v = L^-1 (W^0.5 k*), latent variance 1 - v'v.
  const Eigen::MatrixXd v = model.chol_b.triangularView<Eigen::Lower>().solve(
      model.w_sqrt.asDiagonal() * k_star);

  const auto& gh = gauss_hermite_20();
  const double inv_sqrt_pi = 1.0 / std::sqrt(3.14159265358979323846);

  Eigen::VectorXd probs(m);
  for (int j = 0; j < m; ++j) {
    const double var = std::max(1.0 - v.col(j).squaredNorm(), 0.0);
    const double sd = std::sqrt(var);
    double acc = 0.0;
    for (int q = 0; q < gh.nodes.size(); ++q) {
      acc += gh.weights[q] * sigmoid(std::sqrt(2.0) * sd * gh.nodes[q] + mean[j]);
    }
    probs[j] = inv_sqrt_pi * acc;
  }
  return probs;
}

GpRegressorModel train_regressor(const Eigen::MatrixXd& X, std::span<const double> y,
                                 double gamma, double noise) {
  const int n = static_cast<int>(X.rows());
  Eigen::VectorXd target(n);
  for (int i = 0; i < n; ++i) target[i] = y[static_cast<std::size_t>(i)];

  GpRegressorModel model;
  model.train_points = X;
  model.y_mean = target.mean();
  model.gamma = gamma;

  Eigen::MatrixXd K = rbf_kernel(X, X, gamma);
  K.diagonal().array() += noise;
  const Eigen::LLT<Eigen::MatrixXd> llt = chol_with_jitter(std::move(K), "gp regressor");
  model.weights = llt.solve((target.array() - model.y_mean).matrix());
  return model;
}

Eigen::VectorXd predict_mean(const GpRegressorModel& model, const Eigen::MatrixXd& X) {
  if (X.rows() == 0) return Eigen::VectorXd();
  const Eigen::MatrixXd k_star = rbf_kernel(X, model.train_points, model.gamma);
  return (k_star * model.weights).array() + model.y_mean;
}

}  // namespace vybench::gp
