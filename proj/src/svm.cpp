#include "vybench/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "vybench/common.hpp"

namespace vybench::svm {

namespace {

constexpr double kCurvatureFloor = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Largest feasible unclipped step range for the pair update
// a_i += y_i * t, a_j -= y_j * t.
std::pair<double, double> step_bounds(double ai, double aj, int yi, int yj, double C) {
  double lo = -kInf, hi = kInf;
  if (yi > 0) {
    lo = std::max(lo, -ai);
    hi = std::min(hi, C - ai);
  } else {
    lo = std::max(lo, ai - C);
    hi = std::min(hi, ai);
  }
  if (yj > 0) {
    lo = std::max(lo, aj - C);
    hi = std::min(hi, aj);
  } else {
    lo = std::max(lo, -aj);
    hi = std::min(hi, C - aj);
  }
  return {lo, hi};
}

// Exact equality-constrained solve over the free variables. Returns false
// when the refit is unusable (singular system or bound violations), in which
// case the caller keeps the SMO iterate.
bool polish_free_set(const Eigen::MatrixXd& Q, const Eigen::VectorXd& p,
                     const Eigen::VectorXi& y, double C, Eigen::VectorXd& alpha,
                     double& bias) {
  const int n = static_cast<int>(alpha.size());
  const double eta = 1e-8 * C;

  std::vector<int> free_set;
  for (int i = 0; i < n; ++i) {
    if (alpha[i] > eta && alpha[i] < C - eta) free_set.push_back(i);
  }

  for (int attempt = 0; attempt < n && !free_set.empty(); ++attempt) {
    const int m = static_cast<int>(free_set.size());
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + 1, m + 1);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);

    // Bound contribution: variables outside the free set stay at 0 or C.
    Eigen::VectorXd alpha_bound = alpha;
    for (const int i : free_set) alpha_bound[i] = 0.0;
    for (int i = 0; i < n; ++i) {
      alpha_bound[i] = (alpha_bound[i] > C / 2) ? C : 0.0;
    }
    for (const int i : free_set) alpha_bound[i] = 0.0;

    const Eigen::VectorXd q_bound = Q * alpha_bound;
    double y_bound = 0.0;
    for (int i = 0; i < n; ++i) y_bound += y[i] * alpha_bound[i];

    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < m; ++c) kkt(r, c) = Q(free_set[r], free_set[c]);
      kkt(r, m) = y[free_set[r]];
      kkt(m, r) = y[free_set[r]];
      rhs[r] = -p[free_set[r]] - q_bound[free_set[r]];
    }
    rhs[m] = -y_bound;

    const Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (!lu.isInvertible()) return false;
    const Eigen::VectorXd sol = lu.solve(rhs);

    // Move offenders to their nearest bound and retry.
    std::vector<int> keep;
    bool feasible = true;
    for (int r = 0; r < m; ++r) {
      const double v = sol[r];
      if (v < -1e-9 || v > C + 1e-9) {
        feasible = false;
        alpha[free_set[r]] = (v < C / 2) ? 0.0 : C;
      } else {
        keep.push_back(free_set[r]);
      }
    }
    if (feasible) {
      for (int r = 0; r < m; ++r) {
        alpha[free_set[r]] = std::clamp(sol[r], 0.0, C);
      }
      bias = sol[m];
      return true;
    }
    free_set = std::move(keep);
  }
  return false;
}

double max_kkt_violation(const Eigen::MatrixXd& Q, const Eigen::VectorXd& p,
                         const Eigen::VectorXi& y, double C,
                         const Eigen::VectorXd& alpha, double* bias_out) {
  const int n = static_cast<int>(alpha.size());
  const Eigen::VectorXd grad = Q * alpha + p;
  double up = -kInf, low = kInf;
  double free_sum = 0.0;
  int free_count = 0;
  for (int t = 0; t < n; ++t) {
    const double v = -y[t] * grad[t];
    const bool can_up = (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0);
    const bool can_low = (y[t] < 0 && alpha[t] < C) || (y[t] > 0 && alpha[t] > 0);
    if (can_up) up = std::max(up, v);
    if (can_low) low = std::min(low, v);
    if (alpha[t] > 0.0 && alpha[t] < C) {
      free_sum += v;
      ++free_count;
    }
  }
  if (bias_out != nullptr) {
    if (free_count > 0) {
      *bias_out = free_sum / free_count;
    } else {
      *bias_out = 0.5 * (up + low);
    }
  }
  return up - low;
}

}  // namespace

SmoResult smo_solve(const Eigen::MatrixXd& Q, const Eigen::VectorXd& p,
                    const Eigen::VectorXi& y, double C, double tol,
                    std::int64_t max_iterations) {
  const int n = static_cast<int>(p.size());
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd grad = p;  // Q*0 + p

  SmoResult result;
  for (result.iterations = 0; result.iterations < max_iterations; ++result.iterations) {
    // Maximal violating pair.
    int i = -1, j = -1;
    double up = -kInf, low = kInf;
    for (int t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      const bool can_up = (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0);
      const bool can_low = (y[t] < 0 && alpha[t] < C) || (y[t] > 0 && alpha[t] > 0);
      if (can_up && v > up) {
        up = v;
        i = t;
      }
      if (can_low && v < low) {
        low = v;
        j = t;
      }
    }
    if (i < 0 || j < 0 || up - low <= tol) break;

    const double curvature =
        std::max(Q(i, i) + Q(j, j) - 2.0 * y[i] * y[j] * Q(i, j), kCurvatureFloor);
    double step = (up - low) / curvature;
    const auto [lo, hi] = step_bounds(alpha[i], alpha[j], y[i], y[j], C);
    step = std::clamp(step, lo, hi);
    if (step == 0.0) break;

    alpha[i] += y[i] * step;
    alpha[j] -= y[j] * step;
    grad += step * (y[i] * Q.col(i) - y[j] * Q.col(j));
  }

  double bias = 0.0;
  double violation = max_kkt_violation(Q, p, y, C, alpha, &bias);

  Eigen::VectorXd polished = alpha;
  double polished_bias = bias;
  if (polish_free_set(Q, p, y, C, polished, polished_bias)) {
    const double polished_violation =
        max_kkt_violation(Q, p, y, C, polished, nullptr);
    if (polished_violation <= violation + tol) {
      alpha = std::move(polished);
      bias = polished_bias;
      violation = polished_violation;
    }
  }

  result.alpha = std::move(alpha);
  result.bias = bias;
  result.kkt_violation = violation;
  return result;
}

SvmModel train_classifier(const Eigen::MatrixXd& X, std::span<const int> y, double C,
                          double gamma, double tol) {
  const int n = static_cast<int>(X.rows());
  Eigen::VectorXi sign(n);
  for (int i = 0; i < n; ++i) sign[i] = (y[static_cast<std::size_t>(i)] == 1) ? 1 : -1;

  const Eigen::MatrixXd K = rbf_kernel(X, X, gamma);
  Eigen::MatrixXd Q(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Q(i, j) = sign[i] * sign[j] * K(i, j);
    }
  }
  const Eigen::VectorXd p = Eigen::VectorXd::Constant(n, -1.0);

  const SmoResult sol = smo_solve(Q, p, sign, C, tol, 100LL * n);

  SvmModel model;
  model.support_points = X;
  model.coef.resize(n);
  for (int i = 0; i < n; ++i) model.coef[i] = sol.alpha[i] * sign[i];
  model.bias = sol.bias;
  model.gamma = gamma;
  model.kkt_violation = sol.kkt_violation;
  model.alpha = sol.alpha;
  model.box_c = C;
  return model;
}

SvmModel train_regressor(const Eigen::MatrixXd& X, std::span<const double> y, double C,
                         double gamma, double epsilon, double tol) {
  const int n = static_cast<int>(X.rows());
  const Eigen::MatrixXd K = rbf_kernel(X, X, gamma);

  // Doubled variables a = [alpha; alpha*], beta = alpha - alpha*.
  const int m = 2 * n;
  Eigen::MatrixXd Q(m, m);
  Q.topLeftCorner(n, n) = K;
  Q.topRightCorner(n, n) = -K;
  Q.bottomLeftCorner(n, n) = -K;
  Q.bottomRightCorner(n, n) = K;
  Eigen::VectorXd p(m);
  Eigen::VectorXi sign(m);
  for (int i = 0; i < n; ++i) {
    p[i] = epsilon - y[static_cast<std::size_t>(i)];
    p[n + i] = epsilon + y[static_cast<std::size_t>(i)];
    sign[i] = 1;
    sign[n + i] = -1;
  }

  const SmoResult sol = smo_solve(Q, p, sign, C, tol, 100LL * m);

  SvmModel model;
  model.support_points = X;
  model.coef.resize(n);
  for (int i = 0; i < n; ++i) model.coef[i] = sol.alpha[i] - sol.alpha[n + i];
  model.bias = sol.bias;
  model.gamma = gamma;
  model.kkt_violation = sol.kkt_violation;
  model.alpha = sol.alpha;
  model.box_c = C;
  return model;
}

Eigen::VectorXd decision_values(const SvmModel& model, const Eigen::MatrixXd& X) {
  if (X.rows() == 0) return Eigen::VectorXd();
  const Eigen::MatrixXd K = rbf_kernel(X, model.support_points, model.gamma);
  return (K * model.coef).array() + model.bias;
}

}  // namespace vybench::svm
