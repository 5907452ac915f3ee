#include "vybench/mlp.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "vybench/common.hpp"

namespace vybench::mlp {

namespace {

Eigen::MatrixXd glorot_uniform(int rows, int cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / (rows + cols));
  Eigen::MatrixXd w(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      w(r, c) = rng.uniform(-limit, limit);
    }
  }
  return w;
}

}  // namespace

Net::Net(int input_dim, int hidden_width, int hidden_layers, bool sigmoid_output,
         Rng& rng) {
  model_.sigmoid_output = sigmoid_output;
  int in = input_dim;
  for (int l = 0; l < hidden_layers; ++l) {
    model_.weights.push_back(glorot_uniform(hidden_width, in, rng));
    model_.biases.push_back(Eigen::VectorXd::Zero(hidden_width));
    in = hidden_width;
  }
  model_.weights.push_back(glorot_uniform(1, in, rng));
  model_.biases.push_back(Eigen::VectorXd::Zero(1));
}

Net::Net(MlpModel model) : model_(std::move(model)) {}

namespace {

struct ForwardCache {
  std::vector<Eigen::MatrixXd> pre;   // pre-activations per layer
  std::vector<Eigen::MatrixXd> post;  // post-activations, post[0] = input
};

ForwardCache run_forward(const MlpModel& m, const Eigen::MatrixXd& X) {
  ForwardCache cache;
  cache.post.push_back(X);
  const int n_layers = static_cast<int>(m.weights.size());
  for (int l = 0; l < n_layers; ++l) {
    Eigen::MatrixXd z =
        (cache.post.back() * m.weights[static_cast<std::size_t>(l)].transpose())
            .rowwise() +
        m.biases[static_cast<std::size_t>(l)].transpose();
    cache.pre.push_back(z);
    if (l + 1 < n_layers) {
      cache.post.push_back(z.cwiseMax(0.0));
    } else {
      cache.post.push_back(z);  // output stays linear; sigmoid folded into loss
    }
  }
  return cache;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

Eigen::VectorXd Net::forward(const Eigen::MatrixXd& X) const {
  if (X.rows() == 0) return Eigen::VectorXd();
  return run_forward(model_, X).post.back().col(0);
}

double Net::loss(const Eigen::MatrixXd& X, const Eigen::VectorXd& target) const {
  const Eigen::VectorXd z = forward(X);
  const int n = static_cast<int>(z.size());
  double total = 0.0;
  if (model_.sigmoid_output) {
    // Stable binary cross-entropy on logits.
    for (int i = 0; i < n; ++i) {
      total += std::max(z[i], 0.0) - z[i] * target[i] + std::log1p(std::exp(-std::abs(z[i])));
    }
  } else {
    for (int i = 0; i < n; ++i) {
      const double e = z[i] - target[i];
      total += e * e;
    }
  }
  return total / n;
}

Net::Gradients Net::gradients(const Eigen::MatrixXd& X,
                              const Eigen::VectorXd& target) const {
  const ForwardCache cache = run_forward(model_, X);
  const int n_layers = static_cast<int>(model_.weights.size());
  const int batch = static_cast<int>(X.rows());

  Gradients grads;
  grads.weights.resize(static_cast<std::size_t>(n_layers));
  grads.biases.resize(static_cast<std::size_t>(n_layers));

  // d(loss)/d(output pre-activation), averaged over the batch.
  Eigen::MatrixXd delta(batch, 1);
  const auto& z_out = cache.pre.back();
  for (int i = 0; i < batch; ++i) {
    if (model_.sigmoid_output) {
      delta(i, 0) = (sigmoid(z_out(i, 0)) - target[i]) / batch;
    } else {
      delta(i, 0) = 2.0 * (z_out(i, 0) - target[i]) / batch;
    }
  }

  for (int l = n_layers - 1; l >= 0; --l) {
    grads.weights[static_cast<std::size_t>(l)] =
        delta.transpose() * cache.post[static_cast<std::size_t>(l)];
    grads.biases[static_cast<std::size_t>(l)] = delta.colwise().sum();
    if (l > 0) {
      Eigen::MatrixXd back = delta * model_.weights[static_cast<std::size_t>(l)];
      const auto& z = cache.pre[static_cast<std::size_t>(l - 1)];
      delta = back.cwiseProduct((z.array() > 0.0).cast<double>().matrix());
    }
  }
  return grads;
}

Eigen::VectorXd Net::flatten_params() const {
  std::size_t total = 0;
  for (const auto& w : model_.weights) total += static_cast<std::size_t>(w.size());
  for (const auto& b : model_.biases) total += static_cast<std::size_t>(b.size());

  Eigen::VectorXd flat(static_cast<Eigen::Index>(total));
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < model_.weights.size(); ++l) {
    const auto& w = model_.weights[l];
    flat.segment(at, w.size()) = Eigen::Map<const Eigen::VectorXd>(w.data(), w.size());
    at += w.size();
    const auto& b = model_.biases[l];
    flat.segment(at, b.size()) = b;
    at += b.size();
  }
  return flat;
}

void Net::unflatten_params(const Eigen::VectorXd& params) {
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < model_.weights.size(); ++l) {
    auto& w = model_.weights[l];
    Eigen::Map<Eigen::VectorXd>(w.data(), w.size()) = params.segment(at, w.size());
    at += w.size();
    auto& b = model_.biases[l];
    b = params.segment(at, b.size());
    at += b.size();
  }
}

Eigen::VectorXd Net::flatten(const Gradients& grads) {
  std::size_t total = 0;
  for (const auto& w : grads.weights) total += static_cast<std::size_t>(w.size());
  for (const auto& b : grads.biases) total += static_cast<std::size_t>(b.size());

  Eigen::VectorXd flat(static_cast<Eigen::Index>(total));
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < grads.weights.size(); ++l) {
    const auto& w = grads.weights[l];
    flat.segment(at, w.size()) = Eigen::Map<const Eigen::VectorXd>(w.data(), w.size());
    at += w.size();
    const auto& b = grads.biases[l];
    flat.segment(at, b.size()) = b;
    at += b.size();
  }
  return flat;
}

double Net::min_relu_gap(const Eigen::MatrixXd& X) const {
  const ForwardCache cache = run_forward(model_, X);
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l + 1 < cache.pre.size(); ++l) {
    gap = std::min(gap, cache.pre[l].array().abs().minCoeff());
  }
  return gap;
}

void train(Net& net, const Eigen::MatrixXd& X, const Eigen::VectorXd& target,
           const TrainOptions& options, Rng& rng) {
  const int n = static_cast<int>(X.rows());

  Eigen::VectorXd params = net.flatten_params();
  Eigen::VectorXd m = Eigen::VectorXd::Zero(params.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(params.size());
  std::int64_t step = 0;

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    rng.shuffle(order);
    for (int start = 0; start < n; start += options.batch_size) {
      const int size = std::min(options.batch_size, n - start);
      Eigen::MatrixXd bx(size, X.cols());
      Eigen::VectorXd bt(size);
      for (int i = 0; i < size; ++i) {
        bx.row(i) = X.row(order[static_cast<std::size_t>(start + i)]);
        bt[i] = target[order[static_cast<std::size_t>(start + i)]];
      }

      const Eigen::VectorXd grad = Net::flatten(net.gradients(bx, bt));
      ++step;
      m = options.beta1 * m + (1.0 - options.beta1) * grad;
      v = options.beta2 * v + (1.0 - options.beta2) * grad.cwiseProduct(grad);
      const double bias1 = 1.0 - std::pow(options.beta1, static_cast<double>(step));
      const double bias2 = 1.0 - std::pow(options.beta2, static_cast<double>(step));
      for (Eigen::Index i = 0; i < params.size(); ++i) {
        const double m_hat = m[i] / bias1;
        const double v_hat = v[i] / bias2;
        params[i] -= options.learning_rate * m_hat / (std::sqrt(v_hat) + options.adam_eps);
      }
      net.unflatten_params(params);
    }
  }
}

}  // namespace vybench::mlp
