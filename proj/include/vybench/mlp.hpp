#pragma once

#include <Eigen/Dense>
#include <vector>

#include "vybench/predictors.hpp"
#include "vybench/rng.hpp"

namespace vybench::mlp {

// Feed-forward net: input -> hidden x3 (ReLU, width 16 by default) -> 1.
// Classification uses a sigmoid output with binary cross-entropy on logits;
// regression a linear output with mean squared error.
class Net {
 public:
  Net(int input_dim, int hidden_width, int hidden_layers, bool sigmoid_output,
      Rng& rng);

  explicit Net(MlpModel model);

  // Raw output (logits for classification).
  Eigen::VectorXd forward(const Eigen::MatrixXd& X) const;

  double loss(const Eigen::MatrixXd& X, const Eigen::VectorXd& target) const;

  struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
  };

  Gradients gradients(const Eigen::MatrixXd& X, const Eigen::VectorXd& target) const;

  // Flat parameter views for the optimizer and for finite-difference checks.
  Eigen::VectorXd flatten_params() const;
  void unflatten_params(const Eigen::VectorXd& params);
  static Eigen::VectorXd flatten(const Gradients& grads);

  // Smallest |pre-activation| across all ReLU units; finite-difference
  // checks re-draw inputs that sit on a kink.
  double min_relu_gap(const Eigen::MatrixXd& X) const;

  const MlpModel& model() const { return model_; }

 private:
  MlpModel model_;
};

struct TrainOptions {
  double learning_rate = 1e-3;
  int batch_size = 32;
  int epochs = 10;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
};

// Adam over shuffled mini-batches; shuffle order comes from `rng`, so a
// fixed seed reproduces training exactly.
void train(Net& net, const Eigen::MatrixXd& X, const Eigen::VectorXd& target,
           const TrainOptions& options, Rng& rng);

}  // namespace vybench::mlp
