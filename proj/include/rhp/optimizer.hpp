#pragma once

#include <cstddef>
#include <vector>

#include "rhp/tensor.hpp"

namespace rhp {

struct AdamOptions {
  double learning_rate = 3e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Decoupled weight decay, applied as p -= lr * decay * p.
  double weight_decay = 0.0;
};

// Adam with bias correction. Moment buffers exist only for trainable tensors.
class Adam {
 public:
  Adam(const ParameterSet& params, AdamOptions options);

  void step(ParameterSet& params, const Gradients& grads);
  std::size_t steps() const { return t_; }
  const AdamOptions& options() const { return options_; }

 private:
  AdamOptions options_;
  std::vector<std::vector<double>> m_, v_;
  std::size_t t_ = 0;
};

}  // namespace rhp
