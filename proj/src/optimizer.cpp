#include "rhp/optimizer.hpp"

#include <cmath>

#include "rhp/common.hpp"

namespace rhp {

Adam::Adam(const ParameterSet& params, AdamOptions options)
    : options_(options), m_(params.size()), v_(params.size()) {
  if (!(options_.learning_rate > 0.0) || options_.beta1 < 0.0 || options_.beta1 >= 1.0 ||
      options_.beta2 < 0.0 || options_.beta2 >= 1.0 || !(options_.epsilon > 0.0) || options_.weight_decay < 0.0) {
    throw DataError("invalid Adam hyperparameters");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params.trainable(i)) {
      m_[i].assign(params.values(i).size(), 0.0);
      v_[i].assign(params.values(i).size(), 0.0);
    }
  }
}

void Adam::step(ParameterSet& params, const Gradients& grads) {
  ++t_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  const double lr = options_.learning_rate;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params.trainable(i) || !grads.has(i)) continue;
    auto p = params.values(i);
    const auto g = grads[i];
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = b1 * m[j] + (1.0 - b1) * g[j];
      v[j] = b2 * v[j] + (1.0 - b2) * g[j] * g[j];
      const double mhat = m[j] / c1;
      const double vhat = v[j] / c2;
      if (options_.weight_decay > 0.0) p[j] -= lr * options_.weight_decay * p[j];
      p[j] -= lr * mhat / (std::sqrt(vhat) + options_.epsilon);
    }
  }
}

}  // namespace rhp
