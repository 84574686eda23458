#pragma once

#include <string>
#include <vector>

#include "rhp/model.hpp"
#include "test_util.hpp"

namespace rhp::testing {

struct GradientMismatch {
  std::string tensor;
  std::size_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

struct GradientCheck {
  std::size_t checked = 0;
  double worst = 0.0;
  std::vector<GradientMismatch> failures;
};

// Central differences of the loss against loss_and_gradient for every
// trainable tensor whose name starts with one of `prefixes`. At most
// `per_tensor` elements per tensor are probed, chosen with `rng`.
inline GradientCheck check_gradients(FusionModel& model, const LabeledExample& ex, const std::vector<std::string>& prefixes,
                                     Rng& rng, double tolerance = 1e-4, std::size_t per_tensor = 24,
                                     double h = 1e-5) {
  Gradients grads(model.parameters());
  model.loss_and_gradient(ex, grads, Exec::serial);
  GradientCheck out;
  auto& params = model.parameters();
  for (std::size_t t = 0; t < params.size(); ++t) {
    if (!params.trainable(t)) continue;
    const std::string& name = params.name(t);
    bool selected = false;
    for (const auto& p : prefixes) selected = selected || name.rfind(p, 0) == 0;
    if (!selected) continue;
    const std::size_t n = params.values(t).size();
    std::vector<std::size_t> idx;
    if (n <= per_tensor) {
      for (std::size_t i = 0; i < n; ++i) idx.push_back(i);
    } else {
      for (std::size_t i = 0; i < per_tensor; ++i) idx.push_back(static_cast<std::size_t>(rng.below(n)));
    }
    for (std::size_t i : idx) {
      double& w = params.values(t)[i];
      const double saved = w;
      Gradients scratch(params);
      w = saved + h;
      const double up = model.loss_and_gradient(ex, scratch, Exec::serial);
      w = saved - h;
      const double down = model.loss_and_gradient(ex, scratch, Exec::serial);
      w = saved;
      const double numeric = (up - down) / (2 * h);
      const double analytic = grads[t][i];
      const double err = relative_error(analytic, numeric);
      out.worst = std::max(out.worst, err);
      ++out.checked;
      if (err > tolerance) out.failures.push_back({name, i, analytic, numeric});
    }
  }
  return out;
}

}  // namespace rhp::testing
