#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rhp/kernels.hpp"
#include "rhp/model.hpp"
#include "rhp/tensor.hpp"

namespace rhp {

// A scalar function of a (tokens x dims) input. When `grad` is non-null it
// receives dF/dx with the same shape as x.
using DifferentiableFn = std::function<double(const Matrix& x, Matrix* grad)>;

struct IntegratedGradients {
  std::vector<double> token_scores;  // summed over the embedding dimension
  Matrix attributions;               // per element
  double f_input = 0.0;
  double f_baseline = 0.0;
  // |sum of attributions - (F(x) - F(baseline))|
  double completeness_gap = 0.0;
};

// Right Riemann sum of the path integral from `baseline` to `x`:
//   attr = (x - x') * (1/steps) * sum_{k=1..steps} dF(x' + (k/steps)(x - x')).
// Steps are evaluated concurrently in parallel mode and reduced in order.
IntegratedGradients integrated_gradients(const DifferentiableFn& f, const Matrix& x, const Matrix& baseline,
                                         std::size_t steps, Exec exec = Exec::serial);

struct TokenScore {
  std::string token;
  double score = 0.0;
  std::size_t position = 0;  // index of the (first) model token
};

struct AttributionReport {
  std::string review_id;
  std::vector<std::string> tokens;  // model tokens, markers included
  std::vector<int> word_index;      // -1 for markers
  std::vector<double> scores;
  HelpfulnessClass predicted_class = 1;
  HelpfulnessClass target_class = 1;
  double f_input = 0.0;
  double f_baseline = 0.0;
  double completeness_gap = 0.0;
  std::size_t steps = 0;
  std::vector<TokenScore> top_k;

  nlohmann::json to_json() const;
};

inline constexpr std::size_t kDefaultAttributionSteps = 50;

// Integrated gradients of the target-class logit w.r.t. the token embeddings.
// Content tokens start from the [PAD] embedding; [CLS]/[SEP] keep their real
// embeddings. The target defaults to the predicted class.
AttributionReport attribute(const FusionModel& model, const LabeledExample& example,
                            std::size_t steps = kDefaultAttributionSteps,
                            std::optional<HelpfulnessClass> target = std::nullopt, std::size_t top_k = 10,
                            Exec exec = Exec::parallel);

// Word-level ranking: subword pieces of one word are merged by summing their
// scores; markers are excluded. Ties keep text order.
std::vector<TokenScore> top_tokens(const AttributionReport& report, std::size_t k);

// Plain-text heat rendering: each token followed by an intensity bucket of
// its attribution relative to the largest magnitude, e.g. "great[+++]".
std::string render_heat(const AttributionReport& report);

}  // namespace rhp
