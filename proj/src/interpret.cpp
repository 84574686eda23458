#include "rhp/interpret.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace rhp {

namespace {

// Bounds the number of simultaneously held gradient matrices.
constexpr std::size_t kStepChunk = 32;

std::string strip_continuation(const std::string& piece) {
  return piece.starts_with(kContinuationPrefix) ? piece.substr(kContinuationPrefix.size()) : piece;
}

// Word-level groups in text order.
std::vector<TokenScore> merge_words(const AttributionReport& report) {
  std::vector<TokenScore> words;
  std::map<int, std::size_t> slot;
  for (std::size_t i = 0; i < report.tokens.size(); ++i) {
    const int w = report.word_index.empty() ? static_cast<int>(i) : report.word_index[i];
    if (w < 0) continue;
    const auto [it, inserted] = slot.try_emplace(w, words.size());
    if (inserted) {
      words.push_back({strip_continuation(report.tokens[i]), report.scores[i], i});
    } else {
      auto& t = words[it->second];
      t.token += strip_continuation(report.tokens[i]);
      t.score += report.scores[i];
    }
  }
  return words;
}

}  // namespace

IntegratedGradients integrated_gradients(const DifferentiableFn& f, const Matrix& x, const Matrix& baseline,
                                         std::size_t steps, Exec exec) {
  if (steps == 0) throw DomainError("integrated gradients needs at least one step");
  if (x.rows() != baseline.rows() || x.cols() != baseline.cols()) {
    throw DataError("input and baseline shapes differ");
  }
  const std::size_t n = x.data().size();
  std::vector<double> delta(n);
  for (std::size_t i = 0; i < n; ++i) delta[i] = x.data()[i] - baseline.data()[i];

  std::vector<double> sum(n, 0.0);
  std::vector<Matrix> grads;
  for (std::size_t first = 1; first <= steps; first += kStepChunk) {
    const std::size_t count = std::min(kStepChunk, steps - first + 1);
    grads.assign(count, Matrix());
    kernels::for_each_index(exec, count, [&](std::size_t c) {
      const double alpha = static_cast<double>(first + c) / static_cast<double>(steps);
      Matrix point = baseline;
      for (std::size_t i = 0; i < n; ++i) point.data()[i] += alpha * delta[i];
      f(point, &grads[c]);
    });
    for (const auto& g : grads) {
      for (std::size_t i = 0; i < n; ++i) sum[i] += g.data()[i];
    }
  }

  IntegratedGradients out;
  out.attributions = Matrix(x.rows(), x.cols());
  out.token_scores.assign(x.rows(), 0.0);
  double total = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < x.cols(); ++c) {
      const std::size_t i = r * x.cols() + c;
      const double a = delta[i] * sum[i] / static_cast<double>(steps);
      out.attributions(r, c) = a;
      s += a;
    }
    out.token_scores[r] = s;
    total += s;
  }
  out.f_input = f(x, nullptr);
  out.f_baseline = f(baseline, nullptr);
  out.completeness_gap = std::abs(total - (out.f_input - out.f_baseline));
  return out;
}

AttributionReport attribute(const FusionModel& model, const LabeledExample& example, std::size_t steps,
                            std::optional<HelpfulnessClass> target, std::size_t top_k, Exec exec) {
  const auto& encoder = model.encoder();
  encoder.validate(example.tokens);
  const auto& params = model.parameters();
  const Matrix x = encoder.embed(example.tokens.ids, params);

  Matrix baseline = x;
  const auto pad = encoder.pad_embedding(params);
  const auto& vocab = encoder.tokenizer().vocabulary();
  for (std::size_t t = 0; t < example.tokens.ids.size(); ++t) {
    const int id = example.tokens.ids[t];
    if (id == vocab.cls_id() || id == vocab.sep_id()) continue;
    std::copy(pad.begin(), pad.end(), baseline.row(t).begin());
  }

  const Prediction pred = model.predict(example, Exec::serial);
  AttributionReport report;
  report.review_id = example.review_id;
  report.tokens = example.tokens.pieces;
  report.word_index = example.tokens.word_index;
  report.predicted_class = pred.predicted_class;
  report.target_class = target.value_or(pred.predicted_class);
  if (!is_valid_class(report.target_class)) throw DomainError("target class outside 1..5");
  report.steps = steps;

  const double e = example.expertise_norm, a = example.age_norm;
  const int cls = report.target_class;
  const DifferentiableFn f = [&](const Matrix& emb, Matrix* grad) {
    return model.logit_and_embedding_gradient(emb, e, a, cls, grad, Exec::serial);
  };
  const auto ig = integrated_gradients(f, x, baseline, steps, exec);
  report.scores = ig.token_scores;
  report.f_input = ig.f_input;
  report.f_baseline = ig.f_baseline;
  report.completeness_gap = ig.completeness_gap;
  report.top_k = top_tokens(report, top_k);
  return report;
}

std::vector<TokenScore> top_tokens(const AttributionReport& report, std::size_t k) {
  if (report.tokens.size() != report.scores.size()) throw DataError("tokens and scores are misaligned");
  auto words = merge_words(report);
  std::stable_sort(words.begin(), words.end(),
                   [](const TokenScore& a, const TokenScore& b) { return a.score > b.score; });
  if (words.size() > k) words.resize(k);
  return words;
}

std::string render_heat(const AttributionReport& report) {
  const auto words = merge_words(report);
  double peak = 0.0;
  for (const auto& w : words) peak = std::max(peak, std::abs(w.score));
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out.push_back(' ');
    out += w.token;
    const int bucket = peak > 0.0 ? static_cast<int>(std::lround(4.0 * std::abs(w.score) / peak)) : 0;
    if (bucket > 0) out += "[" + std::string(static_cast<std::size_t>(bucket), w.score > 0 ? '+' : '-') + "]";
  }
  return out;
}

nlohmann::json AttributionReport::to_json() const {
  auto top = nlohmann::json::array();
  for (const auto& t : top_k) top.push_back({{"token", t.token}, {"score", t.score}, {"position", t.position}});
  return {{"review_id", review_id},
          {"tokens", tokens},
          {"scores", scores},
          {"predicted_class", predicted_class},
          {"target_class", target_class},
          {"f_input", f_input},
          {"f_baseline", f_baseline},
          {"completeness_gap", completeness_gap},
          {"steps", steps},
          {"top_k", top}};
}

}  // namespace rhp
