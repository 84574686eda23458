#include "rhp/transformer.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "rhp/safetensors.hpp"

namespace rhp {

namespace {

struct LayerCache {
  Matrix x, q, k, v, ctx;
  std::vector<Matrix> probs;
  Matrix xhat1, x1, u, g, xhat2;
  std::vector<double> inv1, inv2;
};

struct TransformerCache final : EncoderCache {
  Matrix xhat0;
  std::vector<double> inv0;
  std::vector<LayerCache> layers;
  std::vector<double> cls;
  std::vector<double> output;
};

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * std::numbers::sqrt2 / 2.0)); }

double gelu_grad(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x * std::numbers::sqrt2 / 2.0));
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  return cdf + x * pdf;
}

// y = x W^T + b
Matrix linear(Exec exec, const Matrix& x, ConstMatrixView w, std::span<const double> b) {
  Matrix y(x.rows(), w.rows);
  kernels::matmul_nt(exec, x.view(), w, y.view());
  for (std::size_t r = 0; r < y.rows(); ++r) {
    auto row = y.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] += b[j];
  }
  return y;
}

struct LinearGrads {
  MatrixView weight;
  std::span<double> bias;
  bool active = false;
};

LinearGrads grads_for(Gradients* grads, const ParameterSet& params, std::size_t w, std::size_t b) {
  if (grads == nullptr || !grads->has(w)) return {};
  return {grads->matrix(w, params), (*grads)[b], true};
}

// Accumulates weight/bias gradients and writes (or adds) dx = dy W.
void linear_backward(Exec exec, const Matrix& x, ConstMatrixView w, const Matrix& dy,
                     const LinearGrads& g, Matrix* dx, bool accumulate_dx) {
  if (g.active) {
    kernels::matmul_tn(exec, dy.view(), x.view(), g.weight, true);
    for (std::size_t r = 0; r < dy.rows(); ++r) {
      const auto row = dy.row(r);
      for (std::size_t j = 0; j < row.size(); ++j) g.bias[j] += row[j];
    }
  }
  if (dx != nullptr) {
    if (!accumulate_dx) *dx = Matrix(dy.rows(), w.cols);
    kernels::matmul_nn(exec, dy.view(), w, dx->view(), accumulate_dx);
  }
}

void layer_norm(const Matrix& x, std::span<const double> gamma, std::span<const double> beta, double eps,
                Matrix& y, Matrix& xhat, std::vector<double>& inv) {
  const std::size_t n = x.cols();
  y = Matrix(x.rows(), n);
  xhat = Matrix(x.rows(), n);
  inv.assign(x.rows(), 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : row) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    inv[r] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < n; ++j) {
      xhat(r, j) = (row[j] - mean) * inv[r];
      y(r, j) = gamma[j] * xhat(r, j) + beta[j];
    }
  }
}

Matrix layer_norm_backward(const Matrix& dy, const Matrix& xhat, const std::vector<double>& inv,
                           std::span<const double> gamma, LinearGrads g) {
  const std::size_t n = dy.cols();
  Matrix dx(dy.rows(), n);
  std::vector<double> dxhat(n);
  for (std::size_t r = 0; r < dy.rows(); ++r) {
    double mean_d = 0.0, mean_dx = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      dxhat[j] = dy(r, j) * gamma[j];
      mean_d += dxhat[j];
      mean_dx += dxhat[j] * xhat(r, j);
    }
    mean_d /= static_cast<double>(n);
    mean_dx /= static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
      dx(r, j) = inv[r] * (dxhat[j] - mean_d - xhat(r, j) * mean_dx);
    }
    if (g.active) {
      for (std::size_t j = 0; j < n; ++j) {
        g.weight.data[j] += dy(r, j) * xhat(r, j);
        g.bias[j] += dy(r, j);
      }
    }
  }
  return dx;
}

LinearGrads norm_grads(Gradients* grads, std::size_t gamma, std::size_t beta) {
  if (grads == nullptr || !grads->has(gamma)) return {};
  auto g = (*grads)[gamma];
  return {MatrixView{g.data(), 1, g.size(), g.size()}, (*grads)[beta], true};
}

std::string strip_prefix(const std::string& name) {
  constexpr std::string_view kPrefix = "encoder.";
  return name.substr(kPrefix.size());
}

const Tensor* find_weight(const std::map<std::string, Tensor>& weights, const std::string& hf_name) {
  std::vector<std::string> candidates{hf_name, "bert." + hf_name};
  for (const auto& [from, to] : {std::pair<std::string, std::string>{"LayerNorm.weight", "LayerNorm.gamma"},
                                 {"LayerNorm.bias", "LayerNorm.beta"}}) {
    if (hf_name.ends_with(from)) {
      const std::string alt = hf_name.substr(0, hf_name.size() - from.size()) + to;
      candidates.push_back(alt);
      candidates.push_back("bert." + alt);
    }
  }
  for (const auto& c : candidates) {
    if (const auto it = weights.find(c); it != weights.end()) return &it->second;
  }
  return nullptr;
}

}  // namespace

TransformerConfig TransformerConfig::from_json(const nlohmann::json& j) {
  TransformerConfig c;
  try {
    c.vocab_size = j.at("vocab_size").get<std::size_t>();
    c.hidden_size = j.at("hidden_size").get<std::size_t>();
    c.num_layers = j.at("num_hidden_layers").get<std::size_t>();
    c.num_heads = j.at("num_attention_heads").get<std::size_t>();
    c.intermediate_size = j.at("intermediate_size").get<std::size_t>();
    c.max_positions = j.at("max_position_embeddings").get<std::size_t>();
    c.type_vocab_size = j.value("type_vocab_size", std::size_t{2});
    c.layer_norm_eps = j.value("layer_norm_eps", 1e-12);
    if (j.contains("hidden_act") && j.at("hidden_act").get<std::string>() != "gelu") {
      throw DataError("only exact GELU activations are supported, got '" +
                      j.at("hidden_act").get<std::string>() + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed transformer config: ") + e.what());
  }
  if (c.num_heads == 0 || c.hidden_size % c.num_heads != 0) {
    throw DataError("hidden_size must be divisible by num_attention_heads");
  }
  if (c.type_vocab_size == 0) throw DataError("type_vocab_size must be positive");
  return c;
}

nlohmann::json TransformerConfig::to_json() const {
  return {{"vocab_size", vocab_size},
          {"hidden_size", hidden_size},
          {"num_hidden_layers", num_layers},
          {"num_attention_heads", num_heads},
          {"intermediate_size", intermediate_size},
          {"max_position_embeddings", max_positions},
          {"type_vocab_size", type_vocab_size},
          {"layer_norm_eps", layer_norm_eps},
          {"hidden_act", "gelu"}};
}

TransformerEncoder::TransformerEncoder(WordPieceTokenizer tokenizer, TransformerConfig config,
                                       std::size_t output_dim)
    : TextEncoder(std::move(tokenizer)), config_(config), output_dim_(output_dim) {
  if (config_.vocab_size != tokenizer_.vocabulary().size()) {
    throw DataError("transformer vocab_size " + std::to_string(config_.vocab_size) +
                    " does not match the vocabulary size " +
                    std::to_string(tokenizer_.vocabulary().size()));
  }
  if (output_dim_ == 0) throw DataError("output_dim must be positive");
}

std::shared_ptr<TransformerEncoder> TransformerEncoder::from_pretrained(const std::filesystem::path& dir,
                                                                        std::size_t output_dim,
                                                                        bool lowercase) {
  const auto config_path = dir / "config.json";
  std::ifstream in(config_path);
  if (!in) throw IoError("cannot open '" + config_path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed '" + config_path.string() + "': " + e.what());
  }
  const auto config = TransformerConfig::from_json(j);
  WordPieceTokenizer tokenizer(Vocabulary::load(dir / "vocab.txt"), lowercase);
  auto encoder = std::make_shared<TransformerEncoder>(std::move(tokenizer), config, output_dim);
  encoder->set_initial_weights(read_safetensors(dir / "model.safetensors"));
  return encoder;
}

void TransformerEncoder::set_initial_weights(std::map<std::string, Tensor> weights) {
  initial_weights_ = std::make_shared<std::map<std::string, Tensor>>(std::move(weights));
}

std::string TransformerEncoder::identity() const {
  std::string joined;
  for (const auto& t : tokenizer_.vocabulary().tokens()) {
    joined += t;
    joined.push_back('\n');
  }
  const auto& c = config_;
  return "bert-v1:h" + std::to_string(c.hidden_size) + ":l" + std::to_string(c.num_layers) + ":a" +
         std::to_string(c.num_heads) + ":i" + std::to_string(c.intermediate_size) + ":p" +
         std::to_string(c.max_positions) + ":k" + std::to_string(output_dim_) + ":v" +
         hex64(fnv1a64(joined));
}

std::vector<std::pair<std::string, std::vector<std::size_t>>> TransformerEncoder::tensor_layout() const {
  const auto& c = config_;
  const std::size_t h = c.hidden_size;
  std::vector<std::pair<std::string, std::vector<std::size_t>>> out{
      {"encoder.embeddings.word_embeddings.weight", {c.vocab_size, h}},
      {"encoder.embeddings.position_embeddings.weight", {c.max_positions, h}},
      {"encoder.embeddings.token_type_embeddings.weight", {c.type_vocab_size, h}},
      {"encoder.embeddings.LayerNorm.weight", {h}},
      {"encoder.embeddings.LayerNorm.bias", {h}},
  };
  for (std::size_t l = 0; l < c.num_layers; ++l) {
    const std::string p = "encoder.encoder.layer." + std::to_string(l) + ".";
    for (const char* qkv : {"query", "key", "value"}) {
      out.push_back({p + "attention.self." + qkv + ".weight", {h, h}});
      out.push_back({p + "attention.self." + qkv + ".bias", {h}});
    }
    out.push_back({p + "attention.output.dense.weight", {h, h}});
    out.push_back({p + "attention.output.dense.bias", {h}});
    out.push_back({p + "attention.output.LayerNorm.weight", {h}});
    out.push_back({p + "attention.output.LayerNorm.bias", {h}});
    out.push_back({p + "intermediate.dense.weight", {c.intermediate_size, h}});
    out.push_back({p + "intermediate.dense.bias", {c.intermediate_size}});
    out.push_back({p + "output.dense.weight", {h, c.intermediate_size}});
    out.push_back({p + "output.dense.bias", {h}});
    out.push_back({p + "output.LayerNorm.weight", {h}});
    out.push_back({p + "output.LayerNorm.bias", {h}});
  }
  out.push_back({"encoder.projection.weight", {output_dim_, h}});
  out.push_back({"encoder.projection.bias", {output_dim_}});
  return out;
}

void TransformerEncoder::init_parameters(ParameterSet& params, Rng& rng) {
  std::size_t fan_in = config_.hidden_size;
  for (const auto& [name, shape] : tensor_layout()) {
    const std::size_t idx = params.add(name, shape);
    auto values = params.values(idx);
    const bool projection = name.starts_with("encoder.projection.");
    if (initial_weights_ && !projection) {
      const Tensor* src = find_weight(*initial_weights_, strip_prefix(name));
      if (src == nullptr) throw DataError("pretrained weights lack '" + strip_prefix(name) + "'");
      if (src->values.size() != values.size()) {
        throw DataError("pretrained tensor '" + strip_prefix(name) + "' has the wrong size");
      }
      std::copy(src->values.begin(), src->values.end(), values.begin());
      continue;
    }
    if (name.find("LayerNorm.weight") != std::string::npos) {
      std::fill(values.begin(), values.end(), 1.0);
    } else if (name.find("LayerNorm.bias") != std::string::npos) {
      std::fill(values.begin(), values.end(), 0.0);
    } else if (name.find("_embeddings.") != std::string::npos) {
      for (double& v : values) v = 0.02 * rng.normal();
    } else {
      // Weights precede their bias in the layout, so the bias reuses the fan-in.
      if (shape.size() == 2) fan_in = shape[1];
      init_uniform_fan_in(values, fan_in, rng);
    }
  }
  resolve(params);
}

void TransformerEncoder::bind(const ParameterSet& params) {
  for (const auto& [name, shape] : tensor_layout()) {
    if (params.shape(params.index_of(name)) != shape) {
      throw DataError("parameter '" + name + "' has the wrong shape for this encoder");
    }
  }
  resolve(params);
}

void TransformerEncoder::resolve(const ParameterSet& params) {
  word_ = params.index_of("encoder.embeddings.word_embeddings.weight");
  position_ = params.index_of("encoder.embeddings.position_embeddings.weight");
  token_type_ = params.index_of("encoder.embeddings.token_type_embeddings.weight");
  ln0_g_ = params.index_of("encoder.embeddings.LayerNorm.weight");
  ln0_b_ = params.index_of("encoder.embeddings.LayerNorm.bias");
  layers_.clear();
  for (std::size_t l = 0; l < config_.num_layers; ++l) {
    const std::string p = "encoder.encoder.layer." + std::to_string(l) + ".";
    Layer layer{};
    layer.q_w = params.index_of(p + "attention.self.query.weight");
    layer.q_b = params.index_of(p + "attention.self.query.bias");
    layer.k_w = params.index_of(p + "attention.self.key.weight");
    layer.k_b = params.index_of(p + "attention.self.key.bias");
    layer.v_w = params.index_of(p + "attention.self.value.weight");
    layer.v_b = params.index_of(p + "attention.self.value.bias");
    layer.attn_out_w = params.index_of(p + "attention.output.dense.weight");
    layer.attn_out_b = params.index_of(p + "attention.output.dense.bias");
    layer.ln1_g = params.index_of(p + "attention.output.LayerNorm.weight");
    layer.ln1_b = params.index_of(p + "attention.output.LayerNorm.bias");
    layer.inter_w = params.index_of(p + "intermediate.dense.weight");
    layer.inter_b = params.index_of(p + "intermediate.dense.bias");
    layer.out_w = params.index_of(p + "output.dense.weight");
    layer.out_b = params.index_of(p + "output.dense.bias");
    layer.ln2_g = params.index_of(p + "output.LayerNorm.weight");
    layer.ln2_b = params.index_of(p + "output.LayerNorm.bias");
    layers_.push_back(layer);
  }
  proj_w_ = params.index_of("encoder.projection.weight");
  proj_b_ = params.index_of("encoder.projection.bias");
}

std::vector<std::size_t> TransformerEncoder::parameter_indices() const {
  std::vector<std::size_t> out{word_, position_, token_type_, ln0_g_, ln0_b_};
  for (const auto& l : layers_) {
    out.insert(out.end(), {l.q_w, l.q_b, l.k_w, l.k_b, l.v_w, l.v_b, l.attn_out_w, l.attn_out_b, l.ln1_g,
                           l.ln1_b, l.inter_w, l.inter_b, l.out_w, l.out_b, l.ln2_g, l.ln2_b});
  }
  out.push_back(proj_w_);
  out.push_back(proj_b_);
  return out;
}

Matrix TransformerEncoder::embed(std::span<const int> ids, const ParameterSet& params) const {
  const auto table = params.matrix(word_);
  Matrix out(ids.size(), config_.hidden_size);
  for (std::size_t t = 0; t < ids.size(); ++t) {
    const auto row = table.row(static_cast<std::size_t>(ids[t]));
    std::copy(row.begin(), row.end(), out.row(t).begin());
  }
  return out;
}

std::vector<double> TransformerEncoder::pad_embedding(const ParameterSet& params) const {
  const auto row = params.matrix(word_).row(static_cast<std::size_t>(tokenizer_.vocabulary().pad_id()));
  return {row.begin(), row.end()};
}

std::vector<double> TransformerEncoder::forward(const Matrix& embeddings, const ParameterSet& params,
                                                std::unique_ptr<EncoderCache>* cache_out, Exec exec) const {
  const std::size_t len = embeddings.rows();
  const std::size_t h = config_.hidden_size;
  const std::size_t head_dim = h / config_.num_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  if (len == 0 || len > config_.max_positions) throw DataError("sequence length outside encoder limits");
  if (embeddings.cols() != h) throw DataError("embedding width does not match hidden size");

  auto cache = std::make_unique<TransformerCache>();
  Matrix pre = embeddings;
  const auto pos = params.matrix(position_);
  const auto type = params.matrix(token_type_).row(0);
  for (std::size_t t = 0; t < len; ++t) {
    auto row = pre.row(t);
    const auto p = pos.row(t);
    for (std::size_t j = 0; j < h; ++j) row[j] += p[j] + type[j];
  }
  Matrix x;
  layer_norm(pre, params.values(ln0_g_), params.values(ln0_b_), config_.layer_norm_eps, x, cache->xhat0,
             cache->inv0);

  for (const auto& layer : layers_) {
    LayerCache lc;
    lc.q = linear(exec, x, params.matrix(layer.q_w), params.values(layer.q_b));
    lc.k = linear(exec, x, params.matrix(layer.k_w), params.values(layer.k_b));
    lc.v = linear(exec, x, params.matrix(layer.v_w), params.values(layer.v_b));
    lc.ctx = Matrix(len, h);
    lc.probs.resize(config_.num_heads);
    for (std::size_t head = 0; head < config_.num_heads; ++head) {
      Matrix scores(len, len);
      kernels::matmul_nt(exec, lc.q.view().columns(head * head_dim, head_dim),
                         lc.k.view().columns(head * head_dim, head_dim), scores.view());
      for (std::size_t r = 0; r < len; ++r) {
        auto row = scores.row(r);
        for (double& s : row) s *= scale;
        kernels::softmax_inplace(row);
      }
      kernels::matmul_nn(exec, scores.view(), lc.v.view().columns(head * head_dim, head_dim),
                         lc.ctx.view().columns(head * head_dim, head_dim));
      lc.probs[head] = std::move(scores);
    }
    Matrix attn = linear(exec, lc.ctx, params.matrix(layer.attn_out_w), params.values(layer.attn_out_b));
    for (std::size_t i = 0; i < attn.data().size(); ++i) attn.data()[i] += x.data()[i];
    layer_norm(attn, params.values(layer.ln1_g), params.values(layer.ln1_b), config_.layer_norm_eps, lc.x1,
               lc.xhat1, lc.inv1);

    lc.u = linear(exec, lc.x1, params.matrix(layer.inter_w), params.values(layer.inter_b));
    lc.g = lc.u;
    for (double& v : lc.g.data()) v = gelu(v);
    Matrix out = linear(exec, lc.g, params.matrix(layer.out_w), params.values(layer.out_b));
    for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] += lc.x1.data()[i];
    Matrix next;
    layer_norm(out, params.values(layer.ln2_g), params.values(layer.ln2_b), config_.layer_norm_eps, next,
               lc.xhat2, lc.inv2);
    lc.x = std::move(x);
    x = std::move(next);
    cache->layers.push_back(std::move(lc));
  }

  const auto cls = x.row(0);
  cache->cls.assign(cls.begin(), cls.end());
  std::vector<double> result(output_dim_);
  kernels::affine(params.values(proj_w_), params.values(proj_b_), cache->cls, result);
  for (double& v : result) v = std::tanh(v);
  cache->output = result;
  if (cache_out != nullptr) *cache_out = std::move(cache);
  return result;
}

void TransformerEncoder::backward(const EncoderCache& cache_base, std::span<const double> d_output,
                                  const ParameterSet& params, Gradients* grads, Matrix* d_embeddings,
                                  Exec exec) const {
  const auto& cache = dynamic_cast<const TransformerCache&>(cache_base);
  const std::size_t h = config_.hidden_size;
  const std::size_t len = cache.xhat0.rows();
  const std::size_t head_dim = h / config_.num_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));

  std::vector<double> dz(output_dim_);
  for (std::size_t i = 0; i < output_dim_; ++i) {
    dz[i] = d_output[i] * (1.0 - cache.output[i] * cache.output[i]);
  }
  std::span<double> dpw, dpb;
  if (grads != nullptr && grads->has(proj_w_)) {
    dpw = (*grads)[proj_w_];
    dpb = (*grads)[proj_b_];
  }
  std::vector<double> d_cls(h);
  kernels::affine_backward(params.values(proj_w_), cache.cls, dz, dpw, dpb, d_cls);

  Matrix dx(len, h);
  std::copy(d_cls.begin(), d_cls.end(), dx.row(0).begin());

  for (std::size_t li = layers_.size(); li-- > 0;) {
    const Layer& layer = layers_[li];
    const LayerCache& lc = cache.layers[li];

    Matrix d_r2 = layer_norm_backward(dx, lc.xhat2, lc.inv2, params.values(layer.ln2_g),
                                      norm_grads(grads, layer.ln2_g, layer.ln2_b));
    Matrix d_x1 = d_r2;
    Matrix d_g;
    linear_backward(exec, lc.g, params.matrix(layer.out_w), d_r2,
                    grads_for(grads, params, layer.out_w, layer.out_b), &d_g, false);
    for (std::size_t i = 0; i < d_g.data().size(); ++i) d_g.data()[i] *= gelu_grad(lc.u.data()[i]);
    linear_backward(exec, lc.x1, params.matrix(layer.inter_w), d_g,
                    grads_for(grads, params, layer.inter_w, layer.inter_b), &d_x1, true);

    Matrix d_r1 = layer_norm_backward(d_x1, lc.xhat1, lc.inv1, params.values(layer.ln1_g),
                                      norm_grads(grads, layer.ln1_g, layer.ln1_b));
    Matrix d_in = d_r1;
    Matrix d_ctx;
    linear_backward(exec, lc.ctx, params.matrix(layer.attn_out_w), d_r1,
                    grads_for(grads, params, layer.attn_out_w, layer.attn_out_b), &d_ctx, false);

    Matrix dq(len, h), dk(len, h), dv(len, h);
    for (std::size_t head = 0; head < config_.num_heads; ++head) {
      const std::size_t off = head * head_dim;
      const Matrix& probs = lc.probs[head];
      Matrix d_probs(len, len);
      kernels::matmul_nt(exec, d_ctx.view().columns(off, head_dim), lc.v.view().columns(off, head_dim),
                         d_probs.view());
      kernels::matmul_tn(exec, probs.view(), d_ctx.view().columns(off, head_dim),
                         dv.view().columns(off, head_dim));
      for (std::size_t r = 0; r < len; ++r) {
        double dot = 0.0;
        for (std::size_t c = 0; c < len; ++c) dot += d_probs(r, c) * probs(r, c);
        for (std::size_t c = 0; c < len; ++c) d_probs(r, c) = probs(r, c) * (d_probs(r, c) - dot) * scale;
      }
      kernels::matmul_nn(exec, d_probs.view(), lc.k.view().columns(off, head_dim),
                         dq.view().columns(off, head_dim));
      kernels::matmul_tn(exec, d_probs.view(), lc.q.view().columns(off, head_dim),
                         dk.view().columns(off, head_dim));
    }
    linear_backward(exec, lc.x, params.matrix(layer.q_w), dq, grads_for(grads, params, layer.q_w, layer.q_b),
                    &d_in, true);
    linear_backward(exec, lc.x, params.matrix(layer.k_w), dk, grads_for(grads, params, layer.k_w, layer.k_b),
                    &d_in, true);
    linear_backward(exec, lc.x, params.matrix(layer.v_w), dv, grads_for(grads, params, layer.v_w, layer.v_b),
                    &d_in, true);
    dx = std::move(d_in);
  }

  Matrix d_pre = layer_norm_backward(dx, cache.xhat0, cache.inv0, params.values(ln0_g_),
                                     norm_grads(grads, ln0_g_, ln0_b_));
  if (grads != nullptr && grads->has(position_)) {
    auto dpos = grads->matrix(position_, params);
    for (std::size_t t = 0; t < len; ++t) {
      const auto row = d_pre.row(t);
      for (std::size_t j = 0; j < h; ++j) dpos(t, j) += row[j];
    }
  }
  if (grads != nullptr && grads->has(token_type_)) {
    auto dtype = (*grads)[token_type_];
    for (std::size_t t = 0; t < len; ++t) {
      const auto row = d_pre.row(t);
      for (std::size_t j = 0; j < h; ++j) dtype[j] += row[j];
    }
  }
  if (d_embeddings != nullptr) *d_embeddings = std::move(d_pre);
}

void TransformerEncoder::accumulate_embedding_gradient(std::span<const int> ids, const Matrix& d_embeddings,
                                                       Gradients& grads) const {
  if (!grads.has(word_)) return;
  auto table = grads[word_];
  const std::size_t h = config_.hidden_size;
  for (std::size_t t = 0; t < ids.size(); ++t) {
    double* row = table.data() + static_cast<std::size_t>(ids[t]) * h;
    const auto src = d_embeddings.row(t);
    for (std::size_t j = 0; j < h; ++j) row[j] += src[j];
  }
}

bool TransformerEncoder::has_trainable_embeddings(const ParameterSet& params) const {
  return params.trainable(word_);
}

nlohmann::json TransformerEncoder::describe() const {
  return {{"kind", kind()},
          {"output_dim", output_dim_},
          {"lowercase", tokenizer_.lowercase()},
          {"architecture", config_.to_json()}};
}

}  // namespace rhp
