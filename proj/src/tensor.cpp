#include "rhp/tensor.hpp"

#include <cmath>
#include <functional>
#include <numeric>

#include "rhp/common.hpp"

namespace rhp {

std::size_t shape_size(std::span<const std::size_t> shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::size_t ParameterSet::add(std::string name, std::vector<std::size_t> shape, bool trainable) {
  if (contains(name)) throw DataError("duplicate parameter '" + name + "'");
  Entry entry;
  entry.name = std::move(name);
  entry.tensor.values.assign(shape_size(shape), 0.0);
  entry.tensor.shape = std::move(shape);
  entry.trainable = trainable;
  entries_.push_back(std::move(entry));
  return entries_.size() - 1;
}

bool ParameterSet::contains(std::string_view name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return true;
  }
  return false;
}

std::size_t ParameterSet::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].name == name) return i;
  }
  throw DataError("missing parameter '" + std::string(name) + "'");
}

ConstMatrixView ParameterSet::matrix(std::size_t i) const {
  const auto& t = entries_[i].tensor;
  const std::size_t rows = t.shape.empty() ? 1 : t.shape[0];
  const std::size_t cols = rows == 0 ? 0 : t.values.size() / rows;
  return {t.values.data(), rows, cols, cols};
}

MatrixView ParameterSet::matrix(std::size_t i) {
  auto& t = entries_[i].tensor;
  const std::size_t rows = t.shape.empty() ? 1 : t.shape[0];
  const std::size_t cols = rows == 0 ? 0 : t.values.size() / rows;
  return {t.values.data(), rows, cols, cols};
}

std::size_t ParameterSet::total_size() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.tensor.values.size();
  return n;
}

std::size_t ParameterSet::trainable_size() const {
  std::size_t n = 0;
  for (const auto& e : entries_) {
    if (e.trainable) n += e.tensor.values.size();
  }
  return n;
}

std::string ParameterSet::first_non_finite() const {
  for (const auto& e : entries_) {
    for (double v : e.tensor.values) {
      if (!std::isfinite(v)) return e.name;
    }
  }
  return {};
}

bool operator==(const ParameterSet& a, const ParameterSet& b) { return a.entries_ == b.entries_; }

Gradients::Gradients(const ParameterSet& params) : buffers_(params.size()) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params.trainable(i)) buffers_[i].assign(params.values(i).size(), 0.0);
  }
}

MatrixView Gradients::matrix(std::size_t i, const ParameterSet& params) {
  const auto view = params.matrix(i);
  return {buffers_[i].data(), view.rows, view.cols, view.cols};
}

void Gradients::zero() {
  for (auto& b : buffers_) std::fill(b.begin(), b.end(), 0.0);
}

void Gradients::add(const Gradients& other) {
  for (std::size_t i = 0; i < buffers_.size(); ++i) {
    auto& dst = buffers_[i];
    const auto& src = other.buffers_[i];
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
  }
}

void Gradients::scale(double factor) {
  for (auto& b : buffers_) {
    for (double& v : b) v *= factor;
  }
}

double Gradients::squared_norm() const {
  double s = 0.0;
  for (const auto& b : buffers_) {
    for (double v : b) s += v * v;
  }
  return s;
}

}  // namespace rhp
