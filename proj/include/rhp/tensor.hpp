#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rhp {

// Non-owning row-major matrix views. `stride` is the distance between rows,
// which lets attention heads address column slices of a wider matrix.
struct ConstMatrixView {
  const double* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t stride = 0;

  double operator()(std::size_t r, std::size_t c) const { return data[r * stride + c]; }
  std::span<const double> row(std::size_t r) const { return {data + r * stride, cols}; }
  ConstMatrixView columns(std::size_t first, std::size_t count) const {
    return {data + first, rows, count, stride};
  }
};

struct MatrixView {
  double* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t stride = 0;

  double& operator()(std::size_t r, std::size_t c) const { return data[r * stride + c]; }
  std::span<double> row(std::size_t r) const { return {data + r * stride, cols}; }
  MatrixView columns(std::size_t first, std::size_t count) const {
    return {data + first, rows, count, stride};
  }
  operator ConstMatrixView() const { return {data, rows, cols, stride}; }
};

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  MatrixView view() { return {data_.data(), rows_, cols_, cols_}; }
  ConstMatrixView view() const { return {data_.data(), rows_, cols_, cols_}; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline ConstMatrixView as_matrix(std::span<const double> data, std::size_t rows, std::size_t cols) {
  return {data.data(), rows, cols, cols};
}
inline MatrixView as_matrix(std::span<double> data, std::size_t rows, std::size_t cols) {
  return {data.data(), rows, cols, cols};
}

struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  friend bool operator==(const Tensor&, const Tensor&) = default;
};

std::size_t shape_size(std::span<const std::size_t> shape);

// Ordered collection of named parameter tensors. Insertion order is the
// serialization order and the initialization order.
class ParameterSet {
 public:
  std::size_t add(std::string name, std::vector<std::size_t> shape, bool trainable = true);

  std::size_t size() const { return entries_.size(); }
  bool contains(std::string_view name) const;
  // Throws DataError if absent.
  std::size_t index_of(std::string_view name) const;

  const std::string& name(std::size_t i) const { return entries_[i].name; }
  const std::vector<std::size_t>& shape(std::size_t i) const { return entries_[i].tensor.shape; }
  bool trainable(std::size_t i) const { return entries_[i].trainable; }
  void set_trainable(std::size_t i, bool value) { entries_[i].trainable = value; }

  std::span<double> values(std::size_t i) { return entries_[i].tensor.values; }
  std::span<const double> values(std::size_t i) const { return entries_[i].tensor.values; }

  ConstMatrixView matrix(std::size_t i) const;
  MatrixView matrix(std::size_t i);

  std::size_t total_size() const;
  std::size_t trainable_size() const;

  // Name of the first tensor holding a NaN/Inf value, or empty.
  std::string first_non_finite() const;

  friend bool operator==(const ParameterSet& a, const ParameterSet& b);

 private:
  struct Entry {
    std::string name;
    Tensor tensor;
    bool trainable = true;
    friend bool operator==(const Entry&, const Entry&) = default;
  };
  std::vector<Entry> entries_;
};

// Gradient buffers aligned with a ParameterSet. Frozen tensors get empty
// buffers so large frozen encoders cost no gradient memory.
class Gradients {
 public:
  Gradients() = default;
  explicit Gradients(const ParameterSet& params);

  std::size_t size() const { return buffers_.size(); }
  bool has(std::size_t i) const { return !buffers_[i].empty(); }
  std::span<double> operator[](std::size_t i) { return buffers_[i]; }
  std::span<const double> operator[](std::size_t i) const { return buffers_[i]; }
  MatrixView matrix(std::size_t i, const ParameterSet& params);

  void zero();
  void add(const Gradients& other);
  void scale(double factor);
  double squared_norm() const;

 private:
  std::vector<std::vector<double>> buffers_;
};

}  // namespace rhp
