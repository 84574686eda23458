#pragma once

#include <cstddef>
#include <exception>
#include <span>
#include <vector>

#include "rhp/tensor.hpp"

namespace rhp {

// Execution policy for the data-parallel kernels. `serial` is the reference
// path; `parallel` distributes independent rows/examples over OpenMP threads
// and must produce bit-identical results (each output element is computed by
// exactly one thread in the same order as the serial path).
enum class Exec { serial, parallel };

namespace kernels {

// C = A * B^T (+ C if accumulate).  A: m x k, B: n x k, C: m x n.
void matmul_nt(Exec exec, ConstMatrixView a, ConstMatrixView b, MatrixView c, bool accumulate = false);
// C = A * B (+ C).  A: m x k, B: k x n, C: m x n.
void matmul_nn(Exec exec, ConstMatrixView a, ConstMatrixView b, MatrixView c, bool accumulate = false);
// C = A^T * B (+ C).  A: k x m, B: k x n, C: m x n.
void matmul_tn(Exec exec, ConstMatrixView a, ConstMatrixView b, MatrixView c, bool accumulate = false);

// y = W x + b.  W: out x in.
void affine(std::span<const double> weight, std::span<const double> bias, std::span<const double> x,
            std::span<double> y);
// dW += dy x^T, db += dy, dx = W^T dy (dx may be empty).
void affine_backward(std::span<const double> weight, std::span<const double> x,
                     std::span<const double> dy, std::span<double> d_weight,
                     std::span<double> d_bias, std::span<double> dx);

// Numerically stable softmax over one row, in place.
void softmax_inplace(std::span<double> v);

int thread_count(Exec exec);

// Runs fn(i) for i in [0, n). In parallel mode iterations run concurrently;
// if several throw, the exception of the lowest index is rethrown.
template <class Fn>
void for_each_index(Exec exec, std::size_t n, Fn&& fn) {
  if (exec == Exec::serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace kernels
}  // namespace rhp
