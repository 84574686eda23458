#include "rhp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <omp.h>
#include <string>

#include "rhp/common.hpp"

namespace rhp::kernels {

namespace {

// Below this many multiply-adds the OpenMP region is not worth entering.
constexpr std::size_t kParallelWork = 1 << 15;

void check(bool ok, const char* what) {
  if (!ok) throw DataError(std::string("matrix shape mismatch in ") + what);
}

void nt_rows(ConstMatrixView a, ConstMatrixView b, MatrixView c, bool accumulate,
             std::size_t r0, std::size_t r1) {
  const std::size_t k = a.cols;
  for (std::size_t i = r0; i < r1; ++i) {
    const double* ai = a.data + i * a.stride;
    double* ci = c.data + i * c.stride;
    for (std::size_t j = 0; j < c.cols; ++j) {
      const double* bj = b.data + j * b.stride;
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) s += ai[p] * bj[p];
      ci[j] = accumulate ? ci[j] + s : s;
    }
  }
}

void nn_rows(ConstMatrixView a, ConstMatrixView b, MatrixView c, bool accumulate,
             std::size_t r0, std::size_t r1) {
  const std::size_t k = a.cols;
  for (std::size_t i = r0; i < r1; ++i) {
    const double* ai = a.data + i * a.stride;
    double* ci = c.data + i * c.stride;
    if (!accumulate) std::fill(ci, ci + c.cols, 0.0);
    for (std::size_t p = 0; p < k; ++p) {
      const double av = ai[p];
      const double* bp = b.data + p * b.stride;
      for (std::size_t j = 0; j < c.cols; ++j) ci[j] += av * bp[j];
    }
  }
}

void tn_rows(ConstMatrixView a, ConstMatrixView b, MatrixView c, bool accumulate,
             std::size_t r0, std::size_t r1) {
  const std::size_t k = a.rows;
  for (std::size_t i = r0; i < r1; ++i) {
    double* ci = c.data + i * c.stride;
    if (!accumulate) std::fill(ci, ci + c.cols, 0.0);
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a.data[p * a.stride + i];
      if (av == 0.0) continue;
      const double* bp = b.data + p * b.stride;
      for (std::size_t j = 0; j < c.cols; ++j) ci[j] += av * bp[j];
    }
  }
}

template <class RowFn>
void run_rows(Exec exec, std::size_t rows, std::size_t work, RowFn&& fn) {
  if (exec == Exec::serial || work < kParallelWork || rows < 2) {
    fn(0, rows);
    return;
  }
  const long n = static_cast<long>(rows);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    fn(static_cast<std::size_t>(i), static_cast<std::size_t>(i) + 1);
  }
}

}  // namespace

void matmul_nt(Exec exec, ConstMatrixView a, ConstMatrixView b, MatrixView c, bool accumulate) {
  check(a.cols == b.cols && c.rows == a.rows && c.cols == b.rows, "matmul_nt");
  run_rows(exec, c.rows, c.rows * c.cols * a.cols,
           [&](std::size_t r0, std::size_t r1) { nt_rows(a, b, c, accumulate, r0, r1); });
}

void matmul_nn(Exec exec, ConstMatrixView a, ConstMatrixView b, MatrixView c, bool accumulate) {
  check(a.cols == b.rows && c.rows == a.rows && c.cols == b.cols, "matmul_nn");
  run_rows(exec, c.rows, c.rows * c.cols * a.cols,
           [&](std::size_t r0, std::size_t r1) { nn_rows(a, b, c, accumulate, r0, r1); });
}

void matmul_tn(Exec exec, ConstMatrixView a, ConstMatrixView b, MatrixView c, bool accumulate) {
  check(a.rows == b.rows && c.rows == a.cols && c.cols == b.cols, "matmul_tn");
  run_rows(exec, c.rows, c.rows * c.cols * a.rows,
           [&](std::size_t r0, std::size_t r1) { tn_rows(a, b, c, accumulate, r0, r1); });
}

void affine(std::span<const double> weight, std::span<const double> bias, std::span<const double> x,
            std::span<double> y) {
  const std::size_t out = y.size();
  const std::size_t in = x.size();
  check(weight.size() == out * in && bias.size() == out, "affine");
  for (std::size_t o = 0; o < out; ++o) {
    const double* w = weight.data() + o * in;
    double s = 0.0;
    for (std::size_t i = 0; i < in; ++i) s += w[i] * x[i];
    y[o] = s + bias[o];
  }
}

void affine_backward(std::span<const double> weight, std::span<const double> x,
                     std::span<const double> dy, std::span<double> d_weight,
                     std::span<double> d_bias, std::span<double> dx) {
  const std::size_t out = dy.size();
  const std::size_t in = x.size();
  if (!d_weight.empty()) {
    check(d_weight.size() == out * in, "affine_backward");
    for (std::size_t o = 0; o < out; ++o) {
      double* dw = d_weight.data() + o * in;
      const double g = dy[o];
      for (std::size_t i = 0; i < in; ++i) dw[i] += g * x[i];
    }
  }
  if (!d_bias.empty()) {
    for (std::size_t o = 0; o < out; ++o) d_bias[o] += dy[o];
  }
  if (!dx.empty()) {
    check(dx.size() == in, "affine_backward");
    std::fill(dx.begin(), dx.end(), 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      const double* w = weight.data() + o * in;
      const double g = dy[o];
      for (std::size_t i = 0; i < in; ++i) dx[i] += w[i] * g;
    }
  }
}

void softmax_inplace(std::span<double> v) {
  if (v.empty()) return;
  const double mx = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double& x : v) {
    x = std::exp(x - mx);
    sum += x;
  }
  for (double& x : v) x /= sum;
}

int thread_count(Exec exec) { return exec == Exec::serial ? 1 : omp_get_max_threads(); }

}  // namespace rhp::kernels
