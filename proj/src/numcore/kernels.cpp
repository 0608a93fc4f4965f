#include "grn/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace grn::kernels {

// Work thresholds below which the OpenMP fork costs more than it saves.
static constexpr long kGemmCutoff = 1L << 18;
static constexpr long kMapCutoff = 1L << 14;
static constexpr long kRowCutoff = 1L << 14;

void gemm(bool ta, bool tb, int m, int n, int k, const double* a, const double* b, double* c,
          bool accumulate) {
  const long work = static_cast<long>(m) * n * k;
#pragma omp parallel for schedule(static) if (work > kGemmCutoff)
  for (int i = 0; i < m; ++i) {
    double* crow = c + static_cast<long>(i) * n;
    if (!accumulate) std::fill(crow, crow + n, 0.0);
    for (int l = 0; l < k; ++l) {
      const double av = ta ? a[static_cast<long>(l) * m + i] : a[static_cast<long>(i) * k + l];
      if (!tb) {
        const double* brow = b + static_cast<long>(l) * n;
        for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
      } else {
        for (int j = 0; j < n; ++j) crow[j] += av * b[static_cast<long>(j) * k + l];
      }
    }
  }
}

void map_tanh(const double* x, double* y, long n) {
#pragma omp parallel for schedule(static) if (n > kMapCutoff)
  for (long i = 0; i < n; ++i) y[i] = std::tanh(x[i]);
}

void map_sigmoid(const double* x, double* y, long n) {
#pragma omp parallel for schedule(static) if (n > kMapCutoff)
  for (long i = 0; i < n; ++i) y[i] = 1.0 / (1.0 + std::exp(-x[i]));
}

void map_relu(const double* x, double* y, long n) {
#pragma omp parallel for schedule(static) if (n > kMapCutoff)
  for (long i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void softmax_rows(const double* x, double* y, int rows, int cols) {
  const long work = static_cast<long>(rows) * cols;
#pragma omp parallel for schedule(static) if (work > kRowCutoff)
  for (int r = 0; r < rows; ++r) {
    const double* xr = x + static_cast<long>(r) * cols;
    double* yr = y + static_cast<long>(r) * cols;
    double mx = xr[0];
    for (int j = 1; j < cols; ++j) mx = std::max(mx, xr[j]);
    double sum = 0.0;
    for (int j = 0; j < cols; ++j) {
      yr[j] = std::exp(xr[j] - mx);
      sum += yr[j];
    }
    const double inv = 1.0 / sum;
    for (int j = 0; j < cols; ++j) yr[j] *= inv;
  }
}

void layer_norm_rows(const double* x, const double* gain, const double* bias, double eps,
                     double* y, int rows, int cols, double* inv_std, double* xhat) {
  const long work = static_cast<long>(rows) * cols;
#pragma omp parallel for schedule(static) if (work > kRowCutoff)
  for (int r = 0; r < rows; ++r) {
    const double* xr = x + static_cast<long>(r) * cols;
    double* yr = y + static_cast<long>(r) * cols;
    double mean = 0.0;
    for (int j = 0; j < cols; ++j) mean += xr[j];
    mean /= cols;
    double var = 0.0;
    for (int j = 0; j < cols; ++j) {
      const double d = xr[j] - mean;
      var += d * d;
    }
    var /= cols;
    const double is = 1.0 / std::sqrt(var + eps);
    if (inv_std) inv_std[r] = is;
    for (int j = 0; j < cols; ++j) {
      const double xh = (xr[j] - mean) * is;
      if (xhat) xhat[static_cast<long>(r) * cols + j] = xh;
      yr[j] = gain[j] * xh + bias[j];
    }
  }
}

}  // namespace grn::kernels
