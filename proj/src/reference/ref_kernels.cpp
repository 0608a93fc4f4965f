#include "grn/ref_kernels.hpp"

#include <algorithm>
#include <cmath>

namespace grn::ref {

void gemm(bool ta, bool tb, int m, int n, int k, const double* a, const double* b, double* c,
          bool accumulate) {
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = accumulate ? c[static_cast<long>(i) * n + j] : 0.0;
      for (int l = 0; l < k; ++l) {
        const double av = ta ? a[static_cast<long>(l) * m + i] : a[static_cast<long>(i) * k + l];
        const double bv = tb ? b[static_cast<long>(j) * k + l] : b[static_cast<long>(l) * n + j];
        acc += av * bv;
      }
      c[static_cast<long>(i) * n + j] = acc;
    }
  }
}

void map_tanh(const double* x, double* y, long n) {
  for (long i = 0; i < n; ++i) y[i] = std::tanh(x[i]);
}

void map_sigmoid(const double* x, double* y, long n) {
  for (long i = 0; i < n; ++i) y[i] = 1.0 / (1.0 + std::exp(-x[i]));
}

void map_relu(const double* x, double* y, long n) {
  for (long i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void softmax_rows(const double* x, double* y, int rows, int cols) {
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
    for (int j = 0; j < cols; ++j) yr[j] /= sum;
  }
}

void layer_norm_rows(const double* x, const double* gain, const double* bias, double eps,
                     double* y, int rows, int cols) {
  for (int r = 0; r < rows; ++r) {
    const double* xr = x + static_cast<long>(r) * cols;
    double* yr = y + static_cast<long>(r) * cols;
    double mean = 0.0;
    for (int j = 0; j < cols; ++j) mean += xr[j];
    mean /= cols;
    double var = 0.0;
    for (int j = 0; j < cols; ++j) var += (xr[j] - mean) * (xr[j] - mean);
    var /= cols;
    const double is = 1.0 / std::sqrt(var + eps);
    for (int j = 0; j < cols; ++j) yr[j] = gain[j] * (xr[j] - mean) * is + bias[j];
  }
}

}  // namespace grn::ref
