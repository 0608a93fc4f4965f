#pragma once

namespace grn::kernels {

// Hot numeric kernels. Loops parallelize with OpenMP above a size cutoff so
// small graphs do not pay fork overhead; each output element is produced by
// exactly one thread with a fixed-order inner loop, which keeps results
// bit-identical for any thread count. The serial twins in grn::ref exist as
// an independent implementation for tests and for the kernel benchmark.

// C(m,n) [+]= opA(m,k) * opB(k,n). opA reads A as k-by-m when ta is set,
// opB reads B as n-by-k when tb is set. Row-major throughout.
void gemm(bool ta, bool tb, int m, int n, int k, const double* a, const double* b, double* c,
          bool accumulate);

void map_tanh(const double* x, double* y, long n);
void map_sigmoid(const double* x, double* y, long n);
void map_relu(const double* x, double* y, long n);

// Row-wise softmax with max subtraction, contiguous rows.
void softmax_rows(const double* x, double* y, int rows, int cols);

// Row-wise layer norm: y = gain * (x - mean) / sqrt(var + eps) + bias.
// Optionally writes per-row inv-std and normalized values for the backward
// pass (either pointer may be null).
void layer_norm_rows(const double* x, const double* gain, const double* bias, double eps,
                     double* y, int rows, int cols, double* inv_std, double* xhat);

}  // namespace grn::kernels
