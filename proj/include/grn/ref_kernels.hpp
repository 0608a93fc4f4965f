#pragma once

namespace grn::ref {

// Serial reference kernels: straightforward loops, no OpenMP, no tricks.
// They are the comparison baseline for the parallel kernels in grn::kernels,
// both in the unit tests (independent oracle) and in the kernel benchmark.

void gemm(bool ta, bool tb, int m, int n, int k, const double* a, const double* b, double* c,
          bool accumulate);

void map_tanh(const double* x, double* y, long n);
void map_sigmoid(const double* x, double* y, long n);
void map_relu(const double* x, double* y, long n);

void softmax_rows(const double* x, double* y, int rows, int cols);

void layer_norm_rows(const double* x, const double* gain, const double* bias, double eps,
                     double* y, int rows, int cols);

}  // namespace grn::ref
