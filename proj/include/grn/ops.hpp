#pragma once

#include <vector>

#include "grn/tensor.hpp"

namespace grn::num {

// Differentiable tensor operations. Every op computes its value eagerly and,
// when an operand is tracked, records a backward rule on the operand's tape.
// Shape violations throw with the op name and the offending shapes.

Tensor matmul(const Tensor& a, const Tensor& b);  // 2-d x 2-d

// Elementwise add. Shapes must match exactly, or b's shape must be a strict
// suffix of a's shape, in which case b broadcasts over the leading axes.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);  // elementwise, exact shapes

Tensor scalar_mul(const Tensor& a, double s);
Tensor scalar_add(const Tensor& a, double s);
Tensor neg(const Tensor& a);

Tensor concat(const std::vector<Tensor>& parts, int axis);  // 1-d axis 0, 2-d axis 0/1
Tensor slice_rows(const Tensor& a, int begin, int end);     // rows of 2-d, elements of 1-d
Tensor transpose(const Tensor& a);                          // 2-d
Tensor reshape(const Tensor& a, std::vector<int> shape);

Tensor tanh(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor log(const Tensor& a);

// Numerically stable softmax along `axis` (max subtraction per lane).
Tensor softmax(const Tensor& a, int axis);

// Reduces `axis` away by taking the maximum; gradient routes to the first
// maximum on ties.
Tensor max_over_axis(const Tensor& a, int axis);

Tensor sum(const Tensor& a);  // -> shape {1}

// Gathers rows of `table` (2-d) by id; gradient scatters back additively.
Tensor embedding_lookup(const Tensor& table, const std::vector<int>& ids);

// Row-wise layer normalization over the last axis of a 2-d input.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps);

}  // namespace grn::num
