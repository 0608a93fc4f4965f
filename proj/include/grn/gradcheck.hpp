#pragma once

#include <functional>

#include "grn/ops.hpp"

namespace grn::num {

struct GradCheckResult {
  double max_rel_error = 0.0;
  int kinks_skipped = 0;  // coordinates excluded as non-differentiable
  int coords_checked = 0;
};

// Compares the tape gradient of scalar-valued f against central finite
// differences, coordinate by coordinate. Relative error per coordinate is
// |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
//
// Coordinates sitting on a kink (e.g. a relu input at exactly 0) are
// detected by the one-sided difference quotients disagreeing and are
// excluded from the maximum but counted in kinks_skipped. Non-finite values
// anywhere raise an error.
GradCheckResult grad_check(const std::function<Tensor(const Tensor&)>& f, const Tensor& x,
                           double eps = 1e-5);

}  // namespace grn::num
