#include "grn/gradcheck.hpp"

#include <cmath>
#include <stdexcept>

namespace grn::num {

GradCheckResult grad_check(const std::function<Tensor(const Tensor&)>& f, const Tensor& x,
                           double eps) {
  // analytic gradient via one reverse sweep
  std::vector<double> analytic;
  {
    Tape tape;
    Tensor xt = tape.leaf(x);
    Tensor loss = f(xt);
    if (loss.numel() != 1) {
      throw std::invalid_argument("grad_check: f must return a scalar, got shape " +
                                  shape_str(loss.shape()));
    }
    tape.backward(loss);
    auto g = tape.grad(xt);
    analytic.assign(g.begin(), g.end());
  }
  for (double v : analytic) {
    if (!std::isfinite(v)) throw std::runtime_error("grad_check: non-finite analytic gradient");
  }

  const double f0 = f(x).item();
  if (!std::isfinite(f0)) throw std::runtime_error("grad_check: non-finite f(x)");

  GradCheckResult res;
  Tensor xp = x;
  for (int i = 0; i < x.numel(); ++i) {
    const double orig = xp[i];
    xp[i] = orig + eps;
    const double fp = f(xp).item();
    xp[i] = orig - eps;
    const double fm = f(xp).item();
    xp[i] = orig;
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw std::runtime_error("grad_check: non-finite perturbed value at coordinate " +
                               std::to_string(i));
    }

    const double numeric = (fp - fm) / (2.0 * eps);
    const double fwd = (fp - f0) / eps;
    const double bwd = (f0 - fm) / eps;
    // One-sided quotients straddle the point; for smooth f they differ by
    // O(eps * f''), for a kink they differ by the slope jump itself.
    if (std::abs(fwd - bwd) > 1e-2 * std::max({1.0, std::abs(fwd), std::abs(bwd)})) {
      ++res.kinks_skipped;
      continue;
    }
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-8});
    res.max_rel_error = std::max(res.max_rel_error, std::abs(analytic[i] - numeric) / denom);
    ++res.coords_checked;
  }
  return res;
}

}  // namespace grn::num
