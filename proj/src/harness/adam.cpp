#include <cmath>
#include <stdexcept>

#include "grn/harness.hpp"

namespace grn::harness {

Adam::Adam(double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  if (lr <= 0.0) throw std::invalid_argument("adam: learning rate must be positive");
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
    throw std::invalid_argument("adam: betas must lie in [0, 1)");
  }
  if (eps <= 0.0) throw std::invalid_argument("adam: eps must be positive");
}

void Adam::step(ModelParams& params, const TrackedParams& grads) {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, t_);
  const double bc2 = 1.0 - std::pow(beta2_, t_);
  for (const std::string& name : params.names()) {
    std::span<const double> g = grads.grad(name);
    std::vector<double>& w = params.at(name).data();
    std::vector<double>& m = m_[name];
    std::vector<double>& v = v_[name];
    if (m.empty()) m.assign(w.size(), 0.0);
    if (v.empty()) v.assign(w.size(), 0.0);
    if (g.size() != w.size()) {
      throw std::logic_error("adam: gradient size mismatch for '" + name + "'");
    }
    for (size_t i = 0; i < w.size(); ++i) {
      if (!std::isfinite(g[i])) {
        throw std::runtime_error("adam: non-finite gradient for '" + name + "'");
      }
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      w[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
    }
  }
}

}  // namespace grn::harness
