#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "grn/tensor.hpp"

namespace grn {

// Named parameter tensors. Iteration follows insertion order, so optimizer
// state, checkpoints, and logs all see one stable ordering.
class ModelParams {
 public:
  num::Tensor& add(const std::string& name, num::Tensor t);  // duplicate name throws
  num::Tensor& at(const std::string& name);
  const num::Tensor& at(const std::string& name) const;
  bool contains(const std::string& name) const { return by_name_.count(name) > 0; }
  const std::vector<std::string>& names() const { return order_; }
  int size() const { return static_cast<int>(order_.size()); }

 private:
  std::vector<std::string> order_;
  std::unordered_map<std::string, num::Tensor> by_name_;
};

// One forward pass's view of the parameters. Bound to a tape, every
// parameter becomes a tracked leaf so gradients can be read back after the
// reverse sweep; unbound, lookups return the raw tensors for evaluation.
// `replace` swaps in a caller-supplied tensor for one name (used by
// finite-difference probes).
class TrackedParams {
 public:
  explicit TrackedParams(const ModelParams& params) : src_(&params) {}
  TrackedParams(const ModelParams& params, num::Tape& tape);

  const num::Tensor& operator[](const std::string& name) const;
  void replace(const std::string& name, num::Tensor t);

  bool tracked() const { return tape_ != nullptr; }
  num::Tape* tape() const { return tape_; }

  // Gradient of the named parameter; requires a bound tape after backward.
  std::span<const double> grad(const std::string& name) const;

 private:
  const ModelParams* src_;
  num::Tape* tape_ = nullptr;
  std::unordered_map<std::string, num::Tensor> view_;
};

}  // namespace grn
