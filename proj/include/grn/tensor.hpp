#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "grn/rng.hpp"

namespace grn::num {

class Tape;

std::string shape_str(const std::vector<int>& shape);

// Dense row-major tensor of 64-bit floats with value semantics. A tensor is
// either untracked (plain data) or bound to a Tape node, in which case
// operations on it record backward rules on that tape.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape);
  Tensor(std::vector<int> shape, std::vector<double> data);

  static Tensor scalar(double v);
  static Tensor zeros(std::vector<int> shape);
  static Tensor full(std::vector<int> shape, double value);
  static Tensor uniform(std::vector<int> shape, double lo, double hi, Rng& rng);

  const std::vector<int>& shape() const { return shape_; }
  int ndim() const { return static_cast<int>(shape_.size()); }
  int numel() const { return static_cast<int>(data_.size()); }
  int rows() const;  // 2-d only
  int cols() const;  // 2-d only
  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  double item() const;  // numel() == 1
  double operator[](int i) const { return data_[i]; }
  double& operator[](int i) { return data_[i]; }
  double at(int r, int c) const { return data_[static_cast<size_t>(r) * cols() + c]; }
  double& at(int r, int c) { return data_[static_cast<size_t>(r) * cols() + c]; }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool tracked() const { return tape_ != nullptr; }
  Tape* tape() const { return tape_; }
  int node() const { return node_; }

  // Gradient accumulated on the owning tape; valid after Tape::backward.
  std::span<const double> grad() const;

 private:
  std::vector<int> shape_;
  std::vector<double> data_;
  Tape* tape_ = nullptr;
  int node_ = -1;

  friend class Tape;
};

// Reverse-mode tape. Nodes are appended in forward evaluation order, so the
// reverse sweep visits them in reverse topological order exactly once.
// Gradients accumulate additively, which makes shared subexpressions and
// parameters reused in several places come out right. One tape per loss; a
// tape and the tensors bound to it belong to a single thread.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::span<const double>)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Registers a copy of `value` as a tracked leaf.
  Tensor leaf(const Tensor& value);

  // Appends an op node and binds `value` to it. `parents` holds node ids of
  // tracked inputs (-1 entries are ignored). `fn` receives the upstream
  // gradient of this node and must accumulate into parent grad buffers.
  Tensor adopt(Tensor value, std::vector<int> parents, BackwardFn fn);

  // Seeds d(loss)/d(loss) = 1 and runs the reverse sweep. `loss` must be a
  // scalar tracked on this tape. May run only once per tape.
  void backward(const Tensor& loss);

  std::span<const double> grad(const Tensor& t) const;
  std::span<double> grad_buf(int node) { return nodes_[node].grad; }
  const std::vector<int>& parents(int node) const { return nodes_[node].parents; }
  int size() const { return static_cast<int>(nodes_.size()); }
  bool backward_ran() const { return backward_ran_; }

 private:
  struct Node {
    std::vector<int> parents;
    std::vector<double> grad;
    BackwardFn backward;  // empty for leaves
  };

  int push(int numel, std::vector<int> parents, BackwardFn fn);

  std::vector<Node> nodes_;
  bool backward_ran_ = false;
};

// Tape shared by two operands: null if both untracked, error if they live on
// different tapes. `op` names the operation for the error message.
Tape* common_tape(const Tensor& a, const Tensor& b, const char* op);

}  // namespace grn::num
