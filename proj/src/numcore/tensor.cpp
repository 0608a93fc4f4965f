#include "grn/tensor.hpp"

#include <sstream>
#include <stdexcept>

namespace grn::num {

std::string shape_str(const std::vector<int>& shape) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) os << "x";
    os << shape[i];
  }
  os << ")";
  return os.str();
}

static size_t shape_numel(const std::vector<int>& shape) {
  size_t n = 1;
  for (int d : shape) {
    if (d < 0) throw std::invalid_argument("tensor: negative dimension in " + shape_str(shape));
    n *= static_cast<size_t>(d);
  }
  return n;
}

Tensor::Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
  data_.assign(shape_numel(shape_), 0.0);
}

Tensor::Tensor(std::vector<int> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != shape_numel(shape_)) {
    throw std::invalid_argument("tensor: data size " + std::to_string(data_.size()) +
                                " does not match shape " + shape_str(shape_));
  }
}

Tensor Tensor::scalar(double v) { return Tensor({1}, {v}); }

Tensor Tensor::zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }

Tensor Tensor::full(std::vector<int> shape, double value) {
  Tensor t(std::move(shape));
  for (double& x : t.data_) x = value;
  return t;
}

Tensor Tensor::uniform(std::vector<int> shape, double lo, double hi, Rng& rng) {
  Tensor t(std::move(shape));
  for (double& x : t.data_) x = rng.uniform(lo, hi);
  return t;
}

int Tensor::rows() const {
  if (ndim() != 2) throw std::invalid_argument("tensor: rows() on shape " + shape_str(shape_));
  return shape_[0];
}

int Tensor::cols() const {
  if (ndim() != 2) throw std::invalid_argument("tensor: cols() on shape " + shape_str(shape_));
  return shape_[1];
}

double Tensor::item() const {
  if (numel() != 1) throw std::invalid_argument("tensor: item() on shape " + shape_str(shape_));
  return data_[0];
}

std::span<const double> Tensor::grad() const {
  if (!tracked()) throw std::logic_error("tensor: grad() on untracked tensor");
  return tape_->grad(*this);
}

int Tape::push(int numel, std::vector<int> parents, BackwardFn fn) {
  Node n;
  // keep only real parents; -1 marks an untracked operand
  for (int p : parents) {
    if (p >= 0) n.parents.push_back(p);
  }
  n.grad.assign(static_cast<size_t>(numel), 0.0);
  n.backward = std::move(fn);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

Tensor Tape::leaf(const Tensor& value) {
  Tensor t(value.shape(), value.data());
  t.tape_ = this;
  t.node_ = push(t.numel(), {}, nullptr);
  return t;
}

Tensor Tape::adopt(Tensor value, std::vector<int> parents, BackwardFn fn) {
  value.tape_ = this;
  value.node_ = push(value.numel(), std::move(parents), std::move(fn));
  return value;
}

void Tape::backward(const Tensor& loss) {
  if (loss.tape() != this) throw std::logic_error("tape: backward on tensor from another tape");
  if (loss.numel() != 1) {
    throw std::invalid_argument("tape: backward requires a scalar loss, got shape " +
                                shape_str(loss.shape()));
  }
  if (backward_ran_) throw std::logic_error("tape: backward already ran");
  backward_ran_ = true;
  nodes_[loss.node()].grad[0] = 1.0;
  for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) {
    if (nodes_[i].backward) nodes_[i].backward(*this, nodes_[i].grad);
  }
}

std::span<const double> Tape::grad(const Tensor& t) const {
  if (t.tape() != this) throw std::logic_error("tape: grad() on tensor from another tape");
  return nodes_[t.node()].grad;
}

Tape* common_tape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.tracked() && b.tracked() && a.tape() != b.tape()) {
    throw std::logic_error(std::string(op) + ": operands bound to different tapes");
  }
  return a.tracked() ? a.tape() : b.tape();
}

}  // namespace grn::num
