#include "grn/params.hpp"

#include <stdexcept>

namespace grn {

num::Tensor& ModelParams::add(const std::string& name, num::Tensor t) {
  auto [it, fresh] = by_name_.try_emplace(name, std::move(t));
  if (!fresh) throw std::invalid_argument("params: duplicate parameter '" + name + "'");
  order_.push_back(name);
  return it->second;
}

num::Tensor& ModelParams::at(const std::string& name) {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw std::out_of_range("params: no parameter '" + name + "'");
  return it->second;
}

const num::Tensor& ModelParams::at(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw std::out_of_range("params: no parameter '" + name + "'");
  return it->second;
}

TrackedParams::TrackedParams(const ModelParams& params, num::Tape& tape)
    : src_(&params), tape_(&tape) {
  for (const std::string& name : params.names()) {
    view_.emplace(name, tape.leaf(params.at(name)));
  }
}

const num::Tensor& TrackedParams::operator[](const std::string& name) const {
  auto it = view_.find(name);
  if (it != view_.end()) return it->second;
  return src_->at(name);
}

void TrackedParams::replace(const std::string& name, num::Tensor t) {
  src_->at(name);  // existence check, throws with the name
  view_[name] = std::move(t);
}

std::span<const double> TrackedParams::grad(const std::string& name) const {
  if (!tape_) throw std::logic_error("params: gradient requested without a tape");
  auto it = view_.find(name);
  if (it == view_.end()) throw std::out_of_range("params: no parameter '" + name + "'");
  return tape_->grad(it->second);
}

}  // namespace grn
