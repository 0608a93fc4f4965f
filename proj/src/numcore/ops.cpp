#include "grn/ops.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "grn/kernels.hpp"

namespace grn::num {

namespace {

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
  throw std::invalid_argument(std::string(op) + ": shape mismatch " + shape_str(a.shape()) +
                              " vs " + shape_str(b.shape()));
}

[[noreturn]] void shape_error(const char* op, const Tensor& a, const std::string& detail) {
  throw std::invalid_argument(std::string(op) + ": " + detail + " for shape " +
                              shape_str(a.shape()));
}

// Lane geometry for reductions/softmax: the tensor is viewed as
// (outer, len, inner) with `len` running along the reduced axis.
struct Lanes {
  int outer, len, inner;
};

Lanes lanes_for(const char* op, const Tensor& a, int axis) {
  if (a.ndim() == 1 && axis == 0) return {1, a.shape()[0], 1};
  if (a.ndim() == 2 && axis == 0) return {1, a.shape()[0], a.shape()[1]};
  if (a.ndim() == 2 && axis == 1) return {a.shape()[0], a.shape()[1], 1};
  shape_error(op, a, "axis " + std::to_string(axis) + " invalid");
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.ndim() != 2 || b.ndim() != 2 || a.cols() != b.rows()) shape_error("matmul", a, b);
  const int m = a.rows(), k = a.cols(), n = b.cols();
  Tensor out({m, n});
  kernels::gemm(false, false, m, n, k, a.data().data(), b.data().data(), out.data().data(),
                false);
  Tape* tp = common_tape(a, b, "matmul");
  if (!tp) return out;
  const int pa = a.node(), pb = b.node();
  return tp->adopt(std::move(out), {pa, pb},
                   [pa, pb, av = a, bv = b, m, n, k](Tape& t, std::span<const double> up) {
                     if (pa >= 0) {
                       kernels::gemm(false, true, m, k, n, up.data(), bv.data().data(),
                                     t.grad_buf(pa).data(), true);
                     }
                     if (pb >= 0) {
                       kernels::gemm(true, false, k, n, m, av.data().data(), up.data(),
                                     t.grad_buf(pb).data(), true);
                     }
                   });
}

Tensor add(const Tensor& a, const Tensor& b) {
  const bool exact = a.same_shape(b);
  if (!exact) {
    // b must be a strict suffix of a's shape
    const auto& as = a.shape();
    const auto& bs = b.shape();
    bool suffix = bs.size() < as.size();
    if (suffix) {
      for (size_t i = 0; i < bs.size(); ++i) {
        if (bs[bs.size() - 1 - i] != as[as.size() - 1 - i]) suffix = false;
      }
    }
    if (!suffix) shape_error("add", a, b);
  }
  const int bn = b.numel();
  Tensor out(a.shape());
  for (int i = 0; i < a.numel(); ++i) out[i] = a[i] + b[i % bn];
  Tape* tp = common_tape(a, b, "add");
  if (!tp) return out;
  const int pa = a.node(), pb = b.node();
  return tp->adopt(std::move(out), {pa, pb},
                   [pa, pb, bn](Tape& t, std::span<const double> up) {
                     if (pa >= 0) {
                       auto g = t.grad_buf(pa);
                       for (size_t i = 0; i < up.size(); ++i) g[i] += up[i];
                     }
                     if (pb >= 0) {
                       auto g = t.grad_buf(pb);
                       for (size_t i = 0; i < up.size(); ++i) g[i % bn] += up[i];
                     }
                   });
}

Tensor sub(const Tensor& a, const Tensor& b) { return add(a, neg(b)); }

Tensor mul(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) shape_error("mul", a, b);
  Tensor out(a.shape());
  for (int i = 0; i < a.numel(); ++i) out[i] = a[i] * b[i];
  Tape* tp = common_tape(a, b, "mul");
  if (!tp) return out;
  const int pa = a.node(), pb = b.node();
  return tp->adopt(std::move(out), {pa, pb},
                   [pa, pb, av = a, bv = b](Tape& t, std::span<const double> up) {
                     if (pa >= 0) {
                       auto g = t.grad_buf(pa);
                       for (size_t i = 0; i < up.size(); ++i) g[i] += up[i] * bv[i];
                     }
                     if (pb >= 0) {
                       auto g = t.grad_buf(pb);
                       for (size_t i = 0; i < up.size(); ++i) g[i] += up[i] * av[i];
                     }
                   });
}

Tensor scalar_mul(const Tensor& a, double s) {
  Tensor out(a.shape());
  for (int i = 0; i < a.numel(); ++i) out[i] = a[i] * s;
  if (!a.tracked()) return out;
  const int pa = a.node();
  return a.tape()->adopt(std::move(out), {pa}, [pa, s](Tape& t, std::span<const double> up) {
    auto g = t.grad_buf(pa);
    for (size_t i = 0; i < up.size(); ++i) g[i] += up[i] * s;
  });
}

Tensor scalar_add(const Tensor& a, double s) {
  Tensor out(a.shape());
  for (int i = 0; i < a.numel(); ++i) out[i] = a[i] + s;
  if (!a.tracked()) return out;
  const int pa = a.node();
  return a.tape()->adopt(std::move(out), {pa}, [pa](Tape& t, std::span<const double> up) {
    auto g = t.grad_buf(pa);
    for (size_t i = 0; i < up.size(); ++i) g[i] += up[i];
  });
}

Tensor neg(const Tensor& a) { return scalar_mul(a, -1.0); }

Tensor concat(const std::vector<Tensor>& parts, int axis) {
  if (parts.empty()) throw std::invalid_argument("concat: no inputs");
  const Tensor& first = parts[0];
  if (!((first.ndim() == 1 && axis == 0) || (first.ndim() == 2 && (axis == 0 || axis == 1)))) {
    shape_error("concat", first, "axis " + std::to_string(axis) + " invalid");
  }
  Tape* tp = nullptr;
  for (const Tensor& p : parts) {
    if (p.ndim() != first.ndim()) shape_error("concat", first, p);
    for (int d = 0; d < first.ndim(); ++d) {
      if (d != axis && p.shape()[d] != first.shape()[d]) shape_error("concat", first, p);
    }
    if (p.tracked()) {
      if (tp && tp != p.tape()) throw std::logic_error("concat: operands bound to different tapes");
      tp = p.tape();
    }
  }

  std::vector<int> out_shape = first.shape();
  int total = 0;
  for (const Tensor& p : parts) total += p.shape()[axis];
  out_shape[axis] = total;
  Tensor out(out_shape);

  std::vector<int> parents;
  std::vector<int> sizes;  // extent of each part along `axis`
  for (const Tensor& p : parts) {
    parents.push_back(p.node());
    sizes.push_back(p.shape()[axis]);
  }

  if (first.ndim() == 1 || axis == 0) {
    // parts are contiguous blocks
    int off = 0;
    for (const Tensor& p : parts) {
      std::copy(p.data().begin(), p.data().end(), out.data().begin() + off);
      off += p.numel();
    }
    if (!tp) return out;
    std::vector<int> parts_numel;
    for (const Tensor& p : parts) parts_numel.push_back(p.numel());
    return tp->adopt(std::move(out), parents,
                     [parents, parts_numel](Tape& t, std::span<const double> up) {
                       size_t off = 0;
                       for (size_t pi = 0; pi < parents.size(); ++pi) {
                         if (parents[pi] >= 0) {
                           auto g = t.grad_buf(parents[pi]);
                           for (int i = 0; i < parts_numel[pi]; ++i) g[i] += up[off + i];
                         }
                         off += parts_numel[pi];
                       }
                     });
  }

  // axis == 1 on 2-d inputs: interleave columns row by row
  const int rows = first.shape()[0];
  {
    int col_off = 0;
    for (const Tensor& p : parts) {
      const int pc = p.shape()[1];
      for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < pc; ++c) out.at(r, col_off + c) = p.at(r, c);
      }
      col_off += pc;
    }
  }
  if (!tp) return out;
  return tp->adopt(std::move(out), parents,
                   [parents, sizes, rows, total](Tape& t, std::span<const double> up) {
                     int col_off = 0;
                     for (size_t pi = 0; pi < parents.size(); ++pi) {
                       const int pc = sizes[pi];
                       if (parents[pi] >= 0) {
                         auto g = t.grad_buf(parents[pi]);
                         for (int r = 0; r < rows; ++r) {
                           for (int c = 0; c < pc; ++c) {
                             g[static_cast<size_t>(r) * pc + c] +=
                                 up[static_cast<size_t>(r) * total + col_off + c];
                           }
                         }
                       }
                       col_off += pc;
                     }
                   });
}

Tensor slice_rows(const Tensor& a, int begin, int end) {
  const int nrows = a.ndim() == 1 ? a.shape()[0] : a.rows();
  if (a.ndim() > 2) shape_error("slice_rows", a, "rank > 2");
  if (begin < 0 || end > nrows || begin >= end) {
    shape_error("slice_rows", a,
                "range [" + std::to_string(begin) + "," + std::to_string(end) + ") invalid");
  }
  const int width = a.ndim() == 1 ? 1 : a.cols();
  std::vector<int> out_shape =
      a.ndim() == 1 ? std::vector<int>{end - begin} : std::vector<int>{end - begin, a.cols()};
  Tensor out(std::move(out_shape));
  std::copy(a.data().begin() + static_cast<long>(begin) * width,
            a.data().begin() + static_cast<long>(end) * width, out.data().begin());
  if (!a.tracked()) return out;
  const int pa = a.node();
  return a.tape()->adopt(std::move(out), {pa},
                         [pa, begin, width](Tape& t, std::span<const double> up) {
                           auto g = t.grad_buf(pa);
                           const long off = static_cast<long>(begin) * width;
                           for (size_t i = 0; i < up.size(); ++i) g[off + i] += up[i];
                         });
}

Tensor transpose(const Tensor& a) {
  if (a.ndim() != 2) shape_error("transpose", a, "rank != 2");
  const int r = a.rows(), c = a.cols();
  Tensor out({c, r});
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) out.at(j, i) = a.at(i, j);
  }
  if (!a.tracked()) return out;
  const int pa = a.node();
  return a.tape()->adopt(std::move(out), {pa}, [pa, r, c](Tape& t, std::span<const double> up) {
    auto g = t.grad_buf(pa);
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < c; ++j) g[static_cast<size_t>(i) * c + j] += up[static_cast<size_t>(j) * r + i];
    }
  });
}

Tensor reshape(const Tensor& a, std::vector<int> shape) {
  Tensor out(std::move(shape), a.data());
  if (!a.tracked()) return out;
  const int pa = a.node();
  return a.tape()->adopt(std::move(out), {pa}, [pa](Tape& t, std::span<const double> up) {
    auto g = t.grad_buf(pa);
    for (size_t i = 0; i < up.size(); ++i) g[i] += up[i];
  });
}

Tensor tanh(const Tensor& a) {
  Tensor out(a.shape());
  kernels::map_tanh(a.data().data(), out.data().data(), a.numel());
  if (!a.tracked()) return out;
  const int pa = a.node();
  std::vector<double> y = out.data();
  return a.tape()->adopt(std::move(out), {pa},
                         [pa, y = std::move(y)](Tape& t, std::span<const double> up) {
                           auto g = t.grad_buf(pa);
                           for (size_t i = 0; i < up.size(); ++i) g[i] += up[i] * (1.0 - y[i] * y[i]);
                         });
}

Tensor relu(const Tensor& a) {
  Tensor out(a.shape());
  kernels::map_relu(a.data().data(), out.data().data(), a.numel());
  if (!a.tracked()) return out;
  const int pa = a.node();
  return a.tape()->adopt(std::move(out), {pa},
                         [pa, x = a.data()](Tape& t, std::span<const double> up) {
                           auto g = t.grad_buf(pa);
                           for (size_t i = 0; i < up.size(); ++i) {
                             if (x[i] > 0.0) g[i] += up[i];
                           }
                         });
}

Tensor sigmoid(const Tensor& a) {
  Tensor out(a.shape());
  kernels::map_sigmoid(a.data().data(), out.data().data(), a.numel());
  if (!a.tracked()) return out;
  const int pa = a.node();
  std::vector<double> y = out.data();
  return a.tape()->adopt(std::move(out), {pa},
                         [pa, y = std::move(y)](Tape& t, std::span<const double> up) {
                           auto g = t.grad_buf(pa);
                           for (size_t i = 0; i < up.size(); ++i) g[i] += up[i] * y[i] * (1.0 - y[i]);
                         });
}

Tensor log(const Tensor& a) {
  Tensor out(a.shape());
  for (int i = 0; i < a.numel(); ++i) out[i] = std::log(a[i]);
  if (!a.tracked()) return out;
  const int pa = a.node();
  return a.tape()->adopt(std::move(out), {pa},
                         [pa, x = a.data()](Tape& t, std::span<const double> up) {
                           auto g = t.grad_buf(pa);
                           for (size_t i = 0; i < up.size(); ++i) g[i] += up[i] / x[i];
                         });
}

Tensor softmax(const Tensor& a, int axis) {
  const Lanes ln = lanes_for("softmax", a, axis);
  Tensor out(a.shape());
  if (ln.inner == 1) {
    kernels::softmax_rows(a.data().data(), out.data().data(), ln.outer, ln.len);
  } else {
    // strided lanes (2-d, axis 0)
    for (int i = 0; i < ln.inner; ++i) {
      double mx = a[i];
      for (int l = 1; l < ln.len; ++l) mx = std::max(mx, a[l * ln.inner + i]);
      double sum = 0.0;
      for (int l = 0; l < ln.len; ++l) {
        const double e = std::exp(a[l * ln.inner + i] - mx);
        out[l * ln.inner + i] = e;
        sum += e;
      }
      for (int l = 0; l < ln.len; ++l) out[l * ln.inner + i] /= sum;
    }
  }
  if (!a.tracked()) return out;
  const int pa = a.node();
  std::vector<double> y = out.data();
  return a.tape()->adopt(std::move(out), {pa},
                         [pa, y = std::move(y), ln](Tape& t, std::span<const double> up) {
                           auto g = t.grad_buf(pa);
                           for (int o = 0; o < ln.outer; ++o) {
                             for (int i = 0; i < ln.inner; ++i) {
                               const long base = static_cast<long>(o) * ln.len * ln.inner + i;
                               double dot = 0.0;
                               for (int l = 0; l < ln.len; ++l) {
                                 const long idx = base + static_cast<long>(l) * ln.inner;
                                 dot += up[idx] * y[idx];
                               }
                               for (int l = 0; l < ln.len; ++l) {
                                 const long idx = base + static_cast<long>(l) * ln.inner;
                                 g[idx] += y[idx] * (up[idx] - dot);
                               }
                             }
                           }
                         });
}

Tensor max_over_axis(const Tensor& a, int axis) {
  const Lanes ln = lanes_for("max_over_axis", a, axis);
  std::vector<int> out_shape;
  if (a.ndim() == 1) {
    out_shape = {1};
  } else if (axis == 0) {
    out_shape = {a.shape()[1]};
  } else {
    out_shape = {a.shape()[0]};
  }
  Tensor out(out_shape);
  std::vector<int> argmax(static_cast<size_t>(ln.outer) * ln.inner);
  for (int o = 0; o < ln.outer; ++o) {
    for (int i = 0; i < ln.inner; ++i) {
      const long base = static_cast<long>(o) * ln.len * ln.inner + i;
      double best = a[base];
      int best_l = 0;
      for (int l = 1; l < ln.len; ++l) {
        const double v = a[base + static_cast<long>(l) * ln.inner];
        if (v > best) {
          best = v;
          best_l = l;
        }
      }
      out[static_cast<size_t>(o) * ln.inner + i] = best;
      argmax[static_cast<size_t>(o) * ln.inner + i] = best_l;
    }
  }
  if (!a.tracked()) return out;
  const int pa = a.node();
  return a.tape()->adopt(std::move(out), {pa},
                         [pa, argmax, ln](Tape& t, std::span<const double> up) {
                           auto g = t.grad_buf(pa);
                           for (int o = 0; o < ln.outer; ++o) {
                             for (int i = 0; i < ln.inner; ++i) {
                               const size_t oi = static_cast<size_t>(o) * ln.inner + i;
                               const long idx = static_cast<long>(o) * ln.len * ln.inner +
                                                static_cast<long>(argmax[oi]) * ln.inner + i;
                               g[idx] += up[oi];
                             }
                           }
                         });
}

Tensor sum(const Tensor& a) {
  double acc = 0.0;
  for (int i = 0; i < a.numel(); ++i) acc += a[i];
  Tensor out = Tensor::scalar(acc);
  if (!a.tracked()) return out;
  const int pa = a.node();
  return a.tape()->adopt(std::move(out), {pa}, [pa](Tape& t, std::span<const double> up) {
    auto g = t.grad_buf(pa);
    for (double& gi : g) gi += up[0];
  });
}

Tensor embedding_lookup(const Tensor& table, const std::vector<int>& ids) {
  if (table.ndim() != 2) shape_error("embedding_lookup", table, "table rank != 2");
  const int v = table.rows(), d = table.cols();
  for (int id : ids) {
    if (id < 0 || id >= v) {
      throw std::out_of_range("embedding_lookup: id " + std::to_string(id) +
                              " outside table with " + std::to_string(v) + " rows");
    }
  }
  Tensor out({static_cast<int>(ids.size()), d});
  for (size_t r = 0; r < ids.size(); ++r) {
    std::copy(table.data().begin() + static_cast<long>(ids[r]) * d,
              table.data().begin() + static_cast<long>(ids[r] + 1) * d,
              out.data().begin() + static_cast<long>(r) * d);
  }
  if (!table.tracked()) return out;
  const int pt = table.node();
  return table.tape()->adopt(std::move(out), {pt},
                             [pt, ids, d](Tape& t, std::span<const double> up) {
                               auto g = t.grad_buf(pt);
                               for (size_t r = 0; r < ids.size(); ++r) {
                                 const long src = static_cast<long>(r) * d;
                                 const long dst = static_cast<long>(ids[r]) * d;
                                 for (int j = 0; j < d; ++j) g[dst + j] += up[src + j];
                               }
                             });
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps) {
  if (x.ndim() != 2) shape_error("layer_norm", x, "rank != 2");
  const int rows = x.rows(), cols = x.cols();
  if (gain.ndim() != 1 || gain.shape()[0] != cols) shape_error("layer_norm", x, gain);
  if (bias.ndim() != 1 || bias.shape()[0] != cols) shape_error("layer_norm", x, bias);

  Tensor out({rows, cols});
  std::vector<double> inv_std(rows);
  std::vector<double> xhat(static_cast<size_t>(rows) * cols);
  kernels::layer_norm_rows(x.data().data(), gain.data().data(), bias.data().data(), eps,
                           out.data().data(), rows, cols, inv_std.data(), xhat.data());

  Tape* tp = common_tape(x, gain, "layer_norm");
  if (bias.tracked()) {
    if (tp && tp != bias.tape()) throw std::logic_error("layer_norm: operands bound to different tapes");
    tp = bias.tape();
  }
  if (!tp) return out;
  const int px = x.node(), pg = gain.node(), pb = bias.node();
  return tp->adopt(
      std::move(out), {px, pg, pb},
      [px, pg, pb, gv = gain.data(), inv_std = std::move(inv_std), xhat = std::move(xhat), rows,
       cols](Tape& t, std::span<const double> up) {
        for (int r = 0; r < rows; ++r) {
          const long base = static_cast<long>(r) * cols;
          if (pg >= 0) {
            auto g = t.grad_buf(pg);
            for (int j = 0; j < cols; ++j) g[j] += up[base + j] * xhat[base + j];
          }
          if (pb >= 0) {
            auto g = t.grad_buf(pb);
            for (int j = 0; j < cols; ++j) g[j] += up[base + j];
          }
          if (px >= 0) {
            auto g = t.grad_buf(px);
            double mean_dxh = 0.0, mean_dxh_xh = 0.0;
            for (int j = 0; j < cols; ++j) {
              const double dxh = up[base + j] * gv[j];
              mean_dxh += dxh;
              mean_dxh_xh += dxh * xhat[base + j];
            }
            mean_dxh /= cols;
            mean_dxh_xh /= cols;
            for (int j = 0; j < cols; ++j) {
              const double dxh = up[base + j] * gv[j];
              g[base + j] += (dxh - mean_dxh - xhat[base + j] * mean_dxh_xh) * inv_std[r];
            }
          }
        }
      });
}

}  // namespace grn::num
