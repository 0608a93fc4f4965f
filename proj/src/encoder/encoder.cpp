#include "grn/encoder.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "grn/ops.hpp"

namespace grn::encoder {

using num::Tensor;

EncoderConfig make_encoder_config(const TrainConfig& cfg, int vocab_size) {
  if (vocab_size <= 0) {
    throw std::invalid_argument("encoder: vocab size must be positive, got " +
                                std::to_string(vocab_size));
  }
  if (cfg.d_model % cfg.heads != 0) {
    throw std::invalid_argument("encoder: d_model " + std::to_string(cfg.d_model) +
                                " not divisible by heads " + std::to_string(cfg.heads));
  }
  return EncoderConfig{vocab_size, cfg.d_model,       cfg.enc_layers,
                       cfg.heads,  cfg.max_positions, cfg.ff_dim};
}

Tensor multi_head_self_attention(const Tensor& x, const TrackedParams& p,
                                 const std::string& prefix, int heads, int d_model) {
  const int dh = d_model / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  std::vector<Tensor> head_out;
  head_out.reserve(heads);
  for (int i = 0; i < heads; ++i) {
    const std::string h = ".h" + std::to_string(i);
    Tensor q = num::matmul(x, p[prefix + ".wq" + h]);
    Tensor k = num::matmul(x, p[prefix + ".wk" + h]);
    Tensor v = num::matmul(x, p[prefix + ".wv" + h]);
    Tensor scores = num::scalar_mul(num::matmul(q, num::transpose(k)), scale);
    Tensor alpha = num::softmax(scores, 1);
    head_out.push_back(num::matmul(alpha, v));
  }
  Tensor merged = heads == 1 ? head_out[0] : num::concat(head_out, 1);
  return num::matmul(merged, p[prefix + ".wo"]);
}

namespace {

constexpr double kLayerNormEps = 1e-5;

}  // namespace

ContextEncoding encode(const std::vector<int>& ids,
                       const std::vector<std::pair<int, int>>& spans,
                       const TrackedParams& params, const EncoderConfig& cfg) {
  if (ids.empty()) throw std::invalid_argument("encode: empty id sequence");
  const int len = static_cast<int>(ids.size());
  if (len > cfg.max_positions) {
    throw std::runtime_error("encode: position overflow, sequence length " +
                             std::to_string(len) + " exceeds max positions " +
                             std::to_string(cfg.max_positions));
  }

  Tensor x = num::add(num::embedding_lookup(params["embed.token"], ids),
                      num::slice_rows(params["embed.pos"], 0, len));
  for (int b = 0; b < cfg.layers; ++b) {
    const std::string blk = "enc.b" + std::to_string(b);
    Tensor attn = multi_head_self_attention(x, params, blk + ".attn", cfg.heads, cfg.d_model);
    x = num::layer_norm(num::add(x, attn), params[blk + ".ln1.gain"], params[blk + ".ln1.bias"],
                        kLayerNormEps);
    Tensor hidden = num::relu(num::add(num::matmul(x, params[blk + ".ff.w1"]),
                                       params[blk + ".ff.b1"]));
    Tensor ff = num::add(num::matmul(hidden, params[blk + ".ff.w2"]), params[blk + ".ff.b2"]);
    x = num::layer_norm(num::add(x, ff), params[blk + ".ln2.gain"], params[blk + ".ln2.bias"],
                        kLayerNormEps);
  }

  ContextEncoding out;
  out.h_cls = num::slice_rows(x, 0, 1);
  out.h = std::move(x);
  out.spans = spans;
  return out;
}

namespace {

const char* head_prefix(corpus::PretrainExample::Task task) {
  return task == corpus::PretrainExample::Task::Order ? "head.uop" : "head.nup";
}

Tensor head_logits(const corpus::PretrainExample& e, const TrackedParams& params,
                   const EncoderConfig& cfg) {
  ContextEncoding enc = encode(e.ids, {}, params, cfg);
  const std::string head = head_prefix(e.task);
  return num::add(num::matmul(enc.h_cls, params[head + ".w"]), params[head + ".b"]);  // 1 x 2
}

}  // namespace

Tensor pretrain_loss(const std::vector<corpus::PretrainExample>& batch,
                     const TrackedParams& params, const EncoderConfig& cfg) {
  if (batch.empty()) throw std::invalid_argument("pretrain_loss: empty batch");
  std::vector<Tensor> losses;
  losses.reserve(batch.size());
  for (const corpus::PretrainExample& e : batch) {
    if (e.label < 0 || e.label > 1) {
      throw std::invalid_argument("pretrain_loss: label " + std::to_string(e.label) +
                                  " outside 0..1");
    }
    Tensor log_probs = num::log(num::softmax(head_logits(e, params, cfg), 1));
    Tensor picked = num::slice_rows(num::reshape(log_probs, {2}), e.label, e.label + 1);
    losses.push_back(num::neg(picked));
  }
  Tensor total = losses.size() == 1 ? losses[0] : num::sum(num::concat(losses, 0));
  return num::scalar_mul(total, 1.0 / static_cast<double>(batch.size()));
}

double pretrain_accuracy(const std::vector<corpus::PretrainExample>& batch,
                         const ModelParams& params, const EncoderConfig& cfg) {
  if (batch.empty()) throw std::invalid_argument("pretrain_accuracy: empty batch");
  TrackedParams view(params);
  int hits = 0;
  for (const corpus::PretrainExample& e : batch) {
    Tensor logits = head_logits(e, view, cfg);
    const int pred = logits[0] >= logits[1] ? 0 : 1;  // tie falls to label 0
    if (pred == e.label) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(batch.size());
}

}  // namespace grn::encoder
