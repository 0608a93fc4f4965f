#pragma once

#include <string>
#include <utility>
#include <vector>

#include "grn/config.hpp"
#include "grn/corpus.hpp"
#include "grn/params.hpp"

namespace grn::encoder {

// Dimensions the encoder actually consumes; derived from the run config plus
// the vocabulary it will embed.
struct EncoderConfig {
  int vocab_size = 0;
  int d_model = 0;
  int layers = 0;
  int heads = 0;
  int max_positions = 0;
  int ff_dim = 0;
};

EncoderConfig make_encoder_config(const TrainConfig& cfg, int vocab_size);

// Multi-head scaled dot-product self-attention over x (L x d): per-head
// projections `prefix + ".wq.h<i>"` / ".wk.h<i>" / ".wv.h<i>", softmax over
// key positions, head outputs concatenated and projected by `prefix + ".wo"`.
// Shared by the encoder blocks and the cross-candidate sequence reasoner.
num::Tensor multi_head_self_attention(const num::Tensor& x, const TrackedParams& params,
                                      const std::string& prefix, int heads, int d_model);

// Contextual token representations for one encoded sequence.
struct ContextEncoding {
  num::Tensor h;      // L x d
  num::Tensor h_cls;  // 1 x d, row 0 of h
  std::vector<std::pair<int, int>> spans;  // carried through from the input
};

// Token embedding + learned positional embedding, then `layers` blocks of
// post-norm multi-head self-attention and feed-forward:
//   x <- layer_norm(x + mhsa(x)); x <- layer_norm(x + ffn(x))
// Deterministic given params. Sequences longer than max_positions raise a
// position-overflow error.
ContextEncoding encode(const std::vector<int>& ids,
                       const std::vector<std::pair<int, int>>& spans,
                       const TrackedParams& params, const EncoderConfig& cfg);

// Mean 2-way cross-entropy of the matching task head (order vs neighbor)
// applied to each example's h_cls. Returns a scalar tensor; tracked when the
// params are tape-bound.
num::Tensor pretrain_loss(const std::vector<corpus::PretrainExample>& batch,
                          const TrackedParams& params, const EncoderConfig& cfg);

// Fraction of examples whose head logits rank the true label first.
double pretrain_accuracy(const std::vector<corpus::PretrainExample>& batch,
                         const ModelParams& params, const EncoderConfig& cfg);

}  // namespace grn::encoder
