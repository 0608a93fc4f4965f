#include "grn/reasoner.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "grn/ops.hpp"
#include "grn/udg.hpp"

namespace grn::reasoner {

using num::Tensor;

Tensor utterance_pool(const Tensor& h, const std::vector<std::pair<int, int>>& spans,
                      const TrackedParams& params) {
  if (h.ndim() != 2) throw std::invalid_argument("utterance_pool: features must be 2-D");
  if (spans.empty()) throw std::invalid_argument("utterance_pool: no spans to pool");
  const int len = h.shape()[0];
  const int d = h.shape()[1];
  const Tensor& w1 = params["pool.w1"];
  const Tensor& w2 = params["pool.w2"];
  const Tensor& v = params["pool.v"];
  std::vector<Tensor> pooled;
  pooled.reserve(spans.size());
  for (const auto& [s, e] : spans) {
    if (s < 0 || e > len || s >= e) {
      throw std::invalid_argument("utterance_pool: empty span [" + std::to_string(s) + ", " +
                                  std::to_string(e) + ") over " + std::to_string(len) + " rows");
    }
    const int m = e - s;
    Tensor f = num::slice_rows(h, s, e);                     // m x d
    Tensor mean_w = Tensor::full({1, m}, 1.0 / m);           // untracked constant
    Tensor q = num::matmul(mean_w, f);                       // 1 x d
    Tensor pre = num::add(num::matmul(f, w1), num::reshape(num::matmul(q, w2), {d}));
    Tensor scores = num::matmul(num::tanh(pre), v);          // m x 1
    Tensor alpha = num::softmax(scores, 0);
    pooled.push_back(num::matmul(num::transpose(alpha), f));  // 1 x d
  }
  return pooled.size() == 1 ? pooled[0] : num::concat(pooled, 0);
}

Tensor sequence_reason(const Tensor& cls_rows, const TrackedParams& params, int heads,
                       int d_model) {
  if (cls_rows.ndim() != 2 || cls_rows.shape()[0] != 4) {
    throw std::invalid_argument("sequence_reason: expected 4 candidate rows");
  }
  if (cls_rows.shape()[1] != d_model) {
    throw std::invalid_argument("sequence_reason: row width " +
                                std::to_string(cls_rows.shape()[1]) + " does not match d_model " +
                                std::to_string(d_model));
  }
  return encoder::multi_head_self_attention(cls_rows, params, "seq", heads, d_model);
}

Tensor gcn_layer(const Tensor& m, const Tensor& a_hat, const Tensor& w) {
  if (m.ndim() != 2 || a_hat.ndim() != 2) {
    throw std::invalid_argument("gcn_layer: features and adjacency must be 2-D");
  }
  if (a_hat.shape()[0] != a_hat.shape()[1] || a_hat.shape()[1] != m.shape()[0]) {
    throw std::invalid_argument("gcn_layer: adjacency " + std::to_string(a_hat.shape()[0]) + "x" +
                                std::to_string(a_hat.shape()[1]) + " does not match " +
                                std::to_string(m.shape()[0]) + " node rows");
  }
  return num::relu(num::matmul(num::matmul(a_hat, m), w));
}

Tensor cross_attention(const Tensor& m, const TrackedParams& params) {
  if (m.ndim() != 2) throw std::invalid_argument("cross_attention: features must be 2-D");
  const int n = m.shape()[0];
  const int d = m.shape()[1];
  Tensor l = num::matmul(m, params["cross.wl"]);  // n x d
  Tensor r = num::matmul(m, params["cross.wr"]);  // n x d
  const Tensor& v = params["cross.v"];            // d x 1
  Tensor ones_col = Tensor::full({n, 1}, 1.0);    // untracked constant
  std::vector<Tensor> score_rows;
  score_rows.reserve(n);
  for (int i = 0; i < n; ++i) {
    Tensor li = num::reshape(num::slice_rows(l, i, i + 1), {d});
    Tensor mi_tiled = num::matmul(ones_col, num::slice_rows(m, i, i + 1));  // n x d
    Tensor pre = num::add(num::add(r, li), num::mul(mi_tiled, m));
    Tensor s_i = num::matmul(num::tanh(pre), v);                            // n x 1
    score_rows.push_back(num::transpose(s_i));                              // 1 x n
  }
  Tensor s = n == 1 ? score_rows[0] : num::concat(score_rows, 0);  // n x n
  Tensor alpha = num::softmax(s, 1);
  return num::matmul(alpha, m);
}

Tensor graph_reason(const Tensor& g, const Tensor& a_hat, int layers, bool use_cross_attention,
                    const TrackedParams& params) {
  if (layers < 1) throw std::invalid_argument("graph_reason: need at least one gcn layer");
  Tensor m = g;
  for (int l = 0; l < layers; ++l) {
    m = gcn_layer(m, a_hat, params["gcn.w" + std::to_string(l)]);
  }
  if (use_cross_attention) m = cross_attention(m, params);
  return num::max_over_axis(m, 0);
}

Tensor aggregate(const Tensor& o_s, const Tensor& o_g, const TrackedParams& params,
                 bool scalar_gate) {
  if (o_s.ndim() != 2 || o_s.shape()[0] != 1 || o_g.ndim() != 2 || o_g.shape()[0] != 1 ||
      o_s.shape()[1] != o_g.shape()[1]) {
    throw std::invalid_argument("aggregate: inputs must both be 1 x d");
  }
  const int d = o_s.shape()[1];
  const Tensor& w = params["gate.w"];
  const int expect = scalar_gate ? 1 : d;
  if (w.ndim() != 2 || w.shape()[0] != 2 * d || w.shape()[1] != expect) {
    throw std::invalid_argument("aggregate: gate.w must be " + std::to_string(2 * d) + "x" +
                                std::to_string(expect));
  }
  Tensor cat = num::concat({o_s, o_g}, 1);            // 1 x 2d
  Tensor gate = num::sigmoid(num::matmul(cat, w));    // 1 x d, or 1 x 1 for the scalar gate
  if (scalar_gate && d > 1) gate = num::matmul(gate, Tensor::full({1, d}, 1.0));
  Tensor inv = num::scalar_add(num::neg(gate), 1.0);
  return num::add(num::mul(gate, o_s), num::mul(inv, o_g));
}

int CandidateScores::prediction() const {
  int best = 0;
  for (int i = 1; i < 4; ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

std::pair<CandidateScores, Tensor> score_and_loss(const Tensor& o, int label,
                                                  const TrackedParams& params) {
  if (o.ndim() != 2 || o.shape()[0] != 4) {
    throw std::invalid_argument("score_and_loss: expected one row per candidate (4 x d)");
  }
  if (label < 0 || label >= 4) {
    throw std::invalid_argument("score_and_loss: label out of range: " + std::to_string(label));
  }
  Tensor s = num::reshape(num::add(num::matmul(o, params["out.w"]), params["out.b"]), {4});
  Tensor p = num::softmax(s, 0);
  Tensor loss = num::neg(num::slice_rows(num::log(p), label, label + 1));
  CandidateScores cs;
  for (int i = 0; i < 4; ++i) {
    cs.scores[i] = s[i];
    cs.probs[i] = p[i];
  }
  return {cs, loss};
}

PreparedDialogue prepare_dialogue(const corpus::Dialogue& d, const corpus::Vocab& vocab,
                                  const TrainConfig& cfg) {
  const udg::Variant variant = udg::variant_from_string(cfg.udg_variant);
  PreparedDialogue pd;
  pd.id = d.id;
  pd.label = d.label;
  pd.turns = static_cast<int>(d.utterances.size());
  for (int i = 0; i < 4; ++i) {
    corpus::EncodedPair pair = corpus::encode_pair(d, i, vocab, cfg.max_len);
    const corpus::Dialogue* src = &d;
    corpus::Dialogue trimmed;
    if (pair.first_kept > 0) {
      // The token budget dropped leading utterances; the graph must cover
      // exactly the utterances that were encoded.
      trimmed = d;
      trimmed.utterances.erase(trimmed.utterances.begin(),
                               trimmed.utterances.begin() + pair.first_kept);
      src = &trimmed;
    }
    std::vector<udg::KeywordSet> kws =
        udg::dialogue_keywords(*src, i, cfg.textrank_window, cfg.textrank_damping,
                               cfg.textrank_iters, cfg.textrank_k);
    udg::KeywordGraph kg = udg::build_keyword_graph(kws);
    std::unordered_map<std::string, int> communities = udg::detect_communities(kg, cfg.seed);
    udg::UtteranceGraph g = udg::build_udg(*src, i, kws, communities, variant);
    udg::NormalizedAdjacency norm = udg::normalize_adjacency(g);
    pd.candidates[i] =
        PreparedCandidate{std::move(pair), Tensor({norm.nodes, norm.nodes}, norm.values)};
  }
  return pd;
}

ForwardResult forward(const PreparedDialogue& pd, const TrackedParams& params,
                      const TrainConfig& cfg, const encoder::EncoderConfig& ecfg) {
  if (cfg.no_gcn && cfg.no_sequence) {
    throw std::invalid_argument("forward: no reasoning branch enabled");
  }
  const int d = ecfg.d_model;
  std::vector<Tensor> cls_rows;
  std::array<Tensor, 4> graph_out;
  for (int i = 0; i < 4; ++i) {
    const PreparedCandidate& pc = pd.candidates[i];
    encoder::ContextEncoding enc = encoder::encode(pc.pair.ids, pc.pair.spans, params, ecfg);
    if (!cfg.no_sequence) cls_rows.push_back(enc.h_cls);
    if (!cfg.no_gcn) {
      Tensor g = utterance_pool(enc.h, enc.spans, params);
      graph_out[i] =
          graph_reason(g, pc.a_hat, cfg.gcn_layers, !cfg.no_cross_attention, params);
    }
  }
  Tensor o_s;
  if (!cfg.no_sequence) {
    Tensor cls_stack = num::concat(cls_rows, 0);  // 4 x d
    o_s = cfg.no_selfatt ? cls_stack : sequence_reason(cls_stack, params, cfg.heads, d);
  }
  std::vector<Tensor> o_rows;
  o_rows.reserve(4);
  for (int i = 0; i < 4; ++i) {
    if (cfg.no_gcn) {
      o_rows.push_back(num::slice_rows(o_s, i, i + 1));
    } else if (cfg.no_sequence) {
      o_rows.push_back(num::reshape(graph_out[i], {1, d}));
    } else {
      o_rows.push_back(aggregate(num::slice_rows(o_s, i, i + 1),
                                 num::reshape(graph_out[i], {1, d}), params, cfg.scalar_gate));
    }
  }
  auto [scores, loss] = score_and_loss(num::concat(o_rows, 0), pd.label, params);
  return ForwardResult{scores, std::move(loss)};
}

CandidateScores predict(const PreparedDialogue& pd, const ModelParams& params,
                        const TrainConfig& cfg, const encoder::EncoderConfig& ecfg) {
  TrackedParams tp(params);
  return forward(pd, tp, cfg, ecfg).scores;
}

}  // namespace grn::reasoner
