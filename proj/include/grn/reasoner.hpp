#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "grn/config.hpp"
#include "grn/corpus.hpp"
#include "grn/encoder.hpp"
#include "grn/params.hpp"

namespace grn::reasoner {

// Attention-pools each token span of h (L x d) into one vector. The query for
// a span is the mean of its rows; token j is scored
//   s_j = v^T tanh(f_j W1 + q W2)
// and the pooled vector is the softmax(s)-weighted sum of the span's rows.
// Uses params pool.w1 (d x d), pool.w2 (d x d), pool.v (d x 1). Returns one
// row per span, in span order. Empty or out-of-range spans are rejected.
num::Tensor utterance_pool(const num::Tensor& h,
                           const std::vector<std::pair<int, int>>& spans,
                           const TrackedParams& params);

// Multi-head self-attention across the four candidate summary vectors
// (4 x d), using params seq.wq.h<i>/wk.h<i>/wv.h<i> and seq.wo. Lets each
// candidate's representation see the other candidates before scoring.
num::Tensor sequence_reason(const num::Tensor& cls_rows, const TrackedParams& params,
                            int heads, int d_model);

// One graph-convolution layer: relu(a_hat * m * w). a_hat is the normalized
// adjacency (n x n), m the node features (n x d), w the layer weight (d x d).
num::Tensor gcn_layer(const num::Tensor& m, const num::Tensor& a_hat, const num::Tensor& w);

// All-pairs content attention over node features m (n x d):
//   s_ij = v^T tanh(m_i W_l + m_j W_r + m_i (*) m_j)
// with softmax over j (self included); row i of the result is the
// alpha_i-weighted sum of the rows of m. Uses params cross.wl, cross.wr,
// cross.v.
num::Tensor cross_attention(const num::Tensor& m, const TrackedParams& params);

// Graph branch: `layers` gcn layers (weights gcn.w<l>) over the pooled node
// features, then pairwise content attention (skipped when use_cross_attention
// is false), then an elementwise max over the node rows. Returns a length-d
// vector.
num::Tensor graph_reason(const num::Tensor& g, const num::Tensor& a_hat, int layers,
                         bool use_cross_attention, const TrackedParams& params);

// Gated blend of the sequence and graph summaries (each 1 x d):
//   gate = sigmoid([o_s ; o_g] W_g),  o = gate (*) o_s + (1 - gate) (*) o_g
// With scalar_gate the gate weight is (2d x 1) and the single gate value is
// shared across all d coordinates; otherwise it is (2d x d), one gate per
// coordinate. Uses param gate.w.
num::Tensor aggregate(const num::Tensor& o_s, const num::Tensor& o_g,
                      const TrackedParams& params, bool scalar_gate);

// Final scores and probabilities over the four candidates.
struct CandidateScores {
  std::array<double, 4> scores{};
  std::array<double, 4> probs{};

  // Argmax of probs; ties resolve to the lowest index.
  int prediction() const;
};

// Affine score per candidate row of o (4 x d) using out.w (d x 1) and out.b,
// softmax over the four scores, negative log-likelihood of `label`. The loss
// tensor is tracked when the params are tape-bound.
std::pair<CandidateScores, num::Tensor> score_and_loss(const num::Tensor& o, int label,
                                                       const TrackedParams& params);

// Everything about one candidate that is constant across epochs: the encoded
// token sequence and the normalized adjacency of its utterance graph.
struct PreparedCandidate {
  corpus::EncodedPair pair;
  num::Tensor a_hat;  // (n_kept + 1) x (n_kept + 1), untracked
};

struct PreparedDialogue {
  std::string id;
  std::array<PreparedCandidate, 4> candidates;
  int label = 0;
  int turns = 0;  // utterance count of the source dialogue
};

// Encodes all four candidate pairings and builds their normalized utterance
// graphs once. When the token budget forces leading utterances to be dropped,
// the graph is built over the kept suffix so graph nodes and pooled spans
// stay aligned.
PreparedDialogue prepare_dialogue(const corpus::Dialogue& d, const corpus::Vocab& vocab,
                                  const TrainConfig& cfg);

struct ForwardResult {
  CandidateScores scores;
  num::Tensor loss;
};

// Full model pass over one prepared dialogue: encode each candidate pairing,
// pool utterance vectors and reason over the graph, self-attend across the
// four candidate summaries, blend the two branches, score. Honors the
// ablation flags in cfg (no_gcn, no_sequence, no_cross_attention, no_selfatt,
// scalar_gate); disabling both branches is an error.
ForwardResult forward(const PreparedDialogue& pd, const TrackedParams& params,
                      const TrainConfig& cfg, const encoder::EncoderConfig& ecfg);

// Untracked forward pass for evaluation; returns only the candidate scores.
CandidateScores predict(const PreparedDialogue& pd, const ModelParams& params,
                        const TrainConfig& cfg, const encoder::EncoderConfig& ecfg);

}  // namespace grn::reasoner
