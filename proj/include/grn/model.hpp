#pragma once

#include "grn/config.hpp"
#include "grn/corpus.hpp"
#include "grn/encoder.hpp"
#include "grn/params.hpp"

namespace grn {

// Everything a forward pass needs: run configuration, the vocabulary the
// embeddings are indexed by, and the named parameter tensors.
struct GrnModel {
  TrainConfig cfg;
  corpus::Vocab vocab;
  ModelParams params;

  encoder::EncoderConfig encoder_config() const {
    return encoder::make_encoder_config(cfg, vocab.size());
  }
};

// Fresh model with every weight drawn uniformly from +-1/sqrt(d_model) by a
// per-parameter generator keyed on (seed, name); layer-norm gains start at 1
// and all biases at 0. The parameter set covers the encoder, both pretraining
// heads, and the reasoning head.
GrnModel init_model(const TrainConfig& cfg, corpus::Vocab vocab);

}  // namespace grn
