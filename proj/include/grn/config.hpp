#pragma once

#include <cstdint>
#include <string>

namespace grn {

// Flat run configuration, loadable from a JSON object with exactly these
// keys (unknown keys are rejected). Defaults are the desk-scale regime:
// small dims and a large learning rate so training finishes in minutes on
// one core.
struct TrainConfig {
  // encoder dims
  int d_model = 64;
  int enc_layers = 2;
  int heads = 4;
  int ff_dim = 128;
  int max_positions = 256;
  int max_len = 256;  // token budget for encoded pairs

  // graph construction
  int gcn_layers = 2;
  std::string udg_variant = "d";
  int textrank_window = 2;
  double textrank_damping = 0.85;
  int textrank_iters = 50;
  int textrank_k = 3;

  // optimization
  double lr_finetune = 1e-3;
  double lr_pretrain = 1e-3;
  int epochs = 20;
  int pretrain_epochs = 10;
  int batch_size = 8;
  std::uint64_t seed = 7;
  int min_freq = 1;
  int k_neg = 1;            // shuffled negatives per utterance-order example
  double stop_at_valid_r1 = 0.0;  // stop fine-tuning once valid R@1 reaches this (0 = off)

  // ablation toggles
  bool no_pretrain = false;
  bool no_gcn = false;
  bool no_sequence = false;
  bool no_cross_attention = false;
  bool no_selfatt = false;
  bool scalar_gate = false;  // one shared gate value instead of a per-dim gate

  // data and artifacts
  std::string train_path;
  std::string valid_path;
  std::string data_format = "native";  // or "mutual"
  std::string checkpoint_out = "model.ckpt";
  std::string init_from;

  void validate() const;  // throws std::invalid_argument on bad values

  std::string to_json_text() const;
  static TrainConfig from_json_text(const std::string& text);
  static TrainConfig load(const std::string& path);
};

}  // namespace grn
