#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "grn/config.hpp"
#include "grn/corpus.hpp"
#include "grn/model.hpp"
#include "grn/reasoner.hpp"

namespace grn::harness {

// ---------------------------------------------------------------------------
// Optimizer

// Adam with bias correction. Moment buffers are keyed by parameter name and
// sized on first use, so one optimizer instance can drive any parameter set.
class Adam {
 public:
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  // One update over every parameter, reading gradients from the tape-bound
  // view (run Tape::backward first). Parameters that did not participate in
  // the loss have zero gradients and, with fresh moments, stay put. A
  // non-finite gradient raises an error naming the tensor.
  void step(ModelParams& params, const TrackedParams& grads);

  void set_lr(double lr) { lr_ = lr; }
  double lr() const { return lr_; }
  int steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  int t_ = 0;
  std::unordered_map<std::string, std::vector<double>> m_, v_;
};

// ---------------------------------------------------------------------------
// Metrics

// One ranked instance: the four candidate scores, the gold index, and the
// turn count of the source dialogue (for the per-turn breakdown).
struct ScoredInstance {
  std::array<double, 4> scores{};
  int label = 0;
  int turns = 0;
};

// 1-based rank of the gold candidate under descending scores. A candidate
// tied with gold outranks it only at a lower index.
int gold_rank(const std::array<double, 4>& scores, int label);

struct MetricRow {
  double r_at_1 = 0.0;
  double r_at_2 = 0.0;
  double mrr = 0.0;
  int count = 0;
};

// Overall metrics plus the fixed turn-bucket split (T = 2, 3, 4, 5, >= 6).
struct EvalReport {
  MetricRow overall;
  std::array<MetricRow, 5> by_turns{};

  static constexpr std::array<const char*, 5> kBucketNames = {"T=2", "T=3", "T=4", "T=5", "T>=6"};
  static int bucket_of(int turns);  // clamps below 2 and above 6

  // One-line summary "R@1 x.xxx R@2 x.xxx MRR x.xxx".
  std::string summary() const;
  // Aligned text table; per_turn adds one row per bucket.
  std::string to_table(bool per_turn) const;
  std::string to_json_text() const;
};

EvalReport compute_metrics(const std::vector<ScoredInstance>& instances);

// Scores every prepared dialogue with the model. Instances are scored in
// parallel over read-only parameters and reduced in input order, so the
// result is schedule-independent. Empty input is rejected.
EvalReport evaluate(const GrnModel& model, const std::vector<reasoner::PreparedDialogue>& data);

// prepare_dialogue on each input, then evaluate.
EvalReport evaluate_dialogues(const GrnModel& model, const std::vector<corpus::Dialogue>& data);

// ---------------------------------------------------------------------------
// Checkpoints

// Binary model artifact. Layout: the 4-byte magic "GRN1"; a little-endian
// u32 header length; a JSON header {"config": .., "vocab": [..], "tensors":
// [{"name", "shape", "offset", "count"}, ..]}; then every tensor's values as
// contiguous little-endian 32-bit floats, in header order, at the stated
// byte offsets from the payload start. Loading re-widens the floats to
// doubles: one save/load projects the weights onto float precision, and any
// further round-trip reproduces them bit-exactly.
void save_checkpoint(const GrnModel& model, const std::string& path);
GrnModel load_checkpoint(const std::string& path);

// ---------------------------------------------------------------------------
// Synthetic corpus

// Generator for the planted-keyword dialogues used by the trainer tests and
// the bundled demo data. Each dialogue hides one topic word in two
// nonadjacent context utterances and repeats a second topic word inside the
// final utterance; the four candidates share one surface template and carry
// one topic word each. The correct response is the candidate whose word
// forms the nonadjacent chain, so its dependency graph — and only its —
// links the response node to early context by topic edges. Topic words cycle
// through the gold/decoy/absent roles across dialogues, which keeps every
// word equally frequent in every role: candidate text alone carries no
// signal, and the graph structure carries all of it.
struct SyntheticSpec {
  int dialogues = 32;
  int min_turns = 4;  // context utterances per dialogue, sampled uniformly
  int max_turns = 7;
  std::uint64_t seed = 1;
  // With plant_chain off, no topic word ever appears in the context: the four
  // candidates become structurally exchangeable and the label is independent
  // of the text, so any fixed scorer ranks the gold response at chance. Used
  // as the random-baseline control.
  bool plant_chain = true;
};

std::vector<corpus::Dialogue> make_synthetic(const SyntheticSpec& spec);

// Native JSONL serialization (the `load_dialogues` inverse).
std::string to_native_json_line(const corpus::Dialogue& d);
void write_native_jsonl(const std::string& path, const std::vector<corpus::Dialogue>& dialogues);

// ---------------------------------------------------------------------------
// Training

struct PretrainEpoch {
  int epoch = 0;
  double loss = 0.0;
  double accuracy = 0.0;  // on the fixed held-out example set
};

struct PretrainResult {
  std::vector<PretrainEpoch> history;
  double final_accuracy = 0.0;
  std::string log;
};

// Matching-task pretraining: each epoch mixes neighbor examples (one pivot
// per dialogue) with order examples (one positive plus k_neg shuffled
// negatives) one-to-one, batches them, and applies Adam at lr_pretrain.
// Accuracy is measured on a fixed example set derived from the seed, never
// on the training batches. Updates the model in place.
PretrainResult pretrain(GrnModel& model, const std::vector<corpus::Dialogue>& train_set,
                        std::ostream* echo = nullptr);

struct TrainEpoch {
  int epoch = 0;
  double loss = 0.0;
  EvalReport valid;
};

struct TrainResult {
  GrnModel model;  // reloaded from the best checkpoint, so weights sit at float precision
  std::string checkpoint_path;
  int best_epoch = 0;
  double best_valid_r1 = 0.0;
  PretrainResult pretrain;
  std::vector<TrainEpoch> history;
  std::string log;
};

// End-to-end trainer: builds the vocabulary from the training set (or
// restores a checkpoint via cfg.init_from), optionally pretrains, then
// fine-tunes with the selection loss. After every epoch the model is scored
// on the validation set; the checkpoint with the best validation R@1 is kept
// (earliest epoch wins ties) and reloaded into the result. A non-finite loss
// aborts with a diagnostic. Fixed seeds give bit-identical logs.
TrainResult train(const TrainConfig& cfg, const std::vector<corpus::Dialogue>& train_set,
                  const std::vector<corpus::Dialogue>& valid_set, std::ostream* echo = nullptr);

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepAxis { GcnLayers, UdgVariant, Ablation };

SweepAxis sweep_axis_from_string(const std::string& s);
std::vector<std::string> default_sweep_values(SweepAxis axis);

struct SweepRow {
  std::string value;
  int best_epoch = 0;
  EvalReport valid;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::GcnLayers;
  std::vector<SweepRow> rows;
  std::string table() const;  // aligned text table
};

// Trains one model per axis value from the shared base config (same seed,
// per-value checkpoint path) and reports each run's best validation metrics.
// The runs are fully independent of each other. Empty `values` selects the
// axis defaults: layers 1-4, variants a-d, or the five ablation toggles plus
// the unablated baseline.
SweepResult sweep(const TrainConfig& base, SweepAxis axis, std::vector<std::string> values,
                  const std::vector<corpus::Dialogue>& train_set,
                  const std::vector<corpus::Dialogue>& valid_set, std::ostream* echo = nullptr);

// ---------------------------------------------------------------------------
// Gradient sweep

struct OpGradCheck {
  std::string name;
  double max_rel_error = 0.0;
  int coords_checked = 0;
  int kinks_skipped = 0;
};

// Finite-difference sweep over every differentiable tensor operation and the
// composite reasoning blocks, each on a small fixed-seed instance. Used by
// the `gradcheck` subcommand and the acceptance suite.
std::vector<OpGradCheck> op_gradient_checks();

}  // namespace grn::harness
