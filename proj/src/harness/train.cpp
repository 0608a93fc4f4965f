#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "grn/harness.hpp"
#include "grn/ops.hpp"
#include "grn/rng.hpp"

namespace grn::harness {

namespace {

// Seed salts for the independent random streams of one run.
constexpr std::uint64_t kPretrainSalt = 0x70726574;  // example sampling, per epoch
constexpr std::uint64_t kPretrainEvalSalt = 0x6576c1;
constexpr std::uint64_t kShuffleSalt = 0x7368756f;  // fine-tune batch order, per epoch

class Logger {
 public:
  explicit Logger(std::ostream* echo) : echo_(echo) {}

  void line(const char* fmt, ...) __attribute__((format(printf, 2, 3))) {
    char buf[256];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    text_ += buf;
    text_ += '\n';
    if (echo_) (*echo_) << buf << '\n' << std::flush;
  }

  void append(const std::string& block) {
    text_ += block;
    if (echo_) (*echo_) << block << std::flush;
  }

  std::string take() { return std::move(text_); }

 private:
  std::string text_;
  std::ostream* echo_;
};

// One epoch's worth of matching-task examples, neighbor and order tasks
// mixed one-to-one per dialogue.
std::vector<corpus::PretrainExample> sample_pretrain_examples(
    const std::vector<corpus::Dialogue>& data, const corpus::Vocab& vocab, int max_len, int k_neg,
    Rng& rng) {
  std::vector<corpus::PretrainExample> out;
  for (const corpus::Dialogue& d : data) {
    for (const corpus::NupExample& e : corpus::make_nup_examples(d, vocab, rng)) {
      if (auto enc = corpus::encode_nup(e, max_len)) out.push_back(std::move(*enc));
    }
    for (const corpus::UopExample& e : corpus::make_uop_examples(d, vocab, rng, k_neg)) {
      if (auto enc = corpus::encode_uop(e, max_len)) out.push_back(std::move(*enc));
    }
  }
  rng.shuffle(out);
  return out;
}

// Fixed evaluation set: per dialogue, both neighbor examples of the middle
// pivot plus one ordered/shuffled pair. Independent of the training stream.
std::vector<corpus::PretrainExample> pretrain_eval_examples(
    const std::vector<corpus::Dialogue>& data, const corpus::Vocab& vocab, int max_len,
    std::uint64_t seed) {
  std::vector<corpus::PretrainExample> out;
  int idx = 0;
  for (const corpus::Dialogue& d : data) {
    const int n = static_cast<int>(d.utterances.size());
    if (n >= 3) {
      const int pivot = (n + 1) / 2 < 2 ? 2 : (n + 1) / 2;
      for (const corpus::NupExample& e : corpus::make_nup_examples_at(d, vocab, pivot)) {
        if (auto enc = corpus::encode_nup(e, max_len)) out.push_back(std::move(*enc));
      }
    }
    Rng rng(mix64(seed, 0xe0 + static_cast<std::uint64_t>(idx++)));
    for (const corpus::UopExample& e : corpus::make_uop_examples(d, vocab, rng, 1)) {
      if (auto enc = corpus::encode_uop(e, max_len)) out.push_back(std::move(*enc));
    }
  }
  return out;
}

template <typename T>
std::vector<std::vector<T>> chunks(const std::vector<T>& v, int size) {
  std::vector<std::vector<T>> out;
  for (size_t i = 0; i < v.size(); i += static_cast<size_t>(size)) {
    const size_t end = std::min(v.size(), i + static_cast<size_t>(size));
    out.emplace_back(v.begin() + static_cast<long>(i), v.begin() + static_cast<long>(end));
  }
  return out;
}

std::string axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::GcnLayers: return "gcn_layers";
    case SweepAxis::UdgVariant: return "udg_variant";
    case SweepAxis::Ablation: return "ablation";
  }
  return "?";
}

void apply_sweep_value(TrainConfig& cfg, SweepAxis axis, const std::string& value) {
  switch (axis) {
    case SweepAxis::GcnLayers:
      try {
        size_t used = 0;
        cfg.gcn_layers = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
      } catch (const std::exception&) {
        throw std::invalid_argument("sweep: bad gcn_layers value '" + value + "'");
      }
      return;
    case SweepAxis::UdgVariant:
      cfg.udg_variant = value;
      return;
    case SweepAxis::Ablation:
      if (value == "none") return;
      if (value == "no_pretrain") cfg.no_pretrain = true;
      else if (value == "no_gcn") cfg.no_gcn = true;
      else if (value == "no_sequence") cfg.no_sequence = true;
      else if (value == "no_cross_attention") cfg.no_cross_attention = true;
      else if (value == "no_selfatt") cfg.no_selfatt = true;
      else throw std::invalid_argument("sweep: unknown ablation '" + value + "'");
      return;
  }
}

}  // namespace

PretrainResult pretrain(GrnModel& model, const std::vector<corpus::Dialogue>& train_set,
                        std::ostream* echo) {
  if (train_set.empty()) throw std::invalid_argument("pretrain: empty dataset");
  const TrainConfig& cfg = model.cfg;
  const auto ecfg = model.encoder_config();
  Logger log(echo);
  PretrainResult result;

  const std::vector<corpus::PretrainExample> eval_set =
      pretrain_eval_examples(train_set, model.vocab, cfg.max_len, mix64(cfg.seed, kPretrainEvalSalt));
  if (eval_set.empty()) {
    throw std::invalid_argument("pretrain: no dialogue yields a matching-task example");
  }

  Adam opt(cfg.lr_pretrain);
  for (int epoch = 1; epoch <= cfg.pretrain_epochs; ++epoch) {
    Rng rng(mix64(mix64(cfg.seed, kPretrainSalt), static_cast<std::uint64_t>(epoch)));
    const std::vector<corpus::PretrainExample> examples =
        sample_pretrain_examples(train_set, model.vocab, cfg.max_len, cfg.k_neg, rng);
    if (examples.empty()) {
      throw std::invalid_argument("pretrain: no dialogue yields a matching-task example");
    }

    double loss_sum = 0.0;
    size_t seen = 0;
    int batch_index = 0;
    for (const auto& batch : chunks(examples, cfg.batch_size)) {
      ++batch_index;
      num::Tape tape;
      TrackedParams tp(model.params, tape);
      num::Tensor loss = encoder::pretrain_loss(batch, tp, ecfg);
      const double value = loss.item();
      if (!std::isfinite(value)) {
        throw std::runtime_error("pretrain diverged: non-finite loss at epoch " +
                                 std::to_string(epoch) + ", batch " +
                                 std::to_string(batch_index));
      }
      tape.backward(loss);
      opt.step(model.params, tp);
      loss_sum += value * static_cast<double>(batch.size());
      seen += batch.size();
    }

    const double acc = encoder::pretrain_accuracy(eval_set, model.params, ecfg);
    const double mean_loss = loss_sum / static_cast<double>(seen);
    result.history.push_back({epoch, mean_loss, acc});
    log.line("pretrain epoch %3d/%d  loss %.6f  acc %.4f", epoch, cfg.pretrain_epochs, mean_loss,
             acc);
  }

  result.final_accuracy = result.history.empty() ? 0.0 : result.history.back().accuracy;
  result.log = log.take();
  return result;
}

TrainResult train(const TrainConfig& cfg, const std::vector<corpus::Dialogue>& train_set,
                  const std::vector<corpus::Dialogue>& valid_set, std::ostream* echo) {
  cfg.validate();
  if (train_set.empty()) throw std::invalid_argument("train: empty training set");
  if (valid_set.empty()) throw std::invalid_argument("train: empty validation set");

  Logger log(echo);
  TrainResult result;
  result.checkpoint_path = cfg.checkpoint_out;

  GrnModel m;
  if (cfg.init_from.empty()) {
    m = init_model(cfg, corpus::Vocab::build(train_set, cfg.min_freq));
  } else {
    GrnModel restored = load_checkpoint(cfg.init_from);
    // The tensors must fit the architecture this run asks for.
    GrnModel expect = init_model(cfg, restored.vocab);
    for (const std::string& name : expect.params.names()) {
      if (!restored.params.contains(name) ||
          !(restored.params.at(name).shape() == expect.params.at(name).shape())) {
        throw std::runtime_error("train: checkpoint '" + cfg.init_from +
                                 "' does not match the configured architecture (parameter '" +
                                 name + "')");
      }
    }
    m.cfg = cfg;
    m.vocab = std::move(restored.vocab);
    m.params = std::move(restored.params);
    log.line("restored %d tensors from %s", m.params.size(), cfg.init_from.c_str());
  }

  if (!cfg.no_pretrain && cfg.pretrain_epochs > 0) {
    result.pretrain = pretrain(m, train_set, echo);
    log.append(result.pretrain.log);
  }

  std::vector<reasoner::PreparedDialogue> ptrain, pvalid;
  ptrain.reserve(train_set.size());
  for (const corpus::Dialogue& d : train_set) {
    ptrain.push_back(reasoner::prepare_dialogue(d, m.vocab, cfg));
  }
  pvalid.reserve(valid_set.size());
  for (const corpus::Dialogue& d : valid_set) {
    pvalid.push_back(reasoner::prepare_dialogue(d, m.vocab, cfg));
  }

  const auto ecfg = m.encoder_config();
  Adam opt(cfg.lr_finetune);
  double best_r1 = -1.0;
  int best_epoch = 0;
  save_checkpoint(m, cfg.checkpoint_out);  // valid artifact even with zero epochs

  std::vector<int> order(ptrain.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng rng(mix64(mix64(cfg.seed, kShuffleSalt), static_cast<std::uint64_t>(epoch)));
    rng.shuffle(order);

    double loss_sum = 0.0;
    int batch_index = 0;
    for (const auto& batch : chunks(order, cfg.batch_size)) {
      ++batch_index;
      num::Tape tape;
      TrackedParams tp(m.params, tape);
      num::Tensor total;
      for (int i : batch) {
        num::Tensor loss = reasoner::forward(ptrain[i], tp, cfg, ecfg).loss;
        total = total.numel() == 0 ? loss : num::add(total, loss);
      }
      num::Tensor mean = num::scalar_mul(total, 1.0 / static_cast<double>(batch.size()));
      const double value = mean.item();
      if (!std::isfinite(value)) {
        throw std::runtime_error("training diverged: non-finite loss at epoch " +
                                 std::to_string(epoch) + ", batch " +
                                 std::to_string(batch_index));
      }
      tape.backward(mean);
      opt.step(m.params, tp);
      loss_sum += value * static_cast<double>(batch.size());
    }

    const double epoch_loss = loss_sum / static_cast<double>(ptrain.size());
    const EvalReport valid = evaluate(m, pvalid);
    result.history.push_back({epoch, epoch_loss, valid});
    log.line("epoch %3d/%d  loss %.6f  valid R@1 %.4f R@2 %.4f MRR %.4f", epoch, cfg.epochs,
             epoch_loss, valid.overall.r_at_1, valid.overall.r_at_2, valid.overall.mrr);

    if (valid.overall.r_at_1 > best_r1) {
      best_r1 = valid.overall.r_at_1;
      best_epoch = epoch;
      save_checkpoint(m, cfg.checkpoint_out);
      log.line("new best valid R@1 %.4f at epoch %d", best_r1, best_epoch);
    }
    if (cfg.stop_at_valid_r1 > 0.0 && valid.overall.r_at_1 >= cfg.stop_at_valid_r1) {
      log.line("early stop: valid R@1 reached %.4f at epoch %d", valid.overall.r_at_1, epoch);
      break;
    }
  }

  result.best_epoch = best_epoch;
  result.best_valid_r1 = best_r1 < 0.0 ? 0.0 : best_r1;
  log.line("best valid R@1 %.4f at epoch %d; checkpoint %s", result.best_valid_r1, best_epoch,
           cfg.checkpoint_out.c_str());
  result.model = load_checkpoint(cfg.checkpoint_out);
  result.log = log.take();
  return result;
}

SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "gcn_layers") return SweepAxis::GcnLayers;
  if (s == "udg_variant") return SweepAxis::UdgVariant;
  if (s == "ablation") return SweepAxis::Ablation;
  throw std::invalid_argument("sweep: unknown axis '" + s +
                              "' (expected gcn_layers, udg_variant or ablation)");
}

std::vector<std::string> default_sweep_values(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::GcnLayers: return {"1", "2", "3", "4"};
    case SweepAxis::UdgVariant: return {"a", "b", "c", "d"};
    case SweepAxis::Ablation:
      return {"none", "no_pretrain", "no_gcn", "no_sequence", "no_cross_attention", "no_selfatt"};
  }
  return {};
}

std::string SweepResult::table() const {
  std::string out = axis_name(axis);
  out.resize(20, ' ');
  out += "best-epoch  valid R@1    R@2    MRR\n";
  char buf[120];
  for (const SweepRow& row : rows) {
    std::snprintf(buf, sizeof buf, "%-20s %9d      %.3f  %.3f  %.3f\n", row.value.c_str(),
                  row.best_epoch, row.valid.overall.r_at_1, row.valid.overall.r_at_2,
                  row.valid.overall.mrr);
    out += buf;
  }
  return out;
}

SweepResult sweep(const TrainConfig& base, SweepAxis axis, std::vector<std::string> values,
                  const std::vector<corpus::Dialogue>& train_set,
                  const std::vector<corpus::Dialogue>& valid_set, std::ostream* echo) {
  if (values.empty()) values = default_sweep_values(axis);
  SweepResult result;
  result.axis = axis;
  for (const std::string& value : values) {
    TrainConfig cfg = base;
    apply_sweep_value(cfg, axis, value);
    cfg.checkpoint_out = base.checkpoint_out + "." + axis_name(axis) + "-" + value;
    cfg.validate();
    if (echo) (*echo) << "== " << axis_name(axis) << " = " << value << " ==\n";
    TrainResult run = train(cfg, train_set, valid_set, echo);
    SweepRow row;
    row.value = value;
    row.best_epoch = run.best_epoch;
    if (run.best_epoch >= 1 && run.best_epoch <= static_cast<int>(run.history.size())) {
      row.valid = run.history[static_cast<size_t>(run.best_epoch) - 1].valid;
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

}  // namespace grn::harness
