#include "grn/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "grn/udg.hpp"

namespace grn {

using nlohmann::json;

void TrainConfig::validate() const {
  auto positive = [](long v, const char* name) {
    if (v <= 0) {
      throw std::invalid_argument(std::string("config: ") + name + " must be positive, got " +
                                  std::to_string(v));
    }
  };
  positive(d_model, "d_model");
  positive(enc_layers, "enc_layers");
  positive(heads, "heads");
  positive(ff_dim, "ff_dim");
  positive(max_positions, "max_positions");
  positive(max_len, "max_len");
  positive(gcn_layers, "gcn_layers");
  if (textrank_window < 2) {
    throw std::invalid_argument("config: textrank_window must be >= 2, got " +
                                std::to_string(textrank_window));
  }
  positive(textrank_iters, "textrank_iters");
  positive(textrank_k, "textrank_k");
  positive(batch_size, "batch_size");
  positive(min_freq, "min_freq");
  if (d_model % heads != 0) {
    throw std::invalid_argument("config: d_model " + std::to_string(d_model) +
                                " not divisible by heads " + std::to_string(heads));
  }
  if (lr_finetune <= 0.0 || lr_pretrain <= 0.0) {
    throw std::invalid_argument("config: learning rates must be positive");
  }
  if (epochs < 0 || pretrain_epochs < 0 || k_neg < 0) {
    throw std::invalid_argument("config: epochs, pretrain_epochs and k_neg must be >= 0");
  }
  if (textrank_damping <= 0.0 || textrank_damping >= 1.0) {
    throw std::invalid_argument("config: textrank_damping must lie in (0, 1)");
  }
  if (stop_at_valid_r1 < 0.0 || stop_at_valid_r1 > 1.0) {
    throw std::invalid_argument("config: stop_at_valid_r1 must lie in [0, 1]");
  }
  udg::variant_from_string(udg_variant);  // throws on unknown letters
  if (data_format != "native" && data_format != "mutual") {
    throw std::invalid_argument("config: data_format must be 'native' or 'mutual', got '" +
                                data_format + "'");
  }
}

std::string TrainConfig::to_json_text() const {
  json j;
  j["d_model"] = d_model;
  j["enc_layers"] = enc_layers;
  j["heads"] = heads;
  j["ff_dim"] = ff_dim;
  j["max_positions"] = max_positions;
  j["max_len"] = max_len;
  j["gcn_layers"] = gcn_layers;
  j["udg_variant"] = udg_variant;
  j["textrank_window"] = textrank_window;
  j["textrank_damping"] = textrank_damping;
  j["textrank_iters"] = textrank_iters;
  j["textrank_k"] = textrank_k;
  j["lr_finetune"] = lr_finetune;
  j["lr_pretrain"] = lr_pretrain;
  j["epochs"] = epochs;
  j["pretrain_epochs"] = pretrain_epochs;
  j["batch_size"] = batch_size;
  j["seed"] = seed;
  j["min_freq"] = min_freq;
  j["k_neg"] = k_neg;
  j["stop_at_valid_r1"] = stop_at_valid_r1;
  j["no_pretrain"] = no_pretrain;
  j["no_gcn"] = no_gcn;
  j["no_sequence"] = no_sequence;
  j["no_cross_attention"] = no_cross_attention;
  j["no_selfatt"] = no_selfatt;
  j["scalar_gate"] = scalar_gate;
  j["train_path"] = train_path;
  j["valid_path"] = valid_path;
  j["data_format"] = data_format;
  j["checkpoint_out"] = checkpoint_out;
  j["init_from"] = init_from;
  return j.dump(2);
}

TrainConfig TrainConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be a JSON object");

  TrainConfig cfg;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "d_model") cfg.d_model = value.get<int>();
      else if (key == "enc_layers") cfg.enc_layers = value.get<int>();
      else if (key == "heads") cfg.heads = value.get<int>();
      else if (key == "ff_dim") cfg.ff_dim = value.get<int>();
      else if (key == "max_positions") cfg.max_positions = value.get<int>();
      else if (key == "max_len") cfg.max_len = value.get<int>();
      else if (key == "gcn_layers") cfg.gcn_layers = value.get<int>();
      else if (key == "udg_variant") cfg.udg_variant = value.get<std::string>();
      else if (key == "textrank_window") cfg.textrank_window = value.get<int>();
      else if (key == "textrank_damping") cfg.textrank_damping = value.get<double>();
      else if (key == "textrank_iters") cfg.textrank_iters = value.get<int>();
      else if (key == "textrank_k") cfg.textrank_k = value.get<int>();
      else if (key == "lr_finetune") cfg.lr_finetune = value.get<double>();
      else if (key == "lr_pretrain") cfg.lr_pretrain = value.get<double>();
      else if (key == "epochs") cfg.epochs = value.get<int>();
      else if (key == "pretrain_epochs") cfg.pretrain_epochs = value.get<int>();
      else if (key == "batch_size") cfg.batch_size = value.get<int>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "min_freq") cfg.min_freq = value.get<int>();
      else if (key == "k_neg") cfg.k_neg = value.get<int>();
      else if (key == "stop_at_valid_r1") cfg.stop_at_valid_r1 = value.get<double>();
      else if (key == "no_pretrain") cfg.no_pretrain = value.get<bool>();
      else if (key == "no_gcn") cfg.no_gcn = value.get<bool>();
      else if (key == "no_sequence") cfg.no_sequence = value.get<bool>();
      else if (key == "no_cross_attention") cfg.no_cross_attention = value.get<bool>();
      else if (key == "no_selfatt") cfg.no_selfatt = value.get<bool>();
      else if (key == "scalar_gate") cfg.scalar_gate = value.get<bool>();
      else if (key == "train_path") cfg.train_path = value.get<std::string>();
      else if (key == "valid_path") cfg.valid_path = value.get<std::string>();
      else if (key == "data_format") cfg.data_format = value.get<std::string>();
      else if (key == "checkpoint_out") cfg.checkpoint_out = value.get<std::string>();
      else if (key == "init_from") cfg.init_from = value.get<std::string>();
      else throw std::invalid_argument("config: unknown key '" + key + "'");
    } catch (const json::exception& e) {
      throw std::invalid_argument("config: bad value for '" + key + "': " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

TrainConfig TrainConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

}  // namespace grn
