// Command-line front end: pretraining, training, evaluation, dependency-graph
// export, gradient checking, and config sweeps over one shared JSON config.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "grn/harness.hpp"
#include "grn/udg.hpp"

namespace {

using grn::TrainConfig;
namespace corpus = grn::corpus;
namespace harness = grn::harness;
namespace udg = grn::udg;

corpus::DataFormat format_from(const std::string& s) {
  if (s == "native") return corpus::DataFormat::Native;
  if (s == "mutual") return corpus::DataFormat::Mutual;
  throw std::invalid_argument("unknown data format '" + s + "' (expected native or mutual)");
}

std::vector<corpus::Dialogue> load_data(const std::string& path, const std::string& format,
                                        const char* what) {
  if (path.empty()) {
    throw std::invalid_argument(std::string("config: ") + what + " is empty");
  }
  return corpus::load_dialogues(path, format_from(format));
}

void apply_ablations(TrainConfig& cfg, const std::vector<std::string>& flags) {
  for (const std::string& f : flags) {
    if (f == "no_pretrain") cfg.no_pretrain = true;
    else if (f == "no_gcn") cfg.no_gcn = true;
    else if (f == "no_sequence") cfg.no_sequence = true;
    else if (f == "no_cross_attention") cfg.no_cross_attention = true;
    else if (f == "no_selfatt") cfg.no_selfatt = true;
    else {
      throw std::invalid_argument(
          "unknown ablation flag '" + f +
          "' (expected no_pretrain, no_gcn, no_sequence, no_cross_attention or no_selfatt)");
    }
  }
}

grn::GrnModel starting_model(const TrainConfig& cfg, const std::vector<corpus::Dialogue>& train) {
  if (!cfg.init_from.empty()) return harness::load_checkpoint(cfg.init_from);
  return grn::init_model(cfg, corpus::Vocab::build(train, cfg.min_freq));
}

int run_pretrain(const std::string& config_path) {
  const TrainConfig cfg = TrainConfig::load(config_path);
  const auto train = load_data(cfg.train_path, cfg.data_format, "train_path");
  grn::GrnModel model = starting_model(cfg, train);
  const harness::PretrainResult res = harness::pretrain(model, train, &std::cout);
  harness::save_checkpoint(model, cfg.checkpoint_out);
  std::printf("final matching-task accuracy %.4f\n", res.final_accuracy);
  std::printf("saved checkpoint %s\n", cfg.checkpoint_out.c_str());
  return 0;
}

int run_train(const std::string& config_path, const std::vector<std::string>& ablations) {
  TrainConfig cfg = TrainConfig::load(config_path);
  apply_ablations(cfg, ablations);
  const auto train = load_data(cfg.train_path, cfg.data_format, "train_path");
  std::vector<corpus::Dialogue> valid;
  if (cfg.valid_path.empty()) {
    std::cout << "validation on the training set (valid_path empty)\n";
    valid = train;
  } else {
    valid = load_data(cfg.valid_path, cfg.data_format, "valid_path");
  }
  harness::train(cfg, train, valid, &std::cout);
  return 0;
}

int run_eval(const std::string& model_path, const std::string& data_path, std::string format,
             bool per_turn, bool json) {
  const grn::GrnModel model = harness::load_checkpoint(model_path);
  if (format.empty()) format = model.cfg.data_format;
  const auto data = load_data(data_path, format, "data");
  const harness::EvalReport rep = harness::evaluate_dialogues(model, data);
  if (json) {
    std::cout << rep.to_json_text() << "\n";
    return 0;
  }
  std::cout << rep.summary() << "\n";
  if (per_turn) std::cout << rep.to_table(true);
  return 0;
}

int run_graph(const std::string& data_path, const std::string& format, const std::string& id,
              const std::string& variant, const std::string& out_format, int candidate,
              std::uint64_t seed) {
  const auto data = load_data(data_path, format, "data");
  const corpus::Dialogue* dialogue = nullptr;
  for (const corpus::Dialogue& d : data) {
    if (d.id == id) {
      dialogue = &d;
      break;
    }
  }
  if (!dialogue) throw std::invalid_argument("no dialogue with id '" + id + "' in " + data_path);
  const int ci = candidate >= 0 ? candidate : dialogue->label;
  if (ci > 3) throw std::invalid_argument("candidate index must lie in 0..3");
  const udg::UtteranceGraph g =
      udg::build_dialogue_udg(*dialogue, ci, udg::variant_from_string(variant), seed);

  auto node_name = [&](int i) {
    return i + 1 == g.nodes ? std::string("r") : "u" + std::to_string(i + 1);
  };

  if (out_format == "json") {
    std::string nodes, edges;
    for (int i = 0; i < g.nodes; ++i) {
      nodes += (i ? ", " : "") + ("\"" + node_name(i) + "\"");
    }
    for (size_t e = 0; e < g.edges.size(); ++e) {
      const udg::Edge& ed = g.edges[e];
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "%s{\"src\": %d, \"dst\": %d, \"type\": \"%s\", \"directed\": %s}",
                    e ? ", " : "", ed.src, ed.dst,
                    ed.type == udg::EdgeType::Topic ? "topic" : "chrono",
                    ed.directed ? "true" : "false");
      edges += buf;
    }
    std::printf("{\"id\": \"%s\", \"candidate\": %d, \"variant\": \"%c\", \"nodes\": [%s], "
                "\"edges\": [%s]}\n",
                dialogue->id.c_str(), ci, udg::variant_letter(g.variant), nodes.c_str(),
                edges.c_str());
    return 0;
  }
  if (out_format != "dot") {
    throw std::invalid_argument("unknown graph format '" + out_format +
                                "' (expected dot or json)");
  }

  const bool digraph = g.has_directed_edge();
  std::printf("%s udg {\n", digraph ? "digraph" : "graph");
  std::printf("  label=\"%s candidate %d variant %c\";\n", dialogue->id.c_str(), ci,
              udg::variant_letter(g.variant));
  for (int i = 0; i < g.nodes; ++i) {
    std::printf("  %s%s;\n", node_name(i).c_str(), i + 1 == g.nodes ? " [shape=box]" : "");
  }
  for (const udg::Edge& e : g.edges) {
    std::string attrs;
    if (e.type == udg::EdgeType::Topic) attrs = "style=dashed";
    if (digraph && !e.directed) attrs += attrs.empty() ? "dir=none" : ", dir=none";
    std::printf("  %s %s %s%s;\n", node_name(e.src).c_str(), digraph ? "->" : "--",
                node_name(e.dst).c_str(), attrs.empty() ? "" : (" [" + attrs + "]").c_str());
  }
  std::printf("}\n");
  return 0;
}

int run_gradcheck() {
  const auto checks = harness::op_gradient_checks();
  bool ok = true;
  for (const harness::OpGradCheck& c : checks) {
    const bool pass = c.max_rel_error < 1e-4;
    ok = ok && pass;
    std::printf("%-28s max rel err %.3e  coords %3d  kinks skipped %d  %s\n", c.name.c_str(),
                c.max_rel_error, c.coords_checked, c.kinks_skipped, pass ? "PASS" : "FAIL");
  }
  std::printf("%s\n", ok ? "all gradients match finite differences"
                         : "gradient mismatch detected");
  return ok ? 0 : 1;
}

int run_sweep(const std::string& config_path, const std::string& axis_name,
              std::vector<std::string> values) {
  const TrainConfig cfg = TrainConfig::load(config_path);
  const harness::SweepAxis axis = harness::sweep_axis_from_string(axis_name);
  const auto train = load_data(cfg.train_path, cfg.data_format, "train_path");
  std::vector<corpus::Dialogue> valid;
  if (cfg.valid_path.empty()) {
    std::cout << "validation on the training set (valid_path empty)\n";
    valid = train;
  } else {
    valid = load_data(cfg.valid_path, cfg.data_format, "valid_path");
  }
  const harness::SweepResult res =
      harness::sweep(cfg, axis, std::move(values), train, valid, &std::cout);
  std::cout << "\n" << res.table();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph reasoning over utterance dependency graphs for response selection"};
  app.require_subcommand(1);

  std::string config_path, model_path, data_path, id, format;
  std::string variant = "d", graph_format = "dot", axis;
  std::vector<std::string> ablations, values;
  bool per_turn = false, json = false;
  int candidate = -1;
  std::uint64_t graph_seed = 7;

  CLI::App* pre = app.add_subcommand("pretrain", "matching-task pretraining from a JSON config");
  pre->add_option("--config", config_path, "JSON config file")->required();

  CLI::App* tr = app.add_subcommand("train", "pretrain (unless disabled) and fine-tune");
  tr->add_option("--config", config_path, "JSON config file")->required();
  tr->add_option("--ablate", ablations,
                 "disable a component (no_pretrain, no_gcn, no_sequence, no_cross_attention, "
                 "no_selfatt); repeatable");

  CLI::App* ev = app.add_subcommand("eval", "score a dataset with a checkpoint");
  ev->add_option("--model", model_path, "checkpoint file")->required();
  ev->add_option("--data", data_path, "dataset file (JSON lines)")->required();
  ev->add_option("--format", format, "dataset format: native or mutual");
  ev->add_flag("--per-turn", per_turn, "add the per-turn-count breakdown");
  ev->add_flag("--json", json, "emit JSON instead of text");

  CLI::App* gr = app.add_subcommand("graph", "export one dialogue's dependency graph");
  gr->add_option("--data", data_path, "dataset file (JSON lines)")->required();
  gr->add_option("--id", id, "dialogue id")->required();
  gr->add_option("--variant", variant, "edge scheme a, b, c or d")
      ->check(CLI::IsMember({"a", "b", "c", "d", "A", "B", "C", "D"}));
  gr->add_option("--format", graph_format, "output format: dot or json")
      ->check(CLI::IsMember({"dot", "json"}));
  gr->add_option("--candidate", candidate, "candidate index 0..3 (default: the gold one)");
  gr->add_option("--data-format", format, "dataset format: native or mutual");
  gr->add_option("--seed", graph_seed, "community-detection tie-break seed");

  CLI::App* gc = app.add_subcommand("gradcheck",
                                    "finite-difference sweep over every differentiable op");

  CLI::App* sw = app.add_subcommand("sweep", "train one model per value of a config axis");
  sw->add_option("--config", config_path, "JSON config file")->required();
  sw->add_option("--axis", axis, "gcn_layers, udg_variant or ablation")->required();
  sw->add_option("--values", values, "axis values (default: the full axis)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*pre) return run_pretrain(config_path);
    if (*tr) return run_train(config_path, ablations);
    if (*ev) return run_eval(model_path, data_path, format, per_turn, json);
    if (*gr) {
      return run_graph(data_path, format.empty() ? "native" : format, id, variant, graph_format,
                       candidate, graph_seed);
    }
    if (*gc) return run_gradcheck();
    if (*sw) return run_sweep(config_path, axis, values);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
