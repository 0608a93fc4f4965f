#pragma once

// Shared test helpers: dialogues are built through the public JSONL parser so
// every fixture satisfies the loader's invariants.

#include <array>
#include <sstream>
#include <string>
#include <vector>

#include "grn/corpus.hpp"
#include "grn/model.hpp"

namespace fixtures {

inline grn::corpus::Dialogue make_dialogue(const std::vector<std::string>& utts,
                                           const std::array<std::string, 4>& cands, int label,
                                           const std::string& id = "t") {
  std::ostringstream os;
  os << R"({"id":")" << id << R"(","utterances":[)";
  for (size_t i = 0; i < utts.size(); ++i) {
    if (i) os << ",";
    os << R"({"speaker":")" << (i % 2 ? "f" : "m") << R"(","text":")" << utts[i] << R"("})";
  }
  os << R"(],"candidates":[)";
  for (int c = 0; c < 4; ++c) {
    if (c) os << ",";
    os << '"' << cands[c] << '"';
  }
  os << R"(],"label":)" << label << "}";
  std::istringstream in(os.str());
  return grn::corpus::parse_dialogues(in, grn::corpus::DataFormat::Native).at(0);
}

// Seven turns whose only nonadjacent keyword dependency is "tickets" shared
// between u6 and the gold candidate.
inline grn::corpus::Dialogue clue_chain_dialogue() {
  return make_dialogue({"the museum opens at nine", "take the red line", "red line closed now",
                        "walk through the park", "fine with me", "tickets cost ten",
                        "i will buy the tickets"},
                       {"no thanks", "the red line", "great i can buy the tickets", "walk away"},
                       2, "clue");
}

// A handful of small dialogues with varied lengths, enough for a vocabulary
// and pretraining examples.
inline std::vector<grn::corpus::Dialogue> tiny_corpus() {
  std::vector<grn::corpus::Dialogue> ds;
  ds.push_back(make_dialogue({"the train leaves soon", "which platform is it", "platform nine"},
                             {"thanks a lot", "the garden looks nice", "i lost my ticket",
                              "call a taxi"},
                             0, "c1"));
  ds.push_back(make_dialogue({"any plans for tonight", "a quiet dinner maybe",
                              "the new place downtown", "sounds lovely"},
                             {"see you at eight", "my bike broke", "paint the fence",
                              "read the letter"},
                             0, "c2"));
  ds.push_back(make_dialogue({"did you finish the report", "almost done now"},
                             {"send it tonight", "the soup is cold", "nice weather today",
                              "buy more paper"},
                             0, "c3"));
  ds.push_back(make_dialogue({"where did you park", "behind the bakery", "that lot is tiny",
                              "it was the last spot", "lucky you"},
                             {"walk me there", "rain again", "the lamp flickers",
                              "count me in"},
                             0, "c4"));
  return ds;
}

// Fixture for whole-model finite-difference checks: one dialogue, a small
// config, and an evaluation point chosen so the check stays meaningful.
//
// Central differences in 64-bit floats resolve a derivative down to roughly
// 1e-11 absolute at eps 1e-5; relative error against coordinates smaller than
// that headroom measures rounding noise, not correctness. Attention query/key
// weights (and the left projection of the pairwise node attention) carry
// difference-of-differences gradients that sit orders of magnitude below the
// other parameters at plain init scale. The fixture therefore uses long,
// token-disjoint candidates and evaluates at an amplified parameter point
// where every gradient coordinate either vanishes exactly or clears the
// noise floor.
struct GradientFixture {
  grn::corpus::Dialogue dialogue;
  grn::corpus::Vocab vocab;
  grn::TrainConfig cfg;
  grn::ModelParams params;
};

inline GradientFixture gradient_fixture() {
  GradientFixture fx{
      make_dialogue(
          {"garden fence needs bright paint before winter arrives",
           "buy primer rollers brushes and masking tape today"},
          {"sure the hardware store opens early tomorrow morning",
           "rain might delay outdoor work until next weekend",
           "green looks awful honestly pick warm yellow instead",
           "call your brother first he owes us favors"},
          0, "fd"),
      grn::corpus::Vocab(), grn::TrainConfig{}, grn::ModelParams{}};
  fx.vocab = grn::corpus::Vocab::build({fx.dialogue}, 1);
  fx.cfg.d_model = 8;
  fx.cfg.enc_layers = 1;
  fx.cfg.heads = 2;
  fx.cfg.ff_dim = 16;
  fx.cfg.max_positions = 64;
  fx.cfg.max_len = 64;
  fx.cfg.gcn_layers = 2;
  fx.cfg.seed = 79;
  grn::GrnModel m = grn::init_model(fx.cfg, fx.vocab);
  for (const auto& name : m.params.names()) {
    grn::num::Tensor t = m.params.at(name);
    double f = 1.0;
    if (name.rfind("embed.", 0) == 0) f = 2.0;
    else if (name == "out.w") f = 10.0;
    else if (name == "seq.wo") f = 8.0;
    else if (name.rfind("seq.wq", 0) == 0 || name.rfind("seq.wk", 0) == 0) f = 3.0;
    else if (name.rfind("cross.", 0) == 0) f = 12.0;
    else if (name.rfind("gcn.", 0) == 0) f = 2.0;
    else if (name.rfind("pool.", 0) == 0) f = 3.0;
    if (f != 1.0)
      for (double& x : t.data()) x *= f;
    fx.params.add(name, std::move(t));
  }
  return fx;
}

}  // namespace fixtures
