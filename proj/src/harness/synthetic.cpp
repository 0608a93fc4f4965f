#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "grn/harness.hpp"
#include "grn/rng.hpp"

namespace grn::harness {

namespace {

// Topic words cycle through the four candidate roles as the dialogue index
// advances, so across any 16 consecutive dialogues every word plays every
// role equally often.
constexpr std::array<const char*, 16> kTopicWords = {
    "pearl",  "tiger",   "violin",  "garnet",  "harbor",  "meadow",  "copper",  "falcon",
    "orchid", "timber",  "canyon",  "velvet",  "saffron", "glacier", "lantern", "cobalt"};

// Per-utterance content noise; sampled without replacement inside one
// dialogue so no two utterances share a non-topic content word.
constexpr std::array<const char*, 12> kFillerWords = {
    "window", "coffee", "ladder", "bottle", "garden", "pencil",
    "carpet", "mirror", "basket", "candle", "napkin", "drawer"};

// Everything else is glue drawn from the stopword list, so keyword
// extraction sees exactly the planted content words. The first utterance
// always opens with "so" and the last with "then"; interior openers avoid
// both, which gives the ordering tasks a learnable signature.
constexpr std::array<const char*, 5> kInteriorOpeners = {"well", "now", "oh", "ok", "and"};
constexpr std::array<const char*, 4> kCandidateOpeners = {"yes", "ok", "oh", "please"};

std::string chain_text(Rng& rng, const std::string& opener, const std::string& topic,
                       const std::string& filler) {
  switch (rng.uniform_int(0, 2)) {
    case 0: return opener + " the " + topic + " was " + filler;
    case 1: return opener + " a " + topic + " is " + filler;
    default: return opener + " that " + topic + " and " + filler;
  }
}

std::string plain_text(Rng& rng, const std::string& opener, const std::string& filler) {
  switch (rng.uniform_int(0, 2)) {
    case 0: return opener + " it was a " + filler;
    case 1: return opener + " there is a " + filler;
    default: return opener + " this " + filler + " is here";
  }
}

std::string closing_text(Rng& rng, const std::string& topic) {
  switch (rng.uniform_int(0, 2)) {
    case 0: return "then the " + topic + " was " + topic;
    case 1: return "then a " + topic + " and " + topic;
    default: return "then the " + topic + " " + topic + " again";
  }
}

std::string candidate_text(int variant, const std::string& opener, const std::string& topic,
                           const std::string& filler) {
  switch (variant) {
    case 0: return opener + " a " + topic + " for " + filler;
    case 1: return opener + " the " + topic + " of " + filler;
    default: return opener + " some " + topic + " and " + filler;
  }
}

corpus::Utterance make_utterance(corpus::Speaker speaker, std::string text) {
  corpus::Utterance u;
  u.speaker = speaker;
  u.tokens = corpus::tokenize(text);
  u.text = std::move(text);
  return u;
}

}  // namespace

std::vector<corpus::Dialogue> make_synthetic(const SyntheticSpec& spec) {
  if (spec.dialogues <= 0) throw std::invalid_argument("synthetic: dialogues must be positive");
  if (spec.min_turns < 4) {
    throw std::invalid_argument("synthetic: min_turns must be at least 4, got " +
                                std::to_string(spec.min_turns));
  }
  if (spec.max_turns < spec.min_turns) {
    throw std::invalid_argument("synthetic: max_turns below min_turns");
  }

  const int pool = static_cast<int>(kTopicWords.size());
  std::vector<corpus::Dialogue> out;
  out.reserve(spec.dialogues);

  for (int idx = 0; idx < spec.dialogues; ++idx) {
    Rng rng(mix64(spec.seed, 0x5e1ec7 + static_cast<std::uint64_t>(idx)));
    corpus::Dialogue d;
    char id[32];
    std::snprintf(id, sizeof id, "syn-%04d", idx);
    d.id = id;

    const int n = rng.uniform_int(spec.min_turns, spec.max_turns);

    // Role assignment for this dialogue's four topic words.
    const std::string gold_word = kTopicWords[idx % pool];
    const std::string decoy_word = kTopicWords[(idx + 1) % pool];
    std::vector<std::string> rest = {decoy_word, kTopicWords[(idx + 2) % pool],
                                     kTopicWords[(idx + 3) % pool]};
    rng.shuffle(rest);
    d.label = rng.uniform_int(0, 3);

    // Chain positions: two nonadjacent utterances, both nonadjacent to the
    // response node (so only the gold candidate earns topic edges to them).
    const int a = rng.uniform_int(1, n - 3);
    const int b = rng.uniform_int(a + 2, n - 1);
    const bool plant = spec.plant_chain;

    // Distinct fillers for every slot that needs one.
    std::vector<int> filler_order(kFillerWords.size());
    std::iota(filler_order.begin(), filler_order.end(), 0);
    rng.shuffle(filler_order);
    size_t next_filler = 0;
    auto filler = [&]() {
      const std::string w = kFillerWords[filler_order[next_filler % filler_order.size()]];
      ++next_filler;
      return w;
    };

    corpus::Speaker s = rng.uniform_int(0, 1) == 0 ? corpus::Speaker::M : corpus::Speaker::F;
    auto flip = [](corpus::Speaker sp) {
      return sp == corpus::Speaker::M ? corpus::Speaker::F : corpus::Speaker::M;
    };

    for (int t = 1; t <= n; ++t, s = flip(s)) {
      std::string text;
      if (t == n && plant) {
        text = closing_text(rng, decoy_word);
      } else {
        const std::string opener =
            t == 1 ? "so" : (t == n ? "then" : kInteriorOpeners[rng.uniform_int(0, 4)]);
        if (plant && (t == a || t == b)) {
          text = chain_text(rng, opener, gold_word, filler());
        } else {
          text = plain_text(rng, opener, filler());
        }
      }
      d.utterances.push_back(make_utterance(s, std::move(text)));
    }

    // All four candidates share one surface template; only the topic word
    // and the filler differ. Without a planted chain the word-to-slot
    // assignment must not depend on the label, or a fixed scorer's word
    // preferences would correlate with it.
    std::array<std::string, 4> slot_words;
    if (plant) {
      size_t rest_i = 0;
      for (int c = 0; c < 4; ++c) slot_words[c] = c == d.label ? gold_word : rest[rest_i++];
    } else {
      std::vector<std::string> all = {gold_word, rest[0], rest[1], rest[2]};
      rng.shuffle(all);
      for (int c = 0; c < 4; ++c) slot_words[c] = all[c];
    }
    const std::string opener = kCandidateOpeners[rng.uniform_int(0, 3)];
    const int variant = rng.uniform_int(0, 2);
    for (int c = 0; c < 4; ++c) {
      d.candidates[c] = candidate_text(variant, opener, slot_words[c], filler());
      d.candidate_tokens[c] = corpus::tokenize(d.candidates[c]);
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::string to_native_json_line(const corpus::Dialogue& d) {
  nlohmann::json j;
  j["id"] = d.id;
  j["utterances"] = nlohmann::json::array();
  for (const corpus::Utterance& u : d.utterances) {
    j["utterances"].push_back(
        {{"speaker", u.speaker == corpus::Speaker::F ? "f" : "m"}, {"text", u.text}});
  }
  j["candidates"] = d.candidates;
  j["label"] = d.label;
  return j.dump();
}

void write_native_jsonl(const std::string& path, const std::vector<corpus::Dialogue>& dialogues) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  for (const corpus::Dialogue& d : dialogues) out << to_native_json_line(d) << "\n";
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace grn::harness
