#pragma once

#include <array>
#include <istream>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "grn/rng.hpp"

namespace grn::corpus {

enum class Speaker { M, F, Other };

struct Utterance {
  Speaker speaker = Speaker::Other;
  std::string text;
  std::vector<std::string> tokens;
};

// A multi-turn context with four response candidates, exactly one correct.
struct Dialogue {
  std::string id;
  std::vector<Utterance> utterances;  // at least two
  std::array<std::string, 4> candidates;
  std::array<std::vector<std::string>, 4> candidate_tokens;
  int label = 0;  // index of the correct candidate
};

// Lowercases, splits on whitespace, and breaks punctuation out as single-char
// tokens. A punctuation character is kept inside a token only when flanked by
// digits on both sides, so clock times ("10:45") and grouped numbers survive.
// Idempotent on its own output rejoined with single spaces.
std::vector<std::string> tokenize(const std::string& text);

enum class DataFormat { Native, Mutual };

// Reads one JSON object per line.
//   native: {"id", "utterances": [{"speaker": "m"|"f", "text": ...}...],
//            "candidates": [4 strings], "label": 0..3}
//   mutual: {"article": "m : ... f : ...", "options": [4 strings],
//            "answers": "A".."D"}
// Utterances that tokenize to nothing are dropped; a record that ends up with
// fewer than two utterances, or whose fields are malformed, raises an error
// naming the record and field. Record order is preserved.
std::vector<Dialogue> load_dialogues(const std::string& path, DataFormat format);
std::vector<Dialogue> parse_dialogues(std::istream& in, DataFormat format);

// Token ids. Ids are dense from 0; the five specials occupy 0..4 and every
// other id maps to a corpus token (first-occurrence order).
class Vocab {
 public:
  static constexpr int kPad = 0, kUnk = 1, kCls = 2, kSep = 3, kNull = 4;
  static constexpr int kNumSpecials = 5;

  static Vocab build(const std::vector<Dialogue>& dialogues, int min_freq);
  static Vocab from_tokens(std::vector<std::string> tokens);  // checkpoint restore

  int id(const std::string& token) const;  // kUnk when absent
  const std::string& token(int id) const;
  int size() const { return static_cast<int>(id_to_token_.size()); }
  const std::vector<std::string>& tokens() const { return id_to_token_; }

  std::vector<int> ids(const std::vector<std::string>& tokens) const;

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, int> token_to_id_;
};

// Encoder input: [CLS] u_1 .. u_n [SEP] r [SEP] with a half-open span per
// segment (utterances first, candidate last; specials excluded from spans).
// When the pair exceeds max_len, whole utterances are dropped oldest-first;
// dropping below two utterances raises a "context underflow" error.
struct EncodedPair {
  std::vector<int> ids;
  std::vector<std::pair<int, int>> spans;
  int candidate_index = 0;
  int first_kept = 0;  // index of the oldest utterance that survived
};

EncodedPair encode_pair(const Dialogue& d, int candidate_index, const Vocab& v, int max_len);

// Utterance-order pretraining example: the dialogue's utterances in either
// the original order (label 1) or a non-identity random permutation (label 0).
struct UopExample {
  std::vector<std::vector<int>> sequences;
  int label = 1;
};

// One positive plus k_neg permuted negatives. Permutations are resampled
// until they differ from the identity.
std::vector<UopExample> make_uop_examples(const Dialogue& d, const Vocab& v, Rng& rng, int k_neg);

// Neighbor-utterance pretraining example: a context segment paired with a
// pivot utterance; label 0 when the segment precedes the pivot, 1 when it
// follows.
struct NupExample {
  std::vector<std::vector<int>> segment;
  std::vector<int> pivot;
  int label = 0;
  int pivot_index = 0;  // 1-based
};

// Emits the (U_left, u_i) and (U_right, u_i) pair for a given 1-based pivot
// 1 < i < n.
std::vector<NupExample> make_nup_examples_at(const Dialogue& d, const Vocab& v, int pivot_index);

// Samples one interior pivot uniformly. Dialogues with fewer than three
// utterances yield an empty list (callers count these as skips).
std::vector<NupExample> make_nup_examples(const Dialogue& d, const Vocab& v, Rng& rng);

// Pretraining inputs share the encode_pair layout: [CLS] segment [SEP] tail
// [SEP], where the tail is the last utterance of the (possibly permuted)
// sequence for order examples and the pivot for neighbor examples. Returns
// nothing when the example cannot fit max_len even after dropping leading
// segment utterances.
struct PretrainExample {
  enum class Task { Order, Neighbor };
  Task task = Task::Order;
  std::vector<int> ids;
  int label = 0;
};

std::optional<PretrainExample> encode_uop(const UopExample& e, int max_len);
std::optional<PretrainExample> encode_nup(const NupExample& e, int max_len);

}  // namespace grn::corpus
