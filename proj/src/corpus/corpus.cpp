#include "grn/corpus.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace grn::corpus {

using nlohmann::json;

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  };
  for (size_t i = 0; i < text.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    if (c < 128 && std::isspace(c)) {
      flush();
      continue;
    }
    const bool alnum = c >= 128 || std::isalnum(c);
    if (alnum) {
      cur.push_back(c < 128 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
      continue;
    }
    const bool prev_digit = !cur.empty() && std::isdigit(static_cast<unsigned char>(cur.back()));
    const bool next_digit =
        i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1]));
    if (prev_digit && next_digit) {
      cur.push_back(static_cast<char>(c));
      continue;
    }
    flush();
    out.emplace_back(1, static_cast<char>(c));
  }
  flush();
  return out;
}

namespace {

[[noreturn]] void record_error(size_t record, const std::string& what) {
  throw std::runtime_error("record " + std::to_string(record) + ": " + what);
}

Speaker speaker_from(const std::string& s) {
  if (s == "m" || s == "M") return Speaker::M;
  if (s == "f" || s == "F") return Speaker::F;
  return Speaker::Other;
}

// Drops empty-token utterances, tokenizes candidates, enforces n >= 2 and
// non-empty candidates.
void finalize_dialogue(Dialogue& d, size_t record) {
  std::vector<Utterance> kept;
  for (Utterance& u : d.utterances) {
    u.tokens = tokenize(u.text);
    if (!u.tokens.empty()) kept.push_back(std::move(u));
  }
  d.utterances = std::move(kept);
  if (d.utterances.size() < 2) {
    record_error(record, "dialogue has " + std::to_string(d.utterances.size()) +
                             " non-empty utterances, need at least 2");
  }
  for (int c = 0; c < 4; ++c) {
    d.candidate_tokens[c] = tokenize(d.candidates[c]);
    if (d.candidate_tokens[c].empty()) {
      record_error(record, "candidate " + std::to_string(c) + " tokenizes to nothing");
    }
  }
  if (d.label < 0 || d.label > 3) {
    record_error(record, "label " + std::to_string(d.label) + " outside 0..3");
  }
}

Dialogue parse_native(const json& j, size_t record) {
  Dialogue d;
  if (!j.contains("id") || !j["id"].is_string()) record_error(record, "missing field 'id'");
  d.id = j["id"].get<std::string>();
  if (!j.contains("utterances") || !j["utterances"].is_array()) {
    record_error(record, "missing field 'utterances'");
  }
  for (const json& ju : j["utterances"]) {
    if (!ju.contains("speaker") || !ju.contains("text")) {
      record_error(record, "utterance missing 'speaker' or 'text'");
    }
    Utterance u;
    u.speaker = speaker_from(ju["speaker"].get<std::string>());
    u.text = ju["text"].get<std::string>();
    d.utterances.push_back(std::move(u));
  }
  if (!j.contains("candidates") || !j["candidates"].is_array()) {
    record_error(record, "missing field 'candidates'");
  }
  if (j["candidates"].size() != 4) {
    record_error(record,
                 "candidate count " + std::to_string(j["candidates"].size()) + " != 4");
  }
  for (int c = 0; c < 4; ++c) d.candidates[c] = j["candidates"][c].get<std::string>();
  if (!j.contains("label") || !j["label"].is_number_integer()) {
    record_error(record, "missing field 'label'");
  }
  d.label = j["label"].get<int>();
  finalize_dialogue(d, record);
  return d;
}

// Splits a MuTual article on "m :" / "f :" speaker markers. The marker stays
// inside its turn's text, so marker tokens flow through like ordinary words.
std::vector<std::pair<Speaker, std::string>> split_article(const std::string& article,
                                                           size_t record) {
  std::vector<size_t> starts;
  for (size_t i = 0; i + 1 < article.size(); ++i) {
    const char c = article[i];
    if (c != 'm' && c != 'M' && c != 'f' && c != 'F') continue;
    if (i > 0 && !std::isspace(static_cast<unsigned char>(article[i - 1]))) continue;
    size_t j = i + 1;
    while (j < article.size() && std::isspace(static_cast<unsigned char>(article[j]))) ++j;
    if (j > i + 1 && j < article.size() && article[j] == ':') starts.push_back(i);
  }
  if (starts.empty()) record_error(record, "field 'article' has no speaker markers");
  for (size_t i = 0; i < starts[0]; ++i) {
    if (!std::isspace(static_cast<unsigned char>(article[i]))) {
      record_error(record, "field 'article' has text before the first speaker marker");
    }
  }
  std::vector<std::pair<Speaker, std::string>> turns;
  for (size_t t = 0; t < starts.size(); ++t) {
    const size_t begin = starts[t];
    const size_t end = t + 1 < starts.size() ? starts[t + 1] : article.size();
    turns.emplace_back(speaker_from(std::string(1, article[begin])),
                       article.substr(begin, end - begin));
  }
  return turns;
}

Dialogue parse_mutual(const json& j, size_t record) {
  Dialogue d;
  d.id = j.contains("id") && j["id"].is_string() ? j["id"].get<std::string>()
                                                 : "r" + std::to_string(record);
  if (!j.contains("article") || !j["article"].is_string()) {
    record_error(record, "missing field 'article'");
  }
  for (auto& [spk, text] : split_article(j["article"].get<std::string>(), record)) {
    Utterance u;
    u.speaker = spk;
    u.text = text;
    d.utterances.push_back(std::move(u));
  }
  if (!j.contains("options") || !j["options"].is_array()) {
    record_error(record, "missing field 'options'");
  }
  if (j["options"].size() != 4) {
    record_error(record, "candidate count " + std::to_string(j["options"].size()) + " != 4");
  }
  for (int c = 0; c < 4; ++c) d.candidates[c] = j["options"][c].get<std::string>();
  if (!j.contains("answers") || !j["answers"].is_string()) {
    record_error(record, "missing field 'answers'");
  }
  const std::string ans = j["answers"].get<std::string>();
  if (ans.size() != 1 || ans[0] < 'A' || ans[0] > 'D') {
    record_error(record, "field 'answers' must be one of A..D, got '" + ans + "'");
  }
  d.label = ans[0] - 'A';
  finalize_dialogue(d, record);
  return d;
}

}  // namespace

std::vector<Dialogue> parse_dialogues(std::istream& in, DataFormat format) {
  std::vector<Dialogue> out;
  std::string line;
  size_t record = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    ++record;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      record_error(record, std::string("invalid JSON: ") + e.what());
    }
    out.push_back(format == DataFormat::Native ? parse_native(j, record)
                                               : parse_mutual(j, record));
  }
  return out;
}

std::vector<Dialogue> load_dialogues(const std::string& path, DataFormat format) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  return parse_dialogues(in, format);
}

Vocab Vocab::build(const std::vector<Dialogue>& dialogues, int min_freq) {
  if (dialogues.empty()) throw std::invalid_argument("vocab: empty corpus");
  std::unordered_map<std::string, long> freq;
  std::vector<const std::string*> order;  // first occurrences, in corpus order
  auto visit = [&](const std::vector<std::string>& tokens) {
    for (const std::string& t : tokens) {
      auto [it, fresh] = freq.try_emplace(t, 0);
      ++it->second;
      if (fresh) order.push_back(&it->first);
    }
  };
  for (const Dialogue& d : dialogues) {
    for (const Utterance& u : d.utterances) visit(u.tokens);
    for (const auto& ct : d.candidate_tokens) visit(ct);
  }
  Vocab v;
  v.id_to_token_ = {"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[NULL]"};
  for (const std::string* t : order) {
    if (freq[*t] >= min_freq) v.id_to_token_.push_back(*t);
  }
  for (size_t i = 0; i < v.id_to_token_.size(); ++i) {
    v.token_to_id_[v.id_to_token_[i]] = static_cast<int>(i);
  }
  return v;
}

Vocab Vocab::from_tokens(std::vector<std::string> tokens) {
  static const std::vector<std::string> specials = {"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[NULL]"};
  if (tokens.size() < specials.size()) throw std::invalid_argument("vocab: token list too short");
  for (size_t i = 0; i < specials.size(); ++i) {
    if (tokens[i] != specials[i]) {
      throw std::invalid_argument("vocab: token list does not start with the special tokens");
    }
  }
  Vocab v;
  v.id_to_token_ = std::move(tokens);
  for (size_t i = 0; i < v.id_to_token_.size(); ++i) {
    auto [it, fresh] = v.token_to_id_.try_emplace(v.id_to_token_[i], static_cast<int>(i));
    if (!fresh) throw std::invalid_argument("vocab: duplicate token '" + v.id_to_token_[i] + "'");
  }
  return v;
}

int Vocab::id(const std::string& token) const {
  auto it = token_to_id_.find(token);
  return it == token_to_id_.end() ? kUnk : it->second;
}

const std::string& Vocab::token(int id) const {
  if (id < 0 || id >= size()) throw std::out_of_range("vocab: id " + std::to_string(id));
  return id_to_token_[id];
}

std::vector<int> Vocab::ids(const std::vector<std::string>& tokens) const {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (const std::string& t : tokens) out.push_back(id(t));
  return out;
}

EncodedPair encode_pair(const Dialogue& d, int candidate_index, const Vocab& v, int max_len) {
  if (candidate_index < 0 || candidate_index > 3) {
    throw std::invalid_argument("encode_pair: candidate index " +
                                std::to_string(candidate_index) + " outside 0..3");
  }
  const int n = static_cast<int>(d.utterances.size());
  const int r = static_cast<int>(d.candidate_tokens[candidate_index].size());
  long total = 3 + r;
  for (const Utterance& u : d.utterances) total += static_cast<long>(u.tokens.size());

  int first = 0;
  while (total > max_len && n - first > 2) {
    total -= static_cast<long>(d.utterances[first].tokens.size());
    ++first;
  }
  if (total > max_len) {
    throw std::runtime_error("encode_pair: context underflow in dialogue '" + d.id +
                             "': " + std::to_string(total) + " tokens exceed max_len " +
                             std::to_string(max_len) + " with only two utterances left");
  }

  EncodedPair out;
  out.candidate_index = candidate_index;
  out.first_kept = first;
  out.ids.reserve(total);
  out.ids.push_back(Vocab::kCls);
  for (int i = first; i < n; ++i) {
    const auto& toks = d.utterances[i].tokens;
    out.spans.emplace_back(static_cast<int>(out.ids.size()),
                           static_cast<int>(out.ids.size() + toks.size()));
    for (const std::string& t : toks) out.ids.push_back(v.id(t));
  }
  out.ids.push_back(Vocab::kSep);
  out.spans.emplace_back(static_cast<int>(out.ids.size()), static_cast<int>(out.ids.size() + r));
  for (const std::string& t : d.candidate_tokens[candidate_index]) out.ids.push_back(v.id(t));
  out.ids.push_back(Vocab::kSep);
  return out;
}

std::vector<UopExample> make_uop_examples(const Dialogue& d, const Vocab& v, Rng& rng,
                                          int k_neg) {
  const int n = static_cast<int>(d.utterances.size());
  if (n < 2) {
    throw std::invalid_argument("uop: dialogue '" + d.id + "' has fewer than two utterances");
  }
  std::vector<std::vector<int>> original;
  for (const Utterance& u : d.utterances) original.push_back(v.ids(u.tokens));

  std::vector<UopExample> out;
  out.push_back({original, 1});
  std::vector<int> identity(n);
  for (int i = 0; i < n; ++i) identity[i] = i;
  for (int k = 0; k < k_neg; ++k) {
    std::vector<int> perm = identity;
    do {
      rng.shuffle(perm);
    } while (perm == identity);
    UopExample neg;
    neg.label = 0;
    for (int i : perm) neg.sequences.push_back(original[i]);
    out.push_back(std::move(neg));
  }
  return out;
}

std::vector<NupExample> make_nup_examples_at(const Dialogue& d, const Vocab& v,
                                             int pivot_index) {
  const int n = static_cast<int>(d.utterances.size());
  if (pivot_index <= 1 || pivot_index >= n) {
    throw std::invalid_argument("nup: pivot " + std::to_string(pivot_index) +
                                " not interior for n=" + std::to_string(n));
  }
  std::vector<int> pivot = v.ids(d.utterances[pivot_index - 1].tokens);
  NupExample left, right;
  left.label = 0;
  left.pivot_index = pivot_index;
  left.pivot = pivot;
  for (int i = 0; i < pivot_index - 1; ++i) left.segment.push_back(v.ids(d.utterances[i].tokens));
  right.label = 1;
  right.pivot_index = pivot_index;
  right.pivot = std::move(pivot);
  for (int i = pivot_index; i < n; ++i) right.segment.push_back(v.ids(d.utterances[i].tokens));
  return {std::move(left), std::move(right)};
}

std::vector<NupExample> make_nup_examples(const Dialogue& d, const Vocab& v, Rng& rng) {
  const int n = static_cast<int>(d.utterances.size());
  if (n < 3) return {};
  return make_nup_examples_at(d, v, rng.uniform_int(2, n - 1));
}

namespace {

std::optional<PretrainExample> encode_two_segments(std::vector<std::vector<int>> head,
                                                   const std::vector<int>& tail, int max_len,
                                                   PretrainExample::Task task, int label) {
  long total = 3 + static_cast<long>(tail.size());
  for (const auto& s : head) total += static_cast<long>(s.size());
  size_t first = 0;
  while (total > max_len && head.size() - first > 1) {
    total -= static_cast<long>(head[first].size());
    ++first;
  }
  if (total > max_len) return std::nullopt;

  PretrainExample out;
  out.task = task;
  out.label = label;
  out.ids.reserve(total);
  out.ids.push_back(Vocab::kCls);
  for (size_t i = first; i < head.size(); ++i) {
    out.ids.insert(out.ids.end(), head[i].begin(), head[i].end());
  }
  out.ids.push_back(Vocab::kSep);
  out.ids.insert(out.ids.end(), tail.begin(), tail.end());
  out.ids.push_back(Vocab::kSep);
  return out;
}

}  // namespace

std::optional<PretrainExample> encode_uop(const UopExample& e, int max_len) {
  if (e.sequences.size() < 2) return std::nullopt;
  std::vector<std::vector<int>> head(e.sequences.begin(), e.sequences.end() - 1);
  return encode_two_segments(std::move(head), e.sequences.back(), max_len,
                             PretrainExample::Task::Order, e.label);
}

std::optional<PretrainExample> encode_nup(const NupExample& e, int max_len) {
  if (e.segment.empty()) return std::nullopt;
  return encode_two_segments(e.segment, e.pivot, max_len, PretrainExample::Task::Neighbor,
                             e.label);
}

}  // namespace grn::corpus
