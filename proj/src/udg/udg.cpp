#include "grn/udg.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "grn/rng.hpp"

namespace grn::udg {

bool KeywordSet::is_null() const {
  return keywords.size() == 1 && keywords[0].token == kNullKeyword;
}

std::set<std::string> load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open stopword file: " + path);
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) words.insert(line);
  }
  return words;
}

const std::set<std::string>& default_stopwords() {
  static const std::set<std::string> words = load_stopwords(std::string(GRN_DATA_DIR) +
                                                            "/stopwords.txt");
  return words;
}

namespace {

bool has_alnum(const std::string& token) {
  for (unsigned char c : token) {
    if (std::isalnum(c)) return true;
  }
  return false;
}

}  // namespace

KeywordSet extract_keywords(const std::vector<std::string>& tokens, int window, double damping,
                            int iters, int k, const std::set<std::string>& stopwords) {
  if (window < 2) throw std::invalid_argument("extract_keywords: window must be >= 2");
  if (damping <= 0.0 || damping >= 1.0) {
    throw std::invalid_argument("extract_keywords: damping must lie in (0, 1)");
  }
  if (iters < 1) throw std::invalid_argument("extract_keywords: iters must be >= 1");
  if (k < 1) throw std::invalid_argument("extract_keywords: k must be >= 1");

  // Filtered token sequence (order kept) and node ids in first-occurrence order.
  std::vector<int> seq;
  std::vector<std::string> words;
  std::unordered_map<std::string, int> index;
  for (const std::string& t : tokens) {
    if (!has_alnum(t) || stopwords.count(t)) continue;
    auto [it, fresh] = index.try_emplace(t, static_cast<int>(words.size()));
    if (fresh) words.push_back(t);
    seq.push_back(it->second);
  }
  if (words.empty()) return KeywordSet{{{kNullKeyword, 0.0}}};

  const int n = static_cast<int>(words.size());
  std::vector<std::set<int>> adj(n);
  for (size_t i = 0; i < seq.size(); ++i) {
    for (size_t j = i + 1; j < std::min(seq.size(), i + static_cast<size_t>(window)); ++j) {
      if (seq[i] == seq[j]) continue;
      adj[seq[i]].insert(seq[j]);
      adj[seq[j]].insert(seq[i]);
    }
  }

  std::vector<double> score(n, 1.0), next(n);
  for (int round = 0; round < iters; ++round) {
    for (int v = 0; v < n; ++v) {
      double pull = 0.0;
      for (int u : adj[v]) pull += score[u] / static_cast<double>(adj[u].size());
      next[v] = (1.0 - damping) + damping * pull;
    }
    score.swap(next);
  }
  const double top = *std::max_element(score.begin(), score.end());
  for (double& s : score) s /= top;

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return score[a] > score[b]; });

  KeywordSet out;
  for (int i = 0; i < std::min(k, n); ++i) {
    out.keywords.push_back({words[order[i]], score[order[i]]});
  }
  return out;
}

int KeywordGraph::add_node(const std::string& token) {
  auto [it, fresh] = index.try_emplace(token, static_cast<int>(nodes.size()));
  if (fresh) {
    nodes.push_back(token);
    adj.emplace_back();
  }
  return it->second;
}

void KeywordGraph::add_edge(const std::string& a, const std::string& b) {
  const int ia = add_node(a);
  const int ib = add_node(b);
  if (ia == ib) return;
  adj[ia].insert(ib);
  adj[ib].insert(ia);
}

KeywordGraph build_keyword_graph(const std::vector<KeywordSet>& sets) {
  KeywordGraph g;
  for (const KeywordSet& set : sets) {
    if (set.is_null()) continue;
    for (const Keyword& kw : set.keywords) g.add_node(kw.token);
    for (size_t i = 0; i < set.keywords.size(); ++i) {
      for (size_t j = i + 1; j < set.keywords.size(); ++j) {
        g.add_edge(set.keywords[i].token, set.keywords[j].token);
      }
    }
  }
  return g;
}

std::unordered_map<std::string, int> detect_communities(const KeywordGraph& g, uint64_t seed) {
  const int n = static_cast<int>(g.nodes.size());
  std::unordered_map<std::string, int> out;
  if (n == 0) return out;

  constexpr int kMaxRounds = 50;
  std::vector<int> label(n);
  std::iota(label.begin(), label.end(), 0);
  Rng rng(seed);
  std::vector<int> next(n);
  for (int round = 0; round < kMaxRounds; ++round) {
    bool changed = false;
    for (int v = 0; v < n; ++v) {
      std::map<int, int> count;  // ordered so tie enumeration is stable
      ++count[label[v]];
      for (int u : g.adj[v]) ++count[label[u]];
      int best = 0;
      for (const auto& kv : count) best = std::max(best, kv.second);
      std::vector<int> tied;
      for (const auto& kv : count) {
        if (kv.second == best) tied.push_back(kv.first);
      }
      next[v] = tied.size() == 1
                    ? tied[0]
                    : tied[rng.uniform_int(0, static_cast<int>(tied.size()) - 1)];
      changed = changed || next[v] != label[v];
    }
    label.swap(next);
    if (!changed) break;
  }

  // Dense community ids, assigned in node order.
  std::unordered_map<int, int> dense;
  for (int v = 0; v < n; ++v) {
    auto [it, fresh] = dense.try_emplace(label[v], static_cast<int>(dense.size()));
    out[g.nodes[v]] = it->second;
  }
  return out;
}

Variant variant_from_string(const std::string& s) {
  if (s.size() == 1) {
    switch (std::tolower(static_cast<unsigned char>(s[0]))) {
      case 'a': return Variant::A;
      case 'b': return Variant::B;
      case 'c': return Variant::C;
      case 'd': return Variant::D;
      default: break;
    }
  }
  throw std::invalid_argument("unknown UDG variant '" + s + "' (expected a, b, c, or d)");
}

char variant_letter(Variant v) {
  switch (v) {
    case Variant::A: return 'a';
    case Variant::B: return 'b';
    case Variant::C: return 'c';
    case Variant::D: return 'd';
  }
  throw std::invalid_argument("unknown UDG variant");
}

bool UtteranceGraph::has_directed_edge() const {
  return std::any_of(edges.begin(), edges.end(), [](const Edge& e) { return e.directed; });
}

UtteranceGraph build_udg(const corpus::Dialogue& d, int candidate_index,
                         const std::vector<KeywordSet>& keywords,
                         const std::unordered_map<std::string, int>& communities,
                         Variant variant) {
  if (candidate_index < 0 || candidate_index > 3) {
    throw std::invalid_argument("build_udg: candidate index " +
                                std::to_string(candidate_index) + " outside 0..3");
  }
  const int nodes = static_cast<int>(d.utterances.size()) + 1;
  if (static_cast<int>(keywords.size()) != nodes) {
    throw std::invalid_argument("build_udg: got " + std::to_string(keywords.size()) +
                                " keyword sets for " + std::to_string(nodes) + " nodes");
  }

  bool chrono_directed = false, topic_directed = false;
  switch (variant) {
    case Variant::A: chrono_directed = true; topic_directed = true; break;
    case Variant::B: chrono_directed = true; topic_directed = false; break;
    case Variant::C: chrono_directed = false; topic_directed = true; break;
    case Variant::D: chrono_directed = false; topic_directed = false; break;
    default: throw std::invalid_argument("unknown UDG variant");
  }

  UtteranceGraph g;
  g.nodes = nodes;
  g.variant = variant;
  g.a.assign(static_cast<size_t>(nodes) * nodes, 0.0);
  auto put = [&](int i, int j, EdgeType type, bool directed) {
    g.edges.push_back({i, j, type, directed});
    g.a[static_cast<size_t>(i) * nodes + j] = 1.0;
    if (!directed) g.a[static_cast<size_t>(j) * nodes + i] = 1.0;
  };

  for (int i = 0; i + 1 < nodes; ++i) put(i, i + 1, EdgeType::Chrono, chrono_directed);

  // Community id set per node; the [NULL] placeholder never appears in the map.
  std::vector<std::set<int>> cid(nodes);
  for (int i = 0; i < nodes; ++i) {
    for (const Keyword& kw : keywords[i].keywords) {
      auto it = communities.find(kw.token);
      if (it != communities.end()) cid[i].insert(it->second);
    }
  }
  for (int i = 0; i < nodes; ++i) {
    for (int j = i + 2; j < nodes; ++j) {
      const bool shared = std::any_of(cid[i].begin(), cid[i].end(),
                                      [&](int c) { return cid[j].count(c) > 0; });
      if (shared) put(i, j, EdgeType::Topic, topic_directed);
    }
  }
  return g;
}

std::vector<KeywordSet> dialogue_keywords(const corpus::Dialogue& d, int candidate_index,
                                          int window, double damping, int iters, int k,
                                          const std::set<std::string>& stopwords) {
  if (candidate_index < 0 || candidate_index > 3) {
    throw std::invalid_argument("dialogue_keywords: candidate index " +
                                std::to_string(candidate_index) + " outside 0..3");
  }
  std::vector<KeywordSet> sets;
  sets.reserve(d.utterances.size() + 1);
  for (const corpus::Utterance& u : d.utterances) {
    sets.push_back(extract_keywords(u.tokens, window, damping, iters, k, stopwords));
  }
  sets.push_back(extract_keywords(d.candidate_tokens[candidate_index], window, damping, iters, k,
                                  stopwords));
  return sets;
}

UtteranceGraph build_dialogue_udg(const corpus::Dialogue& d, int candidate_index, Variant variant,
                                  uint64_t seed) {
  const std::vector<KeywordSet> keywords = dialogue_keywords(d, candidate_index);
  const KeywordGraph kg = build_keyword_graph(keywords);
  const auto communities = detect_communities(kg, seed);
  return build_udg(d, candidate_index, keywords, communities, variant);
}

NormalizedAdjacency normalize_adjacency(const UtteranceGraph& g) {
  const int n = g.nodes;
  std::vector<double> tilde = g.a;
  for (int i = 0; i < n; ++i) tilde[static_cast<size_t>(i) * n + i] += 1.0;

  std::vector<double> deg(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) deg[i] += tilde[static_cast<size_t>(i) * n + j];
  }

  NormalizedAdjacency out;
  out.nodes = n;
  out.values.assign(static_cast<size_t>(n) * n, 0.0);
  if (g.has_directed_edge()) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        out.values[static_cast<size_t>(i) * n + j] = tilde[static_cast<size_t>(i) * n + j] / deg[i];
      }
    }
  } else {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        out.values[static_cast<size_t>(i) * n + j] =
            tilde[static_cast<size_t>(i) * n + j] / std::sqrt(deg[i] * deg[j]);
      }
    }
  }
  return out;
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::string node_label(int i, int nodes, const KeywordSet& set) {
  std::string name = i + 1 < nodes ? "u" + std::to_string(i + 1) : "r";
  std::string joined;
  for (size_t k = 0; k < set.keywords.size(); ++k) {
    if (k) joined += "/";
    joined += set.keywords[k].token;
  }
  return name + ": " + joined;
}

}  // namespace

std::string to_dot(const UtteranceGraph& g, const std::vector<KeywordSet>& keywords) {
  if (static_cast<int>(keywords.size()) != g.nodes) {
    throw std::invalid_argument("to_dot: got " + std::to_string(keywords.size()) +
                                " keyword sets for " + std::to_string(g.nodes) + " nodes");
  }
  const bool digraph = g.has_directed_edge();
  std::ostringstream os;
  os << (digraph ? "digraph udg {\n" : "graph udg {\n");
  for (int i = 0; i < g.nodes; ++i) {
    os << "  " << i << " [label=\"" << dot_escape(node_label(i, g.nodes, keywords[i]))
       << "\"];\n";
  }
  for (const Edge& e : g.edges) {
    const char* color = e.type == EdgeType::Chrono ? "black" : "green";
    if (digraph) {
      os << "  " << e.src << " -> " << e.dst << " [color=" << color
         << (e.directed ? "" : ", dir=none") << "];\n";
    } else {
      os << "  " << e.src << " -- " << e.dst << " [color=" << color << "];\n";
    }
  }
  os << "}\n";
  return os.str();
}

std::string to_json(const UtteranceGraph& g, const std::vector<KeywordSet>& keywords) {
  if (static_cast<int>(keywords.size()) != g.nodes) {
    throw std::invalid_argument("to_json: got " + std::to_string(keywords.size()) +
                                " keyword sets for " + std::to_string(g.nodes) + " nodes");
  }
  nlohmann::json j;
  j["nodes"] = nlohmann::json::array();
  for (int i = 0; i < g.nodes; ++i) {
    nlohmann::json node;
    node["index"] = i;
    node["keywords"] = nlohmann::json::array();
    for (const Keyword& kw : keywords[i].keywords) node["keywords"].push_back(kw.token);
    j["nodes"].push_back(std::move(node));
  }
  j["edges"] = nlohmann::json::array();
  for (const Edge& e : g.edges) {
    j["edges"].push_back({{"src", e.src},
                          {"dst", e.dst},
                          {"type", e.type == EdgeType::Chrono ? "chrono" : "topic"},
                          {"directed", e.directed}});
  }
  return j.dump(2);
}

}  // namespace grn::udg
