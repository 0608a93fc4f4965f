#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "grn/corpus.hpp"

namespace grn::udg {

// One scored keyword of an utterance.
struct Keyword {
  std::string token;
  double score = 0.0;
};

// Top keywords of a single utterance (or of the candidate response), scores
// descending. An utterance with no keyword candidates at all gets the single
// placeholder [NULL], which never matches any topic community.
struct KeywordSet {
  std::vector<Keyword> keywords;
  bool is_null() const;
};

inline constexpr const char* kNullKeyword = "[NULL]";

// Function words excluded from keyword extraction, one per line. Tokens
// without any alphanumeric character (bare punctuation) are always excluded.
std::set<std::string> load_stopwords(const std::string& path);
const std::set<std::string>& default_stopwords();  // data/stopwords.txt, loaded once

// TextRank over one utterance: build the undirected co-occurrence graph of
// the non-stopword tokens lying within `window` positions of each other in
// the filtered sequence, then iterate
//   score_j = (1 - damping) + damping * sum_{i adjacent to j} score_i / deg(i)
// synchronously for `iters` rounds and normalize by the maximum score.
// Returns the top `k` by score; ties break toward the earlier first
// occurrence.
KeywordSet extract_keywords(const std::vector<std::string>& tokens, int window = 2,
                            double damping = 0.85, int iters = 50, int k = 3,
                            const std::set<std::string>& stopwords = default_stopwords());

// Undirected graph over keyword strings; nodes kept in first-insertion order.
struct KeywordGraph {
  std::vector<std::string> nodes;
  std::unordered_map<std::string, int> index;
  std::vector<std::set<int>> adj;

  int add_node(const std::string& token);            // idempotent
  void add_edge(const std::string& a, const std::string& b);  // ignores self-edges
};

// Connects keywords that appear in the same utterance's keyword set; the
// [NULL] placeholder never becomes a node.
KeywordGraph build_keyword_graph(const std::vector<KeywordSet>& sets);

// Synchronous label propagation: every node adopts the most frequent label
// among itself and its neighbours, ties resolved through the seeded
// generator; runs to convergence or 50 rounds. Isolated nodes stay
// singletons. Returns keyword -> dense community id.
std::unordered_map<std::string, int> detect_communities(const KeywordGraph& g, uint64_t seed);

// Edge direction schemes. A: everything forward (low to high index),
// B: chronological forward / topic undirected, C: chronological undirected /
// topic forward, D: everything undirected (the default reasoning graph).
enum class Variant { A, B, C, D };

Variant variant_from_string(const std::string& s);  // "a".."d" or "A".."D"
char variant_letter(Variant v);

enum class EdgeType { Chrono, Topic };

struct Edge {
  int src = 0;  // always < dst
  int dst = 0;
  EdgeType type = EdgeType::Chrono;
  bool directed = false;
};

// Dependency graph over n+1 nodes: the n utterances in order followed by the
// candidate response. `a` is the 0/1 adjacency (row-major, no self-loops)
// realized under the variant's direction rules.
struct UtteranceGraph {
  int nodes = 0;
  Variant variant = Variant::D;
  std::vector<Edge> edges;
  std::vector<double> a;

  double at(int i, int j) const { return a[static_cast<size_t>(i) * nodes + j]; }
  bool has_directed_edge() const;
};

// Chronological edges join consecutive nodes (the candidate follows the last
// utterance); a topic edge joins each nonadjacent pair whose keyword sets
// share a community. `keywords` must hold one set per node, utterances first,
// candidate last.
UtteranceGraph build_udg(const corpus::Dialogue& d, int candidate_index,
                         const std::vector<KeywordSet>& keywords,
                         const std::unordered_map<std::string, int>& communities,
                         Variant variant);

// Keyword sets for the n+1 graph nodes of one (dialogue, candidate) pair.
std::vector<KeywordSet> dialogue_keywords(
    const corpus::Dialogue& d, int candidate_index, int window = 2, double damping = 0.85,
    int iters = 50, int k = 3, const std::set<std::string>& stopwords = default_stopwords());

// extract keywords -> co-occurrence graph -> communities -> graph, in one call.
UtteranceGraph build_dialogue_udg(const corpus::Dialogue& d, int candidate_index, Variant variant,
                                  uint64_t seed);

// A-hat over A-tilde = A + I with degree matrix D from A-tilde's row sums:
// D^(-1/2) A-tilde D^(-1/2) when every edge is undirected, otherwise the
// row-normalized D^(-1) A-tilde.
struct NormalizedAdjacency {
  int nodes = 0;
  std::vector<double> values;  // row-major nodes x nodes
  double at(int i, int j) const { return values[static_cast<size_t>(i) * nodes + j]; }
};

NormalizedAdjacency normalize_adjacency(const UtteranceGraph& g);

// Graphviz text: chronological edges black, topic edges green. Any directed
// edge forces digraph syntax with arrowheads (undirected edges then carry
// dir=none); otherwise a plain undirected graph. Node labels show the top
// keywords joined by "/".
std::string to_dot(const UtteranceGraph& g, const std::vector<KeywordSet>& keywords);

// {"nodes":[{"index","keywords"}], "edges":[{"src","dst","type","directed"}]}
std::string to_json(const UtteranceGraph& g, const std::vector<KeywordSet>& keywords);

}  // namespace grn::udg
