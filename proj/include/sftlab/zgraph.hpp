#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sftlab/error.hpp"

namespace sftlab {

using Word = std::vector<int>;

struct SoficGraph;

/* Trimmed transfer graph of a Z-shift: every vertex has in- and out-degree
 * >= 1, so finite path labels are exactly the factor language.  Built either
 * from a labeled graph or as the de Bruijn graph on (m-1)-blocks of a set of
 * allowed m-words.  At most 64 vertices after trimming (bitset row masks). */
class ZShiftGraph {
public:
  static ZShiftGraph from_sofic(int alphabet_size, const SoficGraph& g);
  static ZShiftGraph from_allowed_words(int alphabet_size, int m,
                                        const std::set<Word>& allowed);

  int alphabet_size() const { return asz_; }
  int vertex_count() const { return (int)out_.size(); }
  bool empty() const { return out_.empty(); }

  std::set<Word> words(int len) const;  // exact L_len
  bool accepts(const Word& w) const;

  struct SftResult {
    bool is_sft = false;
    int m = 0;  // memory: window = m + 1
    struct Witness {
      Word u, v, w;
    };
    std::vector<Witness> witnesses;
    int tested_up_to = 0;
  };
  SftResult decide_sft() const;

  std::set<Word> minimal_forbidden(int max_len) const;

  // strongly connected components, by vertex -> component id (-1 never)
  std::vector<int> scc_ids(int* count = nullptr) const;
  bool irreducible() const;  // one SCC covering every vertex (and nonempty)
  // gcd of cycle lengths through each component; 0 for empty graph
  long long period() const;
  /* least t such that every ordered vertex pair is joined by a path of every
   * length >= t; -1 if the graph is not primitive (not irreducible or
   * period > 1).  Capped by the Wielandt bound. */
  long long primitive_index() const;

  // tensor product with same alphabet: used for weak-mixing checks
  static ZShiftGraph product(const ZShiftGraph& a, const ZShiftGraph& b);

  /* Does some path of the requested length run u -> v?  Exact via boolean
   * matrix powers. */
  bool connects(int u, int v, long long len) const;
  // one path label of given length u -> v (requires connects)
  Word path_label(int u, int v, long long len) const;

  const std::vector<std::vector<std::pair<int, int>>>& out() const { return out_; }
  const std::vector<Word>& vertex_words() const { return vertex_word_; }

private:
  int asz_ = 0;
  // out_[v] = list of (label, target)
  std::vector<std::vector<std::pair<int, int>>> out_;
  std::vector<Word> vertex_word_;  // de Bruijn block labels when applicable
  void trim();
};

// letterwise image: relabel every edge through letter_map (a full map from
// the old alphabet into [0, out_alphabet))
ZShiftGraph zshift_recode(const ZShiftGraph& g, const std::vector<int>& letter_map,
                          int out_alphabet);

/* Shortest word in L(a) \ L(b), or nullopt when L(a) is included in L(b).
 * Exact via breadth-first subset tracking of b-vertices along a-paths;
 * letters of a that b's alphabet lacks defeat immediately.  Budgeted. */
std::optional<Word> zshift_inclusion_gap(const ZShiftGraph& a, const ZShiftGraph& b);

// factor-language inclusion L(a) subseteq L(b), exact via subset tracking
bool zshift_includes(const ZShiftGraph& a, const ZShiftGraph& b);

bool zshift_language_equal(const ZShiftGraph& a, const ZShiftGraph& b);

/* Does the bi-infinite repetition of `period` lie in the shift presented by
 * g?  Exact: the point is accepted iff the digraph whose arcs join u to v
 * whenever some path u -> v reads one full copy of `period` has a cycle. */
bool zshift_accepts_periodic(const ZShiftGraph& g, const Word& period);

}  // namespace sftlab
