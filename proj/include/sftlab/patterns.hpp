#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sftlab/group.hpp"

namespace sftlab {

class ZShiftGraph;

/* Finite pattern: a total assignment window -> symbol, stored sparsely since
 * windows are irregular group subsets (balls in F_2, S-sets, ...).  Symbols
 * are indices into the owning presentation's alphabet. */
struct Pattern {
  std::map<GroupElement, int> cells;

  static Pattern on(const std::vector<GroupElement>& window,
                    const std::vector<int>& symbols);

  bool has(const GroupElement& g) const { return cells.count(g) != 0; }
  int at(const GroupElement& g) const;
  std::vector<GroupElement> window() const;
  Pattern restrict_to(const std::vector<GroupElement>& sub) const;

  bool operator==(const Pattern& o) const { return cells == o.cells; }
  bool operator<(const Pattern& o) const { return cells < o.cells; }
};

/* sigma_g(x)(h) = x(hg); the result lives on A g^{-1}. */
Pattern shift_apply(const Pattern& x, const GroupElement& g, const GroupCtx& ctx);

struct SoficEdge {
  int from, to, label;
};
struct SoficGraph {
  int vertices = 0;
  std::vector<SoficEdge> edges;
};

enum class Exactness { Exact, LocallyAdmissibleUpperBound };

struct LanguageSlice {
  std::vector<GroupElement> window;
  std::set<Pattern> patterns;
  Exactness flag = Exactness::Exact;
};

/* A subshift given either by finitely many forbidden patterns on a window
 * (any supported group) or by a labeled graph (Z only).  Sofic graphs are
 * trimmed on construction so that every vertex lies on a bi-infinite walk.
 * Nonemptiness is decided exactly over Z and at window level elsewhere. */
class SubshiftPresentation {
public:
  enum class Mode { SFT, Sofic };

  static SubshiftPresentation sft(const GroupCtx& ctx,
                                  std::vector<std::string> alphabet,
                                  std::vector<GroupElement> window,
                                  std::vector<Pattern> forbidden);
  static SubshiftPresentation sofic(std::vector<std::string> alphabet,
                                    const SoficGraph& graph);

  Mode mode() const { return mode_; }
  const GroupCtx& ctx() const { return ctx_; }
  const std::vector<std::string>& alphabet() const { return alphabet_; }
  const std::vector<GroupElement>& window() const { return window_; }
  const std::vector<Pattern>& forbidden() const { return forbidden_; }
  const SoficGraph& graph() const { return graph_; }

  bool nonempty() const { return nonempty_; }
  bool nonempty_window_level_only() const { return window_level_only_; }

  int symbol(const std::string& name) const;  // index lookup

  // transfer graph when the presentation is Z-exact, else nullptr
  const ZShiftGraph* zgraph() const { return zgraph_.get(); }
  bool z_exact() const { return zgraph_ != nullptr; }

private:
  explicit SubshiftPresentation(const GroupCtx& ctx) : ctx_(ctx) {}
  Mode mode_ = Mode::SFT;
  GroupCtx ctx_;
  std::vector<std::string> alphabet_;
  std::vector<GroupElement> window_;
  std::vector<Pattern> forbidden_;
  SoficGraph graph_;  // trimmed
  std::shared_ptr<const ZShiftGraph> zgraph_;
  bool nonempty_ = false;
  bool window_level_only_ = false;
};

/* L_A(X).  Exact over Z via transfer-graph bi-extendability; elsewhere the
 * locally admissible patterns on a padded window, flagged as an upper bound. */
LanguageSlice language(const SubshiftPresentation& X, const std::vector<GroupElement>& A);

/* d(x,y) = 2^{-n} with n the least enumeration index of disagreement.  When
 * the common window is exhausted without disagreement the value is only an
 * upper bound (bound = true, exponent = first missing index).  min_precision
 * >= 0 demands the scan reach that index before giving up. */
struct DyadicDistance {
  int exponent = 0;
  bool bound = false;
  double value() const;
  bool operator==(const DyadicDistance& o) const = default;
};

DyadicDistance shift_metric(const Pattern& x, const Pattern& y, const GroupCtx& ctx,
                            int min_precision = -1);

/* Exact SFT-ness decision for sofic Z-shifts: either a window length and a
 * defining forbidden-word set, or per-m witness triples (u, v, w) with
 * uv, vw in the language but uvw not. */
struct SftDecision {
  bool is_sft = false;
  int window = 0;  // word length of the forbidden set when is_sft
  std::set<std::vector<int>> forbidden_words;
  struct Witness {
    std::vector<int> u, v, w;
  };
  std::vector<Witness> witnesses;  // one per tested m when not SFT
  int tested_up_to = 0;
};

SftDecision sofic_is_sft(const SubshiftPresentation& X);

/* Words w with w not in L but both w minus its first and minus its last
 * letter in L, up to the given length.  Z presentations only. */
std::set<std::vector<int>> minimal_forbidden_words(const SubshiftPresentation& X,
                                                   int max_len);

}  // namespace sftlab
