#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "sftlab/finite_system.hpp"
#include "sftlab/patterns.hpp"

namespace sftlab {

/* Bi-infinite symbol sequence, periodic to the left of `lo` and to the right
 * of `hi()`, explicit in between. */
struct EvPeriodicSeq {
  std::vector<int> left_period;
  std::vector<int> center;
  std::vector<int> right_period;
  long long lo = 0;

  long long hi() const { return lo + (long long)center.size() - 1; }
  int at(long long n) const;
};

/* Pseudo-orbit over Z presented finitely: entry(n) approximates the n-th
 * point by its symbol word on [-radius, radius]; entries are periodic on the
 * far left and right.  Outside the declared defect sites, consecutive
 * entries satisfy the orbit relation to dyadic depth `depth`:
 * sigma(entry(n)) and entry(n+1) agree on the enumeration sites 0..depth. */
struct PseudoOrbitPresentation {
  int depth = 0;
  long long lo = 0;
  std::vector<std::vector<int>> left_period;
  std::vector<std::vector<int>> center;
  std::vector<std::vector<int>> right_period;
  std::set<long long> defects;

  int radius() const { return (depth + 1) / 2 + 1; }
  long long hi() const { return lo + (long long)center.size() - 1; }
  const std::vector<int>& entry(long long n) const;
};

/* Checks that every entry is a legal window of X and that the orbit
 * relation holds at the stated depth away from defects.  Throws
 * Inconsistency describing the first violation. */
void validate_po(const SubshiftPresentation& X,
                 const PseudoOrbitPresentation& po);

/* Legal bi-infinite extension of a legal word, placed at
 * [lo, lo+|word|-1]: tails follow the first cycle reached by walking the
 * transfer graph backward / forward from an accepting path. */
class ZShiftGraph;
EvPeriodicSeq extend_word(const ZShiftGraph& zg, const std::vector<int>& word,
                          long long lo);

// symbol word of s on [n-r, n+r]
std::vector<int> window_of(const EvPeriodicSeq& s, long long n, int r);

/* Pseudo-orbit following pieces[0] up to cuts[0], pieces[1] up to cuts[1]
 * and so on (x_n is the window of the active piece at n).  Each cut c makes
 * site c+1 a declared defect unless declare_defects is off (used when the
 * seams genuinely satisfy the depth bound). */
PseudoOrbitPresentation po_from_points(const std::vector<EvPeriodicSeq>& pieces,
                                       const std::vector<long long>& cuts,
                                       int depth, bool declare_defects = true);

/* Shadowing for Z-subshifts with S = {+1}: equivalent to being a shift of
 * finite type.  A negative verdict carries, per cylinder depth k, a valid
 * depth-k pseudo-orbit splicing across a long minimal forbidden word; its
 * forced central word is illegal, so no point shadows it at depth k. */
struct ShadowingVerdict {
  bool shadows = false;
  SftDecision sft;
  struct NoWitness {
    int depth = 0;
    std::vector<int> word;  // minimal forbidden word the splice crosses
    PseudoOrbitPresentation po;
    long long word_lo = 0;  // the splice carries `word` at [word_lo, ...]
  };
  std::vector<NoWitness> witnesses;
};

ShadowingVerdict shadowing_decide(const SubshiftPresentation& X,
                                  const std::vector<GroupElement>& S);

/* Shadow of a pseudo-orbit in a Z-SFT at resolution 2^{-eps_depth}.  The
 * shadow equals the spliced center symbols away from defects; near each
 * defect a patch of changed cells is searched for, and the dyadic bound is
 * enforced at every site outside the listed waived intervals. */
struct TraceResult {
  EvPeriodicSeq shadow;
  std::map<long long, int> mismatches;  // patched cell -> shadow symbol
  std::vector<std::pair<long long, long long>> waived;  // site intervals
  int bound_depth = 0;
  std::string detail;
};

TraceResult trace(const SubshiftPresentation& X,
                  const PseudoOrbitPresentation& po, int eps_depth);

/* Metric versus cover formulation of finite-system shadowing, checked at
 * every realized resolution: the metric route quantifies over point
 * pseudo-orbits within delta, the cover route over block patterns of the
 * Lebesgue-number refinement of the open eps-ball cover. */
struct Lemma33Report {
  struct Line {
    double eps = 0;
    bool metric_holds = false;
    double metric_delta = 0;  // smallest candidate delta that works
    bool cover_holds = false;
    double cover_delta = 0;   // ball radius of the refinement that works
    double lebesgue = 0;      // Lebesgue number of the eps-ball cover
  };
  std::vector<Line> lines;
  bool all_agree = true;
  int ball_radius = 0;
};

Lemma33Report lemma33_crosscheck(const FiniteSystem& sys,
                                 const std::vector<GroupElement>& S);

}  // namespace sftlab
