#pragma once

#include <string>
#include <vector>

#include "sftlab/finite_system.hpp"
#include "sftlab/orbit_spaces.hpp"
#include "sftlab/patterns.hpp"
#include "sftlab/shadowing.hpp"
#include "sftlab/towers.hpp"
#include "sftlab/zgraph.hpp"

namespace sftlab {

/* Equivariant surjection between finite systems over the same group, given
 * by a total state map.  make_factor validates the group match, totality,
 * surjectivity and commutation with every generator (hence with the whole
 * group); violations raise Inconsistency with a malformed-factor message. */
struct FactorMap {
  FiniteSystem source, target;
  std::vector<int> state_map;

  bool bijective() const {
    if (source.size() != target.size()) return false;
    std::vector<char> hit(target.size(), 0);
    for (int v : state_map) {
      if (v < 0 || v >= target.size() || hit[v]) return false;
      hit[v] = 1;
    }
    return true;
  }
};

FactorMap make_factor(const FiniteSystem& source, const FiniteSystem& target,
                      std::vector<int> state_map);

/* Lift decision across a factor map.  The question: is there a target cover
 * U_Y such that every (S, U_Y)-pseudo-orbit downstairs is matched by an
 * (S, U_X)-pseudo-orbit upstairs — matched exactly (check_lifts: the image
 * equals the pseudo-orbit sitewise) or approximately (check_almost_lifts:
 * image and pseudo-orbit share a W_Y block sitewise)?
 *
 * Candidate covers are the image of U_X and the singletons, the join
 * lattice they generate; singletons are decisive, because every coarser
 * cover admits a superset of the singleton-level pseudo-orbits.  Over the
 * integer shift the decision is exact: pseudo-orbit configurations form a
 * shift of finite type over the state alphabet, the liftable ones a sofic
 * relabeling of the upstairs configurations, and the verdict is a language
 * inclusion with a concrete defeating word on failure.  Other groups are
 * served by the exact special cases (one-point target, bijective map,
 * every shift the identity — each decided by a direct construction) and
 * refused with UnsupportedGroup otherwise. */
struct LiftReport {
  bool lifts = false;
  Cover witness;             // target cover certifying the lift when `lifts`
  std::string witness_kind;  // "image of the source cover" or "singletons"
  std::vector<int> defeat;   // else a target-state word: a pseudo-orbit
                             // segment at singleton resolution with no lift
  std::string detail;
};

LiftReport check_lifts(const FactorMap& f, const std::vector<GroupElement>& S,
                       const Cover& U_X);

LiftReport check_almost_lifts(const FactorMap& f,
                              const std::vector<GroupElement>& S,
                              const Cover& U_X, const Cover& W_Y);

/* Metric (eps, eta, delta) form of the almost-lift property on metrized
 * finite systems, cross-checked against the cover form at every realized
 * threshold pair: the metric route asks whether some delta > 0 makes every
 * (S, delta)-pseudo-orbit downstairs matched within eps by the image of an
 * (S, eta)-pseudo-orbit upstairs; the cover route runs the cover core on
 * the open-ball covers of radii eta/2 and eps/2.  The two formulations are
 * equivalent, so all_agree is the tested assertion. */
struct AlmostLift55Report {
  struct Line {
    double eps = 0, eta = 0;
    bool metric_holds = false;
    double metric_delta = 0;  // largest realized delta that works
    bool cover_holds = false;
  };
  std::vector<Line> lines;
  bool all_agree = true;
  std::string detail;
};

AlmostLift55Report crosscheck_55(const FactorMap& f,
                                 const std::vector<GroupElement>& S);

/* Implication harness around shadowing transfer on a concrete finite factor
 * map: computes the three exact verdicts (source shadows, target shadows,
 * the map almost lifts — all at the decisive singleton resolutions) and
 * checks both implications: shadowing upstairs plus almost-lifting forces
 * shadowing downstairs, and shadowing downstairs forces almost-lifting.
 * The implications are theorems, so a violation means two deciders
 * disagree: it raises Inconsistency instead of being reported. */
struct Harness54Report {
  bool source_shadows = false;
  bool target_shadows = false;
  bool almost_lifts = false;
  bool forward_vacuous = false;  // hypothesis of (source && almost) => target failed
  bool reverse_vacuous = false;  // hypothesis of target => almost failed
  std::string detail;
};

Harness54Report harness_54(const FactorMap& f,
                           const std::vector<GroupElement>& S);

/* ---- Integer-shift subshift route: sliding block codes ---------------- */

/* Sliding block code between Z-subshift presentations with exact transfer
 * graphs: output letter y_i = table[x_i .. x_{i+window-1}] with the table
 * indexed row-major, first letter most significant.  make_block_code
 * validates the shape and that the code maps the source exactly onto the
 * target (image language equals target language, via the higher-block
 * image graph); sliding codes are equivariant by construction. */
struct BlockCode {
  SubshiftPresentation source, target;
  int window = 1;
  std::vector<int> table;

  // output letter for the window word w[i .. i+window-1]
  int apply(const Word& w, int i) const;
};

BlockCode make_block_code(const SubshiftPresentation& source,
                          const SubshiftPresentation& target, int window,
                          std::vector<int> table);

// transfer graph of the code's image subshift (higher-block relabeling)
ZShiftGraph block_code_image(const BlockCode& c);

/* Bounded-depth lift decision for block codes with S = {+1}.  Depth-k
 * pseudo-orbits are presented on the window alphabet: vertices are legal
 * (2r+1)-windows with r = R(k)+1, consecutive entries agree after one shift
 * on the enumeration sites 0..k.  The liftable sequences form a relabeling
 * of the upstairs pseudo-orbit graph through the code's window image —
 * compared exactly (check_lifts_z) or on the sites 0..depth_w only
 * (check_almost_lifts_z).  The search ascends the downstairs depth, which
 * is monotone (a deeper witness restricts to shallower pseudo-orbits), so
 * the first success is the minimal witness depth.  A failure at
 * max_witness_depth ships the defeating downstairs window sequence; all
 * verdicts carry their depths. */
struct ZLiftReport {
  bool lifts = false;
  int depth_x = 0;            // upstairs pseudo-orbit depth searched against
  int depth_w = -1;           // agreement depth (-1 = exact window agreement)
  int witness_depth = -1;     // minimal downstairs depth that works
  int searched_up_to = -1;    // deepest downstairs depth tried when !lifts
  std::vector<Word> defeat;   // downstairs window sequence with no lift
  std::string detail;
};

ZLiftReport check_lifts_z(const BlockCode& c, int depth_x,
                          int max_witness_depth);

ZLiftReport check_almost_lifts_z(const BlockCode& c, int depth_x, int depth_w,
                                 int max_witness_depth);

/* Depth-stamped implication harness for block codes with S = {+1}:
 * shadowing verdicts are exact (finite-type decisions), the almost-lift
 * verdict is the bounded-depth search at the given resolutions.  A
 * refutation of the almost-lift (a defeating pseudo-orbit) is exact, so
 * both implications are checked faithfully; a positive bounded-depth lift
 * verdict under a non-shadowing target leaves the forward implication
 * inconclusive (the search depth may be too shallow) and says so instead
 * of claiming a violation.  Genuine violations raise Inconsistency. */
struct Harness54ZReport {
  bool source_shadows = false;
  bool target_shadows = false;
  ZLiftReport almost;
  bool forward_vacuous = false;
  bool reverse_vacuous = false;
  bool inconclusive = false;
  std::string detail;
};

Harness54ZReport harness_54_z(const BlockCode& c, int depth_x, int depth_w,
                              int max_witness_depth);

/* Corollary harness: a Mittag-Leffler tower of levelwise-shadowing systems,
 * a factor map from its thread system, and the assertion that the factor's
 * target then shadows.  Preconditions reuse the tower preservation report
 * (levelwise shadowing + the stabilized-image condition) and the
 * almost-lift decision at singleton resolutions; when any precondition
 * fails, no base verdict is asserted.  With preconditions holding, a
 * negative base verdict would contradict the corollary and raises
 * Inconsistency. */
struct Harness56Report {
  bool preconditions_hold = false;
  Preservation34Report tower;
  LiftReport almost;
  bool verdict_given = false;
  bool base_shadows = false;
  std::string detail;

  bool holds() const { return preconditions_hold && base_shadows; }
};

Harness56Report harness_56(const InverseSystem& T, const FactorMap& f,
                           const std::vector<GroupElement>& S);

}  // namespace sftlab
