#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sftlab/finite_system.hpp"
#include "sftlab/group.hpp"
#include "sftlab/patterns.hpp"
#include "sftlab/towers.hpp"
#include "sftlab/zgraph.hpp"

namespace sftlab {

/* Hitting time set N(U, V) = { g != e : U meets the g-preimage of V }, kept
 * in an exact eventually-periodic form over the integers: membership is
 * listed explicitly on [-window, window] and is purely periodic beyond, with
 * one residue system per side (g > window lies in N iff g mod period is in
 * pos_residues; g < -window uses neg_residues on the nonnegative residue of
 * g).  The identity is never a member.  Lattice actions of rank >= 2 store a
 * ball listing plus componentwise periods that make membership exact through
 * coordinate reduction; free-group actions store a truncated ball listing
 * only. */
struct HittingSet {
  GroupKind kind = GroupKind::Integers;
  bool exact = false;      // the representation decides every element
  bool truncated = false;  // ball listing only, no claim beyond the radius

  // integer form
  long long window = 0;
  std::set<long long> members;  // within [-window, window]; never 0
  long long period = 1;
  std::set<long long> pos_residues;
  std::set<long long> neg_residues;

  // lattice/free form
  int ball_radius = 0;
  std::vector<GroupElement> ball_members;
  std::vector<long long> component_periods;  // per generator, lattice only

  std::string detail;

  // integer-form queries
  bool contains(long long g) const;
  bool empty_set() const;
  bool infinite_set() const;
  bool cofinite_set() const;
  bool syndetic_set() const;  // bounded gaps on both sides
  std::set<long long> complement() const;  // requires cofinite_set()
  std::vector<long long> sample(long long lo, long long hi) const;
  // residues of the side's tail lifted to a common modulus m (m % period == 0)
  std::set<long long> lifted_residues(long long m, bool positive_side) const;

  // lattice-form query: reduce each coordinate by its period into the ball
  bool contains_lattice(const std::vector<long long>& coords) const;

  std::string to_string() const;
};

// relations between integer-form hitting sets, exact on the full group
bool hitting_subset(const HittingSet& a, const HittingSet& b);
bool hitting_equal(const HittingSet& a, const HittingSet& b);
// a minus the listed exceptions is contained in b
bool hitting_subset_excluding(const HittingSet& a,
                              const std::vector<long long>& exceptions,
                              const HittingSet& b);

/* Hitting set between two cylinders of an exact integer-shift presentation.
 * The patterns live on finite windows of the integers (cells may be sparse;
 * unconstrained positions are free).  Exact: explicit joint realizations up
 * to the window span plus the stabilization bound, then periodic tails from
 * reachability-set cycles, detected within twice the squared vertex count.
 * Errors: NotApplicable when either cylinder is empty in the subshift,
 * UnsupportedGroup off the integer shift. */
HittingSet hitting(const SubshiftPresentation& X, const Pattern& U,
                   const Pattern& V);

/* Hitting set between two state sets of a finite system.  Integer actions
 * give the exact eventually-periodic form through image-set recurrence;
 * lattice actions of rank >= 2 give the ball listing with componentwise
 * periods (exact); free-group actions give a truncated ball listing.
 * Errors: NotApplicable when U or V is empty. */
HittingSet hitting(const FiniteSystem& sys, const std::vector<int>& U,
                   const std::vector<int>& V, int ball_radius = 6);

enum class DynProperty {
  Transitive,
  TotallyTransitive,
  WeaklyMixing,
  Mixing,
  Minimal,
  Specification,
};

const char* property_name(DynProperty p);

/* One fragment of a specification request: the glued point must read `word`
 * starting at position `at`. */
struct SpecFragment {
  long long at = 0;
  Word word;
};

/* Constructive specification certificate: the gap set F is the symmetric
 * interval [-radius, radius]; gluing succeeds for every fragment family
 * whose pairwise coordinate distances exceed the radius.  The stored
 * fragments and glued word record one verified instance (the glued word
 * covers [glued_from, glued_from + size)), and the glued point repeats each
 * fragment's symbols, so at every constrained coordinate both points share
 * the symbol-partition block. */
struct SpecificationWitness {
  long long radius = 0;
  std::vector<SpecFragment> fragments;
  Word glued;
  long long glued_from = 0;
  std::string detail;
};

struct SpecGlueResult {
  bool ok = false;
  long long radius = 0;
  Word glued;
  long long glued_from = 0;
  std::string detail;
};

/* Glue the fragments into one legal configuration, demanding that the
 * fragment intervals keep pairwise distance > radius (the interval form of
 * the gap condition).  Fragment words must each be legal.  ok=false reports
 * an honest gluing defeat (possible when the shift is not mixing); the
 * result word covers the convex hull of the fragments and extends to a
 * point. */
SpecGlueResult specification_glue(const SubshiftPresentation& X,
                                  long long radius,
                                  std::vector<SpecFragment> fragments);

struct PropertyVerdict {
  DynProperty property = DynProperty::Transitive;
  bool holds = false;
  std::string certificate;  // witnessing components, indices, cylinder pairs
  std::string caveat;       // scope notes, e.g. the subgroup family tested
  std::optional<SpecificationWitness> witness;  // specification only
  std::string detail;
};

/* Decide a dynamical property of an exact integer-shift presentation.
 * Transitivity canonicalizes the presentation: the shift is transitive iff
 * some strongly connected component of the trimmed graph carries the full
 * language.  Period-sensitive decisions (mixing, total transitivity, weak
 * mixing, specification) run on the language-equal component of the subset
 * determinization, whose cycle structure matches the shift itself.  Total
 * transitivity is decided against the finitely generated subgroups nZ (over
 * the integers these exhaust all nontrivial subgroups); every verdict
 * carries that reduction note.  Minimality means a single periodic orbit.
 * Specification holds iff mixing, with a constructive witness whose radius
 * is the primitivity index.  Errors: UnsupportedGroup off the integer
 * shift, NotApplicable for empty shifts. */
PropertyVerdict check_property(const SubshiftPresentation& X, DynProperty p);

/* Decide a dynamical property of a finite system by exhaustive hitting-set
 * enumeration over the singleton opens; syndeticity is certified by a
 * finite translate covering.  Integer actions support every property;
 * lattice and free-group actions support all but total transitivity, which
 * needs the integer subgroup reduction (UnsupportedGroup otherwise). */
PropertyVerdict check_property(const FiniteSystem& sys, DynProperty p);

// all six properties in order; rows that cannot be decided for this group
// report holds=false with the error text in caveat and decided=false
struct PropertyRow {
  PropertyVerdict verdict;
  bool decided = false;
};
std::vector<PropertyRow> property_table(const SubshiftPresentation& X);
std::vector<PropertyRow> property_table(const FiniteSystem& sys);

/* Transitivity with respect to a furstenberg family: every hitting set of
 * nonempty opens must belong to the family. */
enum class Family {
  Infinite,  // infinite hitting sets: plain transitivity
  Thick,     // contains a translate of every finite set: arbitrarily long runs
  Cofinite,  // cofinite hitting sets: mixing
};

const char* family_name(Family f);

struct FamilyVerdict {
  Family family = Family::Infinite;
  bool holds = false;
  int pairs_checked = 0;
  std::string detail;
};

/* Family transitivity for subshifts is decided through the matching global
 * property (Infinite <-> transitive, Thick <-> weakly mixing over an
 * abelian group, Cofinite <-> mixing) and then cross-checked against the
 * exact hitting sets of every cylinder pair up to the sample length; a
 * mismatch is an Inconsistency.  Finite systems check every singleton pair
 * exhaustively. */
FamilyVerdict family_transitive(const SubshiftPresentation& X, Family f,
                                int sample_length = 3);
FamilyVerdict family_transitive(const FiniteSystem& sys, Family f);

/* Orbit space of a finite integer-action system over a cover, presented as
 * an exact sofic shift: letters are the cover blocks, and a configuration
 * is allowed iff one state witnesses every choice along its orbit. */
SubshiftPresentation orbit_space_subshift(const FiniteSystem& sys,
                                          const Cover& U);

/* Orbit space of an exact integer-shift presentation over a cover of its
 * alphabet by letter sets: the edge labels are rewritten to every covering
 * block, which presents exactly the configurations witnessed by points. */
SubshiftPresentation orbit_space_subshift(
    const SubshiftPresentation& X,
    const std::vector<std::vector<int>>& letter_blocks);

struct LemmaCheck {
  std::string name;
  bool holds = false;
  int cases = 0;
  std::string detail;
};

struct HittingLemmasReport {
  std::vector<LemmaCheck> checks;
  bool all_hold = false;
  std::string detail;
};

/* Verify the hitting-set transfer identities on one instance bundle:
 *  - 6.1/6.2: along the orbit-space tower of `tower_chain`, level hitting
 *    sets of the pulled-back opens embed into limit hitting sets;
 *  - 6.3 (+6.4): the window-pattern sandwich over `sandwich_cover`, with
 *    equality demanded when the cover is a partition;
 *  - 6.5: pointwise equality over the partition;
 *  - 6.14: hitting sets of tuple cylinders at `chain_level` of the
 *    descending-tuple chain equal those of the matching block cylinders.
 * Any failed identity is build-stopping (Inconsistency). */
HittingLemmasReport verify_hitting_lemmas(const FiniteSystem& sys,
                                          const std::vector<Cover>& tower_chain,
                                          const Cover& sandwich_cover,
                                          const Cover& partition,
                                          const std::vector<long long>& window,
                                          int chain_level = 1);

struct InheritanceLine {
  DynProperty property = DynProperty::Transitive;
  bool hypothesis = false;
  bool conclusion = false;
  std::string detail;
};

struct InheritanceReport {
  std::vector<InheritanceLine> lines;
  bool all_hold = false;
  std::string detail;
};

/* Property inheritance from every tower level to the inverse limit
 * (transitive, totally transitive, weakly mixing, mixing, minimal, and
 * specification).  Preconditions: validated tower over the integers with
 * the stabilization property and nonempty levels.  A property that holds on
 * every level but fails on the limit is build-stopping. */
InheritanceReport inheritance_report(const InverseSystem& T);

/* Property inheritance from a finite base system to its orbit space over
 * the cover U: transitivity, total transitivity, weak mixing, and mixing
 * transfer over any cover; minimality and specification are checked only
 * when U is a partition. */
InheritanceReport inheritance_report(const FiniteSystem& sys, const Cover& U);

/* Property inheritance from an exact integer-shift presentation to its
 * orbit space over a cover of the alphabet by letter sets. */
InheritanceReport inheritance_report(
    const SubshiftPresentation& X,
    const std::vector<std::vector<int>>& letter_blocks);

}  // namespace sftlab
