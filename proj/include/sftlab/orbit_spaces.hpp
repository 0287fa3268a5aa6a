#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sftlab/finite_system.hpp"
#include "sftlab/patterns.hpp"

namespace sftlab {

/* Pseudo-orbit space of a finite system: the SFT over the block alphabet of
 * the cover on window {e} ∪ S whose allowed window patterns P satisfy
 * P(e) ∩ ⋂_{s∈S} Φ_{s⁻¹}(P(s)) ≠ ∅ as state sets.  The window language is
 * exact: an allowed window pattern extends to a full pseudo-orbit pattern by
 * completing a witness point's orbit blockwise. */
struct PseudoOrbitSpace {
  FiniteSystem base;
  Cover cover;
  std::vector<GroupElement> shifts;  // S, deduped, order preserved
  std::vector<GroupElement> window;  // identity first, then the shifts
  std::vector<std::string> block_names;
  SubshiftPresentation presentation;
  std::vector<Pattern> allowed;  // exact allowed window patterns
};

PseudoOrbitSpace build_po_space(const FiniteSystem& sys, const Cover& U,
                                const std::vector<GroupElement>& S);

/* Orbit space of a partition: points are the orbit-pattern classes of the
 * states, the shift acts by class(x) -> class(Phi_g x).  distinguishing
 * radius = number of refinement rounds; class patterns agreeing on the ball
 * of that radius agree everywhere. */
class OrbitSpace {
 public:
  OrbitSpace(FiniteSystem base, Cover u);

  const FiniteSystem& system() const { return base_; }
  const Cover& cover() const { return cover_; }
  const Cover& classes() const { return classes_; }
  int distinguishing_radius() const { return rounds_; }

  int point_count() const { return (int)classes_.blocks.size(); }
  int class_of(int state) const { return classes_.block_of(state); }
  int rep(int cls) const { return classes_.blocks[cls][0]; }
  int shift(const GroupElement& g, int cls) const;

  // cover-block itinerary of a class over the window
  Pattern pattern_of(int cls, const std::vector<GroupElement>& window) const;
  std::set<Pattern> slice(const std::vector<GroupElement>& window) const;

 private:
  FiniteSystem base_;
  Cover cover_;
  Cover classes_;
  int rounds_ = 0;
};

OrbitSpace build_orbit_space(const FiniteSystem& sys, const Cover& U);

/* Total configuration presented finitely: an orbit or constant background
 * with finitely many overridden sites. */
struct FiniteConfig {
  enum class Background { Orbit, Constant };
  Background background = Background::Orbit;
  int base_state = 0;
  std::map<GroupElement, int> overrides;

  int value(const FiniteSystem& sys, const GroupElement& g) const;
};

struct PoVerdict {
  bool yes = false;
  std::map<GroupElement, int> witness;  // checked site -> block index
  GroupElement offending;               // first failing site when !yes
  std::string detail;
};

/* Does the configuration carry an (S,U)-pseudo-orbit pattern?  Per site h
 * the candidate blocks are those containing x(h) and Phi_s(x(s⁻¹h)) for all
 * s; the answer is yes iff no site has an empty candidate set. */
PoVerdict is_pseudo_orbit(const FiniteSystem& sys, const FiniteConfig& seq,
                          const Cover& U, const std::vector<GroupElement>& S);

/* Cylinder-backed variant for subshift phase spaces: configuration values
 * are partial patterns, cover blocks are unions of cylinders given by their
 * defining patterns.  Membership that the windows cannot decide raises
 * insufficient-window. */
struct CylinderCover {
  std::vector<std::vector<Pattern>> blocks;  // block = union of cylinders
};

PoVerdict is_pseudo_orbit_cylinder(const GroupCtx& ctx,
                                   const std::map<GroupElement, Pattern>& seq,
                                   const CylinderCover& U,
                                   const std::vector<GroupElement>& S);

struct CosetChoice {
  GroupElement rep;
  int state;
};

/* Outcome of the shadowing decision over a finite totally disconnected
 * system.  When it holds the witnessing refinement is the singleton
 * partition and `reverified` records the blockwise window re-check.  When it
 * fails, `choices` describe an explicit pseudo-orbit x(h·rep) = Phi_h(state)
 * on each coset of <S> meeting the decision ball, and `defeats` maps every
 * state to a site where the configuration's block pattern leaves that
 * state's orbit pattern. */
struct ShadowingDecision {
  bool holds = false;
  Cover refinement;
  bool reverified = false;
  int window_radius = 0;
  std::string detail;
  std::vector<CosetChoice> choices;
  std::map<int, GroupElement> defeats;

  int config_value(const FiniteSystem& sys, const std::vector<GroupElement>& S,
                   const GroupElement& g) const;
};

ShadowingDecision check_shadowing_td(const FiniteSystem& sys,
                                     const std::vector<GroupElement>& S,
                                     const Cover& U);

/* Relations between orbit and pseudo-orbit spaces under the block map of a
 * refinement V of U: the orbit spaces agree through iota, orbit patterns
 * factor through the pseudo-orbit space of V, iota maps it into the
 * pseudo-orbit space of U, and iota commutes with every shift. */
struct Lemma41Report {
  bool orbit_image_equal = false;
  bool orbit_inside_iota_po = false;
  bool iota_po_inside_po = false;
  bool shift_commutes = false;
  int window_radius = 0;
  std::string detail;

  bool all_hold() const {
    return orbit_image_equal && orbit_inside_iota_po && iota_po_inside_po &&
           shift_commutes;
  }
};

Lemma41Report verify_lemma41(const FiniteSystem& sys, const Cover& U,
                             const Cover& V, const std::vector<GroupElement>& S);

/* Recover a point from per-partition block picks along a chain, plus its
 * images under every g in the given ball radius, computed from orbit-space
 * data alone and verified against direct application. */
struct ReconstructResult {
  int point = 0;
  std::map<GroupElement, int> images;  // g -> state
};

ReconstructResult reconstruct(const FiniteSystem& sys,
                              const std::vector<Cover>& chain,
                              const std::vector<int>& picks, int radius = 3);

}  // namespace sftlab
