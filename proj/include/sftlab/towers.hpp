#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sftlab/finite_system.hpp"
#include "sftlab/orbit_spaces.hpp"
#include "sftlab/patterns.hpp"
#include "sftlab/zgraph.hpp"

namespace sftlab {

/* One level of an inverse system: an abstract finite point set with the
 * generator action.  May be empty. */
struct TowerLevel {
  std::vector<std::string> names;
  std::vector<std::vector<int>> gen_images;  // per context generator

  int size() const { return (int)names.size(); }
};

TowerLevel level_of(const FiniteSystem& sys);

/* Finite chain of finite levels with bonding maps downward.  bondings[i]
 * sends level i+1 points to level i points; composites are derived, so the
 * composition identity holds by construction and validate_tower checks
 * shapes, identity conventions, and equivariance on the generators. */
struct InverseSystem {
  GroupCtx ctx = GroupCtx::integers();
  std::vector<TowerLevel> levels;
  std::vector<std::vector<int>> bondings;

  int top() const { return (int)levels.size() - 1; }
};

void validate_tower(const InverseSystem& T);

// composite bonding map: level `from` -> level `to` (to <= from)
std::vector<int> bonding_composite(const InverseSystem& T, int from, int to);

InverseSystem tower_of_orbit_spaces(const FiniteSystem& sys,
                                    const std::vector<Cover>& chain);

/* Stabilization certificate: eta[l] is the least index such that the image
 * of every higher level in level l equals the image of level eta[l].  On a
 * finite chain the images can still be strictly shrinking when the top is
 * reached; that leaves no stabilization witness and is reported as a
 * violation with the shrinking image chain. */
struct MlReport {
  bool holds = true;
  std::vector<int> eta;
  int violation_at = -1;
  std::vector<std::vector<int>> violation_chain;  // image point sets at the violating level
  std::string detail;
};

MlReport check_ml(const InverseSystem& T);

/* Threads: compatible tuples, one point per level.  On a finite chain every
 * thread is determined by its top point. */
struct ThreadSet {
  std::vector<std::vector<int>> threads;  // threads[t][l] = point at level l
};

ThreadSet limit_threads(const InverseSystem& T);

// the componentwise action on threads as a finite system (requires >= 1 thread)
FiniteSystem thread_system(const InverseSystem& T);

/* Conjugacy between the pseudo-orbit-space tower and the orbit-space tower
 * over a partition chain ending at singletons, for a system with verified
 * shadowing.  p is the per-level witness index: the recoded pseudo-orbit
 * language of every level at or above p[l] equals the orbit language of
 * level l.  Thread identities are checked on full enumerations. */
struct Conjugacy44Report {
  std::vector<int> p;
  int po_thread_count = 0;
  int orbit_thread_count = 0;
  bool psi_defined = false;            // image equalities behind p all verified
  bool j_star_bijective = false;
  bool j_after_psi_identity = false;   // j* . psi = id on pseudo-orbit threads
  bool psi_after_j_identity = false;   // psi . j* = id on orbit threads
  MlReport orbit_ml;
  bool po_ml = false;
  std::vector<int> po_eta;
  std::string detail;

  bool all_hold() const {
    return psi_defined && j_star_bijective && j_after_psi_identity &&
           psi_after_j_identity && orbit_ml.holds && po_ml;
  }
};

Conjugacy44Report conjugacy_44(const FiniteSystem& sys,
                               const std::vector<GroupElement>& S,
                               const std::vector<Cover>& chain);

/* Shadowing of the thread system of a tower whose levels each have verified
 * shadowing and whose image chains stabilize. */
struct Preservation34Report {
  bool preconditions_hold = false;
  std::vector<ShadowingDecision> level_checks;
  MlReport ml;
  int thread_count = 0;
  std::optional<ShadowingDecision> thread_check;
  std::string detail;

  bool holds() const {
    return preconditions_hold &&
           (thread_count == 0 || (thread_check && thread_check->holds));
  }
};

Preservation34Report preservation_34(const InverseSystem& T,
                                     const std::vector<GroupElement>& S);

/* Shrinking cover sequence on a metrized system: U_0 = {X}; each next cover
 * refines, witnesses shadowing for the previous one, and has diameter below
 * a third of the previous Lebesgue number; stabilizes at singletons.  w_map
 * fixes, per block of U_{n+2}, a block of U_n containing its star in
 * U_{n+1}. */
struct CoverSequence13 {
  std::vector<GroupElement> S;
  std::vector<Cover> covers;
  bool stabilized = false;
  std::vector<Geometry> geom;
  std::vector<std::vector<int>> w_map;
  std::string detail;
};

CoverSequence13 build_cover_sequence_13(const FiniteSystem& sys,
                                        const std::vector<GroupElement>& S);

/* Factor pipeline over the even-indexed towers of a cover sequence: the
 * star-recode omega maps each pseudo-orbit space into the orbit space two
 * levels down (verified by exact language inclusion), the induced map on
 * threads is surjective, and composing with the point map psi exhibits the
 * base system as a factor with a nonempty fiber over every state. */
struct Factor13Report {
  int orbit_levels = 0;
  int po_levels = 0;
  bool omega_inclusion_ok = false;
  bool omega_star_surjective = false;
  bool psi_surjective = false;
  bool equivariant = false;
  std::vector<int> fiber_sizes;
  std::string detail;

  bool all_hold() const {
    return omega_inclusion_ok && omega_star_surjective && psi_surjective &&
           equivariant;
  }
};

Factor13Report factor_13(const FiniteSystem& sys, const CoverSequence13& chain);

/* Nested ball-cover chain with tuple alphabets: V_0 from unit balls, each
 * next level joined with a finer ball subcover until singletons; U_n is the
 * alphabet of descending block tuples, kappa the last coordinate, and the
 * per-level subshifts carry the exact tuple-pattern language (built over Z;
 * alphabet index = tuple index). */
struct Chain15 {
  std::vector<Cover> V;
  bool stabilized = false;
  std::vector<std::vector<std::vector<int>>> tuples;  // tuples[n][i] = blocks V_0..V_n
  std::vector<SubshiftPresentation> oprime;           // per n, over Z only
  std::string detail;
};

Chain15 build_chain_15(const FiniteSystem& sys);

/* Surjectivity of the truncation recode from level n+k tuples onto level n:
 * exact language equality of the recoded image, plus the constructive lift
 * of every window pattern through a shared witness point. */
struct Lemma615Report {
  bool image_equal = false;
  int lifted = 0;
  bool constructive_ok = false;
  std::string detail;

  bool holds() const { return image_equal && constructive_ok; }
};

Lemma615Report lemma_615_surjectivity(const FiniteSystem& sys,
                                      const Chain15& chain, int n, int k);

}  // namespace sftlab
