#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sftlab/group.hpp"

namespace sftlab {

/* Finite totally disconnected system: a finite state set acted on by Z, Z^d
 * or F_k through generator permutations, with an optional exact metric.
 * Lattice generators must commute; arbitrary elements act through cycle
 * powers, so huge exponents are fine. */
class FiniteSystem {
public:
  static FiniteSystem make(
      const GroupCtx& ctx, std::vector<std::string> states,
      std::vector<std::vector<int>> generator_images,
      std::optional<std::vector<std::vector<double>>> metric = std::nullopt);

  const GroupCtx& ctx() const { return ctx_; }
  int size() const { return (int)states_.size(); }
  const std::vector<std::string>& states() const { return states_; }
  int state(const std::string& name) const;

  int apply(const GroupElement& g, int x) const;

  bool has_metric() const { return !dist_.empty(); }
  double dist(int x, int y) const;
  double space_diameter() const;

private:
  explicit FiniteSystem(const GroupCtx& ctx) : ctx_(ctx) {}
  GroupCtx ctx_;
  std::vector<std::string> states_;
  std::vector<std::vector<int>> perm_;      // generator -> image list
  std::vector<std::vector<int>> inv_perm_;  // inverse images
  // cycle structure per generator: id of cycle, position in cycle, cycles
  struct Cycles {
    std::vector<int> cycle_of, pos_in;
    std::vector<std::vector<int>> cycles;
  };
  std::vector<Cycles> cycles_;
  std::vector<std::vector<double>> dist_;
};

/* Finite open cover; blocks are sorted state-index lists in a canonical
 * order.  partition is set when the blocks are pairwise disjoint. */
struct Cover {
  std::vector<std::vector<int>> blocks;
  bool partition = false;

  static Cover of(const FiniteSystem& sys, std::vector<std::vector<int>> blocks);
  static Cover whole(const FiniteSystem& sys);
  static Cover singletons(const FiniteSystem& sys);

  int block_of(int x) const;  // first block containing x
  bool same_blocks(const Cover& o) const;
};

struct CoverOps {
  bool refines = false;        // every V-block inside some U-block
  Cover join;                  // nonempty pairwise intersections
  std::vector<int> iota;       // V-block index -> U-block index (first meeting)
};

/* iota always picks the first intersecting U-block in canonical order; with
 * partition_strict it demands genuine refinement and unique containment. */
CoverOps cover_ops(const FiniteSystem& sys, const Cover& U, const Cover& V,
                   bool partition_strict = false);

struct Geometry {
  double diam = 0;      // max pairwise distance within a block
  double lebesgue = 0;  // open-ball Lebesgue number, capped at diam(X)+1
};

Geometry geometry(const FiniteSystem& sys, const Cover& U);

std::vector<int> star(const std::vector<int>& A, const Cover& U);

/* Coarsest refinement of the partition U stable under every s in S and its
 * inverse: x ~ y iff the U-itineraries agree over the subgroup generated by
 * S.  rounds (optional) reports the number of splitting rounds, which bounds
 * the word length needed to separate inequivalent states. */
Cover orbit_pattern_classes(const FiniteSystem& sys, const Cover& U,
                            const std::vector<GroupElement>& S,
                            int* rounds = nullptr);

}  // namespace sftlab
