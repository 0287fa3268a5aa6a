#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sftlab/error.hpp"

namespace sftlab {

enum class GroupKind { Integers, Lattice, Free };

/* Element of Z, Z^d or F_k in canonical form: coordinate vector for the
 * lattice kinds, reduced word for free groups.  A word stores signed letters,
 * +(i+1) for generator i and -(i+1) for its inverse; adjacent inverse pairs
 * are cancelled on construction. */
class GroupElement {
public:
  GroupElement() = default;

  static GroupElement lattice(std::vector<long long> coords);
  static GroupElement word(const std::vector<int>& letters);  // reduces

  bool is_word() const { return word_; }
  const std::vector<long long>& data() const { return data_; }

  bool operator==(const GroupElement& o) const = default;
  bool operator<(const GroupElement& o) const;

private:
  std::vector<long long> data_;
  bool word_ = false;
};

/* Group context: the three supported kinds plus the element operations, the
 * canonical enumeration g_0 = e, g_1, ... used by the shift metric, and
 * word-norm balls.  Contexts are immutable values. */
class GroupCtx {
public:
  static GroupCtx integers();
  static GroupCtx lattice(int d);
  static GroupCtx free_group(int k);

  GroupKind kind() const { return kind_; }
  int rank() const { return rank_; }  // d for lattices, k for free groups
  bool operator==(const GroupCtx& o) const = default;

  GroupElement identity() const;
  GroupElement generator(int i) const;
  std::vector<GroupElement> generators() const;

  bool is_identity(const GroupElement& g) const;
  GroupElement mul(const GroupElement& a, const GroupElement& b) const;
  GroupElement inv(const GroupElement& a) const;
  GroupElement pow(const GroupElement& a, long long n) const;

  // throws MalformedElement unless g is a canonical element of this group
  void validate(const GroupElement& g) const;

  // word norm with respect to the standard generators (L1 norm / word length)
  long long norm(const GroupElement& g) const;

  /* Ball of the given radius over S (internally closed under inverses, with
   * the identity), ordered by (length, first-discovered); the discovery order
   * iterates previous-layer elements in ball order and generators in the
   * order s_0, s_0^-1, s_1, s_1^-1, ... so ties resolve to the generator
   * index first and the inverse after the positive generator. */
  std::vector<GroupElement> ball(const std::vector<GroupElement>& S, int radius) const;

  // first n entries of the canonical enumeration (ball layers over the
  // standard generators, same tie-breaking as ball())
  std::vector<GroupElement> enumerate(std::size_t n) const;

  std::string to_string(const GroupElement& g) const;
  GroupElement parse(const std::string& text) const;
  std::string describe() const;

private:
  GroupCtx(GroupKind k, int r) : kind_(k), rank_(r) {}
  GroupKind kind_;
  int rank_;
};

/* Finitely generated subgroup <S> with exact membership: Hermite-style
 * integer elimination for lattices, a folded Stallings automaton for free
 * groups.  Used for the coset structure of pseudo-orbit constraints. */
class Subgroup {
public:
  Subgroup(const GroupCtx& ctx, const std::vector<GroupElement>& gens);

  bool contains(const GroupElement& g) const;
  bool is_whole_group() const;  // every standard generator is a member
  // number of right cosets; nullopt when infinite
  std::optional<long long> index() const;

private:
  GroupCtx ctx_;
  // lattice: row-echelon integer basis (one row per pivot)
  std::vector<std::vector<long long>> basis_;
  // free: folded automaton, adj_[v][letter] = target
  std::vector<std::map<int, int>> adj_;
  int base_ = 0;
};

}  // namespace sftlab
